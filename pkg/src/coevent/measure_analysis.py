"""Zero-set catalogs and decoherent-partition search for a validated DF.

Zero events are enumerated exhaustively per final sector and stored with a
union-assembly rule: an event is a zero event iff its part in every sector
is one of that sector's zero events.  This is exact under strong positivity,
where the measure is additive and nonnegative across verified sectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InvalidPartitionError, NotAZeroSetError, SpaceTooLargeError
from .histories import DecoherenceFunctional, Event, final_sectors, measure
from .tolerances import BORDERLINE_MAX, EPS_DF, EPS_ZERO

SECTOR_ENUMERATION_LIMIT = 20
PARTITION_SPACE_LIMIT = 16


def _subset_measures(block: np.ndarray) -> np.ndarray:
    """mu of every subset of a k x k Hermitian block, indexed by bitmask.

    Built by doubling: adding member b to a mask adds D[b, b] plus twice the
    real part of row b against the existing members.
    """
    k = block.shape[0]
    vals = np.zeros(1 << k)
    rows = 2.0 * np.real(block)
    diag = np.real(np.diagonal(block))
    for b in range(k):
        cross = np.zeros(1 << b)
        for j in range(b):
            half = 1 << j
            cross[half: half << 1] = cross[:half] + rows[b, j]
        vals[1 << b: 1 << (b + 1)] = vals[: 1 << b] + diag[b] + cross
    return vals


def _subset_measures_simple(block: np.ndarray) -> np.ndarray:
    """Reference implementation of _subset_measures, O(4^k)."""
    k = block.shape[0]
    out = np.zeros(1 << k)
    for m in range(1 << k):
        idx = [i for i in range(k) if m >> i & 1]
        out[m] = float(np.real(block[np.ix_(idx, idx)].sum()))
    return out


def _spread_mask(local_mask: int, members: tuple[int, ...]) -> int:
    g = 0
    b = 0
    while local_mask:
        if local_mask & 1:
            g |= 1 << members[b]
        local_mask >>= 1
        b += 1
    return g


def _maximal_masks(masks: list[int]) -> list[int]:
    """Inclusion-maximal members of a family of bitmasks."""
    out: list[int] = []
    for m in sorted(masks, key=lambda x: -int(x).bit_count()):
        if not any(m & ~kept == 0 for kept in out):
            out.append(m)
    return out


@dataclass(frozen=True)
class SectorZeroData:
    """Exhaustive zero-set data for one final sector (global bitmasks)."""

    label: str
    sector_mask: int
    members: tuple[int, ...]
    zero_masks: frozenset[int]
    maximal_masks: tuple[int, ...]
    nontrivial_masks: tuple[int, ...]
    borderline_masks: tuple[int, ...]


def _sort_key(space, mask: int):
    return (int(mask).bit_count(), Event(space, mask).indices)


class ZeroSetCatalog:
    """Per-sector zero events of a DF plus the union-assembly rule."""

    def __init__(self, df: DecoherenceFunctional, sectors: tuple[SectorZeroData, ...]):
        self.df = df
        self.sectors = sectors

    @property
    def sector_mode(self) -> bool:
        """False when the whole space was enumerated as a single block."""
        return self.df.sectors_verified()

    def is_zero_event(self, event: Event) -> bool:
        """True iff every sector part of the event is a sector zero event."""
        return all(event.mask & s.sector_mask in s.zero_masks for s in self.sectors)

    def _events(self, mask_lists) -> list[Event]:
        space = self.df.space
        out = []
        for masks in mask_lists:
            out.extend(Event(space, m) for m in sorted(masks, key=lambda m: _sort_key(space, m)))
        return out

    def zero_events_sectorwise(self) -> list[Event]:
        """Nonempty zero events lying inside a single sector, sector by sector."""
        return self._events([m for m in s.zero_masks if m] for s in self.sectors)

    def nontrivial_zero_events(self) -> list[Event]:
        return self._events(s.nontrivial_masks for s in self.sectors)

    def borderline_events(self) -> list[Event]:
        """Events whose measure falls inside the borderline warning band."""
        return self._events(s.borderline_masks for s in self.sectors)

    def maximal_zero_events(self) -> list[Event]:
        """Inclusion-maximal zero events, assembled as unions across sectors."""
        space = self.df.space
        per_sector = []
        for s in self.sectors:
            masks = sorted(s.maximal_masks, key=lambda m: _sort_key(space, m))
            per_sector.append(masks if masks else [0])
        assembled = []
        for choice in product(*per_sector):
            m = 0
            for part in choice:
                m |= part
            assembled.append(m)
        return [Event(space, m) for m in sorted(set(assembled), key=lambda m: _sort_key(space, m))]

    def counts(self) -> dict:
        return {
            "sectors": len(self.sectors),
            "zero_sectorwise": sum(len([m for m in s.zero_masks if m]) for s in self.sectors),
            "nontrivial": sum(len(s.nontrivial_masks) for s in self.sectors),
            "borderline": sum(len(s.borderline_masks) for s in self.sectors),
        }


def find_zero_sets(df: DecoherenceFunctional,
                   sector_limit: int = SECTOR_ENUMERATION_LIMIT) -> ZeroSetCatalog:
    """Exhaustively catalog measure-zero events of a validated DF.

    Enumeration runs per verified final sector, or over the whole space when
    no block structure is available.  Raises SpaceTooLargeError when any
    enumerated block exceeds ``sector_limit`` members.
    """
    if df.validation is not None and not df.validation.passed:
        raise NotAZeroSetError(
            "refusing to catalog a decoherence functional that failed validation"
        )
    sectors = final_sectors(df)
    if df.sectors_verified():
        names = [lab for lab, _ in df.space.final_sector_masks()]
    else:
        names = ["all"]
    data = []
    for name, sector in zip(names, sectors):
        members = sector.indices
        k = len(members)
        if k > sector_limit:
            raise SpaceTooLargeError(
                f"sector of {k} histories exceeds enumeration limit {sector_limit}"
            )
        if k >= 16:
            warnings.warn(f"enumerating 2^{k} subsets of one sector; this may be slow")
        block = df.matrix[np.ix_(members, members)]
        vals = _subset_measures(block)
        zero_local = np.flatnonzero(np.abs(vals) <= EPS_ZERO)
        border_local = np.flatnonzero((np.abs(vals) > EPS_ZERO) & (np.abs(vals) <= BORDERLINE_MAX))
        diag_pos = [bool(vals[1 << b] > EPS_ZERO) for b in range(k)]
        zero_masks = [_spread_mask(int(m), members) for m in zero_local]
        nontrivial = [
            _spread_mask(int(m), members)
            for m in zero_local
            if int(m).bit_count() >= 2 and any(diag_pos[b] for b in range(k) if m >> b & 1)
        ]
        data.append(SectorZeroData(
            label=name,
            sector_mask=sector.mask,
            members=members,
            zero_masks=frozenset(zero_masks),
            maximal_masks=tuple(_maximal_masks(zero_masks)),
            nontrivial_masks=tuple(nontrivial),
            borderline_masks=tuple(_spread_mask(int(m), members) for m in border_local),
        ))
    return ZeroSetCatalog(df, tuple(data))


def classify_zero_set(df: DecoherenceFunctional, event: Event) -> str:
    """'trivial' or 'nontrivial' for a zero event.

    A zero event is nontrivial iff some proper nonempty subset has measure
    above EPS_ZERO.  Under strong positivity that reduces to a singleton
    check: if every member history has zero measure, Cauchy-Schwarz kills
    every entry of the block, hence every subset.  Raises NotAZeroSetError
    when the event itself has measure above EPS_ZERO.
    """
    mu = measure(df, event)
    if abs(mu) > EPS_ZERO:
        raise NotAZeroSetError(f"event has measure {mu!r}, not a zero set")
    if len(event) <= 1:
        return "trivial"
    diag = np.real(np.diagonal(df.matrix))
    if any(diag[i] > EPS_ZERO for i in event.indices):
        return "nontrivial"
    return "trivial"


@dataclass(frozen=True)
class PartitionReport:
    """Off-diagonal residual of one partition under one decoherence mode."""

    cells: tuple[Event, ...]
    mode: str
    residual: float
    passed: bool

    def cell_labels(self) -> list[list[str]]:
        return [list(c.labels) for c in self.cells]

    def as_dict(self) -> dict:
        return {
            "cells": self.cell_labels(),
            "mode": self.mode,
            "residual": self.residual,
            "passed": self.passed,
        }


def _check_partition(df: DecoherenceFunctional, cells) -> tuple[Event, ...]:
    cells = tuple(cells)
    if not cells or any(not c for c in cells):
        raise InvalidPartitionError("partition cells must be nonempty")
    union = 0
    total = 0
    for c in cells:
        union |= c.mask
        total += len(c)
    if union != df.space.full_mask() or total != df.size:
        raise InvalidPartitionError("cells must be disjoint and cover the space")
    return cells


def is_decoherent_partition(df: DecoherenceFunctional, cells, mode: str) -> PartitionReport:
    """Check pairwise off-diagonal terms of a partition.

    mode 'medium' bounds |D(A, B)|, mode 'weak' bounds |Re D(A, B)|; both
    against EPS_DF.
    """
    if mode not in ("medium", "weak"):
        raise ValueError(f"unknown decoherence mode {mode!r}")
    cells = _check_partition(df, cells)
    residual = 0.0
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            val = df.event_value(cells[i], cells[j])
            term = abs(val) if mode == "medium" else abs(val.real)
            residual = max(residual, term)
    return PartitionReport(cells=cells, mode=mode, residual=residual, passed=residual <= EPS_DF)


def iter_set_partitions(n: int, max_cells: int):
    """Restricted-growth strings over n elements with at most max_cells blocks.

    Yields lists ``a`` with a[0] = 0 and a[i] <= max(a[:i]) + 1, in
    lexicographic order.
    """
    if n == 0:
        return
    a = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield list(a)
            return
        for b in range(min(top + 1, max_cells - 1) + 1):
            a[i] = b
            yield from rec(i + 1, max(top, b))

    yield from rec(1, 0) if n > 1 else iter([list(a)])


def find_decoherent_partitions(df: DecoherenceFunctional, mode: str,
                               max_cells: int) -> list[PartitionReport]:
    """All partitions into at most max_cells cells passing the mode's check.

    Partitions are enumerated as restricted-growth strings (lexicographic),
    cells ordered by least member.  Guarded to spaces of at most 16
    histories.
    """
    n = df.size
    if n > PARTITION_SPACE_LIMIT:
        raise SpaceTooLargeError(
            f"partition search limited to {PARTITION_SPACE_LIMIT} histories, got {n}"
        )
    if max_cells < 1:
        raise ValueError("max_cells must be at least 1")
    out = []
    for rgs in iter_set_partitions(n, max_cells):
        ncells = max(rgs) + 1
        masks = [0] * ncells
        for i, b in enumerate(rgs):
            masks[b] |= 1 << i
        cells = [Event(df.space, m) for m in masks]
        rep = is_decoherent_partition(df, cells, mode)
        if rep.passed:
            out.append(rep)
    return out
