"""Undirected, loop-free edge sets and SIF interchange.

A network is nothing more than a set of canonical node pairs living in a
universe of ``n`` nodes.  Comparisons between networks (co-occurrence vs.
co-expression vs. text-mined interactions) are plain set algebra.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)

PairKey = tuple[str, str]

SIF_RELATION = "pp"


class UniverseMismatch(ValueError):
    """Raised when two edge sets are defined over different node universes."""


def canonical_pair(a: str, b: str) -> PairKey:
    """Order a pair so that ``a < b``.  Self pairs are rejected."""
    if a == b:
        raise ValueError(f"self pair not allowed: {a!r}")
    return (a, b) if a < b else (b, a)


def edge_universe_size(n: int) -> int:
    """Number of possible undirected loop-free edges among ``n`` nodes."""
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    return n * (n - 1) // 2


@dataclass(frozen=True)
class EdgeSet:
    universe: int
    edges: frozenset[PairKey] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.universe < 1:
            raise ValueError(f"universe must be >= 1, got {self.universe}")
        if not isinstance(self.edges, frozenset):
            object.__setattr__(self, "edges", frozenset(self.edges))
        for a, b in self.edges:
            if not a < b:
                raise ValueError(f"edge {(a, b)!r} is not canonical")
        if len(self.edges) > edge_universe_size(self.universe):
            raise ValueError(
                f"{len(self.edges)} edges exceed the {self.universe}-node bound")

    @classmethod
    def from_pairs(cls, universe: int, pairs: Iterable[tuple[str, str]]) -> "EdgeSet":
        """Build from arbitrary (possibly reversed or repeated) pairs."""
        return cls(universe, frozenset(canonical_pair(a, b) for a, b in pairs))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (a, b) in self.edges or (b, a) in self.edges

    def __iter__(self) -> Iterator[PairKey]:
        return iter(sorted(self.edges))

    def _check(self, other: "EdgeSet") -> None:
        if self.universe != other.universe:
            raise UniverseMismatch(
                f"universe {self.universe} != {other.universe}")

    def intersect(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.universe, self.edges & other.edges)

    def difference(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.universe, self.edges - other.edges)

    def issubset(self, other: "EdgeSet") -> bool:
        self._check(other)
        return self.edges <= other.edges

    def nodes(self) -> set[str]:
        return {n for pair in self.edges for n in pair}

    def fraction_of_universe(self) -> float:
        """Share of all possible edges present, as a percentage."""
        total = edge_universe_size(self.universe)
        return 100.0 * len(self.edges) / total if total else 0.0


def intersect(a: EdgeSet, b: EdgeSet) -> EdgeSet:
    return a.intersect(b)


def difference(a: EdgeSet, b: EdgeSet) -> EdgeSet:
    return a.difference(b)


@dataclass(frozen=True)
class OverlapStats:
    shared: int
    only_a: int
    only_b: int
    pct_of_a: float | None
    pct_of_b: float | None


def overlap_stats(a: EdgeSet, b: EdgeSet) -> OverlapStats:
    """Counts of shared and exclusive edges.

    Percentages are ``shared / |a|`` and ``shared / |b|`` times 100, or
    ``None`` when the denominator is zero.
    """
    a._check(b)
    shared = len(a.edges & b.edges)
    return OverlapStats(
        shared=shared,
        only_a=len(a) - shared,
        only_b=len(b) - shared,
        pct_of_a=100.0 * shared / len(a) if len(a) else None,
        pct_of_b=100.0 * shared / len(b) if len(b) else None,
    )


@dataclass
class SifDiagnostics:
    malformed: int = 0
    self_loops: int = 0
    duplicates: int = 0


def parse_sif(lines: Iterable[str]) -> tuple[set[PairKey], SifDiagnostics]:
    """Parse ``a TAB pp TAB b`` lines into canonical pairs.

    Blank lines and ``#`` comments are ignored.  Malformed lines, self loops
    and duplicate (including reversed) edges are dropped and counted.
    """
    diag = SifDiagnostics()
    pairs: set[PairKey] = set()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[1] != SIF_RELATION or not parts[0] or not parts[2]:
            diag.malformed += 1
            logger.warning("SIF line %d malformed: %r", lineno, line)
            continue
        a, _, b = parts
        if a == b:
            diag.self_loops += 1
            continue
        pair = canonical_pair(a, b)
        if pair in pairs:
            diag.duplicates += 1
            continue
        pairs.add(pair)
    return pairs, diag


def read_sif(source, universe: int | None = None) -> tuple[EdgeSet, SifDiagnostics]:
    """Read a SIF file (path or open text stream).

    When ``universe`` is omitted it defaults to the number of distinct nodes
    named in the file (at least 1).
    """
    if hasattr(source, "read"):
        pairs, diag = parse_sif(source)
    else:
        with open(source, encoding="utf-8") as fh:
            pairs, diag = parse_sif(fh)
    if universe is None:
        universe = max(1, len({n for p in pairs for n in p}))
    return EdgeSet(universe, frozenset(pairs)), diag


def format_sif(edges: Iterable[PairKey]) -> str:
    return "".join(f"{a}\t{SIF_RELATION}\t{b}\n" for a, b in sorted(edges))


def write_sif(edges: EdgeSet, sink) -> None:
    """Write canonical SIF: edges sorted by (a, b), one per line."""
    text = format_sif(edges.edges)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def format_percent(value: float | None, digits: int = 2) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def write_overlap_report(rows: list[tuple[str, str, OverlapStats]], sink: TextIO) -> None:
    sink.write("# network_a\tnetwork_b\tshared\tonly_a\tonly_b\tpct_of_a\tpct_of_b\n")
    for name_a, name_b, st in rows:
        sink.write(f"{name_a}\t{name_b}\t{st.shared}\t{st.only_a}\t{st.only_b}\t"
                   f"{format_percent(st.pct_of_a)}\t{format_percent(st.pct_of_b)}\n")
