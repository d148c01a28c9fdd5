"""Pearson co-expression networks, threshold sweeps and dataset intersection."""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .netops import EdgeSet, PairKey, UniverseMismatch, canonical_pair, format_percent

logger = logging.getLogger(__name__)

# slack on |r| >= t so that floating-point perfect correlations land in the 1.00 bucket
R_TOLERANCE = 1e-9
MIN_SAMPLES = 3


class ExpressionError(ValueError):
    pass


class UndefinedCorrelation(ValueError):
    """Raised when a vector has zero variance."""


@dataclass(frozen=True)
class ExpressionMatrix:
    probes: tuple[str, ...]
    entities: tuple[str, ...]
    samples: tuple[str, ...]
    values: np.ndarray
    dropped: int = 0

    def __post_init__(self):
        if self.values.shape != (len(self.probes), len(self.samples)):
            raise ExpressionError(
                f"values shape {self.values.shape} != "
                f"({len(self.probes)}, {len(self.samples)})")
        if len(self.samples) < MIN_SAMPLES:
            raise ExpressionError(f"need at least {MIN_SAMPLES} samples, got {len(self.samples)}")


def parse_expression(lines: Iterable[str]) -> ExpressionMatrix:
    """Parse the expression TSV.

    The header is ``probe_id TAB entity_id TAB sample...`` (a leading ``#`` is
    allowed).  Rows with a blank cell are dropped and counted; ragged rows and
    non-numeric cells are errors.
    """
    it = (l.rstrip("\r\n") for l in lines)
    header = None
    for line in it:
        if line.strip():
            header = line.lstrip("#").strip("\r\n").split("\t")
            break
    if header is None:
        raise ExpressionError("expression file is empty")
    samples = tuple(s.strip() for s in header[2:])
    if len(samples) < MIN_SAMPLES:
        raise ExpressionError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")

    probes, entities, rows = [], [], []
    dropped = 0
    for lineno, line in enumerate(it, 2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(samples) + 2:
            raise ExpressionError(
                f"line {lineno}: expected {len(samples) + 2} fields, got {len(cells)}")
        raw = [c.strip() for c in cells[2:]]
        if any(c == "" for c in raw) or not cells[0].strip() or not cells[1].strip():
            dropped += 1
            continue
        try:
            vals = [float(c) for c in raw]
        except ValueError as exc:
            raise ExpressionError(f"line {lineno}: non-numeric cell ({exc})") from None
        if not all(math.isfinite(v) for v in vals):
            dropped += 1
            continue
        probes.append(cells[0].strip())
        entities.append(cells[1].strip())
        rows.append(vals)
    if dropped:
        logger.warning("%d expression rows with missing values dropped", dropped)
    values = np.array(rows, dtype=float).reshape(len(rows), len(samples))
    return ExpressionMatrix(tuple(probes), tuple(entities), samples, values, dropped)


def ingest_expression(source) -> ExpressionMatrix:
    if hasattr(source, "read"):
        return parse_expression(source)
    with open(source, encoding="utf-8") as fh:
        return parse_expression(fh)


def _is_constant(v: np.ndarray) -> bool:
    return bool(np.all(v == v[0]))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-d vectors of equal length")
    if len(x) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} observations")
    if _is_constant(x) or _is_constant(y):
        raise UndefinedCorrelation("zero variance")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / (np.linalg.norm(xc) * np.linalg.norm(yc)))
    return max(-1.0, min(1.0, r))


def passes(r: float, threshold: float) -> bool:
    return abs(r) >= threshold - R_TOLERANCE


@dataclass(frozen=True)
class CorrelationNetwork:
    """Entity pairs whose |r| reaches a threshold, with the strongest r seen."""

    universe: int
    edges: Mapping[PairKey, float]
    threshold: float
    skipped: int = 0
    name: str = ""

    def __len__(self):
        return len(self.edges)

    def edge_set(self) -> EdgeSet:
        return EdgeSet(self.universe, frozenset(self.edges))

    def at(self, threshold: float) -> "CorrelationNetwork":
        kept = {p: r for p, r in self.edges.items() if passes(r, threshold)}
        return CorrelationNetwork(self.universe, kept, threshold, self.skipped, self.name)


def _standardize(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows centred and scaled to unit norm; also a mask of usable rows."""
    usable = ~np.all(values == values[:, :1], axis=1)
    centred = values - values.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centred, axis=1)
    norms[~usable] = 1.0
    return centred / norms[:, None], usable


def coexpression_network(matrix: ExpressionMatrix, threshold: float,
                         universe: int | None = None, block: int = 256,
                         name: str = "") -> CorrelationNetwork:
    """All-pairs Pearson over probes, collapsed to entity pairs.

    Rows are processed in blocks against the full standardized matrix.  When
    several probes map to the same entity, the entity pair takes the probe
    pair with the largest |r|; same-entity probe pairs are ignored.  Probe
    pairs involving a constant row are skipped and counted.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    if universe is None:
        universe = max(1, len(set(matrix.entities)))
    z, usable = _standardize(matrix.values)
    n = len(matrix.probes)
    n_bad = int((~usable).sum())
    skipped = n_bad * (n - n_bad) + n_bad * (n_bad - 1) // 2

    ents = matrix.entities
    edges: dict[PairKey, float] = {}
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        r = np.clip(z[lo:hi] @ z.T, -1.0, 1.0)
        rows, cols = np.nonzero(np.abs(r) >= threshold - R_TOLERANCE)
        for i, j in zip(rows.tolist(), cols.tolist()):
            gi = lo + i
            if j <= gi or not (usable[gi] and usable[j]) or ents[gi] == ents[j]:
                continue
            pair = canonical_pair(ents[gi], ents[j])
            val = float(r[i, j])
            prev = edges.get(pair)
            if prev is None or abs(val) > abs(prev):
                edges[pair] = val
    return CorrelationNetwork(universe, edges, threshold, skipped, name)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    n_correlations: int
    n_in_reference: int

    @property
    def percentage(self) -> float | None:
        if not self.n_correlations:
            return None
        return 100.0 * self.n_in_reference / self.n_correlations


def sweep_thresholds(start: float, stop: float, step: float) -> list[float]:
    """Grid built from integer multiples of ``step`` to avoid drift."""
    if not start < stop:
        raise ValueError("sweep start must be below stop")
    if step <= 0:
        raise ValueError("sweep step must be positive")
    count = int(round((stop - start) / step))
    if start + count * step > stop + 1e-12:
        count -= 1
    digits = max(0, -math.floor(math.log10(step))) + 2
    return [round(start + i * step, digits) for i in range(count + 1)]


def threshold_sweep(correlations: CorrelationNetwork | Mapping[PairKey, float],
                    reference: EdgeSet, start: float = 0.75, stop: float = 1.00,
                    step: float = 0.01) -> list[SweepRow]:
    if isinstance(correlations, CorrelationNetwork):
        if correlations.universe != reference.universe:
            raise UniverseMismatch(f"universe {correlations.universe} != {reference.universe}")
        correlations = correlations.edges
    strengths = sorted(abs(r) for r in correlations.values())
    known = sorted(abs(r) for p, r in correlations.items() if p in reference.edges)
    rows = []
    for t in sweep_thresholds(start, stop, step):
        cut = t - R_TOLERANCE
        rows.append(SweepRow(
            t,
            len(strengths) - bisect.bisect_left(strengths, cut),
            len(known) - bisect.bisect_left(known, cut),
        ))
    return rows


def intersect_networks(networks: Sequence[CorrelationNetwork | EdgeSet]) -> EdgeSet:
    """Pairs present in every network; the sign of r is not compared."""
    if len(networks) < 2:
        raise ValueError("need at least two networks to intersect")
    sets = [n.edge_set() if isinstance(n, CorrelationNetwork) else n for n in networks]
    result = sets[0]
    for other in sets[1:]:
        result = result.intersect(other)
    return result


def hypothesis_set(correlations: CorrelationNetwork | Mapping[PairKey, float],
                   reference: EdgeSet) -> list[tuple[PairKey, float]]:
    """Correlated pairs absent from the reference, strongest |r| first."""
    if isinstance(correlations, CorrelationNetwork):
        if correlations.universe != reference.universe:
            raise UniverseMismatch(f"universe {correlations.universe} != {reference.universe}")
        correlations = correlations.edges
    novel = [(p, r) for p, r in correlations.items() if p not in reference.edges]
    novel.sort(key=lambda item: (-abs(item[1]), item[0]))
    return novel


# correlation files: entity_a TAB entity_b TAB r

def write_correlations(net: CorrelationNetwork, sink: TextIO) -> None:
    sink.write("# entity_a\tentity_b\tr\n")
    for (a, b), r in sorted(net.edges.items()):
        sink.write(f"{a}\t{b}\t{r:.10f}\n")


def parse_correlations(lines: Iterable[str]) -> dict[PairKey, float]:
    """Read correlation rows; a reversed duplicate keeps the first value seen."""
    edges: dict[PairKey, float] = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) < 3:
            raise ExpressionError(f"correlation line {lineno}: expected 3 fields")
        a, b, r = parts[0], parts[1], float(parts[2])
        if a == b:
            continue
        edges.setdefault(canonical_pair(a, b), r)
    return edges


def read_correlations(path, universe: int | None = None, threshold: float = 0.0,
                      name: str = "") -> CorrelationNetwork:
    with open(path, encoding="utf-8") as fh:
        edges = parse_correlations(fh)
    if threshold > 0:
        edges = {p: r for p, r in edges.items() if passes(r, threshold)}
    if universe is None:
        universe = max(1, len({n for p in edges for n in p}))
    return CorrelationNetwork(universe, edges, threshold, name=name)


def _fmt_threshold(t: float) -> str:
    return f"{t:.2f}" if round(t, 2) == t else f"{t:g}"


def write_sweep(rows: Sequence[SweepRow], sink: TextIO) -> None:
    sink.write("# min_correlation\tn_correlations\tn_in_reference\tpercent_in_reference\n")
    for row in rows:
        sink.write(f"{_fmt_threshold(row.threshold)}\t{row.n_correlations}\t{row.n_in_reference}\t"
                   f"{format_percent(row.percentage, 3)}\n")


def write_curve(rows: Sequence[SweepRow], sink: TextIO) -> None:
    sink.write("# threshold\tpercent_in_reference\n")
    for row in rows:
        sink.write(f"{_fmt_threshold(row.threshold)}\t{format_percent(row.percentage, 3)}\n")
