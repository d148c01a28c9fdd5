"""Pairwise co-occurrence counts and positive-pair classification.

Two families of rules decide whether a co-occurring pair is "related":

* k-mention: the pair shares at least ``k`` abstracts (k=1 is the most
  liberal network, k=5 the classic stringent one);
* Poisson percentile: under independence the number of abstracts mentioning
  both entities is Poisson with mean ``n_a * n_b / N``; the pair is positive
  when its count reaches the threshold for the requested percentile.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, TextIO

from .corpus import OccurrenceIndex
from .netops import EdgeSet, PairKey, canonical_pair


def poisson_lambda(n_a: int, n_b: int, big_n: int) -> float:
    """Expected number of abstracts mentioning both entities by chance."""
    if big_n < 1:
        raise ValueError("corpus size must be >= 1")
    if not (0 <= n_a <= big_n and 0 <= n_b <= big_n):
        raise ValueError(f"occurrence counts ({n_a}, {n_b}) outside [0, {big_n}]")
    return (n_a / big_n) * (n_b / big_n) * big_n


def poisson_pmf(lam: float, x: int) -> float:
    """P(X = x) for X ~ Poisson(lam), evaluated in log space."""
    if lam < 0 or x < 0:
        raise ValueError("lambda and x must be non-negative")
    if lam == 0:
        return 1.0 if x == 0 else 0.0
    return math.exp(-lam + x * math.log(lam) - math.lgamma(x + 1))


def poisson_threshold(lam: float, prob: float) -> int:
    """Minimum co-occurrence count that is significant at ``prob``.

    PMF terms are accumulated from x = 0 until the running CDF reaches
    ``prob``; the result is the number of terms consumed, i.e. one more than
    the ``prob`` quantile.  A count ``c`` is positive iff ``c >= threshold``.
    """
    if not 0 < prob < 1:
        raise ValueError(f"prob must lie in (0, 1), got {prob}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    # hard stop well past any mass that could matter
    cap = math.ceil(lam + 40 * math.sqrt(lam + 1)) + 1
    cprob = 0.0
    x = 0
    while cprob < prob and x <= cap:
        cprob += poisson_pmf(lam, x)
        x += 1
    return x


class PoissonModel:
    """Poisson(mean) with the cumulative search used for thresholds."""

    def __init__(self, mean: float = 0.0):
        if mean < 0:
            raise ValueError("mean must be non-negative")
        self.mean = mean

    def pmf(self, x: int) -> float:
        return poisson_pmf(self.mean, x)

    def cdf(self, x: int) -> float:
        return sum(self.pmf(i) for i in range(x + 1))

    def threshold(self, prob: float) -> int:
        return poisson_threshold(self.mean, prob)


@dataclass(frozen=True, slots=True)
class CooccurrenceRecord:
    pair: PairKey
    c_ab: int
    n_a: int
    n_b: int
    big_n: int

    @property
    def lam(self) -> float:
        return poisson_lambda(self.n_a, self.n_b, self.big_n)


@dataclass(frozen=True)
class CooccurrenceTable:
    records: tuple[CooccurrenceRecord, ...]
    universe: int
    total_abstracts: int

    def __iter__(self) -> Iterator[CooccurrenceRecord]:
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def max_lambda(self) -> float:
        return max((r.lam for r in self.records), default=0.0)


def cooccurrence_count(index: OccurrenceIndex, a: str, b: str) -> int:
    """Size of the intersection of two sorted postings (linear merge)."""
    pa, pb = index.posting(a), index.posting(b)
    i = j = count = 0
    while i < len(pa) and j < len(pb):
        if pa[i] == pb[j]:
            count += 1
            i += 1
            j += 1
        elif pa[i] < pb[j]:
            i += 1
        else:
            j += 1
    return count


def _count_pairs(entity_lists: list[list[str]]) -> Counter:
    counts: Counter = Counter()
    for entities in entity_lists:
        # entity lists are sorted, so combinations are already canonical
        counts.update(combinations(entities, 2))
    return counts


def build_cooccurrence_table(index: OccurrenceIndex, workers: int = 1) -> CooccurrenceTable:
    """Materialise every pair that shares at least one abstract.

    Pairs are enumerated per document from the entities it mentions, so the
    cost scales with observed co-occurrences rather than with n(n-1)/2.
    """
    per_doc = [ents for ents in index.documents().values() if len(ents) > 1]
    if workers > 1 and len(per_doc) > 1:
        size = -(-len(per_doc) // workers)
        chunks = [per_doc[i:i + size] for i in range(0, len(per_doc), size)]
        counts: Counter = Counter()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_count_pairs, chunks):
                counts.update(part)
    else:
        counts = _count_pairs(per_doc)

    big_n = index.total_abstracts
    sizes = {e: len(p) for e, p in index.postings.items()}
    records = tuple(
        CooccurrenceRecord(pair, c, sizes[pair[0]], sizes[pair[1]], big_n)
        for pair, c in sorted(counts.items()))
    return CooccurrenceTable(records, index.universe, big_n)


def k_mention_network(table: CooccurrenceTable, k: int) -> EdgeSet:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return EdgeSet(table.universe, frozenset(r.pair for r in table if r.c_ab >= k))


def poisson_network(table: CooccurrenceTable, prob: float) -> EdgeSet:
    if not 0 < prob < 1:
        raise ValueError(f"prob must lie in (0, 1), got {prob}")
    cache: dict[float, int] = {}
    edges = set()
    for r in table:
        lam = r.lam
        t = cache.get(lam)
        if t is None:
            t = cache[lam] = poisson_threshold(lam, prob)
        if r.c_ab >= t:
            edges.add(r.pair)
    return EdgeSet(table.universe, frozenset(edges))


TABLE_HEADER = "# entity_a\tentity_b\tc_ab\tn_a\tn_b\tlambda\n"


def write_table(table: CooccurrenceTable, sink: TextIO) -> None:
    sink.write(TABLE_HEADER)
    for r in table:
        a, b = r.pair
        sink.write(f"{a}\t{b}\t{r.c_ab}\t{r.n_a}\t{r.n_b}\t{r.lam:.6f}\n")


def read_table_rows(lines: Iterable[str]) -> Iterator[tuple[PairKey, int, int, int, float]]:
    """Parse a table file back into (pair, c_ab, n_a, n_b, lambda) rows."""
    for line in lines:
        if not line.strip() or line.startswith("#"):
            continue
        a, b, c, na, nb, lam = line.rstrip("\r\n").split("\t")
        if b < a:
            a, b, na, nb = b, a, nb, na
        yield canonical_pair(a, b), int(c), int(na), int(nb), float(lam)
