"""Synthetic corpora, lexicons, SVO tables and expression data.

Everything is driven by an explicit ``random.Random``/``numpy`` seed so the
generated files are reproducible.  Used by the test-suite, the performance
smoke test and the ``fixture`` CLI subcommand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

FILLER = (
    "the of and in to a was were with cells mouse mammary gland expression "
    "levels during lactation involution tissue observed results suggest that "
    "increased decreased significant role regulation pathway signal response "
    "analysis study data samples showed model function activity"
).split()


def entity_id(i: int) -> str:
    return f"E{i:04d}"


def entity_pattern(i: int) -> str:
    return f"prot{i:04d}"


@dataclass
class CorpusFixture:
    docs: list[tuple[str, str]]
    lexicon: list[tuple[str, list[str]]]
    # doc_id -> entity ids planted in it
    truth: dict[str, set[str]] = field(default_factory=dict)
    # (subject, verb, object, doc_id) rows consistent with the corpus
    svo: list[tuple[str, str, str, str]] = field(default_factory=list)

    def corpus_lines(self) -> list[str]:
        return [f"{d}\t{t}\n" for d, t in self.docs]

    def lexicon_lines(self) -> list[str]:
        return ["\t".join([e, *p]) + "\n" for e, p in self.lexicon]

    def svo_lines(self) -> list[str]:
        return ["\t".join(row) + "\n" for row in self.svo]


def _sentence(rng: random.Random, mentions: list[str], length: int) -> str:
    words = [rng.choice(FILLER) for _ in range(length)]
    for m in mentions:
        words.insert(rng.randrange(len(words) + 1), m)
    return " ".join(words).capitalize() + "."


def _svo_rows(rng: random.Random, doc_id: str, ents: list[int]) -> list[tuple[str, str, str, str]]:
    rows = []
    for a, b in zip(ents, ents[1:]):
        verb = rng.choice(["binds", "activates", "bound", "activated", "regulates"])
        rows.append((entity_pattern(a).upper(), verb, entity_pattern(b), doc_id))
    return rows


def _build(rng: random.Random, n_entities: int, planted: list[list[int]],
           words: int = 20) -> CorpusFixture:
    fx = CorpusFixture([], [(entity_id(i), [entity_pattern(i)]) for i in range(n_entities)])
    for d, ents in enumerate(planted):
        doc_id = f"D{d:06d}"
        fx.docs.append((doc_id, _sentence(rng, [entity_pattern(i) for i in ents], words)))
        fx.truth[doc_id] = {entity_id(i) for i in ents}
        if len(ents) > 1:
            fx.svo.extend(_svo_rows(rng, doc_id, ents))
    return fx


def sparse_corpus(seed: int = 0, n_docs: int = 200, n_entities: int = 20) -> CorpusFixture:
    """Corpus in which every co-occurring pair has a tiny Poisson mean.

    Each entity is mentioned once, grouped two or three per abstract; a few
    entities get one extra solo mention.  With N = 200 no co-occurring pair
    exceeds ``lambda = 2 * 1 / 200 = 0.01``.
    """
    rng = random.Random(seed)
    order = list(range(n_entities))
    rng.shuffle(order)
    groups: list[list[int]] = []
    i = 0
    while i < len(order):
        size = min(rng.choice((1, 2, 3)), len(order) - i)
        groups.append(sorted(order[i:i + size]))
        i += size
    # solo second mentions: a doubled entity never shares a doc with another doubled one
    doubled = rng.sample(order, k=min(3, n_entities))
    docs = [[] for _ in range(n_docs)]
    slots = rng.sample(range(n_docs), k=len(groups) + len(doubled))
    for slot, g in zip(slots, groups):
        docs[slot] = g
    for slot, e in zip(slots[len(groups):], doubled):
        docs[slot] = [e]
    # a doubled entity grouped with another doubled entity would give lambda 0.02
    for g in groups:
        if sum(e in doubled for e in g) > 1:
            return sparse_corpus(seed + 10_007, n_docs, n_entities)
    return _build(rng, n_entities, docs)


def random_corpus(seed: int, n_docs: int = 120, n_entities: int = 15,
                  max_rate: float = 0.4) -> CorpusFixture:
    """Dense random corpus with heterogeneous entity frequencies."""
    rng = random.Random(seed)
    rates = [max_rate * rng.random() ** 2 for _ in range(n_entities)]
    docs = [[i for i in range(n_entities) if rng.random() < rates[i]] for _ in range(n_docs)]
    if not any(docs):
        docs[0] = [0, 1]
    return _build(rng, n_entities, docs, words=8)


def perf_corpus(seed: int = 0, n_docs: int = 10_000, n_entities: int = 500,
                mentions: int = 8, words: int = 120) -> CorpusFixture:
    """Abstract-sized documents for the indexing/table performance smoke test."""
    rng = random.Random(seed)
    weights = [1.0 / (i + 1) for i in range(n_entities)]
    docs = [sorted(set(rng.choices(range(n_entities), weights=weights, k=mentions)))
            for _ in range(n_docs)]
    return _build(rng, n_entities, docs, words=words)


@dataclass
class ExpressionFixture:
    samples: list[str]
    probes: list[str]
    entities: list[str]
    values: np.ndarray
    planted: dict[tuple[str, str], float]

    def lines(self) -> list[str]:
        out = ["probe_id\tentity_id\t" + "\t".join(self.samples) + "\n"]
        for p, e, row in zip(self.probes, self.entities, self.values):
            out.append(f"{p}\t{e}\t" + "\t".join(f"{v:.10f}" for v in row) + "\n")
        return out


def correlated_pair(rng: np.random.Generator, n: int, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Two vectors whose sample Pearson coefficient is exactly ``r``."""
    base = rng.standard_normal((2, n))
    base -= base.mean(axis=1, keepdims=True)
    u = base[0] / np.linalg.norm(base[0])
    v = base[1] - (base[1] @ u) * u
    v /= np.linalg.norm(v)
    y = r * u + np.sqrt(max(0.0, 1.0 - r * r)) * v
    return 5.0 + 2.0 * u, 3.0 + 1.5 * y


def planted_expression(seed: int, strengths: list[float], n_noise: int = 10,
                       n_samples: int = 13) -> ExpressionFixture:
    """Disjoint entity pairs with exact planted correlations plus noise probes.

    Planted pair ``k`` uses entities ``E{2k}`` and ``E{2k+1}``; noise probes
    follow.  Noise probes can correlate by chance, which is intended: tests
    recompute every coefficient independently.
    """
    rng = np.random.default_rng(seed)
    rows, ents, planted = [], [], {}
    for k, r in enumerate(strengths):
        x, y = correlated_pair(rng, n_samples, r)
        a, b = entity_id(2 * k), entity_id(2 * k + 1)
        rows += [x, y]
        ents += [a, b]
        planted[(a, b)] = r
    start = 2 * len(strengths)
    for i in range(n_noise):
        rows.append(rng.standard_normal(n_samples) * 2 + 8)
        ents.append(entity_id(start + i))
    values = np.vstack(rows)
    probes = [f"P{i:05d}" for i in range(len(rows))]
    samples = [f"S{j:02d}" for j in range(n_samples)]
    return ExpressionFixture(samples, probes, ents, values, planted)
