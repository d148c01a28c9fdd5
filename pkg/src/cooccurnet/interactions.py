"""Typed interactions from subject-verb-object triples.

The triples come from an upstream language-processing step.  A triple is
kept when both its subject and object name a lexicon entity and its verb is
one of the surface forms of a known interaction kind.  Direction is dropped:
interactions annotate an undirected network.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .corpus import Lexicon
from .netops import EdgeSet, PairKey, canonical_pair, format_percent

logger = logging.getLogger(__name__)

BINDING = "binding"
ACTIVATION = "activation"

DEFAULT_VERB_MAP: dict[str, frozenset[str]] = {
    BINDING: frozenset({"bind", "binds", "bound", "binding"}),
    ACTIVATION: frozenset({"activate", "activates", "activated", "activating"}),
}


@dataclass(frozen=True)
class SvoTriple:
    subject: str
    verb: str
    object: str
    doc_id: str | None = None


@dataclass
class SvoTable:
    triples: list[SvoTriple] = field(default_factory=list)
    skipped: int = 0

    def __len__(self):
        return len(self.triples)


@dataclass(frozen=True)
class TypedInteraction:
    pair: PairKey
    kind: str
    support: int


def parse_svo(lines: Iterable[str]) -> SvoTable:
    table = SvoTable()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) not in (3, 4) or not all(parts[:3]):
            table.skipped += 1
            logger.debug("SVO line %d skipped: %r", lineno, line)
            continue
        doc_id = parts[3] if len(parts) == 4 and parts[3] else None
        table.triples.append(SvoTriple(parts[0], parts[1], parts[2], doc_id))
    if table.skipped:
        logger.warning("%d malformed SVO rows skipped", table.skipped)
    return table


def ingest_svo(source) -> SvoTable:
    """Read SVO rows ``subject TAB verb TAB object [TAB doc_id]``."""
    if hasattr(source, "read"):
        return parse_svo(source)
    with open(source, encoding="utf-8") as fh:
        return parse_svo(fh)


def extract_typed_interactions(svo: SvoTable | Iterable[SvoTriple], lexicon: Lexicon,
                               verb_map: Mapping[str, Iterable[str]] = DEFAULT_VERB_MAP
                               ) -> list[TypedInteraction]:
    if not verb_map:
        raise ValueError("verb_map is empty")
    verb_kinds: dict[str, set[str]] = {}
    for kind, verbs in verb_map.items():
        for verb in verbs:
            verb_kinds.setdefault(verb.lower(), set()).add(kind)

    matcher = lexicon.matcher()
    support: Counter = Counter()
    triples = svo.triples if isinstance(svo, SvoTable) else svo
    for t in triples:
        kinds = verb_kinds.get(t.verb.strip().lower())
        if not kinds:
            continue
        subjects = matcher.match_field(t.subject)
        objects = matcher.match_field(t.object)
        for s in subjects:
            for o in objects:
                if s == o:
                    continue
                pair = canonical_pair(s, o)
                for kind in kinds:
                    support[pair, kind] += 1
    return [TypedInteraction(pair, kind, n) for (pair, kind), n in sorted(support.items())]


@dataclass(frozen=True)
class KindConcordance:
    kind: str
    interactions: int
    in_network: int

    @property
    def percent(self) -> float | None:
        return 100.0 * self.in_network / self.interactions if self.interactions else None


@dataclass(frozen=True)
class ConcordanceStats:
    per_kind: tuple[KindConcordance, ...]
    annotated_edges: int
    total_edges: int

    @property
    def coverage(self) -> float:
        return 100.0 * self.annotated_edges / self.total_edges if self.total_edges else 0.0

    def for_kind(self, kind: str) -> KindConcordance:
        for k in self.per_kind:
            if k.kind == kind:
                return k
        raise KeyError(kind)


@dataclass(frozen=True)
class AnnotatedNetwork:
    edges: EdgeSet
    kinds: Mapping[PairKey, frozenset[str]]

    def __len__(self):
        return len(self.edges)

    def kinds_of(self, pair: PairKey) -> frozenset[str]:
        return self.kinds.get(canonical_pair(*pair), frozenset())


def annotate_network(edges: EdgeSet, interactions: Iterable[TypedInteraction],
                     kinds: Iterable[str] = (BINDING, ACTIVATION)
                     ) -> tuple[AnnotatedNetwork, ConcordanceStats]:
    """Attach interaction kinds to network edges and measure agreement.

    Concordance for a kind is the share of its interactions that are edges of
    the network; coverage is the share of edges carrying any kind.  Kinds
    named in ``kinds`` are reported even when no interaction has them.
    """
    by_kind: dict[str, set[PairKey]] = {k: set() for k in kinds}
    for it in interactions:
        by_kind.setdefault(it.kind, set()).add(it.pair)

    labels: dict[PairKey, set[str]] = {}
    for kind, pairs in by_kind.items():
        for pair in pairs & edges.edges:
            labels.setdefault(pair, set()).add(kind)

    stats = ConcordanceStats(
        per_kind=tuple(KindConcordance(k, len(p), len(p & edges.edges))
                       for k, p in sorted(by_kind.items())),
        annotated_edges=len(labels),
        total_edges=len(edges),
    )
    frozen = {p: frozenset(k) for p, k in labels.items()}
    return AnnotatedNetwork(edges, frozen), stats


def write_annotated_sif(network: AnnotatedNetwork, sink: TextIO) -> None:
    """SIF with a fourth column of comma-joined kinds (empty if none)."""
    for a, b in network.edges:
        kinds = ",".join(sorted(network.kinds.get((a, b), ())))
        sink.write(f"{a}\tpp\t{b}\t{kinds}\n")


def write_concordance_report(stats: ConcordanceStats, sink: TextIO) -> None:
    sink.write("# measure\tkind\tnumerator\tdenominator\tpercent\n")
    for k in stats.per_kind:
        sink.write(f"concordance\t{k.kind}\t{k.in_network}\t{k.interactions}\t"
                   f"{format_percent(k.percent)}\n")
    sink.write(f"coverage\tany\t{stats.annotated_edges}\t{stats.total_edges}\t"
               f"{format_percent(stats.coverage)}\n")
