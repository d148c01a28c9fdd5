"""Abstract corpus, entity lexicon and the occurrence inverted index.

Entity names are recognised by dictionary lookup.  A pattern matches when it
occurs case-insensitively in the abstract and is delimited on both sides by a
non-alphanumeric character (or the text edge).  Runs of whitespace in both
text and patterns are collapsed to a single space first, so multi-word names
survive arbitrary line wrapping.  There is no stemming: ``kinase`` does not
match ``kinases``.
"""

from __future__ import annotations

import logging
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

_WS = re.compile(r"\s+")
_WORD = re.compile(r"[^\W_]+")


class CorpusError(ValueError):
    pass


class EmptyCorpusError(CorpusError):
    pass


class LexiconError(ValueError):
    pass


def normalize(text: str) -> str:
    """Casefold and collapse whitespace runs to single spaces."""
    return _WS.sub(" ", text).strip().casefold()


def _is_word_char(ch: str) -> bool:
    return ch.isalnum()


@dataclass(frozen=True)
class AbstractRecord:
    doc_id: str
    text: str


@dataclass(frozen=True)
class EntityTerm:
    entity_id: str
    patterns: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    records: tuple[AbstractRecord, ...]
    duplicates: int = 0

    def __len__(self):
        return len(self.records)


class Lexicon:
    """Ordered collection of entity terms; defines the node universe."""

    def __init__(self, terms: Iterable[EntityTerm]):
        self.terms: dict[str, EntityTerm] = {}
        for term in terms:
            if term.entity_id in self.terms:
                raise LexiconError(f"duplicate entity_id {term.entity_id!r}")
            self.terms[term.entity_id] = term

    def __len__(self):
        return len(self.terms)

    def __contains__(self, entity_id):
        return entity_id in self.terms

    def __iter__(self):
        return iter(self.terms.values())

    @property
    def entity_ids(self) -> list[str]:
        return list(self.terms)

    def matcher(self) -> "PatternMatcher":
        return PatternMatcher(self)


def ingest_corpus(source: Iterable[tuple[str, str]]) -> Corpus:
    """Collect (doc_id, text) records.

    Duplicate doc_ids keep the first occurrence and log a warning; records
    whose text is blank are skipped with a warning.
    """
    seen: set[str] = set()
    records = []
    dups = 0
    for doc_id, text in source:
        doc_id = doc_id.strip()
        if not doc_id:
            raise CorpusError("record with empty doc_id")
        if doc_id in seen:
            dups += 1
            logger.warning("duplicate doc_id %r ignored (keeping first)", doc_id)
            continue
        if not text.strip():
            logger.warning("doc %r has empty text; skipped", doc_id)
            continue
        seen.add(doc_id)
        records.append(AbstractRecord(doc_id, text))
    if not records:
        raise EmptyCorpusError("corpus contains no records")
    return Corpus(tuple(records), dups)


def iter_tsv_corpus(lines: Iterable[str]):
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        doc_id, sep, text = line.partition("\t")
        if not sep:
            raise CorpusError(f"corpus line {lineno}: expected doc_id TAB text")
        yield doc_id, text


def read_corpus(path) -> Corpus:
    try:
        with open(path, encoding="utf-8") as fh:
            return ingest_corpus(iter_tsv_corpus(fh))
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc


def ingest_lexicon(source: Iterable[tuple[str, Sequence[str]]]) -> Lexicon:
    terms = []
    for entity_id, patterns in source:
        entity_id = entity_id.strip()
        if not entity_id:
            raise LexiconError("entry with empty entity_id")
        if not patterns:
            raise LexiconError(f"entity {entity_id!r} has no patterns")
        kept: dict[str, str] = {}
        for pat in patterns:
            key = normalize(pat)
            if not key:
                raise LexiconError(f"entity {entity_id!r} has an empty pattern")
            kept.setdefault(key, pat.strip())
        terms.append(EntityTerm(entity_id, tuple(kept.values())))
    return Lexicon(terms)


def iter_tsv_lexicon(lines: Iterable[str]):
    """Yield (entity_id, patterns); a bare entity_id is its own pattern."""
    for line in lines:
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        entity_id, *patterns = line.split("\t")
        yield entity_id, patterns if patterns else [entity_id]


def read_lexicon(path) -> Lexicon:
    try:
        with open(path, encoding="utf-8") as fh:
            return ingest_lexicon(iter_tsv_lexicon(fh))
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon {path}: {exc}") from exc


class PatternMatcher:
    """Find which lexicon entities are mentioned in a piece of text.

    Patterns are bucketed by their leading alphanumeric run; a boundary match
    can only begin where the text has the identical run, so each word of the
    text costs one dict lookup.  Patterns that start with punctuation fall
    back to a plain scan.
    """

    def __init__(self, lexicon: Lexicon):
        self.by_head: dict[str, list[tuple[str, str]]] = defaultdict(list)
        self.odd: list[tuple[str, str]] = []
        self.exact: dict[str, list[str]] = defaultdict(list)
        for term in lexicon:
            for pat in term.patterns:
                norm = normalize(pat)
                self.exact[norm].append(term.entity_id)
                head = _WORD.match(norm)
                if head:
                    self.by_head[head.group()].append((norm, term.entity_id))
                else:
                    self.odd.append((norm, term.entity_id))

    def find(self, text: str) -> set[str]:
        text = normalize(text)
        found: set[str] = set()
        n = len(text)
        for m in _WORD.finditer(text):
            cands = self.by_head.get(m.group())
            if not cands:
                continue
            start = m.start()
            for pat, entity in cands:
                if entity in found:
                    continue
                end = start + len(pat)
                if text.startswith(pat, start) and (
                        end == n or not _is_word_char(text[end]) or not _is_word_char(pat[-1])):
                    found.add(entity)
        for pat, entity in self.odd:
            if entity not in found and _boundary_find(text, pat):
                found.add(entity)
        return found

    def match_field(self, field_text: str) -> list[str]:
        """Entities whose pattern is the whole field (outer punctuation ignored)."""
        norm = normalize(field_text)
        hit = self.exact.get(norm)
        if hit is None:
            stripped = re.sub(r"^[\W_]+|[\W_]+$", "", norm)
            hit = self.exact.get(stripped, [])
        return hit


def _boundary_find(text: str, pat: str) -> bool:
    start = text.find(pat)
    while start != -1:
        end = start + len(pat)
        left_ok = start == 0 or not (_is_word_char(text[start - 1]) and _is_word_char(pat[0]))
        right_ok = end == len(text) or not (_is_word_char(text[end]) and _is_word_char(pat[-1]))
        if left_ok and right_ok:
            return True
        start = text.find(pat, start + 1)
    return False


@dataclass(frozen=True)
class OccurrenceIndex:
    """entity_id -> sorted doc_ids, plus the corpus size N."""

    postings: Mapping[str, tuple[str, ...]]
    total_abstracts: int

    def __post_init__(self):
        if self.total_abstracts < 1:
            raise CorpusError("index needs at least one abstract")

    @property
    def entity_ids(self) -> list[str]:
        return sorted(self.postings)

    @property
    def universe(self) -> int:
        return len(self.postings)

    def posting(self, entity_id: str) -> tuple[str, ...]:
        try:
            return self.postings[entity_id]
        except KeyError:
            raise KeyError(f"unknown entity {entity_id!r}") from None

    def documents(self) -> dict[str, list[str]]:
        """Invert the postings: doc_id -> sorted entity_ids mentioned."""
        docs: dict[str, list[str]] = defaultdict(list)
        for entity in self.entity_ids:
            for doc in self.postings[entity]:
                docs[doc].append(entity)
        return docs


def occurrence_count(index: OccurrenceIndex, entity_id: str) -> int:
    return len(index.posting(entity_id))


def _match_chunk(args):
    lexicon, records = args
    matcher = lexicon.matcher()
    return [(r.doc_id, matcher.find(r.text)) for r in records]


def build_index(corpus: Corpus, lexicon: Lexicon, workers: int = 1) -> OccurrenceIndex:
    """Scan every abstract for every lexicon entity.

    With ``workers > 1`` the abstracts are split into contiguous chunks and
    scanned in separate processes; postings are merged and sorted, so the
    result does not depend on chunking or document order.
    """
    if not len(corpus) or not len(lexicon):
        raise CorpusError("build_index needs a non-empty corpus and lexicon")
    records = corpus.records
    if workers > 1 and len(records) > 1:
        size = -(-len(records) // workers)
        chunks = [(lexicon, records[i:i + size]) for i in range(0, len(records), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [hit for part in pool.map(_match_chunk, chunks) for hit in part]
    else:
        results = _match_chunk((lexicon, records))

    postings: dict[str, list[str]] = {e: [] for e in lexicon.entity_ids}
    for doc_id, entities in results:
        for entity in entities:
            postings[entity].append(doc_id)
    return OccurrenceIndex(
        {e: tuple(sorted(docs)) for e, docs in postings.items()}, len(records))


def write_index(index: OccurrenceIndex, path) -> None:
    """Flat file: ``#total_abstracts TAB N`` then ``entity TAB d1,d2,...``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#total_abstracts\t{index.total_abstracts}\n")
        for entity in index.entity_ids:
            docs = index.postings[entity]
            bad = [d for d in docs if "," in d]
            if bad:
                raise CorpusError(f"doc_id {bad[0]!r} contains a comma; cannot persist")
            fh.write(f"{entity}\t{','.join(docs)}\n")


def read_index(path) -> OccurrenceIndex:
    total = None
    postings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if line.startswith("#total_abstracts\t"):
                total = int(line.split("\t", 1)[1])
                continue
            if not line or line.startswith("#"):
                continue
            entity, sep, docs = line.partition("\t")
            if not sep:
                raise CorpusError(f"{path}:{lineno}: malformed index line")
            postings[entity] = tuple(docs.split(",")) if docs else ()
    if total is None:
        raise CorpusError(f"{path}: missing #total_abstracts header")
    return OccurrenceIndex(postings, total)
