import io

import pytest

from cooccurnet import fixtures
from cooccurnet.cooccur import build_cooccurrence_table, k_mention_network
from cooccurnet.corpus import ingest_lexicon
from cooccurnet.interactions import (
    ACTIVATION,
    BINDING,
    SvoTriple,
    annotate_network,
    extract_typed_interactions,
    ingest_svo,
    write_annotated_sif,
    write_concordance_report,
)
from cooccurnet.netops import EdgeSet

from conftest import index_from

LEX = ingest_lexicon([("insulin", ["insulin"]), ("MAPK", ["MAPK", "MAP kinase"]),
                      ("A", ["A"]), ("B", ["B"]), ("C", ["C"])])


def test_ingest_svo():
    table = ingest_svo(io.StringIO("a\tbinds\tb\nc\tactivates\td\td7\ne\tbinds\tf\n"))
    assert len(table) == 3 and table.skipped == 0
    assert table.triples[1].doc_id == "d7"
    table = ingest_svo(io.StringIO("a\t\tb\nc\tbinds\td\n"))
    assert len(table) == 1 and table.skipped == 1
    assert len(ingest_svo(io.StringIO(""))) == 0


def test_ingest_svo_unreadable(tmp_path):
    with pytest.raises(OSError):
        ingest_svo(tmp_path / "nope.tsv")


def test_extract_single_binding():
    (it,) = extract_typed_interactions([SvoTriple("insulin", "binds", "MAPK")], LEX)
    assert (it.pair, it.kind, it.support) == (("MAPK", "insulin"), BINDING, 1)


def test_unknown_object_and_verb_ignored():
    triples = [SvoTriple("insulin", "binds", "glucagon"),
               SvoTriple("insulin", "inhibits", "MAPK"),
               SvoTriple("insulin", "binds", "insulin")]
    assert extract_typed_interactions(triples, LEX) == []


def test_direction_dropped_both_kinds():
    found = extract_typed_interactions(
        [SvoTriple("A", "binds", "B"), SvoTriple("B", "activates", "A"),
         SvoTriple("a", "Bound", "b")], LEX)
    assert {(i.pair, i.kind, i.support) for i in found} == {
        (("A", "B"), BINDING, 2), (("A", "B"), ACTIVATION, 1)}


def test_whole_field_match_only():
    found = extract_typed_interactions(
        [SvoTriple("insulin receptor", "binds", "MAPK"),
         SvoTriple("(MAP  kinase)", "activates", "insulin")], LEX)
    assert [(i.pair, i.kind) for i in found] == [(("MAPK", "insulin"), ACTIVATION)]


def test_custom_verb_map_and_empty():
    found = extract_typed_interactions([SvoTriple("A", "inhibits", "C")], LEX,
                                       {"inhibition": {"inhibits"}})
    assert [(i.pair, i.kind) for i in found] == [(("A", "C"), "inhibition")]
    with pytest.raises(ValueError):
        extract_typed_interactions([], LEX, {})


def test_annotate_example():
    edges = EdgeSet(3, frozenset({("A", "B"), ("B", "C")}))
    found = extract_typed_interactions([SvoTriple("A", "binds", "B")], LEX)
    net, stats = annotate_network(edges, found)
    assert len(net) == len(edges)
    assert net.kinds_of(("B", "A")) == {BINDING}
    assert stats.coverage == pytest.approx(50.0)
    assert stats.for_kind(BINDING).percent == pytest.approx(100.0)
    assert stats.for_kind(ACTIVATION).percent is None


def test_annotate_empty_interactions():
    edges = EdgeSet(3, frozenset({("A", "B")}))
    net, stats = annotate_network(edges, [])
    assert stats.coverage == 0
    assert all(k.percent is None for k in stats.per_kind)
    buf = io.StringIO()
    write_concordance_report(stats, buf)
    assert buf.getvalue().splitlines() == [
        "# measure\tkind\tnumerator\tdenominator\tpercent",
        "concordance\tactivation\t0\t0\t",
        "concordance\tbinding\t0\t0\t",
        "coverage\tany\t0\t1\t0.00",
    ]


def test_annotated_sif_format():
    edges = EdgeSet(3, frozenset({("A", "B"), ("B", "C")}))
    found = extract_typed_interactions(
        [SvoTriple("A", "binds", "B"), SvoTriple("A", "activates", "B")], LEX)
    net, _ = annotate_network(edges, found)
    buf = io.StringIO()
    write_annotated_sif(net, buf)
    assert buf.getvalue() == "A\tpp\tB\tactivation,binding\nB\tpp\tC\t\n"


@pytest.mark.parametrize("seed", range(5))
def test_svo_from_corpus_is_subset_of_one_mention(seed):
    fx = fixtures.random_corpus(seed, n_docs=40)
    one = k_mention_network(build_cooccurrence_table(index_from(fx)), 1)
    svo = ingest_svo(io.StringIO("".join(fx.svo_lines())))
    found = extract_typed_interactions(svo, ingest_lexicon(fx.lexicon))
    assert found
    assert {i.pair for i in found} <= one.edges
    _, stats = annotate_network(one, found)
    assert all(k.percent == 100.0 for k in stats.per_kind if k.interactions)
