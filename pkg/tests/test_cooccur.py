import io
import math
from itertools import combinations

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cooccurnet import fixtures
from cooccurnet.cooccur import (
    PoissonModel,
    build_cooccurrence_table,
    cooccurrence_count,
    k_mention_network,
    poisson_lambda,
    poisson_network,
    poisson_pmf,
    poisson_threshold,
    read_table_rows,
    write_table,
    CooccurrenceRecord,
    CooccurrenceTable,
)
from cooccurnet.corpus import OccurrenceIndex, build_index, ingest_corpus, ingest_lexicon

from conftest import index_from

LAMBDAS = [1e-8, 1e-5, 0.01, 0.0513, 0.59, 1, 2, 5]
PROBS = [0.95, 0.99]


def oracle_threshold(lam, prob):
    """Tabulate the CDF at 50 digits and return 1 + the prob-quantile."""
    with mpmath.workdps(50):
        lam = mpmath.mpf(lam)
        cdf = mpmath.mpf(0)
        q = 0
        while True:
            cdf += mpmath.exp(-lam) * lam ** q / mpmath.factorial(q)
            if cdf >= prob:
                return q + 1
            q += 1


def test_oracle_spot_values():
    # cumulative 0.3679, 0.7358, 0.9197, 0.9810
    assert oracle_threshold(1.0, 0.95) == 4
    # cumulative 0.5543, 0.8814, 0.9779, 0.9969
    assert oracle_threshold(0.59, 0.99) == 4
    assert oracle_threshold(3.1e-5, 0.95) == 1


@pytest.mark.parametrize("lam", LAMBDAS)
@pytest.mark.parametrize("prob", PROBS)
def test_threshold_matches_oracle(lam, prob):
    assert poisson_threshold(lam, prob) == oracle_threshold(lam, prob)


@pytest.mark.parametrize("lam,prob,expected", [
    (3.1e-5, 0.95, 1),
    (1.0, 0.95, 4),
    (0.59, 0.99, 4),
    (0.0, 0.99, 1),
])
def test_threshold_examples(lam, prob, expected):
    assert poisson_threshold(lam, prob) == expected


@pytest.mark.parametrize("prob", [0, 1, -0.1, 1.5])
def test_threshold_bad_prob(prob):
    with pytest.raises(ValueError):
        poisson_threshold(1.0, prob)


def test_lambda_examples():
    assert poisson_lambda(1000, 1000, 1_000_000) == pytest.approx(1.0, rel=1e-12)
    assert poisson_lambda(0, 17, 500) == 0.0
    assert poisson_lambda(500, 200, 100_000) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        poisson_lambda(1, 1, 0)


def test_pmf_examples():
    assert poisson_pmf(0, 0) == 1.0
    assert poisson_pmf(0, 3) == 0.0
    assert poisson_pmf(2.5, 0) == pytest.approx(math.exp(-2.5), rel=1e-14)
    assert poisson_pmf(1, 1) == pytest.approx(0.36787944117144233, rel=1e-14)
    with pytest.raises(ValueError):
        poisson_pmf(-1, 0)
    with pytest.raises(ValueError):
        poisson_pmf(1, -1)


@pytest.mark.parametrize("lam", [1e-6, 0.3, 1, 4.5, 12])
def test_log_space_pmf_matches_direct(lam):
    for x in range(21):
        direct = math.exp(-lam) * lam ** x / math.factorial(x)
        assert abs(poisson_pmf(lam, x) - direct) <= 1e-12


@pytest.mark.parametrize("lam", [0.0, 1e-8, 0.59, 3, 50, 400])
def test_pmf_sums_to_one(lam):
    upper = math.ceil(lam + 40 * math.sqrt(lam + 1))
    assert abs(sum(poisson_pmf(lam, x) for x in range(upper + 1)) - 1) < 1e-9


def test_large_lambda_does_not_overflow():
    assert poisson_pmf(1000, 1000) == pytest.approx(0.012614611348721, rel=1e-9)
    assert poisson_threshold(1000, 0.99) == oracle_threshold(1000, 0.99)


def test_poisson_model():
    m = PoissonModel(1.0)
    assert m.threshold(0.95) == 4
    assert m.cdf(3) == pytest.approx(0.9810118431238462, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 30), st.floats(0, 30), st.floats(0.01, 0.999), st.floats(0.01, 0.999))
def test_threshold_monotone(l1, l2, p1, p2):
    lo, hi = sorted((l1, l2))
    plo, phi = sorted((p1, p2))
    assert poisson_threshold(lo, plo) <= poisson_threshold(hi, plo)
    assert poisson_threshold(lo, plo) <= poisson_threshold(lo, phi)


def make_index(postings, n):
    return OccurrenceIndex({k: tuple(sorted(v)) for k, v in postings.items()}, n)


def test_cooccurrence_count_cases():
    idx = make_index({"a": ["d1", "d2", "d3"], "b": ["d2", "d3", "d9"], "c": ["d5"],
                      "s": ["d1", "d2", "d3", "d4"], "t": ["d1", "d2", "d3", "d4", "d8"]}, 10)
    assert cooccurrence_count(idx, "a", "b") == 2
    assert cooccurrence_count(idx, "a", "c") == 0
    assert cooccurrence_count(idx, "s", "t") == 4
    with pytest.raises(KeyError):
        cooccurrence_count(idx, "a", "zz")


def test_table_worked_example():
    idx = build_index(ingest_corpus([("d1", "A B"), ("d2", "A")]),
                      ingest_lexicon([("A", ["A"]), ("B", ["B"])]))
    table = build_cooccurrence_table(idx)
    (rec,) = table.records
    assert (rec.pair, rec.c_ab, rec.n_a, rec.n_b) == (("A", "B"), 1, 2, 1)
    assert rec.lam == pytest.approx(1.0)


def test_single_entity_table_is_empty():
    idx = build_index(ingest_corpus([("d1", "A A")]), ingest_lexicon([("A", ["A"])]))
    assert len(build_cooccurrence_table(idx)) == 0


@pytest.mark.parametrize("seed", range(5))
def test_table_matches_brute_force(seed):
    idx = index_from(fixtures.random_corpus(seed))
    table = build_cooccurrence_table(idx)
    brute = {}
    for a, b in combinations(idx.entity_ids, 2):
        c = len(set(idx.postings[a]) & set(idx.postings[b]))
        if c:
            brute[(a, b)] = c
    assert {r.pair: r.c_ab for r in table} == brute
    assert [r.pair for r in table] == sorted(brute)
    for r in table:
        assert 0 < r.c_ab <= min(r.n_a, r.n_b)
        assert r.c_ab == cooccurrence_count(idx, *r.pair)


def test_parallel_table_matches_serial():
    idx = index_from(fixtures.random_corpus(4))
    assert build_cooccurrence_table(idx, workers=3) == build_cooccurrence_table(idx)


def handmade_table():
    recs = (
        CooccurrenceRecord(("A", "B"), 1, 10, 10, 10_000),
        CooccurrenceRecord(("A", "C"), 5, 10, 10, 10_000),
        CooccurrenceRecord(("B", "C"), 7, 10, 10, 10_000),
    )
    return CooccurrenceTable(recs, 3, 10_000)


def test_k_mention():
    table = handmade_table()
    assert set(k_mention_network(table, 5)) == {("A", "C"), ("B", "C")}
    assert len(k_mention_network(table, 1)) == 3
    with pytest.raises(ValueError):
        k_mention_network(table, 0)


def test_poisson_network_excludes_below_threshold():
    # lambda = 10 * 10 / 100 = 1.0 -> threshold 4 at the 95th percentile
    table = CooccurrenceTable((CooccurrenceRecord(("A", "B"), 2, 10, 10, 100),), 2, 100)
    assert len(poisson_network(table, 0.95)) == 0
    table = CooccurrenceTable((CooccurrenceRecord(("A", "B"), 4, 10, 10, 100),), 2, 100)
    assert len(poisson_network(table, 0.95)) == 1


def test_small_lambda_poisson_equals_one_mention():
    # every lambda = 0.01 <= -ln(0.99)
    table = handmade_table()
    assert poisson_network(table, 0.99) == k_mention_network(table, 1)
    assert poisson_network(table, 0.95) == k_mention_network(table, 1)


def test_table_file_round_trip():
    table = handmade_table()
    buf = io.StringIO()
    write_table(table, buf)
    text = buf.getvalue()
    assert text.splitlines()[1] == "A\tB\t1\t10\t10\t0.010000"
    rows = list(read_table_rows(io.StringIO(text)))
    assert [(p, c) for p, c, *_ in rows] == [(r.pair, r.c_ab) for r in table]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_nesting(seed):
    table = build_cooccurrence_table(index_from(fixtures.random_corpus(seed)))
    one, five = k_mention_network(table, 1), k_mention_network(table, 5)
    p95, p99 = poisson_network(table, 0.95), poisson_network(table, 0.99)
    assert five.issubset(one)
    assert p99.issubset(p95) and p95.issubset(one)
    for k in range(1, 6):
        assert k_mention_network(table, k + 1).issubset(k_mention_network(table, k))
