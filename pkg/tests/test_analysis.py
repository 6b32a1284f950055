import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from frbcodes import analysis
from frbcodes.analysis import (
    affine_erasure_witness,
    batch_t,
    batch_t_oracle,
    ecbc_t,
    expansion_check,
    file_size,
    file_size_witness,
    find_covering_witness,
    formula_M,
    td3_upper_witness,
    verify_code,
)
from frbcodes.designs import build_affine
from frbcodes.errors import BadFamily, DeltaTooLarge, EmptyColumn, KOutOfRange
from frbcodes.incidence import BinaryIncidenceMatrix, cover_rows
from frbcodes.matching import hopcroft_karp

from conftest import ap, brute_file_size, brute_t, td

SMALL = {
    "TD(2,2)": td(2, 2), "TD(2,3)": td(2, 3), "TD(3,3)": td(3, 3), "TD(2,4)": td(2, 4),
    "TD(3,4)": td(3, 4), "TD(4,4)": td(4, 4), "A(2)": ap(2), "A(3)": ap(3), "A(4)": ap(4),
}


@st.composite
def matrices(draw, max_n=7, max_theta=9, min_weight=1):
    n = draw(st.integers(min_weight, max_n))
    theta = draw(st.integers(1, max_theta))
    cols = [
        draw(st.sets(st.integers(0, n - 1), min_size=min_weight, max_size=n)) for _ in range(theta)
    ]
    rows = [{j for j, c in enumerate(cols) if i in c} for i in range(n)]
    return BinaryIncidenceMatrix.from_supports(theta, rows)


# file size ------------------------------------------------------------------

def test_file_size_examples():
    assert file_size(td(3, 4), 4) == 11
    assert file_size(ap(3), 2) == 7  # brute force: 2(q+1) - 1
    for m in SMALL.values():
        assert file_size(m, 1) == min(r.bit_count() for r in m.rows)


def test_file_size_frozen_brute_force_values():
    assert [file_size(td(2, 5), k) for k in range(1, 11)] == [5, 9, 13, 16, 19, 21, 23, 24, 25, 25]
    assert [file_size(ap(4), k) for k in range(1, 17)] == [
        5, 9, 12, 14, 15, 15, 17, 18, 18, 19, 19, 19, 20, 20, 20, 20]


@pytest.mark.parametrize("name", sorted(SMALL))
def test_file_size_matches_brute_force(name):
    m = SMALL[name]
    for k in range(1, m.n + 1):
        assert file_size(m, k) == brute_file_size(m, k)


def test_file_size_k_range():
    with pytest.raises(KOutOfRange):
        file_size(td(2, 3), 0)
    with pytest.raises(KOutOfRange):
        file_size(td(2, 3), 7)


def test_file_size_witness_attains_minimum():
    m = td(3, 5)
    for k in range(1, m.n + 1):
        rows = file_size_witness(m, k)
        assert len(rows) == k
        assert analysis.cover_cols_count(m, rows) == file_size(m, k)


@given(matrices())
@settings(max_examples=60)
def test_file_size_random(m):
    sizes = [file_size(m, k) for k in range(1, m.n + 1)]
    assert sizes == [brute_file_size(m, k) for k in range(1, m.n + 1)]
    assert sizes == sorted(sizes)
    prof_alpha = max(r.bit_count() for r in m.rows)
    assert all(s <= min(m.theta, k * prof_alpha) for k, s in enumerate(sizes, 1))


# batch parameter ----------------------------------------------------------------

@pytest.mark.parametrize("m,expected", [
    (td(3, 4), 11),
    (td(2, 4), 5),
    (ap(3), 9),
    (td(3, 5), 12),
])
def test_batch_t_known_values(m, expected):
    t, w = batch_t(m)[:2]
    assert t == expected
    assert w is not None and len(w.columns) == t + 1 and w.is_valid(m)


@pytest.mark.parametrize("m,delta,expected", [
    (td(2, 4), 1, 3),
    (td(3, 4), 2, 8),
    (td(3, 5), 2, 9),
    (ap(3), 2, 6),  # exact value from the brute-force oracle; claimed bounds [4, 6]
])
def test_ecbc_t_values(m, delta, expected):
    res = ecbc_t(m, delta)
    assert res.t == expected and res.exact
    assert res.witness.is_valid(m) and res.witness.delta == delta
    assert len(res.witness.columns) == expected + 1


def test_ecbc_zero_is_batch_t():
    for m in SMALL.values():
        assert ecbc_t(m, 0) == batch_t(m)


def test_delta_too_large_and_empty_column():
    with pytest.raises(DeltaTooLarge):
        ecbc_t(td(3, 4), 3)
    m = BinaryIncidenceMatrix.from_supports(3, [{0}, {0}])
    with pytest.raises(EmptyColumn):
        batch_t(m)


def test_identity_has_full_t():
    m = BinaryIncidenceMatrix.identity(5)
    assert batch_t(m)[:2] == (5, None)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_oracle_equivalence_full(name):
    m = SMALL[name]
    rho = min(c.bit_count() for c in m.cols)
    for delta in range(rho):
        fast = ecbc_t(m, delta)
        o_t, o_w = batch_t_oracle(m, delta, m.theta)
        assert fast.t == o_t == brute_t(m, delta) if m.theta <= 16 else fast.t == o_t
        if o_w is not None:
            assert o_w.is_valid(m)


def test_oracle_examples():
    m = td(2, 3)
    assert batch_t_oracle(m, 0, 9)[0] == batch_t(m).t
    assert batch_t_oracle(m, 0, 1) == (1, None)
    assert batch_t_oracle(ap(3), 2, 12)[0] == ecbc_t(ap(3), 2).t
    assert batch_t_oracle(m, 0, 0) == (0, None)


@given(matrices(min_weight=1))
@settings(max_examples=80)
def test_fast_t_equals_oracle_random(m):
    rho = min(c.bit_count() for c in m.cols)
    for delta in range(rho):
        assert ecbc_t(m, delta).t == batch_t_oracle(m, delta, m.theta)[0] == brute_t(m, delta)


@given(matrices(min_weight=2))
@settings(max_examples=40)
def test_t_monotone_in_delta(m):
    rho = min(c.bit_count() for c in m.cols)
    ts = [ecbc_t(m, d).t for d in range(rho)]
    assert ts == sorted(ts, reverse=True)


def test_witness_is_lexicographically_first_row_set():
    m = td(2, 3)
    w = batch_t(m).witness
    # smallest violation is K_{2,3}: 6 blocks inside 5 points
    assert len(w.columns) == 6 and len(w.covered_rows) == 5
    candidates = [
        R for R in itertools.combinations(range(6), 5)
        if sum(1 for c in m.col_supports if c <= set(R)) >= 6
    ]
    assert tuple(w.covered_rows) == min(candidates)


# Hall equivalence --------------------------------------------------------------

@pytest.mark.parametrize("name", ["TD(2,4)", "TD(3,4)", "A(3)", "A(4)"])
def test_hall_matching_up_to_size_four(name):
    m = SMALL[name]
    t = batch_t(m).t
    cols = m.col_supports
    for size in range(1, min(4, t) + 1):
        for T in itertools.combinations(range(m.theta), size):
            assert len(hopcroft_karp([sorted(cols[j]) for j in T])) == size


def test_hall_matching_sampled_larger():
    rng = random.Random(3)
    for m in (td(3, 5), ap(5), td(2, 7)):
        t = batch_t(m).t
        cols = m.col_supports
        for _ in range(200):
            T = rng.sample(range(m.theta), rng.randint(1, t))
            assert len(hopcroft_karp([sorted(cols[j]) for j in T])) == len(T)
        w = batch_t(m).witness
        assert len(hopcroft_karp([sorted(cols[j]) for j in w.columns])) < len(w.columns)


# explicit configurations -----------------------------------------------------------

@pytest.mark.parametrize("alpha", [7, 8])
def test_td3_upper_bound_witness(alpha):
    m = td(3, alpha)
    w = td3_upper_witness(m, alpha)
    assert w is not None and w.is_valid(m)
    assert len(w.columns) == 2 * alpha + 2
    assert len(cover_rows(m, w.columns)) == 2 * alpha + 1


def test_covering_witness_absent():
    # any 3 blocks of TD(2,3) cover at least 3 points
    assert find_covering_witness(td(2, 3), 3, 2) is None


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_affine_erasure_configuration(q):
    plane = build_affine(q)
    m = ap(q)
    w, info = affine_erasure_witness(plane)
    assert len(w.columns) == q * q - q + 1
    assert len(w.covered_rows) == q * q - 1
    assert info["kept_point"] not in w.covered_rows
    assert w.delta == q - 1 and w.is_valid(m)


# formulas --------------------------------------------------------------------------

def test_formula_examples():
    assert formula_M("TD3", 4, 4) == (11, True)
    assert formula_M("TD2", 4, 2) == (7, True)
    assert formula_M("AFFINE", 4, 3) == (12, True)
    assert formula_M("TD3", 5, 4) == (15, True)
    assert formula_M("TDres", 4, 4) == (11, False)
    assert file_size(td(2, 4), 2) == 7
    assert file_size(ap(4), 3) == 12
    assert file_size(td(3, 5), 4) == 15


def test_formula_errors():
    with pytest.raises(BadFamily):
        formula_M("PG", 3, 1)
    with pytest.raises(KOutOfRange):
        formula_M("TD2", 3, 7)
    with pytest.raises(KOutOfRange):
        formula_M("AFFINE", 3, 0)


@pytest.mark.parametrize("alpha", [3, 4, 5, 7])
def test_td2_formula_everywhere(alpha):
    m = td(2, alpha)
    for k in range(1, 2 * alpha + 1):
        assert file_size(m, k) == formula_M("TD2", alpha, k)[0]


@pytest.mark.parametrize("alpha", [4, 5])
def test_tdres_formula_is_lower_bound(alpha):
    m = td(alpha - 1, alpha)
    for k in range(1, m.n + 1):
        assert file_size(m, k) >= formula_M("TDRES", alpha, k)[0]


# expansion and reports ---------------------------------------------------------------

def test_expansion_check():
    m = td(3, 4)
    assert expansion_check(m, 11, 4, 11).passed
    rep = expansion_check(m, 12, 4, 11)
    assert not rep.symbols_side and rep.symbols_witness.is_valid(m)
    rep = expansion_check(m, 11, 4, 12)
    assert not rep.nodes_side and len(rep.nodes_witness) == 4 and rep.nodes_neighbours == 11
    assert expansion_check(BinaryIncidenceMatrix.identity(4), 4, 2, 2).passed


def test_expansion_equivalent_to_parameters():
    for m in SMALL.values():
        t = batch_t(m).t
        for k in range(1, m.n + 1):
            M = file_size(m, k)
            assert expansion_check(m, t, k, M).passed
            assert not expansion_check(m, t, k, M + 1).passed
        assert not expansion_check(m, t + 1, 1, 1).passed or t == m.theta


def test_verify_code_examples():
    rep = verify_code(td(3, 4), "TD3", 4, range(1, 5), [0, 1, 2])
    assert rep.passed
    assert rep.code_string(4) == "3-(12,11,4,4,11)"
    rep = verify_code(td(3, 4), "TDRES", 4, range(1, 13))
    assert rep.passed and all(not r["exact"] for r in rep.M_table)
    rep = verify_code(td(2, 5), "TD2", 5, range(1, 6))
    assert rep.passed and rep.t["computed"] == 5
    assert [r["computed"] for r in rep.M_table] == [5 * k - k * k // 4 for k in range(1, 6)]
    rep = verify_code(ap(3), "AFFINE", 3, range(1, 4), [2])
    assert rep.passed and 4 <= rep.ecbc[0]["t"] <= 6
    assert rep.witnesses and rep.witnesses[0]["passed"]


def test_verify_code_flags_failures():
    # claiming the TD(2,4) matrix is an affine plane fails the t claim
    rep = verify_code(td(2, 4), "AFFINE", 4, range(1, 3))
    assert not rep.passed and rep.t["passed"] is False
    # affine k > q is informational only
    rep = verify_code(ap(3), "AFFINE", 3, range(1, 10))
    assert all(("passed" in r) == (r["k"] <= 3) for r in rep.M_table)
    rep = verify_code(td(3, 4), None, None, [4])
    assert rep.passed and rep.M_table[0]["formula"] is None


def test_sampled_bounds_above_cap(monkeypatch):
    monkeypatch.setattr(analysis, "EXACT_MAX_ROWS", 10)
    m = td(3, 4)  # 12 rows, treated as too tall
    res = batch_t(m, samples=300, seed=1)
    assert not res.exact
    assert res.lower <= 11 <= res.t
    assert res.witness.is_valid(m)
