import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metasplit.cohomology import (
    QZ,
    CohResult,
    ModAut,
    assemble_h2_gprime,
    bockstein_check,
    brute_force_h2,
    cyclic_cohomology,
    cyclic_trivial,
    dual_module,
    frobenius_module,
    group_table,
    hilbert90,
    invariant_factors,
    kunneth_h2_mx,
    kunneth_truncation_check,
    lemma_l_check,
    restrict_h1,
    z_cohomology,
)
from metasplit.errors import ActionOrderMismatch, SizeLimitExceeded

Z2 = ModAut.cyclic(2)


def test_invariant_factors_from_torsion_counts():
    # Z/4 x Z/6 = Z/2 x Z/12
    assert invariant_factors(lambda m: math.gcd(m, 4) * math.gcd(m, 6), 24) == (2, 12)
    assert invariant_factors(lambda m: math.gcd(m, 8), 8) == (8,)
    assert invariant_factors(lambda m: 1, 1) == ()


def test_module_validation():
    with pytest.raises(ValueError):
        ModAut.cyclic(8, 2)  # not bijective
    M = ModAut([2, 4], [[1, 2], [0, 1]])
    assert M.order == 8


@pytest.mark.parametrize("n", range(1, 17))
def test_cyclic_formula_matches_brute_force(n):
    assert cyclic_cohomology(n, Z2, 2) == brute_force_h2(group_table(f"cyclic:{n}"))


def test_cyclic_examples():
    assert cyclic_cohomology(8, Z2, 2).factors == (2,)
    for n in (3, 5, 7, 9):
        assert cyclic_cohomology(n, Z2, 2).is_zero
    assert cyclic_cohomology(2, frobenius_module(3), 1).is_zero
    assert cyclic_cohomology(4, Z2, 0).factors == (2,)


def test_action_order_must_divide_group_order():
    with pytest.raises(ActionOrderMismatch):
        cyclic_cohomology(3, frobenius_module(3), 1)


def test_brute_force_examples():
    assert brute_force_h2(group_table("cyclic:2")).factors == (2,)
    assert brute_force_h2(group_table("cyclic:3")).is_zero
    assert brute_force_h2(group_table("product:cyclic:2,cyclic:2")).factors == (2, 2, 2)


def test_brute_force_size_limit():
    with pytest.raises(SizeLimitExceeded):
        brute_force_h2(group_table("cyclic:65"))


def test_semidirect_table_is_a_group():
    t = group_table("semidirect:3")
    n = len(t)
    assert n == 16
    rng = random.Random(0)
    for _ in range(200):
        a, b, c = (rng.randrange(n) for _ in range(3))
        assert t[t[a][b]][c] == t[a][t[b][c]]
    assert all(t[0][x] == x == t[x][0] for x in range(n))


def test_z_cohomology_examples():
    h0, h1 = z_cohomology(ModAut.cyclic(2))
    assert h0.factors == h1.factors == (2,)
    assert z_cohomology(ModAut.cyclic(8, 3))[1].factors == (2,)
    assert z_cohomology(dual_module(frobenius_module(3)))[1].factors == (2,)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(1, 40))
def test_fixed_points_and_coinvariants_have_equal_order(n, s):
    if math.gcd(n, s) != 1:
        return
    h0, h1 = z_cohomology(ModAut.cyclic(n, s))
    assert h0.order == h1.order


def test_restriction_examples():
    r = restrict_h1(ModAut.cyclic(8, 3), 1)
    assert r.kernel_order == 1 and r.source == r.target
    r = restrict_h1(ModAut.cyclic(8, 3), 2)
    assert r((1,)) == (4,)
    assert r.target.factors == (8,)
    assert r.injective_on_2_torsion
    r = restrict_h1(ModAut.cyclic(2), 2)
    assert r((1,)) == (0,)
    assert not r.injective_on_2_torsion


@pytest.mark.parametrize("n, s, k1, k2", [(8, 3, 2, 2), (24, 5, 2, 3), (15, 2, 2, 2), (48, 7, 3, 2)])
def test_restriction_is_functorial(n, s, k1, k2):
    M = ModAut.cyclic(n, s)
    direct = restrict_h1(M, k1 * k2)
    first = restrict_h1(M, k1)
    second = restrict_h1(M.power(k1), k2)
    for x in M.elements:
        assert direct(x) == second(first(x))


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_dual_action_is_inverse(q):
    M = frobenius_module(q)
    D = dual_module(M)
    s, t = M.sigma[0][0], D.sigma[0][0]
    assert s * t % (q * q - 1) == 1


def test_dual_of_noncyclic_module():
    M = ModAut([2, 4], [[1, 2], [0, 1]])
    D = dual_module(M)
    assert D.order == M.order
    assert D.action_order() == M.action_order()


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_semidirect_h2_with_z2_coefficients(q):
    h = assemble_h2_gprime(q, "z2")
    assert h.factors == (2, 2)
    assert h.order == 4


@pytest.mark.parametrize("q, expected", [(3, (2,)), (5, (4,)), (7, (6,)), (9, (8,))])
def test_qz_assembly(q, expected):
    h = assemble_h2_gprime(q, "qz")
    assert h.factors == expected
    assert h.torsion_order(2) == 2


@pytest.mark.parametrize("q", [3, 5, 7])
def test_restriction_bijective_on_2_torsion(q):
    assert lemma_l_check(q)


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_hilbert90(q):
    h1, kn, im = hilbert90(q)
    assert h1.is_zero
    assert kn == im == q + 1


@pytest.mark.parametrize("q", [3, 5])
def test_kunneth(q):
    assert kunneth_h2_mx(q).factors == (2, 2)


def test_kunneth_truncation_budget():
    full, corr, answer = kunneth_truncation_check(3)
    assert (full, corr, answer) == (3, 1, 2)


def test_semidirect_quotient_agrees_with_assembly():
    assert brute_force_h2(group_table("semidirect:3")).factors == (2, 2)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_bockstein(q):
    b = bockstein_check(q)
    assert (b["h2_z2"], b["h1_mod_2"], b["h2_qz_2tors"]) == (4, 2, 2)
    assert bockstein_check(q, direct=True)["ok"]


def test_qz_coefficients():
    assert cyclic_trivial(6, QZ, 1).factors == (6,)
    assert cyclic_trivial(6, QZ, 2).is_zero
    assert cyclic_trivial(6, QZ, 0).divisible == 1
    r = CohResult((4,), 1)
    assert r.mod_order(2) == 2 and r.torsion_order(2) == 4
    assert r.describe() == "Z/4 + Q/Z"
