import random
from fractions import Fraction

import pytest

from nialg.magma import ONE_OP, leaves, monomial_table
from nialg.nf import (FAMILY_NAMES, Normalizer, RewriteError, basis_size_formula,
                      dual_variety, enumerate_basis, family_rules,
                      normal_form, random_monomial, redexes, rewrite_random,
                      rewrite_system, rule_soundness, unique_nf_check,
                      verify_basis)

F = Fraction


def _ln(seq):
    t = seq[0]
    for x in seq[1:]:
        t = (0, t, x)
    return t


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_every_rule_is_an_identity_of_the_dual(ctx, family):
    assert all(rule_soundness(ctx, family).values())


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_basis_count_formulas_to_ten(family):
    for n in range(1, 11):
        assert len(enumerate_basis(family, n)) == basis_size_formula(family, n)


def test_catalogued_basis_sets():
    assert enumerate_basis("a1", 4) == [
        _ln([1, 2, 3, 4]), _ln([1, 2, 4, 3]), _ln([1, 3, 4, 2]),
        _ln([2, 1, 3, 4]), _ln([2, 3, 4, 1])]
    assert enumerate_basis("a2", 3) == [
        _ln([1, 2, 3]), _ln([1, 3, 2]), (0, 3, (0, 1, 2)), (0, 3, (0, 2, 1))]
    b5 = enumerate_basis("b1", 5)
    assert len(b5) == 6
    assert b5[-1] == (0, 5, _ln([1, 2, 3, 4]))


def test_normal_form_half_zinbiel_example(ctx):
    nf = normal_form(ctx, "a1", "x1*(x2*x3)")
    assert nf == {_ln([2, 1, 3]): F(1, 2), _ln([1, 2, 3]): F(1, 2)}


def test_normal_form_unnest_example(ctx):
    nf = normal_form(ctx, "b1", "x4*(x3*(x1*x2))")
    assert nf == {
        (0, 4, _ln([1, 2, 3])): F(2),
        _ln([1, 3, 4, 2]): F(1),
        _ln([1, 2, 4, 3]): F(-2),
    }


def test_normal_form_a2_left_norms_products(ctx):
    nrm = Normalizer(ctx, "a2")
    t = (0, _ln([1, 2, 3, 4]), (0, 5, 6))
    nf = nrm.normal_form(t)
    basis = set(enumerate_basis("a2", 6))
    assert set(nf) <= basis


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_basis_monomials_are_fixed_points(ctx, family):
    nrm = Normalizer(ctx, family)
    for n in (2, 3, 4, 5):
        for t in enumerate_basis(family, n):
            assert nrm.normal_form(t) == {t: F(1)}, (family, n, t)


@pytest.mark.parametrize("family", FAMILY_NAMES)
@pytest.mark.parametrize("degree", [3, 4, 5])
def test_verify_basis_full(ctx, family, degree):
    report = verify_basis(ctx, family, degree)
    assert report["status"] == "pass", report["failures"][:3]
    assert report["basis_size"] == report["dimension"]


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_verify_basis_spanning_mode(ctx, family):
    report = verify_basis(ctx, family, 7, spanning_only=True)
    assert report["status"] == "pass"
    assert report["checked_products"] > 0


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_unique_nf_small(ctx, family):
    for n in (3, 4):
        report = unique_nf_check(ctx, family, n, trials=60, seed=n)
        assert report["status"] == "pass", report["failures"][:1]


def test_random_rewrite_matches_deterministic(ctx):
    rng = random.Random(99)
    nrm = Normalizer(ctx, "b1")
    for _ in range(25):
        t = random_monomial(5, rng)
        assert rewrite_random(ctx, "b1", t, rng) == nrm.normal_form(t)


def test_sorting_rules_only_permute_the_prefix():
    """The coefficient-one permutation rules fix the last factor: the
    right-hand sides keep the outermost right operand in place."""
    for family in FAMILY_NAMES:
        for rule in family_rules(family):
            if len(rule.rhs) != 1 or rule.rhs[0][0] != 1:
                continue
            lhs, rhs = rule.lhs, rule.rhs[0][1]
            # compare outermost right operands as pattern variables
            if isinstance(lhs, tuple) and isinstance(rhs, tuple):
                if isinstance(lhs[2], str) and isinstance(rhs[2], str):
                    same_last = lhs[2] == rhs[2]
                    # the left-multiplication movers are the exception
                    assert same_last or rule.name in ("push-in", "unnest",
                                                      "left-wrap",
                                                      "left-comm",
                                                      "outer-swap"), rule.name


def test_reduction_difference_in_consequence_space(ctx):
    """Conservation: monomial minus its normal form is a consequence."""
    tab = monomial_table(ONE_OP, 4)
    for family in FAMILY_NAMES:
        nrm = Normalizer(ctx, family)
        cons = ctx.consequences(dual_variety(family), 4)
        for t in tab.trees:
            diff = {tab.index[t]: F(1)}
            for t2, c in nrm.normal_form(t).items():
                i = tab.index[t2]
                diff[i] = diff.get(i, 0) - c
            diff = {k: v for k, v in diff.items() if v}
            assert cons.contains(diff), (family, t)


def test_redexes_respect_table_degrees(ctx):
    system = rewrite_system(ctx, "a1")
    for t in enumerate_basis("a1", 4):
        assert redexes(system, t) == []
    non_basis = (0, 4, _ln([1, 2, 3]))
    reds = redexes(system, non_basis)
    assert reds == [((), ("table", 4))]


def test_nf_of_string_validation(ctx):
    with pytest.raises(ValueError):
        normal_form(ctx, "a1", "x1*(x2*x3) + x2*(x1*x3)")
