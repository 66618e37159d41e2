import pytest

from nialg import library
from nialg.linalg import rref, same_span
from nialg.magma import POLARIZED, monomial_table
from nialg.polar import (NotPolarizable, depolarize_space, derived_identities,
                         derived_signature, expression_vector, follows_from,
                         identity_strings, polarize)
from nialg.variety import DegreeError

POL1 = "[[a,b],c] + [[b,c],a] + [[c,a],b] = 0"
POL2 = ("{{a,b},c} = -{[a,b],c} - 2*{[a,c],b} + [{a,b},c] - [[a,c],b]"
        " + {a,{b,c}} - {a,[b,c]} + [a,{b,c}]")
EXTRA = {
    # the a1 bracket-class coefficients are rigid; the 3/2 variant fails
    # the depolarization membership test (see
    # test_a1_three_halves_variant_is_not_an_identity)
    "ls_a1": "{a,{b,c}} = {[a,b],c} + {[a,c],b} - 2/3*[{a,b},c]"
             " - 2/3*[{a,c},b] + 2/3*[[a,c],b] - 1/3*[a,{b,c}]"
             " + 1/3*[a,[b,c]]",
    "ls_b1": library.POLARIZED_EXTRA["ls_b1"],
    "ls_a2": library.POLARIZED_EXTRA["ls_a2"],
}


def _vec(text):
    return expression_vector(text, POLARIZED, 3)


def _is_row(pres, text):
    """The identity equals the echelon row with the same leading monomial."""
    vec = _vec(text)
    tab = monomial_table(POLARIZED, 3)
    single = rref([vec], len(tab), sig=POLARIZED, degree=3,
                  order=pres.space.order)
    piv = single.pivots[0]
    for row, rpiv in zip(pres.space.rows, pres.space.pivots):
        if rpiv == piv:
            return row == single.rows[0]
    return False


def test_polarize_ls_rows_are_the_expected_identities(ctx):
    pres = polarize(ctx, "ls")
    assert pres.space.rank == 3
    assert _is_row(pres, POL1)
    assert _is_row(pres, POL2)


@pytest.mark.parametrize("name", ["ls_a1", "ls_b1", "ls_a2"])
def test_polarize_subvarieties(ctx, name):
    pres = polarize(ctx, name)
    assert pres.space.rank == 4
    assert _is_row(pres, POL1)
    assert pres.space.contains(_vec(POL2))
    assert _is_row(pres, EXTRA[name])


def test_a1_three_halves_variant_is_not_an_identity(ctx):
    """Perturbing the three 2/3 bracket-class coefficients of the a1
    polarization identity to 3/2 gives a polynomial whose depolarization is
    provably not an identity of the variety."""
    variant = ("{a,{b,c}} = {[a,b],c} + {[a,c],b} - 3/2*[{a,b},c]"
               " - 3/2*[{a,c},b] + 3/2*[[a,c],b] - 1/3*[a,{b,c}]"
               " + 1/3*[a,[b,c]]")
    pres = polarize(ctx, "ls_a1")
    assert not pres.space.contains(_vec(variant))
    assert pres.space.contains(_vec(EXTRA["ls_a1"]))
    # and independently through depolarization membership
    tab = monomial_table(POLARIZED, 3)
    for text, expected in ((variant, False), (EXTRA["ls_a1"], True)):
        space = rref([_vec(text)], len(tab), sig=POLARIZED, degree=3)
        image = depolarize_space(space, ctx.variety("ls_a1").signature)
        cons = ctx.consequences("ls_a1", 3)
        assert all(cons.contains(r) for r in image.rows) == expected


@pytest.mark.parametrize("name", ["ls", "ls_a1", "ls_b1", "ls_a2",
                                  "ls_b2", "ls_c1", "ls_d1"])
def test_depolarization_roundtrip(ctx, name):
    pres = polarize(ctx, name)
    image = depolarize_space(pres.space, ctx.variety(name).signature)
    assert same_span(image, ctx.consequences(name, 3))


@pytest.mark.parametrize("name", ["ls", "ls_a1", "ls_b1", "ls_a2",
                                  "ls_b2", "ls_c1", "ls_c2", "ls_d1",
                                  "ls_d2"])
def test_jacobi_identity_in_every_polarization(ctx, name):
    assert polarize(ctx, name).space.contains(_vec(POL1))


def test_identity_strings_roundtrip(ctx):
    from nialg import expr as ex
    pres = polarize(ctx, "ls_b1")
    for text in identity_strings(pres):
        node = ex.parse(text, POLARIZED)
        vec = expression_vector(node, POLARIZED, 3)
        assert pres.space.contains(vec)


def test_polarize_rejects_two_op(ctx):
    with pytest.raises(NotPolarizable):
        polarize(ctx, "lie")


def test_derived_ranks(ctx):
    expect = {
        ("ls_a1", "commutator", 3): 1,
        ("ls_a1", "commutator", 4): 9,
        ("ls_a1", "anticommutator", 4): 0,
        ("ls_b1", "anticommutator", 4): 0,
        ("ls_a2", "commutator", 3): 1,
        ("ls_a2", "anticommutator", 3): 0,
        ("ls_a2", "anticommutator", 4): 1,
    }
    for (name, op, deg), rank in expect.items():
        assert derived_identities(ctx, name, op, deg).rank == rank


def test_derived_degree_guard(ctx):
    with pytest.raises(DegreeError):
        derived_identities(ctx, "ls_a1", "commutator", 6)
    with pytest.raises(DegreeError):
        derived_identities(ctx, "ls_a1", "commutator", 5)
    with pytest.warns(UserWarning):
        # perm keeps the unvalidated-degree probe cheap
        derived_identities(ctx, "perm", "commutator", 5,
                           allow_high_degree=True)


def test_follows_from(ctx):
    asig = derived_signature("commutator")
    ssig = derived_signature("anticommutator")
    comm4 = derived_identities(ctx, "ls_b1", "commutator", 4)
    assert follows_from(ctx, comm4, [library.JACOBI], asig)
    anti4 = derived_identities(ctx, "ls_a2", "anticommutator", 4)
    assert not follows_from(ctx, anti4, [], ssig)
    assert follows_from(ctx, anti4, [library.JORDAN_DEGREE4], ssig)


def test_degree4_anticommutator_identity_membership_both_ways(ctx):
    """The fifteen-term identity and its index-sum form agree modulo the
    commutativity canonicalization."""
    ssig = derived_signature("anticommutator")
    found = derived_identities(ctx, "ls_a2", "anticommutator", 4)
    jord = expression_vector(library.JORDAN_DEGREE4, ssig, 4)
    assert found.contains(jord)
    span_jord = rref([jord], found.ncols, sig=ssig, degree=4)
    assert all(span_jord.contains(r) for r in found.rows)
