import json
import os

import pytest

from nialg import expr as ex
from nialg.library import builtin_registry
from nialg.linalg import PRIMES, same_span
from nialg.magma import ONE_OP, leaves, monomial_table, perm_of_cycle, act_poly
from nialg.variety import (Context, DegreeError, SignatureMismatch,
                           UnknownVariety, load_variety_file, multilinearize,
                           presentation_from_dict)

from oracle import BruteForceSpace

LINEARIZED_ALTERNATIVE = (
    "(a*b)*c + (b*a)*c - a*(b*c) - b*(a*c) = 0",
    "(a*b)*c + (a*c)*b - a*(b*c) - a*(c*b) = 0",
)


def test_multilinearize_square_toy():
    sig = ONE_OP
    polys = multilinearize(ex.parse("a*a = 0", sig), sig)
    assert polys == [{(0, 1, 2): 1, (0, 2, 1): 1}]


def test_multilinearize_left_alternative():
    polys = multilinearize(ex.parse("(a*a)*b - a*(a*b) = 0", ONE_OP), ONE_OP)
    assert len(polys) == 1
    expect = multilinearize(ex.parse(LINEARIZED_ALTERNATIVE[0], ONE_OP),
                            ONE_OP)[0]
    assert polys[0] == expect


def test_multilinearize_already_multilinear():
    node = ex.parse(
        "(a*b)*c + (b*a)*c + (a*c)*b + (c*a)*b + (b*c)*a + (c*b)*a = 0",
        ONE_OP)
    polys = multilinearize(node, ONE_OP)
    assert len(polys) == 1 and len(polys[0]) == 6


def test_small_ranks_and_dims(ctx):
    assert ctx.consequences("ls", 3).rank == 3
    assert ctx.dimension("ls", 3) == 9
    assert ctx.consequences("ls_a1", 3).rank == 4
    assert ctx.dimension("ls_a1", 3) == 8
    assert ctx.consequences("perm", 3).rank == 9
    assert ctx.dimension("perm", 3) == 3
    assert [ctx.dimension("ls", n) for n in range(1, 5)] == [1, 2, 9, 64]


def test_degree_below_identities(ctx):
    assert ctx.dimension("ls_a1", 1) == 1
    assert ctx.dimension("ls_a1", 2) == 2
    with pytest.raises(DegreeError):
        ctx.dimension("ls", 0)


def test_unknown_variety(ctx):
    with pytest.raises(UnknownVariety):
        ctx.dimension("nope", 3)


def test_consequence_space_is_symmetric_group_closed(ctx):
    for name in ("ls", "ls_a1", "ls_a2_dual"):
        for n in (3, 4):
            space = ctx.consequences(name, n)
            tab = monomial_table(ONE_OP, n)
            for j in range(1, n):
                perm = perm_of_cycle(n, (j, j + 1))
                for row in space.rows:
                    poly = {tab.trees[c]: v for c, v in row.items()}
                    img = act_poly(ONE_OP, perm, poly)
                    vec = {tab.index[t]: v for t, v in img.items()}
                    assert space.contains(vec)


def test_rank_matches_exhaustive_oracle(ctx):
    """Interleaved echelonization gives the same rank as generating every
    lifting in one pass (brute force, no intermediate reduction)."""
    cases = [
        ("ls", ["(a*b)*c - a*(b*c) - (b*a)*c + b*(a*c) = 0"]),
        ("perm", ["(a*b)*c - a*(b*c) = 0", "a*(b*c) - b*(a*c) = 0"]),
        ("ls_a2_dual",
         list(LINEARIZED_ALTERNATIVE) + ["(a*b)*c - (b*a)*c = 0"]),
    ]
    for name, texts in cases:
        for n in (3, 4):
            brute = BruteForceSpace(texts, n)
            assert ctx.consequences(name, n).rank == brute.rank, (name, n)


def test_is_identity_examples(ctx):
    assert ctx.is_identity("ls", "(a*b)*c - a*(b*c) - (b*a)*c + b*(a*c) = 0")
    assert not ctx.is_identity("ls", "(a*b)*c - a*(b*c) = 0")
    assert ctx.is_identity("ls_a1_dual", "((b*a)*c)*d = ((a*c)*b)*d")
    assert ctx.is_identity("ls_a2_dual", "d*(c*(a*b)) = ((a*c)*d)*b")


def test_is_identity_signature_mismatch(ctx):
    with pytest.raises(Exception):
        ctx.is_identity("lie", "(a*b)*c = 0")


def test_includes_basics(ctx):
    assert ctx.includes("ls_a1", "ls", 4)       # ls_a1 is a subvariety of ls
    assert not ctx.includes("ls", "ls_a1", 4)
    assert ctx.includes("perm", "perm", 5)
    with pytest.raises(SignatureMismatch):
        ctx.includes("lie", "ls", 3)


def test_modular_certified_matches_exact_small(ctx):
    for name in ("ls", "ls_a1", "ls_b1", "ls_a2"):
        exact = ctx.consequences(name, 4).rank
        chain = ctx._modp_chain(ctx.variety(name), 4, PRIMES[0])
        assert chain[4] == exact


def test_mirrored_presentations(ctx):
    a1 = ctx.registry["ls_a1"]
    a2 = ctx.registry["ls_a2"]
    assert a1.signature == a2.signature
    # ls identities shared; the extra relation is the mirror image
    assert a1.identities[:-1] == a2.identities[:-1]
    assert a2.identities[-1] == ex.mirror_expr(a1.identities[-1])
    # the right-normed analog of the B-type relation defines the same variety
    b1 = ctx.consequences("ls_b1", 3)
    b2 = ctx.consequences("ls_b2", 3)
    assert same_span(b1, b2)


def test_variety_file_roundtrip(tmp_path):
    data = {
        "name": "toy",
        "ops": [{"name": "*", "symmetry": "none"}],
        "identities": ["(a*b)*c - a*(b*c) = 0"],
    }
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(data))
    pres = load_variety_file(str(path))
    assert pres.name == "toy"
    assert len(pres.identities) == 1


def test_variety_path_env(tmp_path, monkeypatch):
    data = {
        "name": "userdef",
        "ops": [{"name": "*", "symmetry": "none"}],
        "identities": ["a*(b*c) - b*(a*c) = 0"],
    }
    (tmp_path / "userdef.json").write_text(json.dumps(data))
    monkeypatch.setenv("NIALG_VARIETY_PATH", str(tmp_path))
    reg = builtin_registry()
    assert "userdef" in reg
    ctx = Context(reg)
    assert ctx.dimension("userdef", 3) == 12 - 3


def test_extends_merges_identities():
    parent = presentation_from_dict({
        "name": "p", "ops": [{"name": "*"}],
        "identities": ["(a*b)*c - a*(b*c) = 0"]})
    child = presentation_from_dict({
        "name": "c", "ops": [{"name": "*"}], "extends": "p",
        "identities": ["a*(b*c) - b*(a*c) = 0"]})
    merged = child.with_parent(parent)
    assert len(merged.identities) == 2
