"""Koszul duals of binary quadratic presentations.

The weight-2 ambient of a one-operation signature is the 12-dimensional
degree-3 multilinear span.  The dual relation space is the annihilator under
the pairing that is diagonal in the monomial basis:

    <(x_s1 x_s2) x_s3, (x_s1 x_s2) x_s3> = sgn(s)
    <x_s1 (x_s2 x_s3), x_s1 (x_s2 x_s3)> = -sgn(s)

with all other pairings zero.  The same sign pattern is what the cyclic
Jacobi sum produces on a tensor product of two algebras, so the pairing
convention is cross-checked by an independent Lie-admissibility expansion
(and by associative self-duality and dual(ls) = perm in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import RelationSpace, nullspace, rref, same_span
from .magma import Signature, is_leaf, leaves, monomial_table
from .variety import Context, SignatureMismatch, VarietyPresentation


class NotQuadratic(ValueError):
    pass


@dataclass
class QuadraticPresentation:
    """Degree-3 relation space of a one-operation binary quadratic variety."""

    source: str
    space: RelationSpace

    @property
    def dim(self) -> int:
        return self.space.rank


def _check_quadratic(ctx: Context, v: VarietyPresentation):
    if len(v.signature.ops) != 1 or not v.signature.is_plain:
        raise NotQuadratic(f"{v.name}: dual needs one plain binary operation")
    for identity in v.identities:
        from .variety import multilinearize
        for poly in multilinearize(identity, v.signature):
            deg = len(leaves(next(iter(poly))))
            if deg != 3:
                raise NotQuadratic(
                    f"{v.name}: defining identities must have degree 3, "
                    f"found degree {deg}")


def quadratic_presentation(ctx: Context, v) -> QuadraticPresentation:
    v = ctx.variety(v)
    _check_quadratic(ctx, v)
    return QuadraticPresentation(v.name, ctx.consequences(v, 3))


def _sign_of_perm(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def pairing_signs(sig: Signature):
    """Diagonal of the weight-2 pairing in monomial-table order."""
    table = monomial_table(sig, 3)
    signs = []
    for t in table.trees:
        op, l, r = t
        if is_leaf(r):  # (x x) x shape
            seq = leaves(l) + [r]
            signs.append(_sign_of_perm(seq))
        else:           # x (x x) shape
            seq = [l] + leaves(r)
            signs.append(-_sign_of_perm(seq))
    return signs


def koszul_dual(ctx: Context, p: QuadraticPresentation) -> QuadraticPresentation:
    """Annihilator of the relation space under the weight-2 pairing."""
    sig = p.space.sig
    signs = pairing_signs(sig)
    twisted = [{c: v * signs[c] for c, v in row.items()} for row in p.space.rows]
    ann = nullspace(twisted, p.space.ncols, sig=sig, degree=3)
    return QuadraticPresentation(f"{p.source}!", ann)


def double_dual_check(ctx: Context, p: QuadraticPresentation) -> bool:
    dd = koszul_dual(ctx, koszul_dual(ctx, p))
    return same_span(dd.space, p.space)


def match_library_name(ctx: Context, space: RelationSpace) -> str | None:
    """Name of a library variety whose degree-3 relations span ``space``."""
    for name in sorted(ctx.registry):
        v = ctx.registry[name]
        if v.signature != space.sig or len(v.signature.ops) != 1:
            continue
        try:
            cand = ctx.consequences(v, 3)
        except Exception:
            continue
        if cand.ncols == space.ncols and same_span(cand, space):
            return name
    return None


# ---------- independent route: Lie-admissibility of a tensor product ----------


def _tensor_mul(x: dict, y: dict) -> dict:
    out = {}
    for (la, ra), ca in x.items():
        for (lb, rb), cb in y.items():
            key = ((0, la, lb), (0, ra, rb))
            out[key] = out.get(key, 0) + ca * cb
    return out


def _tensor_bracket(x: dict, y: dict) -> dict:
    out = _tensor_mul(x, y)
    for key, c in _tensor_mul(y, x).items():
        out[key] = out.get(key, 0) - c
    return {k: v for k, v in out.items() if v}


def jacobi_tensor_sum() -> dict:
    """Sum of [[a@u, b@v], c@w] over cyclic permutations, expanded formally.

    Keys are (left tree, right tree) pairs on separate variable sets
    {1,2,3}; the bracket is the commutator of the componentwise product.
    """
    gens = [{(i, i): Fraction(1)} for i in (1, 2, 3)]
    a, b, c = gens
    total = {}
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        for key, v in _tensor_bracket(_tensor_bracket(x, y), z).items():
            total[key] = total.get(key, 0) + v
    return {k: v for k, v in total.items() if v}


def lie_admissibility_check(ctx: Context, c_variety, d_variety) -> bool:
    """True iff the tensor Jacobi constraints on the right factors span
    exactly the degree-3 relations of ``d_variety`` after the left factors
    are reduced modulo those of ``c_variety`` -- i.e. iff d = c^(!)."""
    pc = quadratic_presentation(ctx, c_variety)
    pd = quadratic_presentation(ctx, d_variety)
    sig = pc.space.sig
    if sig != pd.space.sig:
        raise SignatureMismatch("tensor factors use different signatures")
    table = monomial_table(sig, 3)
    ncols = len(table)
    # coefficient matrix T[left monomial][right monomial] of the Jacobi sum
    tensor = jacobi_tensor_sum()
    # quotient coordinates on the left: residues modulo pc.space
    residues = [pc.space.reduce({i: Fraction(1)}) for i in range(ncols)]
    nonpivot = [i for i in range(ncols) if i not in set(pc.space.pivots)]
    constraints = {q: {} for q in nonpivot}
    for (lt, rt), coef in tensor.items():
        li = table.index[lt]
        ri = table.index[rt]
        for q, lcoef in residues[li].items():
            row = constraints[q]
            val = row.get(ri, 0) + lcoef * coef
            if val:
                row[ri] = val
            else:
                row.pop(ri, None)
    found = rref([r for r in constraints.values() if r], ncols,
                 sig=sig, degree=3)
    return same_span(found, pd.space)
