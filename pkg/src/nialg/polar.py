"""Polarization into commutator/anti-commutator identities, and discovery of
all multilinear identities of the derived one-operation algebras.

``polarize`` substitutes  a*b -> 1/2([a,b] + {a,b})  into the degree-3
relations of a one-operation quadratic variety and echelonizes the result in
the two-operation ambient under the dedicated monomial order (bracket-shape
class first, lexicographic inside a class).  Solving each reduced row for its
leading monomial yields the identities in their solved form.

``derived_identities`` computes the space of degree-d identities in a single
derived operation by expanding derived monomials into the one-operation
ambient and taking the kernel of the quotient map modulo the variety's
consequence space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .linalg import (MonomialOrder, RelationSpace, order_from_ranking, rref,
                     same_span)
from .magma import (POLARIZED, Signature, format_poly, format_tree, is_leaf,
                    monomial_table, poly_add, tree_key)
from .variety import Context, DegreeError, VarietyPresentation, multilinearize


class NotPolarizable(ValueError):
    pass


_ANTI = 0  # op index of [,] in POLARIZED
_SYM = 1   # op index of {,} in POLARIZED


def _shape_class(t) -> int:
    """0..3 for [[,],], [{,},], {[,],}, {{,},}; leaf-first forms never occur
    in canonical degree-3 monomials (children are ordered compound-first)."""
    op, l, r = t
    inner = l if not is_leaf(l) else r
    return {( _ANTI, _ANTI): 0, (_ANTI, _SYM): 1,
            (_SYM, _ANTI): 2, (_SYM, _SYM): 3}[(op, inner[0])]


def polarization_order(table) -> MonomialOrder:
    """The degree-3 order: pivots are searched from {{.,.},.} upward, so the
    echelon rows come out solved for the monomials the identities are stated
    for ({{a,b},c}, {a,{b,c}}, ...), with [[.,.],.] kept as trailing terms."""
    ranked = sorted(range(len(table.trees)),
                    key=lambda i: (-_shape_class(table.trees[i]),
                                   tree_key(table.trees[i])))
    return order_from_ranking("polarization", ranked)


def polarize_tree(t) -> dict:
    """Expand a one-operation tree via a*b -> 1/2([a,b] + {a,b})."""
    if is_leaf(t):
        return {t: Fraction(1)}
    half = Fraction(1, 2)
    out = {}
    for lt, lc in polarize_tree(t[1]).items():
        for rt, rc in polarize_tree(t[2]).items():
            for op in (_ANTI, _SYM):
                res = _canon_pol((op, lt, rt))
                if res is None:
                    continue
                ct, sign = res
                val = out.get(ct, 0) + half * lc * rc * sign
                if val:
                    out[ct] = val
                else:
                    out.pop(ct, None)
    return out


def _canon_pol(t):
    from .magma import canonicalize
    return canonicalize(POLARIZED, t)


def depolarize_tree(t) -> dict:
    """Expand [a,b] -> ab - ba and {a,b} -> ab + ba back into one operation."""
    if is_leaf(t):
        return {t: Fraction(1)}
    out = {}
    for lt, lc in depolarize_tree(t[1]).items():
        for rt, rc in depolarize_tree(t[2]).items():
            c = lc * rc
            poly_add(out, {(0, lt, rt): c})
            sign = -1 if t[0] == _ANTI else 1
            poly_add(out, {(0, rt, lt): sign * c})
    return out


@dataclass
class PolarizedPresentation:
    source: str
    space: RelationSpace          # echelon under the polarization order
    identities: list              # (lead tree, {tree: coeff}) per row


def polarize(ctx: Context, v) -> PolarizedPresentation:
    """Polarized degree-3 presentation of a one-operation quadratic variety."""
    v = ctx.variety(v)
    if len(v.signature.ops) != 1 or not v.signature.is_plain:
        raise NotPolarizable(f"{v.name}: polarization needs one plain operation")
    src = ctx.consequences(v, 3)
    if src.degree != 3:
        raise NotPolarizable("quadratic presentations only")
    one_tab = monomial_table(v.signature, 3)
    pol_tab = monomial_table(POLARIZED, 3)
    order = polarization_order(pol_tab)
    rows = []
    for row in src.rows:
        out = {}
        for cid, coef in row.items():
            for t, c in polarize_tree(one_tab.trees[cid]).items():
                val = out.get(t, 0) + coef * c
                if val:
                    out[t] = val
                else:
                    out.pop(t, None)
        rows.append({pol_tab.index[t]: c for t, c in out.items()})
    space = rref(rows, len(pol_tab), sig=POLARIZED, degree=3, order=order)
    identities = []
    for row, piv in zip(space.rows, space.pivots):
        lead = pol_tab.trees[piv]
        identities.append((lead, {pol_tab.trees[c]: v_ for c, v_ in row.items()}))
    return PolarizedPresentation(v.name, space, identities)


def identity_strings(pres: PolarizedPresentation) -> list:
    """Rows rendered as ``lead = -(rest)`` in the expression grammar."""
    out = []
    for lead, poly in pres.identities:
        rest = {t: -c for t, c in poly.items() if t != lead}
        lhs = format_tree(POLARIZED, lead)
        out.append(f"{lhs} = {format_poly(POLARIZED, rest)}")
    return out


def expression_vector(text_or_expr, sig: Signature, degree: int) -> dict:
    """Canonical {id: coeff} vector of a multilinear identity."""
    node = text_or_expr
    if isinstance(node, str):
        node = ex.parse(node, sig)
    polys = multilinearize(node, sig)
    if len(polys) != 1:
        raise ValueError("expected a single multilinear component")
    tab = monomial_table(sig, degree)
    return {tab.index[t]: c for t, c in polys[0].items()}


def normalized(row: dict, order: MonomialOrder) -> dict:
    if not row:
        return row
    piv = min(row, key=order.position)
    inv = 1 / Fraction(row[piv])
    return {c: v * inv for c, v in row.items()}


def depolarize_space(space: RelationSpace, one_sig: Signature) -> RelationSpace:
    """Image of a polarized relation space back in the one-operation ambient."""
    pol_tab = monomial_table(POLARIZED, space.degree)
    one_tab = monomial_table(one_sig, space.degree)
    rows = []
    for row in space.rows:
        out = {}
        for cid, coef in row.items():
            for t, c in depolarize_tree(pol_tab.trees[cid]).items():
                poly_add(out, {t: coef * c})
        rows.append({one_tab.index[t]: c for t, c in out.items()})
    return rref(rows, len(one_tab), sig=one_sig, degree=space.degree)


# ---------- identities of the derived operations ----------

DERIVED_OPS = ("commutator", "anticommutator")


def derived_signature(op: str) -> Signature:
    if op == "commutator":
        return Signature.make(("[]", "antisymmetric"))
    if op == "anticommutator":
        return Signature.make(("{}", "symmetric"))
    raise ValueError(f"unknown derived operation {op!r}")


def expand_derived_tree(t, op: str) -> dict:
    """One derived monomial as a one-operation polynomial ([a,b] = ab - ba,
    {a,b} = ab + ba)."""
    if is_leaf(t):
        return {t: Fraction(1)}
    sign = -1 if op == "commutator" else 1
    out = {}
    for lt, lc in expand_derived_tree(t[1], op).items():
        for rt, rc in expand_derived_tree(t[2], op).items():
            c = lc * rc
            poly_add(out, {(0, lt, rt): c, (0, rt, lt): sign * c})
    return out


def derived_identities(ctx: Context, v, op: str, degree: int,
                       allow_high_degree: bool = False) -> RelationSpace:
    """Space of multilinear degree-d identities of the derived operation."""
    v = ctx.variety(v)
    if op not in DERIVED_OPS:
        raise ValueError(f"unknown derived operation {op!r}")
    if degree < 2 or degree > 4:
        if not (degree == 5 and allow_high_degree):
            raise DegreeError(
                "derived identity search is configured for degrees 2..4; "
                "pass allow_high_degree for degree 5 (unvalidated)")
        import warnings
        warnings.warn("degree-5 derived identities are outside the validated "
                      "range; results are exploratory")
    dsig = derived_signature(op)
    dtab = monomial_table(dsig, degree)
    one_tab = monomial_table(v.signature, degree)
    cons = ctx.consequences(v, degree)
    # image of each derived monomial in the quotient coordinates (residues
    # on the non-pivot columns of the consequence echelon)
    images = []
    for t in dtab.trees:
        poly = expand_derived_tree(t, op)
        vec = {one_tab.index[tt]: c for tt, c in poly.items()}
        images.append(cons.reduce(vec))
    # kernel of the coefficient matrix: rows indexed by derived monomials
    quotient_cols = sorted({c for img in images for c in img})
    col_pos = {c: i for i, c in enumerate(quotient_cols)}
    mat = []
    for img in images:
        mat.append({col_pos[c]: val for c, val in img.items()})
    kern = _left_kernel(mat, len(quotient_cols))
    return rref(kern, len(dtab), sig=dsig, degree=degree)


def _left_kernel(rows: list, ncols: int) -> list:
    """Vectors c with sum_i c_i rows[i] = 0, via elimination on the transpose."""
    nrows = len(rows)
    cols = {}
    for i, row in enumerate(rows):
        for j, v in row.items():
            cols.setdefault(j, {})[i] = v
    transpose = [cols.get(j, {}) for j in range(ncols)]
    from .linalg import nullspace
    return nullspace(transpose, nrows).rows


def follows_from(ctx: Context, found: RelationSpace, generators,
                 derived_sig: Signature) -> bool:
    """True iff ``found`` equals the consequence span of the generators in
    the free algebra of the derived signature."""
    idents = []
    for g in generators:
        idents.append(ex.parse(g, derived_sig) if isinstance(g, str) else g)
    gen_variety = VarietyPresentation(
        f"_generated_{abs(hash(tuple(map(str, generators)))) % 10**8}",
        derived_sig, tuple(idents))
    cons = ctx.consequences(gen_variety, found.degree)
    if found.ncols != cons.ncols:
        raise ValueError("ambient mismatch between found space and generators")
    return same_span(found, cons)
