"""Rewriting systems and normal-form bases for the three dual varieties.

Families:
  a1 -- alternative + left-commutative      (basis: left-normed, sorted prefix,
                                             with exceptional sets at degrees 3-4)
  b1 -- assosymmetric + left-commutative    (basis: left-normed sorted prefix
                                             plus one outer-multiplied form)
  a2 -- alternative + (ab)c = (ba)c         (basis: left-normed sorted prefix,
                                             exceptional set at degree 3)

Every rule is an identity of the corresponding dual variety (checked by
``rule_soundness``); each reduction therefore stays in the same class modulo
the consequence space, which is what ``verify_basis`` certifies.  Low degrees
where the bases are irregular are handled by table rules computed from the
exact consequence echelon with basis monomials ordered last, so the pivots
come out exactly on the non-basis monomials.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .library import DUALS, FAMILIES
from .linalg import PRIMES, order_from_ranking, rref
from .magma import ONE_OP, is_leaf, leaves, monomial_table, tree_key
from .variety import Context, DegreeError

FAMILY_NAMES = ("a1", "b1", "a2")

# degrees whose basis sets are irregular and normalized by table lookup
TABLE_DEGREES = {"a1": (3, 4), "b1": (3,), "a2": (3,)}

STEP_LIMIT = 20000


class RewriteError(RuntimeError):
    pass


def dual_variety(family: str) -> str:
    if family not in FAMILY_NAMES:
        raise ValueError(f"unknown family {family!r}")
    return DUALS[FAMILIES[family]]


# ---------- basis sets ----------

def _left_normed(seq) -> tuple:
    t = seq[0]
    for x in seq[1:]:
        t = (0, t, x)
    return t


def enumerate_basis(family: str, n: int) -> list:
    """The catalogued normal-form monomials on x1..xn, as trees."""
    if family not in FAMILY_NAMES:
        raise ValueError(f"unknown family {family!r}")
    if n < 1:
        raise DegreeError("degree must be >= 1")
    if n == 1:
        return [1]
    if n == 2:
        return [(0, 1, 2), (0, 2, 1)]
    labels = list(range(1, n + 1))
    sorted_prefix = []
    for last in labels:
        rest = [x for x in labels if x != last]
        sorted_prefix.append(_left_normed(rest + [last]))
    if family == "a1":
        if n == 3:
            return [_left_normed([1, 2, 3]), _left_normed([1, 3, 2]),
                    _left_normed([2, 1, 3]), (0, 3, (0, 2, 1))]
        if n == 4:
            return [_left_normed([1, 2, 3, 4]), _left_normed([1, 2, 4, 3]),
                    _left_normed([1, 3, 4, 2]), _left_normed([2, 1, 3, 4]),
                    _left_normed([2, 3, 4, 1])]
        return sorted_prefix
    if family == "b1":
        outer = (0, n, _left_normed(labels[:-1]))
        return sorted_prefix + [outer]
    # a2
    if n == 3:
        return [_left_normed([1, 2, 3]), _left_normed([1, 3, 2]),
                (0, 3, (0, 1, 2)), (0, 3, (0, 2, 1))]
    return sorted_prefix


def basis_size_formula(family: str, n: int) -> int:
    """Closed-form basis sizes per family."""
    small = {"a1": [1, 2, 4, 5], "b1": [1, 2], "a2": [1, 2, 4]}[family]
    if n <= len(small):
        return small[n - 1]
    return n + 1 if family == "b1" else n


# ---------- patterns and rules ----------

def match(pattern, tree, binding: dict):
    """Structural match; metavariables are strings, leaves match leaves."""
    if isinstance(pattern, str):
        prev = binding.get(pattern)
        if prev is None:
            binding[pattern] = tree
            return True
        return prev == tree
    if isinstance(pattern, int):
        return tree == pattern
    if is_leaf(tree):
        return False
    if not match(pattern[1], tree[1], binding):
        return False
    return match(pattern[2], tree[2], binding)


def substitute(pattern, binding: dict):
    if isinstance(pattern, str):
        return binding[pattern]
    if isinstance(pattern, int):
        return pattern
    return (pattern[0], substitute(pattern[1], binding),
            substitute(pattern[2], binding))


def _compound(t) -> bool:
    return not is_leaf(t)


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: object
    rhs: tuple                      # ((coef, pattern), ...)
    guard: object = None            # callable(binding) -> bool
    identity_text: str | None = None  # certified via is_identity

    def apply(self, tree):
        """Match at the root of ``tree``; returns {tree: coef} or None."""
        binding = {}
        if not match(self.lhs, tree, binding):
            return None
        if self.guard is not None and not self.guard(binding):
            return None
        out = {}
        for coef, pat in self.rhs:
            t = substitute(pat, binding)
            out[t] = out.get(t, 0) + coef
        return {t: c for t, c in out.items() if c}


def _k(x):
    return tree_key(x)


H = Fraction(1, 2)
ONE = Fraction(1)


def family_rules(family: str) -> tuple:
    """The oriented rule list (low-degree tables excluded)."""
    P = lambda l, r: (0, l, r)
    if family == "a1":
        return (
            # a(bc) = 1/2 (ba)c + 1/2 (ab)c
            Rule("half-zinbiel", P("a", P("b", "c")),
                 ((H, P(P("b", "a"), "c")), (H, P(P("a", "b"), "c"))),
                 identity_text="a*(b*c) - 1/2*((b*a)*c + (a*b)*c) = 0"),
            # ((ba)c)d = ((ac)b)d, oriented to lower the prefix word
            Rule("rot123", P(P(P("b", "a"), "c"), "d"),
                 ((ONE, P(P(P("a", "c"), "b"), "d")),),
                 guard=lambda b: (_k(b["a"]), _k(b["c"]), _k(b["b"]))
                 < (_k(b["b"]), _k(b["a"]), _k(b["c"])),
                 identity_text="((b*a)*c)*d - ((a*c)*b)*d = 0"),
            # (((ab)c)d)e = (((ac)b)d)e
            Rule("swap23", P(P(P(P("a", "b"), "c"), "d"), "e"),
                 ((ONE, P(P(P(P("a", "c"), "b"), "d"), "e")),),
                 guard=lambda b: _k(b["c"]) < _k(b["b"]),
                 identity_text="(((a*b)*c)*d)*e - (((a*c)*b)*d)*e = 0"),
            # (((ab)c)d)e = (((ab)d)c)e
            Rule("swap34", P(P(P(P("a", "b"), "c"), "d"), "e"),
                 ((ONE, P(P(P(P("a", "b"), "d"), "c"), "e")),),
                 guard=lambda b: _k(b["d"]) < _k(b["c"]),
                 identity_text="(((a*b)*c)*d)*e - (((a*b)*d)*c)*e = 0"),
        )
    if family == "b1":
        return (
            # (ab)c = (ba)c, orients pairs and pulls compounds left
            Rule("first-comm", P(P("a", "b"), "c"),
                 ((ONE, P(P("b", "a"), "c")),),
                 guard=lambda b: _k(b["b"]) < _k(b["a"]),
                 identity_text="(a*b)*c - (b*a)*c = 0"),
            # ((ab)c)d = ((ac)b)d
            Rule("swap23", P(P(P("a", "b"), "c"), "d"),
                 ((ONE, P(P(P("a", "c"), "b"), "d")),),
                 guard=lambda b: _k(b["c"]) < _k(b["b"]),
                 identity_text="((a*b)*c)*d - ((a*c)*b)*d = 0"),
            # d(c(ab)) = 2d((ab)c) + ((ac)d)b - 2((ab)d)c
            Rule("unnest", P("d", P("c", P("a", "b"))),
                 ((Fraction(2), P("d", P(P("a", "b"), "c"))),
                  (ONE, P(P(P("a", "c"), "d"), "b")),
                  (Fraction(-2), P(P(P("a", "b"), "d"), "c"))),
                 guard=lambda b: is_leaf(b["c"]),
                 identity_text="d*(c*(a*b)) - 2*(d*((a*b)*c))"
                               " - ((a*c)*d)*b + 2*(((a*b)*d)*c) = 0"),
            # d((ac)b) = d((ab)c) + ((ac)d)b - ((ab)d)c
            Rule("inner-sort", P("d", P(P("a", "c"), "b")),
                 ((ONE, P("d", P(P("a", "b"), "c"))),
                  (ONE, P(P(P("a", "c"), "d"), "b")),
                  (Fraction(-1), P(P(P("a", "b"), "d"), "c"))),
                 guard=lambda b: _k(b["b"]) < _k(b["c"]),
                 identity_text="d*((a*c)*b) - d*((a*b)*c)"
                               " - ((a*c)*d)*b + ((a*b)*d)*c = 0"),
            # c((ad)b) = d((ac)b)
            Rule("outer-swap", P("c", P(P("a", "d"), "b")),
                 ((ONE, P("d", P(P("a", "c"), "b"))),),
                 guard=lambda b: _k(b["c"]) < _k(b["d"]),
                 identity_text="c*((a*d)*b) - d*((a*c)*b) = 0"),
            # inner-sort then outer-swap, composed: extracts a maximal last
            # slot past a smaller outer factor in one step (avoids the
            # inverse pair that staging alone would create)
            Rule("outer-extract", P("d", P(P("a", "c"), "b")),
                 ((ONE, P("b", P(P("a", "d"), "c"))),
                  (ONE, P(P(P("a", "c"), "d"), "b")),
                  (Fraction(-1), P(P(P("a", "b"), "d"), "c"))),
                 guard=lambda b: _k(b["b"]) > _k(b["c"])
                 and _k(b["b"]) > _k(b["d"]),
                 identity_text="d*((a*c)*b) - b*((a*d)*c)"
                               " - ((a*c)*d)*b + ((a*b)*d)*c = 0"),
            # left-commutativity, oriented to move compounds out of the
            # left-multiplication position
            Rule("left-comm", P("a", P("b", "c")),
                 ((ONE, P("b", P("a", "c"))),),
                 guard=lambda b: _compound(b["a"]) and is_leaf(b["b"]),
                 identity_text="a*(b*c) - b*(a*c) = 0"),
            # associator symmetric in the last two arguments (spinalization)
            Rule("spin", P("a", P("b", "c")),
                 ((ONE, P(P("a", "b"), "c")),
                  (Fraction(-1), P(P("a", "c"), "b")),
                  (ONE, P("a", P("c", "b")))),
                 guard=lambda b: _compound(b["a"]) and _compound(b["b"])
                 and is_leaf(b["c"]),
                 identity_text="a*(b*c) - (a*b)*c + (a*c)*b - a*(c*b) = 0"),
        )
    # a2
    return (
        Rule("first-comm", P(P("a", "b"), "c"),
             ((ONE, P(P("b", "a"), "c")),),
             guard=lambda b: _k(b["b"]) < _k(b["a"]),
             identity_text="(a*b)*c - (b*a)*c = 0"),
        # ((ab)c)d = ((ac)b)d
        Rule("swap23", P(P(P("a", "b"), "c"), "d"),
             ((ONE, P(P(P("a", "c"), "b"), "d")),),
             guard=lambda b: _k(b["c"]) < _k(b["b"]),
             identity_text="((a*b)*c)*d - ((a*c)*b)*d = 0"),
        # d((ab)c) = ((ab)d)c
        Rule("push-in", P("d", P(P("a", "b"), "c")),
             ((ONE, P(P(P("a", "b"), "d"), "c")),),
             identity_text="d*((a*b)*c) - ((a*b)*d)*c = 0"),
        # d(c(ab)) = ((ac)d)b
        Rule("unnest", P("d", P("c", P("a", "b"))),
             ((ONE, P(P(P("a", "c"), "d"), "b")),),
             identity_text="d*(c*(a*b)) - ((a*c)*d)*b = 0"),
        # (a1a2)(bc) = (b(a1a2))c, derived from the left-alternative law
        # and push-in; needs a compound left factor
        Rule("left-wrap", P(P("a1", "a2"), P("b", "c")),
             ((ONE, P(P("b", P("a1", "a2")), "c")),),
             identity_text="(a*b)*(c*d) - (c*(a*b))*d = 0"),
    )


# ---------- rewrite systems ----------

@dataclass
class RewriteSystem:
    family: str
    rules: tuple
    tables: dict                    # degree -> {std tree: {std tree: coef}}
    basis_sets: dict = field(default_factory=dict)

    def basis_on(self, labels) -> list:
        """Basis monomials instantiated on an arbitrary label tuple."""
        n = len(labels)
        mapping = {i + 1: labels[i] for i in range(n)}
        return [_relabel(t, mapping) for t in self.basis(n)]

    def basis(self, n: int) -> list:
        got = self.basis_sets.get(n)
        if got is None:
            got = enumerate_basis(self.family, n)
            self.basis_sets[n] = got
        return got


def _relabel(t, mapping):
    if is_leaf(t):
        return mapping[t]
    return (0, _relabel(t[1], mapping), _relabel(t[2], mapping))


def _std_form(t):
    """Relabel to 1..n by sorted label order; returns (std tree, inverse)."""
    lv = sorted(leaves(t))
    fwd = {x: i + 1 for i, x in enumerate(lv)}
    inv = {i + 1: x for i, x in enumerate(lv)}
    return _relabel(t, fwd), inv


_SYSTEMS: dict = {}


def rewrite_system(ctx: Context, family: str) -> RewriteSystem:
    # tables are determined by the dual presentation, not by the context
    dual = ctx.variety(dual_variety(family))
    key = (family, dual.identities)
    sys = _SYSTEMS.get(key)
    if sys is None:
        tables = {d: _normal_form_table(ctx, family, d)
                  for d in TABLE_DEGREES[family]}
        sys = RewriteSystem(family, family_rules(family), tables)
        _SYSTEMS[key] = sys
    return sys


def _normal_form_table(ctx: Context, family: str, degree: int) -> dict:
    """Rewrites for every non-basis monomial of an irregular degree, read off
    the consequence echelon with basis monomials ordered last."""
    dual = dual_variety(family)
    tab = monomial_table(ONE_OP, degree)
    basis = enumerate_basis(family, degree)
    basis_ids = [tab.index[t] for t in basis]
    basis_set = set(basis_ids)
    ranked = [i for i in range(len(tab)) if i not in basis_set] + basis_ids
    order = order_from_ranking(f"{family}-basis-last-{degree}", ranked)
    cons = ctx.consequences(dual, degree)
    space = rref(cons.rows, len(tab), sig=ONE_OP, degree=degree, order=order)
    if sorted(space.pivots) != sorted(set(range(len(tab))) - basis_set):
        raise RewriteError(
            f"{family}: catalogued degree-{degree} basis is not a complement "
            "of the consequence space")
    table = {}
    for row, piv in zip(space.rows, space.pivots):
        out = {tab.trees[c]: -v for c, v in row.items() if c != piv}
        table[tab.trees[piv]] = out
    return table


# ---------- deterministic normalization ----------

class Normalizer:
    """Bottom-up normal forms with caching.

    Every expansion below is a literal instance of one of the family's rules
    (or a table row), so input - output stays in the T-ideal; the permutation
    shortcuts (prefix sorting) compose the coefficient-one swap rules only.
    """

    def __init__(self, ctx: Context, family: str):
        self.ctx = ctx
        self.family = family
        self.system = rewrite_system(ctx, family)
        self._cache = {}
        self._steps = 0

    def _tick(self):
        self._steps += 1
        if self._steps > STEP_LIMIT * 100:
            raise RewriteError(
                f"{self.family}: rewriting exceeded the step bound")

    def normal_form(self, tree) -> dict:
        """Normal form of a monomial, as {basis tree: coefficient}."""
        self._steps = 0
        return self._nf(tree)

    def normal_form_poly(self, poly: dict) -> dict:
        self._steps = 0
        out = {}
        for t, c in poly.items():
            _acc(out, self._nf(t), c)
        return out

    def _nf(self, tree) -> dict:
        if is_leaf(tree):
            return {tree: ONE}
        hit = self._cache.get(tree)
        if hit is not None:
            return hit
        out = self._mul(self._nf(tree[1]), self._nf(tree[2]))
        self._cache[tree] = out
        return out

    def _mul(self, pa: dict, pb: dict) -> dict:
        """Product of two normal polynomials, renormalized."""
        out = {}
        for tu, cu in pa.items():
            for tv, cv in pb.items():
                _acc(out, self._top(tu, tv), cu * cv)
        return out

    def _one(self, t) -> dict:
        return {t: ONE}

    def _top(self, u, v) -> dict:
        """Normal form of u*v for already-normal monomials u, v."""
        self._tick()
        t = (0, u, v)
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        out = self._top_raw(u, v)
        self._cache[t] = out
        return out

    def _table_lookup(self, t):
        table = self.system.tables.get(len(leaves(t)))
        if table is None:
            return None
        std, inv = _std_form(t)
        row = table.get(std)
        if row is None:
            return {t: ONE}   # already a basis monomial of this degree
        return {_relabel(t2, inv): c for t2, c in row.items()}

    def _top_raw(self, u, v) -> dict:
        t = (0, u, v)
        if len(leaves(t)) == 2:
            return {t: ONE}
        hit = self._table_lookup(t)
        if hit is not None:
            return hit
        if self.family == "a1":
            return self._top_a1(u, v)
        if self.family == "b1":
            return self._top_b1(u, v)
        return self._top_a2(u, v)

    def _sorted_prefix(self, u, v) -> dict:
        """u*v with v a leaf and u left-normed: sort all but the last leaf.

        Composes the family's coefficient-one adjacent swaps, which generate
        the full symmetric group on the prefix at these degrees.
        """
        seq = sorted(leaves(u)) + [v]
        return {_left_normed(seq): ONE}

    # -- alternative + left-commutative ------------------------------------

    def _top_a1(self, u, v) -> dict:
        if is_leaf(v):
            return self._sorted_prefix(u, v)
        # half-Zinbiel: u(v1 v2) -> 1/2 (v1 u) v2 + 1/2 (u v1) v2
        v1, v2 = v[1], v[2]
        a = self._mul(self._mul(self._one(v1), self._one(u)), self._one(v2))
        b = self._mul(self._mul(self._one(u), self._one(v1)), self._one(v2))
        return _combine((H, a), (H, b))

    # -- alternative + (ab)c = (ba)c ---------------------------------------

    def _top_a2(self, u, v) -> dict:
        if is_leaf(v):
            if is_leaf(u[2]):
                return self._sorted_prefix(u, v)
            # u = x_w(core) from the degree-3 set: first-comm pulls it left
            w, core = u[1], u[2]
            return self._mul(self._mul(self._one(core), self._one(w)),
                             self._one(v))
        v1, v2 = v[1], v[2]
        if not is_leaf(v1):
            # push-in: u((v1) v2) = ((v1) u) v2
            return self._mul(self._mul(self._one(v1), self._one(u)),
                             self._one(v2))
        if not is_leaf(v2):
            # unnest: u(v1 (ab)) = ((a v1) u) b
            a, b = v2[1], v2[2]
            return self._mul(
                self._mul(self._mul(self._one(a), self._one(v1)),
                          self._one(u)), self._one(b))
        # v = (y z) with both leaves; u is compound (degree >= 4 here)
        # left-wrap: (u)(y z) = (y u) z
        return self._mul(self._mul(self._one(v1), self._one(u)),
                         self._one(v2))

    # -- assosymmetric + left-commutative ----------------------------------

    def _top_b1(self, u, v) -> dict:
        if is_leaf(v):
            if is_leaf(u[2]):
                return self._sorted_prefix(u, v)
            # u = x_w(core): first-comm pulls the leaf right
            w, core = u[1], u[2]
            return self._mul(self._mul(self._one(core), self._one(w)),
                             self._one(v))
        v1, v2 = v[1], v[2]
        if is_leaf(v1) and not is_leaf(v2):
            # v = x_w(core): unnest d(c(ab)) = 2d((ab)c)+((ac)d)b-2((ab)d)c
            a, b = v2[1], v2[2]
            t1 = self._mul(self._one(u),
                           self._mul(self._mul(self._one(a), self._one(b)),
                                     self._one(v1)))
            t2 = self._mul(self._mul(self._mul(self._one(a), self._one(v1)),
                                     self._one(u)), self._one(b))
            t3 = self._mul(self._mul(self._mul(self._one(a), self._one(b)),
                                     self._one(u)), self._one(v1))
            return _combine((Fraction(2), t1), (ONE, t2), (Fraction(-2), t3))
        # v left-normed
        if not is_leaf(u):
            if is_leaf(v1):   # v = (y z), two leaves
                # left-commutativity: u(y z) = y(u z)
                return self._mul(self._one(v1),
                                 self._mul(self._one(u), self._one(v2)))
            # spin: u(v1 v2) = (u v1)v2 - (u v2)v1 + u(v2 v1), and the last
            # term continues with left-commutativity u(v2 v1) = v2(u v1)
            # (v2 is a leaf), which strictly shrinks the right factor
            t1 = self._mul(self._mul(self._one(u), self._one(v1)),
                           self._one(v2))
            t2 = self._mul(self._mul(self._one(u), self._one(v2)),
                           self._one(v1))
            t3 = self._mul(self._one(v2),
                           self._mul(self._one(u), self._one(v1)))
            return _combine((ONE, t1), (Fraction(-1), t2), (ONE, t3))
        return self._b1_outer(u, v)

    def _b1_outer(self, w, V) -> dict:
        """w*V with w a leaf and V left-normed: normalize toward the
        outer-multiplied basis form (largest label outside, core ascending).

        inner-sort carries correction tails; outer-swap is a plain exchange.
        """
        lv = leaves(V)
        q = lv[-1]
        prefix = lv[:-1]
        pmax = prefix[-1]
        Bp = _left_normed(prefix[:-1]) if len(prefix) > 1 else prefix[0]
        if q > pmax and w > q:
            return {(0, w, V): ONE}   # basis form
        if q > pmax:
            # stage: inner-sort moves q inward; then outer-swap extracts it
            # w((B' pmax) q) = w((B' q) pmax) + ((B' pmax) w) q - ((B' q) w) pmax
            # and w((B' q) pmax) = q((B' w) pmax) by outer-swap
            t1 = self._mul(self._one(q),
                           self._mul(self._mul(self._one(Bp), self._one(w)),
                                     self._one(pmax)))
            t2 = self._mul(self._mul(self._mul(self._one(Bp),
                                               self._one(pmax)),
                                     self._one(w)), self._one(q))
            t3 = self._mul(self._mul(self._mul(self._one(Bp), self._one(q)),
                                     self._one(w)), self._one(pmax))
            return _combine((ONE, t1), (ONE, t2), (Fraction(-1), t3))
        # q < pmax: plain inner-sort step toward an ascending core
        # w((B' pmax) q) = w((B' q) pmax) + ((B' pmax) w) q - ((B' q) w) pmax
        t1 = self._mul(self._one(w),
                       self._mul(self._mul(self._one(Bp), self._one(q)),
                                 self._one(pmax)))
        t2 = self._mul(self._mul(self._mul(self._one(Bp), self._one(pmax)),
                                 self._one(w)), self._one(q))
        t3 = self._mul(self._mul(self._mul(self._one(Bp), self._one(q)),
                                 self._one(w)), self._one(pmax))
        return _combine((ONE, t1), (ONE, t2), (Fraction(-1), t3))


def _acc(out: dict, poly: dict, scale=ONE):
    for t, c in poly.items():
        val = out.get(t, 0) + scale * c
        if val:
            out[t] = val
        else:
            out.pop(t, None)


def _combine(*scaled) -> dict:
    out = {}
    for coef, poly in scaled:
        _acc(out, poly, coef)
    return out


def normal_form(ctx: Context, family: str, tree_or_text) -> dict:
    """Normal form of a multilinear monomial over the family's basis."""
    tree = tree_or_text
    if isinstance(tree, str):
        from . import expr as ex
        from .variety import multilinearize
        node = ex.parse(tree, ONE_OP)
        polys = multilinearize(node, ONE_OP)
        if len(polys) != 1 or len(polys[0]) != 1:
            raise ValueError("expected a single monomial")
        ((tree, coef),) = polys[0].items()
        if coef != 1:
            raise ValueError("expected a monomial with coefficient 1")
    return Normalizer(ctx, family).normal_form(tree)


# ---------- generic engine (random application orders) ----------

def redexes(system: RewriteSystem, tree):
    """All (path, rule) pairs applicable in the tree.

    At the degrees whose basis sets are irregular the whole monomial is
    normalized by its table alone; the pattern rules activate only at the
    degrees where the sorting identities fully apply (this also keeps the
    exceptional basis monomials irreducible).
    """
    total = len(leaves(tree))
    if total in TABLE_DEGREES[system.family]:
        table = system.tables[total]
        std, _ = _std_form(tree)
        if std in table:
            return [((), ("table", total))]
        return []
    return _redexes_walk(system, tree, ())


def _redexes_walk(system: RewriteSystem, tree, path):
    out = []
    if not is_leaf(tree):
        deg = len(leaves(tree))
        table = system.tables.get(deg)
        if table is not None:
            std, _ = _std_form(tree)
            if std in table:
                out.append((path, ("table", deg)))
        for rule in system.rules:
            if rule.apply(tree) is not None:
                out.append((path, rule))
        out.extend(_redexes_walk(system, tree[1], path + (1,)))
        out.extend(_redexes_walk(system, tree[2], path + (2,)))
    return out


def _subtree(tree, path):
    for step in path:
        tree = tree[step]
    return tree


def _replace(tree, path, repl):
    if not path:
        return repl
    if path[0] == 1:
        return (tree[0], _replace(tree[1], path[1:], repl), tree[2])
    return (tree[0], tree[1], _replace(tree[2], path[1:], repl))


def apply_at(system: RewriteSystem, tree, path, rule) -> dict:
    sub = _subtree(tree, path)
    if isinstance(rule, tuple) and rule[0] == "table":
        std, inv = _std_form(sub)
        expansion = {_relabel(t, inv): c
                     for t, c in system.tables[rule[1]][std].items()}
    else:
        expansion = rule.apply(sub)
    return {_replace(tree, path, t): c for t, c in expansion.items()}


def rewrite_random(ctx: Context, family: str, tree, rng: random.Random,
                   max_steps: int = STEP_LIMIT) -> dict:
    """Reduce by picking uniformly among applicable (position, rule) pairs."""
    system = rewrite_system(ctx, family)
    poly = {tree: ONE}
    normal = {}
    steps = 0
    while poly:
        t, c = next(iter(poly.items()))
        del poly[t]
        reds = redexes(system, t)
        if not reds:
            val = normal.get(t, 0) + c
            if val:
                normal[t] = val
            else:
                normal.pop(t, None)
            continue
        steps += 1
        if steps > max_steps:
            raise RewriteError(
                f"{family}: random-order rewriting exceeded the step bound "
                f"(at {t!r})")
        path, rule = rng.choice(reds)
        for t2, c2 in apply_at(system, t, path, rule).items():
            val = poly.get(t2, 0) + c * c2
            if val:
                poly[t2] = val
            else:
                poly.pop(t2, None)
    return normal


# ---------- verification ----------

def rule_soundness(ctx: Context, family: str) -> dict:
    """Each rule, read as an identity, must hold in the dual variety."""
    dual = dual_variety(family)
    out = {}
    for rule in family_rules(family):
        out[rule.name] = ctx.is_identity(dual, rule.identity_text)
    return out


def random_monomial(n: int, rng: random.Random):
    labels = list(range(1, n + 1))
    rng.shuffle(labels)

    def build(lv):
        if len(lv) == 1:
            return lv[0]
        k = rng.randint(1, len(lv) - 1)
        return (0, build(lv[:k]), build(lv[k:]))

    return build(labels)


def unique_nf_check(ctx: Context, family: str, n: int, trials: int,
                    seed: int = 0) -> dict:
    """Random monomials x random application orders must agree with the
    deterministic normal form (a desk-scale local-confluence audit)."""
    rng = random.Random(seed)
    nrm = Normalizer(ctx, family)
    failures = []
    for trial in range(trials):
        tree = random_monomial(n, rng)
        expected = nrm.normal_form(tree)
        got = rewrite_random(ctx, family, tree, rng)
        if got != expected:
            failures.append({"monomial": tree, "expected": expected,
                             "got": got})
            if len(failures) >= 5:
                break
    return {"family": family, "degree": n, "trials": trials,
            "status": "pass" if not failures else "fail",
            "failures": failures}


def _conservation_ok(ctx: Context, family: str, tree, nf_poly: dict,
                     n: int) -> bool:
    """input - output must lie in the dual consequence space."""
    dual = dual_variety(family)
    tab = monomial_table(ONE_OP, n)
    diff = {tab.index[tree]: ONE}
    for t, c in nf_poly.items():
        i = tab.index[t]
        val = diff.get(i, 0) - c
        if val:
            diff[i] = val
        else:
            diff.pop(i, None)
    if not diff:
        return True
    if n <= 5:
        return ctx.consequences(dual, n).contains(diff)
    ok = True
    for p in PRIMES[:2]:
        chain = ctx._modp_chain(ctx.variety(dual), n, p)
        assert chain, "modular chain missing"
        stage = ctx._modp[(ctx.variety(dual).name,
                           ctx.variety(dual).identities, p)]["stages"][n][1]
        ok = ok and stage.contains_dict(diff)
    return ok


def verify_basis(ctx: Context, family: str, n: int,
                 spanning_only: bool = False,
                 conservation_sample: int | None = None) -> dict:
    """Check the catalogued basis at degree n.

    Full mode (n <= 6): every monomial reduces into basis support, the
    reduction difference lies in the consequence space, and the basis size
    equals the rank-computed dimension.  Spanning-only mode avoids the
    enumeration blow-up at degrees 7-8: since rewriting is closed under
    contexts, it suffices that every product of two basis monomials (on
    complementary label sets) reduces into basis support; induction over the
    degree then covers every monomial.
    """
    system = rewrite_system(ctx, family)
    basis = system.basis(n)
    report = {"family": family, "degree": n, "basis_size": len(basis),
              "mode": "spanning-only" if spanning_only else "full",
              "failures": []}
    nrm = Normalizer(ctx, family)
    if spanning_only:
        checked = 0
        labels = tuple(range(1, n + 1))
        for size in range(1, n):
            for S in itertools.combinations(labels, size):
                Sc = tuple(x for x in labels if x not in S)
                for u in system.basis_on(S):
                    for v in system.basis_on(Sc):
                        t = (0, u, v)
                        nf = nrm.normal_form(t)
                        checked += 1
                        if not set(nf) <= set(basis):
                            report["failures"].append(
                                {"monomial": t, "reason": "support"})
        report["checked_products"] = checked
        report["status"] = "pass" if not report["failures"] else "fail"
        return report
    dual = dual_variety(family)
    dim = ctx.dimension(dual, n)
    report["dimension"] = dim
    if len(basis) != dim:
        report["failures"].append(
            {"reason": f"basis size {len(basis)} != dimension {dim}"})
    tab = monomial_table(ONE_OP, n)
    basis_set = set(basis)
    step = 1
    total = len(tab.trees)
    if conservation_sample and conservation_sample < total:
        step = max(1, total // conservation_sample)
    for i, t in enumerate(tab.trees):
        nf = nrm.normal_form(t)
        if not set(nf) <= basis_set:
            report["failures"].append({"monomial": t, "reason": "support"})
            continue
        if i % step == 0 and not _conservation_ok(ctx, family, t, nf, n):
            report["failures"].append({"monomial": t,
                                       "reason": "conservation"})
    report["checked_monomials"] = total
    report["status"] = "pass" if not report["failures"] else "fail"
    return report
