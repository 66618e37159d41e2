"""Independent brute-force consequence oracle.

Deliberately primitive, sharing no machinery with the package: its own
monomial enumeration, its own exhaustive lifting (every row, every slot,
every permutation -- no interleaved echelonization, no coset tricks), and
dense rational Gaussian elimination.  Usable up to degree 4.
"""

import itertools
from fractions import Fraction


def monomials(n):
    """All planar multilinear monomials on labels 1..n as nested tuples."""

    def trees(labels):
        if len(labels) == 1:
            yield labels[0]
            return
        for k in range(1, len(labels)):
            for left in itertools.combinations(labels, k):
                right = tuple(x for x in labels if x not in left)
                for lt in trees(left):
                    for rt in trees(right):
                        yield (0, lt, rt)

    return sorted(trees(tuple(range(1, n + 1))), key=repr)


def tree_degree(t):
    if isinstance(t, int):
        return 1
    return tree_degree(t[1]) + tree_degree(t[2])


def relabel(t, perm):
    if isinstance(t, int):
        return perm[t]
    return (0, relabel(t[1], perm), relabel(t[2], perm))


def replace_leaf(t, leaf, repl):
    if isinstance(t, int):
        return repl if t == leaf else t
    return (0, replace_leaf(t[1], leaf, repl), replace_leaf(t[2], leaf, repl))


def poly_relabel(poly, perm):
    out = {}
    for t, c in poly.items():
        key = relabel(t, perm)
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


def expand(node):
    """Expression AST (from nialg.expr) -> {tree: Fraction} with 1-based
    labels assigned by sorted variable name; multilinear input only."""
    from nialg import expr as ex

    names = ex.variables(node)
    label = {v: i + 1 for i, v in enumerate(names)}

    def walk(n):
        if isinstance(n, ex.Var):
            return {label[n.name]: Fraction(1)}
        if isinstance(n, ex.Scal):
            return {t: c * n.coef for t, c in walk(n.sub).items()}
        if isinstance(n, ex.Sum):
            out = {}
            for term in n.terms:
                for t, c in walk(term).items():
                    out[t] = out.get(t, 0) + c
            return {k: v for k, v in out.items() if v}
        out = {}
        for lt, lc in walk(n.left).items():
            for rt, rc in walk(n.right).items():
                key = (0, lt, rt)
                out[key] = out.get(key, 0) + lc * rc
        return {k: v for k, v in out.items() if v}

    return walk(node)


def consequence_rows(identity_polys, n):
    """Every multilinear consequence row up to degree n, exhaustively."""
    by_degree = {}
    for poly in identity_polys:
        d = tree_degree(next(iter(poly)))
        by_degree.setdefault(d, []).append(poly)
    rows = {d: [] for d in range(1, n + 1)}
    for d in range(1, n + 1):
        seeds = []
        for poly in by_degree.get(d, []):
            for images in itertools.permutations(range(1, d + 1)):
                perm = {i + 1: images[i] for i in range(d)}
                seeds.append(poly_relabel(poly, perm))
        lifted = []
        for row in rows.get(d - 1, []):
            new = d
            variants = []
            variants.append({(0, t, new): c for t, c in row.items()})
            variants.append({(0, new, t): c for t, c in row.items()})
            for slot in range(1, d):
                variants.append({replace_leaf(t, slot, (0, slot, new)): c
                                 for t, c in row.items()})
                variants.append({replace_leaf(t, slot, (0, new, slot)): c
                                 for t, c in row.items()})
            for var in variants:
                for images in itertools.permutations(range(1, d + 1)):
                    perm = {i + 1: images[i] for i in range(d)}
                    lifted.append(poly_relabel(var, perm))
        # dedupe exact duplicates to keep the dense elimination tractable
        seen = set()
        out = []
        for row in seeds + lifted:
            key = tuple(sorted((repr(t), c) for t, c in row.items()))
            if key and key not in seen:
                seen.add(key)
                out.append(row)
        rows[d] = out
    return rows[n]


def _reduce_dense(v, pivots):
    """Reduce a dense row against echelon rows sorted by leading column."""
    v = v[:]
    for col, prow in pivots:
        if v[col]:
            f = v[col]
            v = [a - f * b for a, b in zip(v, prow)]
    return v


def dense_echelon(vectors, ncols):
    pivots = []
    for v in vectors:
        v = _reduce_dense(v, pivots)
        lead = next((i for i in range(ncols) if v[i]), None)
        if lead is None:
            continue
        inv = Fraction(1, 1) / v[lead]
        pivots.append((lead, [x * inv for x in v]))
        pivots.sort(key=lambda p: p[0])
    return pivots


class BruteForceSpace:
    """Dense model of the degree-n consequence space of a few identities."""

    def __init__(self, identity_texts, n, sig=None):
        from nialg import expr as ex
        from nialg.magma import ONE_OP

        sig = sig or ONE_OP
        polys = [expand(ex.parse(s, sig)) for s in identity_texts]
        self.n = n
        self.monomials = monomials(n)
        self.index = {t: i for i, t in enumerate(self.monomials)}
        rows = consequence_rows(polys, n)
        self.pivots = dense_echelon([self._vec(r) for r in rows],
                                    len(self.monomials))
        self.rank = len(self.pivots)

    def _vec(self, poly):
        v = [Fraction(0)] * len(self.monomials)
        for t, c in poly.items():
            v[self.index[t]] += c
        return v

    def contains(self, poly) -> bool:
        return not any(_reduce_dense(self._vec(poly), self.pivots))
