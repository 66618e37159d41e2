"""Multilinear monomials over a signature of binary operations.

A monomial is a planar binary tree: leaves are 1-based variable indices
(plain ints), internal nodes are tuples ``(op_index, left, right)``.
Operations may be declared symmetric or antisymmetric, in which case
monomials are kept in a canonical form (children ordered, signs tracked).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

SYMMETRIES = ("none", "symmetric", "antisymmetric")


class SignatureError(ValueError):
    pass


class MultilinearityError(ValueError):
    pass


@dataclass(frozen=True)
class OpSpec:
    name: str
    symmetry: str = "none"

    def __post_init__(self):
        if self.symmetry not in SYMMETRIES:
            raise SignatureError(f"unknown symmetry {self.symmetry!r}")


@dataclass(frozen=True)
class Signature:
    """An ordered list of binary operations with symmetry types."""

    ops: tuple

    def __post_init__(self):
        if not self.ops:
            raise SignatureError("signature needs at least one operation")
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise SignatureError("duplicate operation names")

    @staticmethod
    def make(*specs) -> "Signature":
        return Signature(tuple(OpSpec(name, sym) for name, sym in specs))

    def op_index(self, name: str) -> int:
        for i, op in enumerate(self.ops):
            if op.name == name:
                return i
        raise SignatureError(f"unknown operation {name!r}")

    def has_op(self, name: str) -> bool:
        return any(op.name == name for op in self.ops)

    @property
    def is_plain(self) -> bool:
        """True when no operation carries a symmetry (canonical form = identity)."""
        return all(op.symmetry == "none" for op in self.ops)


ONE_OP = Signature.make(("*", "none"))
POLARIZED = Signature.make(("[]", "antisymmetric"), ("{}", "symmetric"))


def is_leaf(t) -> bool:
    return isinstance(t, int)


def degree(t) -> int:
    if is_leaf(t):
        return 1
    return degree(t[1]) + degree(t[2])


def leaves(t) -> list:
    if is_leaf(t):
        return [t]
    return leaves(t[1]) + leaves(t[2])


def tree_key(t):
    """Total order key on trees.

    Compound subtrees sort before leaves (higher degree first), ties broken
    by operation rank, then children recursively, then leaf labels ascending.
    This makes e.g. [x1,x2] and [[x1,x2],x3] canonical.
    """
    if is_leaf(t):
        return (-1, t)
    return (-degree(t), t[0], tree_key(t[1]), tree_key(t[2]))


def _canon(sig: Signature, t):
    """Canonical form of a tree; returns (tree, sign) or None for zero."""
    if is_leaf(t):
        return t, 1
    op, l, r = t
    cl = _canon(sig, l)
    if cl is None:
        return None
    cr = _canon(sig, r)
    if cr is None:
        return None
    l, sl = cl
    r, sr = cr
    sign = sl * sr
    sym = sig.ops[op].symmetry
    if sym != "none":
        kl, kr = tree_key(l), tree_key(r)
        if kl == kr:
            if sym == "antisymmetric":
                return None
        elif kl > kr:
            l, r = r, l
            if sym == "antisymmetric":
                sign = -sign
    return (op, l, r), sign


def canonicalize(sig: Signature, t):
    """Canonicalize a monomial: returns (tree, +-1) or None for the zero monomial.

    Repeated variables are rejected unless the antisymmetric-diagonal rule
    already kills the monomial.
    """
    res = _canon(sig, t)
    if res is None:
        return None
    lv = leaves(res[0])
    if len(set(lv)) != len(lv):
        raise MultilinearityError(f"repeated variable in monomial {t!r}")
    return res


def relabel(t, mapping):
    if is_leaf(t):
        return mapping[t]
    return (t[0], relabel(t[1], mapping), relabel(t[2], mapping))


def mirror(t):
    """Swap children at every node (left-normed <-> right-normed)."""
    if is_leaf(t):
        return t
    return (t[0], mirror(t[2]), mirror(t[1]))


def _gen_trees(sig: Signature, labels: tuple):
    if len(labels) == 1:
        yield labels[0]
        return
    n = len(labels)
    for k in range(1, n):
        for left_set in itertools.combinations(labels, k):
            right_set = tuple(x for x in labels if x not in left_set)
            for lt in _gen_trees(sig, left_set):
                for rt in _gen_trees(sig, right_set):
                    for op in range(len(sig.ops)):
                        yield (op, lt, rt)


def enumerate_canonical(sig: Signature, n: int) -> list:
    """All canonical multilinear monomials on x1..xn, sorted by tree_key."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    seen = set()
    out = []
    for t in _gen_trees(sig, tuple(range(1, n + 1))):
        res = _canon(sig, t)
        if res is None:
            continue
        ct = res[0]
        if ct not in seen:
            seen.add(ct)
            out.append(ct)
    out.sort(key=tree_key)
    return out


class MonomialTable:
    """Interned canonical monomials of one (signature, degree).

    ``trees[i]`` is the i-th canonical monomial, ``index`` maps tree -> id.
    Built once and shared read-only.
    """

    def __init__(self, sig: Signature, n: int):
        self.sig = sig
        self.n = n
        self.trees = enumerate_canonical(sig, n)
        self.index = {t: i for i, t in enumerate(self.trees)}

    def __len__(self):
        return len(self.trees)


_TABLE_CACHE: dict = {}


def monomial_table(sig: Signature, n: int) -> MonomialTable:
    key = (sig, n)
    tab = _TABLE_CACHE.get(key)
    if tab is None:
        tab = MonomialTable(sig, n)
        _TABLE_CACHE[key] = tab
    return tab


def act_tree(sig: Signature, perm: dict, t):
    """Apply a variable relabeling and recanonicalize; None for zero."""
    return canonicalize(sig, relabel(t, perm))


def act_poly(sig: Signature, perm, poly: dict) -> dict:
    """Apply a permutation to a polynomial given as {tree: coeff}.

    ``perm`` maps old label -> new label and must cover every leaf.
    """
    out = {}
    for t, c in poly.items():
        res = act_tree(sig, perm, t)
        if res is None:
            continue
        ct, sign = res
        val = out.get(ct, 0) + sign * c
        if val:
            out[ct] = val
        else:
            out.pop(ct, None)
    return out


def perm_of_cycle(n: int, cycle: tuple) -> dict:
    """Permutation of {1..n} given by one cycle, as a mapping dict."""
    perm = {i: i for i in range(1, n + 1)}
    for i, x in enumerate(cycle):
        perm[x] = cycle[(i + 1) % len(cycle)]
    return perm


def all_perms(n: int):
    for images in itertools.permutations(range(1, n + 1)):
        yield {i + 1: images[i] for i in range(n)}


def poly_add(acc: dict, poly: dict, scale=1):
    for t, c in poly.items():
        val = acc.get(t, 0) + scale * c
        if val:
            acc[t] = val
        else:
            acc.pop(t, None)
    return acc


def poly_canonicalize(sig: Signature, poly: dict) -> dict:
    out = {}
    for t, c in poly.items():
        res = canonicalize(sig, t)
        if res is None:
            continue
        ct, sign = res
        val = out.get(ct, 0) + sign * c
        if val:
            out[ct] = val
        else:
            out.pop(ct, None)
    return out


def format_tree(sig: Signature, t) -> str:
    """Print a monomial in the expression grammar (e.g. ``((x1*x2)*x3)*x4``)."""
    if is_leaf(t):
        return f"x{t}"
    op = sig.ops[t[0]]
    l, r = format_tree(sig, t[1]), format_tree(sig, t[2])
    if op.name == "[]":
        return f"[{l},{r}]"
    if op.name == "{}":
        return f"{{{l},{r}}}"
    if op.name == "*":
        lf = l if is_leaf(t[1]) else f"({l})"
        rf = r if is_leaf(t[2]) else f"({r})"
        return f"{lf}*{rf}"
    return f"{op.name}({l},{r})"


def format_poly(sig: Signature, poly: dict) -> str:
    if not poly:
        return "0"
    items = sorted(poly.items(), key=lambda kv: tree_key(kv[0]))
    parts = []
    for t, c in items:
        c = Fraction(c)
        term = format_tree(sig, t)
        if c == 1:
            s = term
        elif c == -1:
            s = f"-{term}"
        else:
            s = f"{c}*{term}"
        if parts and not s.startswith("-"):
            parts.append("+ " + s)
        elif parts:
            parts.append("- " + s[1:])
        else:
            parts.append(s)
    return " ".join(parts)
