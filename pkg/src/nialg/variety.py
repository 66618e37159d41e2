"""Variety presentations and the T-ideal consequence engine.

A variety is presented by a signature and a list of identities (each read as
``poly = 0``).  The degree-n multilinear component of its identity ideal is
generated iteratively: identities of degree m lift to degree m+1 by appending
a new variable on either side of every operation and by substituting
``x_i -> x_i o x_{m+1}`` / ``x_{m+1} o x_i`` in every slot, then closing under
the symmetric group action; transpositions ``(j, m+1)`` applied to liftings of
a permutation-closed basis suffice for the closure.

Dimensions come from ``#monomials - rank``; degrees 5..6 of one-operation
varieties default to the two-prime certified modular path, everything else is
exact.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from .linalg import (Echelonizer, ModpEchelon, PRIMES, RelationSpace,
                     clear_denominators, order_from_ranking)
from .magma import (Signature, act_poly, all_perms, canonicalize, is_leaf,
                    monomial_table, perm_of_cycle, poly_add, poly_canonicalize)

VARIETY_PATH_ENV = "NIALG_VARIETY_PATH"


class UnknownVariety(KeyError):
    pass


class SignatureMismatch(ValueError):
    pass


class DegreeError(ValueError):
    pass


class CertificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class VarietyPresentation:
    name: str
    signature: Signature
    identities: tuple  # expression ASTs, each read as "= 0"
    extends: str | None = None

    def with_parent(self, parent: "VarietyPresentation") -> "VarietyPresentation":
        if parent.signature != self.signature:
            raise SignatureMismatch(
                f"{self.name} extends {parent.name} with a different signature")
        return VarietyPresentation(self.name, self.signature,
                                   parent.identities + self.identities, None)


def _expand_terms(node) -> dict:
    """Expand an expression into {name-leaf tree: coefficient}."""
    if isinstance(node, ex.Var):
        return {node.name: Fraction(1)}
    if isinstance(node, ex.Scal):
        return {t: c * node.coef for t, c in _expand_terms(node.sub).items()}
    if isinstance(node, ex.Sum):
        out = {}
        for term in node.terms:
            poly_add(out, _expand_terms(term))
        return out
    # App: bilinear expansion
    left = _expand_terms(node.left)
    right = _expand_terms(node.right)
    out = {}
    for lt, lc in left.items():
        for rt, rc in right.items():
            key = (node.op, lt, rt)
            val = out.get(key, 0) + lc * rc
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _name_leaves(t, acc):
    if isinstance(t, str):
        acc.append(t)
    else:
        _name_leaves(t[1], acc)
        _name_leaves(t[2], acc)


def _substitute_occurrences(t, assignment, counters):
    """Replace named leaves by integer labels, one occurrence at a time."""
    if isinstance(t, str):
        idx = counters[t]
        counters[t] += 1
        return assignment[t][idx]
    return (t[0], _substitute_occurrences(t[1], assignment, counters),
            _substitute_occurrences(t[2], assignment, counters))


def _resolve_ops(sig: Signature, t):
    if not isinstance(t, tuple):
        return t
    return (sig.op_index(t[0]), _resolve_ops(sig, t[1]), _resolve_ops(sig, t[2]))


def multilinearize(identity, sig: Signature) -> list:
    """Full multilinearizations of an identity, one poly per multidegree.

    Repeated variables are replaced by sums of fresh ones and the component
    of multidegree (1,...,1) is kept; over characteristic 0 this generates
    the same T-ideal.
    """
    terms = _expand_terms(identity)
    groups = {}
    for t, c in terms.items():
        names = []
        _name_leaves(t, names)
        key = tuple(sorted((v, names.count(v)) for v in set(names)))
        groups.setdefault(key, {})[t] = c
    out = []
    for key, group in sorted(groups.items()):
        counts = dict(key)
        names = sorted(counts)
        labels = {}
        next_label = 1
        for v in names:
            labels[v] = list(range(next_label, next_label + counts[v]))
            next_label += counts[v]
        poly = {}
        perm_choices = [list(itertools.permutations(labels[v])) for v in names]
        for combo in itertools.product(*perm_choices):
            assignment = {v: list(p) for v, p in zip(names, combo)}
            for t, c in group.items():
                counters = {v: 0 for v in names}
                it = _substitute_occurrences(t, assignment, counters)
                it = _resolve_ops(sig, it)
                res = canonicalize(sig, it)
                if res is None:
                    continue
                ct, sign = res
                val = poly.get(ct, 0) + sign * c
                if val:
                    poly[ct] = val
                else:
                    poly.pop(ct, None)
        if poly:
            out.append(poly)
    return out


def _replace_leaf(t, label, repl):
    if is_leaf(t):
        return repl if t == label else t
    return (t[0], _replace_leaf(t[1], label, repl),
            _replace_leaf(t[2], label, repl))


def lift_maps(sig: Signature, m: int):
    """Tree maps lifting degree-m monomials to degree m+1 (new label m+1)."""
    new = m + 1
    maps = []
    for op in range(len(sig.ops)):
        maps.append(lambda t, op=op: (op, t, new))
        maps.append(lambda t, op=op: (op, new, t))
        for slot in range(1, m + 1):
            maps.append(lambda t, op=op, s=slot: _replace_leaf(t, s, (op, s, new)))
            maps.append(lambda t, op=op, s=slot: _replace_leaf(t, s, (op, new, s)))
    return maps


def lift_basis_rows(sig: Signature, rows, m: int):
    """All liftings of degree-m rows, closed under (j, m+1) transpositions."""
    new = m + 1
    out = []
    for row in rows:
        for fn in lift_maps(sig, m):
            lifted = poly_canonicalize(sig, {fn(t): c for t, c in row.items()})
            if not lifted:
                continue
            out.append(lifted)
            for j in range(1, new):
                perm = perm_of_cycle(new, (j, new))
                img = act_poly(sig, perm, lifted)
                if img:
                    out.append(img)
    return out


class Context:
    """Variety registry plus consequence-space caches (read-mostly)."""

    def __init__(self, registry=None):
        if registry is None:
            from .library import builtin_registry
            registry = builtin_registry()
        self.registry = registry
        self._exact = {}
        self._modp = {}
        self._dims = {}
        self._idpolys = {}
        self._raw = {}

    def variety(self, v) -> VarietyPresentation:
        if isinstance(v, VarietyPresentation):
            return v
        try:
            return self.registry[v]
        except KeyError:
            raise UnknownVariety(v) from None

    # ---------- exact path ----------

    def _identity_polys(self, v: VarietyPresentation):
        key = (v.name, v.identities)
        hit = self._idpolys.get(key)
        if hit is None:
            hit = {}
            for identity in v.identities:
                for poly in multilinearize(identity, v.signature):
                    deg = len(_leaves_of_first(poly))
                    hit.setdefault(deg, []).append(poly)
            self._idpolys[key] = hit
        return hit

    def consequences(self, v, n: int) -> RelationSpace:
        """Exact echelonized span of all multilinear consequences in degree n."""
        v = self.variety(v)
        if n < 1:
            raise DegreeError("degree must be >= 1")
        key = (v.name, v.identities, n)
        hit = self._exact.get(key)
        if hit is not None:
            return hit
        sig = v.signature
        by_degree = self._identity_polys(v)
        min_deg = min(by_degree, default=n + 1)
        table = monomial_table(sig, n)
        if n < min_deg:
            space = RelationSpace(sig=sig, degree=n, ncols=len(table))
            self._exact[key] = space
            return space
        start = min_deg
        prev_rows = None
        for d in range(n - 1, min_deg - 1, -1):
            cached = self._exact.get((v.name, v.identities, d))
            if cached is not None:
                tab = monomial_table(sig, d)
                prev_rows = [_to_trees(r, tab) for r in cached.rows]
                start = d + 1
                break
        for d in range(start, n + 1):
            tab = monomial_table(sig, d)
            ech = Echelonizer(len(tab))
            if prev_rows is not None:
                for row in lift_basis_rows(sig, prev_rows, d - 1):
                    ech.insert(_to_ids(row, tab))
            for poly in by_degree.get(d, ()):
                for perm in all_perms(d):
                    img = act_poly(sig, perm, poly)
                    if img:
                        ech.insert(_to_ids(img, tab))
            srows, spivots = ech.sorted_rows()
            space = RelationSpace(sig=sig, degree=d, ncols=len(tab),
                                  rows=srows, pivots=spivots)
            self._exact[(v.name, v.identities, d)] = space
            prev_rows = [_to_trees(r, tab) for r in srows]
        return self._exact[key]

    # ---------- modular-certified path ----------

    def _base_orbit_rows(self, v: VarietyPresentation, d: int, tab):
        rows = []
        by_degree = self._identity_polys(v)
        for poly in by_degree.get(d, ()):
            for perm in all_perms(d):
                img = act_poly(v.signature, perm, poly)
                if img:
                    rows.append(_to_ids(img, tab))
        return rows

    def raw_rows(self, v, n: int):
        """Degree-n consequence generators as iterated one-step liftings of
        the defining identities, transposition-closed at every degree and
        deduplicated.  Rows come back as (ids, vals) integer matrices, one
        pair per generator nnz class; they are prime-independent.
        """
        v = self.variety(v)
        key = (v.name, v.identities, n)
        hit = self._raw.get(key)
        if hit is not None:
            return hit
        sig = v.signature
        if not sig.is_plain:
            raise ValueError("raw generation needs a symmetry-free signature")
        by_degree = self._identity_polys(v)
        min_deg = min(by_degree, default=n + 1)
        groups = []   # list of (ids matrix int32, vals matrix int64)
        if n < min_deg:
            self._raw[key] = []
            return []
        for d in range(min_deg, n + 1):
            if d > min_deg:
                src = monomial_table(sig, d - 1)
                dst = monomial_table(sig, d)
                lifts = [np.fromiter((dst.index[fn(t)] for t in src.trees),
                                     dtype=np.int64, count=len(src.trees))
                         for fn in lift_maps(sig, d - 1)]
                perms = []
                for j in range(1, d):
                    pm = perm_of_cycle(d, (j, d))
                    perms.append(np.fromiter(
                        (dst.index[_relabel_plain(t, pm)] for t in dst.trees),
                        dtype=np.int64, count=len(dst.trees)))
                new_groups = []
                for ids, vals in groups:
                    pieces = []
                    for lift in lifts:
                        lifted = lift[ids]
                        pieces.append(lifted)
                        pieces.extend(pm[lifted] for pm in perms)
                    allids = np.concatenate(pieces, axis=0)
                    allvals = np.tile(vals, (len(pieces), 1))
                    new_groups.append(_dedupe_rows(allids, allvals))
                groups = new_groups
            tab = monomial_table(sig, d)
            base = self._base_orbit_rows(v, d, tab)
            for nnz, rows in _group_rows_by_nnz(base).items():
                ids = np.array([r[0] for r in rows], dtype=np.int64)
                vals = np.array([r[1] for r in rows], dtype=np.int64)
                groups.append(_dedupe_rows(ids, vals))
        self._raw[key] = groups
        return groups

    # sparse walks longer than this defer the row to the dense-block pass
    # (a loose safety net: with checkpointed back-reduction, walks run at C
    # speed and deferring is the slower path)
    WALK_BUDGETS = (8, 64, 1024, 0)
    # re-reduce the basis to RREF every this many accepted pivots, so row
    # supports stay near 1 + (ncols - rank) and walks stay short
    RREF_CHECKPOINT = 400

    def _insert_raw_sorted(self, groups, ech: ModpEchelon,
                           back_start: int = 0) -> None:
        """Insert raw rows ordered by leading position; the basis block past
        ``back_start`` is kept close to reduced echelon form by periodic
        back-reduction, and rows whose sparse reduction walk exceeds the
        budget are absorbed in dense blocks at the end."""
        if not groups:
            return
        if ech._perm is None:
            leads = np.concatenate([ids.min(axis=1) for ids, _ in groups])
        else:
            leads = np.concatenate(
                [ech._perm[ids].min(axis=1) for ids, _ in groups])
        group_of = np.concatenate(
            [np.full(ids.shape[0], g, dtype=np.int64)
             for g, (ids, _) in enumerate(groups)])
        index_of = np.concatenate(
            [np.arange(ids.shape[0], dtype=np.int64) for ids, _ in groups])
        order = np.argsort(leads, kind="stable")
        import os as _os
        import time as _time
        _dbg = bool(_os.environ.get("NIALG_DEBUG_TIMING"))
        _t0 = _time.time()
        # budget escalation: cheap walks first, so that by the time the
        # expensive rows are retried the basis is saturated and reduced and
        # they die in a handful of eliminations
        pending = [(groups[group_of[k]], int(index_of[k]))
                   for k in order.tolist()]
        for budget in self.WALK_BUDGETS:
            if not pending:
                break
            deferred = []
            next_checkpoint = ech.rank + self.RREF_CHECKPOINT
            for gref, i in pending:
                ids, vals = gref
                if ech.insert(ids[i], vals[i], budget=budget) is None:
                    deferred.append((gref, i))
                elif ech.rank >= next_checkpoint:
                    ech.back_reduce(back_start)
                    next_checkpoint = ech.rank + self.RREF_CHECKPOINT
            if _dbg:
                print(f"  [cross] budget {budget}: rank {ech.rank}, "
                      f"defer {len(deferred)}, pool {ech.pool_used/1e6:.1f}M, "
                      f"{_time.time()-_t0:.1f}s", flush=True)
            if deferred:
                ech.back_reduce(back_start)
            pending = deferred
        if pending:
            if _dbg:
                print(f"  [cross] absorbing {len(pending)} deferred, "
                      f"{_time.time()-_t0:.1f}s", flush=True)
            ech.absorb_block([g[0][i] for g, i in pending],
                             [g[1][i] for g, i in pending])

    # lifted reduced-basis rows stay near 1+dim nonzeros; beyond this the
    # raw ultra-sparse generators win despite their count
    RAW_SUPPORT_CUTOFF = 64

    # below this degree the plain lifted-basis path is cheaper than the
    # product-compressed one
    COMPRESS_FROM_DEGREE = 5

    def _modp_chain(self, v: VarietyPresentation, n: int, p: int) -> dict:
        """Per-degree ranks of the consequence chain mod p (chain cached)."""
        key = (v.name, v.identities, p)
        state = self._modp.get(key)
        if state is None:
            state = {"ranks": {}, "stages": {}, "last": None, "partial": False}
            self._modp[key] = state
        ranks = state["ranks"]
        if ranks and max(ranks) >= n:
            return {d: r for d, r in ranks.items() if d <= n}
        sig = v.signature
        by_degree = self._identity_polys(v)
        min_deg = min(by_degree, default=n + 1)
        if n < min_deg:
            return {}
        start = min_deg if state["last"] is None else state["last"][0].n + 1
        if state["partial"] and start <= n:
            # the stored top stage fed nothing yet; residues need full RREF
            state["last"][1].back_reduce()
            state["partial"] = False
        for d in range(start, n + 1):
            tab = monomial_table(sig, d)
            if (sig.is_plain and d >= self.COMPRESS_FROM_DEGREE
                    and d > min_deg):
                ech = self._compressed_rank_modp(v, d, p, state)
                state["partial"] = True
            else:
                ech = ModpEchelon(len(tab), p)
                if state["last"] is not None:
                    ptab, pech = state["last"]
                    _insert_lifted_modp(sig, ptab, pech, tab, ech)
                for poly in by_degree.get(d, ()):
                    for perm in all_perms(d):
                        img = act_poly(sig, perm, poly)
                        if img:
                            ech.insert_dict(_to_ids(img, tab))
                ech.back_reduce()
                state["partial"] = False
            ranks[d] = ech.rank
            state["stages"][d] = (tab, ech)
            state["last"] = (tab, ech)
            if d < n and state["partial"]:
                ech.back_reduce()
                state["partial"] = False
        return {d: r for d, r in ranks.items() if d <= n}

    def _compressed_rank_modp(self, v: VarietyPresentation, d: int, p: int,
                              state: dict) -> ModpEchelon:
        """Consequence echelon at degree d using the product structure.

        The span of all product-form consequences (relation times monomial,
        at every root split) has an explicit reduced echelon basis: one row
        per monomial u*v where u or v is reducible, with tail the tensor of
        the lower-degree residues.  Those rows are seeded directly; only the
        substitution liftings (the "cross" relations) go through elimination,
        in the complement spanned by products of reduced monomials.
        """
        sig = v.signature
        tab = monomial_table(sig, d)
        nf_lists, residues = {}, {}
        for k in range(1, d):
            tk = monomial_table(sig, k)
            stage = state["stages"].get(k)
            ech_k = stage[1] if stage is not None else None
            nf_lists[k], residues[k] = _nf_data_modp(len(tk), ech_k, p)
        # compose grids per left label set, and the product-basis column set
        grids = {}
        nfnf = set()
        labels = tuple(range(1, d + 1))
        for size in range(1, d):
            tk = monomial_table(sig, size)
            tc = monomial_table(sig, d - size)
            for S in itertools.combinations(labels, size):
                Sc = tuple(x for x in labels if x not in S)
                lmap = {i + 1: S[i] for i in range(len(S))}
                rmap = {i + 1: Sc[i] for i in range(len(Sc))}
                g = np.empty((len(nf_lists[size]), len(nf_lists[d - size])),
                             dtype=np.int64)
                for a, ua in enumerate(nf_lists[size]):
                    ut = _relabel_plain(tk.trees[ua], lmap)
                    for b, vb in enumerate(nf_lists[d - size]):
                        vt = _relabel_plain(tc.trees[vb], rmap)
                        g[a, b] = tab.index[(0, ut, vt)]
                grids[S] = g
                nfnf.update(g.ravel().tolist())
        import os as _os
        import time as _time
        _dbg = bool(_os.environ.get("NIALG_DEBUG_TIMING"))
        _t0 = _time.time()
        ranked = ([i for i in range(len(tab)) if i not in nfnf]
                  + sorted(nfnf))
        order = order_from_ranking(f"split-compressed-{d}", ranked)
        back_start = len(tab) - len(nfnf)
        ech = ModpEchelon(len(tab), p, order)
        # seed the product-relation rows (already mutually reduced)
        for m_id, t in enumerate(tab.trees):
            if m_id in nfnf:
                continue
            u, w = t[1], t[2]
            S = tuple(sorted(leaves_of(u)))
            k = len(S)
            Sc = tuple(x for x in labels if x not in S)
            smap = {s: i + 1 for i, s in enumerate(S)}
            cmap = {s: i + 1 for i, s in enumerate(Sc)}
            tk = monomial_table(sig, k)
            tc = monomial_table(sig, d - k)
            ui = tk.index[_relabel_plain(u, smap)]
            wi = tc.index[_relabel_plain(w, cmap)]
            uidx, uvals = residues[k][ui]
            widx, wvals = residues[d - k][wi]
            tail_ids = grids[S][np.ix_(uidx, widx)].ravel()
            tail_vals = (p - (uvals[:, None] * wvals[None, :]) % p).ravel() % p
            ids = np.concatenate([np.array([m_id], dtype=np.int64), tail_ids])
            vals = np.concatenate([np.array([1], dtype=np.int64), tail_vals])
            ech.insert(ids, vals)
        if ech.rank != back_start:
            raise RuntimeError("product-relation seeding is inconsistent")
        if _dbg:
            print(f"[deg {d}] seeded {ech.rank} product rows, "
                  f"pool {ech.pool_used/1e6:.1f}M, {_time.time()-_t0:.1f}s",
                  flush=True)
            _t0 = _time.time()
        self._insert_raw_sorted(self.raw_rows(v, d), ech,
                                back_start=back_start)
        if _dbg:
            print(f"[deg {d}] cross done rank {ech.rank}, "
                  f"pool {ech.pool_used/1e6:.1f}M, {_time.time()-_t0:.1f}s",
                  flush=True)
        return ech

    def rank_certified(self, v, n: int, retries: int = 2) -> int:
        """Consequence rank with two-prime agreement at every degree."""
        v = self.variety(v)
        prime_pool = list(PRIMES)
        first = self._modp_chain(v, n, prime_pool[0])
        for attempt in range(1, retries + 1):
            second = self._modp_chain(v, n, prime_pool[attempt])
            if second == first:
                return first.get(n, 0)
            first = second
        raise CertificationError(
            f"modular ranks disagree for {v.name} at degree {n}; "
            "use exact mode")

    # ---------- derived quantities ----------

    def dimension(self, v, n: int, mode: str = "auto") -> int:
        """dim of the degree-n multilinear component of the free algebra."""
        v = self.variety(v)
        if n < 1:
            raise DegreeError("degree must be >= 1")
        key = (v.name, v.identities, n, mode)
        hit = self._dims.get(key)
        if hit is not None:
            return hit
        ncols = len(monomial_table(v.signature, n))
        if mode == "exact":
            rank = self.consequences(v, n).rank
        elif mode == "certified":
            rank = self._rank_certified_or_exact(v, n)
        else:
            exact_hit = self._exact.get((v.name, v.identities, n))
            if exact_hit is not None:
                rank = exact_hit.rank
            elif n <= 4:
                rank = self.consequences(v, n).rank
            else:
                rank = self._rank_certified_or_exact(v, n)
        dim = ncols - rank
        self._dims[key] = dim
        return dim

    def _rank_certified_or_exact(self, v, n: int) -> int:
        try:
            return self.rank_certified(v, n)
        except CertificationError as err:
            import warnings
            warnings.warn(f"{err}; recomputing exactly")
            return self.consequences(v, n).rank

    def is_identity(self, v, identity) -> bool:
        """True iff every multilinearization lies in the consequence space."""
        v = self.variety(v)
        if isinstance(identity, str):
            identity = ex.parse(identity, v.signature)
        for poly in multilinearize(identity, v.signature):
            deg = len(_leaves_of_first(poly))
            tab = monomial_table(v.signature, deg)
            space = self.consequences(v, deg)
            if not space.contains(_to_ids(poly, tab)):
                return False
        return True

    def includes(self, sub, super_, max_degree: int) -> bool:
        """True iff ``sub`` is a subvariety of ``super_`` up to max_degree.

        Equivalently: every identity of ``super_`` holds in ``sub``, i.e.
        consequences(super_, n) is contained in consequences(sub, n).
        """
        sub = self.variety(sub)
        super_ = self.variety(super_)
        if sub.signature != super_.signature:
            raise SignatureMismatch(
                f"{sub.name} and {super_.name} have different signatures")
        for n in range(1, max_degree + 1):
            big = self.consequences(sub, n)
            small = self.consequences(super_, n)
            if small.rank > big.rank:
                return False
            if not all(big.contains(r) for r in small.rows):
                return False
        return True


def _leaves_of_first(poly: dict) -> list:
    from .magma import leaves
    t = next(iter(poly))
    return leaves(t)


def _to_ids(poly: dict, table) -> dict:
    return {table.index[t]: c for t, c in poly.items()}


def _to_trees(row: dict, table) -> dict:
    return {table.trees[i]: c for i, c in row.items()}


def _insert_lifted_modp(sig, src_table, src_ech, dst_table, dst_ech):
    """Lift a back-reduced mod-p basis one degree up, closed by transpositions.

    One-operation plain signatures only (no signs): lift maps and the
    transpositions become integer index arrays applied to numpy rows.
    """
    m = src_table.n
    new = m + 1
    idx_maps = []
    for fn in lift_maps(sig, m):
        arr = np.fromiter((dst_table.index[fn(t)] for t in src_table.trees),
                          dtype=np.int64, count=len(src_table.trees))
        idx_maps.append(arr)
    perm_maps = []
    for j in range(1, new):
        perm = perm_of_cycle(new, (j, new))
        arr = np.fromiter(
            (dst_table.index[_relabel_plain(t, perm)] for t in dst_table.trees),
            dtype=np.int64, count=len(dst_table.trees))
        perm_maps.append(arr)
    for ids, vals in src_ech.basis_as_rows():
        for lift in idx_maps:
            lifted = lift[ids]
            dst_ech.insert(lifted, vals)
            for pm in perm_maps:
                dst_ech.insert(pm[lifted], vals)


def _relabel_plain(t, perm):
    if is_leaf(t):
        return perm[t]
    return (t[0], _relabel_plain(t[1], perm), _relabel_plain(t[2], perm))


def _nf_data_modp(ncols: int, ech, p: int):
    """Reduced-monomial list and per-monomial residue vectors from a
    back-reduced mod-p echelon (``ech=None`` means no relations)."""
    if ech is None:
        nf_ids = list(range(ncols))
        residues = [(np.array([i], dtype=np.int64),
                     np.array([1], dtype=np.int64)) for i in range(ncols)]
        return nf_ids, residues
    rows = {}
    for ids, vals in ech.basis_as_rows():
        rows[int(ids[0])] = (ids, vals)
    nf_ids = [i for i in range(ncols) if i not in rows]
    nfidx = {c: i for i, c in enumerate(nf_ids)}
    residues = []
    for i in range(ncols):
        row = rows.get(i)
        if row is None:
            residues.append((np.array([nfidx[i]], dtype=np.int64),
                             np.array([1], dtype=np.int64)))
        else:
            ids, vals = row
            ridx = np.fromiter((nfidx[int(c)] for c in ids[1:]),
                               dtype=np.int64, count=ids.size - 1)
            residues.append((ridx, (p - vals[1:]) % p))
    return nf_ids, residues


def leaves_of(t) -> list:
    from .magma import leaves
    return leaves(t)


def _dedupe_rows(ids, vals):
    """Canonicalize raw rows (ids ascending, leading value positive) and
    drop duplicates."""
    order = np.argsort(ids, axis=1, kind="stable")
    ids = np.take_along_axis(ids, order, axis=1)
    vals = np.take_along_axis(vals, order, axis=1)
    vals = vals * np.where(vals[:, :1] < 0, -1, 1)
    packed = np.concatenate([ids, vals], axis=1)
    _, keep = np.unique(packed, axis=0, return_index=True)
    return ids[keep], vals[keep]


def _group_rows_by_nnz(row_dicts) -> dict:
    groups = {}
    for rd in row_dicts:
        ints = clear_denominators(rd)
        items = sorted(ints.items())
        groups.setdefault(len(items), []).append(
            ([c for c, _ in items], [v for _, v in items]))
    return groups


# ---------- variety files ----------

def presentation_from_dict(data: dict) -> VarietyPresentation:
    sig = Signature.make(*((op["name"], op.get("symmetry", "none"))
                           for op in data["ops"]))
    idents = tuple(ex.parse(s, sig) for s in data.get("identities", ()))
    return VarietyPresentation(data["name"], sig, idents,
                               data.get("extends"))


def load_variety_file(path: str) -> VarietyPresentation:
    with open(path) as fh:
        return presentation_from_dict(json.load(fh))


def resolve_extends(presentations: dict) -> dict:
    out = {}

    def resolve(name, stack=()):
        if name in out:
            return out[name]
        if name in stack:
            raise ValueError(f"extends cycle through {name}")
        p = presentations[name]
        if p.extends:
            parent = resolve(p.extends, stack + (name,))
            p = p.with_parent(parent)
        out[name] = p
        return p

    for name in presentations:
        resolve(name)
    return out


def load_variety_dirs(dirs) -> dict:
    found = {}
    for d in dirs:
        if not d or not os.path.isdir(d):
            continue
        for fname in sorted(os.listdir(d)):
            if fname.endswith(".json"):
                p = load_variety_file(os.path.join(d, fname))
                found[p.name] = p
    return found


def user_variety_dirs() -> list:
    raw = os.environ.get(VARIETY_PATH_ENV, "")
    return [d for d in raw.split(os.pathsep) if d]
