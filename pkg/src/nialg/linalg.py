"""Exact sparse linear algebra over Q with a modular fast path.

Rows are sparse dicts ``{column_id: Fraction}``.  Echelon bases are kept fully
reduced (Gauss-Jordan): each pivot is 1 and is the only nonzero in its column
among basis rows.  A ``MonomialOrder`` permutes columns for pivot selection so
echelon leading terms can match a chosen monomial order.

The modular kernel works mod primes near 2**31 with numpy rows; agreement of
two primes certifies ranks for dimension tables, while ``mode="exact"``
forces full rational elimination.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# primes just below 2**31; denominators are cleared per row before reduction
PRIMES = (
    2147483647,
    2147483629,
    2147483587,
    2147483579,
    2147483563,
    2147483549,
)


class AmbientMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MonomialOrder:
    """Column order: ``pos[col]`` is the elimination position of column ``col``.

    ``pos=None`` means the identity order.  Lower position = preferred pivot
    (the "leading" monomial of a row is its minimum-position column).
    """

    name: str = "generic"
    pos: tuple | None = None

    def position(self, col: int) -> int:
        return col if self.pos is None else self.pos[col]


GENERIC_ORDER = MonomialOrder()


def order_from_ranking(name: str, ranked_cols) -> MonomialOrder:
    """Order whose positions follow the given column ranking (best first)."""
    ranked = list(ranked_cols)
    pos = [0] * len(ranked)
    for p, c in enumerate(ranked):
        pos[c] = p
    return MonomialOrder(name, tuple(pos))


class Echelonizer:
    """Incremental reduced row echelon basis over Q."""

    def __init__(self, ncols: int, order: MonomialOrder = GENERIC_ORDER):
        self.ncols = ncols
        self.order = order
        self.rows = []            # dict col -> Fraction, fully reduced
        self.pivot_of_row = []    # col id per row
        self.row_of_pivot = {}    # col id -> row index
        self._users = {}          # col id -> set of row indices containing it

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pos(self, col):
        return self.order.position(col)

    def reduce(self, row: dict) -> dict:
        """Residue of ``row`` modulo the current basis (row unchanged)."""
        out = {c: v for c, v in row.items() if v}
        heap = [self._pos(c) for c in out]
        heapq.heapify(heap)
        seen = set(heap)
        ids = None
        if self.order.pos is not None:
            ids = getattr(self, "_ids", None)
            if ids is None:
                ids = [0] * self.ncols
                for c in range(self.ncols):
                    ids[self.order.pos[c]] = c
                self._ids = ids
        while heap:
            p = heapq.heappop(heap)
            c = p if ids is None else ids[p]
            v = out.get(c)
            if not v:
                continue
            ri = self.row_of_pivot.get(c)
            if ri is None:
                continue
            for cc, vv in self.rows[ri].items():
                nv = out.get(cc, 0) - v * vv
                if nv:
                    out[cc] = nv
                    pp = self._pos(cc)
                    if pp not in seen:
                        seen.add(pp)
                        heapq.heappush(heap, pp)
                else:
                    out.pop(cc, None)
        return out

    def _register(self, idx, cols):
        for c in cols:
            self._users.setdefault(c, set()).add(idx)

    def _unregister(self, idx, cols):
        for c in cols:
            users = self._users.get(c)
            if users is not None:
                users.discard(idx)

    def insert(self, row: dict) -> bool:
        """Reduce then insert; True if the rank grew."""
        r = self.reduce(row)
        if not r:
            return False
        pivot = min(r, key=self._pos)
        inv = 1 / Fraction(r[pivot])
        r = {c: v * inv for c, v in r.items()}
        idx = len(self.rows)
        # clear the new pivot column from existing rows
        for j in list(self._users.get(pivot, ())):
            R = self.rows[j]
            f = R[pivot]
            removed, added = [], []
            for c, v in r.items():
                nv = R.get(c, 0) - f * v
                if nv:
                    if c not in R:
                        added.append(c)
                    R[c] = nv
                else:
                    if c in R:
                        removed.append(c)
                    R.pop(c, None)
            self._unregister(j, removed)
            self._register(j, added)
        self.rows.append(r)
        self.pivot_of_row.append(pivot)
        self.row_of_pivot[pivot] = idx
        self._register(idx, r.keys())
        return True

    def extend(self, rows) -> int:
        added = 0
        for row in rows:
            if self.insert(row):
                added += 1
        return added

    def sorted_rows(self):
        """Rows sorted by pivot position; pivots strictly increasing."""
        idxs = sorted(range(len(self.rows)),
                      key=lambda i: self._pos(self.pivot_of_row[i]))
        return ([self.rows[i] for i in idxs],
                [self.pivot_of_row[i] for i in idxs])


@dataclass
class RelationSpace:
    """Reduced echelon basis of a subspace of a multilinear ambient."""

    sig: object
    degree: int
    ncols: int
    order: MonomialOrder = GENERIC_ORDER
    rows: list = field(default_factory=list)
    pivots: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _echelonizer(self) -> Echelonizer:
        ech = Echelonizer(self.ncols, self.order)
        for row in self.rows:
            ech.insert(row)
        return ech

    def reduce(self, row: dict) -> dict:
        ech = getattr(self, "_ech", None)
        if ech is None:
            ech = self._echelonizer()
            self._ech = ech
        return ech.reduce(row)

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)

    def same_ambient(self, other: "RelationSpace") -> bool:
        return (self.sig, self.degree, self.ncols) == (other.sig, other.degree,
                                                       other.ncols)

    def to_json(self, format_col) -> list:
        out = []
        for row in self.rows:
            out.append({format_col(c): str(Fraction(v)) for c, v in
                        sorted(row.items())})
        return out


def rref(rows, ncols: int, sig=None, degree=None,
         order: MonomialOrder = GENERIC_ORDER,
         mode: str = "exact") -> RelationSpace:
    """Reduced row-echelon basis of the span of ``rows``.

    ``exact`` eliminates over Q directly.  ``modular-certified`` first finds
    the independent rows mod two distinct primes (which must agree on the
    rank and on the accepted row set), then recomputes the echelon basis
    exactly on that pivot-row submatrix; disagreement falls back to exact.
    """
    rows = list(rows)
    if mode == "modular-certified":
        accepted = None
        for p in PRIMES[:2]:
            ech = ModpEchelon(ncols, p, order)
            got = [i for i, row in enumerate(rows) if ech.insert_dict(row)]
            if accepted is None:
                accepted = got
            elif accepted != got:
                accepted = None
                break
        if accepted is not None:
            space = rref([rows[i] for i in accepted], ncols, sig=sig,
                         degree=degree, order=order)
            if space.rank == len(accepted):
                return space
        import warnings
        warnings.warn("modular certification disagreed; eliminating exactly")
    elif mode != "exact":
        raise ValueError(f"unknown rref mode {mode!r}")
    ech = Echelonizer(ncols, order)
    ech.extend(rows)
    srows, spivots = ech.sorted_rows()
    return RelationSpace(sig=sig, degree=degree, ncols=ncols, order=order,
                         rows=srows, pivots=spivots)


def nullspace(rows, ncols: int, sig=None, degree=None,
              order: MonomialOrder = GENERIC_ORDER) -> RelationSpace:
    """Basis of ``{v : M v^T = 0}`` as row vectors; dim = ncols - rank."""
    space = rref(rows, ncols, sig=sig, degree=degree, order=order)
    pivot_set = set(space.pivots)
    vectors = []
    for j in range(ncols):
        if j in pivot_set:
            continue
        v = {j: Fraction(1)}
        for row, piv in zip(space.rows, space.pivots):
            coef = row.get(j)
            if coef:
                v[piv] = -coef
        vectors.append(v)
    return rref(vectors, ncols, sig=sig, degree=degree, order=order)


def same_span(a: RelationSpace, b: RelationSpace) -> bool:
    """True iff the two row spaces coincide (mutual membership)."""
    if not a.same_ambient(b):
        raise AmbientMismatch("relation spaces live in different ambients")
    if a.rank != b.rank:
        return False
    if a.order == b.order:
        return a.pivots == b.pivots and all(
            ra == rb for ra, rb in zip(a.rows, b.rows))
    return all(a.contains(r) for r in b.rows)


def clear_denominators(row: dict) -> dict:
    """Scale a rational row to coprime integers (for modular reduction)."""
    if not row:
        return {}
    denom = 1
    for v in row.values():
        denom = denom * Fraction(v).denominator // _gcd(
            denom, Fraction(v).denominator)
    ints = {c: int(Fraction(v) * denom) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = _gcd(g, abs(v))
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


class ModpEchelon:
    """Incremental echelon basis mod p with pooled numpy rows.

    Rows are stored in *position* space (after the column order permutation),
    forward-reduced only: every stored row has entries at positions >= its
    pivot, pivot value 1.  The dense scratch row keeps values in [0, p) so
    the leading-entry scan is a plain nonzero test.  The reduction walk runs
    in a small C kernel when a compiler is available.
    """

    _GROW = 1 << 16

    def __init__(self, ncols: int, p: int, order: MonomialOrder = GENERIC_ORDER):
        self.ncols = ncols
        self.p = p
        self.order = order
        if order.pos is None:
            self._perm = None
        else:
            self._perm = np.array(order.pos, dtype=np.int64)
        self.pivot_of_pos = np.full(ncols, -1, dtype=np.int64)
        self.row_start = np.zeros(self._GROW, dtype=np.int64)
        self.row_len = np.zeros(self._GROW, dtype=np.int64)
        self.pos_pool = np.zeros(self._GROW, dtype=np.int32)
        self.val_pool = np.zeros(self._GROW, dtype=np.int64)
        self.nrows = 0
        self.pool_used = 0
        self._scratch = np.zeros(ncols, dtype=np.int64)
        from ._fastkernel import reduce_row_func
        self._ckernel = reduce_row_func()

    @property
    def rank(self) -> int:
        return self.nrows

    def _row(self, ri: int):
        s, l = self.row_start[ri], self.row_len[ri]
        return self.pos_pool[s:s + l], self.val_pool[s:s + l]

    def _append_row(self, rpos, rval):
        need = self.pool_used + rpos.size
        while need > self.pos_pool.size:
            self.pos_pool = np.concatenate(
                [self.pos_pool, np.zeros(self.pos_pool.size, dtype=np.int32)])
            self.val_pool = np.concatenate(
                [self.val_pool, np.zeros(self.val_pool.size, dtype=np.int64)])
        if self.nrows == self.row_start.size:
            self.row_start = np.concatenate(
                [self.row_start, np.zeros(self.row_start.size, dtype=np.int64)])
            self.row_len = np.concatenate(
                [self.row_len, np.zeros(self.row_len.size, dtype=np.int64)])
        s = self.pool_used
        self.pos_pool[s:s + rpos.size] = rpos
        self.val_pool[s:s + rval.size] = rval
        self.row_start[self.nrows] = s
        self.row_len[self.nrows] = rpos.size
        self.pool_used = s + rpos.size
        self.nrows += 1

    def _walk_python(self, cursor: int, budget: int = 0,
                     full: bool = False) -> int:
        scratch = self._scratch
        p = self.p
        n = self.ncols
        w = 256
        steps = 0
        while cursor < n:
            end = min(cursor + w, n)
            nz = np.flatnonzero(scratch[cursor:end])
            if not nz.size:
                cursor = end
                w = min(w * 4, 1 << 17)
                continue
            w = 256
            c = cursor + int(nz[0])
            ri = int(self.pivot_of_pos[c])
            if ri < 0:
                if not full:
                    return c
                cursor = c + 1
                continue
            if budget > 0:
                steps += 1
                if steps > budget:
                    return -2
            f = int(scratch[c])
            rpos, rval = self._row(ri)
            scratch[rpos] = (scratch[rpos] - f * rval) % p
            cursor = c + 1
        return -1

    def _walk(self, cursor: int, budget: int = 0, full: bool = False) -> int:
        if self._ckernel is None:
            return self._walk_python(cursor, budget, full)
        return int(self._ckernel(
            self._scratch.ctypes.data, self.ncols, self.p,
            self.pivot_of_pos.ctypes.data,
            self.row_start.ctypes.data, self.row_len.ctypes.data,
            self.pos_pool.ctypes.data, self.val_pool.ctypes.data,
            cursor, budget, 1 if full else 0))

    def _scatter(self, cols, vals):
        p = self.p
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64) % p
        if self._perm is not None:
            cols = self._perm[cols]
        keep = vals != 0
        if not keep.all():
            cols, vals = cols[keep], vals[keep]
        if cols.size == 0:
            return -1
        # duplicate ids are not expected; np.add.at would handle them
        self._scratch[cols] = vals
        return int(cols.min())

    def _extract(self, c: int):
        scratch = self._scratch
        nz = np.flatnonzero(scratch[c:]) + c
        rval = scratch[nz].copy()
        scratch[nz] = 0
        inv = pow(int(rval[0]), self.p - 2, self.p)
        rval = (rval * inv) % self.p
        return nz.astype(np.int32), rval

    def insert(self, cols, vals, budget: int = 0):
        """Insert one row given as parallel (column ids, integer values).

        Returns True (rank grew), False (row was dependent), or None when a
        positive elimination budget was exhausted (row left uninserted;
        callers defer such rows to ``absorb_block``).
        """
        cursor = self._scatter(cols, vals)
        if cursor < 0:
            return False
        c = self._walk(cursor, budget)
        if c == -2:
            self._scratch[:] = 0
            return None
        if c < 0:
            return False
        rpos, rval = self._extract(c)
        self.pivot_of_pos[c] = self.nrows
        self._append_row(rpos, rval)
        return True

    def absorb_block(self, id_rows, val_rows, chunk: int = 1024):
        """Reduce many rows at once by marching columns over dense chunks.

        Used for the fill-heavy tail of the degree-6 matrices: rows that blew
        the sparse walk budget are re-reduced here, where each pivot hit is a
        single vectorized update across the whole chunk.
        """
        p = self.p
        ncols = self.ncols
        for start in range(0, len(id_rows), chunk):
            ids_chunk = id_rows[start:start + chunk]
            vals_chunk = val_rows[start:start + chunk]
            k = len(ids_chunk)
            # transposed layout: D[c] is the (contiguous) chunk column at c
            D = np.zeros((ncols, k), dtype=np.int64)
            for i, (ids, vv) in enumerate(zip(ids_chunk, vals_chunk)):
                ids = np.asarray(ids, dtype=np.int64)
                pos = ids if self._perm is None else self._perm[ids]
                D[pos, i] = np.asarray(vv, dtype=np.int64) % p
            for c in range(ncols):
                col = D[c]
                nz = np.flatnonzero(col)
                if not nz.size:
                    continue
                ri = int(self.pivot_of_pos[c])
                if ri < 0:
                    i0 = int(nz[0])
                    rcol = D[c:, i0]
                    rpos = np.flatnonzero(rcol) + c
                    rval = D[rpos, i0].copy()
                    D[rpos, i0] = 0
                    inv = pow(int(rval[0]), p - 2, p)
                    rval = (rval * inv) % p
                    ri = self.nrows
                    self.pivot_of_pos[c] = ri
                    self._append_row(rpos.astype(np.int32), rval)
                    nz = nz[1:]
                    if not nz.size:
                        continue
                    col = D[c]
                rpos, rval = self._row(ri)
                f = col[nz]
                block = D[rpos.astype(np.int64)[:, None], nz[None, :]]
                block = (block - rval[:, None] * f[None, :]) % p
                D[rpos.astype(np.int64)[:, None], nz[None, :]] = block

    def insert_dict(self, row: dict) -> bool:
        ints = clear_denominators(row)
        if not ints:
            return False
        cols = np.fromiter(ints.keys(), dtype=np.int64, count=len(ints))
        vals = np.fromiter((v % self.p for v in ints.values()),
                           dtype=np.int64, count=len(ints))
        return self.insert(cols, vals)

    def contains(self, cols, vals) -> bool:
        """Membership test mod p; does not change the basis."""
        cursor = self._scatter(cols, vals)
        if cursor < 0:
            return True
        c = self._walk(cursor)
        if c < 0:
            return True
        scratch = self._scratch
        nz = np.flatnonzero(scratch[c:]) + c
        scratch[nz] = 0
        return False

    def contains_dict(self, row: dict) -> bool:
        ints = clear_denominators(row)
        if not ints:
            return True
        cols = np.fromiter(ints.keys(), dtype=np.int64, count=len(ints))
        vals = np.fromiter((v % self.p for v in ints.values()),
                           dtype=np.int64, count=len(ints))
        return self.contains(cols, vals)

    def _rewrite_row(self, idx: int, rpos, rval):
        """Replace a stored row, appending to the pool (old segment leaks
        until the next compaction)."""
        if rpos.size <= self.row_len[idx]:
            s = self.row_start[idx]
            self.pos_pool[s:s + rpos.size] = rpos
            self.val_pool[s:s + rval.size] = rval
            self.row_len[idx] = rpos.size
            return
        need = self.pool_used + rpos.size
        while need > self.pos_pool.size:
            self.pos_pool = np.concatenate(
                [self.pos_pool, np.zeros(self.pos_pool.size, dtype=np.int32)])
            self.val_pool = np.concatenate(
                [self.val_pool, np.zeros(self.val_pool.size, dtype=np.int64)])
        s = self.pool_used
        self.pos_pool[s:s + rpos.size] = rpos
        self.val_pool[s:s + rval.size] = rval
        self.row_start[idx] = s
        self.row_len[idx] = rpos.size
        self.pool_used = need

    def compact(self):
        """Drop pool segments leaked by row rewrites."""
        rows = [(self._row(i)[0].copy(), self._row(i)[1].copy())
                for i in range(self.nrows)]
        self.pool_used = 0
        for idx, (rpos, rval) in enumerate(rows):
            self.row_start[idx] = self.pool_used
            self.row_len[idx] = rpos.size
            need = self.pool_used + rpos.size
            if need > self.pos_pool.size:
                grow = max(self.pos_pool.size, need)
                self.pos_pool = np.concatenate(
                    [self.pos_pool, np.zeros(grow, dtype=np.int32)])
                self.val_pool = np.concatenate(
                    [self.val_pool, np.zeros(grow, dtype=np.int64)])
            s = self.pool_used
            self.pos_pool[s:s + rpos.size] = rpos
            self.val_pool[s:s + rval.size] = rval
            self.pool_used = need

    def back_reduce(self, start_pos: int = 0):
        """Bring rows with pivot position >= start_pos to reduced echelon form.

        Rows are processed in decreasing pivot order and rewritten in place,
        so each row's tail is reduced against already-reduced rows (one full
        C walk per row).  ``start_pos`` lets the degree-6 path re-reduce only
        the cross-relation block while leaving the seeded product-relation
        rows untouched.
        """
        scratch = self._scratch
        pivots = self.pos_pool[self.row_start[:self.nrows]]
        order = np.argsort(pivots, kind="stable")
        order = order[pivots[order] >= start_pos]
        for idx in order[::-1].tolist():
            rpos, rval = self._row(idx)
            if rpos.size <= 1:
                continue
            pivot = int(rpos[0])
            tail = rpos[1:]
            if not (self.pivot_of_pos[tail] >= 0).any():
                continue
            scratch[tail] = rval[1:]
            self._walk(int(tail[0]), 0, full=True)
            nz = np.flatnonzero(scratch[pivot + 1:]) + pivot + 1
            vals = scratch[nz].copy()
            scratch[nz] = 0
            new_pos = np.concatenate(
                [np.array([pivot], dtype=np.int32), nz.astype(np.int32)])
            new_val = np.concatenate([rval[:1], vals])
            self._rewrite_row(idx, new_pos, new_val)
        self.compact()

    def basis_as_rows(self):
        """Rows back in column-id space as (ids, vals) pairs, pivot first."""
        if self._perm is None:
            inv = None
        else:
            inv = np.argsort(self._perm)
        for ri in range(self.nrows):
            rpos, rval = self._row(ri)
            ids = rpos.astype(np.int64) if inv is None else inv[rpos]
            yield ids, rval
