"""Exact sparse/dense linear algebra over rationals and Gaussian rationals.

Matrices are kept sparse as lists of {column: scalar} dicts; the scalar type
is anything field-like under +, -, *, / with truthiness as a zero test
(gmpy2.mpq or GaussScalar).  Dense integer kernels (Gram assembly, the
fraction-free solve) use guarded numpy int64 fast paths with big-int
fallbacks, so results are exact regardless of which path runs.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import gcd, lcm, mpq

from .errors import StructuralError
from .scalars import GaussScalar

SparseRow = dict[int, object]


# ---------------------------------------------------------------------------
# sparse reduced echelon form
# ---------------------------------------------------------------------------

def rref_sparse(rows: list[SparseRow], ncols: int, col_order=None,
                reduced: bool = True):
    """Deterministic sparse RREF.

    Columns are processed in `col_order` (default 0..ncols-1); the pivot for
    a column is the unused row holding it with fewest nonzeros (ties by row
    index).  Returns (pivots, work) where pivots maps pivot column -> row
    index into `work`, and `work` holds the reduced rows (pivot entries 1).
    With reduced=False only forward elimination below pivots is performed
    (enough for ranks).
    """
    work = [dict(r) for r in rows]
    order = range(ncols) if col_order is None else col_order
    col_rows: dict[int, set[int]] = {}
    for ri, row in enumerate(work):
        for c in row:
            col_rows.setdefault(c, set()).add(ri)
    pivot_of_row: dict[int, int] = {}
    pivots: dict[int, int] = {}

    def eliminate(target_idx: int, pivot_row: SparseRow, col: int):
        trow = work[target_idx]
        factor = trow[col]
        for c, v in pivot_row.items():
            cur = trow.get(c)
            nv = (cur - factor * v) if cur is not None else -factor * v
            if nv:
                if cur is None:
                    trow[c] = nv
                    col_rows.setdefault(c, set()).add(target_idx)
                else:
                    trow[c] = nv
            elif cur is not None:
                del trow[c]
                col_rows[c].discard(target_idx)

    for col in order:
        holders = col_rows.get(col)
        if not holders:
            continue
        candidates = [ri for ri in holders if ri not in pivot_of_row]
        if not candidates:
            continue
        pi = min(candidates, key=lambda ri: (len(work[ri]), ri))
        prow = work[pi]
        inv = prow[col]
        if inv != 1:
            for c in list(prow):
                prow[c] = prow[c] / inv
        pivot_of_row[pi] = col
        pivots[col] = pi
        targets = [ri for ri in col_rows.get(col, ()) if ri != pi]
        if not reduced:
            targets = [ri for ri in targets if ri not in pivot_of_row]
        for ri in targets:
            eliminate(ri, prow, col)
    return pivots, work


def rank_sparse(rows: list[SparseRow], ncols: int) -> int:
    pivots, _ = rref_sparse(rows, ncols, reduced=False)
    return len(pivots)


def nullspace_sparse(rows: list[SparseRow], ncols: int, col_order=None,
                     one=None) -> list[SparseRow]:
    """Reduced-echelon kernel basis, one vector per free column.

    Each vector is rescaled so its first nonzero coordinate in canonical
    column order equals 1; the basis is deterministic.
    """
    if one is None:
        one = mpq(1)
    pivots, work = rref_sparse(rows, ncols, col_order=col_order, reduced=True)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[SparseRow] = []
    for f in free:
        vec: SparseRow = {f: one}
        for c, ri in pivots.items():
            v = work[ri].get(f)
            if v:
                vec[c] = -v
        lead = min(vec)
        lv = vec[lead]
        if lv != 1:
            vec = {c: v / lv for c, v in vec.items()}
        basis.append(vec)
    basis.sort(key=lambda v: min(v))
    return basis


def solve_sparse(rows: list[SparseRow], ncols: int, rhs: list) -> SparseRow | None:
    """One exact solution of A x = b for consistent systems, else None.

    `rows` are the rows of A; `rhs` the corresponding entries of b.
    """
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[ncols] = b
        aug.append(r)
    pivots, work = rref_sparse(aug, ncols + 1, reduced=True)
    if ncols in pivots:
        return None
    sol: SparseRow = {}
    for c, ri in pivots.items():
        v = work[ri].get(ncols)
        if v:
            sol[c] = v
    return sol


# ---------------------------------------------------------------------------
# integer vector utilities
# ---------------------------------------------------------------------------

def clear_denominators_q(vec: SparseRow) -> dict[int, int]:
    """Scale a sparse mpq vector to coprime integers (sign of leading kept)."""
    if not vec:
        return {}
    den = 1
    for v in vec.values():
        den = lcm(den, mpq(v).denominator)
    ints = {c: int(mpq(v) * den) for c, v in vec.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    g = int(g)
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def clear_denominators_gauss(vec: SparseRow) -> dict[int, tuple[int, int]]:
    """Scale a sparse GaussScalar vector by a positive rational to Gaussian
    integers with content 1 (common gcd of all real/imag parts)."""
    if not vec:
        return {}
    den = 1
    for v in vec.values():
        den = lcm(den, v.re.denominator)
        den = lcm(den, v.im.denominator)
    ints = {c: (int(v.re * den), int(v.im * den)) for c, v in vec.items()}
    g = 0
    for re, im in ints.values():
        g = gcd(gcd(g, re), im)
    g = int(g)
    if g > 1:
        ints = {c: (re // g, im // g) for c, (re, im) in ints.items()}
    return ints


# ---------------------------------------------------------------------------
# guarded integer matrix products
# ---------------------------------------------------------------------------

_INT64_LIMIT = 1 << 62


def _max_abs(M) -> int:
    best = 0
    for row in M:
        for v in row:
            a = -v if v < 0 else v
            if a > best:
                best = a
    return int(best)


def matmul_int(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    """Exact integer matrix product; numpy int64 when a bound check proves
    no overflow, otherwise big-int loops."""
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    inner = len(B)
    if len(A[0]) != inner:
        raise StructuralError("matmul shape mismatch")
    bound = _max_abs(A) * _max_abs(B) * inner
    if bound < _INT64_LIMIT:
        An = np.array(A, dtype=np.int64)
        Bn = np.array(B, dtype=np.int64)
        C = An @ Bn
        return [[int(x) for x in row] for row in C]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(M: list[list]) -> list[list]:
    return [list(r) for r in zip(*M)] if M else []


# ---------------------------------------------------------------------------
# fraction-free dense solve (Bareiss)
# ---------------------------------------------------------------------------

def solve_int_dense(G: list[list[int]], A: list[list[int]]) -> list[list[mpq]]:
    """Exact solution X of G X = A for an invertible integer matrix G.

    Bareiss fraction-free elimination keeps all intermediates integral
    (they are minors of [G | A]); back substitution produces X with exact
    rational entries in lowest terms.
    """
    m = len(G)
    if any(len(r) != m for r in G):
        raise StructuralError("G must be square")
    w = len(A[0]) if A else 0
    M = [[int(v) for v in G[i]] + [int(v) for v in A[i]] for i in range(m)]
    prev = 1
    for k in range(m):
        piv = None
        for r in range(k, m):
            if M[r][k]:
                if piv is None or abs(M[r][k]) < abs(M[piv][k]):
                    piv = r
        if piv is None:
            raise StructuralError("singular matrix in solve_int_dense")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        Mk = M[k]
        pk = Mk[k]
        for r in range(k + 1, m):
            Mr = M[r]
            mrk = Mr[k]
            if mrk:
                for c in range(k + 1, m + w):
                    Mr[c] = (pk * Mr[c] - mrk * Mk[c]) // prev
                Mr[k] = 0
            elif prev != 1 or pk != 1:
                for c in range(k + 1, m + w):
                    Mr[c] = (pk * Mr[c]) // prev
        prev = pk
    X = [[mpq(0)] * w for _ in range(m)]
    for i in range(m - 1, -1, -1):
        Mi = M[i]
        pii = Mi[i]
        for j in range(w):
            acc = mpq(Mi[m + j])
            for t in range(i + 1, m):
                if Mi[t]:
                    acc -= Mi[t] * X[t][j]
            X[i][j] = acc / pii
    return X


# ---------------------------------------------------------------------------
# Gaussian-rational dense helpers
# ---------------------------------------------------------------------------

def gauss_matmul(A: list[list[GaussScalar]], B: list[list[GaussScalar]]):
    if not A or not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    out = []
    for row in A:
        orow = []
        for col in Bt:
            acc = GaussScalar.zero()
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            orow.append(acc)
        out.append(orow)
    return out


def gauss_identity(m: int) -> list[list[GaussScalar]]:
    return [[GaussScalar.one() if i == j else GaussScalar.zero()
             for j in range(m)] for i in range(m)]
