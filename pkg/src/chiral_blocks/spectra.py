"""Eigenspaces of coexact forms on S^{4k+1} built from polynomial data.

The pipeline per level i:

  1. the space of harmonic, coclosed, Euler-tangential polynomial
     (2k)-forms of coefficient degree i on R^{4k+2} is computed as an exact
     stacked kernel (deterministic integer-primitive echelon basis);
  2. restriction to the sphere identifies it with the eigenvalue-(2k+i)^2
     eigenspace of coexact forms; the sphere L^2 Gram G and the boundary
     pairing A_ab = integral i*B_a ^ d(i*B_b) are assembled exactly;
  3. the operator matrix of *d is solved from G [Jt] = A and certified by
     the exact identity [Jt]^2 = -(2k+i)^2 I, which also pins the
     eigenvalue and the complex structure J = [Jt]/(2k+i);
  4. the +i / -i chirality split is realized by flat polynomial forms with
     dB -+ sqrt(-1) * dB = 0, and verified against J.

No intrinsic sphere calculus appears anywhere: every number is an ambient
polynomial integral.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from gmpy2 import lcm, mpq

from .errors import CheckFailed, PreconditionError, StructuralError
from .exterior import (
    MeasureValue,
    PolyForm,
    codiff,
    ext_d,
    euler_contract,
    exponent_vectors,
    form_keys,
    form_to_json,
    hodge_star_flat,
    l2_inner_ball,
    laplacian,
    measure_unit,
    sphere_integral_q,
    sphere_l2_inner_tangential,
    sphere_l2_restricted,
    sphere_wedge_d_pair,
    _double_factorial,
    _factorial,
)
from .linalg import (
    clear_denominators_gauss,
    clear_denominators_q,
    matmul_int,
    nullspace_sparse,
    solve_int_dense,
    solve_sparse,
    transpose,
)
from .scalars import GaussScalar

# ---------------------------------------------------------------------------
# form spaces
# ---------------------------------------------------------------------------


@dataclass
class FormSpace:
    """A subspace of the monomial forms of bidegree (p, i) on R^n.

    The basis is the reduced echelon kernel basis w.r.t. the canonical
    monomial order, rescaled per vector to primitive integer coefficients
    (deterministic).  `coords` holds the same vectors as sparse maps
    {column -> int} over `keys`.
    """

    n: int
    p: int
    i: int
    keys: list
    basis: list = field(default_factory=list)
    coords: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def int_blocks(self):
        """Dense per-index-set coefficient blocks V_I of shape (#monos, dim)."""
        monos = exponent_vectors(self.n, self.i)
        nm = len(monos)
        key_index = {key: t for t, key in enumerate(self.keys)}
        blocks = {}
        Isets = sorted({I for (I, _) in self.keys})
        for bi, I in enumerate(Isets):
            blocks[I] = [[0] * self.dim for _ in range(nm)]
        mono_index = {a: t for t, a in enumerate(monos)}
        for col, vec in enumerate(self.coords):
            for kidx, v in vec.items():
                I, a = self.keys[kidx]
                blocks[I][mono_index[a]][col] = int(v)
        return Isets, monos, blocks


def _keys_to_form(n: int, p: int, keys, vec) -> PolyForm:
    terms = {}
    for kidx, v in vec.items():
        c = v if isinstance(v, GaussScalar) else GaussScalar(v)
        terms[keys[kidx]] = c
    return PolyForm(n, p, terms)


def coords_over_keys(w: PolyForm, key_index: dict) -> dict:
    """Sparse coordinates of a form over an indexed key list."""
    out = {}
    for key, c in w.terms.items():
        idx = key_index.get(key)
        if idx is None:
            raise StructuralError(f"form leaves the monomial space at {key}")
        out[idx] = c
    return out


def build_Ppi(k: int, p: int, i: int) -> FormSpace:
    """Full monomial form space of bidegree (p, i) on R^{4k+2}."""
    n = 4 * k + 2
    if k < 0 or i < 0 or not (0 <= p <= n):
        raise StructuralError(f"bidegree (p={p}, i={i}) out of range for k={k}")
    keys = form_keys(n, p, i)
    basis = [PolyForm.monomial(n, a, I) for (I, a) in keys]
    coords = [{t: 1} for t in range(len(keys))]
    return FormSpace(n, p, i, keys, basis, coords)


def _kernel_space(k: int, p: int, i: int, ops) -> FormSpace:
    """Exact kernel of the stacked operators within P^p_i."""
    n = 4 * k + 2
    amb = build_Ppi(k, p, i)
    rows: dict = {}
    for col, w in enumerate(amb.basis):
        for tag, op in enumerate(ops):
            img = op(w)
            for key, c in img.terms.items():
                if not c.is_real():
                    raise StructuralError("kernel operators must be real")
                rows.setdefault((tag, key), {})[col] = mpq(c.re)
    row_list = [rows[key] for key in sorted(rows)]
    kernel = nullspace_sparse(row_list, len(amb.keys))
    coords = [clear_denominators_q(v) for v in kernel]
    basis = [_keys_to_form(n, p, amb.keys, v) for v in coords]
    return FormSpace(n, p, i, amb.keys, basis, coords)


def build_Hpi(k: int, p: int, i: int) -> FormSpace:
    """Harmonic coclosed forms: Ker(Laplacian) cap Ker(d*) in P^p_i."""
    return _kernel_space(k, p, i, (laplacian, codiff))


def build_Hpp_primes(k: int, p: int, i: int):
    """(closed part, Euler-tangential part) of the harmonic coclosed space."""
    closed = _kernel_space(k, p, i, (laplacian, codiff, ext_d))
    tangential = _kernel_space(k, p, i, (laplacian, codiff, euler_contract))
    return closed, tangential


# ---------------------------------------------------------------------------
# batched exact sphere / ball pairings over integer bases
# ---------------------------------------------------------------------------

def _sphere_unit_factor(total_degree: int, n: int) -> mpq:
    """Common rational factor of all sphere integrals of fixed even degree."""
    m = total_degree // 2
    return mpq(2, (1 << m) * _factorial(m + n // 2 - 1))


def _weight_matrix(monosA, monosB):
    """Integer matrix W with sphere integral x^(a+b) = unit * W[a][b]."""
    W = []
    for a in monosA:
        row = []
        for b in monosB:
            num = 0
            ok = True
            for x, y in zip(a, b):
                if (x + y) % 2:
                    ok = False
                    break
            if ok:
                num = 1
                for x, y in zip(a, b):
                    if x + y:
                        num *= _double_factorial(x + y - 1)
            row.append(num)
        W.append(row)
    return W


def sphere_gram_int(space: FormSpace):
    """(G_int, unit) with sphere L^2 Gram of the integer basis = unit*G_int.

    Valid because the basis is Euler-tangential, so ambient pointwise
    products integrate to the intrinsic sphere products.
    """
    Isets, monos, blocks = space.int_blocks()
    unit = _sphere_unit_factor(2 * space.i, space.n)
    W = _weight_matrix(monos, monos)
    dim = space.dim
    G = [[0] * dim for _ in range(dim)]
    for I in Isets:
        V = blocks[I]
        WV = matmul_int(W, V)
        Vt = transpose(V)
        M = matmul_int(Vt, WV)
        for r in range(dim):
            Gr = G[r]
            Mr = M[r]
            for c in range(dim):
                Gr[c] += Mr[c]
    return G, unit


def cross_sphere_gram_int(sa: FormSpace, sb: FormSpace):
    """(M_int, unit) with cross sphere Gram = unit*M_int (zero if odd degree)."""
    if (sa.i + sb.i) % 2:
        return [[0] * sb.dim for _ in range(sa.dim)], mpq(0)
    Ia, monosA, blocksA = sa.int_blocks()
    Ib, monosB, blocksB = sb.int_blocks()
    unit = _sphere_unit_factor(sa.i + sb.i, sa.n)
    W = _weight_matrix(monosA, monosB)
    M = [[0] * sb.dim for _ in range(sa.dim)]
    common = sorted(set(Ia) & set(Ib))
    for I in common:
        Va, Vb = blocksA[I], blocksB[I]
        WVb = matmul_int(W, Vb)
        prod = matmul_int(transpose(Va), WVb)
        for r in range(sa.dim):
            Mr = M[r]
            Pr = prod[r]
            for c in range(sb.dim):
                Mr[c] += Pr[c]
    return M, unit


def wedge_pair_int(space: FormSpace):
    """(A_int, unit) with integral_ball dB_a ^ dB_b = unit*A_int[a][b]."""
    n, p, i = space.n, space.p, space.i
    dkeys = form_keys(n, p + 1, i - 1)
    key_index = {key: t for t, key in enumerate(dkeys)}
    monos = exponent_vectors(n, i - 1)
    nm = len(monos)
    mono_index = {a: t for t, a in enumerate(monos)}
    Isets = list(itertools.combinations(range(n), p + 1))
    blocks = {I: [[0] * space.dim for _ in range(nm)] for I in Isets}
    for col, B in enumerate(space.basis):
        dB = ext_d(B)
        for (I, a), c in dB.terms.items():
            blocks[I][mono_index[a]][col] = int(c.re)
    total_deg = 2 * (i - 1)
    unit = _sphere_unit_factor(total_deg, n) / (total_deg + n)
    W = _weight_matrix(monos, monos)
    dim = space.dim
    A = [[0] * dim for _ in range(dim)]
    full = set(range(n))
    for I in Isets:
        Ic = tuple(sorted(full - set(I)))
        sign = 1
        inv = sum(1 for a in I for b in Ic if a > b)
        if inv % 2:
            sign = -1
        VI, VIc = blocks[I], blocks[Ic]
        WVIc = matmul_int(W, VIc)
        prod = matmul_int(transpose(VI), WVIc)
        for r in range(dim):
            Ar = A[r]
            Pr = prod[r]
            if sign > 0:
                for c in range(dim):
                    Ar[c] += Pr[c]
            else:
                for c in range(dim):
                    Ar[c] -= Pr[c]
    return A, unit


def _assert_positive_definite(G, what: str):
    """Fraction-free no-swap elimination: all pivots positive iff PD."""
    m = len(G)
    M = [row[:] for row in G]
    prev = 1
    for kk in range(m):
        piv = M[kk][kk]
        if piv <= 0:
            raise CheckFailed(f"{what}: Gram matrix is not positive-definite")
        for r in range(kk + 1, m):
            Mr = M[r]
            Mk = M[kk]
            mrk = Mr[kk]
            for c in range(kk + 1, m):
                Mr[c] = (piv * Mr[c] - mrk * Mk[c]) // prev
        prev = piv


# ---------------------------------------------------------------------------
# eigenlevels
# ---------------------------------------------------------------------------

@dataclass
class EigenLevel:
    """Eigenvalue-(2k+i)^2 data: tangential representatives, Gram, *d matrix,
    and (after the split) chiral/antichiral bases."""

    k: int
    i: int
    lam: int
    ambient_space: FormSpace
    gram_int: list
    gram_unit: mpq
    jtilde: list                      # mpq matrix of *d in the integer basis
    chiral_basis: list = field(default_factory=list)
    antichiral_basis: list = field(default_factory=list)
    chiral_coords: list = field(default_factory=list)      # Gaussian-int dicts
    antichiral_coords: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.ambient_space.dim

    @property
    def n(self) -> int:
        return self.ambient_space.n

    @property
    def weight(self) -> int:
        """Square root of the eigenvalue: the Sobolev-1/2 scaling 2k+i."""
        return 2 * self.k + self.i

    def gram_V(self):
        """Hermitian ( , )_V Gram of the integer basis, in pi^{n/2} units."""
        w = self.weight * self.gram_unit
        return [[GaussScalar(w * v) for v in row] for row in self.gram_int]


def dim_tangential_formula(k: int, i: int) -> int:
    return 2 * comb(4 * k + i, 2 * k) * comb(2 * k + i - 1, 2 * k)


def eigenlevel(k: int, i: int) -> EigenLevel:
    """Build and certify the level-i eigenspace data for S^{4k+1}."""
    if i < 1:
        raise PreconditionError(f"eigenlevel needs i >= 1, got {i}")
    _, space = build_Hpp_primes(k, 2 * k, i)
    expected = dim_tangential_formula(k, i)
    if space.dim != expected:
        raise CheckFailed(
            f"level (k={k},i={i}): kernel rank {space.dim} != "
            f"2*C(4k+i,2k)*C(2k+i-1,2k) = {expected}")
    G, gu = sphere_gram_int(space)
    for r in range(space.dim):
        for c in range(r):
            if G[r][c] != G[c][r]:
                raise CheckFailed(f"level (k={k},i={i}): Gram not symmetric")
    _assert_positive_definite(G, f"level (k={k},i={i})")
    A, au = wedge_pair_int(space)
    for r in range(space.dim):
        if A[r][r] != 0:
            raise CheckFailed(f"level (k={k},i={i}): pairing not alternating")
        for c in range(r):
            if A[r][c] != -A[c][r]:
                raise CheckFailed(f"level (k={k},i={i}): pairing not antisymmetric")
    X = solve_int_dense(G, A)
    scale = au / gu
    jt = [[scale * v for v in row] for row in X]
    lam = (2 * k + i) ** 2
    _certify_jtilde_square(jt, lam, k, i)
    return EigenLevel(k=k, i=i, lam=lam, ambient_space=space,
                      gram_int=G, gram_unit=gu, jtilde=jt)


def _certify_jtilde_square(jt, lam: int, k: int, i: int):
    """Exact check [Jt]^2 = -lam*I via a common-denominator integer square."""
    m = len(jt)
    den = 1
    for row in jt:
        for v in row:
            den = lcm(den, v.denominator)
    den = int(den)
    Y = [[int(v * den) for v in row] for row in jt]
    Y2 = matmul_int(Y, Y)
    target = -lam * den * den
    for r in range(m):
        for c in range(m):
            want = target if r == c else 0
            if Y2[r][c] != want:
                raise CheckFailed(
                    f"level (k={k},i={i}): [Jt]^2 != -(2k+i)^2 I at ({r},{c})")


def chiral_split(level: EigenLevel) -> EigenLevel:
    """Split the level into the +i and -i eigenparts of J via flat chirality.

    The chiral (resp. antichiral) basis is the exact kernel of
    (1 - sqrt(-1) *) d (resp. +) inside the ambient space; the halves must
    be equal and each representative's restriction must be an eigenvector
    of J = [Jt]/(2k+i) with eigenvalue +-sqrt(-1).
    """
    space = level.ambient_space
    n, p, i = space.n, space.p, space.i
    dkeys = form_keys(n, p + 1, i - 1)
    key_index = {key: t for t, key in enumerate(dkeys)}
    ii = GaussScalar.i()
    cols_minus = []
    cols_plus = []
    for B in space.basis:
        w = ext_d(B)
        sw = hodge_star_flat(w)
        cols_minus.append(w - sw.scale(ii))   # (1 - i*) dB
        cols_plus.append(w + sw.scale(ii))    # (1 + i*) dB
    out = {}
    for tag, cols in (("chiral", cols_minus), ("antichiral", cols_plus)):
        rows: dict = {}
        for col, w in enumerate(cols):
            for key, c in w.terms.items():
                rows.setdefault(key_index[key], {})[col] = c
        row_list = [rows[idx] for idx in sorted(rows)]
        kernel = nullspace_sparse(row_list, space.dim, one=GaussScalar.one())
        coords = [clear_denominators_gauss(v) for v in kernel]
        out[tag] = coords
    half = space.dim // 2
    if len(out["chiral"]) != half or len(out["antichiral"]) != half:
        raise CheckFailed(
            f"level (k={level.k},i={level.i}): chirality split "
            f"{len(out['chiral'])}/{len(out['antichiral'])} != {half}/{half}")
    _certify_split_eigenvectors(level, out["chiral"], +1)
    _certify_split_eigenvectors(level, out["antichiral"], -1)
    level.chiral_coords = out["chiral"]
    level.antichiral_coords = out["antichiral"]
    level.chiral_basis = [_combine(space, v) for v in out["chiral"]]
    level.antichiral_basis = [_combine(space, v) for v in out["antichiral"]]
    return level


def _combine(space: FormSpace, coord_vec) -> PolyForm:
    w = PolyForm.zero(space.n, space.p)
    for col, (re, im) in coord_vec.items():
        w = w + space.basis[col].scale(GaussScalar(re, im))
    return w


def _coord_int_matrix(dim: int, coord_vecs):
    CR = [[0] * len(coord_vecs) for _ in range(dim)]
    CI = [[0] * len(coord_vecs) for _ in range(dim)]
    for j, vec in enumerate(coord_vecs):
        for col, (re, im) in vec.items():
            CR[col][j] = re
            CI[col][j] = im
    return CR, CI


def _certify_split_eigenvectors(level: EigenLevel, coord_vecs, sign: int):
    """Restrictions of the split must satisfy Jt v = sign*i*(2k+i) v exactly."""
    dim = level.dim
    den = 1
    for row in level.jtilde:
        for v in row:
            den = lcm(den, v.denominator)
    den = int(den)
    Y = [[int(v * den) for v in row] for row in level.jtilde]
    CR, CI = _coord_int_matrix(dim, coord_vecs)
    s = sign * level.weight * den
    YCR = matmul_int(Y, CR)
    YCI = matmul_int(Y, CI)
    for r in range(dim):
        for c in range(len(coord_vecs)):
            if YCR[r][c] != -s * CI[r][c] or YCI[r][c] != s * CR[r][c]:
                raise CheckFailed(
                    f"level (k={level.k},i={level.i}): split vector {c} is not a "
                    f"{'+' if sign > 0 else '-'}sqrt(-1) eigenvector of J")


def build_level(k: int, i: int) -> EigenLevel:
    """eigenlevel + chiral_split, memoized (levels are immutable once built)."""
    key = (k, i)
    lv = _LEVEL_CACHE.get(key)
    if lv is None:
        lv = chiral_split(eigenlevel(k, i))
        _LEVEL_CACHE[key] = lv
    return lv


_LEVEL_CACHE: dict = {}


# ---------------------------------------------------------------------------
# the Sobolev-1/2 inner product
# ---------------------------------------------------------------------------

def v_inner(level: EigenLevel, a: PolyForm, b: PolyForm) -> MeasureValue:
    """( , )_V on level representatives: (2k+i) times the sphere L^2 product.

    This is the unique per-level positive scaling satisfying
    (alpha, J conj(beta))_V = integral alpha ^ d beta.
    """
    for w in (a, b):
        if w and not _in_span(level.ambient_space, w):
            raise PreconditionError("form is not a representative of this level")
    return sphere_l2_inner_tangential(a, b).scale(level.weight)


def _in_span(space: FormSpace, w: PolyForm) -> bool:
    key_index = {key: t for t, key in enumerate(space.keys)}
    try:
        target = coords_over_keys(w, key_index)
    except StructuralError:
        return False
    rows: dict = {}
    for col, vec in enumerate(space.coords):
        for kidx, v in vec.items():
            rows.setdefault(kidx, {})[col] = GaussScalar(v)
    kidxs = sorted(set(rows) | set(target))
    row_list = [rows.get(t, {}) for t in kidxs]
    rhs = [target.get(t, GaussScalar.zero()) for t in kidxs]
    return solve_sparse(row_list, space.dim, rhs) is not None


# ---------------------------------------------------------------------------
# assembled chiral sum
# ---------------------------------------------------------------------------

@dataclass
class WBasis:
    """Ordered basis of the direct sum of the chiral parts of levels 1..N,
    with its exact block-diagonal ( , )_V Gram in pi^{n/2} units."""

    k: int
    N: int
    levels: list
    labels: list                 # (level i, index within level)
    vectors: list                # ambient chiral PolyForms
    gram: list                   # GaussScalar Hermitian matrix

    @property
    def dim(self) -> int:
        return len(self.vectors)


def assemble_W(k: int, N: int, levels=None) -> WBasis:
    """Concatenate chiral bases of levels 1..N and certify orthogonality.

    Asserts exactly: distinct levels have zero cross sphere Gram (on the
    whole ambient bases), and within each level every chiral image is
    ( , )_V-orthogonal to every antichiral image.
    """
    if N < 1:
        raise PreconditionError("assemble_W needs N >= 1")
    if levels is None:
        levels = [build_level(k, i) for i in range(1, N + 1)]
    for a in range(len(levels)):
        for b in range(a + 1, len(levels)):
            M, _ = cross_sphere_gram_int(levels[a].ambient_space,
                                         levels[b].ambient_space)
            if any(any(v for v in row) for row in M):
                raise CheckFailed(
                    f"levels i={levels[a].i},{levels[b].i}: cross-level Gram "
                    "is not exactly zero")
    for lv in levels:
        _assert_chiral_antichiral_orthogonal(lv)
    labels = []
    vectors = []
    blocks = []
    for lv in levels:
        CR, CI = _coord_int_matrix(lv.dim, lv.chiral_coords)
        blocks.append(_hermitian_sandwich(lv, CR, CI, CR, CI,
                                          scale=lv.weight * lv.gram_unit))
        for idx, w in enumerate(lv.chiral_basis):
            labels.append((lv.i, idx))
            vectors.append(w)
    dim = len(vectors)
    gram = [[GaussScalar.zero()] * dim for _ in range(dim)]
    off = 0
    for blk in blocks:
        m = len(blk)
        for r in range(m):
            for c in range(m):
                gram[off + r][off + c] = blk[r][c]
        off += m
    return WBasis(k=k, N=N, levels=levels, labels=labels,
                  vectors=vectors, gram=gram)


def _hermitian_sandwich(level, AR, AI, BR, BI, scale):
    """conj(A)^T G_int B in the level, as GaussScalar matrix times `scale`."""
    G = level.gram_int
    GR_B = matmul_int(G, BR)
    GI_B = matmul_int(G, BI)
    # conj(A)^T (G B): real part Ar^T GBr + Ai^T GBi, imag Ar^T GBi - Ai^T GBr
    ArT, AiT = transpose(AR), transpose(AI)
    re = matmul_int(ArT, GR_B)
    re2 = matmul_int(AiT, GI_B)
    im = matmul_int(ArT, GI_B)
    im2 = matmul_int(AiT, GR_B)
    out = []
    for r in range(len(re)):
        row = []
        for c in range(len(re[0])):
            row.append(GaussScalar((re[r][c] + re2[r][c]) * scale,
                                   (im[r][c] - im2[r][c]) * scale))
        out.append(row)
    return out


def _assert_chiral_antichiral_orthogonal(level: EigenLevel):
    CRp, CIp = _coord_int_matrix(level.dim, level.chiral_coords)
    CRm, CIm = _coord_int_matrix(level.dim, level.antichiral_coords)
    cross = _hermitian_sandwich(level, CRp, CIp, CRm, CIm, scale=mpq(1))
    for row in cross:
        for v in row:
            if v:
                raise CheckFailed(
                    f"level (k={level.k},i={level.i}): chiral image not "
                    "orthogonal to antichiral image")


# ---------------------------------------------------------------------------
# identities on representatives
# ---------------------------------------------------------------------------

def stokes_identity_check(k: int, B: PolyForm, B2: PolyForm,
                          levels=None) -> bool:
    """Exact check of (i*B, J i*B')_V = -(dB, *dB')_{L^2(ball)}.

    With `levels` given and both restrictions resolving exactly inside
    them, the left side is evaluated through the solved per-level J
    matrices; otherwise the identity is checked in its boundary-pairing
    form integral dB ^ d(conj B') = -(dB, *dB')_{L^2}, valid for arbitrary
    polynomial forms.
    """
    rhs = -l2_inner_ball(ext_d(B), hodge_star_flat(ext_d(B2))).value
    if levels:
        proj = _level_projections(levels, B)
        proj2 = _level_projections(levels, B2)
        if proj is not None and proj2 is not None:
            lhs = GaussScalar.zero()
            for lv, u, v in zip(levels, proj, proj2):
                if not any(u) or not any(v):
                    continue
                jt_v = _apply_q_matrix(lv.jtilde, v)
                gu = lv.gram_unit
                for r in range(lv.dim):
                    ur = u[r]
                    if not ur:
                        continue
                    for c in range(lv.dim):
                        g = lv.gram_int[r][c]
                        if g and jt_v[c]:
                            lhs = lhs + ur * jt_v[c].conjugate() * GaussScalar(g * gu)
            return lhs == rhs
    lhs = sphere_wedge_d_pair(B, B2.conjugate()).value
    return lhs == rhs


def _apply_q_matrix(M, vec):
    out = []
    for row in M:
        acc = GaussScalar.zero()
        for c, v in zip(row, vec):
            if c and v:
                acc = acc + v * GaussScalar(c)
        out.append(acc)
    return out


def _level_projections(levels, B: PolyForm):
    """Coordinates of i*B per level, or None when a residual survives.

    Projection coefficients solve the level Gram; completeness is certified
    by the exact vanishing of the sphere norm of the residual's tangential
    part (for k=0 the constant Fourier mode is removed first).
    """
    if not levels:
        return None
    n = levels[0].n
    parts = []
    recon = PolyForm.zero(n, B.p)
    for lv in levels:
        rhs = []
        for e in lv.ambient_space.basis:
            rhs.append(GaussScalar(1, 0) * sphere_l2_restricted(B, e).value
                       / GaussScalar(lv.gram_unit))
        coords = _solve_gram(lv.gram_int, rhs)
        parts.append(coords)
        for col, c in enumerate(coords):
            if c:
                recon = recon + lv.ambient_space.basis[col].scale(c)
    resid = B - recon
    if B.p == 0:
        # remove the constant mode, which no level carries
        mean = sphere_l2_restricted(resid, PolyForm.one(n)).value \
            / GaussScalar(sphere_integral_q((0,) * n))
        resid = resid - PolyForm.one(n).scale(mean)
    if sphere_l2_restricted(resid, resid).value:
        return None
    return parts


def _solve_gram(G_int, rhs):
    """Solve G_int x = rhs for a complex rational rhs (two integer solves)."""
    m = len(G_int)
    dre = 1
    dim_ = 1
    for v in rhs:
        dre = lcm(dre, v.re.denominator)
        dim_ = lcm(dim_, v.im.denominator)
    colR = [[int(v.re * dre)] for v in rhs]
    colI = [[int(v.im * dim_)] for v in rhs]
    XR = solve_int_dense(G_int, colR)
    XI = solve_int_dense(G_int, colI)
    return [GaussScalar(XR[t][0] / dre, XI[t][0] / dim_) for t in range(m)]


def _restriction_declared_chiral(B: PolyForm, levels, sign: int,
                                 reference: PolyForm | None) -> None:
    """Verify exactly that i*B lies in the declared chirality subspace.

    Fast paths: a B that IS a stored split vector (or matches a stored
    `reference` up to a provably restriction-zero difference) was already
    certified as a J eigenvector during the split.  Otherwise the full
    projection route runs.
    """
    stored = []
    for lv in levels:
        stored.extend(lv.chiral_basis if sign > 0 else lv.antichiral_basis)
    if any(B == w for w in stored):
        return
    if reference is not None:
        if not any(reference == w for w in stored):
            raise PreconditionError(
                "reference is not a stored representative of this chirality")
        diff = B - reference
        if sphere_l2_restricted(diff, diff).value:
            raise PreconditionError(
                "restriction differs from the declared reference")
        return
    proj = _level_projections(levels, B)
    if proj is None:
        raise PreconditionError(
            "restriction does not resolve in the computed levels")
    for lv, coords in zip(levels, proj):
        if not any(coords):
            continue
        CR, CI = _coord_int_matrix(
            lv.dim,
            lv.antichiral_coords if sign > 0 else lv.chiral_coords)
        # component along the opposite chirality must vanish: C^* G c = 0
        for j in range(len(CR[0])):
            acc = GaussScalar.zero()
            for r in range(lv.dim):
                cj = GaussScalar(CR[r][j], -CI[r][j])
                if not CR[r][j] and not CI[r][j]:
                    continue
                for c in range(lv.dim):
                    g = lv.gram_int[r][c]
                    if g and coords[c]:
                        acc = acc + cj * coords[c] * g
            if acc:
                raise PreconditionError(
                    "restriction has a component of the opposite chirality")


def chirality_energy_check(k: int, B: PolyForm, levels, sign: int = +1,
                           reference: PolyForm | None = None):
    """Ball energies of the self-dual halves H+- = (1 +- sqrt(-1)*) dB / 2.

    Requires the restriction of B to lie in the +sqrt(-1) eigenspace of J
    (sign=+1; mirrored for sign=-1), verified exactly; `reference` may name
    a stored representative with the same restriction to shortcut the
    projection route.  Returns (h_plus, h_minus) and asserts the signed
    difference sign*(h_plus - h_minus) >= 0 as an exact rational comparison.
    """
    if sign not in (+1, -1):
        raise PreconditionError("sign must be +1 or -1")
    if B:
        _restriction_declared_chiral(B, levels, sign, reference)
    dB = ext_d(B)
    sdB = hodge_star_flat(dB)
    ii = GaussScalar.i()
    h_plus_form = (dB + sdB.scale(ii)).scale(mpq(1, 2))
    h_minus_form = (dB - sdB.scale(ii)).scale(mpq(1, 2))
    h_plus = l2_inner_ball(h_plus_form, h_plus_form)
    h_minus = l2_inner_ball(h_minus_form, h_minus_form)
    diff = (h_plus - h_minus) if sign > 0 else (h_minus - h_plus)
    if not diff.value.is_real() or diff.value.re < 0:
        raise CheckFailed(
            "signed self-dual energy difference is negative "
            f"({diff.value}) for declared chirality {sign:+d}")
    return h_plus, h_minus


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def eigenlevel_to_json(level: EigenLevel, include_bases: bool = True) -> dict:
    from .scalars import q_str
    d = {
        "k": level.k,
        "i": level.i,
        "lambda": level.lam,
        "dim": level.dim,
        "dim_chiral": len(level.chiral_basis),
        "gram_unit": measure_unit(level.n),
        "weight": level.weight,
    }
    if include_bases:
        d["basis"] = [form_to_json(w) for w in level.ambient_space.basis]
        d["chiral_basis"] = [form_to_json(w) for w in level.chiral_basis]
        d["antichiral_basis"] = [form_to_json(w) for w in level.antichiral_basis]
        d["jtilde"] = [[q_str(v) for v in row] for row in level.jtilde]
    return d
