"""Heisenberg coherent-state model over a finite chiral basis.

The model lives over a declared finite basis W_fin carrying its exact
Hermitian ( , )_V Gram (pi-unit values; the invariant-functional dimension
is insensitive to this positive global rescale).  Scalars that would be
transcendental (e^{2(xi,eta)_V} and friends) are carried as exact formal
exponential sums over the Gaussian rationals, so every identity below is
decided by exact comparison.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .errors import CheckFailed, PreconditionError, StructuralError
from .exterior import MeasureValue, PolyForm, euler_contract, sphere_wedge_d_pair
from .linalg import nullspace_sparse, rank_sparse, rref_sparse
from .scalars import GaussScalar, q_str


# ---------------------------------------------------------------------------
# formal exponential scalars
# ---------------------------------------------------------------------------

def _q_key(s: GaussScalar):
    return (s.re, s.im)


class FormalScalar:
    """An exact finite sum  sum_t c_t * e^{q_t}  with Gaussian-rational c, q.

    Terms with equal exponents merge; zero coefficients drop; equality is
    term-multiset equality.  Products add exponents, so group relations
    with e^{rational} phases are decided exactly.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        merged: dict = {}
        for c, q in terms:
            c = GaussScalar.coerce(c)
            q = GaussScalar.coerce(q)
            key = _q_key(q)
            if key in merged:
                s = merged[key][0] + c
                if s:
                    merged[key] = (s, q)
                else:
                    del merged[key]
            elif c:
                merged[key] = (c, q)
        self.terms = tuple(merged[k] for k in sorted(merged))

    @classmethod
    def zero(cls) -> "FormalScalar":
        return cls()

    @classmethod
    def one(cls) -> "FormalScalar":
        return cls(((GaussScalar.one(), GaussScalar.zero()),))

    @classmethod
    def exp(cls, q) -> "FormalScalar":
        return cls(((GaussScalar.one(), GaussScalar.coerce(q)),))

    @classmethod
    def of(cls, c) -> "FormalScalar":
        return cls(((GaussScalar.coerce(c), GaussScalar.zero()),))

    def __add__(self, other: "FormalScalar") -> "FormalScalar":
        return FormalScalar(self.terms + other.terms)

    def __neg__(self) -> "FormalScalar":
        return FormalScalar(tuple((-c, q) for c, q in self.terms))

    def __sub__(self, other: "FormalScalar") -> "FormalScalar":
        return self + (-other)

    def __mul__(self, other: "FormalScalar") -> "FormalScalar":
        out = []
        for c1, q1 in self.terms:
            for c2, q2 in other.terms:
                out.append((c1 * c2, q1 + q2))
        return FormalScalar(out)

    def scale(self, c) -> "FormalScalar":
        c = GaussScalar.coerce(c)
        return FormalScalar(tuple((t * c, q) for t, q in self.terms))

    def conjugate(self) -> "FormalScalar":
        return FormalScalar(tuple((c.conjugate(), q.conjugate())
                                  for c, q in self.terms))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        return (len(self.terms) == 1 and self.terms[0][0] == GaussScalar.one()
                and not self.terms[0][1])

    def divide_by(self, other: "FormalScalar") -> "FormalScalar":
        """Exact quotient by a single-term scalar."""
        if len(other.terms) != 1:
            raise StructuralError("can only divide by a single-term FormalScalar")
        c, q = other.terms[0]
        return FormalScalar(tuple((t / c, p - q) for t, p in self.terms))

    def __complex__(self) -> complex:
        import cmath
        return sum(complex(c) * cmath.exp(complex(q)) for c, q in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*e^({q})" for c, q in self.terms)

    def to_json(self) -> list:
        return [{"c": list(c.to_pair()), "q": list(q.to_pair())}
                for c, q in self.terms]

    @classmethod
    def from_json(cls, data) -> "FormalScalar":
        return cls(tuple((GaussScalar.from_pair(t["c"]),
                          GaussScalar.from_pair(t["q"])) for t in data))


# ---------------------------------------------------------------------------
# the declared finite basis
# ---------------------------------------------------------------------------

@dataclass
class SimpleWFin:
    """A finite W-basis given only by its exact Hermitian ( , )_V Gram."""

    gram: list
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.gram)


def diagonal_wfin(values) -> SimpleWFin:
    m = len(values)
    gram = [[GaussScalar(values[r]) if r == c else GaussScalar.zero()
             for c in range(m)] for r in range(m)]
    return SimpleWFin(gram)


def default_loop_wfin(N: int = 2) -> SimpleWFin:
    """The circle model: level-j chiral vector has (w, w)_V = 2j (pi-units)."""
    return SimpleWFin(diagonal_wfin([2 * (j + 1) for j in range(N)]).gram,
                      meta={"k": 0, "N": N})


def _same_wfin(a, b) -> bool:
    if a is b:
        return True
    return a.dim == b.dim and a.gram == b.gram


def _check_wfin(a, b, what: str):
    if not _same_wfin(a, b):
        raise StructuralError(f"{what}: W_fin basis mismatch")


def pair_V(w_fin, x, y) -> GaussScalar:
    """(x.w, y.w)_V -- C-linear in x, conjugate-linear in y."""
    H = w_fin.gram
    acc = GaussScalar.zero()
    for a, xa in enumerate(x):
        if not xa:
            continue
        for b, yb in enumerate(y):
            if yb and H[a][b]:
                acc = acc + xa * yb.conjugate() * H[a][b]
    return acc


def pair_W_Wbar(w_fin, x, y) -> GaussScalar:
    """(x.w, conj(y).wbar-conjugate)_V = sum x_a y_b H_ab: the bilinear pairing
    of a W vector against a Wbar vector with the given coordinates."""
    H = w_fin.gram
    acc = GaussScalar.zero()
    for a, xa in enumerate(x):
        if not xa:
            continue
        for b, yb in enumerate(y):
            if yb and H[a][b]:
                acc = acc + xa * yb * H[a][b]
    return acc


# ---------------------------------------------------------------------------
# coherent vectors and the projective action
# ---------------------------------------------------------------------------

def _coerce_coords(w_fin, coords) -> tuple:
    coords = tuple(GaussScalar.coerce(c) for c in coords)
    if len(coords) != w_fin.dim:
        raise StructuralError(
            f"coordinate vector length {len(coords)} != dim {w_fin.dim}")
    return coords


class CoherentVector:
    """Finite combination of coherent symbols eps_xi with formal coefficients."""

    __slots__ = ("w_fin", "terms")

    def __init__(self, w_fin, terms=None):
        self.w_fin = w_fin
        clean: dict = {}
        if terms:
            for xi, coeff in (terms.items() if isinstance(terms, dict) else terms):
                xi = _coerce_coords(w_fin, xi)
                if not isinstance(coeff, FormalScalar):
                    coeff = FormalScalar.of(coeff)
                if not coeff:
                    continue
                if xi in clean:
                    s = clean[xi] + coeff
                    if s:
                        clean[xi] = s
                    else:
                        del clean[xi]
                else:
                    clean[xi] = coeff
        self.terms = clean

    @classmethod
    def coherent(cls, w_fin, xi) -> "CoherentVector":
        return cls(w_fin, {tuple(xi): FormalScalar.one()})

    @classmethod
    def vacuum(cls, w_fin) -> "CoherentVector":
        return cls.coherent(w_fin, (0,) * w_fin.dim)

    def __add__(self, other: "CoherentVector") -> "CoherentVector":
        _check_wfin(self.w_fin, other.w_fin, "add")
        out = dict(self.terms)
        for xi, c in other.terms.items():
            if xi in out:
                s = out[xi] + c
                if s:
                    out[xi] = s
                else:
                    del out[xi]
            else:
                out[xi] = c
        v = CoherentVector(self.w_fin)
        v.terms = out
        return v

    def scale(self, c) -> "CoherentVector":
        if not isinstance(c, FormalScalar):
            c = FormalScalar.of(c)
        v = CoherentVector(self.w_fin)
        if c:
            v.terms = {xi: coeff * c for xi, coeff in self.terms.items()}
        return v

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoherentVector):
            return NotImplemented
        return _same_wfin(self.w_fin, other.w_fin) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"[{c}] eps{tuple(str(x) for x in xi)}"
                          for xi, c in self.terms.items())


@dataclass
class HeisenbergElement:
    """v = v_plus + v_minus in W + conj(W), with a central C* scalar."""

    w_fin: object
    v_plus: tuple
    v_minus: tuple
    central: FormalScalar = None

    def __post_init__(self):
        self.v_plus = _coerce_coords(self.w_fin, self.v_plus)
        self.v_minus = _coerce_coords(self.w_fin, self.v_minus)
        if self.central is None:
            self.central = FormalScalar.one()
        if not self.central:
            raise StructuralError("central scalar must be nonzero")

    def compose_labels(self, other: "HeisenbergElement") -> "HeisenbergElement":
        """(v + v') with multiplied central scalars (no cocycle phase)."""
        _check_wfin(self.w_fin, other.w_fin, "compose")
        return HeisenbergElement(
            self.w_fin,
            tuple(a + b for a, b in zip(self.v_plus, other.v_plus)),
            tuple(a + b for a, b in zip(self.v_minus, other.v_minus)),
            self.central * other.central)


def gram_coherent(w_fin, xi, eta) -> FormalScalar:
    """<eps_xi, eps_eta> = e^{2 (xi, eta)_V}, as an exact formal exponential."""
    xi = _coerce_coords(w_fin, xi)
    eta = _coerce_coords(w_fin, eta)
    return FormalScalar.exp(pair_V(w_fin, xi, eta) * 2)


def rho_act(v: HeisenbergElement, u: CoherentVector) -> CoherentVector:
    """The displayed Heisenberg action, extended linearly and multiplied by
    the element's central scalar:

        rho(v+ + v-) eps_xi =
            exp(-(v+, conj(v-))_V - 2 (xi, conj(v-))_V) eps_{xi + v+}.
    """
    _check_wfin(v.w_fin, u.w_fin, "rho_act")
    w_fin = u.w_fin
    p, q = v.v_plus, v.v_minus
    base = -pair_W_Wbar(w_fin, p, q)
    out = CoherentVector(w_fin)
    acc: dict = {}
    for xi, coeff in u.terms.items():
        expo = base - pair_W_Wbar(w_fin, xi, q) * 2
        new_coeff = coeff * v.central * FormalScalar.exp(expo)
        label = tuple(a + b for a, b in zip(xi, p))
        if label in acc:
            s = acc[label] + new_coeff
            if s:
                acc[label] = s
            else:
                del acc[label]
        else:
            acc[label] = new_coeff
    out.terms = acc
    return out


def heisenberg_phase_exponent(v: HeisenbergElement, v2: HeisenbergElement) -> GaussScalar:
    """sqrt(-1) * (v, J conj(v'))_V over the block Gram of W + conj(W).

    The block Gram is diag(H, conj(H)); J acts by +-sqrt(-1) on the two
    summands; conjugation swaps them.  This is the exact multiplier
    exponent of the projective relation.
    """
    _check_wfin(v.w_fin, v2.w_fin, "phase")
    H = v.w_fin.gram
    m = v.w_fin.dim
    i_unit = GaussScalar.i()
    # conj(v2) has W part conj(q'), Wbar part conj(p'); J scales them by +-i
    w_part = tuple(i_unit * c.conjugate() for c in v2.v_minus)
    wbar_part = tuple(-(i_unit * c.conjugate()) for c in v2.v_plus)
    acc = GaussScalar.zero()
    for a in range(m):
        pa, qa = v.v_plus[a], v.v_minus[a]
        for b in range(m):
            if H[a][b]:
                if pa and w_part[b]:
                    acc = acc + pa * w_part[b].conjugate() * H[a][b]
            if H[b][a]:
                # (wbar_a, wbar_b)_V = conj(H_ab) = H_ba
                if qa and wbar_part[b]:
                    acc = acc + qa * wbar_part[b].conjugate() * H[a][b].conjugate()
    return i_unit * acc


def projective_defect(v: HeisenbergElement, v2: HeisenbergElement,
                      probe: CoherentVector) -> FormalScalar:
    """Ratio of rho(v) rho(v') probe against the phase-corrected rho(v+v').

    The exact multiplier is e^{sqrt(-1)(v, J conj(v'))_V}; a faithful
    implementation returns the constant scalar 1 = 1*e^0 on every probe.
    """
    _check_wfin(v.w_fin, v2.w_fin, "projective_defect")
    _check_wfin(v.w_fin, probe.w_fin, "projective_defect")
    lhs = rho_act(v, rho_act(v2, probe))
    phase = FormalScalar.exp(heisenberg_phase_exponent(v, v2))
    rhs = rho_act(v.compose_labels(v2), probe).scale(phase)
    if set(lhs.terms) != set(rhs.terms):
        raise StructuralError("probe supports differ between the two sides")
    ratio = None
    for xi, lc in lhs.terms.items():
        rc = rhs.terms[xi]
        if len(rc.terms) == 1:
            cand = lc.divide_by(rc)
        else:
            if ratio is None:
                raise StructuralError(
                    "cannot extract a scalar ratio from a multi-term probe")
            cand = ratio
        if ratio is None:
            ratio = cand
        if lc != rc * cand or cand != ratio:
            raise CheckFailed("projective relation: sides are not proportional")
    return ratio if ratio is not None else FormalScalar.one()


def cocycle_pairing(alpha: PolyForm, beta: PolyForm) -> MeasureValue:
    """The 2-cocycle value integral alpha ^ d beta (pi-units), for coexact
    representatives given by tangential polynomial data.

    The real-valued pairing is exposed as-is; no mod-Z reduction is applied
    since the integral normalization of the concrete model is a convention
    left open.  Antisymmetric exactly by Stokes.
    """
    if euler_contract(alpha) or euler_contract(beta):
        raise PreconditionError("cocycle_pairing expects tangential representatives")
    return sphere_wedge_d_pair(alpha, beta)


def chi(u: CoherentVector) -> FormalScalar:
    """The vacuum pairing <u, eps_0>: every coherent symbol pairs to 1, so the
    value is the sum of the coefficients.  Linear and rho(W)-invariant."""
    acc = FormalScalar.zero()
    for coeff in u.terms.values():
        acc = acc + coeff
    return acc


# ---------------------------------------------------------------------------
# truncated symmetric algebra and the invariant-functional solver
# ---------------------------------------------------------------------------

def fock_monomials(m: int, D: int) -> list:
    """Monomials of degree <= D in m symbols, as nondecreasing index tuples,
    graded-lexicographically ordered."""
    out = []
    for d in range(D + 1):
        out.extend(itertools.combinations_with_replacement(range(m), d))
    return out


@dataclass
class FockVector:
    """Element of the degree-<=D truncation of the symmetric algebra S(W_fin)."""

    w_fin: object
    D: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, c in self.terms.items():
            c = GaussScalar.coerce(c)
            mono = tuple(sorted(mono))
            if len(mono) > self.D:
                raise StructuralError(f"monomial {mono} exceeds truncation {self.D}")
            if c:
                clean[mono] = clean.get(mono, GaussScalar.zero()) + c
        self.terms = {k: v for k, v in clean.items() if v}

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return (_same_wfin(self.w_fin, other.w_fin) and self.D == other.D
                and self.terms == other.terms)


def multiply_truncated(vec: FockVector, coords) -> FockVector:
    """Creation action: multiply by the degree-one element with coordinates
    `coords`, truncating above degree D."""
    coords = _coerce_coords(vec.w_fin, coords)
    out: dict = {}
    for mono, c in vec.terms.items():
        if len(mono) >= vec.D:
            continue
        for v, g in enumerate(coords):
            if not g:
                continue
            key = tuple(sorted(mono + (v,)))
            nc = c * g
            if key in out:
                s = out[key] + nc
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = nc
    return FockVector(vec.w_fin, vec.D, out)


def exp_truncated(vec: FockVector, coords) -> FockVector:
    """Group action of exp(w) on the truncated symmetric algebra."""
    coords = _coerce_coords(vec.w_fin, coords)
    total = FockVector(vec.w_fin, vec.D, dict(vec.terms))
    power = vec
    j = 1
    while True:
        power = multiply_truncated(power, coords)
        if not power.terms:
            break
        scaled = {m: c / _fact(j) for m, c in power.terms.items()}
        merged = dict(total.terms)
        for m, c in scaled.items():
            if m in merged:
                s = merged[m] + c
                if s:
                    merged[m] = s
                else:
                    del merged[m]
            else:
                merged[m] = c
        total = FockVector(vec.w_fin, vec.D, merged)
        j += 1
    return total


_FACTS = {0: 1}


def _fact(j: int) -> int:
    v = _FACTS.get(j)
    if v is None:
        v = j * _fact(j - 1)
        _FACTS[j] = v
    return v


def _generator_rows(w_fin, D: int, generators, mode: str, mono_index):
    """Constraint rows on functionals: psi(action(g) m) = psi(m)."""
    m_dim = w_fin.dim
    rows = []
    for g in generators:
        g = _coerce_coords(w_fin, g)
        support = [v for v, c in enumerate(g) if c]
        if not support:
            continue
        for mono in fock_monomials(m_dim, D - 1):
            row: dict = {}
            max_j = 1 if mode == "infinitesimal" else D - len(mono)
            for j in range(1, max_j + 1):
                for combo in itertools.combinations_with_replacement(support, j):
                    counts = Counter(combo)
                    coeff = GaussScalar.one()
                    for v, cnt in counts.items():
                        cv = g[v]
                        for _ in range(cnt):
                            coeff = coeff * cv
                        coeff = coeff / _fact(cnt)
                    col = mono_index[tuple(sorted(mono + combo))]
                    if col in row:
                        s = row[col] + coeff
                        if s:
                            row[col] = s
                        else:
                            del row[col]
                    else:
                        row[col] = coeff
            if row:
                rows.append(row)
    return rows


def _check_spanning(w_fin, generators):
    if not generators:
        raise PreconditionError("empty generator set")
    rows = []
    for g in generators:
        g = _coerce_coords(w_fin, g)
        rows.append({v: c for v, c in enumerate(g) if c})
    if rank_sparse(rows, w_fin.dim) != w_fin.dim:
        raise PreconditionError("generators do not span W_fin")


def invariant_functional_dim(w_fin, D: int, generators,
                             mode: str = "group") -> int:
    """Dimension of the space of functionals on the degree-<=D Fock
    truncation invariant under the (truncated) action of the generators.

    mode="group" uses the truncated group elements exp_{<=D}(w);
    mode="infinitesimal" uses the creation operators alone.  Generators
    must span W_fin (the finite stand-in for density).
    """
    if D < 1:
        raise PreconditionError("truncation degree must be >= 1")
    if mode not in ("group", "infinitesimal"):
        raise PreconditionError(f"unknown mode {mode!r}")
    _check_spanning(w_fin, generators)
    monos = fock_monomials(w_fin.dim, D)
    mono_index = {m: t for t, m in enumerate(monos)}
    rows = _generator_rows(w_fin, D, generators, mode, mono_index)
    # eliminate highest-degree monomials first: the system is then nearly
    # triangular and fill-in stays negligible
    order = sorted(range(len(monos)), key=lambda t: (len(monos[t]), monos[t]),
                   reverse=True)
    pivots, _ = rref_sparse(rows, len(monos), col_order=order, reduced=False)
    return len(monos) - len(pivots)


def invariant_functional_basis(w_fin, D: int, generators, mode: str = "group"):
    """(monomial list, nullspace basis) of the invariance constraints."""
    _check_spanning(w_fin, generators)
    monos = fock_monomials(w_fin.dim, D)
    mono_index = {m: t for t, m in enumerate(monos)}
    rows = _generator_rows(w_fin, D, generators, mode, mono_index)
    order = sorted(range(len(monos)), key=lambda t: (len(monos[t]), monos[t]),
                   reverse=True)
    basis = nullspace_sparse(rows, len(monos), col_order=order,
                             one=GaussScalar.one())
    return monos, basis


def unit_generators(w_fin) -> list:
    """The basis vectors of W_fin as a generator list."""
    m = w_fin.dim
    out = []
    for t in range(m):
        g = [GaussScalar.zero()] * m
        g[t] = GaussScalar.one()
        out.append(tuple(g))
    return out


def loop_sector_dim(lam: int, w_fin=None, D: int = 4, generators=None) -> int:
    """Block dimension for the circle: the weight filter over the sectors
    E_{lam + 2 xi} kills everything unless 0 lies in the weight lattice,
    i.e. unless lam is even; the weight-0 sector then carries exactly the
    truncated invariant functionals."""
    if lam not in (0, 1):
        raise PreconditionError(f"lambda must be 0 or 1, got {lam}")
    if (lam % 2) != 0:
        return 0          # no sector of weight zero
    if w_fin is None:
        w_fin = default_loop_wfin()
    if generators is None:
        generators = unit_generators(w_fin)
    return invariant_functional_dim(w_fin, D, generators)


# ---------------------------------------------------------------------------
# float cross-checks and serialization
# ---------------------------------------------------------------------------

def coherent_gram_float(w_fin, labels):
    """Numeric coherent Gram matrix for a float positivity cross-check."""
    import numpy as np
    m = len(labels)
    M = np.empty((m, m), dtype=complex)
    for r in range(m):
        for c in range(m):
            M[r, c] = complex(gram_coherent(w_fin, labels[r], labels[c]))
    return M


def _wfin_ref(w_fin) -> dict:
    meta = getattr(w_fin, "meta", None)
    if meta:
        return dict(meta)
    k = getattr(w_fin, "k", None)
    N = getattr(w_fin, "N", None)
    if k is not None and N is not None:
        return {"k": k, "N": N}
    return {"dim": w_fin.dim}


def coherent_to_json(u: CoherentVector) -> dict:
    terms = []
    for xi in sorted(u.terms, key=lambda t: tuple((c.re, c.im) for c in t)):
        terms.append({
            "xi": [list(c.to_pair()) for c in xi],
            "coeff": u.terms[xi].to_json(),
        })
    return {"w_fin": _wfin_ref(u.w_fin), "terms": terms}


def fock_to_json(v: FockVector) -> dict:
    terms = []
    for mono in sorted(v.terms, key=lambda m: (len(m), m)):
        c = v.terms[mono]
        terms.append({"mono": list(mono), "re": q_str(c.re), "im": q_str(c.im)})
    return {"w_fin": _wfin_ref(v.w_fin), "D": v.D, "terms": terms}
