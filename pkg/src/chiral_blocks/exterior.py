"""Exact exterior calculus for polynomial-coefficient forms on R^n (n even).

A form is stored term-by-term: a monomial exponent vector `a` (length n),
a strictly increasing index set `I` (0-based, |I| = form degree), and a
Gaussian-rational coefficient.  The flat operators d, *, d*, Laplacian and
the Euler contraction act exactly, and monomial integrals over the unit
sphere S^{n-1} and unit ball carry closed-form rational values in units of
pi^{n/2}.

Conventions (fixed once for the whole package):
  * orientation: dx_1 ^ ... ^ dx_n is positive;
  * *(dx_I) = sign(I, I^c) dx_{I^c}, hence ** = (-1)^p on p-forms and
    ** = -1 in middle degree;
  * d* = -*d* (n even), which makes the Laplacian dd* + d*d act on a
    scalar f as -sum_j d^2 f/dx_j^2, positive on sphere eigendata.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import PreconditionError, StructuralError
from .scalars import GaussScalar, q_str

Key = tuple[tuple[int, ...], tuple[int, ...]]  # (I, a)


# ---------------------------------------------------------------------------
# sign bookkeeping
# ---------------------------------------------------------------------------

def _inversions(I: tuple[int, ...], J: tuple[int, ...]) -> int:
    """Number of pairs (i, j) in I x J with i > j, for sorted tuples."""
    count = 0
    for i in I:
        for j in J:
            if i > j:
                count += 1
    return count


def _merge_sign(I: tuple[int, ...], J: tuple[int, ...]):
    """Merge two disjoint sorted index tuples; return (merged, sign) or None."""
    if set(I) & set(J):
        return None
    sign = -1 if _inversions(I, J) % 2 else 1
    return tuple(sorted(I + J)), sign


# ---------------------------------------------------------------------------
# PolyForm
# ---------------------------------------------------------------------------

class PolyForm:
    """Differential form on R^n with Gaussian-rational polynomial coefficients.

    `terms` maps (I, a) -> GaussScalar with I strictly increasing 0-based
    indices, |I| = p, and `a` an exponent vector of length n.  Zero
    coefficients are never stored; equality is exact and coefficient-wise.
    """

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms=None):
        if not (0 <= p <= n):
            raise StructuralError(f"form degree {p} out of range for n={n}")
        self.n = n
        self.p = p
        clean: dict[Key, GaussScalar] = {}
        if terms:
            for (I, a), c in terms.items():
                c = GaussScalar.coerce(c)
                if not c:
                    continue
                I = tuple(I)
                a = tuple(a)
                if len(I) != p or list(I) != sorted(set(I)) or any(
                        not (0 <= j < n) for j in I):
                    raise StructuralError(f"bad index set {I} for p={p}, n={n}")
                if len(a) != n or any(e < 0 for e in a):
                    raise StructuralError(f"bad exponent vector {a} for n={n}")
                key = (I, a)
                if key in clean:
                    s = clean[key] + c
                    if s:
                        clean[key] = s
                    else:
                        del clean[key]
                else:
                    clean[key] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int, p: int = 0) -> "PolyForm":
        return cls(n, p, {})

    @classmethod
    def monomial(cls, n: int, a, I=(), coeff=1) -> "PolyForm":
        return cls(n, len(tuple(I)), {(tuple(I), tuple(a)): GaussScalar.coerce(coeff)})

    @classmethod
    def one(cls, n: int) -> "PolyForm":
        return cls.monomial(n, (0,) * n)

    @classmethod
    def coordinate(cls, n: int, j: int) -> "PolyForm":
        """The function x_{j+1} (0-based j)."""
        a = [0] * n
        a[j] = 1
        return cls.monomial(n, tuple(a))

    @classmethod
    def dx(cls, n: int, j: int) -> "PolyForm":
        return cls.monomial(n, (0,) * n, (j,))

    # -- linear structure -------------------------------------------------

    def _check_compat(self, other: "PolyForm"):
        if self.n != other.n:
            raise StructuralError(f"ambient dimension mismatch: {self.n} != {other.n}")
        if self.p != other.p:
            raise StructuralError(f"form degree mismatch: {self.p} != {other.p}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        # the zero form is degree-polymorphic under addition
        if not other.terms and self.n == other.n:
            return self
        if not self.terms and self.n == other.n:
            return other
        self._check_compat(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            if key in terms:
                s = terms[key] + c
                if s:
                    terms[key] = s
                else:
                    del terms[key]
            else:
                terms[key] = c
        out = PolyForm.zero(self.n, self.p)
        out.terms = terms
        return out

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def __neg__(self) -> "PolyForm":
        out = PolyForm.zero(self.n, self.p)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def scale(self, c) -> "PolyForm":
        c = GaussScalar.coerce(c)
        out = PolyForm.zero(self.n, self.p)
        if c:
            out.terms = {k: v * c for k, v in self.terms.items()}
        return out

    def conjugate(self) -> "PolyForm":
        out = PolyForm.zero(self.n, self.p)
        out.terms = {k: v.conjugate() for k, v in self.terms.items()}
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.n == other.n
        return self.n == other.n and self.p == other.p and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- degree bookkeeping -----------------------------------------------

    def poly_degrees(self) -> set[int]:
        return {sum(a) for (_, a) in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.poly_degrees()) <= 1

    @property
    def poly_degree(self) -> int:
        """Total coefficient degree of a homogeneous form (0 for the zero form)."""
        degs = self.poly_degrees()
        if not degs:
            return 0
        if len(degs) > 1:
            raise StructuralError(f"form is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_pieces(self) -> dict[int, "PolyForm"]:
        pieces: dict[int, PolyForm] = {}
        for (I, a), c in self.terms.items():
            d = sum(a)
            pieces.setdefault(d, PolyForm.zero(self.n, self.p)).terms[(I, a)] = c
        return pieces

    def __repr__(self) -> str:
        if not self.terms:
            return f"PolyForm(n={self.n}, p={self.p}, 0)"
        bits = []
        for (I, a) in sorted(self.terms):
            c = self.terms[(I, a)]
            mono = "".join(f"x{j+1}^{e}" if e > 1 else f"x{j+1}"
                           for j, e in enumerate(a) if e)
            dxs = "^".join(f"dx{j+1}" for j in I)
            body = "*".join(s for s in (mono, dxs) if s) or "1"
            bits.append(f"({c})*{body}")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    """Graded-commutative exterior product.

    The sign on each pair of terms is the interleaving parity of the two
    index sets; terms with intersecting index sets vanish.
    """
    if a.n != b.n:
        raise StructuralError(f"ambient dimension mismatch: {a.n} != {b.n}")
    if a.p + b.p > a.n:
        raise StructuralError(f"wedge degree {a.p}+{b.p} exceeds n={a.n}")
    n = a.n
    out: dict[Key, GaussScalar] = {}
    for (I, ea), ca in a.terms.items():
        for (J, eb), cb in b.terms.items():
            ms = _merge_sign(I, J)
            if ms is None:
                continue
            K, sign = ms
            e = tuple(x + y for x, y in zip(ea, eb))
            c = ca * cb
            if sign < 0:
                c = -c
            key = (K, e)
            if key in out:
                s = out[key] + c
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = c
    w = PolyForm.zero(n, a.p + b.p)
    w.terms = out
    return w


def ext_d(w: PolyForm) -> PolyForm:
    """Exterior differential; degree p -> p+1, coefficient degree i -> i-1."""
    n = w.n
    if w.p == n:
        return PolyForm.zero(n, n)
    out: dict[Key, GaussScalar] = {}
    for (I, a), c in w.terms.items():
        iset = set(I)
        for j in range(n):
            if a[j] == 0 or j in iset:
                continue
            e = list(a)
            e[j] -= 1
            below = sum(1 for i in I if i < j)
            coeff = c * a[j]
            if below % 2:
                coeff = -coeff
            pos = below
            K = I[:pos] + (j,) + I[pos:]
            key = (K, tuple(e))
            if key in out:
                s = out[key] + coeff
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = coeff
    d = PolyForm.zero(n, w.p + 1)
    d.terms = out
    return d


def hodge_star_flat(w: PolyForm) -> PolyForm:
    """Euclidean Hodge star with dx_1^...^dx_n positive.

    On p-forms ** = (-1)^p for even n; in particular ** = -1 in middle
    degree p = n/2 when n = 4k+2.
    """
    n = w.n
    out: dict[Key, GaussScalar] = {}
    full = range(n)
    for (I, a), c in w.terms.items():
        iset = set(I)
        Ic = tuple(j for j in full if j not in iset)
        sign = -1 if _inversions(I, Ic) % 2 else 1
        out[(Ic, a)] = c if sign > 0 else -c
    s = PolyForm.zero(n, n - w.p)
    s.terms = out
    return s


def codiff(w: PolyForm) -> PolyForm:
    """Codifferential d* = -*d* (n even); degree p -> p-1, d* d* = 0."""
    if w.n % 2:
        raise StructuralError("codifferential sign fixed for even n only")
    if w.p == 0:
        return PolyForm.zero(w.n, 0)
    return -hodge_star_flat(ext_d(hodge_star_flat(w)))


def laplacian(w: PolyForm) -> PolyForm:
    """Hodge Laplacian dd* + d*d; on f dx_I acts as -(sum_j d_j^2 f) dx_I."""
    if w.p == 0:
        return codiff(ext_d(w))
    if w.p == w.n:
        return ext_d(codiff(w))
    return ext_d(codiff(w)) + codiff(ext_d(w))


def euler_contract(w: PolyForm) -> PolyForm:
    """Interior product with the Euler field sum_j x_j d/dx_j.

    Degree p -> p-1, coefficient degree i -> i+1; squares to zero.  With
    the differential it satisfies (d i_E + i_E d) w = (i + p) w on a
    homogeneous form of bidegree (p, i).
    """
    n = w.n
    if w.p == 0:
        return PolyForm.zero(n, 0)
    out: dict[Key, GaussScalar] = {}
    for (I, a), c in w.terms.items():
        for t, j in enumerate(I):
            e = list(a)
            e[j] += 1
            K = I[:t] + I[t + 1:]
            coeff = c if t % 2 == 0 else -c
            key = (K, tuple(e))
            if key in out:
                s = out[key] + coeff
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = coeff
    v = PolyForm.zero(n, w.p - 1)
    v.terms = out
    return v


def tangential_part(w: PolyForm) -> PolyForm:
    """w minus (sum x_j dx_j) ^ i_E(w): restricts to the sphere like w and is
    pointwise tangential on S^{n-1}."""
    if w.p == 0:
        return w
    n = w.n
    omega = PolyForm.zero(n, 1)
    omega.terms = {((j,), _unit_exp(n, j)): GaussScalar.one() for j in range(n)}
    return w - wedge(omega, euler_contract(w))


def _unit_exp(n: int, j: int) -> tuple[int, ...]:
    e = [0] * n
    e[j] = 1
    return tuple(e)


# ---------------------------------------------------------------------------
# integrals over the sphere and ball
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureValue:
    """An exact multiple of the fixed transcendental unit pi^{n/2}."""

    value: GaussScalar
    unit: str

    def __add__(self, other: "MeasureValue") -> "MeasureValue":
        if self.unit != other.unit:
            raise StructuralError(f"unit mismatch: {self.unit} != {other.unit}")
        return MeasureValue(self.value + other.value, self.unit)

    def __sub__(self, other: "MeasureValue") -> "MeasureValue":
        if self.unit != other.unit:
            raise StructuralError(f"unit mismatch: {self.unit} != {other.unit}")
        return MeasureValue(self.value - other.value, self.unit)

    def __neg__(self) -> "MeasureValue":
        return MeasureValue(-self.value, self.unit)

    def scale(self, c) -> "MeasureValue":
        return MeasureValue(self.value * GaussScalar.coerce(c), self.unit)

    def __bool__(self) -> bool:
        return bool(self.value)

    def is_real_nonnegative(self) -> bool:
        return self.value.is_real() and self.value.re >= 0


def measure_unit(n: int) -> str:
    return f"pi^{n // 2}"


_DF_CACHE: dict[int, int] = {}


def _double_factorial(m: int) -> int:
    """m!! for odd m >= -1 (with (-1)!! = 1)."""
    if m <= 0:
        return 1
    v = _DF_CACHE.get(m)
    if v is None:
        v = m * _double_factorial(m - 2)
        _DF_CACHE[m] = v
    return v


_FACT_CACHE: dict[int, int] = {0: 1}


def _factorial(m: int) -> int:
    v = _FACT_CACHE.get(m)
    if v is None:
        v = m * _factorial(m - 1)
        _FACT_CACHE[m] = v
    return v


_SPHERE_CACHE: dict[tuple[int, tuple[int, ...]], mpq] = {}


def sphere_integral_q(a) -> mpq:
    """integral_{S^{n-1}} x^a dS in units pi^{n/2}, as an exact rational.

    For even exponents the closed form 2 prod_j Gamma((a_j+1)/2) /
    Gamma((|a|+n)/2) reduces to 2 prod_j (a_j-1)!! / (2^{|a|/2} (|a|/2 +
    n/2 - 1)!); odd exponents integrate to zero by symmetry.  Requires n
    even so the value is rational in the pi^{n/2} unit.
    """
    a = tuple(a)
    n = len(a)
    if n % 2:
        raise StructuralError("sphere integrals require even ambient dimension")
    key = (n, a)
    v = _SPHERE_CACHE.get(key)
    if v is not None:
        return v
    if any(e % 2 for e in a):
        v = mpq(0)
    else:
        m = sum(a) // 2
        num = 2
        for e in a:
            if e:
                num *= _double_factorial(e - 1)
        v = mpq(num, (1 << m) * _factorial(m + n // 2 - 1))
    _SPHERE_CACHE[key] = v
    return v


def ball_integral_q(a) -> mpq:
    """integral over the unit ball of x^a dV, in units pi^{n/2}."""
    a = tuple(a)
    return sphere_integral_q(a) / (sum(a) + len(a))


def sphere_monomial_integral(a) -> MeasureValue:
    a = tuple(a)
    return MeasureValue(GaussScalar(sphere_integral_q(a)), measure_unit(len(a)))


def ball_monomial_integral(a) -> MeasureValue:
    a = tuple(a)
    return MeasureValue(GaussScalar(ball_integral_q(a)), measure_unit(len(a)))


# ---------------------------------------------------------------------------
# inner products and pairings
# ---------------------------------------------------------------------------

def _pointwise_integral(a: PolyForm, b: PolyForm, weight) -> GaussScalar:
    """sum_I integral a_I conj(b_I) x-monomial-wise under `weight`."""
    by_I: dict[tuple[int, ...], list] = {}
    for (I, e), c in b.terms.items():
        by_I.setdefault(I, []).append((e, c.conjugate()))
    total = GaussScalar.zero()
    for (I, ea), ca in a.terms.items():
        rows = by_I.get(I)
        if not rows:
            continue
        for eb, cb in rows:
            w = weight(tuple(x + y for x, y in zip(ea, eb)))
            if w:
                total = total + ca * cb * w
    return total


def l2_inner_ball(a: PolyForm, b: PolyForm) -> MeasureValue:
    """Hermitian L^2 product over the unit ball (conjugate-linear in b)."""
    if a.n != b.n:
        raise StructuralError(f"ambient dimension mismatch: {a.n} != {b.n}")
    if a.p != b.p:
        raise StructuralError(f"form degree mismatch: {a.p} != {b.p}")
    val = _pointwise_integral(a, b, ball_integral_q)
    return MeasureValue(val, measure_unit(a.n))


def sphere_l2_inner_tangential(a: PolyForm, b: PolyForm) -> MeasureValue:
    """Sphere L^2 product of the restrictions of two tangential forms.

    Requires i_E a = i_E b = 0; then the ambient pointwise product equals
    the intrinsic product of the pullbacks on S^{n-1}, so the value is a
    plain monomial integral.
    """
    if a.n != b.n:
        raise StructuralError(f"ambient dimension mismatch: {a.n} != {b.n}")
    if a.p != b.p:
        raise StructuralError(f"form degree mismatch: {a.p} != {b.p}")
    if euler_contract(a) or euler_contract(b):
        raise PreconditionError("sphere_l2_inner_tangential requires tangential forms")
    val = _pointwise_integral(a, b, sphere_integral_q)
    return MeasureValue(val, measure_unit(a.n))


def sphere_l2_restricted(a: PolyForm, b: PolyForm) -> MeasureValue:
    """Sphere L^2 product of the restrictions of arbitrary polynomial forms.

    Both arguments are replaced by their pointwise-tangential parts
    a - omega ^ i_E a, which restrict identically and are tangential on
    the sphere, so the integrand is again an ambient polynomial.
    """
    if a.n != b.n:
        raise StructuralError(f"ambient dimension mismatch: {a.n} != {b.n}")
    if a.p != b.p:
        raise StructuralError(f"form degree mismatch: {a.p} != {b.p}")
    val = _pointwise_integral(tangential_part(a), tangential_part(b), sphere_integral_q)
    return MeasureValue(val, measure_unit(a.n))


def sphere_wedge_d_pair(B: PolyForm, B2: PolyForm) -> MeasureValue:
    """integral_{S^{n-1}} i*(B ^ dB2), computed as integral_ball dB ^ dB2.

    Stokes' theorem turns the boundary integral into a ball integral of the
    exact top form d(B ^ dB2) = dB ^ dB2, so no intrinsic sphere calculus
    is needed.  Antisymmetric in (B, B2) when both have degree n/2 - 1.
    """
    if B.n != B2.n:
        raise StructuralError(f"ambient dimension mismatch: {B.n} != {B2.n}")
    if B.p != B2.p:
        raise StructuralError(f"form degree mismatch: {B.p} != {B2.p}")
    top = wedge(ext_d(B), ext_d(B2))
    total = GaussScalar.zero()
    for (_, e), c in top.terms.items():
        w = ball_integral_q(e)
        if w:
            total = total + c * w
    return MeasureValue(total, measure_unit(B.n))


# ---------------------------------------------------------------------------
# bases and random forms
# ---------------------------------------------------------------------------

def exponent_vectors(n: int, i: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree i, in descending lex order
    (x_1-major); this is the canonical monomial order of the package."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), i):
        e = [0] * n
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    out = sorted(set(out), reverse=True)
    return out


def form_keys(n: int, p: int, i: int) -> list[Key]:
    """Canonical ordered monomial-form basis keys of bidegree (p, i)."""
    monos = exponent_vectors(n, i)
    return [(I, a) for I in itertools.combinations(range(n), p) for a in monos]


def random_form(rng: random.Random, n: int, p: int, i: int,
                nterms: int | None = None) -> PolyForm:
    """Seeded random form of bidegree (p, i), coefficients uniform in
    {-9..9}^2 as GaussScalar (never both zero).

    With `nterms` given, that many distinct monomial terms are drawn;
    otherwise every basis monomial receives a coefficient.
    """
    keys = form_keys(n, p, i)
    if nterms is not None and nterms < len(keys):
        keys = rng.sample(keys, nterms)
        keys.sort()
    terms = {}
    for key in keys:
        re = rng.randint(-9, 9)
        im = rng.randint(-9, 9)
        while re == 0 and im == 0:
            re = rng.randint(-9, 9)
            im = rng.randint(-9, 9)
        terms[key] = GaussScalar(re, im)
    return PolyForm(n, p, terms)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def form_to_json(w: PolyForm) -> dict:
    """Canonical JSON dict; index sets are 1-based, terms sorted by (I, a)."""
    terms = []
    for (I, a) in sorted(w.terms):
        c = w.terms[(I, a)]
        terms.append({
            "a": list(a),
            "I": [j + 1 for j in I],
            "re": q_str(c.re),
            "im": q_str(c.im),
        })
    return {"n": w.n, "p": w.p, "terms": terms}


def form_from_json(d: dict) -> PolyForm:
    terms = {}
    for t in d["terms"]:
        I = tuple(j - 1 for j in t["I"])
        a = tuple(t["a"])
        terms[(I, a)] = GaussScalar(mpq(t["re"]), mpq(t["im"]))
    return PolyForm(d["n"], d["p"], terms)
