"""Exact arithmetic in F_p[x] and F_p(x), places of the projective line,
valuations, factorization, residues and Riemann-Roch spaces.

Representation conventions:

* ``Poly`` stores little-endian coefficient tuples (index = degree) over a
  fixed prime modulus, normalized with no trailing zeros; () is the zero
  polynomial.
* ``RationalFunction`` is a reduced fraction num/den with den monic and
  gcd(num, den) = 1; equality is componentwise.
* ``Place`` is a closed point of the projective line: a monic irreducible
  polynomial, or the point at infinity (degree 1).
* ``DifferentialForm`` wraps the rational coefficient r of a form r*dx.

Residues and Laurent expansions are only offered at places of degree 1,
where they take values in F_p; the machinery is Taylor shifts plus truncated
power-series inversion realized as polynomial arithmetic mod x^k.
Factorization is distinct-degree splitting followed by equal-degree
splitting driven by a fixed-seed pseudo-random sequence, so factor lists
(and everything derived from them) are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import NonRationalPlace, UndefinedForZero
from .exactfield import check_modulus

_EDF_SEED = 0x5EED


class Poly:
    """Univariate polynomial over F_p, little-endian coefficients."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs, p: int):
        self.p = p
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "Poly":
        return cls((), p)

    @classmethod
    def const(cls, c: int, p: int) -> "Poly":
        return cls((c,), p)

    @classmethod
    def x(cls, p: int) -> "Poly":
        return cls((0, 1), p)

    @classmethod
    def x_power(cls, n: int, p: int) -> "Poly":
        return cls([0] * n + [1], p)

    # -- basics ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return (
            isinstance(other, Poly) and other.p == self.p and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"Poly({list(self.coeffs)}, p={self.p})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                xs = "x" if i == 1 else f"x^{i}"
                terms.append(xs if c == 1 else f"{c}*{xs}")
        return " + ".join(terms)

    # -- ring operations -------------------------------------------------

    def _mate(self, other):
        if not isinstance(other, Poly) or other.p != self.p:
            raise TypeError("polynomials must share the modulus")

    def __add__(self, other: "Poly") -> "Poly":
        self._mate(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] + other[i] for i in range(n)], self.p)

    def __sub__(self, other: "Poly") -> "Poly":
        self._mate(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] - other[i] for i in range(n)], self.p)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.p)

    def __mul__(self, other: "Poly") -> "Poly":
        self._mate(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.p)
        p = self.p
        n = min(len(self.coeffs), len(other.coeffs))
        if (p - 1) ** 2 * n < 2**63:
            out = np.convolve(
                np.array(self.coeffs, dtype=np.int64),
                np.array(other.coeffs, dtype=np.int64),
            )
            return Poly([int(v) for v in out % p], p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % p
        return Poly(out, p)

    def scale(self, c: int) -> "Poly":
        return Poly([c * a for a in self.coeffs], self.p)

    def __divmod__(self, other: "Poly"):
        self._mate(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return Poly.zero(p), self
        inv_lead = pow(other.lead(), -1, p)
        quot = [0] * (dq + 1)
        rem = np.array(self.coeffs, dtype=np.int64)
        ob = np.array(other.coeffs, dtype=np.int64)
        w = len(other.coeffs)
        for k in range(dq, -1, -1):
            c = int(rem[k + w - 1]) * inv_lead % p
            if c:
                quot[k] = c
                rem[k : k + w] = (rem[k : k + w] - c * ob) % p
        return Poly(quot, p), Poly([int(v) for v in rem], p)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    def monic(self) -> "Poly":
        if self.is_zero() or self.lead() == 1:
            return self
        return self.scale(pow(self.lead(), -1, self.p))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def pow(self, e: int) -> "Poly":
        out = Poly.const(1, self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def pow_mod(self, e: int, mod: "Poly") -> "Poly":
        out = Poly.const(1, self.p) % mod
        base = self % mod
        while e:
            if e & 1:
                out = out * base % mod
            base = base * base % mod
            e >>= 1
        return out

    # -- calculus and substitution ----------------------------------------

    def derivative(self) -> "Poly":
        return Poly([i * self.coeffs[i] for i in range(1, len(self.coeffs))], self.p)

    def eval(self, a: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = (out * a + c) % self.p
        return out

    def taylor_shift(self, a: int) -> "Poly":
        """Compose with x + a."""
        if a % self.p == 0:
            return self
        out = Poly.zero(self.p)
        xa = Poly((a, 1), self.p)
        for c in reversed(self.coeffs):
            out = out * xa + Poly.const(c, self.p)
        return out

    def reversed_coeffs(self) -> "Poly":
        """Coefficient reversal x^deg * f(1/x); zero maps to zero."""
        return Poly(tuple(reversed(self.coeffs)), self.p)

    def pth_root(self) -> "Poly":
        """Inverse of the Frobenius on polynomials with zero derivative."""
        p = self.p
        if any(c and i % p for i, c in enumerate(self.coeffs)):
            raise ValueError("not a p-th power")
        return Poly([self.coeffs[i] for i in range(0, len(self.coeffs), p)], p)

    def trailing_valuation(self) -> int:
        """Multiplicity of the root x = 0; raises on the zero polynomial."""
        if self.is_zero():
            raise UndefinedForZero("valuation of the zero polynomial")
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise AssertionError("unreachable")

    # -- irreducibility and factorization ---------------------------------

    def is_irreducible(self) -> bool:
        """Rabin's test: x^(p^n) = x mod f, and no proper-degree collisions."""
        n = self.degree()
        if n < 1:
            return False
        if n == 1:
            return True
        f = self.monic()
        p = self.p
        x = Poly.x(p)
        h = x
        for _ in range(n):
            h = h.pow_mod(p, f)
        if h != x % f:
            return False
        for ell in _prime_divisors(n):
            h = x
            for _ in range(n // ell):
                h = h.pow_mod(p, f)
            if not (h - x).gcd(f).degree() == 0:
                return False
        return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    """Split a squarefree monic f into products of same-degree irreducibles."""
    p = f.p
    out = []
    x = Poly.x(p)
    h = x
    d = 0
    rem = f
    while rem.degree() > 0:
        d += 1
        if rem.degree() < 2 * d:
            out.append((rem, rem.degree()))
            break
        h = h.pow_mod(p, rem)
        g = (h - x).gcd(rem)
        if g.degree() > 0:
            out.append((g, d))
            rem = rem // g
            h = h % rem
    return out


def _equal_degree(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    """Cantor-Zassenhaus splitting of a squarefree product of degree-d factors."""
    p = f.p
    if f.degree() == d:
        return [f.monic()]
    one = Poly.const(1, p)
    while True:
        a = Poly([rng.randrange(p) for _ in range(f.degree())], p)
        if a.degree() < 1:
            continue
        g = a.gcd(f)
        if 0 < g.degree() < f.degree():
            split = g
        else:
            if p == 2:
                # trace map over F_2
                t = Poly.zero(p)
                b = a % f
                for _ in range(d):
                    t = (t + b) % f
                    b = b.pow_mod(2, f)
            else:
                t = (a.pow_mod((p**d - 1) // 2, f) - one) % f
            split = t.gcd(f)
            if not 0 < split.degree() < f.degree():
                continue
        return _equal_degree(split, d, rng) + _equal_degree(f // split, d, rng)


def _factor_monic(f: Poly) -> dict[Poly, int]:
    p = f.p
    if f.degree() <= 0:
        return {}
    df = f.derivative()
    if df.is_zero():
        return {q: p * m for q, m in _factor_monic(f.pth_root()).items()}
    rng = random.Random(_EDF_SEED)
    squarefree = f // f.gcd(df)
    out: dict[Poly, int] = {}
    for block, d in _distinct_degree(squarefree):
        for q in _equal_degree(block, d, rng):
            e = 0
            while q.divides(f):
                f = f // q
                e += 1
            out[q] = e
    if f.degree() > 0:
        # remaining multiplicities were all divisible by p
        for q, m in _factor_monic(f.pth_root()).items():
            out[q] = out.get(q, 0) + p * m
    return out


def factor(f: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factors with multiplicities, canonically sorted.

    The product of q^m over the output times the leading coefficient of f
    recovers f.
    """
    if f.is_zero():
        raise UndefinedForZero("factorization of the zero polynomial")
    out = _factor_monic(f.monic())
    return sorted(out.items(), key=lambda qm: (qm[0].degree(), qm[0].coeffs))


class RationalFunction:
    """Element of F_p(x) in reduced form: den monic, gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.p != den.p:
            raise TypeError("numerator and denominator moduli differ")
        if num.is_zero():
            num, den = Poly.zero(num.p), Poly.const(1, num.p)
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num // g, den // g
            lead = den.lead()
            if lead != 1:
                inv = pow(lead, -1, num.p)
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def p(self) -> int:
        return self.num.p

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_poly(cls, f: Poly) -> "RationalFunction":
        return cls(f, Poly.const(1, f.p))

    @classmethod
    def const(cls, c: int, p: int) -> "RationalFunction":
        return cls(Poly.const(c, p), Poly.const(1, p))

    @classmethod
    def zero(cls, p: int) -> "RationalFunction":
        return cls.const(0, p)

    @classmethod
    def one(cls, p: int) -> "RationalFunction":
        return cls.const(1, p)

    @classmethod
    def x_power(cls, n: int, p: int) -> "RationalFunction":
        """x^n for any integer n, negative n giving a pole at 0."""
        if n >= 0:
            return cls(Poly.x_power(n, p), Poly.const(1, p))
        return cls(Poly.const(1, p), Poly.x_power(-n, p))

    # -- basics -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction)
            and other.num == self.num
            and other.den == self.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree() == 0:
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    # -- field operations -------------------------------------------------

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def scale(self, c: int) -> "RationalFunction":
        return RationalFunction(self.num.scale(c), self.den)

    def pow(self, e: int) -> "RationalFunction":
        if e < 0:
            return RationalFunction.one(self.p) / self.pow(-e)
        return RationalFunction(self.num.pow(e), self.den.pow(e))

    def derivative(self) -> "RationalFunction":
        """Formal d/dx; (x^p)' = 0 in characteristic p."""
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def as_poly(self) -> Poly:
        """The numerator, provided the denominator is 1."""
        if self.den.degree() != 0:
            raise ValueError("not a polynomial")
        return self.num


@dataclass(frozen=True)
class Place:
    """Closed point of the projective line: monic irreducible poly or infinity."""

    poly: Poly | None  # None encodes the point at infinity

    def __post_init__(self):
        if self.poly is not None:
            if self.poly.lead() != 1:
                raise ValueError("finite place must be monic")
            if not self.poly.is_irreducible():
                raise ValueError(f"finite place must be irreducible: {self.poly}")

    @classmethod
    def infinity(cls) -> "Place":
        return cls(None)

    @classmethod
    def finite(cls, poly: Poly) -> "Place":
        return cls(poly)

    @classmethod
    def rational(cls, a: int, p: int) -> "Place":
        """The degree-1 place x = a."""
        return cls(Poly((-a, 1), p))

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree()

    def rational_point(self) -> int:
        """The point a for a degree-1 finite place x - a."""
        if self.poly is None or self.degree != 1:
            raise NonRationalPlace("place is not a finite rational point")
        return -self.poly.coeffs[0] % self.poly.p

    def sort_key(self):
        """Finite places in lexicographic coefficient order, infinity last."""
        if self.poly is None:
            return (1, 0, ())
        return (0, self.poly.degree(), self.poly.coeffs)

    def __str__(self):
        return "inf" if self.poly is None else str(self.poly)


def ord_at(f: RationalFunction, q: Place) -> int:
    """Order of vanishing of f at q (negative at poles)."""
    if f.is_zero():
        raise UndefinedForZero("ord of the zero function")
    if q.is_infinity:
        return f.den.degree() - f.num.degree()

    def mult(g: Poly) -> int:
        e = 0
        while q.poly.divides(g):
            g = g // q.poly
            e += 1
        return e

    return mult(f.num) - mult(f.den)


def pole_divisor(f: RationalFunction) -> list[tuple[Place, int]]:
    """All places (including infinity) where ord < 0, with pole orders."""
    if f.is_zero():
        raise UndefinedForZero("pole divisor of the zero function")
    out = []
    for q, e in factor(f.den):
        out.append((Place.finite(q), e))
    at_inf = f.den.degree() - f.num.degree()
    if at_inf < 0:
        out.append((Place.infinity(), -at_inf))
    out.sort(key=lambda qe: qe[0].sort_key())
    return out


def _series_inverse(u: Poly, k: int) -> Poly:
    """Inverse of a unit power series mod x^k, as a polynomial."""
    p = u.p
    c0 = pow(u[0], -1, p)
    out = [c0] + [0] * (k - 1)
    for j in range(1, k):
        acc = 0
        for i in range(1, min(j, u.degree()) + 1):
            acc += u[i] * out[j - i]
        out[j] = -c0 * acc % p
    return Poly(out, p)


def laurent_coefficients(f: RationalFunction, q: Place, lo: int, hi: int) -> list[int]:
    """Coefficients of u^t for lo <= t < hi in the expansion of f at a
    degree-1 place, where u = x - a at a finite point and u = 1/x at infinity.

    The zero function expands to all zeros.
    """
    if q.degree != 1:
        raise NonRationalPlace("Laurent expansion needs a degree-1 place")
    if hi <= lo:
        return []
    if f.is_zero():
        return [0] * (hi - lo)
    p = f.p
    if q.is_infinity:
        num, den = f.num.reversed_coeffs(), f.den.reversed_coeffs()
        shift = f.den.degree() - f.num.degree()
    else:
        a = q.rational_point()
        num, den = f.num.taylor_shift(a), f.den.taylor_shift(a)
        shift = 0
    en = num.trailing_valuation()
    ed = den.trailing_valuation()
    e = en - ed + shift
    if hi <= e:
        return [0] * (hi - lo)
    k = hi - e
    unit_num = Poly(num.coeffs[en:], p)
    unit_den = Poly(den.coeffs[ed:], p)
    series = unit_num * _series_inverse(unit_den, k)
    return [series[t - e] if t >= e else 0 for t in range(lo, hi)]


@dataclass(frozen=True)
class DifferentialForm:
    """The form coefficient * dx."""

    coefficient: RationalFunction

    @property
    def p(self) -> int:
        return self.coefficient.p

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.coefficient + other.coefficient)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.coefficient - other.coefficient)

    def scale(self, c: int) -> "DifferentialForm":
        return DifferentialForm(self.coefficient.scale(c))

    def is_zero(self) -> bool:
        return self.coefficient.is_zero()

    def ord_at(self, q: Place) -> int:
        """dx is a uniformizer differential at finite places; at infinity
        dx = -du/u^2 shifts the order by -2."""
        base = ord_at(self.coefficient, q)
        return base - 2 if q.is_infinity else base


def form_laurent_coefficients(
    w: DifferentialForm, q: Place, lo: int, hi: int
) -> list[int]:
    """Coefficients of u^t du, lo <= t < hi, of the form at a degree-1 place."""
    if q.is_infinity:
        # r(x) dx = -r(1/u) u^{-2} du
        raw = laurent_coefficients(w.coefficient, q, lo + 2, hi + 2)
        return [-c % w.p for c in raw]
    return laurent_coefficients(w.coefficient, q, lo, hi)


def residue_at(w: DifferentialForm, q: Place) -> int:
    """Residue of the form at a degree-1 place, an element of F_p."""
    if q.degree != 1:
        raise NonRationalPlace(f"residue at a place of degree {q.degree}")
    if w.is_zero():
        return 0
    lo = w.ord_at(q)
    if lo > -1:
        return 0
    return form_laurent_coefficients(w, q, -1, 0)[0]


class RRSpace:
    """Space of rational functions with prescribed minimal orders.

    ``constraints`` maps finitely many places to lower bounds on ord; every
    unconstrained place (including infinity) demands ord >= 0.  On the
    projective line the space is h(x) * V / D for a fixed pole denominator D,
    a forced-vanishing prefactor V and deg h bounded by the degree budget at
    infinity; its dimension matches the divisor-degree count, asserted at
    construction.
    """

    __slots__ = ("p", "constraints", "den", "prefactor", "max_degree", "basis")

    def __init__(self, constraints: list[tuple[Place, int]], p: int):
        check_modulus(p)
        merged: dict[Place, int] = {}
        for q, c in constraints:
            merged[q] = max(merged.get(q, 0), c) if q in merged else c
        self.p = p
        self.constraints = merged
        inf_bound = 0
        den = Poly.const(1, p)
        pre = Poly.const(1, p)
        for q, c in sorted(merged.items(), key=lambda qc: qc[0].sort_key()):
            if q.is_infinity:
                inf_bound = c
            elif c < 0:
                den = den * q.poly.pow(-c)
            elif c > 0:
                pre = pre * q.poly.pow(c)
        self.den = den
        self.prefactor = pre
        self.max_degree = den.degree() - inf_bound - pre.degree()
        # cross-check against the divisor-degree dimension count
        divisor_degree = -sum(c * q.degree for q, c in merged.items())
        assert self.max_degree == divisor_degree
        self.basis = [
            RationalFunction(pre * Poly.x_power(j, p), den)
            for j in range(self.max_degree + 1)
        ]

    def dim(self) -> int:
        return len(self.basis)

    def represent(self, f: RationalFunction) -> list[int]:
        """Coordinates of f in the canonical basis; raises ValueError when
        f lies outside the space."""
        if f.is_zero():
            return [0] * self.dim()
        g = f * RationalFunction.from_poly(self.den)
        try:
            poly = g.as_poly()
        except ValueError:
            raise ValueError("function has a pole outside the allowed divisor")
        quo, rem = divmod(poly, self.prefactor)
        if not rem.is_zero():
            raise ValueError("function violates a required vanishing order")
        if quo.degree() > self.max_degree:
            raise ValueError("function violates the bound at infinity")
        return [quo[j] for j in range(self.max_degree + 1)]

    def contains(self, f: RationalFunction) -> bool:
        try:
            self.represent(f)
            return True
        except ValueError:
            return False


def riemann_roch_space(constraints: list[tuple[Place, int]], p: int) -> RRSpace:
    """Basis of { g : ord_q(g) >= bound at each constrained place, ord >= 0
    elsewhere } on the projective line."""
    return RRSpace(constraints, p)


# -- serialization (external interface) ---------------------------------

def rational_to_json(f: RationalFunction) -> dict:
    return {"num": list(f.num.coeffs), "den": list(f.den.coeffs)}


def rational_from_json(obj, p: int) -> RationalFunction:
    from .errors import ParseError

    if not isinstance(obj, dict) or "num" not in obj or "den" not in obj:
        raise ParseError("rational function needs 'num' and 'den' coefficient arrays")
    for key in ("num", "den"):
        arr = obj[key]
        if not isinstance(arr, list) or not all(isinstance(c, int) for c in arr):
            raise ParseError(f"field '{key}' must be an array of integers")
        for c in arr:
            if not 0 <= c < p:
                raise ParseError(f"coefficient {c} in '{key}' out of range [0, {p})")
    return RationalFunction(Poly(obj["num"], p), Poly(obj["den"], p))


def place_to_json(q: Place):
    return "inf" if q.is_infinity else list(q.poly.coeffs)


def place_from_json(obj, p: int) -> Place:
    from .errors import ParseError

    if obj == "inf":
        return Place.infinity()
    if not isinstance(obj, list) or not all(isinstance(c, int) for c in obj):
        raise ParseError("place must be 'inf' or a coefficient array")
    return Place.finite(Poly(obj, p))
