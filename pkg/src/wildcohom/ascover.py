"""Degree-p cyclic covers of the projective line in characteristic p.

A cover is given by y^p - y = f with f in F_p(x); the group generator acts
by y -> y + 1.  A generator is in *standard form at a place* when f is
regular there or has a pole of order prime to p, and in *global standard
form* when this holds at every place.  Reduction to standard form repeatedly
replaces y by y - g, i.e. f by f - (g^p - g), with g supported at the place
under repair; on the projective line this terminates and touches no other
place.

In standard form the branch locus is the pole set of f and the last
ramification-filtration jump at a branch place equals the pole order m.
The filtration sums are then

    d   = (m + 1)(p - 1)    (exponent of the different),
    d'  = m(p - 1),
    d'' = (m - 1)(p - 1).

Branch places of degree > 1 are allowed here (each stands for deg(Q)
geometric points with identical invariants); residue-based operations
elsewhere reject them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DisconnectedCover,
    GenusMismatch,
    HypothesisFails,
    NotStandardized,
)
from .exactfield import check_modulus
from .funcfield import (
    DifferentialForm,
    Place,
    Poly,
    RationalFunction,
    ord_at,
    pole_divisor,
)


def artin_schreier_operator(g: RationalFunction) -> RationalFunction:
    """g^p - g; covers are classified by f modulo the image of this map."""
    return g.pow(g.p) - g


def _poly_ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, u, v) with u*a + v*b = g, g monic when nonzero."""
    p = a.p
    r0, r1 = a, b
    u0, u1 = Poly.const(1, p), Poly.zero(p)
    v0, v1 = Poly.zero(p), Poly.const(1, p)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if not r0.is_zero() and r0.lead() != 1:
        inv = pow(r0.lead(), -1, p)
        r0, u0, v0 = r0.scale(inv), u0.scale(inv), v0.scale(inv)
    return r0, u0, v0


def _invert_mod(a: Poly, mod: Poly) -> Poly:
    g, u, _ = _poly_ext_gcd(a % mod, mod)
    if g.degree() != 0:
        raise ZeroDivisionError("element not invertible modulo the place")
    return u % mod


def _leading_residue(f: RationalFunction, q: Place, v: int) -> Poly:
    """Residue-field image of f * q^{-v} at a finite place q, where
    v = ord_q(f); a polynomial of degree < deg(q)."""
    unit = f * RationalFunction.from_poly(q.poly.pow(-v))
    num = unit.num % q.poly
    den_inv = _invert_mod(unit.den, q.poly)
    return num * den_inv % q.poly


def local_standard_form(
    f: RationalFunction, q: Place
) -> tuple[RationalFunction, RationalFunction]:
    """Reduce f at one place: returns (shift, f_reduced) with
    f_reduced = f - (shift^p - shift), ord_q(f_reduced) >= 0 or prime to p,
    and shift supported only at q.

    Pole orders at all other places are untouched.  The needed p-th root of
    a leading coefficient always exists because x -> x^p permutes every
    finite field of characteristic p (asserted below).
    """
    p = f.p
    shift = RationalFunction.zero(p)
    cur = f
    while not cur.is_zero():
        v = ord_at(cur, q)
        if v >= 0 or (-v) % p != 0:
            break
        j = -v // p
        if q.is_infinity:
            c = cur.num.lead() * pow(cur.den.lead(), -1, p) % p
            # Frobenius fixes the prime field, so c is its own p-th root.
            g = RationalFunction.from_poly(Poly.x_power(j, p).scale(c))
        else:
            c = _leading_residue(cur, q, v)
            d = q.degree
            croot = c
            for _ in range(d - 1):
                croot = croot.pow_mod(p, q.poly)
            assert croot.pow_mod(p, q.poly) == c, "p-th root in residue field"
            g = RationalFunction(croot, q.poly.pow(j))
        shift = shift + g
        nxt = cur - artin_schreier_operator(g)
        assert nxt.is_zero() or ord_at(nxt, q) > v, "reduction must make progress"
        cur = nxt
    return shift, cur


@dataclass(frozen=True)
class BranchDatum:
    """Ramification data at one branch place of a standardized cover."""

    place: Place
    m: int  # last ramification jump = pole order of f
    d: int
    d_prime: int
    d_double_prime: int

    @classmethod
    def from_jump(cls, place: Place, m: int, p: int) -> "BranchDatum":
        if m < 1 or m % p == 0:
            raise ValueError(f"jump {m} must be positive and prime to p={p}")
        return cls(place, m, (m + 1) * (p - 1), m * (p - 1), (m - 1) * (p - 1))


class ASCover:
    """A cover y^p - y = f of the projective line.

    ``standardized`` covers carry their branch data; ``shift`` records the
    accumulated generator change, so y_std = y_original - shift.
    """

    __slots__ = ("p", "f", "standardized", "shift", "branch")

    def __init__(
        self,
        p: int,
        f: RationalFunction,
        standardized: bool = False,
        shift: RationalFunction | None = None,
    ):
        check_modulus(p)
        if f.p != p:
            raise ValueError("modulus of f does not match p")
        self.p = p
        self.f = f
        self.standardized = standardized
        self.shift = shift if shift is not None else RationalFunction.zero(p)
        if standardized:
            self.branch = self._derive_branch()
        else:
            self.branch = None

    def _derive_branch(self) -> list[BranchDatum]:
        if self.f.is_zero() or self.f.num.degree() <= 0 and self.f.den.degree() == 0:
            raise DisconnectedCover("defining function is constant")
        out = []
        for q, e in pole_divisor(self.f):
            if e % self.p == 0:
                raise NotStandardized(
                    f"pole order {e} at {q} divisible by p={self.p}"
                )
            out.append(BranchDatum.from_jump(q, e, self.p))
        if not out:
            raise DisconnectedCover("no branch places: f is a constant shift")
        return out

    def branch_places(self) -> list[Place]:
        self._require_standardized()
        return [b.place for b in self.branch]

    def branch_degree(self) -> int:
        """Number of geometric branch points, Sum deg(Q)."""
        self._require_standardized()
        return sum(b.place.degree for b in self.branch)

    def _require_standardized(self):
        if not self.standardized:
            raise NotStandardized("cover must be standardized first")

    def all_branch_rational(self) -> bool:
        self._require_standardized()
        return all(b.place.degree == 1 for b in self.branch)

    def __repr__(self):
        tag = "standard" if self.standardized else "raw"
        return f"ASCover(p={self.p}, f={self.f!r}, {tag})"


def global_standard_form(cover: ASCover) -> ASCover:
    """Reduce the cover at every pole, finite places first in lexicographic
    coefficient order, then infinity.  Raises DisconnectedCover when the
    reduction ends in a constant, i.e. f lies in constants plus the image
    of g -> g^p - g over the algebraic closure."""
    f = cover.f
    total = RationalFunction.zero(cover.p)
    if f.is_zero():
        raise DisconnectedCover("f = 0 defines the split trivial cover")
    for q, _ in pole_divisor(f):
        s, f = local_standard_form(f, q)
        total = total + s
        if f.is_zero():
            raise DisconnectedCover("reduction emptied the defining function")
    return ASCover(cover.p, f, standardized=True, shift=cover.shift + total)


def jump_from_derivative(f: RationalFunction, q: Place) -> int:
    """Last ramification jump at q from the derivative alone.

    Applies when ord_q(f) < 0 and ord_q(df) < ord_q(f)/p - 1 (orders of
    differentials); then the jump is -ord_q(df) - 1, with no standard-form
    reduction required.  Raises HypothesisFails otherwise, and the caller
    falls back to the reduction route.
    """
    if f.is_zero() or ord_at(f, q) >= 0:
        raise HypothesisFails("function has no pole at the place")
    df = f.derivative()
    if df.is_zero():
        raise HypothesisFails("derivative vanishes identically")
    v_f = ord_at(f, q)
    v_df = DifferentialForm(df).ord_at(q)
    # strict inequality ord(df) < ord(f)/p - 1, compared exactly
    if not v_df * f.p < v_f - f.p:
        raise HypothesisFails(
            f"ord(df) = {v_df} does not beat ord(f)/p - 1 = {v_f}/{f.p} - 1"
        )
    m = -v_df - 1
    assert m >= 1 and m % f.p != 0
    return m


def genus(cover: ASCover) -> int:
    """Genus over the projective line: (p-1)(Sum deg(Q)(m_Q + 1) - 2)/2,
    the Riemann-Hurwitz count for a totally ramified degree-p cover."""
    cover._require_standardized()
    p = cover.p
    s = sum(b.place.degree * (b.m + 1) for b in cover.branch)
    numerator = (p - 1) * (s - 2)
    if numerator < 0 or numerator % 2:
        raise GenusMismatch(f"impossible ramification sum {s}")
    return numerator // 2
