"""Independent brute-force verification of the closed-form predictions.

Everything on the cover y^p - y = f is written in the canonical shape

    w = sum_{i=0}^{p-1} y^i c_i,        c_i in F_p(x),

with dy eliminated through dy = -f'(x) dx (differentiate the defining
equation in characteristic p) and exponents reduced via y^p = y + f.  At a
branch place with jump m the p terms of such a sum have pairwise distinct
valuations (p does not divide m), so the valuation of the sum is the
minimum of the termwise valuations; all pole bookkeeping below rests on
this min rule, never on local power series.

The oracle computes:

* an explicit basis of the holomorphic forms as a direct sum of
  Riemann-Roch spaces, one per power of y, and the Jordan type of the
  generator action on it;
* the residue-coordinate map sending a form to the residues of its
  components in the normal basis generated by z = y^{p-1} (dual element
  z - 2), together with the explicit section built from logarithmic forms
  dx/(x - a) and the rank law it must satisfy;
* a finite model of the first de Rham cohomology as cocycles
  (form, principal tails at branch places) modulo coboundaries, truncated
  by a pole margin and recomputed at margin+1 as a stabilization check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ascover import ASCover
from .ascover import genus as cover_genus
from .errors import (
    ActionNotStable,
    DimensionMismatch,
    GenusMismatch,
    InternalError,
    NonRationalPlace,
    TraceDegreeOverflow,
)
from .exactfield import MatrixFp
from .funcfield import (
    DifferentialForm,
    Place,
    Poly,
    RationalFunction,
    RRSpace,
    form_laurent_coefficients,
    residue_at,
    riemann_roch_space,
)
from .gmodule import JordanType, jordan_type


def _binom_mod(n: int, k: int, p: int) -> int:
    return math.comb(n, k) % p


class YPoly:
    """Function-field element sum_i y^i c_i on a standardized cover,
    exponents < p after reduction by y^p = y + f."""

    __slots__ = ("cover", "coeffs")

    def __init__(self, cover: ASCover, coeffs):
        cover._require_standardized()
        self.cover = cover
        p = cover.p
        cs = [c for c in coeffs]
        while len(cs) > p:
            top = cs.pop()
            e = len(cs)  # we just removed the coefficient of y^e
            if top.is_zero():
                continue
            cs[e - p + 1] = cs[e - p + 1] + top
            cs[e - p] = cs[e - p] + top * cover.f
        while len(cs) < p:
            cs.append(RationalFunction.zero(p))
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, cover: ASCover) -> "YPoly":
        return cls(cover, [])

    @classmethod
    def monomial(cls, cover: ASCover, i: int, c: RationalFunction | None = None) -> "YPoly":
        p = cover.p
        c = c if c is not None else RationalFunction.one(p)
        return cls(cover, [RationalFunction.zero(p)] * i + [c])

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "YPoly") -> "YPoly":
        return YPoly(
            self.cover, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other: "YPoly") -> "YPoly":
        return YPoly(
            self.cover, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __mul__(self, other: "YPoly") -> "YPoly":
        p = self.cover.p
        out = [RationalFunction.zero(p) for _ in range(2 * p - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return YPoly(self.cover, out)

    def scale_rf(self, c: RationalFunction) -> "YPoly":
        return YPoly(self.cover, [a * c for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, YPoly)
            and other.cover is self.cover
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    # -- group action and trace -------------------------------------------

    def shift_y(self, a: int) -> "YPoly":
        """Substitute y -> y + a; the generator acts by a = 1."""
        p = self.cover.p
        a %= p
        if a == 0:
            return self
        out = [RationalFunction.zero(p) for _ in range(p)]
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            for l in range(i + 1):
                coef = _binom_mod(i, l, p) * pow(a, i - l, p) % p
                if coef:
                    out[l] = out[l] + c.scale(coef)
        return YPoly(self.cover, out)

    def trace(self) -> RationalFunction:
        """Trace to the base field: the only power of y with nonzero trace
        in the reduced range is y^{p-1}, with trace -1."""
        return -self.coeffs[self.cover.p - 1]

    def trace_by_summation(self) -> RationalFunction:
        """Trace computed literally as the sum over all conjugates; asserts
        the result is a base function.  Slower; used as a cross-check."""
        total = YPoly.zero(self.cover)
        for a in range(self.cover.p):
            total = total + self.shift_y(a)
        if any(not c.is_zero() for c in total.coeffs[1:]):
            raise InternalError("conjugate sum is not a base function")
        return total.coeffs[0]


def trace_of_power(cover: ASCover, i: int) -> RationalFunction:
    """Sum of (y + a)^i over a in F_p, reduced by the cover relation.

    For 0 <= i <= 2(p-1) this is the constant 0, except -1 when i is a
    positive multiple of p - 1; exercised exhaustively by the test suite.
    """
    p = cover.p
    if i > 2 * (p - 1):
        raise TraceDegreeOverflow(f"exponent {i} exceeds 2(p-1) = {2 * (p - 1)}")
    # build y^i by repeated multiplication to exercise the reduction
    acc = YPoly.monomial(cover, 0)
    y = YPoly.monomial(cover, 1)
    for _ in range(i):
        acc = acc * y
    return acc.trace_by_summation()


# -- holomorphic differentials -------------------------------------------


def _form_constraints(cover: ASCover, form_bound) -> list[tuple[Place, int]]:
    """Constraints on the rational coefficient g of a form y^i g dx, given
    per-branch bounds on the order of g dx; unbranched infinity demands a
    regular form there, i.e. ord(g) >= 2."""
    constraints = []
    saw_infinity = False
    for b in cover.branch:
        c = form_bound(b)
        if b.place.is_infinity:
            saw_infinity = True
            constraints.append((b.place, c + 2))
        else:
            constraints.append((b.place, c))
    if not saw_infinity:
        constraints.append((Place.infinity(), 2))
    return constraints


class H0Basis:
    """Basis of the holomorphic forms as sum_i y^i L_i dx with L_i a
    Riemann-Roch space; the term y^i g dx is regular exactly when
    ord_Q(g dx) >= ceil((i m_Q - d_Q)/p) at each branch place and g dx is
    regular elsewhere."""

    def __init__(self, cover: ASCover):
        cover._require_standardized()
        self.cover = cover
        p = cover.p
        self.levels: list[RRSpace] = []
        for i in range(p):
            constraints = _form_constraints(
                cover, lambda b: -((b.d - i * b.m) // p)
            )
            self.levels.append(riemann_roch_space(constraints, p))
        self.elements = [
            (i, g) for i, space in enumerate(self.levels) for g in space.basis
        ]
        expected = cover_genus(cover)
        if len(self.elements) != expected:
            raise GenusMismatch(
                f"basis size {len(self.elements)} != genus {expected}"
            )

    def dim(self) -> int:
        return len(self.elements)

    def sigma_matrix(self) -> MatrixFp:
        """Matrix of the generator action y -> y + 1 in this basis; columns
        are images of basis elements."""
        p = self.cover.p
        n = self.dim()
        offsets = []
        acc = 0
        for space in self.levels:
            offsets.append(acc)
            acc += space.dim()
        cols = []
        for i, g in self.elements:
            col = [0] * n
            for l in range(i + 1):
                coef = _binom_mod(i, l, p)
                if coef == 0:
                    continue
                try:
                    rep = self.levels[l].represent(g)
                except ValueError as exc:
                    raise ActionNotStable(
                        f"level {i} element leaves level {l}: {exc}"
                    ) from exc
                for k, ck in enumerate(rep):
                    if ck:
                        col[offsets[l] + k] = (col[offsets[l] + k] + coef * ck) % p
            cols.append(col)
        return MatrixFp(np.array(cols, dtype=np.int64).T, n, n, p)

    def as_ypoly(self, coords) -> YPoly:
        p = self.cover.p
        total = YPoly.zero(self.cover)
        for c, (i, g) in zip(coords, self.elements):
            if c % p:
                total = total + YPoly.monomial(self.cover, i, g.scale(c))
        return total


def h0_basis(cover: ASCover) -> H0Basis:
    return H0Basis(cover)


def holomorphic_jordan_type(cover: ASCover) -> JordanType:
    """Jordan type of the generator action on the holomorphic forms,
    computed from the explicit basis."""
    basis = H0Basis(cover)
    p = cover.p
    if basis.dim() == 0:
        return JordanType.zero(p)
    sigma = basis.sigma_matrix()
    return jordan_type(sigma - MatrixFp.identity(basis.dim(), p), p)


# -- residue coordinates and the split surjection ---------------------------


class ResidueMap:
    """The map collecting, for each branch place Q and group element a, the
    residue at Q of the a-th component of a form in the normal basis
    generated by z = y^{p-1} (with dual element z - 2):

        w = sum_a (y+a)^{p-1} w_a,   w_a = trace(((y+a)^{p-1} - 2) * w) dx.

    Coordinates are ordered with Q running over branch places in canonical
    order and a = 0..p-1 inside each place.
    """

    def __init__(self, cover: ASCover):
        cover._require_standardized()
        if not cover.all_branch_rational():
            raise NonRationalPlace("residue coordinates need rational branch places")
        self.cover = cover
        p = cover.p
        self.places = cover.branch_places()
        z = YPoly.monomial(cover, p - 1)
        two = YPoly.monomial(cover, 0, RationalFunction.const(2, p))
        self._dual_shifts = [z.shift_y(a) - two for a in range(p)]

    def dim_target(self) -> int:
        return len(self.places) * self.cover.p

    def component(self, w: YPoly, a: int) -> RationalFunction:
        """The a-th normal-basis component of the form w dx (a base form
        coefficient)."""
        return (self._dual_shifts[a] * w).trace()

    def coordinates(self, w: YPoly) -> list[int]:
        p = self.cover.p
        comps = [self.component(w, a) for a in range(p)]
        out = []
        for q in self.places:
            for a in range(p):
                out.append(residue_at(DifferentialForm(comps[a]), q))
        return out

    def kernel_module_basis(self) -> list[list[int]]:
        """Canonical basis of the admissible residue tuples: coordinate sums
        vanish at every place (total ramification) and the per-element sums
        over places vanish (residue theorem)."""
        p = self.cover.p
        nb = len(self.places)
        rows = []
        for qi in range(nb):
            row = [0] * (nb * p)
            for a in range(p):
                row[qi * p + a] = 1
            rows.append(row)
        for a in range(p):
            row = [0] * (nb * p)
            for qi in range(nb):
                row[qi * p + a] = 1
            rows.append(row)
        return MatrixFp.from_rows(rows, p).kernel_basis()

    def eta_forms(self) -> list[RationalFunction]:
        """Logarithmic base forms eta_Q with residue +1 at Q and -1 at the
        anchor place; the anchor is infinity when branched, else the first
        branch place, and its own form is 0."""
        p = self.cover.p
        anchors = [q for q in self.places if q.is_infinity] or [self.places[0]]
        anchor = anchors[0]
        out = []
        for q in self.places:
            if q == anchor:
                out.append(RationalFunction.zero(p))
            elif anchor.is_infinity:
                a = q.rational_point()
                out.append(RationalFunction(Poly.const(1, p), Poly((-a, 1), p)))
            elif q.is_infinity:
                a0 = anchor.rational_point()
                out.append(RationalFunction(Poly.const(-1, p), Poly((-a0, 1), p)))
            else:
                a = q.rational_point()
                a0 = anchor.rational_point()
                out.append(
                    RationalFunction(Poly.const(1, p), Poly((-a, 1), p))
                    - RationalFunction(Poly.const(1, p), Poly((-a0, 1), p))
                )
        return out

    def section(self, vec) -> YPoly:
        """Map a residue tuple to sum_{Q,a} vec[Q,a] (y+a)^{p-1} eta_Q."""
        p = self.cover.p
        etas = self.eta_forms()
        z = YPoly.monomial(self.cover, p - 1)
        total = YPoly.zero(self.cover)
        for a in range(p):
            h = RationalFunction.zero(p)
            for qi in range(len(self.places)):
                c = vec[qi * p + a] % p
                if c:
                    h = h + etas[qi].scale(c)
            if not h.is_zero():
                total = total + z.shift_y(a).scale_rf(h)
        return total


def branch_residue_matrix(cover: ASCover) -> tuple[MatrixFp, int, int]:
    """Residue coordinates of the holomorphic basis: returns the matrix
    (rows = basis forms), its rank, and the kernel dimension.

    The rank always equals (#B - 1)(p - 1), the dimension of the admissible
    residue module; the kernel dimension is genus - rank.
    """
    rmap = ResidueMap(cover)
    basis = H0Basis(cover)
    rows = [
        rmap.coordinates(YPoly.monomial(cover, i, g)) for i, g in basis.elements
    ]
    if not rows:
        mat = MatrixFp.zeros(0, rmap.dim_target(), cover.p)
    else:
        mat = MatrixFp.from_rows(rows, cover.p)
    rank = mat.rank()
    return mat, rank, basis.dim() - rank


def residue_section_check(cover: ASCover) -> bool:
    """Verify that the explicit section of the residue map is one: pushing
    every admissible residue tuple through the section and taking residue
    coordinates must give the tuple back."""
    rmap = ResidueMap(cover)
    for vec in rmap.kernel_module_basis():
        w = rmap.section(vec)
        if rmap.coordinates(w) != [v % cover.p for v in vec]:
            return False
    return True


# -- truncated de Rham model -------------------------------------------------


def _u_power(q: Place, t: int, p: int) -> RationalFunction:
    """u^t as a rational function, u = x - a at a finite rational place and
    u = 1/x at infinity."""
    if q.is_infinity:
        return RationalFunction.x_power(-t, p)
    a = q.rational_point()
    lin = Poly((-a, 1), p)
    if t >= 0:
        return RationalFunction.from_poly(lin.pow(t))
    return RationalFunction(Poly.const(1, p), lin.pow(-t))


@dataclass(frozen=True)
class DeRhamClassRep:
    """A cocycle of the truncated model: a form (list of y-level rational
    coefficients, times dx) together with, per branch place, a principal
    tail recorded as coordinates of the monomials y^i u^t."""

    omega: tuple[RationalFunction, ...]
    tails: tuple[tuple[int, ...], ...]


class DeRhamModel:
    """Finite cocycle/coboundary model of the first de Rham cohomology.

    Cocycles are pairs (w, (h_Q)) with w a form regular outside the branch
    fibers with termwise order >= -(d'_Q + p*margin) there, and h_Q a
    combination of non-regular tail monomials y^i u^t whose termwise order
    over Q stays above -(d'_Q + p*margin) + 1, such that w - d h_Q is
    regular over Q.  Coboundaries are (dh, tails of h) for h in the function
    space cut out by the same termwise bound, so every admissible tail
    direction is reachable by a coboundary.  The quotient must have
    dimension 2*genus; its generator Jordan type is the model's output.
    """

    def __init__(self, cover: ASCover, margin: int = 1):
        cover._require_standardized()
        if not cover.all_branch_rational():
            raise NonRationalPlace("de Rham model needs rational branch places")
        if margin < 1:
            raise ValueError("margin must be >= 1")
        self.cover = cover
        self.margin = margin
        p = cover.p
        self.p = p
        self.genus = cover_genus(cover)
        self.f_prime = cover.f.derivative()
        if self.f_prime.is_zero():
            raise InternalError("standardized defining function has df = 0")

        # -- ambient coordinates: form block then tail blocks --------------
        self.form_levels: list[RRSpace] = []
        for i in range(p):
            bound = lambda b, i=i: -((b.d + b.d_prime + p * margin - i * b.m) // p)
            self.form_levels.append(
                riemann_roch_space(_form_constraints(cover, bound), p)
            )
        self.form_offsets = []
        acc = 0
        for space in self.form_levels:
            self.form_offsets.append(acc)
            acc += space.dim()
        self.form_dim = acc

        # tail monomials per branch place: (level i, u-exponent t)
        self.tail_index: list[list[tuple[int, int]]] = []
        self.tail_offsets = []
        for b in cover.branch:
            self.tail_offsets.append(acc)
            monos = [
                (i, t)
                for i in range(p)
                for t in range(self._tail_floor(b, i), self._tail_top(b.m, i))
            ]
            self.tail_index.append(monos)
            acc += len(monos)
        self.dim_ambient = acc

        self._build_cocycles()
        self._build_coboundaries()
        self._build_quotient()

    def _tail_top(self, m: int, i: int) -> int:
        # monomial y^i u^t is regular over the branch place iff p t >= i m;
        # tails run over the non-regular exponents
        return -(-i * m // self.p)

    def _tail_floor(self, b, i: int) -> int:
        # deepest tail exponent reachable by the coboundary function space:
        # termwise order of y^i u^t over the place >= -(d' + p*margin) + 1
        return -((b.d_prime + self.p * self.margin - 1 - i * b.m) // self.p)

    # -- assembling the linear algebra ------------------------------------

    def _tail_derivative_components(
        self, b, i: int, t: int
    ) -> list[tuple[int, RationalFunction]]:
        """Components of d(y^i u^t) as (level, coefficient of dx)."""
        r = _u_power(b.place, t, self.p)
        out = []
        if i:
            out.append((i - 1, r * self.f_prime.scale(-i)))
        dr = r.derivative()
        if not dr.is_zero():
            out.append((i, dr))
        return out

    def _regularity_rows(self) -> list[list[int]]:
        """One row per (branch place, level, Laurent order below the
        regularity threshold): the window coefficient of w - d h_Q."""
        p = self.p
        rows = []
        for bi, b in enumerate(self.cover.branch):
            q = b.place
            # thresholds: y^l g dx regular over q iff ord_q(g dx) >= ceil((l m - d)/p)
            thresholds = [-((b.d - l * b.m) // p) for l in range(p)]
            # window floors: the worst pole any column can contribute per level
            floors = []
            df_ord = DifferentialForm(self.f_prime).ord_at(q)
            for l in range(p):
                lo = -((b.d + b.d_prime + p * self.margin - l * b.m) // p)
                lo = min(lo, self._tail_floor(b, l) - 1)  # d(u^t) term, t-1
                if l + 1 < p:
                    # tail * f' term from one level up
                    lo = min(lo, self._tail_floor(b, l + 1) + df_ord)
                floors.append(lo)
            for l in range(p):
                lo, hi = floors[l], thresholds[l]
                if lo >= hi:
                    continue
                width = hi - lo
                # columns of the form block, level l only
                col_windows: dict[int, list[int]] = {}
                for k, g in enumerate(self.form_levels[l].basis):
                    w = form_laurent_coefficients(DifferentialForm(g), q, lo, hi)
                    col_windows[self.form_offsets[l] + k] = w
                # tail columns at this place contribute -(d h) components
                for k, (i, t) in enumerate(self.tail_index[bi]):
                    acc = [0] * width
                    for lev, coeff in self._tail_derivative_components(b, i, t):
                        if lev != l:
                            continue
                        w = form_laurent_coefficients(
                            DifferentialForm(coeff), q, lo, hi
                        )
                        acc = [(x + y) % p for x, y in zip(acc, w)]
                    if any(acc):
                        col_windows[self.tail_offsets[bi] + k] = [
                            -x % p for x in acc
                        ]
                for w_idx in range(width):
                    row = [0] * self.dim_ambient
                    nonzero = False
                    for cidx, window in col_windows.items():
                        if window[w_idx]:
                            row[cidx] = window[w_idx]
                            nonzero = True
                    if nonzero:
                        rows.append(row)
        return rows

    def _build_cocycles(self):
        rows = self._regularity_rows()
        if rows:
            cond = MatrixFp.from_rows(rows, self.p)
        else:
            cond = MatrixFp.zeros(0, self.dim_ambient, self.p)
        _, pivots = cond.rref()
        self._free_cols = [
            c for c in range(self.dim_ambient) if c not in set(pivots)
        ]
        self._z_basis = cond.kernel_basis()
        self._z_arr = (
            np.array(self._z_basis, dtype=np.int64)
            if self._z_basis
            else np.zeros((0, self.dim_ambient), dtype=np.int64)
        )

    def _in_cocycles(self, vec) -> list[int]:
        """Coordinates of an ambient vector in the cocycle basis; asserts
        membership."""
        coords = [vec[c] % self.p for c in self._free_cols]
        recon = (
            np.array(coords, dtype=np.int64) @ self._z_arr % self.p
            if coords
            else np.zeros(self.dim_ambient, dtype=np.int64)
        )
        if not np.array_equal(recon, np.mod(np.array(vec, dtype=np.int64), self.p)):
            raise ActionNotStable("vector left the cocycle space")
        return coords

    def _function_space_levels(self) -> list[RRSpace]:
        """Pole-bounded function space whose coboundaries stay inside the
        model: termwise order >= -(d'_Q + p*margin) + 1 over branch fibers;
        regular elsewhere (the Riemann-Roch default)."""
        p = self.p
        out = []
        for i in range(p):
            constraints = []
            for b in self.cover.branch:
                bound = -((b.d_prime + p * self.margin - 1 - i * b.m) // p)
                constraints.append((b.place, bound))
            out.append(riemann_roch_space(constraints, p))
        return out

    def _tail_projection(self, bi: int, i: int, g: RationalFunction) -> dict[int, int]:
        """Coordinates in the tail block of the non-regular part of y^i g
        at branch place bi."""
        b = self.cover.branch[bi]
        lo = self._tail_floor(b, i)
        hi = self._tail_top(b.m, i)
        if hi <= lo:
            return {}
        from .funcfield import laurent_coefficients

        window = laurent_coefficients(g, b.place, lo, hi)
        out = {}
        monos = self.tail_index[bi]
        for t, c in zip(range(lo, hi), window):
            if c:
                k = monos.index((i, t))
                out[self.tail_offsets[bi] + k] = c
        return out

    def _build_coboundaries(self):
        p = self.p
        gens = []
        for i, space in enumerate(self._function_space_levels()):
            for u in space.basis:
                vec = [0] * self.dim_ambient
                # dh = -i y^{i-1} u f' dx + y^i u' dx
                comps = []
                if i:
                    comps.append((i - 1, u * self.f_prime.scale(-i)))
                du = u.derivative()
                if not du.is_zero():
                    comps.append((i, du))
                for lev, coeff in comps:
                    try:
                        rep = self.form_levels[lev].represent(coeff)
                    except ValueError as exc:
                        raise InternalError(
                            f"coboundary leaves the form block: {exc}"
                        ) from exc
                    off = self.form_offsets[lev]
                    for k, ck in enumerate(rep):
                        vec[off + k] = (vec[off + k] + ck) % p
                # tails: the non-regular parts of h itself
                for bi in range(len(self.cover.branch)):
                    for cidx, c in self._tail_projection(bi, i, u).items():
                        vec[cidx] = (vec[cidx] + c) % p
                if any(vec):
                    gens.append(vec)
        # coboundaries must be cocycles
        self._b_coords = [self._in_cocycles(v) for v in gens]

    def _build_quotient(self):
        p = self.p
        zdim = len(self._free_cols)
        if self._b_coords:
            bmat = MatrixFp.from_rows(self._b_coords, p)
        else:
            bmat = MatrixFp.zeros(0, zdim, p)
        self._b_rref, self._b_pivots = bmat.rref()
        self.quotient_dim = zdim - len(self._b_pivots)
        self._quot_cols = [
            c for c in range(zdim) if c not in set(self._b_pivots)
        ]

    # -- operators on the quotient ----------------------------------------

    def _reduce_mod_b(self, coords) -> np.ndarray:
        v = np.mod(np.array(coords, dtype=np.int64), self.p)
        arr = self._b_rref.array
        for r, c in enumerate(self._b_pivots):
            if v[c]:
                v = (v - v[c] * arr[r]) % self.p
        return v

    def _sigma_ambient(self, vec) -> list[int]:
        """Generator action on an ambient vector: binomial shifts on both
        the form block and the tail blocks, with regular tail monomials
        projected away."""
        p = self.p
        out = [0] * self.dim_ambient
        for l, space in enumerate(self.form_levels):
            off = self.form_offsets[l]
            for k in range(space.dim()):
                c = vec[off + k]
                if c == 0:
                    continue
                g = space.basis[k]
                for lower in range(l + 1):
                    coef = _binom_mod(l, lower, p) * c % p
                    if coef == 0:
                        continue
                    rep = self.form_levels[lower].represent(g)
                    off2 = self.form_offsets[lower]
                    for k2, ck in enumerate(rep):
                        if ck:
                            out[off2 + k2] = (out[off2 + k2] + coef * ck) % p
        for bi, monos in enumerate(self.tail_index):
            off = self.tail_offsets[bi]
            b = self.cover.branch[bi]
            for k, (i, t) in enumerate(monos):
                c = vec[off + k]
                if c == 0:
                    continue
                for lower in range(i + 1):
                    coef = _binom_mod(i, lower, p) * c % p
                    if coef == 0:
                        continue
                    if t >= self._tail_top(b.m, lower):
                        continue  # regular monomial: zero in the quotient
                    k2 = monos.index((lower, t))
                    out[off + k2] = (out[off + k2] + coef) % p
        return out

    def quotient_coordinates(self, ambient_vec) -> list[int]:
        z = self._in_cocycles(ambient_vec)
        red = self._reduce_mod_b(z)
        return [int(red[c]) for c in self._quot_cols]

    def class_rep(self, ambient_vec) -> DeRhamClassRep:
        """Materialize an ambient vector as (form coefficients, tails)."""
        p = self.p
        omega = []
        for l, space in enumerate(self.form_levels):
            off = self.form_offsets[l]
            g = RationalFunction.zero(p)
            for k in range(space.dim()):
                c = ambient_vec[off + k] % p
                if c:
                    g = g + space.basis[k].scale(c)
            omega.append(g)
        tails = []
        for bi, monos in enumerate(self.tail_index):
            off = self.tail_offsets[bi]
            tails.append(tuple(ambient_vec[off + k] % p for k in range(len(monos))))
        return DeRhamClassRep(tuple(omega), tuple(tails))

    def sigma_quotient(self) -> MatrixFp:
        p = self.p
        n = self.quotient_dim
        cols = []
        zdim = len(self._free_cols)
        for c in self._quot_cols:
            zvec = [0] * zdim
            zvec[c] = 1
            ambient = (
                np.array(zvec, dtype=np.int64) @ self._z_arr % p
                if zdim
                else np.zeros(self.dim_ambient, dtype=np.int64)
            )
            image = self._sigma_ambient([int(v) for v in ambient])
            red = self._reduce_mod_b(self._in_cocycles(image))
            cols.append([int(red[cc]) for cc in self._quot_cols])
        if not cols:
            return MatrixFp.zeros(0, 0, p)
        return MatrixFp(np.array(cols, dtype=np.int64).T, n, n, p)

    def jordan(self) -> JordanType:
        if self.quotient_dim == 0:
            return JordanType.zero(self.p)
        sigma = self.sigma_quotient()
        return jordan_type(
            sigma - MatrixFp.identity(self.quotient_dim, self.p), self.p
        )

    # -- the Hodge filtration ----------------------------------------------

    def holomorphic_image_coords(self) -> list[list[int]]:
        """Quotient coordinates of the classes (w, 0) for the holomorphic
        basis forms."""
        basis = H0Basis(self.cover)
        out = []
        for i, g in basis.elements:
            vec = [0] * self.dim_ambient
            rep = self.form_levels[i].represent(g)
            off = self.form_offsets[i]
            for k, ck in enumerate(rep):
                vec[off + k] = ck
            out.append(self.quotient_coordinates(vec))
        return out


def de_rham_jordan_type(
    cover: ASCover, margin: int = 1
) -> tuple[JordanType, bool]:
    """Jordan type of the truncated de Rham model, recomputed at margin+1;
    the flag reports whether the two margins agree.

    Raises DimensionMismatch when the refined model misses dimension
    2*genus (and reports both dimensions when the coarse one also does).
    """
    m1 = DeRhamModel(cover, margin)
    m2 = DeRhamModel(cover, margin + 1)
    expected = 2 * cover_genus(cover)
    if m2.quotient_dim != expected:
        raise DimensionMismatch(
            f"dimensions {m1.quotient_dim}/{m2.quotient_dim} at margins "
            f"{margin}/{margin + 1}, expected {expected}"
        )
    jt2 = m2.jordan()
    stabilized = m1.quotient_dim == expected and m1.jordan() == jt2
    return jt2, stabilized


def hodge_filtration_check(cover: ASCover, margin: int = 1) -> bool:
    """Verify the two-step filtration of the de Rham model: the holomorphic
    classes (w, 0) embed, span a generator-stable subspace of dimension
    genus, and the induced quotient has the Jordan type of the structure
    sheaf cohomology (the dual, hence equal, type of the holomorphic one)."""
    from .predict import predict

    model = DeRhamModel(cover, margin)
    g = cover_genus(cover)
    if model.quotient_dim != 2 * g:
        raise DimensionMismatch(
            f"model dimension {model.quotient_dim} != {2 * g}"
        )
    coords = model.holomorphic_image_coords()
    if g == 0:
        return True
    p = cover.p
    hmat = MatrixFp.from_rows(coords, p)
    if hmat.rank() != g:
        return False
    # quotient of the 2g-dimensional space by the rank-g holomorphic image
    h_rref, h_pivots = hmat.rref()
    rest = [c for c in range(model.quotient_dim) if c not in set(h_pivots)]
    arr = h_rref.array

    def reduce_mod_h(vec):
        v = np.mod(np.array(vec, dtype=np.int64), p)
        for r, c in enumerate(h_pivots):
            if v[c]:
                v = (v - v[c] * arr[r]) % p
        return v

    sigma = model.sigma_quotient()
    # stability of the image under the action
    for row in coords:
        img = sigma.apply(row)
        if any(reduce_mod_h(img)):
            return False
    cols = []
    for c in rest:
        e = [0] * model.quotient_dim
        e[c] = 1
        red = reduce_mod_h(sigma.apply(e))
        cols.append([int(red[cc]) for cc in rest])
    n = len(rest)
    induced = MatrixFp(np.array(cols, dtype=np.int64).T, n, n, p)
    induced_type = jordan_type(induced - MatrixFp.identity(n, p), p)
    return induced_type == predict(cover).h1
