"""Closed-form equivariant predictions for degree-p cyclic covers.

For a standardized connected cover with branch jumps m_Q the three
cohomology modules decompose as

    H^0(Omega)  =  J_p^{g_Y}  + J_{p-1}^{#B - 1} + sum_Q (local part at Q),
    H^1(O)      =  H^0(Omega)                      (self-dual types),
    H^1_dR      =  J_p^{2 g_Y} + J_{p-1}^{alpha},  alpha = sum_Q (m_Q+1) - 2,

with the local part at Q equal to sum_i J_i^{a_Q(i)} where

    a_Q(i) = ceil(m_Q (i+1) / p) - ceil(m_Q i / p),     i = 1, ..., p-1.

Branch places of degree d stand for d geometric points and contribute with
multiplicity d; #B above counts geometric points.  The base genus g_Y
enters only through the free summands, so the formula layer accepts it as a
parameter (the oracle itself always runs over the projective line, g_Y = 0).

The local de Rham part at Q is J_{p-1}^{m_Q - 1}, and the explicit local
bases are indexed by

    H0 indices:  0 <= i <= p-2,  2 <= j,  m i + p j <= (m+1)(p-1) + 1,
    H1 indices:  1 <= i <= p-1,  1 <= j,  p j - m i < 1,
    dR indices:  0 <= i <= p-2,  2 <= j <= m,

of sizes (m-1)(p-1)/2, (m-1)(p-1)/2 and (m-1)(p-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ascover import ASCover, genus as cover_genus
from .funcfield import Place
from .gmodule import JordanType


def local_block_multiplicity(m: int, i: int, p: int) -> int:
    """Multiplicity a_Q(i) of the dimension-i indecomposable in the local
    part contributed by a branch point with jump m."""
    if math.gcd(m, p) != 1:
        raise ValueError(f"jump {m} must be prime to p={p}")
    if not 1 <= i <= p - 1:
        raise ValueError(f"block size {i} out of range 1..{p - 1}")
    ceil_hi = -(-m * (i + 1) // p)
    ceil_lo = -(-m * i // p)
    return ceil_hi - ceil_lo


def local_jordan_type(m: int, p: int) -> JordanType:
    """sum_i J_i^{a_Q(i)}; its dimension is (m-1)(p-1)/2 (asserted)."""
    counts = {i: local_block_multiplicity(m, i, p) for i in range(1, p)}
    jt = JordanType.from_counts(p, counts)
    assert jt.dim() == (m - 1) * (p - 1) // 2
    return jt


def local_basis_indices(
    m: int, p: int
) -> tuple[list[tuple[int, int]], list[tuple[int, int]], list[tuple[int, int]]]:
    """Explicit (i, j) index sets for the local bases of the three modules
    at a branch point with jump m; see the module docstring for the ranges."""
    if math.gcd(m, p) != 1:
        raise ValueError(f"jump {m} must be prime to p={p}")
    h0 = [
        (i, j)
        for i in range(0, p - 1)
        for j in range(2, (m + 1) * (p - 1) + 2)
        if m * i + p * j <= (m + 1) * (p - 1) + 1
    ]
    h1 = [
        (i, j)
        for i in range(1, p)
        for j in range(1, m + 1)
        if p * j - m * i < 1
    ]
    dr = [(i, j) for i in range(0, p - 1) for j in range(2, m + 1)]
    target = (m - 1) * (p - 1) // 2
    assert len(h0) == len(h1) == target and len(dr) == 2 * target
    return h0, h1, dr


@dataclass(frozen=True)
class LocalPrediction:
    """Per-branch-place local module types and basis index sets; types are
    per geometric point (a place of degree d contributes d copies)."""

    place: Place
    m: int
    h0: JordanType
    h1: JordanType
    h1dr: JordanType
    h0_indices: tuple[tuple[int, int], ...]
    h1_indices: tuple[tuple[int, int], ...]
    dr_indices: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CohomPrediction:
    p: int
    g_base: int
    genus: int
    alpha: int
    h0: JordanType
    h1: JordanType
    h1dr: JordanType
    local: tuple[LocalPrediction, ...]


def predict(cover: ASCover, g_base: int = 0) -> CohomPrediction:
    """Predicted Jordan types of the three cohomology modules.

    ``g_base`` is the genus of the base curve in the displayed formulas;
    the cover itself always lives over the projective line, so dimension
    checks against the cover's genus use g_base = 0.
    """
    cover._require_standardized()
    p = cover.p
    geom = cover.branch_degree()
    alpha = sum(b.place.degree * (b.m + 1) for b in cover.branch) - 2

    h0 = JordanType.from_counts(p, {p: g_base}) + JordanType.from_counts(
        p, {p - 1: geom - 1}
    )
    locals_ = []
    for b in cover.branch:
        lt = local_jordan_type(b.m, p)
        h0 = h0 + lt.scale(b.place.degree)
        i0, i1, idr = local_basis_indices(b.m, p)
        locals_.append(
            LocalPrediction(
                b.place,
                b.m,
                lt,
                lt,  # dual types coincide
                JordanType.from_counts(p, {p - 1: b.m - 1}),
                tuple(i0),
                tuple(i1),
                tuple(idr),
            )
        )
    h1dr = JordanType.from_counts(p, {p: 2 * g_base, p - 1: alpha})
    genus_x = p * g_base + (p - 1) * (
        sum(b.place.degree * (b.m + 1) for b in cover.branch) - 2
    ) // 2
    if g_base == 0:
        assert genus_x == cover_genus(cover)
    assert h0.dim() == genus_x and h1dr.dim() == 2 * genus_x
    return CohomPrediction(
        p, g_base, genus_x, alpha, h0, h0, h1dr, tuple(locals_)
    )


def is_weakly_ramified(cover: ASCover) -> bool:
    """True when every jump is 1, i.e. the second ramification groups vanish;
    exactly then the de Rham type splits as H^0-type plus H^1-type."""
    cover._require_standardized()
    weak = all(b.m == 1 for b in cover.branch)
    if weak:
        pred = predict(cover)
        assert pred.h1dr == pred.h0 + pred.h1
    return weak
