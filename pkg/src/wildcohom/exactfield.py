"""Prime-field arithmetic and dense exact linear algebra over F_p.

Field elements are plain integers in {0, ..., p-1}; the modulus p travels
with every matrix.  ``PrimeField`` validates a modulus once (deterministic
Miller-Rabin, valid far beyond the supported range p < 2**31) and offers
scalar arithmetic.  ``MatrixFp`` is an immutable dense matrix with
fraction-free Gaussian elimination: rank, reduced row echelon form,
canonical right-kernel bases and determinants, all with deterministic
pivoting (first nonzero entry in column order) so every derived object is
byte-reproducible.

The modulus is capped below 2**31 so that a product of two residues fits in
a signed 64-bit intermediate; every multiplication is reduced immediately.
"""

from __future__ import annotations

import numpy as np

from .errors import NotNilpotent

# Witnesses making Miller-Rabin deterministic for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_modulus(p: int) -> int:
    """Validate a matrix/field modulus; returns p."""
    if not isinstance(p, int) or not 2 <= p < MAX_MODULUS:
        raise ValueError(f"modulus must be an integer in [2, 2**31), got {p!r}")
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    return p


class PrimeField:
    """Validated arithmetic context for F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        self.p = check_modulus(p)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a % self.p * (b % self.p) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> int:
        return pow(a % self.p, e, self.p)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


def _as_array(entries, rows: int, cols: int, p: int) -> np.ndarray:
    a = np.asarray(entries, dtype=np.int64)
    if a.ndim == 1:
        if a.size != rows * cols:
            raise ValueError("entry count does not match rows*cols")
        a = a.reshape(rows, cols)
    elif a.shape != (rows, cols):
        raise ValueError("entry shape does not match rows*cols")
    a = np.mod(a, p)
    a.setflags(write=False)
    return a


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if (p - 1) ** 2 * inner < 2**63:
        return (a @ b) % p
    # Wide moduli: exact big-int accumulation, reduced at the end.
    return np.mod(a.astype(object) @ b.astype(object), p).astype(np.int64)


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form with deterministic pivoting."""
    a = np.array(a % p, dtype=np.int64)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        others = a[:, c].copy()
        others[r] = 0
        nzr = np.flatnonzero(others)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(others[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


class MatrixFp:
    """Immutable dense matrix over F_p with row-major entries."""

    __slots__ = ("rows", "cols", "p", "_a")

    def __init__(self, entries, rows: int, cols: int, p: int):
        self.p = check_modulus(p)
        self.rows = rows
        self.cols = cols
        self._a = _as_array(entries, rows, cols, p)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rows(cls, rows_of_entries, p: int) -> "MatrixFp":
        rows = len(rows_of_entries)
        cols = len(rows_of_entries[0]) if rows else 0
        return cls(rows_of_entries if rows else [], rows, cols, p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "MatrixFp":
        return cls(np.zeros((rows, cols), dtype=np.int64), rows, cols, p)

    @classmethod
    def identity(cls, n: int, p: int) -> "MatrixFp":
        return cls(np.eye(n, dtype=np.int64), n, n, p)

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> "MatrixFp":
        return cls(a, a.shape[0], a.shape[1], p)

    # -- plumbing -------------------------------------------------------

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying entries."""
        return self._a

    def __getitem__(self, ij):
        return int(self._a[ij])

    def row(self, i: int) -> list[int]:
        return [int(v) for v in self._a[i]]

    def to_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self._a]

    def __eq__(self, other):
        return (
            isinstance(other, MatrixFp)
            and self.p == other.p
            and self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self):
        return hash((self.p, self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"MatrixFp({self.rows}x{self.cols} mod {self.p})"

    def _check_mate(self, other: "MatrixFp"):
        if not isinstance(other, MatrixFp) or other.p != self.p:
            raise TypeError("matrices must share the same modulus")

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "MatrixFp") -> "MatrixFp":
        self._check_mate(other)
        return MatrixFp._wrap((self._a + other._a) % self.p, self.p)

    def __sub__(self, other: "MatrixFp") -> "MatrixFp":
        self._check_mate(other)
        return MatrixFp._wrap((self._a - other._a) % self.p, self.p)

    def __matmul__(self, other: "MatrixFp") -> "MatrixFp":
        self._check_mate(other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions disagree")
        return MatrixFp._wrap(_matmul_mod(self._a, other._a, self.p), self.p)

    def scale(self, c: int) -> "MatrixFp":
        return MatrixFp._wrap(self._a * (c % self.p) % self.p, self.p)

    def transpose(self) -> "MatrixFp":
        return MatrixFp._wrap(self._a.T.copy(), self.p)

    def __pow__(self, e: int) -> "MatrixFp":
        if self.rows != self.cols or e < 0:
            raise ValueError("powers need a square matrix and e >= 0")
        out = MatrixFp.identity(self.rows, self.p)
        for _ in range(e):
            out = out @ self
        return out

    def apply(self, vec) -> list[int]:
        """Matrix-vector product; vec has length ``cols``."""
        v = np.mod(np.asarray(vec, dtype=np.int64), self.p)
        if v.shape != (self.cols,):
            raise ValueError("vector length does not match cols")
        return [int(x) for x in _matmul_mod(self._a, v.reshape(-1, 1), self.p)[:, 0]]

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple["MatrixFp", tuple[int, ...]]:
        a, piv = _rref(self._a, self.p)
        return MatrixFp._wrap(a, self.p), piv

    def rank(self, self_check: bool = False) -> int:
        """Row rank; ``self_check`` reruns the elimination column-wise."""
        r = len(_rref(self._a, self.p)[1])
        if self_check:
            r2 = len(_rref(self._a.T, self.p)[1])
            if r != r2:
                raise AssertionError(f"rank self-check failed: {r} != {r2}")
        return r

    def kernel_basis(self) -> list[list[int]]:
        """Canonical basis of the right kernel.

        Kernel vectors are read off the reduced echelon form, one per free
        column, with a 1 in the free coordinate; output order follows the
        free columns left to right.
        """
        a, pivots = _rref(self._a, self.p)
        pivot_set = set(pivots)
        basis = []
        for c in range(self.cols):
            if c in pivot_set:
                continue
            v = [0] * self.cols
            v[c] = 1
            for r, pc in enumerate(pivots):
                v[pc] = int(-a[r, c]) % self.p
            basis.append(v)
        return basis

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant needs a square matrix")
        p = self.p
        a = np.array(self._a, dtype=np.int64)
        n = self.rows
        det = 1
        for c in range(n):
            nz = np.flatnonzero(a[c:, c])
            if nz.size == 0:
                return 0
            i = c + int(nz[0])
            if i != c:
                a[[c, i]] = a[[i, c]]
                det = -det
            piv = int(a[c, c])
            det = det * piv % p
            inv = pow(piv, -1, p)
            below = a[c + 1 :, c]
            nzb = np.flatnonzero(below)
            if nzb.size:
                factors = below[nzb] * inv % p
                a[c + 1 + nzb] = (a[c + 1 + nzb] - np.outer(factors, a[c])) % p
        return det % p


def nilpotent_rank_sequence(m: MatrixFp, p: int) -> list[int]:
    """Ranks [rank(m^0), rank(m^1), ..., rank(m^p)] of a nilpotent matrix.

    Raises NotNilpotent when rank(m^p) != 0, which signals either an action
    of the wrong group or a bug in the action matrix.
    """
    if m.rows != m.cols:
        raise ValueError("rank sequence needs a square matrix")
    check_modulus(p)
    seq = [m.rows]
    power = m
    for _ in range(p):
        seq.append(power.rank())
        if seq[-1] == 0:
            break
        power = power @ m
    while len(seq) < p + 1:
        seq.append(0)
    if seq[-1] != 0:
        raise NotNilpotent(f"matrix is not nilpotent of index <= {p}")
    return seq
