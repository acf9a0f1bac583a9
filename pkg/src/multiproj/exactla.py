"""Dense exact linear algebra over a prime field F_p.

Matrices are ``numpy.int64`` arrays holding residues in ``[0, p)``.  With
``p < 2**31`` a product of two residues fits in an int64, so every update is
a single multiply followed by a reduction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_PRIME = 2**31 - 1
MIN_PRIME = 2**20


class DimensionMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in small:
        x = pow(b, d, n)
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
    if not (MIN_PRIME < p < 2**31) or not is_prime(p):
        raise ValueError(f"modulus must be a prime in (2^20, 2^31), got {p}")
    return p


def inv_mod(x: int, p: int = DEFAULT_PRIME) -> int:
    return pow(int(x), p - 2, p)


def rref(m, p: int = DEFAULT_PRIME) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    The pivot at each step is the first column (left to right) that has a
    nonzero entry among the remaining rows; the pivot row is the first such
    row.  This makes the output a deterministic function of the input.
    """
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    c0 = 0
    while r < rows and c0 < cols:
        nz = np.flatnonzero(a[r:, c0:].any(axis=0))
        if nz.size == 0:
            break
        c = c0 + int(nz[0])
        piv = r + int(np.flatnonzero(a[r:, c])[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * inv_mod(a[r, c], p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - col[hit, None] * a[r]) % p
        pivots.append(c)
        r += 1
        c0 = c + 1
    return a[:r], pivots


def rank(m, p: int = DEFAULT_PRIME) -> int:
    """Rank by forward elimination only (no back substitution)."""
    a = np.array(m, dtype=np.int64) % p
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = np.ascontiguousarray(a.T)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        row = a[r, c:] * inv_mod(a[r, c], p) % p
        below = a[r + 1:, c]
        hit = np.flatnonzero(below) + r + 1
        if hit.size:
            a[hit, c:] = (a[hit, c:] - a[hit, c][:, None] * row) % p
        r += 1
    return r


def transpose(m) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(m).T)


def matmul_mod(a, b, p: int = DEFAULT_PRIME) -> np.ndarray:
    """(a @ b) mod p without int64 overflow.

    ``a`` is split into 16-bit limbs so every partial dot product stays below
    2**63 for inner dimensions up to 2**16.
    """
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if inner > 2**16:
        raise ValueError("inner dimension too large for limb splitting")
    lo = a & 0xFFFF
    hi = a >> 16
    return ((hi @ b) % p * 65536 + (lo @ b)) % p


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^ambient_dim held as RREF basis rows."""

    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]
    p: int = DEFAULT_PRIME

    @classmethod
    def span(cls, vectors, ambient_dim: int, p: int = DEFAULT_PRIME) -> "Subspace":
        v = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim)
        if v.shape[0] == 0:
            return cls.zero(ambient_dim, p)
        r, piv = rref(v, p)
        return cls(ambient_dim, r, tuple(piv), p)

    @classmethod
    def zero(cls, ambient_dim: int, p: int = DEFAULT_PRIME) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), np.int64), (), p)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis))

    __hash__ = None

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.dim == 0:
            return not v.any()
        return rank(np.vstack([self.basis, v]), self.p) == self.dim


def kernel_rows(m, p: int = DEFAULT_PRIME, cols: int | None = None) -> np.ndarray:
    """Linearly independent rows spanning {v : m v = 0}, one per free column."""
    a = np.asarray(m, dtype=np.int64)
    if cols is None:
        cols = a.shape[1]
    a = a.reshape(-1, cols)
    r, piv = rref(a, p) if a.shape[0] else (np.zeros((0, cols), np.int64), [])
    free = np.setdiff1d(np.arange(cols), piv)
    k = np.zeros((free.size, cols), dtype=np.int64)
    k[np.arange(free.size), free] = 1
    if piv:
        k[:, piv] = (-r[:, free].T) % p
    return k


def kernel_basis(m, p: int = DEFAULT_PRIME, cols: int | None = None) -> Subspace:
    """Right kernel {v : m v = 0} as a Subspace of F_p^cols."""
    if cols is None:
        cols = np.asarray(m).shape[1]
    return Subspace.span(kernel_rows(m, p, cols), cols, p)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if b.dim == 0:
        return a
    if a.dim == 0:
        return b
    return Subspace.span(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def coker_dim(target_dim: int, image: Subspace) -> int:
    if image.ambient_dim != target_dim:
        raise DimensionMismatch(f"image lives in dimension {image.ambient_dim}, target is {target_dim}")
    return target_dim - image.dim


def _pow_mod_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def batched_rank(a: np.ndarray, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Ranks of a stack of equally shaped matrices, shape (B, m, n) -> (B,).

    Rows are processed in order: each row is reduced against the pivots found
    so far, and its first surviving nonzero entry becomes a new pivot.
    """
    a = np.array(a, dtype=np.int64) % p
    nb, m, n = a.shape
    ranks = np.zeros(nb, dtype=np.int64)
    if nb == 0 or m == 0 or n == 0:
        return ranks
    idx = np.arange(nb)
    for r in range(m):
        row = a[:, r, :]
        live = row.any(axis=1)
        if not live.any():
            continue
        c = np.argmax(row != 0, axis=1)
        piv = row[idx, c]
        inv = _pow_mod_vec(np.where(live, piv, 1), p - 2, p)
        row = row * inv[:, None] % p
        row[~live] = 0
        ranks += live
        if r + 1 < m:
            rest = a[:, r + 1:, :]
            f = rest[idx, :, c]  # (B, m-r-1)
            f[~live] = 0
            a[:, r + 1:, :] = (rest - f[:, :, None] * row[:, None, :]) % p
    return ranks


def rank_rational(m) -> int:
    """Rank over Q with exact fractions; slow cross-check backend."""
    rows = [[Fraction(int(x)) for x in row] for row in np.asarray(m).tolist()]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r
