"""Monomial bases of the multigraded pieces of K[x_ij].

A monomial of multidegree (a_1, ..., a_k) on P^{n_1} x ... x P^{n_k} is a
tuple of k exponent tuples, the i-th of length n_i + 1 summing to a_i.  The
basis of a graded piece lists monomials factor by factor (first factor
slowest) with each factor in lex order, so the coefficient vector of a
product of one-factor forms is the Kronecker product of their vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, prod
from typing import Sequence

import numpy as np

from .degrees import MultiIndex, multi_index
from .exactla import DEFAULT_PRIME

Monomial = tuple[tuple[int, ...], ...]
Point = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Space:
    """Shape (n_1, ..., n_k) of P^{n_1} x ... x P^{n_k}."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"every factor needs dimension >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def check_degree(self, a) -> MultiIndex:
        a = multi_index(a)
        if len(a) != self.k:
            raise ValueError(f"degree {a} has {len(a)} entries, space has {self.k} factors")
        return a

    def __str__(self) -> str:
        return " x ".join(f"P^{n}" for n in self.dims)


@lru_cache(maxsize=None)
def factor_exponents(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree d in n+1 variables, lex descending."""
    if n == 0:
        return ((d,),)
    out = []
    for e0 in range(d, -1, -1):
        for rest in factor_exponents(n - 1, d - e0):
            out.append((e0,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _exponent_array(n: int, d: int) -> np.ndarray:
    arr = np.array(factor_exponents(n, d), dtype=np.int64).reshape(-1, n + 1)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _factor_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {e: j for j, e in enumerate(factor_exponents(n, d))}


def factor_size(n: int, d: int) -> int:
    return comb(n + d, n) if d >= 0 else 0


def basis_size(X: Space, a: Sequence[int]) -> int:
    """N(a) = prod C(n_i + a_i, n_i); zero if some a_i < 0."""
    return prod(factor_size(n, d) for n, d in zip(X.dims, a))


def basis(X: Space, a) -> list[Monomial]:
    a = X.check_degree(a)
    return list(itertools.product(*(factor_exponents(n, d) for n, d in zip(X.dims, a))))


def monomial_degree(m: Monomial) -> MultiIndex:
    return tuple(sum(e) for e in m)


def monomial_index(X: Space, m: Monomial) -> int:
    idx = 0
    for n, e in zip(X.dims, m):
        d = sum(e)
        idx = idx * factor_size(n, d) + _factor_index(n, d)[e]
    return idx


def mult_by_var(m: Monomial, i: int, j: int) -> Monomial:
    if not 0 <= i < len(m):
        raise IndexError(f"factor index {i} out of range")
    if not 0 <= j < len(m[i]):
        raise IndexError(f"variable index {j} out of range for factor {i}")
    e = list(m[i])
    e[j] += 1
    return m[:i] + (tuple(e),) + m[i + 1:]


def monomial_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return tuple(tuple(x + y for x, y in zip(e1, e2)) for e1, e2 in zip(m1, m2))


def check_point(X: Space, point, p: int = DEFAULT_PRIME) -> Point:
    pt = tuple(tuple(int(c) % p for c in f) for f in point)
    if len(pt) != X.k:
        raise ValueError(f"point has {len(pt)} factors, space has {X.k}")
    for n, f in zip(X.dims, pt):
        if len(f) != n + 1:
            raise ValueError(f"factor coordinates {f} should have length {n + 1}")
        if not any(f):
            raise ValueError("zero coordinate vector is not a projective point")
    return pt


def normalize_factor(coords: Sequence[int], p: int = DEFAULT_PRIME) -> tuple[int, ...]:
    """Representative whose last nonzero coordinate is 1."""
    c = [int(x) % p for x in coords]
    nz = [j for j, x in enumerate(c) if x]
    if not nz:
        raise ValueError("zero coordinate vector is not a projective point")
    inv = pow(c[nz[-1]], p - 2, p)
    return tuple(x * inv % p for x in c)


def chart_index(coords: Sequence[int]) -> int:
    """Index of the coordinate set to 1 in the affine chart at this point."""
    return max(j for j, x in enumerate(coords) if x)


def evaluate(m: Monomial, point, p: int = DEFAULT_PRIME) -> int:
    val = 1
    for e, f in zip(m, point):
        if not any(int(c) % p for c in f):
            raise ValueError("zero coordinate vector is not a projective point")
        for x, c in zip(e, f):
            val = val * pow(int(c), x, p) % p
    return val


@lru_cache(maxsize=65536)
def factor_vector(n: int, d: int, coords: tuple[int, ...], direction: tuple[int, ...] | None,
                  p: int = DEFAULT_PRIME) -> np.ndarray:
    """Values of all degree-d monomials of one factor at ``coords``.

    With ``direction`` given (a homogeneous vector v), returns the directional
    derivatives sum_j v_j * d/dx_j of the monomials at ``coords`` instead.
    """
    ex = _exponent_array(n, d)
    q = np.array(coords, dtype=np.int64) % p
    powers = np.ones((n + 1, d + 1), dtype=np.int64)
    for e in range(1, d + 1):
        powers[:, e] = powers[:, e - 1] * q % p

    def values(shift_var: int | None) -> np.ndarray:
        out = np.ones(ex.shape[0], dtype=np.int64)
        for j in range(n + 1):
            e = ex[:, j] if j != shift_var else np.maximum(ex[:, j] - 1, 0)
            out = out * powers[j, e] % p
        return out

    if direction is None:
        vec = values(None)
    else:
        vec = np.zeros(ex.shape[0], dtype=np.int64)
        for j, v in enumerate(direction):
            v %= p
            if v == 0:
                continue
            coef = ex[:, j] % p * v % p
            vec = (vec + coef * values(j)) % p
    vec.setflags(write=False)
    return vec


@lru_cache(maxsize=None)
def mult_index_map(X: Space, a: MultiIndex, i: int, j: int) -> np.ndarray:
    """Column positions in basis(X, a + e_i) of x_ij * m for m in basis(X, a)."""
    src_idx = _factor_index(X.dims[i], a[i] + 1)
    fmap = np.array([src_idx[e[:j] + (e[j] + 1,) + e[j + 1:]]
                     for e in factor_exponents(X.dims[i], a[i])], dtype=np.int64)
    sizes = [factor_size(n, d) for n, d in zip(X.dims, a)]
    new_sizes = list(sizes)
    new_sizes[i] = factor_size(X.dims[i], a[i] + 1)
    grids = list(np.meshgrid(*(np.arange(s) for s in sizes), indexing="ij"))
    grids[i] = fmap[grids[i]]
    out = np.ravel_multi_index(tuple(g.ravel() for g in grids), new_sizes)
    out.setflags(write=False)
    return out


def multiply_by_var(vecs: np.ndarray, X: Space, a: MultiIndex, i: int, j: int) -> np.ndarray:
    """Coefficient rows of x_ij * f for rows f of ``vecs`` (degree a -> a + e_i)."""
    vecs = np.atleast_2d(vecs)
    out = np.zeros((vecs.shape[0], basis_size(X, a[:i] + (a[i] + 1,) + a[i + 1:])), dtype=np.int64)
    out[:, mult_index_map(X, a, i, j)] = vecs
    return out


def multiply_by_form(vecs: np.ndarray, X: Space, a: MultiIndex, i: int, form: Sequence[int],
                     p: int = DEFAULT_PRIME) -> np.ndarray:
    """Coefficient rows of l * f for the linear form l = sum_j form[j] x_ij."""
    vecs = np.atleast_2d(vecs)
    out = None
    for j, c in enumerate(form):
        c = int(c) % p
        if c == 0:
            continue
        term = multiply_by_var(vecs * c % p, X, a, i, j)
        out = term if out is None else (out + term) % p
    if out is None:
        out = np.zeros((vecs.shape[0], basis_size(X, a[:i] + (a[i] + 1,) + a[i + 1:])), dtype=np.int64)
    return out
