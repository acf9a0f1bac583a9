"""Sections of pi_i^* Omega^1_{P^{n_i}}(t) twisted by O(outer) on the other factors.

By the Euler sequence these are the (n_i + 1)-tuples (f_0, ..., f_{n_i}) of
forms of degree outer with t-1 in slot i satisfying sum_j x_ij f_j = 0.  A
section is stored as the concatenation of the coefficient vectors of f_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cohomo import UnsupportedTwist
from .degrees import MultiIndex
from .exactla import DEFAULT_PRIME, kernel_rows, matmul_mod, rank
from .report import VerifyReport
from .ring import Space, basis_size, factor_size, factor_vector, multiply_by_var
from .scheme import Kind, ZeroScheme, random_general


def omega_h0(n: int, t: int) -> int:
    """h0(Omega^1_{P^n}(t)) = (n+1) C(n+t-1, n) - C(n+t, n) for t >= 1."""
    if t < 1:
        return 0
    return (n + 1) * math.comb(n + t - 1, n) - math.comb(n + t, n)


@dataclass
class KernelSectionSpace:
    space: Space
    slot: int
    t: int
    outer: MultiIndex
    basis: np.ndarray
    p: int = DEFAULT_PRIME

    @property
    def source_degree(self) -> MultiIndex:
        return self.outer[:self.slot] + (self.t - 1,) + self.outer[self.slot:]

    @property
    def target_degree(self) -> MultiIndex:
        return self.outer[:self.slot] + (self.t,) + self.outer[self.slot:]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def alpha(self) -> int:
        """h0 of the twist on the other factors."""
        dims = self.space.dims[:self.slot] + self.space.dims[self.slot + 1:]
        return math.prod(factor_size(n, d) for n, d in zip(dims, self.outer))

    def components(self) -> list[np.ndarray]:
        """Split each basis row into its n_i + 1 coefficient blocks f_j."""
        N = basis_size(self.space, self.source_degree)
        return [self.basis[:, j * N:(j + 1) * N] for j in range(self.space.dims[self.slot] + 1)]

    def euler_residual(self) -> np.ndarray:
        """sum_j x_ij f_j for every basis row; identically zero for a valid space."""
        X, src = self.space, self.source_degree
        out = np.zeros((self.dim, basis_size(X, self.target_degree)), dtype=np.int64)
        for j, f in enumerate(self.components()):
            out = (out + multiply_by_var(f, X, src, self.slot, j)) % self.p
        return out


def euler_matrix(X: Space, slot: int, src: MultiIndex) -> np.ndarray:
    """Matrix of (f_0..f_n) -> sum_j x_j f_j from (n+1) copies of degree src."""
    N = basis_size(X, src)
    eye = np.eye(N, dtype=np.int64)
    blocks = [multiply_by_var(eye, X, src, slot, j) for j in range(X.dims[slot] + 1)]
    return np.vstack(blocks).T


def build_sections(X: Space, slot: int, t: int, outer: Sequence[int] = (),
                   p: int = DEFAULT_PRIME) -> KernelSectionSpace:
    if t < 1:
        raise UnsupportedTwist(f"cotangent twist must be >= 1, got {t}")
    outer = tuple(int(x) for x in outer)
    if len(outer) != X.k - 1 or any(x < 0 for x in outer):
        raise ValueError(f"outer twist needs {X.k - 1} nonnegative entries")
    src = outer[:slot] + (t - 1,) + outer[slot:]
    basis = kernel_rows(euler_matrix(X, slot, src), p)
    return KernelSectionSpace(X, slot, t, outer, basis, p)


def point_conditions(V: KernelSectionSpace, points: Iterable) -> np.ndarray:
    """Rows (one per point and coordinate j) giving f_j(point) on the basis of V."""
    X, src = V.space, V.source_degree
    N = basis_size(X, src)
    n = X.dims[V.slot]
    rows = []
    for pt in points:
        ev = np.ones(1, dtype=np.int64)
        for h, (nh, q) in enumerate(zip(X.dims, pt)):
            ev = np.multiply.outer(ev, factor_vector(nh, src[h], tuple(q), None, V.p)).ravel() % V.p
        for j in range(n + 1):
            row = np.zeros((n + 1) * N, dtype=np.int64)
            row[j * N:(j + 1) * N] = ev
            rows.append(row)
    if not rows or V.dim == 0:
        return np.zeros((len(rows), V.dim), dtype=np.int64)
    return matmul_mod(np.array(rows), V.basis.T, V.p)


def impose_points(S: ZeroScheme, V: KernelSectionSpace) -> tuple[int, int]:
    """(h0, h1) of I_S twisted by the bundle: dim V - rank and n_i * #S - rank."""
    if any(c.kind is not Kind.REDUCED for c in S.components):
        raise ValueError("only reduced points can be imposed on bundle sections")
    if S.space != V.space:
        raise ValueError("scheme and section space live on different spaces")
    r = rank(point_conditions(V, S.support), V.p)
    return V.dim - r, V.space.dims[V.slot] * len(S) - r


def point_rank(V: KernelSectionSpace, point) -> int:
    return rank(point_conditions(V, [point]), V.p)


def _rng_seed(*parts: int) -> np.random.Generator:
    return np.random.default_rng([int(x) for x in parts])


def verify_cotangent_points(outer_dims: Sequence[int], outer: Sequence[int], xs: Sequence[int], seeds: int = 20,
               base_seed: int = 0, threshold: float = 19 / 20, p: int = DEFAULT_PRIME) -> VerifyReport:
    """h0 = max{0, alpha(x^2-1) - 2s}, h1 = max{0, 2s - alpha(x^2-1)} on Y x P^2.

    s runs from 0 to ceil(alpha(x^2-1)/2) + 2 for every x.  A seed passes when
    every (x, s) matches; the section-space dimension is checked exactly.
    """
    outer_dims, outer = tuple(outer_dims), tuple(outer)
    X = Space(outer_dims + (2,))
    slot = X.k - 1
    seed_ok = [True] * seeds
    records = []
    dims_ok = True
    for x in xs:
        V = build_sections(X, slot, x, outer, p)
        alpha = V.alpha
        expected_dim = alpha * (x * x - 1)
        dims_ok &= V.dim == expected_dim and not V.euler_residual().any()
        top = -(-expected_dim // 2) + 2
        for s in range(top + 1):
            e0, e1 = max(0, expected_dim - 2 * s), max(0, 2 * s - expected_dim)
            hits = 0
            for idx in range(seeds):
                S = random_general(X, s, "reduced", _rng_seed(base_seed + idx, x, s), p)
                h0, h1 = impose_points(S, V)
                good = (h0, h1) == (e0, e1)
                hits += good
                seed_ok[idx] &= good
            records.append({"x": x, "s": s, "dim": V.dim, "expected_h0": e0, "expected_h1": e1,
                            "passed_seeds": hits, "pass": hits == seeds})
    if not dims_ok:
        seed_ok = [False] * seeds
    return VerifyReport("cotangent_points", {"outer_space": list(outer_dims), "outer": list(outer), "x": list(xs)},
                        seeds, seed_ok, records, threshold,
                        {"bundle": {"slot": slot, "alpha": math.prod(
                            factor_size(n, d) for n, d in zip(outer_dims, outer))},
                         "section_dims_ok": bool(dims_ok)})


def cotangent_thresholds(X: Space, i: int, a: Sequence[int]) -> tuple[int, int]:
    """floor and ceil of h0(Omega(a_i + 1)) / n_i, times prod_{j != i} N_j(a_j)."""
    n = X.dims[i]
    h = omega_h0(n, a[i] + 1)
    rest = math.prod(factor_size(X.dims[j], a[j]) for j in range(X.k) if j != i)
    return (h // n) * rest, (-(-h // n)) * rest


def verify_cotangent_thresholds(dims: Sequence[int], i: int, a: Sequence[int], s_values: Sequence[int] | None = None,
               seeds: int = 20, base_seed: int = 0, threshold: float = 19 / 20,
               p: int = DEFAULT_PRIME) -> VerifyReport:
    """h1 = 0 for s <= tau_1 and h0 = 0 for s >= tau_2 on pi_i^* Omega(a_i + 1)(a).

    The lower bound on a_i needed by the statement is not known explicitly,
    so a failure is labelled as outside the effective range rather than as a
    counterexample.
    """
    X = Space(tuple(dims))
    a = tuple(int(x) for x in a)
    outer = a[:i] + a[i + 1:]
    V = build_sections(X, i, a[i] + 1, outer, p)
    tau1, tau2 = cotangent_thresholds(X, i, a)
    if s_values is None:
        s_values = range(0, tau2 + 3)
    seed_ok = [True] * seeds
    records = []
    for s in s_values:
        if tau1 < s < tau2:
            continue
        claim = "h1=0" if s <= tau1 else "h0=0"
        hits = 0
        for idx in range(seeds):
            S = random_general(X, s, "reduced", _rng_seed(base_seed + idx, s), p)
            h0, h1 = impose_points(S, V)
            good = h1 == 0 if s <= tau1 else h0 == 0
            hits += good
            seed_ok[idx] &= good
        rec = {"s": s, "claim": claim, "passed_seeds": hits, "pass": hits == seeds}
        if hits < seeds:
            rec["note"] = "outside effective range"
        records.append(rec)
    return VerifyReport("cotangent_thresholds", {"space": list(X.dims), "i": i, "a": list(a)}, seeds, seed_ok,
                        records, threshold,
                        {"bundle": {"slot": i, "t": a[i] + 1, "alpha": math.prod(
                            factor_size(X.dims[j], a[j]) for j in range(X.k) if j != i)},
                         "tau1": tau1, "tau2": tau2, "dim": V.dim,
                         "hypothesis": "lower bound on a_i not effective; unchecked"})
