"""Base points of the linear systems |I_Z(a)|.

A point o is a base point exactly when every section of I_Z(a) vanishes at o,
i.e. when the kernel basis K satisfies K . ev(o) = 0.  This is the same as
asking that the evaluation row at o does not raise the rank of the
conditions matrix, but it lets a thousand probes share one matrix product.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cohomo import Functional, _chart_partials, functional_matrix, section_basis
from .degrees import MultiIndex, shift
from .exactla import DEFAULT_PRIME, matmul_mod, rank
from .report import VerifyReport
from .ring import Space, basis_size, factor_exponents, normalize_factor
from .scheme import LocalComponent, ZeroScheme, as_rng, random_general


class Verdict(str, enum.Enum):
    EQUALS_Z = "SchemeTheoreticEqualsZ"
    EXTRA = "ExtraBasePointsFound"
    INCONCLUSIVE = "Inconclusive"


class InvalidProbe(ValueError):
    pass


class HypothesisViolation(ValueError):
    pass


def evaluation_rows(X: Space, a: Sequence[int], points: Sequence, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Values of every monomial of degree a at each point, shape (#points, N(a))."""
    P = len(points)
    out = np.ones((P, 1), dtype=np.int64)
    for i, (n, d) in enumerate(zip(X.dims, a)):
        ex = np.array(factor_exponents(n, d), dtype=np.int64).reshape(-1, n + 1)
        q = np.array([pt[i] for pt in points], dtype=np.int64).reshape(P, n + 1) % p
        powers = np.ones((P, n + 1, d + 1), dtype=np.int64)
        for e in range(1, d + 1):
            powers[:, :, e] = powers[:, :, e - 1] * q % p
        vals = np.ones((P, ex.shape[0]), dtype=np.int64)
        for j in range(n + 1):
            vals = vals * powers[:, j, :][:, ex[:, j]] % p
        out = (out[:, :, None] * vals[:, None, :]).reshape(P, -1) % p
    return out


def base_point_mask(K: np.ndarray, X: Space, a, points, p: int = DEFAULT_PRIME) -> np.ndarray:
    """True where every row of K vanishes at the point."""
    if len(points) == 0:
        return np.zeros(0, dtype=bool)
    if K.shape[0] == 0:
        return np.ones(len(points), dtype=bool)
    E = evaluation_rows(X, a, points, p)
    return ~matmul_mod(K, E.T, p).any(axis=0)


def _normalized(X: Space, point, p: int):
    return tuple(normalize_factor(f, p) for f in point)


def probe_base_point(Z: ZeroScheme, a, o, K: np.ndarray | None = None) -> bool:
    """Is o a base point of |I_Z(a)|?  o must lie off the support of Z."""
    X = Z.space
    if _normalized(X, o, Z.p) in set(Z.support):
        raise InvalidProbe("probe point lies on the support of Z")
    a = X.check_degree(a)
    if K is None:
        K = section_basis(Z, a)
    return bool(base_point_mask(K, X, a, [o], Z.p)[0])


def jacobian_rank_at(Z: ZeroScheme, a, component: LocalComponent, K: np.ndarray | None = None) -> int:
    """Rank of the chart partial derivatives of H^0(I_Z(a)) at the component's support."""
    X = Z.space
    a = X.check_degree(a)
    if K is None:
        K = section_basis(Z, a)
    if K.shape[0] == 0:
        return 0
    rows = [Functional(t, lab, 0) for t, lab in _chart_partials(X, component.point)]
    D = functional_matrix(X, rows, a, Z.p)
    return rank(matmul_mod(K, D.T, Z.p), Z.p)


def random_point(X: Space, rng, p: int):
    out = []
    for n in X.dims:
        while True:
            c = tuple(int(x) for x in rng.integers(0, p, size=n + 1))
            if any(c):
                break
        out.append(normalize_factor(c, p))
    return tuple(out)


def fiber_probes(Z: ZeroScheme, rng, per_fiber: int = 3) -> list[tuple]:
    """Random points on pi_i^{-1}(pi_i(z)) for every support point z and factor i."""
    X = Z.space
    support = set(Z.support)
    out = []
    for z in Z.support:
        for i in range(X.k):
            made = 0
            while made < per_fiber:
                o = random_point(X, rng, Z.p)
                o = o[:i] + (z[i],) + o[i + 1:]
                if o not in support:
                    out.append(o)
                    made += 1
    return out


def uniform_probes(Z: ZeroScheme, rng, count: int) -> list[tuple]:
    support = set(Z.support)
    out = []
    while len(out) < count:
        o = random_point(Z.space, rng, Z.p)
        if o not in support:
            out.append(o)
    return out


@dataclass
class BaseLocusReport:
    a: MultiIndex
    h0: int
    probes: int
    failures: list = field(default_factory=list)
    jacobian: list = field(default_factory=list)
    verdict: Verdict = Verdict.INCONCLUSIVE
    codimension: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "h0": self.h0, "probes": self.probes,
                "failures": [[list(f) for f in o] for o in self.failures],
                "jacobian": [{"point": [list(f) for f in pt], "rank": r} for pt, r in self.jacobian],
                "verdict": self.verdict.value, "codimension": self.codimension}


def codimension_evidence(Z: ZeroScheme, a, K: np.ndarray, rng) -> dict:
    """Jacobian rank of e random sections at each support point, e = min(dim X, h0).

    Full rank e at every point means the e sections cut a locus of codimension
    e near Z.  This is supporting evidence only.
    """
    X = Z.space
    e = min(X.dim, K.shape[0])
    if e == 0:
        return {"e": 0, "ranks": []}
    comb = rng.integers(0, Z.p, size=(e, K.shape[0]))
    sections = matmul_mod(comb, K, Z.p)
    ranks = [jacobian_rank_at(Z, a, c, sections) for c in Z.components]
    return {"e": e, "ranks": ranks, "ok": all(r == e for r in ranks)}


def base_locus_report(Z: ZeroScheme, a, probes: int = 1000, seed=0, per_fiber: int = 3) -> BaseLocusReport:
    X = Z.space
    a = X.check_degree(a)
    rng = as_rng(seed)
    K = section_basis(Z, a)
    pts = uniform_probes(Z, rng, probes) + fiber_probes(Z, rng, per_fiber)
    mask = base_point_mask(K, X, a, pts, Z.p)
    jac = [(c.point, jacobian_rank_at(Z, a, c, K)) for c in Z.components]
    rep = BaseLocusReport(a, K.shape[0], len(pts), [pts[j] for j in np.flatnonzero(mask)], jac)
    rep.codimension = codimension_evidence(Z, a, K, rng)
    if rep.failures:
        rep.verdict = Verdict.EXTRA
    elif all(r == X.dim for _, r in jac):
        rep.verdict = Verdict.EQUALS_Z
    else:
        rep.verdict = Verdict.INCONCLUSIVE
    return rep


def _campaign(name: str, X: Space, s: int, degree: MultiIndex, seeds: int, base_seed: int,
              probes: int, threshold: float, p: int, params: dict, extra_check=None) -> VerifyReport:
    records, seed_pass = [], []
    for idx in range(seeds):
        Z = random_general(X, s, "reduced", base_seed + idx, p)
        rep = base_locus_report(Z, degree, probes, np.random.default_rng([base_seed + idx, 1]))
        ok = rep.verdict is Verdict.EQUALS_Z
        d = rep.to_dict()
        d["seed"] = base_seed + idx
        if extra_check is not None:
            ok &= extra_check(rep, d)
        d["pass"] = bool(ok)
        records.append(d)
        seed_pass.append(bool(ok))
    return VerifyReport(name, params, seeds, seed_pass, records, threshold)


def verify_base_locus(dims: Sequence[int], s: int, a: Sequence[int], seeds: int = 20, probes: int = 1000,
              base_seed: int = 0, threshold: float = 19 / 20, p: int = DEFAULT_PRIME) -> VerifyReport:
    """General s points are the scheme-theoretic base locus of |I_Z(a)|.

    Needs a_i > 0 for all i and 0 < s < N(a) - dim X.
    """
    X = Space(tuple(dims))
    a = X.check_degree(a)
    if any(x == 0 for x in a):
        raise HypothesisViolation("every entry of a must be positive")
    bound = basis_size(X, a) - X.dim
    if not 0 < s < bound:
        raise HypothesisViolation(f"need 0 < s < {bound}")
    return _campaign("base_locus", X, s, a, seeds, base_seed, probes, threshold, p,
                     {"space": list(X.dims), "s": s, "a": list(a), "probes": probes})


def verify_shifted_base_locus(dims: Sequence[int], s: int, a: Sequence[int], i: int, seeds: int = 20,
              probes: int = 1000, base_seed: int = 0, threshold: float = 19 / 20,
              p: int = DEFAULT_PRIME) -> VerifyReport:
    """Same as verify_base_locus in degree a + e_i, for 0 < s < N(a).

    Also requires h0(I_Z(a + e_i)) > dim X, the inequality the argument rests on.
    """
    X = Space(tuple(dims))
    a = X.check_degree(a)
    if any(x == 0 for x in a):
        raise HypothesisViolation("every entry of a must be positive")
    bound = basis_size(X, a)
    if not 0 < s < bound:
        raise HypothesisViolation(f"need 0 < s < {bound}")

    def h0_large(rep: BaseLocusReport, d: dict) -> bool:
        d["h0_exceeds_dim"] = rep.h0 > X.dim
        return rep.h0 > X.dim

    return _campaign("shifted_base_locus", X, s, shift(a, i), seeds, base_seed, probes, threshold, p,
                     {"space": list(X.dims), "s": s, "a": list(a), "i": i, "probes": probes},
                     h0_large)


@dataclass
class FiberExclusionReport:
    off_fiber_probes: int
    off_fiber_base_points: int
    on_fiber_probes: int
    on_fiber_base_points: int


def fiber_exclusion(Z: ZeroScheme, c, i: int, probes: int = 1000, seed=0) -> FiberExclusionReport:
    """Base points of |I_Z(c)| split by whether the probe lies on some pi_i^{-1}(pi_i(z))."""
    X = Z.space
    c = X.check_degree(c)
    rng = as_rng(seed)
    K = section_basis(Z, c)
    off = uniform_probes(Z, rng, probes)
    fibers = {z[i] for z in Z.support}
    off = [o for o in off if o[i] not in fibers]
    on = []
    for z in Z.support:
        for _ in range(max(1, probes // max(1, len(Z)))):
            o = random_point(X, rng, Z.p)
            o = o[:i] + (z[i],) + o[i + 1:]
            if o not in set(Z.support):
                on.append(o)
    m_off = base_point_mask(K, X, c, off, Z.p)
    m_on = base_point_mask(K, X, c, on, Z.p)
    return FiberExclusionReport(len(off), int(m_off.sum()), len(on), int(m_on.sum()))
