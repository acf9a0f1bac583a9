"""Conditions imposed by a zero-dimensional scheme and the resulting h^0, h^1.

Every condition is a linear functional on the forms of degree a, written as
a sum of terms.  A term is a tuple with one entry per factor, each entry a
pair (coordinates, direction): direction None means "evaluate the factor's
monomials at the coordinates", a vector v means "apply sum_j v_j d/dx_j and
then evaluate".  Since monomials factor across the factors, the row of a
term over basis(X, a) is the Kronecker product of its per-factor vectors.

Exact ranks use two facts:

* Restricting each factor to the pivot columns of the span of the vectors
  that factor actually uses is injective on that span, and tensor products
  of injective maps are injective.  So the rank survives compressing every
  factor down to a handful of columns.
* On a whole box, a random subset of 2*deg(Z) columns is tried first.  When
  that subset already has rank deg(Z) the answer is certified; only the
  remaining degrees get the exact compressed computation.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .degrees import Box, MultiIndex, minimal_elements, shift
from .exactla import DEFAULT_PRIME, batched_rank, kernel_rows, rank, rref
from .report import VerifyReport
from .ring import Space, basis_size, factor_size, factor_vector
from .scheme import CORPUS_SPACES, Kind, ZeroScheme, as_rng, random_corpus, random_general, random_in_fiber

FactorSpec = tuple[tuple[int, ...], "tuple[int, ...] | None"]
Term = tuple[FactorSpec, ...]


BATCH_WIDTH = 256


class UnsupportedTwist(ValueError):
    pass


@dataclass(frozen=True)
class Functional:
    terms: tuple[Term, ...]
    label: str
    component: int


def _check_twist(X: Space, a) -> MultiIndex:
    a = tuple(int(x) for x in a)
    if len(a) != X.k:
        raise ValueError(f"degree {a} has {len(a)} entries, space has {X.k} factors")
    if any(x < 0 for x in a):
        raise UnsupportedTwist(f"negative twist {a} is not supported")
    return a


def _unit(n: int, j: int) -> tuple[int, ...]:
    return tuple(1 if h == j else 0 for h in range(n + 1))


def _chart_partials(X: Space, point, skip: int | None = None) -> list[Functional]:
    """Derivative rows along every chart coordinate, optionally skipping factor ``skip``."""
    ev = tuple((q, None) for q in point)
    out = []
    for i, (n, q) in enumerate(zip(X.dims, point)):
        if i == skip:
            continue
        ell = max(j for j, x in enumerate(q) if x)
        for j in range(n + 1):
            if j != ell:
                term = ev[:i] + ((q, _unit(n, j)),) + ev[i + 1:]
                out.append(((term,), f"d{i},{j}"))
    return out


def functionals(Z: ZeroScheme) -> list[Functional]:
    """One functional per unit of degree: evaluation, tangent and chart partials."""
    X = Z.space
    rows: list[Functional] = []
    for idx, c in enumerate(Z.components):
        ev = tuple((q, None) for q in c.point)
        rows.append(Functional((ev,), "eval", idx))
        if c.kind is Kind.TANGENT:
            terms = tuple(ev[:i] + ((c.point[i], v),) + ev[i + 1:]
                          for i, v in enumerate(c.chunks(X)) if v is not None)
            rows.append(Functional(terms, "tangent", idx))
        elif c.kind is Kind.DOUBLE:
            rows.extend(Functional(t, lab, idx) for t, lab in _chart_partials(X, c.point))
    return rows


def fiber_trace(Z: ZeroScheme, i: int, point_i) -> list[Functional]:
    """Functionals of the scheme Z cap pi_i^{-1}(point_i).

    A double point leaves the first-order neighbourhood inside the fiber, a
    tangent vector survives only when it lies in the fiber, otherwise the
    trace is the reduced support.
    """
    X = Z.space
    target = tuple(point_i)
    rows: list[Functional] = []
    for idx, c in enumerate(Z.components):
        if c.point[i] != target:
            continue
        ev = tuple((q, None) for q in c.point)
        rows.append(Functional((ev,), "eval", idx))
        if c.kind is Kind.TANGENT:
            chunks = c.chunks(X)
            if chunks[i] is None:
                terms = tuple(ev[:h] + ((c.point[h], v),) + ev[h + 1:]
                              for h, v in enumerate(chunks) if v is not None)
                rows.append(Functional(terms, "tangent", idx))
        elif c.kind is Kind.DOUBLE:
            rows.extend(Functional(t, lab, idx) for t, lab in _chart_partials(X, c.point, skip=i))
    return rows


def _factor_vec(X: Space, i: int, d: int, spec: FactorSpec, p: int) -> np.ndarray:
    return factor_vector(X.dims[i], d, spec[0], spec[1], p)


def _kron(vecs: Sequence[np.ndarray], p: int) -> np.ndarray:
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v).ravel() % p
    return out


def functional_matrix(X: Space, rows: Sequence[Functional], a, p: int) -> np.ndarray:
    """Dense matrix of the functionals on basis(X, a)."""
    a = _check_twist(X, a)
    m = np.zeros((len(rows), basis_size(X, a)), dtype=np.int64)
    for r, f in enumerate(rows):
        for term in f.terms:
            vecs = [_factor_vec(X, i, a[i], spec, p) for i, spec in enumerate(term)]
            m[r] = (m[r] + _kron(vecs, p)) % p
    return m


def functional_rank(X: Space, rows: Sequence[Functional], a, p: int) -> int:
    """Exact rank of the functionals on degree a via per-factor compression."""
    a = _check_twist(X, a)
    if not rows:
        return 0
    restricted = []
    for i in range(X.k):
        specs = sorted({t[i] for f in rows for t in f.terms}, key=repr)
        mat = np.stack([_factor_vec(X, i, a[i], s, p) for s in specs])
        _, piv = rref(mat, p)
        if not piv:
            return 0
        sub = mat[:, piv]
        restricted.append({s: sub[j] for j, s in enumerate(specs)})
    width = int(np.prod([len(next(iter(r.values()))) for r in restricted]))
    m = np.zeros((len(rows), width), dtype=np.int64)
    for r, f in enumerate(rows):
        for term in f.terms:
            vecs = [restricted[i][spec] for i, spec in enumerate(term)]
            m[r] = (m[r] + _kron(vecs, p)) % p
    return rank(m, p)


def box_ranks(X: Space, rows: Sequence[Functional], degrees: Sequence[MultiIndex], p: int,
              rng_seed: int = 0) -> np.ndarray:
    """Exact ranks of the functionals at many degrees at once."""
    nrows = len(rows)
    B = len(degrees)
    if B == 0:
        return np.zeros(0, dtype=np.int64)
    if nrows == 0:
        return np.zeros(B, dtype=np.int64)
    A = np.array(degrees, dtype=np.int64).reshape(B, X.k)
    if (A < 0).any():
        raise UnsupportedTwist("negative twist in box")
    width = 2 * nrows

    # per-factor spec tables and padded value arrays G_i[d, spec, column]
    term_rows, term_specs = [], []
    spec_ids: list[dict] = [{} for _ in range(X.k)]
    for r, f in enumerate(rows):
        for term in f.terms:
            term_rows.append(r)
            term_specs.append([spec_ids[i].setdefault(s, len(spec_ids[i])) for i, s in enumerate(term)])
    term_specs = np.array(term_specs, dtype=np.int64)
    # columns are drawn from the product of per-factor pivot columns, which
    # preserves the rank exactly (see module docstring)
    sizes = np.empty((B, X.k), dtype=np.int64)
    tables, pivots = [], []
    for i, n in enumerate(X.dims):
        used = np.unique(A[:, i]).tolist()
        specs = list(spec_ids[i])
        G = np.zeros((max(used) + 1, len(specs), factor_size(n, max(used))), dtype=np.int64)
        piv = np.zeros((max(used) + 1, len(specs)), dtype=np.int64)
        count = np.zeros(max(used) + 1, dtype=np.int64)
        for d in used:
            mat = np.stack([_factor_vec(X, i, d, spec, p) for spec in specs])
            G[d, :, :mat.shape[1]] = mat
            pc = rref(mat, p)[1]
            piv[d, :len(pc)] = pc
            count[d] = len(pc)
        tables.append(G)
        pivots.append(piv)
        sizes[:, i] = count[A[:, i]]
    total = sizes.prod(axis=1)
    live = total > 0
    sizes[~live] = 1
    total[~live] = 1

    incidence = np.zeros((nrows, len(term_rows)), dtype=np.int64)
    incidence[term_rows, np.arange(len(term_rows))] = 1

    def sample_ranks(sel: np.ndarray, cols: np.ndarray) -> np.ndarray:
        values = None
        stride = total[sel].copy()
        for i in range(X.k):
            size = sizes[sel, i]
            stride = stride // size
            j = pivots[i][A[sel, i][:, None], (cols // stride[:, None]) % size[:, None]]
            gathered = tables[i][A[sel, i][:, None, None], term_specs[:, i][None, :, None], j[:, None, :]]
            values = gathered if values is None else values * gathered % p
        values[~live[sel]] = 0
        return batched_rank(np.matmul(incidence, values) % p, p)

    # pass 1: 2*deg columns, exact when the compressed width fits, else a certificate
    rng = np.random.default_rng(rng_seed)
    sampled = (rng.random((B, width)) * total[:, None]).astype(np.int64)
    exact = total <= width
    cols = np.where(exact[:, None], np.arange(width)[None, :] % total[:, None], sampled)
    ranks = sample_ranks(np.arange(B), cols)

    # pass 2: all compressed columns for uncertified degrees of moderate width
    left = np.flatnonzero(~exact & (ranks < nrows))
    batch = left[total[left] <= max(BATCH_WIDTH, width)]
    if batch.size:
        w2 = int(total[batch].max())
        cols2 = np.arange(w2)[None, :] % total[batch][:, None]
        ranks[batch] = sample_ranks(batch, cols2)
    for b in left[total[left] > max(BATCH_WIDTH, width)]:
        ranks[b] = functional_rank(X, rows, tuple(int(x) for x in A[b]), p)
    return ranks


@dataclass(frozen=True)
class ConditionsMatrix:
    matrix: np.ndarray
    labels: tuple[tuple[int, str], ...]
    a: MultiIndex


def conditions_matrix(Z: ZeroScheme, a) -> ConditionsMatrix:
    rows = functionals(Z)
    a = _check_twist(Z.space, a)
    m = functional_matrix(Z.space, rows, a, Z.p)
    return ConditionsMatrix(m, tuple((f.component, f.label) for f in rows), a)


def h0_h1(Z: ZeroScheme, a) -> tuple[int, int]:
    a = _check_twist(Z.space, a)
    r = functional_rank(Z.space, functionals(Z), a, Z.p)
    return basis_size(Z.space, a) - r, Z.degree - r


def section_basis(Z: ZeroScheme, a) -> np.ndarray:
    """Independent rows spanning H^0(I_Z(a)) in the monomial basis of degree a."""
    a = _check_twist(Z.space, a)
    m = functional_matrix(Z.space, functionals(Z), a, Z.p)
    return kernel_rows(m, Z.p, cols=basis_size(Z.space, a))


def trace_h1(Z: ZeroScheme, i: int, point_i, a) -> int:
    """h^1 of the ideal of Z cap pi_i^{-1}(point_i) in degree a."""
    rows = fiber_trace(Z, i, point_i)
    return len(rows) - functional_rank(Z.space, rows, a, Z.p)


@dataclass
class CohomologyTable:
    space: Space
    box: Box
    degree: int
    records: dict[MultiIndex, tuple[int, int, int]] = field(default_factory=dict)

    def N(self, a) -> int:
        return self.records[tuple(a)][0]

    def h0(self, a) -> int:
        return self.records[tuple(a)][1]

    def h1(self, a) -> int:
        return self.records[tuple(a)][2]

    @property
    def I0(self) -> list[MultiIndex]:
        return [a for a, r in self.records.items() if r[1] > 0]

    @property
    def I1(self) -> list[MultiIndex]:
        return [a for a, r in self.records.items() if r[2] > 0]

    @property
    def minimal_I0(self) -> list[MultiIndex]:
        return minimal_elements(self.I0)

    @property
    def maximal_rank(self) -> bool:
        return not any(r[1] > 0 and r[2] > 0 for r in self.records.values())

    @property
    def covers_vanishing_range(self) -> bool:
        """True when the box reaches a_i = deg(Z) - 1 in every slot, past which h^1 = 0."""
        return all(u >= self.degree - 1 for u in self.box.upper)

    def to_dict(self) -> dict:
        return {
            "space": list(self.space.dims),
            "box": list(self.box.upper),
            "deg": self.degree,
            "degrees": [{"a": list(a), "N": N, "h0": h0, "h1": h1}
                        for a, (N, h0, h1) in sorted(self.records.items())],
            "I0min": [list(a) for a in self.minimal_I0],
            "maximal_rank": self.maximal_rank,
            "box_covers_vanishing_range": self.covers_vanishing_range,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "N", "h0", "h1"])
        for a, (N, h0, h1) in sorted(self.records.items()):
            w.writerow([",".join(map(str, a)), N, h0, h1])
        return buf.getvalue()

    def grid(self) -> str:
        """Staircase picture for k = 2: rows are a_2 (top = largest), columns a_1.

        '0' = only h0 > 0, '1' = only h1 > 0, '*' = both, '.' = neither.
        """
        if self.space.k != 2:
            raise ValueError("grid rendering needs exactly two factors")
        u1, u2 = self.box.upper
        lines = []
        for y in range(u2, -1, -1):
            cells = []
            for x in range(u1 + 1):
                _, h0, h1 = self.records[(x, y)]
                cells.append("*" if h0 and h1 else "0" if h0 else "1" if h1 else ".")
            lines.append(f"{y:>3} " + " ".join(cells))
        lines.append("    " + " ".join(str(x % 10) for x in range(u1 + 1)))
        return "\n".join(lines)


def regions(Z: ZeroScheme, box: Box | None = None) -> CohomologyTable:
    if box is None:
        box = Box.for_degree(Z.space.k, Z.degree)
    if box.k != Z.space.k:
        raise ValueError("box and space have different numbers of factors")
    degrees = list(box)
    ranks = box_ranks(Z.space, functionals(Z), degrees, Z.p)
    table = CohomologyTable(Z.space, box, Z.degree)
    for a, r in zip(degrees, ranks.tolist()):
        N = basis_size(Z.space, a)
        table.records[a] = (N, N - r, Z.degree - r)
    return table


@dataclass
class MonotoneReport:
    checked: int
    violations: list[tuple[MultiIndex, int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_h1_monotone(Z: ZeroScheme, box: Box | None = None,
                      table: CohomologyTable | None = None) -> MonotoneReport:
    """h1(a + e_i) <= h1(a) for every a in the box and every i.

    Violations are reported as (a, i, h1(a), h1(a + e_i)).
    """
    if box is None:
        box = Box.for_degree(Z.space.k, Z.degree)
    wide = box.widened(1)
    if table is None or any(a not in table.records for a in wide):
        table = regions(Z, wide)
    bad, checked = [], 0
    for a in box:
        for i in range(Z.space.k):
            b = shift(a, i)
            checked += 1
            if table.h1(b) > table.h1(a):
                bad.append((a, i, table.h1(a), table.h1(b)))
    return MonotoneReport(checked, bad)


def fiber_factor(Z: ZeroScheme) -> list[int]:
    """Factors i for which Z lies inside a single fiber of pi_i."""
    out = []
    for i in range(Z.space.k):
        if len(Z.projection(i)) == 1 and all(
                c.kind is Kind.REDUCED or (c.kind is Kind.TANGENT and c.chunks(Z.space)[i] is None)
                for c in Z.components):
            out.append(i)
    return out


def check_fiber_equality(Z: ZeroScheme, i: int, box: Box | None = None,
                         table: CohomologyTable | None = None) -> MonotoneReport:
    """For Z inside a fiber of pi_i: h1(a + e_i) == h1(a) on the box."""
    if i not in fiber_factor(Z):
        raise ValueError(f"scheme is not contained in a fiber of factor {i}")
    if box is None:
        box = Box.for_degree(Z.space.k, Z.degree)
    wide = box.widened(1)
    if table is None or any(a not in table.records for a in wide):
        table = regions(Z, wide)
    bad, checked = [], 0
    for a in box:
        b = shift(a, i)
        checked += 1
        if table.h1(b) != table.h1(a):
            bad.append((a, i, table.h1(a), table.h1(b)))
    return MonotoneReport(checked, bad)


def stabilized_h1(Z: ZeroScheme, a, i: int) -> int:
    """h1(a + t e_i) once t >= deg(Z) and two consecutive values agree."""
    a = _check_twist(Z.space, a)
    rows = functionals(Z)
    prev = None
    t = 0
    while True:
        b = shift(a, i, t)
        h1 = len(rows) - functional_rank(Z.space, rows, b, Z.p)
        if t >= Z.degree and h1 == prev:
            return h1
        prev = h1
        t += 1


def fiber_criterion(Z: ZeroScheme, a, i: int) -> bool:
    """Is there a fiber of pi_i whose trace on Z fails to impose independent conditions?"""
    a = _check_twist(Z.space, a)
    return any(trace_h1(Z, i, q, a) > 0 for q in sorted(Z.projection(i)))


def fiber_cluster(X: Space, i: int, m: int, extra: int, seed, p: int = DEFAULT_PRIME) -> ZeroScheme:
    """m reduced points in one fiber of pi_i plus ``extra`` general mixed components."""
    rng = as_rng(seed)
    q = tuple(int(x) for x in rng.integers(1, 1 << 30, size=X.dims[i] + 1))
    Z = random_in_fiber(X, i, q, m, rng, p=p)
    while True:
        W = random_general(X, extra, "mixed", rng, p)
        if not set(W.support) & set(Z.support):
            return Z.union(W)


def verify_h1_structure(instances: int = 1000, seed: int = 0, max_degree: int = 12,
                        p: int = DEFAULT_PRIME) -> VerifyReport:
    """Three checks on h1 along the directions e_i, each over ``instances`` schemes.

    * monotone: h1(a + e_i) <= h1(a) on the default box of a mixed corpus;
    * fiber: equality along e_i when Z sits in a fiber of pi_i;
    * stable: stabilized_h1 > 0 exactly when fiber_criterion holds, on
      fiber clusters large enough to be deficient about half the time.
    Any single violation fails the campaign.
    """
    rng = as_rng(seed)
    multi = [d for d in CORPUS_SPACES if len(d) >= 2]
    counts = {"monotone_checked": 0, "fiber_checked": 0, "stable_checked": 0, "stable_positive": 0}
    violations: list[dict] = []
    for idx, Z in enumerate(random_corpus(instances, rng, max_degree=max_degree, p=p)):
        rep = check_h1_monotone(Z)
        counts["monotone_checked"] += rep.checked
        violations += [{"check": "monotone", "instance": idx, "a": list(a), "i": i, "h1": [u, v]}
                       for a, i, u, v in rep.violations]
    for idx in range(instances):
        X = Space(multi[int(rng.integers(len(multi)))])
        i = int(rng.integers(X.k))
        q = tuple(int(x) for x in rng.integers(1, 1 << 30, size=X.dims[i] + 1))
        kinds = [("reduced", "tangent")[int(b)] for b in rng.integers(0, 2, size=int(rng.integers(1, 6)))]
        Z = random_in_fiber(X, i, q, len(kinds), rng, kinds, p)
        rep = check_fiber_equality(Z, i)
        counts["fiber_checked"] += rep.checked
        violations += [{"check": "fiber", "instance": idx, "a": list(a), "i": i, "h1": [u, v]}
                       for a, i, u, v in rep.violations]
    for idx in range(instances):
        X = Space(multi[int(rng.integers(len(multi)))])
        i = int(rng.integers(X.k))
        a = tuple(0 if h == i else int(rng.integers(0, 3)) for h in range(X.k))
        others = 1
        for h in range(X.k):
            if h != i:
                others *= factor_size(X.dims[h], a[h])
        m = int(rng.integers(max(1, others - 1), others + 3))
        Z = fiber_cluster(X, i, m, int(rng.integers(0, 3)), rng, p)
        stable = stabilized_h1(Z, a, i)
        crit = fiber_criterion(Z, a, i)
        counts["stable_checked"] += 1
        counts["stable_positive"] += stable > 0
        if (stable > 0) != crit:
            violations.append({"check": "stable", "instance": idx, "a": list(a), "i": i,
                               "stabilized_h1": stable, "fiber_criterion": crit})
    for v in violations:
        v["pass"] = False
    ok = not violations
    return VerifyReport("h1_structure", {"instances": instances, "seed": seed, "max_degree": max_degree},
                        1, [ok], violations, 1.0, counts)
