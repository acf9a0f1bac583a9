"""Multiplication maps between graded pieces of I(Z) and minimal generators.

For a factor with n_i = 1 the sequence 0 -> O(-1) -> O^2 -> O(1) -> 0 pulled
back along pi_i and twisted by I_Z gives the kernel of the multiplication
map in closed form: dim Im = 2*h0(a) - h0(a - e_i).  That shortcut is only
used where a direct span computation would be too large; everywhere else the
image is spanned explicitly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb, prod
from typing import Sequence

import numpy as np

from .cohomo import CohomologyTable, functional_rank, functionals, h0_h1, regions, section_basis
from .degrees import Box, MultiIndex, minimal_elements, shift
from .exactla import DEFAULT_PRIME, Subspace, rank, subspace_sum
from .ring import Space, basis_size, multiply_by_var
from .report import VerifyReport, seed_list
from .scheme import ZeroScheme, random_general

DIRECT_CAP = 400  # largest target dimension N(a + e_i) spanned explicitly
LOG_CAP = 60  # same, for degrees only logged outside a formula's hypothesis


class UnsupportedSpace(ValueError):
    pass


def h0_at(Z: ZeroScheme, a, table: CohomologyTable | None = None) -> int:
    """h0(I_Z(a)); zero for any degree with a negative entry."""
    a = tuple(a)
    if any(x < 0 for x in a):
        return 0
    if table is not None and a in table.records:
        return table.h0(a)
    return h0_h1(Z, a)[0]


def h1_at(Z: ZeroScheme, a, table: CohomologyTable | None = None) -> int:
    a = tuple(a)
    if table is not None and a in table.records:
        return table.h1(a)
    return h0_h1(Z, a)[1]


def _image_blocks(Z: ZeroScheme, a: MultiIndex, i: int) -> list[np.ndarray]:
    K = section_basis(Z, a)
    return [multiply_by_var(K, Z.space, a, i, j) for j in range(Z.space.dims[i] + 1)]


def image_subspace(Z: ZeroScheme, a: MultiIndex, i: int) -> Subspace:
    """Span of x_ij * f over j and a basis f of H^0(I_Z(a)), inside degree a + e_i."""
    target = basis_size(Z.space, shift(a, i))
    blocks = _image_blocks(Z, a, i)
    if blocks[0].shape[0] == 0:
        return Subspace.zero(target, Z.p)
    return Subspace.span(np.vstack(blocks), target, Z.p)


def image_dim(Z: ZeroScheme, a: MultiIndex, i: int) -> int:
    """dim of the image of multiplication, from the explicit products.

    Each block x_ij * K has full row rank.  When the blocks touch pairwise
    disjoint sets of monomials (always the case for a_i = 0) the dimension is
    the sum of the block ranks; otherwise the stacked rows are row reduced.
    """
    blocks = _image_blocks(Z, a, i)
    if blocks[0].shape[0] == 0:
        return 0
    supports = [b.any(axis=0) for b in blocks]
    if not (np.sum(supports, axis=0) > 1).any():
        return sum(b.shape[0] for b in blocks)
    return rank(np.vstack(blocks), Z.p)


@dataclass
class MultMapReport:
    a: MultiIndex
    i: int
    dim_source: int
    dim_target: int
    dim_image: int
    dim_coker: int
    injective: bool
    method: str

    @property
    def kernel_dim(self) -> int:
        return self.dim_source - self.dim_image


def mult_map(Z: ZeroScheme, a, i: int, method: str = "auto",
             table: CohomologyTable | None = None) -> MultMapReport:
    """Multiplication H^0(O(e_i)) x H^0(I_Z(a)) -> H^0(I_Z(a + e_i)).

    ``method`` is "span" (explicit image), "koszul" (closed form, P^1 slots
    only) or "auto" (span unless the target is larger than DIRECT_CAP).
    """
    X = Z.space
    a = X.check_degree(a)
    b = shift(a, i)
    h0a = h0_at(Z, a, table)
    target = h0_at(Z, b, table)
    if method == "auto":
        method = "koszul" if X.dims[i] == 1 and basis_size(X, b) > DIRECT_CAP else "span"
    if method == "koszul":
        if X.dims[i] != 1:
            raise UnsupportedSpace("the closed-form image needs a P^1 factor")
        dim_image = 2 * h0a - h0_at(Z, shift(a, i, -1), table)
    elif method == "span":
        dim_image = image_dim(Z, a, i) if h0a else 0
    else:
        raise ValueError(f"unknown method {method!r}")
    source = (X.dims[i] + 1) * h0a
    return MultMapReport(a, i, source, target, dim_image, target - dim_image,
                         dim_image == source, method)


def _insert(fixed: Sequence[int], i: int, t: int) -> MultiIndex:
    fixed = tuple(fixed)
    return fixed[:i] + (t,) + fixed[i:]


@dataclass
class Stabilization:
    e: int | None
    h1_values: list[int]
    verified_through: int


def stabilization_index(Z: ZeroScheme, fixed: Sequence[int], i: int) -> Stabilization:
    """Minimal t with h1(fixed with t in slot i) = 0.

    ``fixed`` holds the twist on the other factors.  Returns e = None when h1
    settles at a positive value (a deficient fiber trace).
    """
    X = Z.space
    if len(fixed) != X.k - 1:
        raise ValueError(f"fixed part needs {X.k - 1} entries")
    rows = functionals(Z)
    values: list[int] = []
    t = 0
    while True:
        a = _insert(fixed, i, t)
        values.append(len(rows) - functional_rank(X, rows, a, Z.p))
        if values[-1] == 0:
            break
        if t >= Z.degree and values[-1] == values[-2]:
            return Stabilization(None, values, t)
        t += 1
    e = t
    for t in range(e + 1, e + 4):
        values.append(len(rows) - functional_rank(X, rows, _insert(fixed, i, t), Z.p))
    return Stabilization(e, values, e + 3)


@dataclass
class StabilizationCheck:
    e: int | None
    coker_at_e: int | None
    expected: int | None
    later_surjective: bool
    ok: bool


def check_stabilization(Z: ZeroScheme, fixed: Sequence[int], i: int) -> StabilizationCheck:
    """coker of the map from slot-i degree e to e+1 equals h1 at e-1 (deg Z when e = 0).

    Also checks that the maps from e+1 and e+2 are onto.  The image is always
    spanned explicitly here so the check does not lean on the exact sequence.
    """
    if Z.space.dims[i] != 1:
        raise UnsupportedSpace("stabilization is stated for a P^1 factor")
    st = stabilization_index(Z, fixed, i)
    if st.e is None:
        return StabilizationCheck(None, None, None, False, False)
    e = st.e
    coker = mult_map(Z, _insert(fixed, i, e), i, method="span").dim_coker
    expected = Z.degree if e == 0 else st.h1_values[e - 1]
    later = all(mult_map(Z, _insert(fixed, i, y), i, method="span").dim_coker == 0
                for y in (e + 1, e + 2))
    ok = coker == expected and later and all(v == 0 for v in st.h1_values[e:])
    return StabilizationCheck(e, coker, expected, later, ok)


@dataclass
class GeneratorTable:
    space: Space
    box: Box
    # a -> (h0, dimension of the span of images from parents, new generators)
    records: dict[MultiIndex, tuple[int, int | None, int | None]] = field(default_factory=dict)

    def gens(self, a) -> int | None:
        return self.records[tuple(a)][2]

    @property
    def total(self) -> int | None:
        vals = [r[2] for r in self.records.values()]
        return None if any(v is None for v in vals) else sum(vals)

    @property
    def nonzero(self) -> dict[MultiIndex, int]:
        return {a: r[2] for a, r in sorted(self.records.items()) if r[2]}

    def to_dict(self) -> dict:
        return {
            "space": list(self.space.dims),
            "box": list(self.box.upper),
            "generators": [{"a": list(a), "h0": h0, "image": im, "gens": g}
                           for a, (h0, im, g) in sorted(self.records.items())],
            "total": self.total,
        }


def generator_table(Z: ZeroScheme, box: Box | None = None, method: str = "auto",
                    table: CohomologyTable | None = None) -> GeneratorTable:
    """Number of minimal generators of I(Z) in each degree of the box.

    gens(b) = h0(b) - dim(sum over parents a = b - e_i of the image of
    multiplication by the degree-e_i forms).  With method "auto", a degree
    where some P^1 parent map is onto (by the closed form) is skipped; all
    other degrees are spanned explicitly.  "span" spans every degree.
    """
    X = Z.space
    if box is None:
        box = Box.cube(X.k, Z.degree)
    if table is None or any(a not in table.records for a in box):
        table = regions(Z, box)
    out = GeneratorTable(X, box)
    for b in box:
        h0b = table.h0(b)
        if h0b == 0:
            out.records[b] = (0, 0, 0)
            continue
        pars = [(a, i) for i in range(X.k) if b[i] > 0 for a in [shift(b, i, -1)] if table.h0(a) > 0]
        if not pars:
            out.records[b] = (h0b, 0, h0b)
            continue
        if method == "auto":
            onto = any(X.dims[i] == 1 and
                       2 * table.h0(a) - h0_at(Z, shift(a, i, -1), table) == h0b
                       for a, i in pars)
            if onto:
                out.records[b] = (h0b, h0b, 0)
                continue
            if basis_size(X, b) > DIRECT_CAP * 5:
                out.records[b] = (h0b, None, None)
                continue
        span = Subspace.zero(basis_size(X, b), Z.p)
        for a, i in pars:
            span = subspace_sum(span, image_subspace(Z, a, i))
        out.records[b] = (h0b, span.dim, h0b - span.dim)
    return out


def p1_cokernel_formula(a: Sequence[int], i: int, z: int) -> int:
    """z + (a_i + 2) * prod_{h != i}(a_h + 1) - 2 * prod_h (a_h + 1)."""
    delta = prod(x + 1 for x in a)
    return z + (a[i] + 2) * (delta // (a[i] + 1)) - 2 * delta


def mixed_cokernel_formula(dims: Sequence[int], a: Sequence[int], i: int, z: int) -> int:
    """max{0, -z + N(a + e_i) - (n_i + 1)(N(a) - z)} with N(a) = prod C(n_h + a_h, a_h)."""
    delta = prod(comb(n + x, x) for n, x in zip(dims, a))
    up = delta * comb(dims[i] + a[i] + 1, dims[i]) // comb(dims[i] + a[i], dims[i])
    return max(0, -z + up - (dims[i] + 1) * (delta - z))


@dataclass
class FormulaRecord:
    seed: int
    a: MultiIndex
    i: int
    formula: int
    computed: int | None
    hypothesis_ok: bool
    method: str
    note: str = ""

    @property
    def passed(self) -> bool | None:
        if self.computed is None:
            return None
        return self.formula == self.computed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a"] = list(self.a)
        d["pass"] = self.passed
        return d


def _formula_campaign(name: str, X: Space, z: int, box: Box | None, seeds, base_seed: int,
                      formula, threshold: float, check_maximal_rank: bool, p: int) -> VerifyReport:
    records: list[dict] = []
    outside: list[list] = []
    seed_pass: list[bool] = []
    if box is None:
        box = Box.cube(X.k, z)
    maximal = []
    for seed in seed_list(seeds, base_seed):
        Z = random_general(X, z, "reduced", seed, p=p)
        table = regions(Z, box.widened(1))
        ok = True
        if check_maximal_rank:
            mr = regions(Z, Box(tuple(max(u, z - 1) for u in box.upper))).maximal_rank
            maximal.append(mr)
            ok &= mr
        for a in box:
            if table.h0(a) == 0:
                continue
            for i in range(X.k):
                hyp = h0_at(Z, shift(a, i, -1), table) == 0
                f = formula(a, i)
                b = shift(a, i)
                small = basis_size(X, b) <= (DIRECT_CAP if hyp else LOG_CAP)
                if small or X.dims[i] == 1:
                    method = "span" if small and hyp else "koszul" if X.dims[i] == 1 else "span"
                    rep = mult_map(Z, a, i, method=method, table=table)
                    rec = FormulaRecord(seed, a, i, f, rep.dim_coker, hyp, rep.method)
                    if hyp and rec.passed is False:
                        ok = False
                else:
                    rec = FormulaRecord(seed, a, i, f, None, hyp, "none",
                                        "target too large for an explicit span")
                if hyp:
                    records.append(rec.to_dict())
                else:
                    outside.append([seed, list(a), i, f, rec.computed])
        seed_pass.append(bool(ok))
    # degrees with h0(a - e_i) > 0: [seed, a, i, formula, computed]
    extra = {"outside_hypothesis": outside}
    if check_maximal_rank:
        extra["maximal_rank"] = maximal
    return VerifyReport(name, {"space": list(X.dims), "z": z, "box": list(box.upper)},
                        len(seed_pass), seed_pass, records, threshold, extra)


def verify_p1_cokernel(k: int, z: int, box: Box | None = None, seeds=20, base_seed: int = 0,
               threshold: float = 19 / 20, p: int = DEFAULT_PRIME) -> VerifyReport:
    """Cokernel of multiplication for z general points on (P^1)^k.

    Degrees where h0(a - e_i) > 0 are still recorded (with both numbers) but
    do not count against a seed.
    """
    X = Space((1,) * k)
    return _formula_campaign("p1_cokernel", X, z, box, seeds, base_seed,
                             lambda a, i: p1_cokernel_formula(a, i, z), threshold, False, p)


def verify_mixed_cokernel(dims: Sequence[int], z: int, box: Box | None = None, seeds=20, base_seed: int = 0,
                threshold: float = 19 / 20, p: int = DEFAULT_PRIME) -> VerifyReport:
    dims = tuple(dims)
    if any(n not in (1, 2) for n in dims):
        raise UnsupportedSpace("every factor must be P^1 or P^2")
    X = Space(dims)
    return _formula_campaign("mixed_cokernel", X, z, box, seeds, base_seed,
                             lambda a, i: mixed_cokernel_formula(dims, a, i, z), threshold, True, p)


def verify_plane_surjectivity(outer_dims: Sequence[int], outer: Sequence[int], t: int, s: int, seeds=20,
                base_seed: int = 0, threshold: float = 19 / 20, p: int = DEFAULT_PRIME) -> VerifyReport:
    """Surjectivity of H^0(O_{P^2}(1)) x H^0(I_S(R, t+1)) -> H^0(I_S(R, t+2)).

    X = Y x P^2 with Y = prod P^{outer_dims} (possibly empty) and R = O_Y(outer).
    The statement covers s < h0(R) * C(t+2, 2); other s are still computed and
    recorded with hypothesis_ok = False.
    """
    outer_dims, outer = tuple(outer_dims), tuple(outer)
    if len(outer_dims) != len(outer):
        raise ValueError("outer twist and outer space differ in length")
    X = Space(outer_dims + (2,))
    slot = X.k - 1
    alpha = basis_size(Space(outer_dims), outer) if outer_dims else 1
    bound = alpha * comb(t + 2, 2)
    hyp = s < bound
    records, seed_pass = [], []
    for seed in seed_list(seeds, base_seed):
        S = random_general(X, s, "reduced", seed, p=p)
        rep = mult_map(S, outer + (t + 1,), slot, method="span")
        rec = FormulaRecord(seed, outer + (t + 1,), slot, 0, rep.dim_coker, hyp, rep.method)
        records.append(rec.to_dict())
        seed_pass.append(rec.passed or not hyp)
    return VerifyReport("plane_surjectivity", {"outer_space": list(outer_dims), "outer": list(outer), "t": t,
                                 "s": s, "bound": bound, "hypothesis_ok": hyp},
                        len(seed_pass), seed_pass, records, threshold)


def expected_generator_total(table: CohomologyTable, z: int, formula) -> int:
    """Generator count claimed from h0 at minimal degrees plus one W per new degree.

    Every minimal degree a of I_0 contributes h0(a).  Every immediate
    descendant b = a + e_i of a minimal degree contributes the dimension of a
    single W, the cokernel formula at (a, i).  When several minimal parents
    reach the same b only one W is taken; the smallest value is used.
    """
    mins = minimal_elements(table.I0)
    total = sum(table.h0(a) for a in mins)
    best: dict[MultiIndex, int] = {}
    for a in mins:
        for i in range(len(a)):
            b = shift(a, i)
            w = max(0, formula(a, i))
            best[b] = min(best.get(b, w), w)
    return total + sum(best.values())


def generators_outside_first_layer(gt: "GeneratorTable", table: CohomologyTable) -> list[MultiIndex]:
    """Degrees with new generators that are neither minimal in I_0 nor one step above a minimal degree."""
    mins = set(minimal_elements(table.I0))
    layer = mins | {shift(a, i) for a in mins for i in range(len(a))}
    return [b for b, g in gt.nonzero.items() if b not in layer]


def surjectivity_predicted_zero(table: CohomologyTable, b: MultiIndex) -> bool:
    """Some slot has b_i >= 2 and h1(b - 2e_i) = 0, so the parent map is onto."""
    return any(b[i] >= 2 and table.h1(shift(b, i, -2)) == 0 for i in range(len(b)))


def verify_stabilization(instances: int = 200, seed: int = 0,
                         spaces: Sequence[Sequence[int]] = ((1, 1), (2, 1), (1, 1, 1), (1, 2, 1)),
                         max_degree: int = 10, p: int = DEFAULT_PRIME) -> VerifyReport:
    """check_stabilization on random mixed schemes, P^1 as the last factor.

    Every instance must pass; the twist on the other factors is drawn from
    0..2 in each slot.  Draws whose h1 never reaches zero along the P^1 slot
    (a deficient fiber trace) have no index e and are redrawn; their number
    is reported as ``no_index``.
    """
    rng = np.random.default_rng(seed)
    records, seed_pass = [], []
    no_index = 0
    while len(records) < instances:
        X = Space(tuple(spaces[int(rng.integers(len(spaces)))]))
        s = int(rng.integers(1, 6))
        Z = random_general(X, s, "mixed", rng, p)
        if Z.degree > max_degree:
            continue
        fixed = tuple(int(x) for x in rng.integers(0, 3, size=X.k - 1))
        chk = check_stabilization(Z, fixed, X.k - 1)
        if chk.e is None:
            no_index += 1
            continue
        records.append({"space": list(X.dims), "scheme": Z.to_dict()["components"], "fixed": list(fixed),
                        "e": chk.e, "coker": chk.coker_at_e, "expected": chk.expected,
                        "later_surjective": chk.later_surjective, "pass": chk.ok})
        seed_pass.append(chk.ok)
    return VerifyReport("stabilization", {"instances": instances, "seed": seed, "max_degree": max_degree},
                        len(seed_pass), seed_pass, records, 1.0, {"no_index": no_index})
