"""Zero-dimensional schemes built from reduced points, tangent vectors and
double points on a multiprojective space.

Points are stored with each factor normalized so that its last nonzero
coordinate is 1.  A tangent direction is a vector of length sum(n_i) in the
affine chart of that representative: the chunk for factor i lists the
derivatives along the coordinates other than the normalized one, in
increasing coordinate order.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exactla import DEFAULT_PRIME
from .ring import Point, Space, chart_index, check_point, normalize_factor


class Kind(str, enum.Enum):
    REDUCED = "reduced"
    TANGENT = "tangent"
    DOUBLE = "double"


class SchemeFormatError(ValueError):
    """Malformed scheme description; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class LocalComponent:
    kind: Kind
    point: Point
    direction: tuple[int, ...] | None = None

    def degree(self, X: Space) -> int:
        if self.kind is Kind.REDUCED:
            return 1
        if self.kind is Kind.TANGENT:
            return 2
        return 1 + X.dim

    def chunks(self, X: Space) -> list[tuple[int, ...] | None]:
        """Per-factor tangent direction as a homogeneous vector, None when zero."""
        out: list[tuple[int, ...] | None] = []
        pos = 0
        for n, coords in zip(X.dims, self.point):
            piece = self.direction[pos:pos + n]
            pos += n
            if not any(piece):
                out.append(None)
                continue
            ell = chart_index(coords)
            free = [j for j in range(n + 1) if j != ell]
            v = [0] * (n + 1)
            for j, d in zip(free, piece):
                v[j] = d
            out.append(tuple(v))
        return out


def make_component(X: Space, kind, point, direction=None, p: int = DEFAULT_PRIME) -> LocalComponent:
    kind = Kind(kind)
    pt = tuple(normalize_factor(f, p) for f in check_point(X, point, p))
    if kind is Kind.TANGENT:
        if direction is None:
            raise ValueError("tangent component needs a direction")
        d = tuple(int(x) % p for x in direction)
        if len(d) != X.dim:
            raise ValueError(f"direction must have length {X.dim}, got {len(d)}")
        if not any(d):
            raise ValueError("tangent direction must be nonzero")
        return LocalComponent(kind, pt, d)
    if direction is not None:
        raise ValueError(f"{kind.value} component takes no direction")
    return LocalComponent(kind, pt, None)


@dataclass(frozen=True)
class ZeroScheme:
    space: Space
    components: tuple[LocalComponent, ...] = ()
    p: int = field(default=DEFAULT_PRIME)

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        supports = [c.point for c in comps]
        if len(set(supports)) != len(supports):
            raise ValueError("components must have pairwise distinct supports")

    @property
    def degree(self) -> int:
        return sum(c.degree(self.space) for c in self.components)

    @property
    def support(self) -> list[Point]:
        return [c.point for c in self.components]

    def __len__(self) -> int:
        return len(self.components)

    def union(self, other: "ZeroScheme") -> "ZeroScheme":
        if other.space != self.space or other.p != self.p:
            raise ValueError("cannot unite schemes on different spaces or fields")
        return ZeroScheme(self.space, self.components + other.components, self.p)

    def projection(self, i: int) -> set[tuple[int, ...]]:
        return {c.point[i] for c in self.components}

    def to_dict(self) -> dict:
        comps = []
        for c in self.components:
            d = {"kind": c.kind.value, "point": [list(f) for f in c.point]}
            if c.direction is not None:
                d["direction"] = list(c.direction)
            comps.append(d)
        return {"space": list(self.space.dims), "components": comps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data, p: int = DEFAULT_PRIME) -> "ZeroScheme":
        if not isinstance(data, dict):
            raise SchemeFormatError("<root>", "expected a JSON object")
        dims = data.get("space")
        if not isinstance(dims, list) or not dims or not all(isinstance(n, int) and n >= 1 for n in dims):
            raise SchemeFormatError("space", "expected a nonempty list of positive integers")
        X = Space(tuple(dims))
        raw = data.get("components", [])
        if not isinstance(raw, list):
            raise SchemeFormatError("components", "expected a list")
        comps = []
        for idx, c in enumerate(raw):
            where = f"components[{idx}]"
            if not isinstance(c, dict):
                raise SchemeFormatError(where, "expected an object")
            kind = c.get("kind")
            if kind not in {k.value for k in Kind}:
                raise SchemeFormatError(f"{where}.kind", f"unknown kind {kind!r}")
            pt = c.get("point")
            if (not isinstance(pt, list) or len(pt) != X.k
                    or not all(isinstance(f, list) and all(isinstance(x, int) for x in f) for f in pt)):
                raise SchemeFormatError(f"{where}.point", f"expected {X.k} integer coordinate lists")
            direction = c.get("direction")
            if direction is not None and (not isinstance(direction, list)
                                          or not all(isinstance(x, int) for x in direction)):
                raise SchemeFormatError(f"{where}.direction", "expected a list of integers")
            try:
                comps.append(make_component(X, kind, pt, direction, p))
            except ValueError as exc:
                field_name = f"{where}.direction" if "direction" in str(exc) else f"{where}.point"
                raise SchemeFormatError(field_name, str(exc)) from None
        try:
            return cls(X, tuple(comps), p)
        except ValueError as exc:
            raise SchemeFormatError("components", str(exc)) from None

    @classmethod
    def from_json(cls, text: str, p: int = DEFAULT_PRIME) -> "ZeroScheme":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemeFormatError("<root>", f"invalid JSON ({exc.msg})") from None
        return cls.from_dict(data, p)


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_factor(rng: np.random.Generator, n: int, p: int) -> tuple[int, ...]:
    while True:
        c = tuple(int(x) for x in rng.integers(0, p, size=n + 1))
        if any(c):
            return c


def _random_direction(rng, X: Space, p: int, zero_factor: int | None = None) -> tuple[int, ...]:
    while True:
        d = [int(x) for x in rng.integers(0, p, size=X.dim)]
        if zero_factor is not None:
            start = sum(X.dims[:zero_factor])
            d[start:start + X.dims[zero_factor]] = [0] * X.dims[zero_factor]
        if any(d):
            return tuple(d)


def _kinds(kind, s: int, rng) -> list[Kind]:
    if isinstance(kind, str) and kind == "mixed":
        choices = list(Kind)
        return [choices[int(j)] for j in rng.integers(0, 3, size=s)]
    if isinstance(kind, (str, Kind)):
        return [Kind(kind)] * s
    kinds = [Kind(x) for x in kind]
    if len(kinds) != s:
        raise ValueError("need one kind per component")
    return kinds


def random_general(X: Space, s: int, kind="reduced", seed=None, p: int = DEFAULT_PRIME) -> ZeroScheme:
    """s components with uniformly random coordinates (and directions) over F_p.

    ``kind`` is a single kind, a list of kinds, or ``"mixed"``.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    rng = as_rng(seed)
    kinds = _kinds(kind, s, rng)
    comps: list[LocalComponent] = []
    seen: set = set()
    for kd in kinds:
        while True:
            pt = tuple(normalize_factor(_random_factor(rng, n, p), p) for n in X.dims)
            if pt not in seen:
                break
        seen.add(pt)
        direction = _random_direction(rng, X, p) if kd is Kind.TANGENT else None
        comps.append(make_component(X, kd, pt, direction, p))
    return ZeroScheme(X, tuple(comps), p)


def random_in_fiber(X: Space, i: int, fiber_point, s: int, seed=None, kind="reduced",
                    p: int = DEFAULT_PRIME) -> ZeroScheme:
    """s components whose support projects to ``fiber_point`` in factor i.

    Tangent directions are drawn inside the fiber so the whole scheme lies in
    pi_i^{-1}(fiber_point).  Double points never fit inside a fiber.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    rng = as_rng(seed)
    kinds = _kinds(kind, s, rng)
    if Kind.DOUBLE in kinds:
        raise ValueError("a double point is not contained in a fiber")
    if X.k < 2 and s > 1:
        raise ValueError("the fiber of a single factor is a point")
    base = normalize_factor(fiber_point, p)
    if len(base) != X.dims[i] + 1:
        raise ValueError("fiber point has the wrong number of coordinates")
    comps, seen = [], set()
    for kd in kinds:
        while True:
            pt = tuple(base if h == i else normalize_factor(_random_factor(rng, n, p), p)
                       for h, n in enumerate(X.dims))
            if pt not in seen:
                break
        seen.add(pt)
        direction = _random_direction(rng, X, p, zero_factor=i) if kd is Kind.TANGENT else None
        comps.append(make_component(X, kd, pt, direction, p))
    return ZeroScheme(X, tuple(comps), p)


def degree(Z: ZeroScheme) -> int:
    return Z.degree


def on_hyperplane(comp: LocalComponent, i: int, H: Sequence[int], p: int) -> bool:
    return sum(int(h) * c for h, c in zip(H, comp.point[i])) % p == 0


def residual(Z: ZeroScheme, i: int, H: Sequence[int]) -> ZeroScheme:
    """Residual of Z with respect to D = pi_i^{-1}(H), H = {sum_j H_j x_ij = 0}.

    Components off D are kept.  On D: a reduced point disappears, a double
    point leaves its reduced support, and a tangent vector leaves its support
    when its direction is transverse to D and disappears when it lies in D.
    """
    p = Z.p
    H = [int(h) % p for h in H]
    if len(H) != Z.space.dims[i] + 1 or not any(H):
        raise ValueError("H must be a nonzero linear form on factor i")
    out = []
    for c in Z.components:
        if not on_hyperplane(c, i, H, p):
            out.append(c)
        elif c.kind is Kind.DOUBLE:
            out.append(LocalComponent(Kind.REDUCED, c.point))
        elif c.kind is Kind.TANGENT:
            v = c.chunks(Z.space)[i]
            if v is not None and sum(h * x for h, x in zip(H, v)) % p:
                out.append(LocalComponent(Kind.REDUCED, c.point))
    return ZeroScheme(Z.space, tuple(out), p)


def trace_degree(Z: ZeroScheme, i: int, H: Sequence[int]) -> int:
    """deg(Z cap D) for D = pi_i^{-1}(H), by the local types."""
    return Z.degree - residual(Z, i, H).degree


def union_all(schemes: Iterable[ZeroScheme]) -> ZeroScheme:
    schemes = list(schemes)
    out = schemes[0]
    for s in schemes[1:]:
        out = out.union(s)
    return out


CORPUS_SPACES = ((1,), (2,), (1, 1), (1, 2), (2, 2), (1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2))


def random_corpus(count: int, seed=0, spaces: Sequence[Sequence[int]] = CORPUS_SPACES,
                  max_degree: int = 12, max_components: int = 7,
                  p: int = DEFAULT_PRIME) -> list[ZeroScheme]:
    """``count`` mixed-kind schemes on random spaces, each of degree <= max_degree."""
    rng = as_rng(seed)
    out = []
    while len(out) < count:
        X = Space(tuple(spaces[int(rng.integers(len(spaces)))]))
        s = int(rng.integers(1, max_components + 1))
        Z = random_general(X, s, "mixed", int(rng.integers(2**63)), p)
        if Z.degree <= max_degree:
            out.append(Z)
    return out
