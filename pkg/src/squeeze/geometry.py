"""Geometry of finitely connected sphere domains.

A domain is the complement, in the Riemann sphere, of finitely many
disjoint compact sets in the plane ("components").  The point at
infinity therefore always belongs to the domain.  Components come in
four kinds: axis-aligned rectangles, closed disks, closed polylines,
and single points.  Rectangle coordinates may be exact rationals
(`fractions.Fraction`), which the hierarchy-of-cubes constructions use
to keep area bookkeeping exact.

The module also provides Moebius transformations acting on domains,
the cube-splitting step used by the Cantor-set builders, exact area
sums, and sampled Hausdorff distances.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import DomainError

Coord = Union[int, float, Fraction]

_GAP_REL_TOL = 1e-12


def _is_exact(*vals: Coord) -> bool:
    return all(isinstance(v, Rational) for v in vals)


def _fr(v: Coord) -> Fraction:
    # Fraction(float) is exact: binary floats are dyadic rationals.
    return v if isinstance(v, Fraction) else Fraction(v)


# ---- components ----


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle [a, b] x [c, d]."""

    a: Coord
    b: Coord
    c: Coord
    d: Coord

    def __post_init__(self) -> None:
        if not (self.a < self.b and self.c < self.d):
            raise DomainError(f"degenerate rectangle [{self.a},{self.b}]x[{self.c},{self.d}]")

    def bounds(self) -> tuple[float, float, float, float]:
        return float(self.a), float(self.b), float(self.c), float(self.d)

    def anchor(self) -> complex:
        a, b, c, d = self.bounds()
        return complex((a + b) / 2, (c + d) / 2)

    def diameter(self) -> float:
        a, b, c, d = self.bounds()
        return math.hypot(b - a, d - c)

    def corners(self) -> tuple[complex, complex, complex, complex]:
        a, b, c, d = self.bounds()
        return (complex(a, c), complex(b, c), complex(b, d), complex(a, d))

    def edges(self) -> list[tuple[complex, complex]]:
        p = self.corners()
        return [(p[i], p[(i + 1) % 4]) for i in range(4)]

    def area(self) -> Fraction:
        return (_fr(self.b) - _fr(self.a)) * (_fr(self.d) - _fr(self.c))

    def contains(self, z: complex) -> bool:
        a, b, c, d = self.bounds()
        return a <= z.real <= b and c <= z.imag <= d

    def distance(self, z: complex) -> float:
        a, b, c, d = self.bounds()
        dx = max(a - z.real, 0.0, z.real - b)
        dy = max(c - z.imag, 0.0, z.imag - d)
        return math.hypot(dx, dy)

    def max_distance(self, z: complex) -> float:
        return max(abs(z - v) for v in self.corners())

    def boundary_points(self, n: int) -> np.ndarray:
        return _sample_edges(self.edges(), n)

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        a, b, c, d = self.bounds()
        return (xs >= a) & (xs <= b) & (ys >= c) & (ys <= d)

    def to_json(self) -> dict:
        return {"kind": "rect", "a": _coord_json(self.a), "b": _coord_json(self.b),
                "c": _coord_json(self.c), "d": _coord_json(self.d)}


@dataclass(frozen=True)
class Disk:
    """Closed disk of positive radius."""

    cx: float
    cy: float
    r: float

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise DomainError(f"disk radius must be positive, got {self.r}")

    def center(self) -> complex:
        return complex(self.cx, self.cy)

    def bounds(self) -> tuple[float, float, float, float]:
        return self.cx - self.r, self.cx + self.r, self.cy - self.r, self.cy + self.r

    def anchor(self) -> complex:
        return self.center()

    def diameter(self) -> float:
        return 2.0 * self.r

    def contains(self, z: complex) -> bool:
        return abs(z - self.center()) <= self.r

    def distance(self, z: complex) -> float:
        return max(abs(z - self.center()) - self.r, 0.0)

    def max_distance(self, z: complex) -> float:
        return abs(z - self.center()) + self.r

    def boundary_points(self, n: int) -> np.ndarray:
        th = 2.0 * np.pi * np.arange(n) / n
        return self.center() + self.r * np.exp(1j * th)

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (xs - self.cx) ** 2 + (ys - self.cy) ** 2 <= self.r**2

    def to_json(self) -> dict:
        return {"kind": "disk", "cx": self.cx, "cy": self.cy, "r": self.r}


@dataclass(frozen=True)
class Poly:
    """Closed polyline, stored counterclockwise without a repeated endpoint."""

    pts: tuple[complex, ...]

    def __post_init__(self) -> None:
        pts = tuple(complex(p) for p in self.pts)
        if len(pts) >= 2 and abs(pts[0] - pts[-1]) == 0.0:
            pts = pts[:-1]
        if len(pts) < 3:
            raise DomainError("polyline needs at least 3 distinct vertices")
        if _shoelace(pts) == 0.0:
            raise DomainError("polyline has zero area")
        if _shoelace(pts) < 0.0:
            pts = pts[::-1]
        object.__setattr__(self, "pts", pts)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p.real for p in self.pts]
        ys = [p.imag for p in self.pts]
        return min(xs), max(xs), min(ys), max(ys)

    def anchor(self) -> complex:
        c = _polygon_centroid(self.pts)
        if self.contains(c) and self.distance_to_boundary(c) > 0:
            return c
        import shapely.geometry as sg

        rp = sg.Polygon([(p.real, p.imag) for p in self.pts]).representative_point()
        return complex(rp.x, rp.y)

    def diameter(self) -> float:
        pts = np.asarray(self.pts)
        if len(pts) > 600:
            pts = pts[:: len(pts) // 512]
        return float(np.abs(pts[:, None] - pts[None, :]).max())

    def edges(self) -> list[tuple[complex, complex]]:
        n = len(self.pts)
        return [(self.pts[i], self.pts[(i + 1) % n]) for i in range(n)]

    def contains(self, z: complex) -> bool:
        return bool(_winding_contains(self.pts, np.asarray([z]))[0]) or self.distance_to_boundary(z) == 0.0

    def distance_to_boundary(self, z: complex) -> float:
        return min(_segment_distance(z, p, q) for p, q in self.edges())

    def distance(self, z: complex) -> float:
        if bool(_winding_contains(self.pts, np.asarray([z]))[0]):
            return 0.0
        return self.distance_to_boundary(z)

    def max_distance(self, z: complex) -> float:
        return max(abs(z - p) for p in self.pts)

    def boundary_points(self, n: int) -> np.ndarray:
        return _sample_edges(self.edges(), n)

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
        from matplotlib.path import Path

        verts = [(p.real, p.imag) for p in self.pts]
        inside = Path(verts).contains_points(pts, radius=1e-12)
        return inside.reshape(xs.shape)

    def to_json(self) -> dict:
        return {"kind": "poly", "pts": [[p.real, p.imag] for p in self.pts]}


@dataclass(frozen=True)
class PointComponent:
    """A single removed point; zero diameter, never usable as a base."""

    x: float
    y: float

    def point(self) -> complex:
        return complex(self.x, self.y)

    def bounds(self) -> tuple[float, float, float, float]:
        return self.x, self.x, self.y, self.y

    def anchor(self) -> complex:
        return self.point()

    def diameter(self) -> float:
        return 0.0

    def contains(self, z: complex) -> bool:
        return z == self.point()

    def distance(self, z: complex) -> float:
        return abs(z - self.point())

    def max_distance(self, z: complex) -> float:
        return abs(z - self.point())

    def boundary_points(self, n: int) -> np.ndarray:
        return np.asarray([self.point()])

    def mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.zeros(xs.shape, dtype=bool)

    def to_json(self) -> dict:
        return {"kind": "point", "x": self.x, "y": self.y}


ComplementComponent = Union[Rect, Disk, Poly, PointComponent]


def _coord_json(v: Coord):
    if isinstance(v, Fraction):
        return float(v)
    return v


def _shoelace(pts: Sequence[complex]) -> float:
    n = len(pts)
    s = 0.0
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        s += p.real * q.imag - q.real * p.imag
    return 0.5 * s


def _polygon_centroid(pts: Sequence[complex]) -> complex:
    a = _shoelace(pts)
    n = len(pts)
    cx = cy = 0.0
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        w = p.real * q.imag - q.real * p.imag
        cx += (p.real + q.real) * w
        cy += (p.imag + q.imag) * w
    return complex(cx / (6 * a), cy / (6 * a))


def _winding_contains(pts: Sequence[complex], zs: np.ndarray) -> np.ndarray:
    from matplotlib.path import Path

    verts = [(p.real, p.imag) for p in pts]
    pp = np.stack([zs.real, zs.imag], axis=-1).reshape(-1, 2)
    return Path(verts).contains_points(pp, radius=1e-12)


def _segment_distance(z: complex, p: complex, q: complex) -> float:
    d = q - p
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(z - p)
    t = ((z - p).real * d.real + (z - p).imag * d.imag) / L2
    t = min(1.0, max(0.0, t))
    return abs(z - (p + t * d))


def _sample_edges(edges: Sequence[tuple[complex, complex]], n: int) -> np.ndarray:
    lengths = np.asarray([abs(q - p) for p, q in edges])
    total = lengths.sum()
    counts = np.maximum(1, np.round(n * lengths / total).astype(int))
    out = []
    for (p, q), m in zip(edges, counts):
        t = np.arange(m) / m
        out.append(p + t * (q - p))
    return np.concatenate(out)


# ---- pairwise separation ----


def component_gap(u: ComplementComponent, v: ComplementComponent) -> float:
    """Euclidean gap between two components; negative means overlap."""
    if isinstance(u, PointComponent):
        d = v.distance(u.point())
        return d if d > 0 else (-1.0 if v.contains(u.point()) else 0.0)
    if isinstance(v, PointComponent):
        return component_gap(v, u)
    if isinstance(u, Disk) and isinstance(v, Disk):
        return abs(u.center() - v.center()) - u.r - v.r
    if isinstance(u, Rect) and isinstance(v, Rect):
        ua, ub, uc, ud = u.bounds()
        va, vb, vc, vd = v.bounds()
        dx = max(va - ub, ua - vb)
        dy = max(vc - ud, uc - vd)
        if dx < 0 and dy < 0:
            return max(dx, dy)
        return math.hypot(max(dx, 0.0), max(dy, 0.0))
    if isinstance(u, Disk) and isinstance(v, Rect):
        return v.distance(u.center()) - u.r
    if isinstance(u, Rect) and isinstance(v, Disk):
        return component_gap(v, u)
    # polyline cases: sampled, with containment probes for full overlap
    if u.contains(v.anchor()) or v.contains(u.anchor()):
        return -1.0
    pu = u.boundary_points(256)
    pv = v.boundary_points(256)
    tree = cKDTree(np.stack([pv.real, pv.imag], axis=1))
    dmin, _ = tree.query(np.stack([pu.real, pu.imag], axis=1))
    gap = float(dmin.min())
    if any(v.contains(z) for z in pu[:: max(1, len(pu) // 32)]):
        return -gap
    return gap


# ---- domain ----


@dataclass(frozen=True)
class Domain:
    """Sphere domain given by its disjoint compact complement components."""

    components: tuple[ComplementComponent, ...]
    label: str = ""

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        scale = max((c.diameter() for c in comps), default=1.0) or 1.0
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                g = component_gap(comps[i], comps[j])
                if g <= scale * _GAP_REL_TOL:
                    raise DomainError(
                        f"components {i} and {j} of '{self.label}' are not disjoint (gap {g:.3g})"
                    )

    # -- queries --

    def positive_components(self) -> list[int]:
        return [i for i, c in enumerate(self.components) if c.diameter() > 0]

    def contains(self, z: complex) -> bool:
        return not any(c.contains(z) for c in self.components)

    def clearance(self, z: complex) -> float:
        if not self.components:
            return math.inf
        return min(c.distance(z) for c in self.components)

    def bbox(self) -> tuple[float, float, float, float]:
        if not self.components:
            return -1.0, 1.0, -1.0, 1.0
        bs = [c.bounds() for c in self.components]
        return (min(b[0] for b in bs), max(b[1] for b in bs),
                min(b[2] for b in bs), max(b[3] for b in bs))

    def scale(self) -> float:
        a, b, c, d = self.bbox()
        return math.hypot(b - a, d - c) or 1.0

    def min_gap(self) -> float:
        comps = self.components
        gaps = [component_gap(comps[i], comps[j])
                for i in range(len(comps)) for j in range(i + 1, len(comps))]
        return min(gaps, default=math.inf)

    def is_connected(self, resolution: int = 512) -> bool:
        """Grid flood-fill sanity check that the domain has one piece.

        This is a sampled gate, not a proof: components thinner than a
        grid cell can be missed.
        """
        a, b, c, d = self.bbox()
        pad = 0.1 * max(b - a, d - c, 1e-9)
        xs = np.linspace(a - pad, b + pad, resolution)
        ys = np.linspace(c - pad, d + pad, resolution)
        X, Y = np.meshgrid(xs, ys)
        blocked = np.zeros(X.shape, dtype=bool)
        for comp in self.components:
            blocked |= comp.mask(X, Y)
        labels, n = ndimage.label(~blocked)
        free_labels = np.unique(labels[~blocked])
        return len(free_labels) <= 1

    # -- serialization --

    def to_json(self) -> dict:
        return {"label": self.label, "components": [c.to_json() for c in self.components]}

    @staticmethod
    def from_json(obj: dict) -> "Domain":
        if not isinstance(obj, dict):
            raise DomainError("domain JSON must be an object")
        unknown = set(obj) - {"label", "components"}
        if unknown:
            raise DomainError(f"unknown domain keys: {sorted(unknown)}")
        comps = []
        for i, cj in enumerate(obj.get("components", [])):
            comps.append(component_from_json(cj, where=f"components[{i}]"))
        return Domain(tuple(comps), label=str(obj.get("label", "")))

    @staticmethod
    def load(path: str) -> "Domain":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{path}: invalid JSON ({exc})") from exc
        return Domain.from_json(obj)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


_COMPONENT_FIELDS = {
    "rect": {"a", "b", "c", "d"},
    "disk": {"cx", "cy", "r"},
    "poly": {"pts"},
    "point": {"x", "y"},
}


def component_from_json(obj: dict, where: str = "component") -> ComplementComponent:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError(f"{where}: expected an object with a 'kind' field")
    kind = obj["kind"]
    if kind not in _COMPONENT_FIELDS:
        raise DomainError(f"{where}: unknown component kind '{kind}'")
    want = _COMPONENT_FIELDS[kind]
    got = set(obj) - {"kind"}
    if got != want:
        raise DomainError(f"{where}: kind '{kind}' needs fields {sorted(want)}, got {sorted(got)}")
    if kind == "rect":
        return Rect(obj["a"], obj["b"], obj["c"], obj["d"])
    if kind == "disk":
        return Disk(obj["cx"], obj["cy"], obj["r"])
    if kind == "point":
        return PointComponent(obj["x"], obj["y"])
    pts = obj["pts"]
    if not isinstance(pts, list) or any(len(p) != 2 for p in pts):
        raise DomainError(f"{where}: 'pts' must be a list of [x, y] pairs")
    return Poly(tuple(complex(p[0], p[1]) for p in pts))


# ---- hierarchy cubes ----


@dataclass(frozen=True)
class HierarchyCube:
    """A rectangle in a split hierarchy together with its lineage."""

    rect: Rect
    depth: int = 0
    lineage: tuple[tuple[str, int, str], ...] = field(default_factory=tuple)

    def child(self, rect: Rect, axis: str, k: int, side: str) -> "HierarchyCube":
        return HierarchyCube(rect, self.depth + 1, self.lineage + ((axis, k, side),))


def unit_cube() -> HierarchyCube:
    return HierarchyCube(Rect(Fraction(0), Fraction(1), Fraction(0), Fraction(1)))


def split_cube(cube, k: int, axis: str):
    """Split a cube across its midline, removing an open 1/k-slab.

    The midline is vertical for axis "vertical" (children lie left and
    right) and horizontal for axis "horizontal".  The removed slab is
    the set of points within 1/k of the midline, so the two children
    are separated by a gap of exactly 2/k.  Rational coordinates stay
    rational.
    """
    if axis not in ("vertical", "horizontal"):
        raise DomainError(f"axis must be 'vertical' or 'horizontal', got {axis!r}")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    rect = cube.rect if isinstance(cube, HierarchyCube) else cube
    a, b, c, d = rect.a, rect.b, rect.c, rect.d
    exact = _is_exact(a, b, c, d)
    gap = Fraction(1, k) if exact else 1.0 / k
    half = Fraction(1, 2) if exact else 0.5
    if axis == "vertical":
        width = b - a
        if not width > 2 * gap:
            raise DomainError(f"cube width {width} too small to split with k={k} (needs > 2/k)")
        mid = a + (b - a) * half
        lo = Rect(a, mid - gap, c, d)
        hi = Rect(mid + gap, b, c, d)
    else:
        height = d - c
        if not height > 2 * gap:
            raise DomainError(f"cube height {height} too small to split with k={k} (needs > 2/k)")
        mid = c + (d - c) * half
        lo = Rect(a, b, c, mid - gap)
        hi = Rect(a, b, mid + gap, d)
    if isinstance(cube, HierarchyCube):
        return cube.child(lo, axis, k, "lo"), cube.child(hi, axis, k, "hi")
    return lo, hi


def lebesgue_measure(cubes: Iterable) -> Fraction:
    """Exact area of a disjoint union of rectangles.

    Raises on positive-area overlap.  Floats convert exactly (they are
    dyadic rationals), so the result is an exact `Fraction`.
    """
    rects = [c.rect if isinstance(c, HierarchyCube) else c for c in cubes]
    for r in rects:
        if not isinstance(r, Rect):
            raise DomainError("lebesgue_measure expects rectangles or hierarchy cubes")
    total = Fraction(0)
    vals = [tuple(map(_fr, (r.a, r.b, r.c, r.d))) for r in rects]
    for i, (a1, b1, c1, d1) in enumerate(vals):
        total += (b1 - a1) * (d1 - c1)
        for a2, b2, c2, d2 in vals[i + 1:]:
            ox = min(b1, b2) - max(a1, a2)
            oy = min(d1, d2) - max(c1, c2)
            if ox > 0 and oy > 0:
                raise DomainError("rectangles overlap with positive area")
    return total


# ---- Hausdorff distance ----


def _point_array(obj, samples: int) -> np.ndarray:
    if isinstance(obj, Domain):
        comps = obj.components
    elif isinstance(obj, (Rect, Disk, Poly, PointComponent)):
        comps = (obj,)
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (Rect, Disk, Poly, PointComponent)):
        comps = tuple(obj)
    else:
        arr = np.asarray(obj)
        if arr.ndim == 2 and arr.shape[1] == 2:
            return arr[:, 0] + 1j * arr[:, 1]
        return arr.astype(complex).ravel()
    if not comps:
        raise DomainError("cannot take Hausdorff distance of an empty component set")
    return np.concatenate([c.boundary_points(samples) for c in comps])


def hausdorff_distance(first, second, samples: int = 256) -> float:
    """Symmetric Hausdorff distance between two sampled component sets.

    Accepts domains, component lists, or raw point clouds.  Components
    are discretized with `samples` boundary points each, so the result
    carries a sampling error of the order of the boundary spacing.
    """
    pa = _point_array(first, samples)
    pb = _point_array(second, samples)
    ta = cKDTree(np.stack([pa.real, pa.imag], axis=1))
    tb = cKDTree(np.stack([pb.real, pb.imag], axis=1))
    dab, _ = tb.query(np.stack([pa.real, pa.imag], axis=1))
    dba, _ = ta.query(np.stack([pb.real, pb.imag], axis=1))
    return float(max(dab.max(), dba.max()))


# ---- Moebius transformations ----


@dataclass(frozen=True)
class MobiusMap:
    """Moebius transformation z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise DomainError("Moebius map is degenerate (ad - bc = 0)")

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(1, 0, 0, 1)

    @staticmethod
    def translation(t: complex) -> "MobiusMap":
        return MobiusMap(1, t, 0, 1)

    @staticmethod
    def inversion_about(p: complex) -> "MobiusMap":
        """z -> 1 / (z - p)."""
        return MobiusMap(0, 1, 1, -p)

    def is_affine(self) -> bool:
        return self.c == 0

    def pole(self) -> complex | None:
        if self.c == 0:
            return None
        return -self.d / self.c

    def __call__(self, z: complex) -> complex:
        den = self.c * z + self.d
        if den == 0:
            raise DomainError(f"Moebius map evaluated at its pole {z}")
        return (self.a * z + self.b) / den

    def apply_array(self, zs: np.ndarray) -> np.ndarray:
        return (self.a * zs + self.b) / (self.c * zs + self.d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """Map acting as self after other."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def map_circle(self, center: complex, r: float) -> tuple[complex, float]:
        """Image circle of |z - center| = r; the pole must not lie on it."""
        if self.is_affine():
            s = self.a / self.d
            return s * center + self.b / self.d, abs(s) * r
        p = self.pole()
        A = self.a / self.c
        B = (self.b * self.c - self.a * self.d) / (self.c * self.c)
        c0 = center - p
        s = abs(c0) ** 2 - r * r
        if s == 0:
            raise DomainError("Moebius pole lies on a circle boundary")
        c1 = c0.conjugate() / s
        r1 = r / abs(s)
        return A + B * c1, abs(B) * r1


def mobius_apply(domain: Domain, transform: MobiusMap, samples: int = 256) -> Domain:
    """Transform a domain by a Moebius map.

    The pole of the map must lie in the domain (strictly off every
    component); otherwise some image component would swallow infinity
    and leave the compact-component model.  Rectangles re-emit as
    polylines: exactly under affine maps, sampled with `samples` edge
    points under maps with a pole.
    """
    p = transform.pole()
    if p is not None:
        for i, comp in enumerate(domain.components):
            if comp.distance(p) == 0.0:
                raise DomainError(
                    f"Moebius pole {p} meets component {i}; image would be unbounded"
                )
    out: list[ComplementComponent] = []
    for comp in domain.components:
        if isinstance(comp, Disk):
            ctr, r = transform.map_circle(comp.center(), comp.r)
            out.append(Disk(ctr.real, ctr.imag, r))
        elif isinstance(comp, PointComponent):
            w = transform(comp.point())
            out.append(PointComponent(w.real, w.imag))
        elif isinstance(comp, (Rect, Poly)):
            if transform.is_affine():
                verts = comp.corners() if isinstance(comp, Rect) else comp.pts
                out.append(Poly(tuple(transform(v) for v in verts)))
            else:
                zs = comp.boundary_points(samples)
                out.append(Poly(tuple(transform.apply_array(zs))))
        else:  # pragma: no cover - exhaustive over component kinds
            raise DomainError(f"unsupported component type {type(comp).__name__}")
    return Domain(tuple(out), label=domain.label)


# ---- canonical examples ----


def disk_exterior_domain(label: str = "disk") -> Domain:
    """Complement of the closed unit disk: a simply connected domain."""
    return Domain((Disk(0.0, 0.0, 1.0),), label=label)


def two_disk_domain(center: float = 2.0, r: float = 1.0, label: str = "two-disks") -> Domain:
    return Domain((Disk(-center, 0.0, r), Disk(center, 0.0, r)), label=label)


def annulus_as_disk_pair(rho: float, pole: complex = -0.6, label: str = "annulus-chart"):
    """Realize the round annulus {rho < |z| < 1} as a two-disk complement.

    The annulus itself has an unbounded complement component, which the
    compact-component model cannot store.  Pushing it forward by
    z -> 1/(z - pole), with the pole inside the annulus, produces two
    disjoint closed disks.  Returns (domain, transform, outer_index,
    inner_index) where the indices locate the images of the unit circle
    and of the inner circle.
    """
    if not 0 < rho < 1:
        raise DomainError(f"annulus modulus must satisfy 0 < rho < 1, got {rho}")
    if not rho < abs(pole) < 1:
        raise DomainError(f"chart pole must lie inside the annulus, got {pole}")
    T = MobiusMap.inversion_about(pole)
    c_out, r_out = T.map_circle(0.0, 1.0)
    c_in, r_in = T.map_circle(0.0, rho)
    domain = Domain(
        (Disk(c_out.real, c_out.imag, r_out), Disk(c_in.real, c_in.imag, r_in)),
        label=label,
    )
    return domain, T, 0, 1
