"""Hyperbolic metric models and loop-length upper bounds.

All metrics are normalized to curvature -1: the unit-disk density is
2/(1-|z|^2) and the distance from 0 to s in (0,1) is log((1+s)/(1-s)).
Upper bounds for squeezing come from lengths of separating loops,
measured in an explicitly hyperbolic witness subdomain (round disk,
punctured disk, or round annulus) contained in the domain; inclusion
makes the witness density pointwise dominate the domain density, so
the witness length bounds the true length from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, NoWitnessError
from .geometry import Domain, PointComponent

# ---- distances and densities ----


def poincare_distance_disk(a: complex, b: complex) -> float:
    """Hyperbolic distance in the unit disk, curvature -1."""
    a = complex(a)
    b = complex(b)
    if abs(a) >= 1 or abs(b) >= 1:
        raise DomainError("poincare_distance_disk needs points inside the unit disk")
    t = abs(a - b) / abs(1 - a.conjugate() * b)
    return math.log1p(t) - math.log1p(-t)


@dataclass(frozen=True)
class DiskModel:
    """Round disk |z - center| < radius."""

    center: complex = 0.0
    radius: float = 1.0

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius

    def density(self, z: complex) -> float:
        r2 = abs(z - self.center) ** 2
        if r2 >= self.radius**2:
            raise DomainError("density evaluated outside the disk model")
        return 2.0 * self.radius / (self.radius**2 - r2)

    def boundary_points(self, n: int) -> np.ndarray:
        th = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * th)

    def describe(self) -> dict:
        return {"kind": "disk", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class PuncturedDiskModel:
    """Punctured round disk 0 < |z - center| < radius."""

    center: complex = 0.0
    radius: float = 1.0

    def contains(self, z: complex) -> bool:
        r = abs(z - self.center)
        return 0.0 < r < self.radius

    def density(self, z: complex) -> float:
        r = abs(z - self.center)
        if not 0.0 < r < self.radius:
            raise DomainError("density evaluated outside the punctured disk model")
        return 1.0 / (r * math.log(self.radius / r))

    def boundary_points(self, n: int) -> np.ndarray:
        th = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * th)

    def describe(self) -> dict:
        return {"kind": "punctured_disk", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class AnnulusModel:
    """Round annulus r_inner < |z - center| < r_outer."""

    center: complex = 0.0
    r_inner: float = 0.25
    r_outer: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.r_inner < self.r_outer:
            raise DomainError("annulus model needs 0 < r_inner < r_outer")

    def modulus_log(self) -> float:
        return math.log(self.r_outer / self.r_inner)

    def contains(self, z: complex) -> bool:
        r = abs(z - self.center)
        return self.r_inner < r < self.r_outer

    def density(self, z: complex) -> float:
        r = abs(z - self.center)
        if not self.r_inner < r < self.r_outer:
            raise DomainError("density evaluated outside the annulus model")
        L = self.modulus_log()
        return (math.pi / L) / (r * math.sin(math.pi * math.log(r / self.r_inner) / L))

    def boundary_points(self, n: int) -> np.ndarray:
        th = 2.0 * np.pi * np.arange(n // 2) / (n // 2)
        ring = np.exp(1j * th)
        return np.concatenate([self.center + self.r_inner * ring,
                               self.center + self.r_outer * ring])

    def describe(self) -> dict:
        return {"kind": "annulus", "center": [self.center.real, self.center.imag],
                "r_inner": self.r_inner, "r_outer": self.r_outer}


MetricModel = Union[DiskModel, PuncturedDiskModel, AnnulusModel]


def metric_density(model: MetricModel, z: complex) -> float:
    """Curvature -1 hyperbolic density of a model domain at z."""
    return model.density(complex(z))


def hyperbolic_length(model: MetricModel, loop: np.ndarray) -> float:
    """Length of a closed polyline in a model metric, Simpson per segment."""
    zs = np.asarray(loop, dtype=complex)
    if len(zs) < 3:
        raise DomainError("loop needs at least 3 vertices")
    nxt = np.roll(zs, -1)
    total = 0.0
    for p, q in zip(zs, nxt):
        m = 0.5 * (p + q)
        total += abs(q - p) * (model.density(p) + 4.0 * model.density(m) + model.density(q)) / 6.0
    return total


# ---- loops ----


def circle_loop(center: complex, radius: float, n: int = 256) -> np.ndarray:
    if radius <= 0:
        raise DomainError("circle loop needs positive radius")
    th = 2.0 * np.pi * np.arange(n) / n
    return complex(center) + radius * np.exp(1j * th)


def winding_number(loop: np.ndarray, z: complex) -> int:
    zs = np.asarray(loop, dtype=complex) - complex(z)
    ang = np.angle(np.roll(zs, -1) / zs)
    return int(round(ang.sum() / (2.0 * np.pi)))


@dataclass(frozen=True)
class LoopEstimate:
    """A loop, a witness model containing it, and the resulting bound."""

    loop: np.ndarray
    length: float
    model: MetricModel
    enclosed: tuple[int, ...]
    contractible: bool
    inclusion_margin: float

    def squeeze_upper(self) -> float:
        return squeeze_upper_from_loop(self.length)

    def describe(self) -> dict:
        return {
            "length": self.length,
            "upper": self.squeeze_upper(),
            "witness": self.model.describe(),
            "enclosed": list(self.enclosed),
            "contractible": self.contractible,
            "inclusion_margin": self.inclusion_margin,
        }


def squeeze_upper_from_loop(length: float) -> float:
    """Upper bound (e^L - 1)/(e^L + 1) from a separating loop of length L."""
    if length < 0:
        raise DomainError("loop length must be nonnegative")
    return math.tanh(0.5 * length)


def sublemma_gap(delta: float) -> float:
    """Distance gap d(0, 1/(1+delta)) - d(0, 1/(1+2 delta)); tends to log 2."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    return poincare_distance_disk(0.0, 1.0 / (1.0 + delta)) - poincare_distance_disk(
        0.0, 1.0 / (1.0 + 2.0 * delta)
    )


# ---- witness search ----


def _loop_in_model(model: MetricModel, loop: np.ndarray) -> bool:
    return all(model.contains(z) for z in loop)


def _witness_in_domain(domain: Domain, model: MetricModel, samples: int) -> float:
    """Smallest clearance of the witness boundary inside the domain.

    For the punctured model the puncture itself must coincide with a
    removed point, which the caller guarantees; boundary circles are
    checked by sampling.
    """
    margin = math.inf
    for z in model.boundary_points(samples):
        # witness boundary may touch a component; interior must not cross
        margin = min(margin, domain.clearance(z))
    interior = model.center if not isinstance(model, AnnulusModel) else (
        model.center + 0.5 * (model.r_inner + model.r_outer)
    )
    return margin


def kobayashi_length_upper(
    domain: Domain,
    loop: np.ndarray,
    samples: int = 512,
    extra_centers: tuple[complex, ...] = (),
) -> LoopEstimate:
    """Best hyperbolic-length upper bound for a closed loop in a domain.

    Searches witness subdomains among round disks, punctured disks
    centered at removed points, and round annuli centered near the
    enclosed components, each verified to contain the loop and to lie
    inside the domain.  Raises `NoWitnessError` when no candidate
    fits.  The estimate records which components the loop winds
    around; a bound from a loop that does not separate the intended
    obstruction says nothing about squeezing, so callers must check
    `enclosed`/`contractible` before converting lengths to bounds.
    """
    zs = np.asarray(loop, dtype=complex)
    if len(zs) < 8:
        raise DomainError("loop needs at least 8 vertices for witness checks")
    if not domain.components:
        raise NoWitnessError("domain has no components; no hyperbolic witness exists")
    for z in zs:
        if not domain.contains(z):
            raise DomainError(f"loop vertex {z} lies outside the domain")

    enclosed = tuple(
        i for i, comp in enumerate(domain.components)
        if winding_number(zs, comp.anchor()) != 0
    )
    outside = [c for i, c in enumerate(domain.components) if i not in enclosed]
    contractible = len(enclosed) == 0
    centroid = complex(zs.mean())

    candidates: list[MetricModel] = []

    if contractible:
        for c in (centroid, *extra_centers):
            reach = float(np.abs(zs - c).max())
            room = domain.clearance(c)
            if room > reach:
                candidates.append(DiskModel(c, room))
    elif not outside:
        raise NoWitnessError("loop encircles every component; it bounds no obstruction")
    else:
        enc_comps = [domain.components[i] for i in enclosed]
        if len(enc_comps) == 1 and isinstance(enc_comps[0], PointComponent):
            p = enc_comps[0].point()
            room = min(c.distance(p) for c in outside)
            reach = float(np.abs(zs - p).max())
            if room > reach and float(np.abs(zs - p).min()) > 0:
                candidates.append(PuncturedDiskModel(p, room))
        anchors = [c.anchor() for c in enc_comps]
        centers = [sum(anchors) / len(anchors), centroid, *anchors, *extra_centers]
        for c in centers:
            r_in = max(comp.max_distance(c) for comp in enc_comps)
            r_out = min(comp.distance(c) for comp in outside)
            lo = float(np.abs(zs - c).min())
            hi = float(np.abs(zs - c).max())
            if 0.0 < r_in < lo and hi < r_out:
                candidates.append(AnnulusModel(c, r_in, r_out))

    best: LoopEstimate | None = None
    for model in candidates:
        if not _loop_in_model(model, zs):
            continue
        length = hyperbolic_length(model, zs)
        margin = _witness_in_domain(domain, model, samples)
        if margin < 0:
            continue
        est = LoopEstimate(zs, length, model, enclosed, contractible, margin)
        if best is None or est.length < best.length:
            best = est
    if best is None:
        raise NoWitnessError(
            f"no disk/punctured/annulus witness fits the loop (enclosed={list(enclosed)})"
        )
    return best
