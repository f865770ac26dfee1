"""Circular-slit-disk potentials and squeezing lower bounds.

For a finitely connected sphere domain with compact complement
components K_1..K_m and a base point x, the canonical map grounding
component K_k sends the domain injectively onto the unit disk minus
concentric circular arcs, with K_k's boundary going to the unit circle
and x to 0.  Writing u = log|map|, the potential solves a Dirichlet
problem: u has a log pole at x, vanishes on K_k, is an unknown
constant log r_i on each other K_i, is harmonic at infinity, and has
vanishing conjugate periods around the non-base components.  The
radius of the largest centered disk inside the image is min_i r_i,
which is a lower bound for the squeezing function at x; maximizing
over the base component gives the best such bound.

The solver represents u as

    log|z - x| - log|z - a_k| + sum of Laurent tails and simple poles
    anchored inside the components + a constant,

which builds the pole normalization, the behaviour at infinity, and
the period conditions into the basis exactly.  The remaining linear
coefficients and the slit levels come from a weighted least-squares
fit of the boundary conditions at collocation nodes (corner-clustered
poles handle rectangle corners; smooth polylines get an interior ring
of sources).  Residuals are reported and gate acceptance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, IllConditionedError, ResidualError, SolverError
from .geometry import Disk, Domain, PointComponent, Poly, Rect

# ---- parameters ----


@dataclass(frozen=True)
class SolverParams:
    """Discretization and acceptance knobs for the slit-potential solver."""

    order: int = 24              # Laurent tail order per component
    boundary_points: int = 256   # collocation nodes per component
    tol: float = 1e-5            # accept when boundary residual is below this
    corner_poles: int = 24       # clustered poles per sharp corner
    ring_sources: int = 48       # interior sources per smooth polyline
    clearance: float = 5e-3      # min relative distance of x to positive-diameter components
    crowding_gap: float = 1e-3   # min relative pairwise gap before refusing to solve
    condition_limit: float = 1e30


DEFAULT_PARAMS = SolverParams()

_SHARP_TURN_DEG = 25.0


# ---- results ----


@dataclass(frozen=True)
class SlitSolution:
    """Accepted potential for one base component and one base point."""

    base: int
    x: complex
    radii: dict[int, float]
    gamma: dict[int, float]
    singularity_coefficients: dict[str, float]
    series_coefficients: dict[int, np.ndarray]
    boundary_residual: float
    period_residual: float
    condition: float
    params: SolverParams
    _system: "SlitSystem"
    _theta: np.ndarray

    def potential(self, z) -> np.ndarray | float:
        """Evaluate u = log|map| at points of the domain."""
        zs = np.asarray(z, dtype=complex)
        vals = self._system.potential(zs.ravel(), self.x, self._theta)
        if zs.shape == ():
            return float(vals[0])
        return vals.reshape(zs.shape)

    def slit_radii(self) -> list[float]:
        return [self.radii[i] for i in sorted(self.radii)]


def slit_squeeze(solution: SlitSolution) -> float:
    """Largest centered disk radius in the image: min slit radius, 1 if none."""
    radii = solution.slit_radii()
    return min(radii) if radii else 1.0


@dataclass(frozen=True)
class Bracket:
    """Squeezing bracket at a point: certified lower, optional upper."""

    x: complex
    lower: float
    upper: float
    best_base: int | None
    diagnostics: dict

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", min(max(self.lower, 0.0), 1.0))
        object.__setattr__(self, "upper", min(max(self.upper, 0.0), 1.0))


# ---- boundary discretization ----


def _end_cluster(per_corner: int) -> np.ndarray:
    # exponential clustering toward a corner, dense enough to resolve
    # poles laid down with the same sqrt-exponential law
    m = math.ceil((math.sqrt(per_corner) + 0.6) ** 2)
    i = np.arange(1, m + 1)
    return 0.35 * np.exp(-4.0 * (np.sqrt(m) - np.sqrt(i)))


def _edge_nodes(edges, n_total: int, per_corner: int) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.asarray([abs(q - p) for p, q in edges])
    counts = np.maximum(4, np.round(n_total * lengths / lengths.sum()).astype(int))
    end = _end_cluster(per_corner)
    nodes, weights = [], []
    for (p, q), m in zip(edges, counts):
        mid_n = max(3, m - 2 * len(end))
        mid = 0.35 + (np.arange(mid_n) + 0.5) / mid_n * 0.30
        t = np.sort(np.concatenate([end, mid, 1.0 - end]))
        zs = p + t * (q - p)
        # arc weight: half-gap to the neighbouring parameters, open at corners
        tpad = np.concatenate([[0.0], t, [1.0]])
        dw = 0.5 * (tpad[2:] - tpad[:-2]) * abs(q - p)
        nodes.append(zs)
        weights.append(dw)
    return np.concatenate(nodes), np.concatenate(weights)


def _component_nodes(comp, n: int, per_corner: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(comp, Disk):
        th = 2.0 * np.pi * np.arange(n) / n
        zs = comp.center() + comp.r * np.exp(1j * th)
        w = np.full(n, 2.0 * np.pi * comp.r / n)
        return zs, w
    if isinstance(comp, (Rect, Poly)):
        return _edge_nodes(comp.edges(), n, per_corner)
    raise DomainError(f"no collocation rule for component {type(comp).__name__}")


# ---- pole placement ----


def _corner_poles(v: complex, inward: complex, reach: float, count: int) -> np.ndarray:
    j = np.arange(1, count + 1)
    dist = reach * np.exp(-4.0 * (math.sqrt(count) - np.sqrt(j)))
    return v + inward * dist


def _rect_poles(comp: Rect, per_corner: int) -> np.ndarray:
    a, b, c, d = comp.bounds()
    ctr = comp.anchor()
    out = []
    for v in comp.corners():
        direction = (ctr - v) / abs(ctr - v)
        reach = 0.5 * min(b - a, d - c)
        out.append(_corner_poles(v, direction, reach, per_corner))
    return np.concatenate(out)


def _rect_axis_poles(comp: Rect) -> np.ndarray:
    # elongated rectangles: the exterior field has singularities spread
    # along the medial axis, beyond what corner poles resolve
    a, b, c, d = comp.bounds()
    w, h = b - a, d - c
    short, long_side = min(w, h), max(w, h)
    if long_side <= 1.5 * short:
        return np.empty(0, complex)
    half = 0.5 * (long_side - short)
    count = max(3, math.ceil(2.0 * half / (0.25 * short)) + 1)
    ts = list(np.linspace(-half, half, count))
    # approach the short edges geometrically; sources just outside them
    # reflect to images beyond the uniform line's reach
    depth = 0.25 * short
    while depth > 0.05 * short:
        ts.extend((0.5 * long_side - depth, depth - 0.5 * long_side))
        depth *= 0.5
    ts = np.asarray(ts)
    ctr = comp.anchor()
    return ctr + ts if w >= h else ctr + 1j * ts


def _poly_corners(comp: Poly) -> list[tuple[complex, complex, float, float]]:
    """Vertices with inward direction, reach, and turn angle in degrees."""
    pts = comp.pts
    n = len(pts)
    out = []
    for i in range(n):
        prev, v, nxt = pts[i - 1], pts[i], pts[(i + 1) % n]
        e1 = v - prev
        e2 = nxt - v
        turn = abs(math.degrees(math.atan2((e1.conjugate() * e2).imag, (e1.conjugate() * e2).real)))
        bisect = e2 / abs(e2) - e1 / abs(e1)
        if abs(bisect) < 1e-12:
            continue
        inward = bisect / abs(bisect)
        probe = v + inward * 1e-6 * max(abs(e1), abs(e2))
        if not comp.contains(probe):
            inward = -inward
        out.append((v, inward, 0.5 * min(abs(e1), abs(e2)), turn))
    return out


_MILD_TURN_DEG = 3.0


def _poly_pole_plan(comp: Poly, per_corner: int) -> list[tuple[complex, complex, float, int]]:
    """Per-vertex pole budgets graded by turn angle.

    Sharp corners get the full (upscaled) budget; milder ones get
    counts proportional to turn, largest turns first, under a global
    cap so finely sampled smooth curves stay affordable.
    """
    plan = []
    mild = []
    for v, inward, reach, turn in _poly_corners(comp):
        if turn > _SHARP_TURN_DEG:
            plan.append((v, inward, reach, per_corner))
        elif turn >= _MILD_TURN_DEG:
            mild.append((turn, v, inward, reach))
    budget = 8 * per_corner
    for turn, v, inward, reach in sorted(mild, key=lambda t: -t[0]):
        count = max(3, round(per_corner * turn / 60.0))
        if budget - count < 0:
            break
        budget -= count
        plan.append((v, inward, reach, count))
    return plan


def _poly_ring_sources(comp: Poly, count: int) -> np.ndarray:
    import shapely.geometry as sg

    poly = sg.Polygon([(p.real, p.imag) for p in comp.pts])
    depth = poly.exterior.distance(poly.representative_point())
    ring = None
    for frac in (0.5, 0.3, 0.15):
        shrunk = poly.buffer(-frac * depth)
        if not shrunk.is_empty and shrunk.geom_type == "Polygon" and shrunk.exterior.length > 0:
            ring = shrunk.exterior
            break
    if ring is None:
        anchor = comp.anchor()
        zs = comp.boundary_points(count)
        return anchor + 0.5 * (zs - anchor)
    ts = (np.arange(count) + 0.5) / count * ring.length
    pts = [ring.interpolate(float(t)) for t in ts]
    return np.asarray([complex(p.x, p.y) for p in pts])


# ---- assembled system ----


class _CompBasis:
    """Basis block (Laurent tail + poles) for one positive-diameter component."""

    def __init__(self, comp, order: int, per_corner: int, ring: int):
        self.anchor = comp.anchor()
        self.order = order
        self.scale = max(comp.diameter() / 2.0, 1e-12)
        self.per_corner = per_corner
        if isinstance(comp, Rect):
            self.poles = np.concatenate([_rect_poles(comp, per_corner),
                                         _rect_axis_poles(comp)])
        elif isinstance(comp, Poly):
            # non-right corners can be sharper, so spend more poles there
            self.per_corner = per_corner = round(1.5 * per_corner)
            plan = _poly_pole_plan(comp, per_corner)
            blocks = [_corner_poles(v, d, r, c) for v, d, r, c in plan]
            sharp = sum(1 for item in plan if item[3] >= per_corner)
            if sharp < max(3, len(comp.pts) // 8):
                blocks.append(_poly_ring_sources(comp, ring))
            self.poles = np.concatenate(blocks) if blocks else np.empty(0, complex)
        else:
            self.poles = np.empty(0, complex)
        self.pole_scales = np.maximum(np.abs(self.poles - self.anchor), 0.05 * self.scale)
        self.ncols = 2 * self.order + 2 * len(self.poles)

    def eval(self, zs: np.ndarray) -> np.ndarray:
        cols = np.empty((len(zs), self.ncols))
        w = self.scale / (zs - self.anchor)
        p = w.copy()
        for n in range(self.order):
            cols[:, 2 * n] = p.real
            cols[:, 2 * n + 1] = p.imag
            p = p * w
        off = 2 * self.order
        for j, (pole, s) in enumerate(zip(self.poles, self.pole_scales)):
            v = s / (zs - pole)
            cols[:, off + 2 * j] = v.real
            cols[:, off + 2 * j + 1] = v.imag
        return cols


class SlitSystem:
    """Collocation system for one (domain, base) pair, reusable across x."""

    def __init__(self, domain: Domain, base: int, params: SolverParams):
        comps = domain.components
        if not comps:
            raise DomainError("domain has no components; slit potential undefined")
        if base < 0 or base >= len(comps):
            raise DomainError(f"base index {base} out of range")
        if comps[base].diameter() <= 0:
            raise DomainError(f"component {base} has zero diameter and cannot be the base")
        scale = domain.scale()
        gap = domain.min_gap()
        if gap < params.crowding_gap * scale:
            raise IllConditionedError(
                f"components too close (gap {gap:.3g} < {params.crowding_gap:.1e} of scale {scale:.3g})"
            )
        self.domain = domain
        self.base = base
        self.params = params
        self.scale = scale
        self.pos_idx = domain.positive_components()
        self.base_anchor = comps[base].anchor()

        dmax = max(comps[i].diameter() for i in self.pos_idx)
        nodes, weights, row_comp = [], [], []
        self.bases: dict[int, _CompBasis] = {}
        scale_budget = len(self.pos_idx) > 4
        for i in self.pos_idx:
            comp = comps[i]
            f = 1.0
            if scale_budget:
                f = min(1.0, max(0.3, math.sqrt(comp.diameter() / dmax)))
            order = max(6, round(params.order * f))
            per_corner = max(4, round(params.corner_poles * f))
            ring = max(8, round(params.ring_sources * f))
            basis = _CompBasis(comp, order, per_corner, ring)
            # keep each block overdetermined even when poles dominate
            n_nodes = max(48, round(params.boundary_points * f), 2 * basis.ncols)
            zs, w = _component_nodes(comp, n_nodes, basis.per_corner)
            nodes.append(zs)
            weights.append(w)
            row_comp.extend([i] * len(zs))
            self.bases[i] = basis

        self.nodes = np.concatenate(nodes)
        self.weights = np.sqrt(np.concatenate(weights))
        self.row_comp = np.asarray(row_comp)
        self.gamma_idx = [i for i in self.pos_idx if i != base]

        blocks = [b.eval(self.nodes) for b in self.bases.values()]
        const = np.ones((len(self.nodes), 1))
        gamma_cols = np.zeros((len(self.nodes), len(self.gamma_idx)))
        for j, i in enumerate(self.gamma_idx):
            gamma_cols[self.row_comp == i, j] = -1.0
        A = np.hstack(blocks + [const, gamma_cols])
        A *= self.weights[:, None]
        self.col_norms = np.linalg.norm(A, axis=0)
        self.col_norms[self.col_norms == 0] = 1.0
        A /= self.col_norms[None, :]
        self.n_basis_cols = A.shape[1] - len(self.gamma_idx)

        self.U, self.svals, self.Vt = np.linalg.svd(A, full_matrices=False)
        cutoff = np.finfo(float).eps * max(A.shape) * self.svals[0]
        self.inv_s = np.where(self.svals > cutoff, 1.0 / np.maximum(self.svals, cutoff), 0.0)
        self.condition = float(self.svals[0] / self.svals[-1]) if self.svals[-1] > 0 else math.inf
        self._A_scaled = A
        if self.condition > params.condition_limit:
            raise IllConditionedError(
                f"condition estimate {self.condition:.3g} over limit {params.condition_limit:.3g}"
            )

    # -- fixed (singular) part of the potential --

    def fixed_part(self, zs: np.ndarray, x: complex) -> np.ndarray:
        return np.log(np.abs(zs - x)) - np.log(np.abs(zs - self.base_anchor))

    def check_point(self, x: complex) -> None:
        x = complex(x)
        comps = self.domain.components
        for i, comp in enumerate(comps):
            d = comp.distance(x)
            if comp.diameter() > 0:
                if d < self.params.clearance * self.scale:
                    raise DomainError(
                        f"base point {x} within clearance {self.params.clearance:.1e} "
                        f"of component {i}"
                    )
            elif d <= 1e-12 * self.scale:
                raise DomainError(f"base point {x} coincides with removed point {i}")

    def solve_batch(self, xs) -> list[SlitSolution]:
        xs = [complex(x) for x in xs]
        for x in xs:
            self.check_point(x)
        B = np.stack([-self.fixed_part(self.nodes, x) for x in xs], axis=1)
        Bw = B * self.weights[:, None]
        theta_scaled = self.Vt.T @ ((self.U.T @ Bw) * self.inv_s[:, None])
        resid = self._A_scaled @ theta_scaled - Bw
        resid /= self.weights[:, None]
        theta = theta_scaled / self.col_norms[:, None]
        out = []
        for j, x in enumerate(xs):
            out.append(self._solution(x, theta[:, j], float(np.abs(resid[:, j]).max())))
        return out

    def _solution(self, x: complex, theta: np.ndarray, residual: float) -> SlitSolution:
        comps = self.domain.components
        gamma = {}
        for j, i in enumerate(self.gamma_idx):
            gamma[i] = float(theta[self.n_basis_cols + j])
        radii = {i: math.exp(g) for i, g in gamma.items()}
        for i, comp in enumerate(comps):
            if isinstance(comp, PointComponent) and i != self.base:
                u = self.potential(np.asarray([comp.point()]), x, theta)[0]
                gamma[i] = float(u)
                radii[i] = math.exp(float(u))
        series: dict[int, np.ndarray] = {}
        off = 0
        for i, basis in self.bases.items():
            tail = theta[off: off + 2 * basis.order]
            series[i] = tail[0::2] + 1j * tail[1::2]
            off += basis.ncols
        sing = {"x": 1.0, f"anchor_{self.base}": -1.0}
        for i in self.pos_idx:
            if i != self.base:
                sing[f"anchor_{i}"] = 0.0
        period = self._period_residual(x, theta)
        return SlitSolution(
            base=self.base, x=x, radii=radii, gamma=gamma,
            singularity_coefficients=sing, series_coefficients=series,
            boundary_residual=residual, period_residual=period,
            condition=self.condition, params=self.params,
            _system=self, _theta=theta,
        )

    def potential(self, zs: np.ndarray, x: complex, theta: np.ndarray) -> np.ndarray:
        blocks = [b.eval(zs) for b in self.bases.values()]
        const = np.ones((len(zs), 1))
        basis = np.hstack(blocks + [const])
        return self.fixed_part(zs, x) + basis @ theta[: self.n_basis_cols]

    def _period_residual(self, x: complex, theta: np.ndarray, n_quad: int = 128) -> float:
        """Largest conjugate-period defect around the non-base components.

        The flux of grad u through a circle separating one component
        from the rest should vanish; it is integrated with central
        differences, so the result measures evaluation consistency.
        """
        comps = self.domain.components
        worst = 0.0
        h = 1e-6 * self.scale
        for i in self.gamma_idx:
            comp = comps[i]
            c = comp.anchor()
            circ = comp.max_distance(c)
            others = [comps[j].distance(c) for j in range(len(comps)) if j != i]
            d_min = min(others + [abs(x - c)])
            if d_min <= circ * 1.05:
                continue
            R = 0.5 * (circ + d_min)
            th = 2.0 * np.pi * (np.arange(n_quad) + 0.5) / n_quad
            ring = c + R * np.exp(1j * th)
            normal = np.exp(1j * th)
            du = (
                self.potential(ring + h * normal, x, theta)
                - self.potential(ring - h * normal, x, theta)
            ) / (2.0 * h)
            flux = float((du * R * 2.0 * np.pi / n_quad).sum())
            worst = max(worst, abs(flux) / (2.0 * np.pi))
        return worst


@lru_cache(maxsize=64)
def _system(domain: Domain, base: int, params: SolverParams) -> SlitSystem:
    return SlitSystem(domain, base, params)


# ---- public operations ----


def solve_slit_potential(
    domain: Domain, x: complex, base: int, params: SolverParams | None = None
) -> SlitSolution:
    """Solve the slit potential grounding component `base`, pole at x.

    Raises `ResidualError` when the boundary residual exceeds
    `params.tol`, `IllConditionedError` for crowded geometry or a
    condition estimate over the limit, and `DomainError` for invalid
    base points.
    """
    params = params or DEFAULT_PARAMS
    sol = _system(domain, base, params).solve_batch([x])[0]
    if sol.boundary_residual > params.tol:
        raise ResidualError(
            f"boundary residual {sol.boundary_residual:.3g} exceeds tol {params.tol:.1e} "
            f"(base {base}, x {x})"
        )
    return sol


def r_value(
    domain: Domain,
    x: complex,
    params: SolverParams | None = None,
    bases: list[int] | None = None,
) -> Bracket:
    """Best slit-map lower bound at x: max over base components of min radius.

    `bases` restricts the maximization (any subset still yields a valid
    lower bound); by default every positive-diameter component is
    tried.  Per-base radii, residuals, and failures are returned in the
    diagnostics.
    """
    params = params or DEFAULT_PARAMS
    if bases is None:
        bases = domain.positive_components()
    if not bases:
        raise DomainError("no positive-diameter component available as a base")
    if len(domain.components) == 1:
        # simply connected: the canonical map is the Riemann map, no slits
        _system(domain, bases[0], params).check_point(x)
        return Bracket(x=x, lower=1.0, upper=1.0, best_base=bases[0],
                       diagnostics={"per_base": {}, "failures": {}, "trivial": True})
    best = -1.0
    best_base = None
    per_base: dict[int, dict] = {}
    failures: dict[int, str] = {}
    for k in bases:
        try:
            sol = solve_slit_potential(domain, x, k, params)
        except DomainError:
            raise
        except SolverError as exc:
            failures[k] = str(exc)
            continue
        val = slit_squeeze(sol)
        per_base[k] = {
            "value": val,
            "radii": sol.slit_radii(),
            "boundary_residual": sol.boundary_residual,
            "period_residual": sol.period_residual,
        }
        if val > best:
            best = val
            best_base = sol.base
    if best_base is None and not per_base:
        raise SolverError(
            "all base components failed: "
            + "; ".join(f"base {k}: {msg}" for k, msg in failures.items())
        )
    diag = {"per_base": per_base, "failures": failures}
    return Bracket(x=complex(x), lower=best, upper=1.0, best_base=best_base, diagnostics=diag)


def r_field(
    domain: Domain,
    box: tuple[float, float, float, float],
    nx: int,
    ny: int,
    params: SolverParams | None = None,
) -> list[dict]:
    """Lower-bound field on a grid, row-major from the bottom-left corner.

    Points inside components or closer to them than the clearance are
    skipped with a recorded status, never silently dropped.
    """
    params = params or DEFAULT_PARAMS
    xmin, xmax, ymin, ymax = box
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    rows: list[dict] = []
    index_of: dict[int, int] = {}
    pts: list[complex] = []
    for y in ys:
        for x in xs:
            z = complex(x, y)
            row = {"x_re": float(x), "x_im": float(y), "lower": math.nan,
                   "upper": math.nan, "residual": math.nan, "status": ""}
            if not domain.contains(z):
                row["status"] = "inside-component"
            elif any(
                domain.components[i].distance(z) < params.clearance * domain.scale()
                for i in domain.positive_components()
            ):
                row["status"] = "clearance-skip"
            else:
                index_of[len(rows)] = len(pts)
                pts.append(z)
                row["status"] = "ok"
            rows.append(row)

    if pts:
        per_point_best = np.full(len(pts), -1.0)
        per_point_res = np.full(len(pts), math.nan)
        solved = np.zeros(len(pts), dtype=bool)
        for k in domain.positive_components():
            try:
                sols = _system(domain, k, params).solve_batch(pts)
            except SolverError:
                continue
            for j, sol in enumerate(sols):
                if sol.boundary_residual > params.tol:
                    continue
                solved[j] = True
                val = slit_squeeze(sol)
                if val > per_point_best[j]:
                    per_point_best[j] = val
                    per_point_res[j] = sol.boundary_residual
        for row_i, pt_j in index_of.items():
            if not solved[pt_j]:
                rows[row_i]["status"] = "solver-failed"
                continue
            rows[row_i]["lower"] = float(min(max(per_point_best[pt_j], 0.0), 1.0))
            rows[row_i]["upper"] = 1.0
            rows[row_i]["residual"] = float(per_point_res[pt_j])
    return rows


# ---- annulus oracle ----


def _annulus_series(rho: float, x: float, base: str, tol: float, max_modes: int):
    if not 0.0 < rho < 1.0:
        raise DomainError(f"annulus needs 0 < rho < 1, got {rho}")
    if not rho < x < 1.0:
        raise DomainError(f"base point must satisfy rho < x < 1, got {x}")
    if base not in ("outer", "inner"):
        raise DomainError(f"base must be 'outer' or 'inner', got {base!r}")
    lr = math.log(rho)
    lx = math.log(x)
    # period of the conjugate around the inner circle: 0 when the outer
    # circle is grounded, -2*pi when the inner circle is
    b0 = 0.0 if base == "outer" else -1.0
    if base == "outer":
        a0 = 0.0
        gamma = lx + a0 + b0 * lr
    else:
        a0 = -lx - b0 * lr
        gamma = a0
    coeffs = []
    n = 1
    while True:
        t_out = x**n / n
        t_in = rho**n / (n * x**n)
        a_n = (t_in - t_out * rho ** (-n)) / (rho**n - rho ** (-n))
        b_n = t_out - a_n
        coeffs.append((a_n, b_n))
        r = max(x, rho / x)
        tail = r ** (n + 1) / ((n + 1) * (1.0 - r)) * 2.0
        if tail < tol:
            break
        n += 1
        if n > max_modes:
            raise SolverError(
                f"annulus series not converged after {max_modes} modes (tail {tail:.3g})"
            )
    return gamma, a0, b0, coeffs


def annulus_oracle(
    rho: float, x: float, base: str = "outer", tol: float = 1e-10, max_modes: int = 200000
) -> float:
    """Slit radius of the round annulus {rho < |z| < 1} at a real base point.

    Separable trigonometric series in log-polar coordinates; the mode
    recursion is truncated once the geometric tail bound is below
    `tol`.  The grounded circle is chosen by `base`.
    """
    gamma, _, _, _ = _annulus_series(rho, x, base, tol, max_modes)
    return math.exp(gamma)


def annulus_oracle_fd(
    rho: float, x: float, base: str = "outer", n_s: int = 512, n_theta: int = 512
) -> float:
    """Finite-difference cross-check of `annulus_oracle`.

    Solves the same boundary problem with a 5-point Laplacian on a
    log-polar grid: a particular solution vanishing on both circles
    plus the explicit radial harmonic, combined to meet the period
    condition.  Second-order accurate; used as an independent check,
    not as a production path.
    """
    from scipy import sparse
    from scipy.sparse.linalg import spsolve

    if not rho < x < 1.0:
        raise DomainError(f"base point must satisfy rho < x < 1, got {x}")
    s = np.linspace(math.log(rho), 0.0, n_s)
    hs = s[1] - s[0]
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ht = th[1] - th[0]

    # particular part: v = -log|z - x| on both circles, harmonic inside
    def bc(svals):
        zs = np.exp(svals[:, None] + 1j * th[None, :])
        return -np.log(np.abs(zs - x))

    n_int = n_s - 2
    main = sparse.eye(n_int) * (-2.0 / hs**2 - 2.0 / ht**2)
    off_s = sparse.diags([np.ones(n_int - 1)], [1]) / hs**2
    lap_s = main + off_s + off_s.T
    ring = sparse.diags([np.ones(n_theta - 1), [1.0], [1.0], np.ones(n_theta - 1)],
                        [1, n_theta - 1, -(n_theta - 1), -1]) / ht**2
    A = sparse.kron(sparse.eye(n_theta), lap_s) + sparse.kron(ring, sparse.eye(n_int))
    rhs = np.zeros((n_int, n_theta))
    lower = bc(s[:1])[0]
    upper = bc(s[-1:])[0]
    rhs[0, :] -= lower / hs**2
    rhs[-1, :] -= upper / hs**2
    v = spsolve(A.tocsc(), rhs.T.ravel()).reshape(n_theta, n_int).T
    grid = np.empty((n_s, n_theta))
    grid[0, :] = lower
    grid[-1, :] = upper
    grid[1:-1, :] = v

    # flux of u_p = v + log|z - x| through a ring between rho and x;
    # the explicit log term contributes nothing there
    i_ring = int(np.argmin(np.abs(s - 0.5 * (math.log(rho) + math.log(x)))))
    i_ring = min(max(i_ring, 1), n_s - 2)
    du = (grid[i_ring + 1, :] - grid[i_ring - 1, :]) / (2.0 * hs)
    b0_p = du.sum() * ht / (2.0 * np.pi)

    lr = math.log(rho)
    if base == "outer":
        gamma = -b0_p * lr
    else:
        gamma = (b0_p + 1.0) * lr
    return math.exp(gamma)
