"""Finite-stage hierarchy-of-cubes constructions with numeric certificates.

Two builders share the split machinery.  The first carves a unit
square into a measure-controlled union of shrinking rectangles and
certifies that the slit-map lower bound stays high on offset curves
just outside the pieces.  The second interleaves that refinement with
two kinds of marked geometry: loops hugging the pieces, where the
lower bound is certified to be large, and tiny sacrificial cubes
planted near boundary net points, where circle witnesses certify an
upper bound.  Both record every check as an explicit (location, value,
threshold, witness, pass) row; nothing is asserted without a row.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import (
    CertificateError,
    ConfigError,
    DomainError,
    NoWitnessError,
    SolverError,
)
from .geometry import (
    Disk,
    Domain,
    HierarchyCube,
    Rect,
    component_gap,
    lebesgue_measure,
    split_cube,
    unit_cube,
)
from .hyperbolic import circle_loop, kobayashi_length_upper
from .slitmap import SolverParams, r_value

_AXES = ("vertical", "horizontal")


def stage_axis(j: int) -> str:
    """Split axis for one-based stage j: odd stages split vertically."""
    return _AXES[(j - 1) % 2]


# ---- fraction-faithful serialization helpers ----


def _frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _parse_frac(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    return Fraction(s)


def _cube_to_json(cube: HierarchyCube) -> dict:
    r = cube.rect
    return {
        "a": _frac_str(r.a), "b": _frac_str(r.b),
        "c": _frac_str(r.c), "d": _frac_str(r.d),
        "depth": cube.depth,
        "lineage": [[axis, k, side] for axis, k, side in cube.lineage],
    }


def _cube_from_json(d: dict) -> HierarchyCube:
    rect = Rect(_parse_frac(d["a"]), _parse_frac(d["b"]),
                _parse_frac(d["c"]), _parse_frac(d["d"]))
    lineage = tuple((axis, int(k), side) for axis, k, side in d.get("lineage", []))
    return HierarchyCube(rect, int(d.get("depth", 0)), lineage)


def _snap(v: float, grid: int = 1 << 40) -> Fraction:
    return Fraction(round(v * grid), grid)


# ---- offset curves ----


def offset_curve_points(rect: Rect, delta: float, n: int) -> np.ndarray:
    """n points on the rounded-rectangle curve at distance delta outside rect.

    Uniform in arc length, deterministic start at the lower-left end of
    the bottom edge, counterclockwise.
    """
    if delta <= 0:
        raise ConfigError(f"offset distance must be positive, got {delta}")
    a, b, c, d = (float(rect.a), float(rect.b), float(rect.c), float(rect.d))
    w, h = b - a, d - c
    quarter = 0.5 * math.pi * delta
    # segments: (length, start_s, evaluator)
    segs = []

    def edge(p0: complex, p1: complex):
        length = abs(p1 - p0)
        segs.append((length, lambda t, p0=p0, p1=p1: p0 + t * (p1 - p0)))

    def corner(center: complex, th0: float):
        segs.append((
            quarter,
            lambda t, center=center, th0=th0: center + delta * complex(
                math.cos(th0 + t * 0.5 * math.pi), math.sin(th0 + t * 0.5 * math.pi)
            ),
        ))

    edge(complex(a, c - delta), complex(b, c - delta))
    corner(complex(b, c), -0.5 * math.pi)
    edge(complex(b + delta, c), complex(b + delta, d))
    corner(complex(b, d), 0.0)
    edge(complex(b, d + delta), complex(a, d + delta))
    corner(complex(a, d), 0.5 * math.pi)
    edge(complex(a - delta, d), complex(a - delta, c))
    corner(complex(a, c), math.pi)

    total = sum(s[0] for s in segs)
    out = np.empty(n, dtype=complex)
    targets = (np.arange(n) + 0.5) * total / n
    s_acc = 0.0
    seg_i = 0
    for i, s in enumerate(targets):
        while seg_i < len(segs) - 1 and s > s_acc + segs[seg_i][0]:
            s_acc += segs[seg_i][0]
            seg_i += 1
        length, ev = segs[seg_i]
        out[i] = ev((s - s_acc) / length)
    return out


# ---- measure-controlled hierarchy ----


@dataclass(frozen=True)
class Theorem1State:
    """Alternating-split hierarchy with exact retained measure."""

    epsilon: Fraction
    schedule: tuple[int, ...]
    stages: tuple[tuple[HierarchyCube, ...], ...]
    measures: tuple[Fraction, ...]

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    @property
    def cubes(self) -> tuple[HierarchyCube, ...]:
        return self.stages[-1]

    @property
    def measure(self) -> Fraction:
        return self.measures[-1]

    def domain(self, stage: int | None = None, label: str = "") -> Domain:
        cubes = self.stages[stage if stage is not None else -1]
        return Domain(tuple(c.rect for c in cubes), label=label or f"cube-stage-{len(cubes)}")

    def to_json(self) -> dict:
        return {
            "kind": "measure-hierarchy",
            "epsilon": _frac_str(self.epsilon),
            "schedule": list(self.schedule),
            "measures": [_frac_str(m) for m in self.measures],
            "stages": [[_cube_to_json(c) for c in stage] for stage in self.stages],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Theorem1State":
        if data.get("kind") != "measure-hierarchy":
            raise ConfigError(f"not a measure-hierarchy state: kind={data.get('kind')!r}")
        return cls(
            epsilon=_parse_frac(data["epsilon"]),
            schedule=tuple(int(k) for k in data["schedule"]),
            stages=tuple(tuple(_cube_from_json(c) for c in stage) for stage in data["stages"]),
            measures=tuple(_parse_frac(m) for m in data["measures"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Theorem1State":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _axis_width(rect: Rect, axis: str) -> Fraction:
    a, b, c, d = (Fraction(v) for v in (rect.a, rect.b, rect.c, rect.d))
    return b - a if axis == "vertical" else d - c


def _auto_schedule(epsilon: Fraction, depth: int) -> list[int]:
    # per-stage retained fraction target; the exact product is checked after
    target = (1.0 - float(epsilon)) ** (1.0 / depth)
    ks = []
    rect = unit_cube().rect
    for j in range(1, depth + 1):
        axis = stage_axis(j)
        w = float(_axis_width(rect, axis))
        k = max(3, math.ceil(2.0 / (w * (1.0 - target))))
        if 1.0 - 2.0 / (k * w) < target:
            k += 1
        ks.append(k)
        rect = split_cube(HierarchyCube(rect), k, axis)[0].rect
    return ks


def build_theorem1(
    epsilon, depth: int, schedule: list[int] | tuple[int, ...] | None = None
) -> Theorem1State:
    """Alternate vertical/horizontal splits of the unit square.

    With no explicit schedule, per-stage slab counts are synthesized so
    the exact retained measure is at least 1 - epsilon; an explicit
    schedule is validated against the same bound.  Raises `ConfigError`
    when a schedule degenerates a child and `CertificateError` when the
    final exact measure falls below 1 - epsilon.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ConfigError(f"epsilon must be in (0,1), got {epsilon}")
    if depth < 1:
        raise ConfigError(f"depth must be >= 1, got {depth}")
    auto = schedule is None
    ks = _auto_schedule(eps, depth) if auto else [int(k) for k in schedule]
    if len(ks) != depth:
        raise ConfigError(f"schedule length {len(ks)} does not match depth {depth}")

    while True:
        stages = [(unit_cube(),)]
        measures = [Fraction(1)]
        try:
            for j, k in enumerate(ks, start=1):
                axis = stage_axis(j)
                nxt = []
                for cube in stages[-1]:
                    nxt.extend(split_cube(cube, k, axis))
                stages.append(tuple(nxt))
                measures.append(lebesgue_measure(stages[-1]))
        except DomainError as exc:
            raise ConfigError(f"schedule too aggressive at stage {j} (k={k}): {exc}") from exc
        if measures[-1] >= 1 - eps:
            break
        if auto:
            # float rounding in the per-stage target can shave the exact
            # product under the bound; tighten the last stage and retry
            ks[-1] += 1
            continue
        raise CertificateError(
            f"measure bound violated: retained {measures[-1]} = "
            f"{float(measures[-1]):.6f} < 1 - epsilon = {float(1 - eps):.6f}"
        )
    return Theorem1State(
        epsilon=eps, schedule=tuple(ks), stages=tuple(stages), measures=tuple(measures)
    )


def extend_theorem1(state: Theorem1State, extra_depth: int,
                    schedule: list[int] | None = None) -> Theorem1State:
    """Resume an existing hierarchy for extra_depth more stages."""
    if extra_depth < 1:
        raise ConfigError(f"extra_depth must be >= 1, got {extra_depth}")
    if schedule is not None and len(schedule) != extra_depth:
        raise ConfigError("schedule length does not match extra_depth")
    stages = list(state.stages)
    measures = list(state.measures)
    ks = list(state.schedule)
    for i in range(extra_depth):
        j = len(ks) + 1
        axis = stage_axis(j)
        w = float(_axis_width(stages[-1][0].rect, axis))
        if schedule is not None:
            k = int(schedule[i])
        else:
            # keep at least the per-stage fraction of the original run
            k = max(3, math.ceil(4.0 / w))
        nxt = []
        try:
            for cube in stages[-1]:
                nxt.extend(split_cube(cube, k, axis))
        except DomainError as exc:
            raise ConfigError(f"schedule too aggressive at stage {j} (k={k}): {exc}") from exc
        ks.append(k)
        stages.append(tuple(nxt))
        measures.append(lebesgue_measure(stages[-1]))
    return Theorem1State(
        epsilon=state.epsilon, schedule=tuple(ks),
        stages=tuple(stages), measures=tuple(measures),
    )


# ---- certificate rows ----

ROW_KEYS = ("stage", "kind", "x_re", "x_im", "value", "threshold", "witness", "pass")


def _row(stage, kind, x, value, threshold, witness, ok) -> dict:
    return {
        "stage": int(stage), "kind": str(kind),
        "x_re": float(x.real), "x_im": float(x.imag),
        "value": float(value), "threshold": float(threshold),
        "witness": str(witness), "pass": bool(ok),
    }


def _lower_row(domain: Domain, x: complex, stage: int, threshold: float,
               params: SolverParams, bases) -> dict:
    try:
        br = r_value(domain, x, params, bases=bases)
    except (SolverError, DomainError) as exc:
        return _row(stage, "lower", x, math.nan, threshold,
                    f"error:{type(exc).__name__}", False)
    return _row(stage, "lower", x, br.lower, threshold,
                f"slit:base={br.best_base}", br.lower > threshold)


def _nearest_base(domain: Domain, x: complex) -> list[int]:
    idx = domain.positive_components()
    return [min(idx, key=lambda i: domain.components[i].distance(x))]


def _stage_short_side(state: Theorem1State, stage: int) -> float:
    rect = state.stages[stage][0].rect
    return float(min(Fraction(rect.b) - Fraction(rect.a),
                     Fraction(rect.d) - Fraction(rect.c)))


def certify_theorem1(
    state: Theorem1State,
    delta: float | None = None,
    delta_fraction: float = 0.12,
    samples_per_cube: int = 8,
    params: SolverParams | None = None,
    threshold: float = 0.0,
    all_bases: bool = True,
) -> dict:
    """Evaluate slit-map lower bounds on offset curves outside each piece.

    Rows cover the final stage and, when present, the stage before it,
    so the report carries the refinement trend of the minimum.  The
    offset distance scales with each stage's piece size (a fixed
    fraction of the short side) unless an explicit `delta` overrides
    it; points closer to the boundary than the piece size force
    unresolvable spikes in the collocation targets.  A simply
    connected control row is appended.  Solver failures become failure
    rows and are counted separately from bound violations.

    The default residual gate is looser than the solver's: collocation
    residuals for offset-curve targets floor near 1e-5 while the
    extracted radii stay stable to 1e-6 across order and node count.
    """
    params = params or SolverParams(order=36, tol=5e-5)
    rows: list[dict] = []
    failures = 0
    stage_ids = [s for s in (state.depth - 1, state.depth) if s >= 1] or [state.depth]
    min_by_stage: dict[int, float] = {}
    deltas: dict[int, float] = {}
    for stage in stage_ids:
        dom = state.domain(stage)
        scale = dom.scale()
        d_j = delta if delta is not None else delta_fraction * _stage_short_side(state, stage)
        deltas[stage] = d_j
        if d_j < params.clearance * scale:
            raise ConfigError(
                f"offset {d_j:.3g} below solver clearance {params.clearance * scale:.3g}"
            )
        vals = []
        for cube in state.stages[stage]:
            pts = offset_curve_points(cube.rect, d_j, samples_per_cube)
            for x in pts:
                if dom.clearance(complex(x)) < params.clearance * scale:
                    rows.append(_row(stage, "lower", x, math.nan, threshold,
                                     "skip:clearance", False))
                    failures += 1
                    continue
                bases = None if all_bases else _nearest_base(dom, complex(x))
                row = _lower_row(dom, complex(x), stage, threshold, params, bases)
                rows.append(row)
                if row["witness"].startswith("error:"):
                    failures += 1
                else:
                    vals.append(row["value"])
        if vals:
            min_by_stage[stage] = min(vals)
    control_dom = Domain((Disk(0.0, 0.0, 1.0),), label="control-disk")
    ctrl = r_value(control_dom, 3.0, params)
    rows.append(_row(0, "lower", 3.0 + 0j, ctrl.lower, threshold,
                     "control:disk", ctrl.lower > threshold))
    mins = [v for v in min_by_stage.values()]
    report = {
        "rows": rows,
        "delta": deltas,
        "samples_per_cube": samples_per_cube,
        "min_by_stage": min_by_stage,
        "min_lower": min(mins) if mins else math.nan,
        "failures": failures,
    }
    if len(min_by_stage) == 2:
        lo, hi = sorted(min_by_stage)
        report["trend"] = min_by_stage[hi] - min_by_stage[lo]
    return report


def step_trend_ladder(
    ks=(4, 8, 16),
    points=(0.5 + 0.25j, 0.5 + 0.75j, -0.1 + 0.5j),
    params: SolverParams | None = None,
) -> dict[int, list[float]]:
    """Lower bounds at fixed points for single-split domains over a k ladder.

    Larger k removes a thinner slab, pushing the pieces toward the
    evaluation points; the returned per-point values are expected to be
    nondecreasing in k (asserted by callers, reported here).
    """
    params = params or SolverParams()
    out: dict[int, list[float]] = {}
    for k in ks:
        state = build_theorem1(Fraction(1, 2), 1, [k])
        dom = state.domain()
        out[k] = [r_value(dom, complex(x), params).lower for x in points]
    return out


# ---- interleaved construction with marked geometry ----


@dataclass(frozen=True)
class LoopRecord:
    stage: int
    pts: tuple[complex, ...]
    offset: float = 0.0   # distance from the hugged piece the search settled on

    def to_json(self) -> dict:
        return {"stage": self.stage, "offset": self.offset,
                "pts": [[z.real, z.imag] for z in self.pts]}

    @classmethod
    def from_json(cls, d: dict) -> "LoopRecord":
        return cls(int(d["stage"]), tuple(complex(x, y) for x, y in d["pts"]),
                   float(d.get("offset", 0.0)))


@dataclass(frozen=True)
class CircleRecord:
    stage: int
    center: complex
    radius: float

    def to_json(self) -> dict:
        return {"stage": self.stage, "center": [self.center.real, self.center.imag],
                "radius": self.radius}

    @classmethod
    def from_json(cls, d: dict) -> "CircleRecord":
        return cls(int(d["stage"]), complex(*d["center"]), float(d["radius"]))


@dataclass(frozen=True)
class Thm2Params:
    """Budgets and placement policy for the interleaved construction."""

    max_loops: int = 2            # loops placed per stage (largest pieces first)
    max_points: int = 3           # boundary net points kept per stage
    samples_per_loop: int = 4     # certificate samples per loop
    loop_points: int = 64         # polyline resolution of placed loops
    slack: float = 0.05           # placement target is 1 - 1/j - slack
    loop_bisections: int = 4      # offset halvings before giving up
    net_offset_factor: float = 0.25   # net points sit at this/j from the boundary
    failure_fraction: float = 0.10    # abort a stage above this solver-failure rate
    solver: SolverParams = field(default_factory=SolverParams)


@dataclass(frozen=True)
class Theorem2State:
    """Cube collection plus every marked loop, circle, and certificate row."""

    stage: int
    cubes: tuple[HierarchyCube, ...]
    loops: tuple[LoopRecord, ...]
    circles: tuple[CircleRecord, ...]
    certificates: tuple[dict, ...]

    def domain(self, label: str = "") -> Domain:
        return Domain(tuple(c.rect for c in self.cubes),
                      label=label or f"mixed-stage-{self.stage}")

    def to_json(self) -> dict:
        return {
            "kind": "mixed-hierarchy",
            "stage": self.stage,
            "cubes": [_cube_to_json(c) for c in self.cubes],
            "loops": [l.to_json() for l in self.loops],
            "circles": [c.to_json() for c in self.circles],
            "certificates": [dict(r) for r in self.certificates],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Theorem2State":
        if data.get("kind") != "mixed-hierarchy":
            raise ConfigError(f"not a mixed-hierarchy state: kind={data.get('kind')!r}")
        return cls(
            stage=int(data["stage"]),
            cubes=tuple(_cube_from_json(c) for c in data["cubes"]),
            loops=tuple(LoopRecord.from_json(l) for l in data["loops"]),
            circles=tuple(CircleRecord.from_json(c) for c in data["circles"]),
            certificates=tuple(data["certificates"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Theorem2State":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def initial_theorem2() -> Theorem2State:
    return Theorem2State(stage=0, cubes=(unit_cube(),), loops=(), circles=(),
                         certificates=())


def verify_stage(
    domain: Domain,
    loops,
    circles,
    thresholds: dict,
    params: Thm2Params | None = None,
    stage: int = 0,
) -> dict:
    """Check lower bounds on loops and upper bounds on circles.

    `thresholds` carries "lower" (loop rows pass when the slit bound
    exceeds it) and "upper" (circle rows pass when the witness bound is
    below it).  Rows record value, threshold, witness, and pass; solver
    and witness failures are counted separately from bound violations.
    """
    params = params or Thm2Params()
    rows: list[dict] = []
    failures = 0
    lower_thr = float(thresholds.get("lower", 0.0))
    upper_thr = float(thresholds.get("upper", 1.0))
    for loop in loops:
        pts = loop.pts if isinstance(loop, LoopRecord) else tuple(loop)
        row_stage = loop.stage if isinstance(loop, LoopRecord) else stage
        step = max(1, len(pts) // params.samples_per_loop)
        for x in pts[::step][: params.samples_per_loop]:
            row = _lower_row(domain, complex(x), row_stage, lower_thr,
                             params.solver, _nearest_base(domain, complex(x)))
            rows.append(row)
            if row["witness"].startswith("error:"):
                failures += 1
    for circ in circles:
        if isinstance(circ, CircleRecord):
            center, radius, row_stage = circ.center, circ.radius, circ.stage
        else:
            center, radius = circ
            row_stage = stage
        loop_pts = circle_loop(center, radius, n=256)
        try:
            est = kobayashi_length_upper(domain, loop_pts)
        except (NoWitnessError, DomainError) as exc:
            rows.append(_row(row_stage, "upper", center, math.nan, upper_thr,
                             f"error:{type(exc).__name__}", False))
            failures += 1
            continue
        wit = est.model.describe()
        wit_s = wit["kind"] + "[" + ",".join(
            f"{wit[k]:.4g}" for k in ("radius", "r_inner", "r_outer") if k in wit
        ) + "]"
        upper = est.squeeze_upper()
        rows.append(_row(row_stage, "upper", center, upper, upper_thr, wit_s,
                         upper < upper_thr))
    checked = [r for r in rows if not r["witness"].startswith("error:")]
    return {
        "rows": rows,
        "failures": failures,
        "checked": len(checked),
        "passed": all(r["pass"] for r in checked),
    }


def _place_loop(domain: Domain, cube: HierarchyCube, target: float,
                params: Thm2Params) -> tuple[LoopRecord, list[dict], float]:
    """Bisect the offset of a loop around one cube until the bound certifies."""
    scale = domain.scale()
    floor = 1.5 * params.solver.clearance * scale
    gap = min(component_dist(domain, cube) / 3.0, 0.1)
    offset = max(gap, floor)
    best = None
    for _ in range(params.loop_bisections + 1):
        pts = offset_curve_points(cube.rect, offset, params.loop_points)
        if min(domain.clearance(complex(z)) for z in pts) < params.solver.clearance * scale:
            offset = 0.5 * offset
            if offset < floor:
                break
            continue
        step = max(1, len(pts) // params.samples_per_loop)
        samples = pts[::step][: params.samples_per_loop]
        rows = [
            _lower_row(domain, complex(x), 0, target, params.solver,
                       _nearest_base(domain, complex(x)))
            for x in samples
        ]
        vals = [r["value"] for r in rows if not r["witness"].startswith("error:")]
        score = min(vals) if vals else -math.inf
        if best is None or score > best[2]:
            best = (pts, rows, score, offset)
        if vals and score > target:
            break
        offset = 0.5 * offset
        if offset < floor:
            break
    if best is None:
        raise CertificateError(
            f"no admissible loop offset around piece at {cube.rect.anchor():.4g} "
            f"(clearance floor {floor:.3g})"
        )
    pts, rows, score, offset = best
    record = LoopRecord(stage=0, pts=tuple(complex(z) for z in pts), offset=offset)
    return record, rows, offset


def component_dist(domain: Domain, cube: HierarchyCube) -> float:
    """Distance from a cube to the nearest other component of the domain."""
    best = math.inf
    for comp in domain.components:
        if comp.bounds() == cube.rect.bounds():
            continue
        best = min(best, component_gap(cube.rect, comp))
    return best if best < math.inf else 0.5


def _boundary_net(domain: Domain, spacing: float, offset: float,
                  cap: int) -> list[complex]:
    """Deterministic point net at a fixed offset outside every component."""
    pts: list[complex] = []
    for comp in domain.components:
        if comp.diameter() <= 0:
            continue
        a, b, c, d = comp.bounds()
        rect = Rect(a, b, c, d)
        perimeter = 2.0 * ((b - a) + (d - c)) + 2.0 * math.pi * offset
        n = max(4, math.ceil(perimeter / spacing))
        pts.extend(complex(z) for z in offset_curve_points(rect, offset, n))
    if len(pts) > cap:
        idx = np.linspace(0, len(pts) - 1, cap).round().astype(int)
        pts = [pts[i] for i in idx]
    return pts


def build_theorem2_stage(state: Theorem2State,
                         params: Thm2Params | None = None) -> Theorem2State:
    """Run one stage: place loops and marked points, refine, re-verify.

    The stage index is one past the state's.  Loops go around the
    largest pieces at bisected offsets targeting a lower bound of
    1 - 1/j - slack.  Net points are planted just outside the boundary
    at spacing 1/j; each gets a circle of radius delta and a small cube
    an eighth that size.  Every cube (old and new) is then split once
    vertically and once horizontally, and all recorded loops and
    circles are re-verified on the refined domain against thresholds
    3/j0 (upper) and 1 - 5/j0 (lower) for their placement stage j0.
    Raises `CertificateError` when placement fails, a re-verification
    row fails, or solver failures exceed the configured fraction.
    """
    params = params or Thm2Params()
    j = state.stage + 1
    domain = state.domain()
    scale = domain.scale()
    target = 1.0 - 1.0 / j - params.slack
    new_rows: list[dict] = []
    failures = 0

    # loops around the largest current pieces
    by_size = sorted(state.cubes, key=lambda c: (-c.rect.diameter(),
                                                 float(c.rect.a), float(c.rect.c)))
    new_loops: list[LoopRecord] = []
    for cube in by_size[: params.max_loops]:
        record, rows, _offset = _place_loop(domain, cube, target, params)
        record = replace(record, stage=j)
        for r in rows:
            r["stage"] = j
        new_loops.append(record)
        new_rows.extend(rows)
        failures += sum(1 for r in rows if r["witness"].startswith("error:"))
        placed_ok = [r["pass"] for r in rows if not r["witness"].startswith("error:")]
        if placed_ok and not all(placed_ok):
            raise CertificateError(
                f"stage {j}: loop at piece {cube.rect.anchor():.4g} certifies only "
                f"{min(r['value'] for r in rows):.4f} < target {target:.4f}"
            )

    # boundary net, one circle and one small cube per kept point
    offset = params.net_offset_factor / j
    net = _boundary_net(domain, spacing=1.0 / j, offset=offset, cap=params.max_points)
    if not net:
        raise CertificateError(f"stage {j}: empty boundary net")
    delta = min(min(domain.clearance(p) for p in net) / 2.0, 1.0 / (4.0 * j))
    if delta <= 0:
        raise CertificateError(f"stage {j}: no room for marked circles")
    new_circles = [CircleRecord(stage=j, center=p, radius=delta) for p in net]
    side = _snap(delta / 8.0)
    small = []
    for p in net:
        a = _snap(p.real - float(side) / 2.0)
        c = _snap(p.imag - float(side) / 2.0)
        small.append(HierarchyCube(Rect(a, a + side, c, c + side)))

    # refine everything twice
    cubes = list(state.cubes) + small
    for axis in ("vertical", "horizontal"):
        nxt = []
        for cube in cubes:
            w = float(_axis_width(cube.rect, axis))
            k = max(3, math.ceil(4.0 / w))
            try:
                nxt.extend(split_cube(cube, k, axis))
            except DomainError as exc:
                raise CertificateError(
                    f"stage {j}: refinement failed on piece at "
                    f"{cube.rect.anchor():.4g}: {exc}"
                ) from exc
        cubes = nxt

    refined = Theorem2State(
        stage=j,
        cubes=tuple(cubes),
        loops=state.loops + tuple(new_loops),
        circles=state.circles + tuple(new_circles),
        certificates=state.certificates + tuple(new_rows),
    )
    dom_after = refined.domain()

    # re-verify every recorded loop and circle on the refined domain
    recheck: list[dict] = []
    for j0 in sorted({l.stage for l in refined.loops} | {c.stage for c in refined.circles}):
        rep = verify_stage(
            dom_after,
            [l for l in refined.loops if l.stage == j0],
            [c for c in refined.circles if c.stage == j0],
            {"lower": 1.0 - 5.0 / j0, "upper": 3.0 / j0},
            params=params,
        )
        recheck.extend(rep["rows"])
        failures += rep["failures"]
        if not rep["passed"]:
            bad = [r for r in rep["rows"]
                   if not r["pass"] and not r["witness"].startswith("error:")]
            raise CertificateError(
                f"stage {j}: re-verification failed for placement stage {j0}: "
                f"{len(bad)} rows out of bounds, first at "
                f"({bad[0]['x_re']:.4g},{bad[0]['x_im']:.4g}) value {bad[0]['value']:.4f} "
                f"vs threshold {bad[0]['threshold']:.4f}"
            )
    total_rows = len(new_rows) + len(recheck)
    if total_rows and failures / total_rows > params.failure_fraction:
        raise CertificateError(
            f"stage {j}: solver failures {failures}/{total_rows} exceed "
            f"{params.failure_fraction:.0%}"
        )
    return replace(refined, certificates=refined.certificates + tuple(recheck))
