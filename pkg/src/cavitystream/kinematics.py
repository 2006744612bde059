"""Flow observables derived from a stream function.

Velocity is (d/dy psi, -d/dx psi) -- exact polynomial derivatives when
the stream function is polynomial, central differences otherwise.
Stagnation points come from damped Newton iteration over a seed
lattice; streamlines from fixed-step classical Runge-Kutta, along which
the stream function is conserved (that conservation is the main
correctness witness for the tracer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import (
    TriangleDomain,
    PhysicalPoint,
    classify,
    distance_to_boundary,
    interior_lattice,
    signed_edge_distances,
)
from .solver import PolyStreamFunction, QuadratureStreamFunction, StreamFunction

CENTER = "center"
SADDLE = "saddle"
DEGENERATE = "degenerate"

CLOSED = "closed"
HIT_BOUNDARY = "hit_boundary"
STEP_LIMIT = "step_limit"


class VelocityField:
    """Velocity of the flow described by a stream function.

    mode "exact": u, v are exact polynomial derivatives.
    mode "fd":    central differences with step h.
    """

    def __init__(self, source: StreamFunction, h: float | None = None):
        self.source = source
        self.domain: TriangleDomain = source.domain
        if self.domain is None:
            raise ValueError("bind a before building a velocity field")
        if isinstance(source, PolyStreamFunction):
            self.mode = "exact"
            self.u_poly = source.poly.diff(2)
            self.v_poly = -source.poly.diff(1)
            self._u = self.u_poly.float_evaluator()
            self._v = self.v_poly.float_evaluator()
            self.h = None
        else:
            self.mode = "fd"
            self.h = float(h) if h is not None else 1e-5 * float(self.domain.a)
            self.u_poly = None
            self.v_poly = None

    def _eval_raw(self, x: float, y: float) -> tuple[float, float]:
        if self.mode == "exact":
            return self._u(x, y), self._v(x, y)
        h = self.h
        e = self.source.evaluate
        u = (e(x, y + h) - e(x, y - h)) / (2 * h)
        v = -(e(x + h, y) - e(x - h, y)) / (2 * h)
        return u, v

    def velocity(self, p: PhysicalPoint) -> tuple[float, float]:
        """(u, v) at a point of the closed triangle."""
        tol = 1e-9 * float(self.domain.a)
        loc = classify(self.domain, p, tol)
        if loc.is_exterior:
            raise ValueError(f"point {tuple(p)} lies outside the closed cavity")
        if self.mode == "fd" and isinstance(self.source, QuadratureStreamFunction):
            if min(signed_edge_distances(self.domain, p)) < self.h:
                raise ValueError("difference stencil leaves the cavity for a quadrature backing")
        return self._eval_raw(float(p[0]), float(p[1]))

    def jacobian(self, p: PhysicalPoint) -> tuple[float, float, float, float]:
        """(du/dx, du/dy, dv/dx, dv/dy); exact derivatives when available."""
        x, y = float(p[0]), float(p[1])
        if self.mode == "exact":
            return (
                self.u_poly.diff(1).float_evaluator()(x, y),
                self.u_poly.diff(2).float_evaluator()(x, y),
                self.v_poly.diff(1).float_evaluator()(x, y),
                self.v_poly.diff(2).float_evaluator()(x, y),
            )
        h = 1e-5 * float(self.domain.a)
        up, vp = self._eval_raw(x + h, y)
        um, vm = self._eval_raw(x - h, y)
        uq, vq = self._eval_raw(x, y + h)
        ur, vr = self._eval_raw(x, y - h)
        return ((up - um) / (2 * h), (uq - ur) / (2 * h), (vp - vm) / (2 * h), (vq - vr) / (2 * h))

    def speed_scale(self, n: int = 15) -> float:
        """max speed over a coarse interior lattice (hypot norm)."""
        best = 0.0
        for p in interior_lattice(self.domain, n):
            u, v = self._eval_raw(p.x, p.y)
            best = max(best, math.hypot(u, v))
        return best


def velocity_field(source: StreamFunction, h: float | None = None) -> VelocityField:
    return VelocityField(source, h)


# ----------------------------------------------------------------------
# stagnation points

@dataclass(frozen=True)
class StagnationPoint:
    location: PhysicalPoint
    classification: str
    residual_speed: float


def _classify_jacobian(jac: tuple[float, float, float, float], vscale: float, a: float) -> str:
    ux, uy, vx, vy = jac
    norm = max(abs(ux), abs(uy), abs(vx), abs(vy))
    if norm <= 1e-10 * max(vscale / a, 1e-300):
        return DEGENERATE
    tr = ux + vy
    det = ux * vy - uy * vx
    disc = tr * tr - 4 * det
    if disc < 0:
        re, im = tr / 2, math.sqrt(-disc) / 2
        mag = math.hypot(re, im)
        return CENTER if abs(re) <= 1e-8 * mag else DEGENERATE
    root = math.sqrt(disc)
    l1, l2 = (tr + root) / 2, (tr - root) / 2
    if l1 * l2 < 0:
        return SADDLE
    return DEGENERATE


def stagnation_points(
    V: VelocityField,
    d: TriangleDomain,
    seeds_per_axis: int = 21,
    tol: float | None = None,
    max_iter: int = 60,
) -> list[StagnationPoint]:
    """Damped Newton search for zeros of the velocity over a seed lattice.

    Converged roots inside the closed triangle are deduplicated and
    classified through the velocity Jacobian.  Non-convergent seeds are
    dropped.  The default tolerance is 1e-10 times the velocity scale.
    """
    a = float(d.a)
    vscale = V.speed_scale()
    if tol is None:
        tol = 1e-10 * max(vscale, 1e-300)
    if tol <= 0:
        raise ValueError("tol must be positive")

    if vscale == 0.0:
        # null field: every seed is already stagnant and degenerate
        seeds = interior_lattice(d, seeds_per_axis + 2, margin=1e-9 * a)
        return [StagnationPoint(p, DEGENERATE, 0.0) for p in seeds]

    def polish(x: float, y: float) -> tuple[float, float]:
        # a few undamped steps drive the position to machine precision
        r = math.hypot(*V._eval_raw(x, y))
        for _ in range(4):
            u, v = V._eval_raw(x, y)
            ux, uy, vx, vy = V.jacobian(PhysicalPoint(x, y))
            det = ux * vy - uy * vx
            if det == 0 or not math.isfinite(det):
                break
            xn = x + (-u * vy + v * uy) / det
            yn = y + (u * vx - v * ux) / det
            rn = math.hypot(*V._eval_raw(xn, yn))
            if not rn < r:
                break
            x, y, r = xn, yn, rn
        return (x, y)

    def newton(x: float, y: float) -> tuple[float, float] | None:
        for _ in range(max_iter):
            u, v = V._eval_raw(x, y)
            r = math.hypot(u, v)
            if r <= tol:
                return polish(x, y)
            ux, uy, vx, vy = V.jacobian(PhysicalPoint(x, y))
            det = ux * vy - uy * vx
            if det == 0 or not math.isfinite(det):
                return None
            dx = (-u * vy + v * uy) / det
            dy = (-v * ux + u * vx) / det
            step = 1.0
            for _ in range(30):
                xn, yn = x + step * dx, y + step * dy
                un, vn = V._eval_raw(xn, yn)
                if math.hypot(un, vn) < r:
                    x, y = xn, yn
                    break
                step /= 2
            else:
                return None
        u, v = V._eval_raw(x, y)
        return polish(x, y) if math.hypot(u, v) <= tol else None

    found: list[tuple[float, float]] = []
    dedup_radius = max(1e-8 * a, 10 * tol / vscale * a)
    for seed in interior_lattice(d, seeds_per_axis + 2, margin=1e-6 * a):
        try:
            root = newton(seed.x, seed.y)
        except ValueError:
            # evaluation left the domain of a quadrature-backed field
            root = None
        if root is None:
            continue
        p = PhysicalPoint(root[0], root[1])
        if classify(d, p, 1e-7 * a).is_exterior:
            continue
        if any(math.hypot(p.x - qx, p.y - qy) <= dedup_radius for qx, qy in found):
            continue
        found.append((p.x, p.y))

    found.sort()
    out = []
    for x, y in found:
        u, v = V._eval_raw(x, y)
        cls = _classify_jacobian(V.jacobian(PhysicalPoint(x, y)), vscale, a)
        out.append(StagnationPoint(PhysicalPoint(x, y), cls, math.hypot(u, v)))
    return out


def interior_centers(points: Sequence[StagnationPoint], d: TriangleDomain, tol: float | None = None) -> list[StagnationPoint]:
    """Stagnation points that are strictly interior and center-classified."""
    tol = 1e-9 * float(d.a) if tol is None else tol
    return [
        sp for sp in points
        if sp.classification == CENTER and classify(d, sp.location, tol).is_interior
    ]


# ----------------------------------------------------------------------
# streamlines

@dataclass(frozen=True)
class Streamline:
    vertices: tuple[PhysicalPoint, ...]
    termination: str
    psi_drift: float


def _project_to_boundary(d: TriangleDomain, p: PhysicalPoint) -> PhysicalPoint:
    """Nearest point of the closed triangle (projection onto each edge)."""
    x, y = float(p[0]), float(p[1])
    best = None
    for pa, pb in d.edges():
        ax, ay, bx, by = float(pa.x), float(pa.y), float(pb.x), float(pb.y)
        vx, vy = bx - ax, by - ay
        t = ((x - ax) * vx + (y - ay) * vy) / (vx * vx + vy * vy)
        t = 0.0 if t < 0 else (1.0 if t > 1 else t)
        qx, qy = ax + t * vx, ay + t * vy
        dist = math.hypot(x - qx, y - qy)
        if best is None or dist < best[0]:
            best = (dist, PhysicalPoint(qx, qy))
    return best[1]


def _seg_point_distance(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    vv = vx * vx + vy * vy
    if vv == 0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * vx + (py - ay) * vy) / vv
    t = 0.0 if t < 0 else (1.0 if t > 1 else t)
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def trace_streamline(
    V: VelocityField,
    seed: PhysicalPoint,
    step: float = 1e-3,
    max_steps: int = 100_000,
) -> Streamline:
    """Classical fixed-step RK4 on dx/dtau = u, dy/dtau = v.

    Terminates closed when the path returns within step/2 of the seed
    after at least 10 steps with at least three quarter-turns of
    accumulated heading (guards against false closure near saddles);
    hits the boundary when the next point leaves the closed triangle
    (final point projected back); otherwise runs to the step limit.
    A seed at a stagnation point yields a single-vertex streamline.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    d = V.domain
    a = float(d.a)
    if not classify(d, seed, 1e-9 * a).is_interior:
        raise ValueError(f"seed {tuple(seed)} is not interior")
    psi = V.source
    psi0 = psi.evaluate(seed.x, seed.y)
    vscale = V.speed_scale()
    u0, v0 = V._eval_raw(float(seed.x), float(seed.y))
    if math.hypot(u0, v0) <= 1e-12 * max(vscale, 1e-300):
        return Streamline((PhysicalPoint(float(seed.x), float(seed.y)),), STEP_LIMIT, 0.0)

    inside = lambda x, y: not classify(d, PhysicalPoint(x, y), 1e-12 * a).is_exterior

    def rk4(x: float, y: float) -> tuple[float, float] | None:
        k1 = V._eval_raw(x, y)
        p2 = (x + 0.5 * step * k1[0], y + 0.5 * step * k1[1])
        if not inside(*p2):
            return None
        k2 = V._eval_raw(*p2)
        p3 = (x + 0.5 * step * k2[0], y + 0.5 * step * k2[1])
        if not inside(*p3):
            return None
        k3 = V._eval_raw(*p3)
        p4 = (x + step * k3[0], y + step * k3[1])
        if not inside(*p4):
            return None
        k4 = V._eval_raw(*p4)
        return (
            x + step / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y + step / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        )

    xs, ys = float(seed.x), float(seed.y)
    verts = [PhysicalPoint(xs, ys)]
    drift = 0.0
    heading = math.atan2(v0, u0)
    winding = 0.0
    x, y = xs, ys
    termination = STEP_LIMIT
    for n in range(1, max_steps + 1):
        nxt = rk4(x, y)
        if nxt is None or not inside(*nxt):
            target = nxt if nxt is not None else (x, y)
            verts.append(_project_to_boundary(d, PhysicalPoint(*target)))
            termination = HIT_BOUNDARY
            break
        xn, yn = nxt
        verts.append(PhysicalPoint(xn, yn))
        drift = max(drift, abs(psi.evaluate(xn, yn) - psi0))
        un, vn = V._eval_raw(xn, yn)
        hn = math.atan2(vn, un)
        delta = hn - heading
        while delta > math.pi:
            delta -= 2 * math.pi
        while delta <= -math.pi:
            delta += 2 * math.pi
        winding += delta
        heading = hn
        if n >= 10 and abs(winding) >= 1.5 * math.pi:
            if _seg_point_distance(xs, ys, x, y, xn, yn) <= step / 2:
                termination = CLOSED
                break
        x, y = xn, yn
    return Streamline(tuple(verts), termination, drift)


# ----------------------------------------------------------------------
# velocity profiles

def u_profile(
    V: VelocityField,
    axis: str,
    value: float,
    n: int = 201,
) -> list[tuple[float, float]]:
    """Samples of u along a vertical (axis="x") or horizontal (axis="y")
    line clipped to the closed triangle; returns (coordinate, u) pairs."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = float(d.a) if (d := V.domain) else 0.0
    if axis == "x":
        x0 = float(value)
        if not 0 <= x0 <= 2 * a:
            raise ValueError("vertical line misses the cavity")
        hi = x0 if x0 <= a else 2 * a - x0
        return [
            (y, V._eval_raw(x0, y)[0])
            for y in (hi * i / (n - 1) for i in range(n))
        ]
    if axis == "y":
        y0 = float(value)
        if not 0 <= y0 <= a:
            raise ValueError("horizontal line misses the cavity")
        xs = (y0 + (2 * a - 2 * y0) * i / (n - 1) for i in range(n))
        return [(xv, V._eval_raw(xv, y0)[0]) for xv in xs]
    raise ValueError("axis must be 'x' or 'y'")


# ----------------------------------------------------------------------
# CSV export

def write_streamlines_csv(traces: Sequence[Streamline], psi: StreamFunction, path) -> None:
    from .solver import format_float

    with open(path, "w", newline="\n") as fh:
        fh.write("trace_id,step,x,y,psi\n")
        for tid, tr in enumerate(traces):
            for k, p in enumerate(tr.vertices):
                val = psi.evaluate(p.x, p.y)
                fh.write(f"{tid},{k},{format_float(p.x)},{format_float(p.y)},{format_float(val)}\n")


def write_stagnation_csv(points: Sequence[StagnationPoint], path) -> None:
    from .solver import format_float

    with open(path, "w", newline="\n") as fh:
        fh.write("x,y,class,speed\n")
        for sp in points:
            fh.write(
                f"{format_float(sp.location.x)},{format_float(sp.location.y)},"
                f"{sp.classification},{format_float(sp.residual_speed)}\n"
            )
