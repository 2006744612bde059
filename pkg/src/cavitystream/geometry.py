"""Triangular cavity geometry and the characteristic coordinate change.

The cavity is the isoceles right triangle with vertices O=(0,0),
A=(2a,0), B=(a,a).  The coordinate change X = x+y, Y = -x+y aligns the
axes with the operator's characteristic lines y = x and y = -x and maps
the triangle onto {0 <= X <= 2a, -X <= Y <= 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple


class PhysicalPoint(NamedTuple):
    x: float
    y: float


class CharPoint(NamedTuple):
    X: float
    Y: float


class Rect(NamedTuple):
    """Axis-aligned rectangle [t0, t1] x [s0, s1] in the (t, s) plane."""

    t0: float
    t1: float
    s0: float
    s1: float

    @property
    def area(self):
        return max(self.t1 - self.t0, 0) * max(self.s1 - self.s0, 0)

    @property
    def is_degenerate(self) -> bool:
        return self.t1 <= self.t0 or self.s1 <= self.s0


class SigmaDecomposition(NamedTuple):
    """The two rectangles the solution formula integrates over."""

    rect1: Rect
    rect2: Rect


INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"

# edge ids: 0 = OA (y=0), 1 = OB (y=x), 2 = AB (x+y=2a)
EDGE_NAMES = ("OA", "OB", "AB")


@dataclass(frozen=True)
class PointLocation:
    kind: str
    edge: int | None = None

    @property
    def is_interior(self) -> bool:
        return self.kind == INTERIOR

    @property
    def is_boundary(self) -> bool:
        return self.kind == BOUNDARY

    @property
    def is_exterior(self) -> bool:
        return self.kind == EXTERIOR


@dataclass(frozen=True)
class TriangleDomain:
    """The cavity, parameterized by the half-base a > 0.

    Vertices are derived, never stored, so they can be produced exactly
    for exact ``a`` (int or Fraction).
    """

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a!r}")

    @property
    def vertex_o(self) -> PhysicalPoint:
        return PhysicalPoint(0 * self.a, 0 * self.a)

    @property
    def vertex_a(self) -> PhysicalPoint:
        return PhysicalPoint(2 * self.a, 0 * self.a)

    @property
    def vertex_b(self) -> PhysicalPoint:
        return PhysicalPoint(self.a, self.a)

    def vertices(self) -> tuple[PhysicalPoint, PhysicalPoint, PhysicalPoint]:
        return (self.vertex_o, self.vertex_a, self.vertex_b)

    def edges(self) -> tuple[tuple[PhysicalPoint, PhysicalPoint], ...]:
        """Edges indexed 0=OA, 1=OB, 2=AB (endpoints in that orientation)."""
        o, a_, b = self.vertices()
        return ((o, a_), (o, b), (a_, b))

    @property
    def area(self):
        return self.a * self.a

    def exact_a(self) -> Fraction:
        return Fraction(self.a)


def to_characteristic(p: PhysicalPoint) -> CharPoint:
    """(x, y) -> (x+y, -x+y); exact on the inputs."""
    x, y = p
    return CharPoint(x + y, -x + y)


def to_physical(q: CharPoint) -> PhysicalPoint:
    """(X, Y) -> ((X-Y)/2, (X+Y)/2), the inverse coordinate change."""
    X, Y = q
    return PhysicalPoint((X - Y) / 2, (X + Y) / 2)


def _dist_point_segment(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    if vv == 0:
        return math.hypot(wx, wy)
    t = (wx * vx + wy * vy) / vv
    t = 0.0 if t < 0 else (1.0 if t > 1 else t)
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def signed_edge_distances(d: TriangleDomain, p: PhysicalPoint) -> tuple[float, float, float]:
    """Perpendicular distances to the three edge lines, positive inside."""
    x, y = float(p[0]), float(p[1])
    a = float(d.a)
    r2 = math.sqrt(2.0)
    return (y, (x - y) / r2, (2 * a - x - y) / r2)


def classify(d: TriangleDomain, p: PhysicalPoint, tol: float) -> PointLocation:
    """Interior / Boundary(edge) / Exterior with a Euclidean tolerance.

    Interior means every edge line is cleared by more than tol; Boundary
    means the point is within tol of an edge segment while violating no
    half-plane by more than tol.  Points near a vertex report the
    lowest-index incident edge.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    s = signed_edge_distances(d, p)
    if min(s) > tol:
        return PointLocation(INTERIOR)
    if min(s) >= -tol:
        x, y = float(p[0]), float(p[1])
        for eid, (pa, pb) in enumerate(d.edges()):
            if _dist_point_segment(x, y, float(pa.x), float(pa.y), float(pb.x), float(pb.y)) <= tol:
                return PointLocation(BOUNDARY, eid)
    return PointLocation(EXTERIOR)


def sigma_rectangles(d: TriangleDomain, q: CharPoint) -> SigmaDecomposition:
    """Integration rectangles [-Y, X] x [Y, 0] and [X, 2a] x [-X, 0].

    ``q`` must be the image of a point of the closed triangle; a small
    slack absorbs roundoff from the coordinate change.
    """
    X, Y = q
    a = float(d.a)
    slack = 1e-9 * a
    if not (-slack <= X <= 2 * a + slack) or not (-X - slack <= Y <= slack):
        raise ValueError(f"characteristic point {tuple(q)} outside the closed triangle image")
    return SigmaDecomposition(
        rect1=Rect(-Y, X, Y, 0 * Y),
        rect2=Rect(X, 2 * a, -X, 0 * X),
    )


def boundary_sample(d: TriangleDomain, n: int) -> list[PhysicalPoint]:
    """n boundary points: the three vertices once, the rest spread over
    the edges proportionally to edge length (largest-remainder split,
    uniform placement inside each edge)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    o, va, vb = d.vertices()
    pts = [o, va, vb]
    extra = n - 3
    if extra:
        a = float(d.a)
        lengths = (2 * a, a * math.sqrt(2.0), a * math.sqrt(2.0))
        total = sum(lengths)
        quotas = [extra * ln / total for ln in lengths]
        counts = [int(q) for q in quotas]
        rema = [q - c for q, c in zip(quotas, counts)]
        while sum(counts) < extra:
            best = max(range(3), key=lambda e: (rema[e], -e))
            counts[best] += 1
            rema[best] = -1.0
        for eid, (pa, pb) in enumerate(d.edges()):
            k = counts[eid]
            for jj in range(1, k + 1):
                t = jj / (k + 1)
                pts.append(
                    PhysicalPoint(
                        float(pa.x) + t * (float(pb.x) - float(pa.x)),
                        float(pa.y) + t * (float(pb.y) - float(pa.y)),
                    )
                )
    return pts


def interior_lattice(d: TriangleDomain, n: int, margin: float = 0.0) -> list[PhysicalPoint]:
    """Regular n x n lattice over the bounding box, clipped to interior
    points whose distance to every edge line exceeds ``margin``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = float(d.a)
    pts = []
    for iy in range(n):
        y = a * iy / (n - 1)
        for ix in range(n):
            x = 2 * a * ix / (n - 1)
            p = PhysicalPoint(x, y)
            if min(signed_edge_distances(d, p)) > margin:
                pts.append(p)
    return pts


def distance_to_boundary(d: TriangleDomain, p: PhysicalPoint) -> float:
    """Distance from an inside point to the nearest edge line."""
    return min(signed_edge_distances(d, p))
