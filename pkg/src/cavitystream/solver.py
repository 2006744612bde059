"""Stream-function construction from an admissible stress field.

The solution value at a point is -1/4 times the stress integrated (in
characteristic coordinates, after the inverse coordinate substitution)
over the two rectangles of that point's sigma decomposition.  The -1/4
is forced by the Green-theorem bookkeeping: the boundary line integral
of the gradient equals the area integral of half the source, and the
resulting field is the one that actually satisfies both the operator
identity and the boundary condition (checked exactly below for every
polynomial solve).  For polynomial stresses the whole formula is
carried out by exact antidifferentiation with symbolic limits, yielding
the stream function as an exact polynomial; otherwise each point
evaluation runs a subdivided tensor Gauss rule.  The closed-form
sinusoidal case is provided as a builtin.
"""

from __future__ import annotations

import math
from fractions import Fraction
import numpy as np

from . import geometry
from .geometry import (
    TriangleDomain,
    PhysicalPoint,
    boundary_sample,
    interior_lattice,
    signed_edge_distances,
    sigma_rectangles,
    to_characteristic,
)
from .polyalg import BivariatePoly, wave_operator
from .compatibility import (
    CosineStress,
    OpaqueStress,
    PolynomialStress,
    StressField,
    compat_check,
    exact_residual_poly,
    stress_char_evaluator,
)
from .quadrature import QuadratureSpec, integrate_rect

HALF = Fraction(1, 2)
SOLUTION_PREFACTOR = Fraction(-1, 4)


class IncompatibleStress(ValueError):
    """The stress violates the admissibility condition; no confined flow exists."""


def default_quadrature_spec(d: TriangleDomain) -> QuadratureSpec:
    """Order 12 (exact through degree 23); subdivision scaled with the cavity."""
    return QuadratureSpec(order=12, subdivision=max(1, math.ceil(8 * float(d.a))))


# ----------------------------------------------------------------------
# exact path

def solve_poly_symbolic(f: BivariatePoly, a_poly: BivariatePoly) -> BivariatePoly:
    """Exact evaluation of the solution formula for a polynomial stress.

    ``a_poly`` is either the symbol a or an exact constant.  No
    admissibility gate here; callers check first.
    """
    t, s = BivariatePoly.v1(), BivariatePoly.v2()
    g = f.compose((t - s) * HALF, (t + s) * HALF)
    h = g.antideriv(2)
    h0 = h.compose(t, 0)

    # first rectangle: t in [-Y, X], s in [Y, 0]; slots become (t, Y)
    inner1 = h0 - h
    i1 = inner1.antideriv(1)
    term1 = i1 - i1.compose(-s, s)  # upper t = X (rename), lower t = -Y

    # second rectangle: t in [X, 2a], s in [-X, 0]; slots become (t, X)
    inner2 = h0 - h.compose(t, -s)
    i2 = inner2.antideriv(1)
    term2 = i2.compose(2 * a_poly, s) - i2.compose(s, s)
    term2 = term2.compose(s, t)  # move X into slot v1

    # term1 lives in (X, Y); term2 in X alone; fold back to (x, y)
    phi = (term1 + term2) * SOLUTION_PREFACTOR
    x, y = BivariatePoly.v1(), BivariatePoly.v2()
    return phi.compose(x + y, -x + y)


def _check_poly_boundary_exact(psi: BivariatePoly, a_poly: BivariatePoly) -> bool:
    """Psi restricted to each edge must be the zero polynomial."""
    v1 = BivariatePoly.v1()
    on_oa = psi.compose(v1, 0)
    on_ob = psi.compose(v1, v1)
    on_ab = psi.compose(v1, 2 * a_poly - v1)
    return on_oa.is_zero and on_ob.is_zero and on_ab.is_zero


# ----------------------------------------------------------------------
# stream function backings

class StreamFunction:
    """Evaluable scalar field vanishing on the cavity boundary.

    Subclasses supply ``_raw_eval`` (scalar or numpy arrays).  ``domain``
    is None only for symbolic-parameter polynomial solutions, which must
    be bound with ``bind_a`` before numeric use.
    """

    kind = "abstract"

    def __init__(self, domain: TriangleDomain | None):
        self.domain = domain
        self._scale: float | None = None

    def _raw_eval(self, x, y):
        raise NotImplementedError

    def evaluate(self, x, y) -> float:
        return float(self._raw_eval(float(x), float(y)))

    def __call__(self, x, y) -> float:
        return self.evaluate(x, y)

    @property
    def source_stress(self) -> StressField:
        raise NotImplementedError

    def scale(self) -> float:
        """max |psi| over a fixed 51x51 clipped lattice (cached)."""
        if self._scale is None:
            if self.domain is None:
                raise ValueError("bind a before computing a numeric scale")
            pts = interior_lattice(self.domain, 51)
            self._scale = max((abs(self.evaluate(p.x, p.y)) for p in pts), default=0.0)
        return self._scale

    def check_boundary(self, n: int = 100, tol: float = 1e-9) -> float:
        """max |psi| over a boundary sample; raises when above tol."""
        worst = max(abs(self.evaluate(p.x, p.y)) for p in boundary_sample(self.domain, n))
        if worst > tol:
            raise ValueError(f"stream function fails to vanish on the boundary: {worst:g} > {tol:g}")
        return worst


class PolyStreamFunction(StreamFunction):
    kind = "exact_poly"

    def __init__(self, poly: BivariatePoly, domain: TriangleDomain | None, stress: PolynomialStress | None = None):
        super().__init__(domain)
        self.poly = poly
        self._stress = stress if stress is not None else PolynomialStress(wave_operator(poly))
        if domain is not None and poly.has_symbol_a:
            raise ValueError("numeric domain with symbolic polynomial; bind a first")

    def _raw_eval(self, x, y):
        return self.poly.float_evaluator()(x, y)

    def eval_exact(self, x, y):
        return self.poly.eval(x, y)

    @property
    def source_stress(self) -> PolynomialStress:
        return self._stress

    def bind_a(self, a) -> "PolyStreamFunction":
        d = TriangleDomain(a)
        return PolyStreamFunction(self.poly.subs_a(Fraction(a)), d)


class SinusoidalStreamFunction(StreamFunction):
    """The builtin three-cosine closed form.

    Implements the printed expression verbatim for m = 3.  Applying the
    operator to it yields 2*A*cos(3*pi*y/a) (the two characteristic-
    direction cosines are annihilated), so that is the source stress this
    object reports; the coefficient is measured from the formula, not
    rescaled away.
    """

    kind = "sinusoidal"

    def __init__(self, amplitude: float, domain: TriangleDomain):
        super().__init__(domain)
        self.amplitude = float(amplitude)
        a = float(domain.a)
        self._c = 2.0 * self.amplitude * a * a / (9.0 * math.pi**2)
        self._k = 3.0 * math.pi / a

    def _raw_eval(self, x, y):
        k = self._k
        return -self._c * (np.cos(k * y) + np.cos(k * (x - y) / 2.0) - 2.0 * np.cos(k * (x + y) / 4.0) ** 2)

    @property
    def source_stress(self) -> CosineStress:
        return CosineStress(2.0 * self.amplitude, self._k)


class QuadratureStreamFunction(StreamFunction):
    kind = "quadrature"

    def __init__(self, stress: StressField, domain: TriangleDomain, spec: QuadratureSpec | None = None):
        super().__init__(domain)
        self.stress = stress
        self.spec = spec or default_quadrature_spec(domain)
        self._g = stress_char_evaluator(stress, float(domain.a))

    def _raw_eval(self, x, y):
        q = to_characteristic(PhysicalPoint(float(x), float(y)))
        rects = sigma_rectangles(self.domain, q)
        total = integrate_rect(self._g, rects.rect1, self.spec) + integrate_rect(self._g, rects.rect2, self.spec)
        return float(SOLUTION_PREFACTOR) * total

    @property
    def source_stress(self) -> StressField:
        return self.stress


# ----------------------------------------------------------------------
# constructors

def solve_exact_poly(
    f: BivariatePoly | PolynomialStress,
    d: TriangleDomain | None,
) -> PolyStreamFunction:
    """Exact stream function for a polynomial stress.

    Pass d=None to keep the length parameter symbolic.  Raises
    IncompatibleStress when the admissibility polynomial is nonzero.
    """
    fp = f.poly if isinstance(f, PolynomialStress) else f
    constraint = exact_residual_poly(fp, d)
    if not constraint.is_zero:
        raise IncompatibleStress(
            "stress fails the admissibility condition; constraint polynomial: "
            + constraint.to_text(names=("X", "_"))
        )
    if d is None:
        a_poly = BivariatePoly.sym_a()
    else:
        a_poly = BivariatePoly.const(Fraction(d.a))
        if fp.has_symbol_a:
            fp = fp.subs_a(Fraction(d.a))
    psi = solve_poly_symbolic(fp, a_poly)
    if wave_operator(psi) != fp:
        raise ArithmeticError("internal error: operator identity violated by the exact solve")
    if not _check_poly_boundary_exact(psi, a_poly):
        raise ArithmeticError("internal error: exact solution does not vanish on the boundary")
    out = PolyStreamFunction(psi, d, PolynomialStress(fp))
    if d is not None:
        out.check_boundary(100, 1e-9 * max(out.scale(), 1.0))
    return out


def solve_quadrature(
    f: StressField,
    d: TriangleDomain,
    spec: QuadratureSpec | None = None,
    compat_tol: float = 1e-8,
) -> QuadratureStreamFunction:
    """Quadrature-backed stream function for a general admissible stress."""
    report = compat_check(f, d, tol=compat_tol)
    if not report.is_compatible:
        raise IncompatibleStress(
            f"stress fails the admissibility sweep: max residual {report.max_abs_residual:g} "
            f"(normalization {report.normalization:g})"
        )
    out = QuadratureStreamFunction(f, d, spec)
    out.check_boundary(100, 1e-6 * max(out.scale(), 1e-12))
    return out


def sinusoidal_closed_form(amplitude: float, d: TriangleDomain) -> SinusoidalStreamFunction:
    """The builtin sinusoidal-stress stream function (verbatim closed form)."""
    out = SinusoidalStreamFunction(amplitude, d)
    c = abs(out._c)
    if c > 0:
        out.check_boundary(100, 1e-13 * c)
    return out


def realistic_example(d: TriangleDomain | None) -> PolyStreamFunction:
    """Two-gyre polynomial flow: the admissible cubic times two tilting factors."""
    x, y, a = BivariatePoly.v1(), BivariatePoly.v2(), BivariatePoly.sym_a()
    psi = (2 * y**3 - 2 * x**2 * y - 4 * a * y**2 + 4 * a * x * y) \
        * (y - 100 * x**2 - a) * (y + x * Fraction(1, 4) - a * Fraction(5, 6))
    if d is not None:
        psi = psi.subs_a(Fraction(d.a))
    out = PolyStreamFunction(psi, d)
    if d is not None:
        out.check_boundary(100, 1e-9 * max(out.scale(), 1.0))
    return out


def linear_example(d: TriangleDomain | None) -> PolyStreamFunction:
    """The linear-stress flow: source 16y - 8a, one recirculation gyre."""
    y, a = BivariatePoly.v2(), BivariatePoly.sym_a()
    f = 16 * y - 8 * a
    if d is not None:
        f = f.subs_a(Fraction(d.a))
    return solve_exact_poly(f, d)


# ----------------------------------------------------------------------
# strong-form residual

def residual(psi: StreamFunction, f: StressField, p: PhysicalPoint, h: float) -> float:
    """|second-difference operator applied to psi minus f| at an interior point.

    The 5-point stencil may leave the triangle only for backings whose
    formulas extend (polynomial, sinusoidal); the quadrature backing
    requires the stencil to stay inside the closed triangle.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    d = psi.domain
    margin = min(signed_edge_distances(d, p))
    if margin <= 0:
        raise ValueError(f"point {tuple(p)} is not interior")
    if isinstance(psi, QuadratureStreamFunction) and margin < h * math.sqrt(2.0):
        raise ValueError(f"stencil at {tuple(p)} leaves the closed triangle (margin {margin:g} < h*sqrt2)")
    x, y = float(p[0]), float(p[1])
    e = psi.evaluate
    lap = (-e(x - h, y) + 2 * e(x, y) - e(x + h, y)) / h**2 \
        + (e(x, y - h) - 2 * e(x, y) + e(x, y + h)) / h**2
    fv = float(f.evaluator(float(d.a))(x, y))
    return abs(lap - fv)


# ----------------------------------------------------------------------
# grid export

def grid_rows(psi: StreamFunction, d: TriangleDomain, n: int, tol: float | None = None) -> list[tuple[float, float, float]]:
    """Row-major (x, y, psi) over the n x n bounding-box lattice clipped
    to the closed triangle."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = float(d.a)
    tol = 1e-10 * a if tol is None else tol
    rows = []
    for iy in range(n):
        y = a * iy / (n - 1)
        for ix in range(n):
            x = 2 * a * ix / (n - 1)
            if not geometry.classify(d, PhysicalPoint(x, y), tol).is_exterior:
                rows.append((x, y, psi.evaluate(x, y)))
    return rows


def format_float(v: float) -> str:
    """Fixed 17-significant-digit decimal formatting (round-trip exact)."""
    return f"{v + 0.0:.17g}"


def write_grid_csv(psi: StreamFunction, d: TriangleDomain, n: int, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y,psi\n")
        for x, y, v in grid_rows(psi, d, n):
            fh.write(f"{format_float(x)},{format_float(y)},{format_float(v)}\n")
