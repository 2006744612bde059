"""Independent oracles for produced stream functions.

Everything here avoids the solution formula's own machinery: the strong
form is checked by second differences, the boundary condition by direct
sampling, quadrature backings by midpoint Riemann sums, and the
existence/uniqueness construction by exact round trips through randomly
generated boundary-vanishing polynomials.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import (
    TriangleDomain,
    PhysicalPoint,
    boundary_sample,
    interior_lattice,
    sigma_rectangles,
    to_characteristic,
)
from .polyalg import BivariatePoly, wave_operator
from .quadrature import riemann_rect
from .compatibility import StressField, stress_char_evaluator
from . import solver as _solver
from .solver import QuadratureStreamFunction, StreamFunction, solve_exact_poly


@dataclass(frozen=True)
class VerificationReport:
    max_interior_residual: float
    max_boundary_value: float
    quadrature_vs_riemann: float | None
    checks: dict

    @property
    def overall_pass(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "max_interior_residual": self.max_interior_residual,
            "max_boundary_value": self.max_boundary_value,
            "quadrature_vs_riemann": self.quadrature_vs_riemann,
            "checks": self.checks,
            "overall_pass": self.overall_pass,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def riemann_psi(stress: StressField, d: TriangleDomain, p: PhysicalPoint, cells_per_axis: int = 256) -> float:
    """Stream-function value by midpoint Riemann sums over the two
    sigma rectangles; deliberately independent of the Gauss machinery.

    Uses the same -1/4 prefactor as the solver (the value forced by the
    Green-theorem bookkeeping and by the exact operator identity).
    """
    g = stress_char_evaluator(stress, float(d.a))
    rects = sigma_rectangles(d, to_characteristic(PhysicalPoint(float(p[0]), float(p[1]))))
    return -0.25 * (riemann_rect(g, rects.rect1, cells_per_axis) + riemann_rect(g, rects.rect2, cells_per_axis))


def verify_solution(
    psi: StreamFunction,
    f: StressField,
    d: TriangleDomain,
    lattice_n: int = 32,
    tol_pde: float = 5e-3,
    tol_bc: float = 1e-9,
    fd_h: float | None = None,
    riemann_cells: int = 256,
    tol_quad: float | None = None,
    rng_seed: int = 20260808,
) -> VerificationReport:
    """Strong-form + boundary + (for quadrature backings) Riemann checks.

    ``tol_bc`` is absolute; pick it relative to the field's scale at the
    call site.  The interior lattice is the grid-export lattice minus a
    one-stencil margin.
    """
    if lattice_n < 4:
        raise ValueError("lattice_n must be >= 4")
    a = float(d.a)
    h = fd_h if fd_h is not None else 1e-4 * a
    needs_margin = isinstance(psi, QuadratureStreamFunction)
    margin = h * 1.5 if needs_margin else 1e-12 * a
    max_resid = 0.0
    for p in interior_lattice(d, lattice_n, margin=margin):
        max_resid = max(max_resid, _solver.residual(psi, f, p, h))

    max_bc = max(abs(psi.evaluate(p.x, p.y)) for p in boundary_sample(d, 10 * lattice_n))

    quad_vs_riemann = None
    checks = {
        "interior_residual": {"value": max_resid, "tol": tol_pde, "pass": max_resid <= tol_pde},
        "boundary_value": {"value": max_bc, "tol": tol_bc, "pass": max_bc <= tol_bc},
    }
    if isinstance(psi, QuadratureStreamFunction):
        rng = random.Random(rng_seed)
        worst = 0.0
        count = 0
        while count < 20:
            x = rng.uniform(0.0, 2 * a)
            y = rng.uniform(0.0, a)
            p = PhysicalPoint(x, y)
            from .geometry import classify

            if not classify(d, p, 1e-12 * a).is_interior:
                continue
            count += 1
            worst = max(worst, abs(psi.evaluate(x, y) - riemann_psi(f, d, p, riemann_cells)))
        quad_vs_riemann = worst
        tq = tol_quad if tol_quad is not None else 5e-3 * max(psi.scale(), 1e-12)
        checks["quadrature_vs_riemann"] = {"value": worst, "tol": tq, "pass": worst <= tq}

    return VerificationReport(
        max_interior_residual=max_resid,
        max_boundary_value=max_bc,
        quadrature_vs_riemann=quad_vs_riemann,
        checks=checks,
    )


# ----------------------------------------------------------------------
# existence/uniqueness property suite

def boundary_vanishing_poly(q: BivariatePoly) -> BivariatePoly:
    """2*y*(y-x)*(x+y-2a) * q -- vanishes on all three edges by construction."""
    x, y, a = BivariatePoly.v1(), BivariatePoly.v2(), BivariatePoly.sym_a()
    return 2 * y * (y - x) * (x + y - 2 * a) * q


def random_poly(rng: random.Random, max_degree: int = 4, coeff_range: int = 5) -> BivariatePoly:
    """Random polynomial with small integer coefficients (some zero)."""
    terms = {}
    for i in range(max_degree + 1):
        for j in range(max_degree + 1 - i):
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                terms[(i, j)] = c
    return BivariatePoly.from_terms(terms)


@dataclass(frozen=True)
class UniquenessSummary:
    trials: int
    passed: int
    failures: tuple[int, ...]

    @property
    def all_passed(self) -> bool:
        return self.passed == self.trials


def uniqueness_suite(d: TriangleDomain | None, trials: int, seed: int) -> UniquenessSummary:
    """Round-trip construction check: random boundary-vanishing psi0,
    f = L(psi0), exact solve, require coefficient-map equality with psi0.

    Any inequality falsifies the uniqueness of the construction.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    failures = []
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        q = random_poly(rng)
        psi0 = boundary_vanishing_poly(q)
        if d is not None:
            psi0 = psi0.subs_a(Fraction(d.a))
        f = wave_operator(psi0)
        got = solve_exact_poly(f, d)
        if got.poly != psi0:
            failures.append(trial)
    return UniquenessSummary(trials=trials, passed=trials - len(failures), failures=tuple(failures))
