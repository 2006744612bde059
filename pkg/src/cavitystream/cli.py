"""Command-line front end: admissibility checks, solves, flow figures,
and end-to-end regeneration of the three bundled flow cases.

Every command reads one JSON config (plus a few flag overrides) and
writes deterministic artifacts: identical config means byte-identical
output files.  Exit codes: 0 success, 1 domain failure (inadmissible
stress or failed verification), 2 usage/config failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from .geometry import TriangleDomain, PhysicalPoint, distance_to_boundary, interior_lattice
from .polyalg import BivariatePoly
from .compatibility import (
    CosineStress,
    PolynomialStress,
    StressField,
    compat_check,
    cosine_from_harmonic,
    stress_scale,
)
from .quadrature import QuadratureSpec
from .solver import (
    IncompatibleStress,
    PolyStreamFunction,
    SinusoidalStreamFunction,
    StreamFunction,
    default_quadrature_spec,
    format_float,
    linear_example,
    realistic_example,
    sinusoidal_closed_form,
    solve_exact_poly,
    solve_quadrature,
    write_grid_csv,
)
from .kinematics import (
    CENTER,
    interior_centers,
    stagnation_points,
    trace_streamline,
    velocity_field,
    write_stagnation_csv,
    write_streamlines_csv,
)
from .verify import verify_solution

BUILTIN_NAMES = ("linear", "sinusoidal", "realistic")
SINUSOIDAL_AMPLITUDE = 5.0  # amplitude of the bundled sinusoidal case

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class StressSpec:
    kind: str
    terms: tuple[tuple[int, int, Fraction], ...] = ()
    amplitude: float = 0.0
    harmonic: int = 0
    name: str = ""


@dataclass(frozen=True)
class RunConfig:
    a: float = 1.0
    stress: StressSpec = StressSpec(kind="builtin", name="linear")
    out: str = "out"
    grid_n: int = 101
    n_sweep: int = 65
    compat_tol: float = 1e-10
    verify_lattice: int = 32
    seeds_per_axis: int = 21
    quad_order: int = 12
    quad_subdivision: int | None = None
    step: float | None = None
    max_steps: int = 100_000
    seeds: tuple[tuple[float, float], ...] | None = None

    @property
    def domain(self) -> TriangleDomain:
        return TriangleDomain(self.a)

    def quadrature_spec(self) -> QuadratureSpec:
        sub = self.quad_subdivision
        if sub is None:
            sub = default_quadrature_spec(self.domain).subdivision
        return QuadratureSpec(order=self.quad_order, subdivision=sub)

    def stream_step(self) -> float:
        return self.step if self.step is not None else 1e-3 * self.a


def _require_keys(d: dict, allowed: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _finite_number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if not math.isfinite(v):
        raise ConfigError(f"{where} must be finite")
    return float(v)


def _positive_int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(f"{where} must be a positive integer")
    return v


def _parse_stress(d: dict) -> StressSpec:
    if not isinstance(d, dict):
        raise ConfigError("stress must be an object")
    kind = d.get("kind")
    if kind == "polynomial":
        _require_keys(d, {"kind", "terms"}, "stress")
        terms = d.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ConfigError("stress.terms must be a nonempty array")
        parsed = []
        for idx, term in enumerate(terms):
            if not isinstance(term, dict):
                raise ConfigError(f"stress.terms[{idx}] must be an object")
            _require_keys(term, {"i", "j", "coefficient"}, f"stress.terms[{idx}]")
            i, j = term.get("i"), term.get("j")
            if not isinstance(i, int) or not isinstance(j, int) or i < 0 or j < 0:
                raise ConfigError(f"stress.terms[{idx}]: i and j must be nonnegative integers")
            c = _finite_number(term.get("coefficient"), f"stress.terms[{idx}].coefficient")
            parsed.append((i, j, Fraction(c)))
        return StressSpec(kind="polynomial", terms=tuple(parsed))
    if kind == "cosine":
        _require_keys(d, {"kind", "A", "m"}, "stress")
        A = _finite_number(d.get("A"), "stress.A")
        m = _positive_int(d.get("m"), "stress.m")
        return StressSpec(kind="cosine", amplitude=A, harmonic=m)
    if kind == "builtin":
        _require_keys(d, {"kind", "name"}, "stress")
        name = d.get("name")
        if name not in BUILTIN_NAMES:
            raise ConfigError(f"stress.name must be one of {BUILTIN_NAMES}")
        return StressSpec(kind="builtin", name=name)
    raise ConfigError("stress.kind must be 'polynomial', 'cosine' or 'builtin'")


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(
        doc,
        {"a", "stress", "out", "grid_n", "n_sweep", "tolerances", "quadrature",
         "streamlines", "verify_lattice", "seeds_per_axis"},
        "config",
    )
    cfg = RunConfig()
    if "a" in doc:
        a = _finite_number(doc["a"], "a")
        if a <= 0:
            raise ConfigError("a must be positive")
        cfg = replace(cfg, a=a)
    if "stress" in doc:
        cfg = replace(cfg, stress=_parse_stress(doc["stress"]))
    if "out" in doc:
        if not isinstance(doc["out"], str):
            raise ConfigError("out must be a string")
        cfg = replace(cfg, out=doc["out"])
    if "grid_n" in doc:
        n = _positive_int(doc["grid_n"], "grid_n")
        if n < 2:
            raise ConfigError("grid_n must be >= 2")
        cfg = replace(cfg, grid_n=n)
    if "n_sweep" in doc:
        cfg = replace(cfg, n_sweep=max(2, _positive_int(doc["n_sweep"], "n_sweep")))
    if "tolerances" in doc:
        tols = doc["tolerances"]
        if not isinstance(tols, dict):
            raise ConfigError("tolerances must be an object")
        _require_keys(tols, {"compat"}, "tolerances")
        if "compat" in tols:
            t = _finite_number(tols["compat"], "tolerances.compat")
            if t <= 0:
                raise ConfigError("tolerances.compat must be positive")
            cfg = replace(cfg, compat_tol=t)
    if "quadrature" in doc:
        q = doc["quadrature"]
        if not isinstance(q, dict):
            raise ConfigError("quadrature must be an object")
        _require_keys(q, {"order", "subdivision"}, "quadrature")
        if "order" in q:
            cfg = replace(cfg, quad_order=_positive_int(q["order"], "quadrature.order"))
        if "subdivision" in q:
            cfg = replace(cfg, quad_subdivision=_positive_int(q["subdivision"], "quadrature.subdivision"))
    if "streamlines" in doc:
        s = doc["streamlines"]
        if not isinstance(s, dict):
            raise ConfigError("streamlines must be an object")
        _require_keys(s, {"step", "max_steps", "seeds"}, "streamlines")
        if "step" in s:
            st = _finite_number(s["step"], "streamlines.step")
            if st <= 0:
                raise ConfigError("streamlines.step must be positive")
            cfg = replace(cfg, step=st)
        if "max_steps" in s:
            cfg = replace(cfg, max_steps=_positive_int(s["max_steps"], "streamlines.max_steps"))
        if "seeds" in s and s["seeds"] is not None:
            seeds = s["seeds"]
            if not isinstance(seeds, list):
                raise ConfigError("streamlines.seeds must be an array of [x, y] pairs")
            parsed = []
            for idx, pair in enumerate(seeds):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ConfigError(f"streamlines.seeds[{idx}] must be an [x, y] pair")
                parsed.append((
                    _finite_number(pair[0], f"streamlines.seeds[{idx}][0]"),
                    _finite_number(pair[1], f"streamlines.seeds[{idx}][1]"),
                ))
            cfg = replace(cfg, seeds=tuple(parsed))
    if "verify_lattice" in doc:
        n = _positive_int(doc["verify_lattice"], "verify_lattice")
        if n < 4:
            raise ConfigError("verify_lattice must be >= 4")
        cfg = replace(cfg, verify_lattice=n)
    if "seeds_per_axis" in doc:
        cfg = replace(cfg, seeds_per_axis=_positive_int(doc["seeds_per_axis"], "seeds_per_axis"))
    return cfg


def load_config(path: str | None, overrides: argparse.Namespace) -> RunConfig:
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config JSON: {exc}")
    cfg = parse_config(doc)
    if getattr(overrides, "a", None) is not None:
        if overrides.a <= 0 or not math.isfinite(overrides.a):
            raise ConfigError("--a must be a positive finite number")
        cfg = replace(cfg, a=overrides.a)
    if getattr(overrides, "out", None) is not None:
        cfg = replace(cfg, out=overrides.out)
    if getattr(overrides, "grid", None) is not None:
        if overrides.grid < 2:
            raise ConfigError("--grid must be >= 2")
        cfg = replace(cfg, grid_n=overrides.grid)
    return cfg


# ----------------------------------------------------------------------
# stress / solution assembly

def build_stress(cfg: RunConfig) -> StressField:
    d = cfg.domain
    spec = cfg.stress
    if spec.kind == "polynomial":
        poly = BivariatePoly({(i, j, 0): c for i, j, c in spec.terms})
        return PolynomialStress(poly)
    if spec.kind == "cosine":
        return cosine_from_harmonic(spec.amplitude, spec.harmonic, d)
    if spec.name == "linear":
        y, a = BivariatePoly.v2(), Fraction(d.a)
        return PolynomialStress(16 * y - BivariatePoly.const(8 * a))
    if spec.name == "sinusoidal":
        return SinusoidalStreamFunction(SINUSOIDAL_AMPLITUDE, d).source_stress
    if spec.name == "realistic":
        return realistic_example(d).source_stress
    raise ConfigError(f"unsupported stress spec: {spec}")


def build_stream_function(cfg: RunConfig) -> StreamFunction:
    d = cfg.domain
    spec = cfg.stress
    if spec.kind == "builtin":
        if spec.name == "linear":
            return linear_example(d)
        if spec.name == "sinusoidal":
            return sinusoidal_closed_form(SINUSOIDAL_AMPLITUDE, d)
        return realistic_example(d)
    stress = build_stress(cfg)
    if isinstance(stress, PolynomialStress):
        return solve_exact_poly(stress, d)
    return solve_quadrature(stress, d, cfg.quadrature_spec(), cfg.compat_tol)


def _poly_roundoff_bound(psi: PolyStreamFunction, d: TriangleDomain) -> float:
    a = float(d.a)
    total = 0.0
    for (i, j, _), c in psi.poly.terms():
        total += abs(float(c)) * (2 * a) ** i * a**j
    return 4 * 2.3e-16 * max(total, 1.0)


def auto_verify_tols(psi: StreamFunction, f: StressField, d: TriangleDomain, h: float) -> tuple[float, float]:
    """(tol_pde, tol_bc) sized to each backing's honest error budget."""
    if isinstance(psi, PolyStreamFunction):
        # second differences: truncation h^2/12 * 4th derivatives + cancellation
        pts = interior_lattice(d, 15)
        d4x = psi.poly.diff(1, 4).float_evaluator()
        d4y = psi.poly.diff(2, 4).float_evaluator()
        b4 = max((abs(d4x(p.x, p.y)) + abs(d4y(p.x, p.y)) for p in pts), default=0.0)
        trunc = h * h / 12.0 * b4
        cancel = 16 * 2.3e-16 * max(psi.scale(), 1.0) / (h * h)
        tol_pde = 10 * (trunc + cancel) + 1e-12
        tol_bc = max(_poly_roundoff_bound(psi, d), 1e-12)
        return tol_pde, tol_bc
    if isinstance(psi, SinusoidalStreamFunction):
        c = 2 * abs(psi.amplitude) * float(d.a) ** 2 / (9 * math.pi**2)
        return 5e-3 * max(1.0, abs(psi.amplitude) / 5.0), max(1e-13 * c, 1e-300)
    scale = max(psi.scale(), 1e-12)
    return 5e-3 * max(1.0, stress_scale(f, d)), 1e-6 * scale


# ----------------------------------------------------------------------
# SVG rendering

def _svg_marker(kind: str, x: float, y: float, r: float) -> str:
    if kind == CENTER:
        return f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{r:.6f}" fill="#d62728" stroke="none"/>'
    if kind == "saddle":
        return (
            f'<path d="M {x - r:.6f} {y - r:.6f} L {x + r:.6f} {y + r:.6f} '
            f'M {x - r:.6f} {y + r:.6f} L {x + r:.6f} {y - r:.6f}" '
            f'stroke="#2ca02c" stroke-width="{r / 2:.6f}" fill="none"/>'
        )
    return (
        f'<rect x="{x - r / 2:.6f}" y="{y - r / 2:.6f}" width="{r:.6f}" height="{r:.6f}" '
        f'fill="none" stroke="#7f7f7f" stroke-width="{r / 3:.6f}"/>'
    )


def render_flow_svg(d: TriangleDomain, traces, stagnation, width: float = 800.0) -> str:
    """Triangle outline + streamline polylines + stagnation markers.

    Pure shapes, no text, no external assets: byte-stable for a fixed
    input.  World coordinates are y-flipped into screen coordinates.
    """
    a = float(d.a)
    margin = 0.05 * 2 * a
    x0, x1 = -margin, 2 * a + margin
    y0, y1 = -margin, a + margin
    w, h = x1 - x0, y1 - y0
    scale = width / w
    height = h * scale

    def sx(x: float) -> float:
        return (x - x0) * scale

    def sy(y: float) -> float:
        return (y1 - y) * scale

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.6f}" '
        f'viewBox="0 0 {width:.0f} {height:.6f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.6f}" fill="#ffffff"/>',
    ]
    o, va, vb = d.vertices()
    tri = " ".join(f"{sx(float(p.x)):.6f},{sy(float(p.y)):.6f}" for p in (o, va, vb))
    lines.append(f'<polygon points="{tri}" fill="none" stroke="#000000" stroke-width="1.5"/>')
    for tr in traces:
        pts = " ".join(f"{sx(p.x):.6f},{sy(p.y):.6f}" for p in tr.vertices)
        lines.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="0.8"/>')
    r = 0.012 * width
    for sp in stagnation:
        lines.append(_svg_marker(sp.classification, sx(sp.location.x), sy(sp.location.y), r))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# commands

def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensure_outdir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {path} ({exc})")


def _info(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg)


def cmd_check(cfg: RunConfig, quiet: bool = False) -> int:
    _ensure_outdir(cfg.out)
    d = cfg.domain
    stress = build_stress(cfg)
    if cfg.stress.kind == "cosine" and cfg.stress.harmonic % 2 == 0 and not quiet:
        print(f"warning: even harmonic m={cfg.stress.harmonic} is outside the admissible family", file=sys.stderr)
    report = compat_check(stress, d, n_sweep=cfg.n_sweep, tol=cfg.compat_tol)
    _write_json(os.path.join(cfg.out, "compat.json"), report.to_json_dict())
    _info(quiet, f"check: {report.verdict} (max residual {report.max_abs_residual:.3e})")
    return EXIT_OK if report.is_compatible else EXIT_DOMAIN


def _report_table(report) -> str:
    lines = [f"{'check':<24} {'value':>12} {'tolerance':>12}  result"]
    for name, c in sorted(report.checks.items()):
        lines.append(f"{name:<24} {c['value']:>12.3e} {c['tol']:>12.3e}  {'pass' if c['pass'] else 'FAIL'}")
    return "\n".join(lines)


def cmd_solve(cfg: RunConfig, quiet: bool = False) -> int:
    _ensure_outdir(cfg.out)
    d = cfg.domain
    try:
        psi = build_stream_function(cfg)
    except IncompatibleStress as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    f = psi.source_stress
    write_grid_csv(psi, d, cfg.grid_n, os.path.join(cfg.out, "psi.csv"))
    h = 1e-4 * cfg.a
    tol_pde, tol_bc = auto_verify_tols(psi, f, d, h)
    report = verify_solution(psi, f, d, lattice_n=cfg.verify_lattice, tol_pde=tol_pde, tol_bc=tol_bc, fd_h=h)
    _write_json(os.path.join(cfg.out, "verify.json"), report.to_json_dict())
    _info(quiet, _report_table(report))
    return EXIT_OK if report.overall_pass else EXIT_DOMAIN


def default_flow_seeds(cfg: RunConfig, psi: StreamFunction) -> tuple[list[PhysicalPoint], list]:
    """Rings of seeds around each interior recirculation center."""
    d = cfg.domain
    V = velocity_field(psi)
    points = stagnation_points(V, d, seeds_per_axis=cfg.seeds_per_axis)
    seeds = []
    for sp in interior_centers(points, d):
        reach = distance_to_boundary(d, sp.location)
        for frac in (0.25, 0.5, 0.75):
            seeds.append(PhysicalPoint(sp.location.x + frac * reach, sp.location.y))
    return seeds, points


def cmd_flow(cfg: RunConfig, quiet: bool = False) -> int:
    _ensure_outdir(cfg.out)
    d = cfg.domain
    try:
        psi = build_stream_function(cfg)
    except IncompatibleStress as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    V = velocity_field(psi)
    if cfg.seeds is not None:
        seeds = [PhysicalPoint(x, y) for x, y in cfg.seeds]
        points = stagnation_points(V, d, seeds_per_axis=cfg.seeds_per_axis)
    else:
        seeds, points = default_flow_seeds(cfg, psi)
    if all(sp.classification == "degenerate" for sp in points) and points:
        _info(quiet, "flow: null field (velocity vanishes everywhere)")
    traces = [trace_streamline(V, s, step=cfg.stream_step(), max_steps=cfg.max_steps) for s in seeds]
    write_streamlines_csv(traces, psi, os.path.join(cfg.out, "streamlines.csv"))
    write_stagnation_csv(points, os.path.join(cfg.out, "stagnation.csv"))
    with open(os.path.join(cfg.out, "flow.svg"), "w", newline="\n") as fh:
        fh.write(render_flow_svg(d, traces, points))
    closed = sum(1 for t in traces if t.termination == "closed")
    _info(quiet, f"flow: {len(traces)} streamlines ({closed} closed), {len(points)} stagnation points")
    return EXIT_OK


def _u_profile_rows(V, x0: float, n: int) -> list[tuple[float, float]]:
    from .kinematics import u_profile

    return u_profile(V, "x", x0, n)


def cmd_examples(cfg: RunConfig, quiet: bool = False) -> int:
    _ensure_outdir(cfg.out)
    overall_ok = True
    fields = {}
    for name in BUILTIN_NAMES:
        sub = replace(cfg, stress=StressSpec(kind="builtin", name=name), out=os.path.join(cfg.out, name))
        _ensure_outdir(sub.out)
        rc_check = cmd_check(sub, quiet=True)
        rc_solve = cmd_solve(sub, quiet=True)
        rc_flow = cmd_flow(sub, quiet=True)
        ok = rc_check == EXIT_OK and rc_solve == EXIT_OK and rc_flow == EXIT_OK
        overall_ok = overall_ok and ok
        fields[name] = build_stream_function(sub)
        _info(quiet, f"examples/{name}: {'pass' if ok else 'FAIL'}")

    n = 201
    a = cfg.a
    v_lin = velocity_field(fields["linear"])
    v_sin = velocity_field(fields["sinusoidal"])
    lin_rows = _u_profile_rows(v_lin, a, n)
    sin_rows = _u_profile_rows(v_sin, a, n)
    with open(os.path.join(cfg.out, "fig6_u_profiles.csv"), "w", newline="\n") as fh:
        fh.write("y,u_linear,u_sinusoidal\n")
        for (yv, ul), (_, us) in zip(lin_rows, sin_rows):
            fh.write(f"{format_float(yv)},{format_float(ul)},{format_float(us)}\n")

    v_real = velocity_field(fields["realistic"])
    from .kinematics import u_profile

    with open(os.path.join(cfg.out, "fig7_shear_profile.csv"), "w", newline="\n") as fh:
        fh.write("x,u\n")
        for xv, uv in u_profile(v_real, "y", 0.0, n):
            fh.write(f"{format_float(xv)},{format_float(uv)}\n")

    _info(quiet, f"examples: {'all pass' if overall_ok else 'FAILURES PRESENT'}")
    return EXIT_OK if overall_ok else EXIT_DOMAIN


# ----------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-stream",
        description="Stream-function solver for shear-driven flow in a right-triangular cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "admissibility check of the configured stress"),
        ("solve", "solve and export the stream function grid + verification report"),
        ("flow", "trace streamlines, locate stagnation points, render an SVG figure"),
        ("examples", "regenerate the three bundled flow cases end to end"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration")
        p.add_argument("--a", type=float, help="cavity half-base (overrides config)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--grid", type=int, help="grid resolution (overrides config)")
        p.add_argument("--quiet", action="store_true", help="suppress informational output")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handler = {
        "check": cmd_check,
        "solve": cmd_solve,
        "flow": cmd_flow,
        "examples": cmd_examples,
    }[args.command]
    try:
        return handler(cfg, quiet=args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IncompatibleStress as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
