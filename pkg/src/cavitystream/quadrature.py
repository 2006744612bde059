"""Tensorized Gauss-Legendre quadrature over axis-aligned rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .geometry import Rect


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss order per axis and number of subdivision cells per axis.

    Order n integrates polynomials of degree 2n-1 exactly per axis;
    subdivision controls oscillatory integrands.
    """

    order: int = 12
    subdivision: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.subdivision < 1:
            raise ValueError("subdivision must be >= 1")


@lru_cache(maxsize=32)
def gauss_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _axis_nodes(lo: float, hi: float, spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_nodes(spec.order)
    cells = np.linspace(lo, hi, spec.subdivision + 1)
    half = np.diff(cells) / 2.0
    mid = (cells[:-1] + cells[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_rect(fn: Callable, rect: Rect, spec: QuadratureSpec) -> float:
    """Integrate fn(t, s) over the rectangle; degenerate rectangles
    contribute exactly zero."""
    t0, t1, s0, s1 = (float(v) for v in rect)
    if t1 <= t0 or s1 <= s0:
        return 0.0
    tn, tw = _axis_nodes(t0, t1, spec)
    sn, sw = _axis_nodes(s0, s1, spec)
    T, S = np.meshgrid(tn, sn, indexing="ij")
    vals = np.asarray(fn(T, S), dtype=float)
    return float(tw @ vals @ sw)


def riemann_rect(fn: Callable, rect: Rect, cells_per_axis: int) -> float:
    """Midpoint Riemann sum, the deliberately low-tech cross-check."""
    t0, t1, s0, s1 = (float(v) for v in rect)
    if t1 <= t0 or s1 <= s0:
        return 0.0
    ht = (t1 - t0) / cells_per_axis
    hs = (s1 - s0) / cells_per_axis
    tn = t0 + ht * (np.arange(cells_per_axis) + 0.5)
    sn = s0 + hs * (np.arange(cells_per_axis) + 0.5)
    T, S = np.meshgrid(tn, sn, indexing="ij")
    vals = np.asarray(fn(T, S), dtype=float)
    return float(vals.sum() * ht * hs)
