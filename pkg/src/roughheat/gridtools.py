"""Grid construction helpers for scan and quadrature node placement."""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError


def loggrid(lo: float, hi: float, per_decade: int = 16) -> np.ndarray:
    """Log-spaced grid with a fixed node density per decade, endpoints included."""
    if not (0 < lo < hi):
        raise DomainError(f"loggrid needs 0 < lo < hi, got [{lo}, {hi}]")
    n = max(2, int(np.ceil(np.log10(hi / lo) * per_decade)) + 1)
    return np.geomspace(lo, hi, n)


def cluster_grid(
    centers: np.ndarray | list[float],
    inner: float,
    outer: float,
    n_side: int,
) -> np.ndarray:
    """Nodes geometrically clustered around each center, sorted and deduplicated.

    Around every center c the grid contains c plus/minus a geometric ladder of
    offsets from ``inner`` to ``outer``. Integrands in this package peak at a
    finite set of known points and decay polynomially between them, so a union
    of per-center ladders resolves all features at trapezoid-friendly density.
    """
    if not (0 < inner < outer):
        raise DomainError("cluster_grid needs 0 < inner < outer")
    offs = np.geomspace(inner, outer, n_side)
    pts = [np.asarray(centers, dtype=float)]
    for c in np.atleast_1d(np.asarray(centers, dtype=float)):
        pts.append(c + offs)
        pts.append(c - offs)
    out = np.unique(np.concatenate(pts))
    return out


def graded_abs_grid(core_half: float, core_n: int, tail_hi: float, per_decade: int = 40) -> np.ndarray:
    """Symmetric grid: uniform core on [-core_half, core_half], log tails to tail_hi."""
    if core_n < 2 or tail_hi <= core_half:
        raise DomainError("graded_abs_grid needs core_n >= 2 and tail_hi > core_half")
    core = np.linspace(-core_half, core_half, core_n)
    tail = loggrid(core_half, tail_hi, per_decade)[1:]
    return np.unique(np.concatenate([-tail[::-1], core, tail]))


def require_uniform(xs: np.ndarray, rtol: float = 1e-9) -> float:
    """Return the spacing of a uniform grid, or raise DomainError."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise DomainError("grid must be one-dimensional with at least 2 points")
    d = np.diff(xs)
    dx = float(d[0])
    if dx <= 0 or not np.allclose(d, dx, rtol=rtol, atol=0.0):
        raise DomainError("grid must be uniform and increasing")
    return dx
