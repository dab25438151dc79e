"""Log-log power-law regression with pass/fail against an expected exponent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError

__all__ = ["PowerLawFit", "fit_power_law"]


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of y = intercept * x**slope on log-log axes.

    ``intercept`` is the amplitude (exp of the log-space offset).  ``passed``
    is True iff |slope - expected| <= tolerance.
    """

    slope: float
    intercept: float
    r_squared: float
    expected: float
    tolerance: float
    passed: bool

    def __post_init__(self) -> None:
        want = abs(self.slope - self.expected) <= self.tolerance
        if self.passed != want:
            raise InputError("passed flag inconsistent with slope and tolerance")


def fit_power_law(
    x: np.ndarray,
    y: np.ndarray,
    expected: float,
    tolerance: float,
) -> PowerLawFit:
    """Regress log y on log x; requires positive data and >= 3 points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("x and y must be 1-D arrays of equal length")
    if x.size < 3:
        raise InputError("power-law fit needs at least 3 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InputError("power-law fit needs positive data")
    lx = np.log(x)
    ly = np.log(y)
    slope, logc = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + logc)
    total = ly - ly.mean()
    denom = float(np.dot(total, total))
    r2 = 1.0 if denom == 0.0 else 1.0 - float(np.dot(resid, resid)) / denom
    return PowerLawFit(
        slope=float(slope),
        intercept=float(np.exp(logc)),
        r_squared=r2,
        expected=float(expected),
        tolerance=float(tolerance),
        passed=bool(abs(slope - expected) <= tolerance),
    )
