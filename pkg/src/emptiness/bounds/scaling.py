"""
Emptiness Scaling Fits

Least-squares fits of measured EFP values to log EFP = log C - c L^nu.

Two modes: ``fixed`` pins nu to d + 1, ``free`` fits it and attaches a
percentile bootstrap interval.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import OptimizeWarning, curve_fit

from ..core.errors import ConvergenceError, ValidationError

MIN_POINTS = 4
BOOTSTRAP_RESAMPLES = 200
DECAY_TOL = 1e-9
FIT_MODES = ("fixed", "free")


@dataclass
class ScalingFit:
    """Fitted log EFP = log C - c L^nu."""
    l_values: List[float]
    log_efp: List[float]
    log_c: float
    c: float
    nu: float
    mode: str
    nu_interval: Optional[Tuple[float, float]] = None
    residuals: List[float] = field(default_factory=list)
    excluded: int = 0

    @property
    def decaying(self) -> bool:
        return self.c > DECAY_TOL

    def predict(self, l_values: Sequence[float]) -> np.ndarray:
        """Fitted log EFP at ``l_values``."""
        return self.log_c - self.c * np.power(np.asarray(l_values, dtype=float), self.nu)

    def to_dict(self):
        return {
            "log_c": self.log_c,
            "c": self.c,
            "nu": self.nu,
            "mode": self.mode,
            "nu_interval": list(self.nu_interval) if self.nu_interval else None,
            "decaying": self.decaying,
            "excluded": self.excluded,
        }

    def to_csv(self) -> str:
        """Columns L, efp, fitted, for plotting."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["L", "efp", "fitted"])
        for l, log_value, fitted in zip(self.l_values, self.log_efp, self.predict(self.l_values)):
            writer.writerow([f"{l:g}", repr(math.exp(log_value)), repr(math.exp(float(fitted)))])
        return buffer.getvalue()


def _model_free(l, log_c, c, nu):
    return log_c - c * np.power(l, nu)


def _fit_fixed(l: np.ndarray, y: np.ndarray, nu: float) -> Tuple[float, float]:
    design = np.column_stack([np.ones_like(l), -np.power(l, nu)])
    (log_c, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(log_c), float(c)


def _fit_free(l: np.ndarray, y: np.ndarray, start: Tuple[float, float, float]) -> Tuple[float, float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        params, _ = curve_fit(_model_free, l, y, p0=start, maxfev=20000)
    return float(params[0]), float(params[1]), float(params[2])


def _bootstrap_nu(
    l: np.ndarray,
    y: np.ndarray,
    start: Tuple[float, float, float],
    resamples: int,
    seed: Optional[int]
) -> Optional[Tuple[float, float]]:
    rng = np.random.default_rng(seed)
    estimates = []
    for _ in range(resamples):
        pick = rng.integers(len(l), size=len(l))
        if len(np.unique(l[pick])) < 3:
            continue
        try:
            _, c, nu = _fit_free(l[pick], y[pick], start)
        except RuntimeError:
            continue
        if c > DECAY_TOL and np.isfinite(nu):
            estimates.append(nu)
    if len(estimates) < 2:
        logger.warning("Bootstrap produced too few usable fits; no interval for nu")
        return None
    low, high = np.percentile(estimates, [2.5, 97.5])
    return float(low), float(high)


def fit_scaling(
    points: Sequence[Tuple[float, float]],
    d: int = 1,
    mode: str = "free",
    resamples: int = BOOTSTRAP_RESAMPLES,
    seed: Optional[int] = 0
) -> ScalingFit:
    """
    Fit (L, EFP) points to log EFP = log C - c L^nu.

    Points with EFP <= 0 are dropped with a warning. The free fit starts
    from the fixed fit with nu = d + 1; a fit with c ~ 0 is reported as
    non-decaying and keeps nu = d + 1 without an interval.

    Args:
        points: (L, EFP) pairs
        d: Dimension; the fixed exponent is d + 1
        mode: ``fixed`` or ``free``
        resamples: Bootstrap resamples for the free exponent
        seed: Bootstrap seed

    Returns:
        ScalingFit

    Raises:
        ValidationError: On an unknown mode or fewer than four usable points
        ConvergenceError: If the least-squares solver fails
    """
    if mode not in FIT_MODES:
        raise ValidationError(f"fit mode must be one of {FIT_MODES}, got {mode!r}")
    data = np.asarray(points, dtype=float).reshape(-1, 2)
    positive = data[:, 1] > 0
    excluded = int((~positive).sum())
    if excluded:
        logger.warning(f"Excluding {excluded} point(s) with nonpositive EFP from the fit")
    data = data[positive]
    if len(data) < MIN_POINTS:
        raise ValidationError(f"scaling fit needs at least {MIN_POINTS} points with EFP > 0, got {len(data)}")
    order = np.argsort(data[:, 0], kind="stable")
    l, y = data[order, 0], np.log(data[order, 1])

    # fit around the mean so a common EFP factor only moves log C
    offset = float(y.mean())
    centred = y - offset
    nu_fixed = float(d + 1)
    try:
        log_c, c = _fit_fixed(l, centred, nu_fixed)
        nu, interval = nu_fixed, None
        if mode == "free" and c > DECAY_TOL:
            log_c, c, nu = _fit_free(l, centred, (log_c, c, nu_fixed))
            interval = _bootstrap_nu(l, centred, (log_c, c, nu), resamples, seed)
    except RuntimeError as e:
        raise ConvergenceError(f"scaling fit did not converge: {e}") from e
    log_c += offset

    fit = ScalingFit(
        l_values=l.tolist(),
        log_efp=y.tolist(),
        log_c=log_c,
        c=c,
        nu=nu,
        mode=mode,
        nu_interval=interval,
        excluded=excluded,
    )
    fit.residuals = (y - fit.predict(l)).tolist()
    if not fit.decaying:
        logger.warning(f"EFP does not decay with L (c = {c:.3e}); scaling fit flagged non-decaying")
    else:
        logger.info(f"Scaling fit ({mode}): log C = {log_c:.4f}, c = {c:.4f}, nu = {nu:.4f}")
    return fit
