"""Decay series, log-log exponent fits and the table of expected exponents."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

EXPONENT_TOL = 0.15
L1_GROWTH_TOL = 0.2
MIN_R2 = 0.95
MIN_FIT_SAMPLES = 8


class BoundType(str, enum.Enum):
    UPPER_BOUND = "UPPER_BOUND"
    EXPECTED_SHARP = "EXPECTED_SHARP"


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    REPORTED = "REPORTED"  # measured only, no claim to check


@dataclass
class DecaySeries:
    quantity: str
    times: np.ndarray
    values: np.ndarray
    fit_window: tuple[float, float] | None = None
    fitted_exponent: float | None = None
    fit_r2: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def fit(self, window: tuple[float, float] | None = None) -> "DecaySeries":
        if window is not None:
            self.fit_window = (float(window[0]), float(window[1]))
        self.fitted_exponent, self.fit_r2 = fit_exponent(self)
        return self

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "fitted_exponent": self.fitted_exponent,
            "fit_r2": self.fit_r2,
            "meta": self.meta,
        }


def fit_exponent(series: DecaySeries) -> tuple[float, float]:
    """Least-squares slope of ``log(value)`` against ``log(1 + t)`` on the fit window."""
    t, v = series.times, series.values
    if series.fit_window is not None:
        lo, hi = series.fit_window
        sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
        t, v = t[sel], v[sel]
    if t.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples in the fit window, got {t.size}")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("values must be positive and finite on the fit window")
    x = np.log1p(t)
    y = np.log(v)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    resid = y - (ym + slope * (x - xm))
    syy = np.sum((y - ym) ** 2)
    # a flat series leaves only round-off in syy; treat it as an exact fit
    flat = syy <= (64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))) ** 2 * y.size
    r2 = 1.0 if flat else float(max(0.0, 1.0 - np.sum(resid ** 2) / syy))
    return slope, min(r2, 1.0)


def log_ladder(t0: float, t1: float, count: int) -> np.ndarray:
    return np.geomspace(t0, t1, count)


def default_window(t_max: float) -> tuple[float, float]:
    return (0.2 * t_max, 0.9 * t_max)


# ---------------------------------------------------------------- theory


@dataclass(frozen=True)
class TheoryEntry:
    exponent: Fraction
    bound: BoundType
    log_factor: bool = False
    source: str = ""

    def as_float(self) -> float:
        return float(self.exponent)


def _half(x) -> Fraction:
    return Fraction(x, 2)


def theory_exponent(
    quantity: str,
    n: int,
    k: int = 0,
    alpha_order: int = 0,
    p: float | None = None,
    q: float | None = None,
) -> TheoryEntry:
    """Expected decay (negative) or growth (positive) exponent of a measured norm.

    Exponents are exact rationals.  Unknown quantities, and queries outside
    a statement's hypotheses (such as ``L^1`` growth in even dimension),
    raise ``KeyError``.
    """
    if n not in (2, 3):
        raise KeyError(f"dimension {n} outside the table")
    d = Fraction(k + alpha_order, 2)
    up, sharp = BoundType.UPPER_BOUND, BoundType.EXPECTED_SHARP
    if quantity == "phi_low_Linf":
        return TheoryEntry(-Fraction(3 * n - 1, 4) - d, sharp, source="linear low band, density, L-infinity")
    if quantity == "m_low_Linf":
        return TheoryEntry(-_half(n) - d, up, source="linear low band, momentum, L-infinity")
    if quantity == "comparator_residual_Linf":
        return TheoryEntry(-Fraction(3 * n - 1, 4) - d, up, source="distance to heat-evolved solenoidal data")
    if quantity == "u_low_L1":
        if n % 2 == 0:
            raise KeyError("L1 growth is stated for odd dimensions only")
        return TheoryEntry(Fraction(n - 1, 4) - d, sharp, source="linear low band, L1")
    if quantity == "u_low_Lp_from_Lq":
        if p is None or q is None or not (1 <= q <= 2 <= p):
            raise KeyError("u_low_Lp_from_Lq needs 1 <= q <= 2 <= p")
        inv_p = Fraction(0) if math.isinf(p) else Fraction(1) / Fraction(p).limit_denominator()
        inv_q = Fraction(1) / Fraction(q).limit_denominator()
        return TheoryEntry(-_half(n) * (inv_q - inv_p) - d, up, source="linear low band, Lp-Lq")
    if quantity == "kernel_Kpsi_Linf":
        return TheoryEntry(-Fraction(3 * n - 3, 4) - d, up, source="low-band kernel sup norm")
    if quantity == "nl_phi_Linf":
        return TheoryEntry(-Fraction(3 * n - 1, 4), up, source="nonlinear density, L-infinity")
    if quantity == "nl_m_Linf":
        return TheoryEntry(-_half(n), up, source="nonlinear momentum, L-infinity")
    if quantity == "nl_u_L2_grad_k":
        if k not in (0, 1):
            raise KeyError("gradient order must be 0 or 1")
        return TheoryEntry(-Fraction(n, 4) - Fraction(k, 2), up, source="nonlinear L2 of k-th gradient")
    if quantity == "diff_nl_lin_Linf":
        return TheoryEntry(-_half(n) - Fraction(1, 2), up, log_factor=(n == 2), source="nonlinear minus linear")
    if quantity == "u_nl_L1":
        if n % 2 == 0:
            raise KeyError("L1 growth is stated for odd dimensions only")
        return TheoryEntry(Fraction(n - 1, 4), up, source="nonlinear L1")
    raise KeyError(f"unknown quantity {quantity!r}")


def verdict(
    fitted: float,
    r2: float,
    entry: TheoryEntry,
    tol: float = EXPONENT_TOL,
    min_r2: float = MIN_R2,
) -> Verdict:
    if r2 < min_r2:
        return Verdict.INCONCLUSIVE
    th = entry.as_float()
    if entry.bound is BoundType.UPPER_BOUND:
        ok = fitted <= th + tol
    else:
        ok = abs(fitted - th) <= tol
    return Verdict.PASS if ok else Verdict.FAIL
