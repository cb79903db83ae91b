"""Physical-space Green-matrix kernels of the linear solution operator.

A slice is the inverse transform of one entry of the Fourier-space
solution matrix, filtered by a frequency band and multiplied by
``(i xi)^alpha``.  Time derivatives act on the exponential basis
analytically (``d/dt exp(Mt) = M exp(Mt)``), never by differencing in t.
Values are stored with the origin at grid index ``N/2``, matching
``Grid.x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .decay import DecaySeries, default_window
from .params import DerivedParameters
from .propagator import LinearOperator, pair_power_times, semigroup_pair
from .spectral import Band, Grid, band_weights, fft_field, ifft_field

COMPONENTS = ("L11", "L12", "L21", "L22", "K_psi")


@dataclass
class KernelSlice:
    component: str
    band: Band
    t: float
    values: np.ndarray
    k: int
    alpha: tuple
    index: tuple
    grid: Grid

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.grid.cell_volume)

    def radial_profile(self, bins: int | None = None):
        """Bin-averaged ``|values|`` against radius (for CSV export)."""
        g = self.grid
        r = g.r.ravel()
        v = np.abs(self.values).ravel()
        bins = bins or g.N // 2
        edges = np.linspace(0.0, g.L / 2, bins + 1)
        idx = np.clip(np.digitize(r, edges) - 1, 0, bins - 1)
        inside = r < g.L / 2
        s = np.bincount(idx[inside], weights=v[inside], minlength=bins)
        c = np.bincount(idx[inside], minlength=bins)
        centres = 0.5 * (edges[1:] + edges[:-1])
        with np.errstate(invalid="ignore"):
            return centres, np.where(c > 0, s / np.maximum(c, 1), 0.0)


def heat_kernel(t: float, x, nu: float, n: int):
    """``(4 pi nu t)^(-n/2) exp(-|x|^2/(4 nu t))``; ``x`` has components on axis 0."""
    if not t > 0:
        raise ValueError("heat kernel needs t > 0")
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x ** 2, axis=0) if x.ndim else x ** 2
    return (4 * math.pi * nu * t) ** (-n / 2) * np.exp(-r2 / (4 * nu * t))


def _band_weight(grid: Grid, dp: DerivedParameters, band: Band):
    band = Band(band)
    if band is Band.ALL:
        return 1.0
    w1, wM, wInf, _ = band_weights(grid.xi_norm, dp)
    return {Band.LOW: w1, Band.MID: wM, Band.HIGH: wInf, Band.PINF: wM + wInf}[band]


def kernel_multiplier(
    component: str,
    band: Band,
    t: float,
    k: int,
    alpha: Sequence[int],
    grid: Grid,
    dp: DerivedParameters,
    index: tuple = (),
    psi: Callable[[np.ndarray], np.ndarray] | None = None,
    op: LinearOperator | None = None,
) -> np.ndarray:
    """Fourier multiplier of a kernel slice (see ``kernel_slice``)."""
    if component not in COMPONENTS:
        raise ValueError(f"unknown kernel component {component!r}")
    band = Band(band)
    if band in (Band.HIGH, Band.PINF, Band.MID, Band.ALL) and t <= 0:
        raise ValueError("kernels containing high frequencies are singular at t = 0")
    if t < 0:
        raise ValueError("t must be nonnegative")
    op = op or LinearOperator(grid, dp)
    alpha_, g_ = semigroup_pair(op.lam_p, op.lam_m, t)
    a_k, g_k = pair_power_times(k, (alpha_, g_), op.tau, op.delta)
    xi = grid.xi
    e = grid.xi_unit
    x2 = grid.xi2

    if component == "L11":
        mult = a_k
    elif component == "K_psi":
        mult = g_k * (psi(e) if psi is not None else 1.0)
    elif component == "L12":
        (j,) = index
        mult = -1j * dp.gamma * xi[j] * g_k
    elif component == "L21":
        (j,) = index
        mult = -1j * xi[j] * (dp.gamma + dp.kappa0 * x2) * g_k
    else:
        j, l = index
        heat = (-dp.nu * x2) ** k * np.exp(-dp.nu * x2 * t)
        m22 = a_k + g_k * op.tau
        eye = 1.0 if j == l else 0.0
        mult = heat * eye + (m22 - heat) * e[j] * e[l]

    mult = mult * _band_weight(grid, dp, band)
    for axis, order in enumerate(alpha or ()):
        if order:
            mult = mult * (1j * xi[axis]) ** order
    return mult


def kernel_slice(
    component: str,
    band: Band,
    t: float,
    k: int = 0,
    alpha: Sequence[int] | None = None,
    *,
    grid: Grid,
    dp: DerivedParameters,
    index: tuple = (),
    psi: Callable[[np.ndarray], np.ndarray] | None = None,
    op: LinearOperator | None = None,
) -> KernelSlice:
    """Physical-space kernel ``F^-1[(i xi)^alpha d_t^k (entry) * band weight]``.

    ``index`` selects the entry of the vector (``L12``, ``L21``) or matrix
    (``L22``) valued kernels.  ``psi`` is a function of ``xi/|xi|`` used by
    ``K_psi``; it defaults to 1.
    """
    alpha = tuple(alpha) if alpha else (0,) * grid.n
    mult = kernel_multiplier(component, band, t, k, alpha, grid, dp, index, psi, op)
    vals = ifft_field(mult, grid, check_real=1e-10)
    return KernelSlice(component, Band(band), t, np.fft.fftshift(vals), k, alpha, tuple(index), grid)


def convolve(kernel: KernelSlice, field: np.ndarray) -> np.ndarray:
    """Periodic ``kernel * field`` by the rectangle rule (computed through FFTs)."""
    g = kernel.grid
    kh = fft_field(np.fft.ifftshift(kernel.values), g)
    return ifft_field(kh * fft_field(field, g), g)


def horizon(grid: Grid, dp: DerivedParameters) -> float:
    """Latest time before acoustic fronts from the origin wrap around the box."""
    return grid.L / (4.0 * dp.gamma)


def sup_norm_decay(
    times: Sequence[float],
    grid: Grid,
    dp: DerivedParameters,
    component: str = "K_psi",
    k: int = 0,
    alpha: Sequence[int] | None = None,
    band: Band = Band.LOW,
    window: tuple[float, float] | None = None,
    psi=None,
) -> DecaySeries:
    """Sup-norm time series of a kernel slice with a fitted log-log exponent."""
    times = np.asarray(times, dtype=float)
    t_max = horizon(grid, dp)
    if times.max() > t_max * (1 + 1e-12):
        raise ValueError(f"time ladder exceeds the wrap-around horizon {t_max:g}")
    op = LinearOperator(grid, dp)
    vals = [
        kernel_slice(component, band, float(t), k, alpha, grid=grid, dp=dp, psi=psi, op=op).sup()
        for t in times
    ]
    order = int(k + sum(alpha or ()))
    name = f"{component}_{Band(band).value}_Linf_k{k}_a{order}"
    s = DecaySeries(name, times, np.array(vals), window or default_window(float(times.max())))
    s.meta = {"component": component, "band": Band(band).value, "k": k, "alpha": list(alpha or [])}
    return s.fit()


def front_mass_fraction(ks: KernelSlice, gamma: float, c_d: float = 3.0) -> float:
    """Fraction of the kernel's L1 mass outside the acoustic shell
    ``|x| in [0.5 gamma t, 1.5 gamma t]`` and the diffusive core ``|x| <= c_d sqrt(t)``."""
    r = ks.grid.r
    t = ks.t
    a = np.abs(ks.values)
    inside = ((r >= 0.5 * gamma * t) & (r <= 1.5 * gamma * t)) | (r <= c_d * math.sqrt(t))
    total = a.sum()
    return float(a[~inside].sum() / total) if total > 0 else 0.0
