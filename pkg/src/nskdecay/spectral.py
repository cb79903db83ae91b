"""Periodic grids, transforms, frequency bands and Sobolev/L^p norms.

Transform normalization follows the continuous Fourier transform
``f_hat(xi) = int f(x) exp(-i x.xi) dx``: on the grid
``f_hat = dx**n * fftn(f)``, so that ``||f||_2**2 = L**-n * sum |f_hat|**2``.

The Nyquist index of each axis is assigned wavenumber 0.  This keeps every
odd multiplier (``i*xi``) and every projector conjugate-symmetric on the
full lattice; smooth data carry no energy there.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .params import DerivedParameters, Regime

FFT_WORKERS = -1


@dataclass(frozen=True)
class Grid:
    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"grid dimension must be 2 or 3, got {self.n}")
        if self.N < 4 or self.N & (self.N - 1):
            raise ValueError(f"points per axis must be a power of two, got {self.N}")
        if not self.L > 0:
            raise ValueError("box length must be positive")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.n

    @property
    def nyquist(self) -> float:
        return math.pi * self.N / self.L

    @property
    def xi_max(self) -> float:
        """Largest retained per-axis wavenumber (the Nyquist index maps to 0)."""
        return 2 * math.pi * (self.N // 2 - 1) / self.L

    @cached_property
    def axis(self) -> np.ndarray:
        """Node coordinates along one axis, centred so that index N/2 is the origin."""
        return (np.arange(self.N) - self.N // 2) * self.dx

    @cached_property
    def x(self) -> np.ndarray:
        return np.array(np.meshgrid(*([self.axis] * self.n), indexing="ij"))

    @cached_property
    def r(self) -> np.ndarray:
        return np.sqrt(np.sum(self.x ** 2, axis=0))

    @cached_property
    def k_int(self) -> np.ndarray:
        k = np.fft.fftfreq(self.N, 1.0 / self.N)
        k[self.N // 2] = 0.0
        return k

    @cached_property
    def xi(self) -> np.ndarray:
        """Wavevectors, shape ``(n, N, ..., N)``."""
        k = 2 * math.pi * self.k_int / self.L
        return np.array(np.meshgrid(*([k] * self.n), indexing="ij"))

    @cached_property
    def xi2(self) -> np.ndarray:
        return np.sum(self.xi ** 2, axis=0)

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(self.xi2)

    @cached_property
    def xi_unit(self) -> np.ndarray:
        """``xi/|xi|`` with the zero mode mapped to the zero vector."""
        safe = np.where(self.xi_norm > 0, self.xi_norm, 1.0)
        return self.xi / safe

    def check_bands_representable(self, dp: DerivedParameters) -> None:
        if dp.regime is Regime.K_EQ_1:
            need = 1.0
        else:
            need = 2.0 * dp.r_deg
        if not self.nyquist > need:
            raise ValueError(
                f"grid Nyquist wavenumber {self.nyquist:.4g} does not exceed {need:.4g}; "
                "the high band is not representable"
            )

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """Boolean mask keeping modes with every ``|k_i| <= fraction * N/2``."""
        kmax = fraction * self.N / 2.0
        keep = np.abs(np.fft.fftfreq(self.N, 1.0 / self.N)) <= kmax
        keep[self.N // 2] = False
        masks = np.meshgrid(*([keep] * self.n), indexing="ij")
        return np.logical_and.reduce(masks)

    def echo(self) -> dict:
        return {"n": self.n, "N": self.N, "L": self.L}


@dataclass
class State:
    """Physical fields: ``phi`` has grid shape, ``m`` has shape ``(n, *grid.shape)``."""

    grid: Grid
    phi: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        if self.phi.shape != self.grid.shape or self.m.shape != (self.grid.n,) + self.grid.shape:
            raise ValueError("field shapes do not match the grid")

    @classmethod
    def zeros(cls, grid: Grid) -> "State":
        return cls(grid, np.zeros(grid.shape), np.zeros((grid.n,) + grid.shape))

    def check_physical(self) -> None:
        if not (np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.m))):
            raise FloatingPointError("non-finite values in state")
        if np.any(1.0 + self.phi <= 0):
            raise ValueError("density positivity violated: 1 + phi <= 0")


@dataclass
class SpectralState:
    grid: Grid
    phi_hat: np.ndarray
    m_hat: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralState":
        return cls(
            grid,
            np.zeros(grid.shape, dtype=complex),
            np.zeros((grid.n,) + grid.shape, dtype=complex),
        )

    def copy(self) -> "SpectralState":
        return SpectralState(self.grid, self.phi_hat.copy(), self.m_hat.copy())

    def __add__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.grid, self.phi_hat + other.phi_hat, self.m_hat + other.m_hat)

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.grid, self.phi_hat - other.phi_hat, self.m_hat - other.m_hat)

    def scale(self, c) -> "SpectralState":
        return SpectralState(self.grid, c * self.phi_hat, c * self.m_hat)

    def multiply(self, w: np.ndarray) -> "SpectralState":
        return SpectralState(self.grid, w * self.phi_hat, w * self.m_hat)

    def symmetry_defect(self) -> float:
        """Max ``|c(-k) - conj c(k)|`` relative to the largest coefficient."""
        worst, scale = 0.0, 0.0
        for arr in (self.phi_hat, *self.m_hat):
            flipped = np.conj(_negate_index(arr))
            worst = max(worst, float(np.max(np.abs(arr - flipped))))
            scale = max(scale, float(np.max(np.abs(arr))))
        return worst / scale if scale > 0 else 0.0


def _negate_index(a: np.ndarray) -> np.ndarray:
    """``a[-k]`` for every axis (index ``j -> (-j) mod N``)."""
    return np.roll(np.flip(a), 1, axis=tuple(range(a.ndim)))


def fft_field(f: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(-grid.n, 0))
    return sfft.fftn(f, axes=axes, workers=FFT_WORKERS) * grid.cell_volume


def ifft_field(fh: np.ndarray, grid: Grid, check_real: float | None = None) -> np.ndarray:
    axes = tuple(range(-grid.n, 0))
    out = sfft.ifftn(fh, axes=axes, workers=FFT_WORKERS) / grid.cell_volume
    if check_real is not None:
        scale = np.max(np.abs(out.real)) if out.size else 0.0
        if np.max(np.abs(out.imag)) > check_real * max(scale, 1e-300):
            raise ValueError("inverse transform has a non-negligible imaginary part")
    return out.real


def to_spectral(state: State) -> SpectralState:
    g = state.grid
    if state.phi.shape != g.shape:
        raise ValueError("size mismatch between state and grid")
    return SpectralState(g, fft_field(state.phi, g), fft_field(state.m, g))


def to_physical(spec: SpectralState) -> State:
    g = spec.grid
    if spec.phi_hat.shape != g.shape:
        raise ValueError("size mismatch between spectral state and grid")
    return State(g, ifft_field(spec.phi_hat, g), ifft_field(spec.m_hat, g))


# ---------------------------------------------------------------- bands


class Band(str, enum.Enum):
    LOW = "low"
    MID = "mid"
    HIGH = "high"
    PINF = "pinf"
    ALL = "all"
    # aliases
    P1 = "low"
    LOW_ONLY_P1 = "low"
    HIGH_ONLY_Pinf = "pinf"


def smooth_step(r, r_in: float, r_out: float):
    """C-infinity profile equal to 1 for ``r <= r_in`` and 0 for ``r >= r_out``."""
    s = np.clip((r_out - np.asarray(r, dtype=float)) / (r_out - r_in), 0.0, 1.0)

    def e(z):
        with np.errstate(divide="ignore"):
            return np.where(z > 0, np.exp(-1.0 / np.where(z > 0, z, 1.0)), 0.0)

    a, b = e(s), e(1.0 - s)
    return a / (a + b)


@dataclass(frozen=True)
class BandRadii:
    low_in: float
    low_out: float
    high_in: float
    high_out: float
    case: str


def band_radii(dp: DerivedParameters) -> BandRadii:
    """Transition radii of the cut-offs: ``phi_1`` falls over ``[low_in, low_out]``,
    ``phi_inf`` rises over ``[high_in, high_out]``."""
    if dp.regime is Regime.K_EQ_1:
        return BandRadii(0.5, 1.0, 0.5, 1.0, "K=1")
    r = dp.r_deg
    if r / 2 > 1:
        lo = (0.5, 1.0, "r/2>1")
    elif 1 < r / math.sqrt(2):
        lo = (r / 2, 1.0, "r/2<=1<r/sqrt2")
    else:
        lo = (r / 2, r / math.sqrt(2), "r/sqrt2<=1")
    return BandRadii(lo[0], lo[1], math.sqrt(2) * r, 2 * r, lo[2])


@dataclass
class BandDecomposition:
    w1: np.ndarray
    wM: np.ndarray
    wInf: np.ndarray
    radii: BandRadii

    def weight(self, band: Band) -> np.ndarray | float:
        band = Band(band)
        if band is Band.LOW:
            return self.w1
        if band is Band.MID:
            return self.wM
        if band is Band.HIGH:
            return self.wInf
        if band is Band.PINF:
            return self.wM + self.wInf
        return 1.0


def band_weights(xi_norm, dp: DerivedParameters):
    """Evaluate ``(phi_1, phi_M, phi_inf)`` at arbitrary ``|xi|`` values."""
    rad = band_radii(dp)
    w1 = smooth_step(xi_norm, rad.low_in, rad.low_out)
    if dp.regime is Regime.K_EQ_1:
        winf = 1.0 - w1
        wM = np.zeros_like(w1)
    else:
        winf = 1.0 - smooth_step(xi_norm, rad.high_in, rad.high_out)
        wM = 1.0 - w1 - winf
    return w1, wM, winf, rad


def build_bands(grid: Grid, dp: DerivedParameters) -> BandDecomposition:
    grid.check_bands_representable(dp)
    w1, wM, winf, rad = band_weights(grid.xi_norm, dp)
    return BandDecomposition(w1, wM, winf, rad)


def project_band(spec: SpectralState, band: Band, bands: BandDecomposition) -> SpectralState:
    w = bands.weight(band)
    if np.ndim(w) and w.shape != spec.grid.shape:
        raise ValueError("bands were built on a different grid")
    return spec.multiply(w)


def helmholtz_split(spec: SpectralState) -> tuple[SpectralState, SpectralState]:
    """Split ``m_hat`` into ``xi (xi . m_hat)/|xi|^2`` and the divergence-free rest.

    ``phi_hat`` travels with the longitudinal part so the two returned
    states sum to the input.  The zero mode of ``m`` is transverse.
    """
    e = spec.grid.xi_unit
    a = np.sum(e * spec.m_hat, axis=0)
    m_long = e * a
    longitudinal = SpectralState(spec.grid, spec.phi_hat.copy(), m_long)
    transverse = SpectralState(spec.grid, np.zeros_like(spec.phi_hat), spec.m_hat - m_long)
    return longitudinal, transverse


# ---------------------------------------------------------------- norms


def _weighted_sq(fh: np.ndarray, w) -> float:
    return float(np.sum(w * (fh.real ** 2 + fh.imag ** 2)))


def sobolev_norm(spec: SpectralState, s_phi: int, s_m: int) -> float:
    """``(||phi||_{H^s_phi}^2 + ||m||_{H^s_m}^2)^(1/2)`` with weights ``(1+|xi|^2)^s``."""
    if s_phi < 0 or s_m < 0:
        raise ValueError("Sobolev orders must be nonnegative")
    g = spec.grid
    base = 1.0 + g.xi2
    tot = _weighted_sq(spec.phi_hat, base ** s_phi)
    wm = base ** s_m
    for comp in spec.m_hat:
        tot += _weighted_sq(comp, wm)
    return math.sqrt(tot / g.L ** g.n)


def gradient_sq_norm(fh: np.ndarray, grid: Grid, s: int) -> float:
    """``||grad f||_{H^s}^2`` for a scalar or vector spectral field."""
    w = grid.xi2 * (1.0 + grid.xi2) ** s
    arrs = fh if fh.ndim == grid.n + 1 else [fh]
    return sum(_weighted_sq(a, w) for a in arrs) / grid.L ** grid.n


def lp_norm(f: np.ndarray, grid: Grid, p: float) -> float:
    """Rectangle-rule ``L^p`` norm; vector fields (leading axis ``n``) use the
    pointwise Euclidean magnitude."""
    a = np.abs(f) if f.ndim == grid.n else np.sqrt(np.sum(f ** 2, axis=0))
    if math.isinf(p):
        return float(np.max(a))
    if p == 1:
        return float(np.sum(a) * grid.cell_volume)
    return float((np.sum(a ** p) * grid.cell_volume) ** (1.0 / p))


def state_lp_norm(state: State, p: float) -> float:
    """``(||phi||_p^2 + ||m||_p^2)^(1/2)``."""
    return math.hypot(lp_norm(state.phi, state.grid, p), lp_norm(state.m, state.grid, p))


def grad_field(fh: np.ndarray, grid: Grid) -> np.ndarray:
    """Physical-space gradient of a scalar spectral field."""
    return ifft_field(1j * grid.xi * fh, grid)
