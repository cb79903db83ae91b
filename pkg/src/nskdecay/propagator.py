"""Exact Fourier-mode solution operator of the linearized system.

Per wavevector ``xi`` the transverse part of ``m_hat`` decays with
``exp(-nu |xi|^2 t)`` and the pair ``(phi_hat, b)``, ``b = (xi/|xi|) . m_hat``,
obeys ``d/dt (phi_hat, b) = M (phi_hat, b)`` with

    M = [[0,                           -i gamma |xi|     ],
         [-i (gamma + kappa0 |xi|^2)|xi|, -(nu + nu_tilde)|xi|^2]]

whose eigenvalues are ``lambda_+-``.  Every analytic function of ``M`` is
``p*I + q*M`` (Cayley-Hamilton), and all functions here are carried as
such ``(p, q)`` pairs, with ``M^2 = tau*M - delta*I``,
``tau = lambda_+ + lambda_-`` and ``delta = lambda_+ * lambda_-``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedParameters, Regime
from .spectral import Band, BandDecomposition, Grid, SpectralState, State, project_band, to_physical, to_spectral

# switch to the sinhc form when |(lambda_+ - lambda_-) t / 2| < 1
CONFLUENT_SWITCH = 1.0


def _as_coeffs(dp: DerivedParameters):
    return dict(gamma=dp.gamma, kappa0=dp.kappa0, nu=dp.nu, nu_tilde=dp.nu_tilde)


def _lambda_pm(xi2, gamma, kappa0, nu, nu_tilde):
    xi2 = np.asarray(xi2, dtype=float)
    A = 0.5 * (nu + nu_tilde)
    disc = (A * xi2) ** 2 - (gamma ** 2 * xi2 + kappa0 * gamma * xi2 ** 2)
    root = np.where(disc >= 0, np.sqrt(np.abs(disc)) + 0j, 1j * np.sqrt(np.abs(disc)))
    lam_p = -A * xi2 - root
    prod = gamma ** 2 * xi2 + kappa0 * gamma * xi2 ** 2
    # real roots: the small one from the product, avoiding cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_m = np.where(
            (disc > 0) & (lam_p != 0), prod / np.where(lam_p != 0, lam_p, 1.0), -A * xi2 + root
        )
    return lam_p, lam_m


def lambda_pm(xi_norm, dp: DerivedParameters):
    """Characteristic roots ``lambda_+, lambda_-`` at ``|xi|`` (scalar or array).

    ``lambda_-`` is the less negative root when real and the root with
    positive imaginary part when complex.
    """
    lp, lm = _lambda_pm(np.square(xi_norm), **_as_coeffs(dp))
    if np.ndim(lp) == 0:
        return complex(lp), complex(lm)
    return lp, lm


def _sinhc(z):
    z = np.asarray(z, dtype=complex)
    safe = np.where(z == 0, 1.0, z)
    return np.where(z == 0, 1.0 + 0j, np.sinh(safe) / safe)


def semigroup_pair(lam_p, lam_m, t):
    """``exp(M t) = alpha*I + g*M``; ``g`` is ``(e^{l+ t} - e^{l- t})/(l+ - l-)``
    and ``alpha`` is ``(l+ e^{l- t} - l- e^{l+ t})/(l+ - l-)``."""
    lam_p = np.asarray(lam_p, dtype=complex)
    lam_m = np.asarray(lam_m, dtype=complex)
    t = np.asarray(t, dtype=float)
    c = 0.5 * (lam_p + lam_m)
    d = 0.5 * (lam_p - lam_m)
    dt = d * t
    near = np.abs(dt) < CONFLUENT_SWITCH
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        ect = np.exp(c * t)
        dts = np.where(near, dt, 0.0)
        g_near = ect * t * _sinhc(dts)
        a_near = ect * np.cosh(dts) - c * g_near
        ep = np.exp(lam_p * t)
        em = np.exp(lam_m * t)
        den = np.where(near, 1.0, lam_p - lam_m)
        g_far = (ep - em) / den
        a_far = (lam_p * em - lam_m * ep) / den
    g = np.where(near, g_near, g_far)
    alpha = np.where(near, a_near, a_far)
    return alpha, g


def pair_mul(a, b, tau, delta):
    """Product of ``a0*I + a1*M`` and ``b0*I + b1*M``."""
    a0, a1 = a
    b0, b1 = b
    return (a0 * b0 - a1 * b1 * delta, a0 * b1 + a1 * b0 + a1 * b1 * tau)


def pair_power_times(k: int, pair, tau, delta):
    """``M^k (p*I + q*M)``."""
    out = pair
    for _ in range(k):
        out = pair_mul((0.0, 1.0), out, tau, delta)
    return out


def phi_scalar(k: int, z):
    """``phi_k(z) = sum_m z^m/(m+k)!`` for ``k = 0, 1, 2``."""
    z = np.asarray(z, dtype=complex)
    if k == 0:
        return np.exp(z)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    series = np.zeros_like(z)
    for m in range(24, -1, -1):
        series = series * zs + 1.0 / math.factorial(m + k)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zb = np.where(small, 1.0, z)
        direct = (np.exp(zb) - 1.0) / zb
        if k == 2:
            direct = (direct - 1.0) / zb
    return np.where(small, series, direct)


def phi_pairs(lam_p, lam_m, h: float):
    """``phi_1(hM)`` and ``phi_2(hM)`` as ``(p, q)`` pairs in the basis ``(I, M)``."""
    lam_p = np.asarray(lam_p, dtype=complex)
    lam_m = np.asarray(lam_m, dtype=complex)
    tau = lam_p + lam_m
    delta = lam_p * lam_m
    zp, zm = h * lam_p, h * lam_m
    rho = np.maximum(np.abs(zp), np.abs(zm))
    sep = np.abs(zp - zm)

    taylor = rho < 1.0
    eigen = ~taylor & (sep >= 0.1)
    invert = ~taylor & ~eigen

    out = []
    for k in (1, 2):
        # Horner in the pair algebra, Z = h*M
        p = np.full(tau.shape, 1.0 / math.factorial(24 + k), dtype=complex)
        q = np.zeros(tau.shape, dtype=complex)
        tau_t = np.where(taylor, tau, 0.0)
        delta_t = np.where(taylor, delta, 0.0)
        for m in range(23, -1, -1):
            p, q = -h * q * delta_t + 1.0 / math.factorial(m + k), h * (p + q * tau_t)
        fp, fm = phi_scalar(k, zp), phi_scalar(k, zm)
        with np.errstate(divide="ignore", invalid="ignore"):
            den = np.where(eigen, zp - zm, 1.0)
            b = (fp - fm) / den
            a = (zp * fm - zm * fp) / den
        p = np.where(eigen, a, p)
        q = np.where(eigen, b * h, q)
        out.append([p, q])

    if np.any(invert):
        lp, lm = lam_p[invert], lam_m[invert]
        tau_i, delta_i = lp + lm, lp * lm
        alpha, g = semigroup_pair(lp, lm, h)
        zinv = (tau_i / (h * delta_i), -1.0 / (h * delta_i))
        p1 = pair_mul(zinv, (alpha - 1.0, g), tau_i, delta_i)
        p2 = pair_mul(zinv, (p1[0] - 1.0, p1[1]), tau_i, delta_i)
        for (p, q), val in zip(out, (p1, p2)):
            p[invert] = val[0]
            q[invert] = val[1]
    return tuple((p, q) for p, q in out)


@dataclass
class ModeSemigroup:
    lambda_plus: complex
    lambda_minus: complex
    longitudinal_matrix: np.ndarray  # acts on (phi_hat, xi . m_hat)
    transverse_factor: float


def mode_semigroup(xi, t: float, dp: DerivedParameters) -> ModeSemigroup:
    if t < 0:
        raise ValueError("t must be nonnegative")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x2 = float(xi @ xi)
    lp, lm = lambda_pm(math.sqrt(x2), dp)
    if x2 == 0.0:
        # a = xi . m_hat vanishes identically, so the coupling entry is moot
        return ModeSemigroup(lp, lm, np.eye(2, dtype=complex), 1.0)
    alpha, g = (complex(v) for v in semigroup_pair(lp, lm, t))
    mat = np.array(
        [
            [alpha, -1j * dp.gamma * g],
            [-1j * (dp.gamma + dp.kappa0 * x2) * x2 * g, alpha + g * (lp + lm)],
        ]
    )
    return ModeSemigroup(lp, lm, mat, math.exp(-dp.nu * x2 * t))


def mode_generator(xi, gamma, kappa0, nu, nu_tilde) -> np.ndarray:
    """Full ``(1+n) x (1+n)`` generator of the Fourier-mode ODE, batched over
    leading axes of ``xi`` (shape ``(..., n)``)."""
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1]
    x2 = np.sum(xi ** 2, axis=-1)
    gamma, kappa0, nu, nu_tilde = (np.asarray(v, dtype=float)[..., None] for v in (gamma, kappa0, nu, nu_tilde))
    G = np.zeros(xi.shape[:-1] + (n + 1, n + 1), dtype=complex)
    G[..., 0, 1:] = -1j * gamma * xi
    G[..., 1:, 0] = -1j * xi * (gamma + kappa0 * x2[..., None])
    G[..., 1:, 1:] = -(nu * x2[..., None])[..., None] * np.eye(n) - nu_tilde[..., None] * xi[..., :, None] * xi[..., None, :]
    return G


def _rk4(G, u0, t, steps: int):
    h = (np.asarray(t, dtype=float) / steps)[..., None]
    u = np.array(u0, dtype=complex)

    def f(v):
        return np.einsum("...ij,...j->...i", G, v)

    for _ in range(steps):
        k1 = f(u)
        k2 = f(u + 0.5 * h * k1)
        k3 = f(u + 0.5 * h * k2)
        k4 = f(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def mode_ode_oracle(xi, u0_hat, t: float, dp: DerivedParameters, dt: float) -> np.ndarray:
    """Classical RK4 integration of the full Fourier-mode ODE (test oracle)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x2 = float(xi @ xi)
    if dt * (dp.nu + dp.nu_tilde + dp.kappa0) * x2 >= 0.5:
        raise ValueError("step size too large for the RK4 oracle")
    steps = max(1, int(math.ceil(t / dt)))
    G = mode_generator(xi, dp.gamma, dp.kappa0, dp.nu, dp.nu_tilde)
    return _rk4(G, u0_hat, t, steps)


def mode_ode_oracle_batch(xi, u0_hat, t, gamma, kappa0, nu, nu_tilde, steps: int) -> np.ndarray:
    """Vectorized oracle over a batch of modes with per-sample coefficients."""
    G = mode_generator(xi, gamma, kappa0, nu, nu_tilde)
    return _rk4(G, u0_hat, t, steps)


def apply_semigroup_batch(xi, u0_hat, t, gamma, kappa0, nu, nu_tilde) -> np.ndarray:
    """Exact propagator applied to a batch of single modes (``xi`` shape ``(M, n)``)."""
    xi = np.asarray(xi, dtype=float)
    x2 = np.sum(xi ** 2, axis=-1)
    xn = np.sqrt(x2)
    e = xi / np.where(xn > 0, xn, 1.0)[..., None]
    lp, lm = _lambda_pm(x2, gamma, kappa0, nu, nu_tilde)
    alpha, g = semigroup_pair(lp, lm, t)
    phi0 = u0_hat[..., 0]
    m0 = u0_hat[..., 1:]
    b0 = np.sum(e * m0, axis=-1)
    mperp = m0 - e * b0[..., None]
    phi = alpha * phi0 - 1j * gamma * xn * g * b0
    b = -1j * (gamma + kappa0 * x2) * xn * g * phi0 + (alpha + g * (lp + lm)) * b0
    m = np.exp(-nu * x2 * t)[..., None] * mperp + e * b[..., None]
    return np.concatenate([phi[..., None], m], axis=-1)


class LinearOperator:
    """Multiplier arrays of the linear system on one grid, reused across times."""

    def __init__(self, grid: Grid, dp: DerivedParameters):
        self.grid = grid
        self.dp = dp
        self.lam_p, self.lam_m = _lambda_pm(grid.xi2, **_as_coeffs(dp))
        self.tau = self.lam_p + self.lam_m
        self.delta = self.lam_p * self.lam_m
        self.c12 = -1j * dp.gamma * grid.xi_norm
        self.c21 = -1j * (dp.gamma + dp.kappa0 * grid.xi2) * grid.xi_norm
        self.transverse_rate = -dp.nu * grid.xi2

    def split(self, spec: SpectralState):
        e = self.grid.xi_unit
        b = np.sum(e * spec.m_hat, axis=0)
        return spec.phi_hat, b, spec.m_hat - e * b

    def join(self, phi, b, mperp) -> SpectralState:
        return SpectralState(self.grid, phi, mperp + self.grid.xi_unit * b)

    def apply_pair(self, pair, phi, b):
        p, q = pair
        return p * phi + q * self.c12 * b, q * self.c21 * phi + (p + q * self.tau) * b

    def apply_function(self, long_pair, trans_factor, spec: SpectralState) -> SpectralState:
        phi, b, mperp = self.split(spec)
        phi, b = self.apply_pair(long_pair, phi, b)
        return self.join(phi, b, trans_factor * mperp)

    def semigroup(self, t: float):
        return semigroup_pair(self.lam_p, self.lam_m, t), np.exp(self.transverse_rate * t)

    def propagate(self, spec: SpectralState, t: float) -> SpectralState:
        if t < 0:
            raise ValueError("t must be nonnegative")
        pair, tf = self.semigroup(t)
        return self.apply_function(pair, tf, spec)


def propagate(
    spec0: SpectralState,
    t: float,
    dp: DerivedParameters,
    band: Band | None = None,
    bands: BandDecomposition | None = None,
    op: LinearOperator | None = None,
) -> SpectralState:
    """Evolve by the linear solution operator for time ``t``.

    With ``band=Band.LOW`` this is ``E_1(t)``, with ``Band.PINF`` it is
    ``E_inf(t)``.
    """
    op = op or LinearOperator(spec0.grid, dp)
    out = op.propagate(spec0, t)
    if band is not None and Band(band) is not Band.ALL:
        if bands is None:
            raise ValueError("a band decomposition is required for band filtering")
        out = project_band(out, band, bands)
    return out


def heat_comparator_spectral(spec0: SpectralState, t: float, dp: DerivedParameters) -> SpectralState:
    if t < 0:
        raise ValueError("t must be nonnegative")
    g = spec0.grid
    e = g.xi_unit
    mperp = spec0.m_hat - e * np.sum(e * spec0.m_hat, axis=0)
    return SpectralState(g, np.zeros_like(spec0.phi_hat), np.exp(-dp.nu * g.xi2 * t) * mperp)


def heat_comparator(m0: State, t: float, dp: DerivedParameters) -> State:
    """Heat evolution of the divergence-free part of ``m0.m`` (``phi`` is zero)."""
    return to_physical(heat_comparator_spectral(to_spectral(m0), t, dp))


def lambda_minus_explicit(xi_norm, dp: DerivedParameters):
    """Branchwise closed form of ``lambda_-`` used to cross-check ``lambda_pm``.

    For ``K < 1`` the principal complex square root covers both sides of
    the degeneracy radius; for ``K > 1`` the radicand is ``1 + r^2/|xi|^2``.
    """
    x = np.asarray(xi_norm, dtype=float)
    x2 = x * x
    if dp.regime is Regime.K_EQ_1:
        return -dp.A * x2 + 1j * dp.gamma * x
    r2 = dp.r_deg ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(x > 0, r2 / np.where(x > 0, x2, 1.0), 0.0)
    s = math.sqrt(abs(1.0 - dp.K ** 2))
    if dp.regime is Regime.K_LT_1:
        rad = np.sqrt((1.0 - ratio) + 0j)
        out = -dp.A * x2 + dp.A * s * x2 * rad
    else:
        out = -dp.A * x2 + 1j * dp.A * s * x2 * np.sqrt(1.0 + ratio)
    return np.where(x > 0, out, 0.0 + 0j)
