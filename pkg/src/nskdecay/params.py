"""Physical constants, normalized coefficients and pressure-derived scalars.

The constant state is fixed to ``rho = 1``.  With ``phi = rho - 1`` and
``m = M / gamma`` the linearized operator depends only on the derived
quantities ``gamma, nu, nu_tilde, kappa0`` and on the combinations
``A, B, K`` that control the spectral regime.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

# relative tolerance on 4*kappa0*gamma == (nu + nu_tilde)**2
K_EQ_1_RTOL = 1e-14


class Regime(str, enum.Enum):
    K_LT_1 = "K_LT_1"
    K_EQ_1 = "K_EQ_1"
    K_GT_1 = "K_GT_1"


class ParameterError(ValueError):
    """Raised when a parameter set violates a physical inequality."""


class VacuumError(ValueError):
    """Raised when a density perturbation reaches ``1 + phi <= 0``."""


@dataclass(frozen=True)
class PressureLaw:
    """Pressure ``P(rho)`` together with its first two derivatives.

    ``description`` is echoed into reports; the callables must accept
    numpy arrays.
    """

    P: Callable[[Any], Any]
    dP: Callable[[Any], Any]
    ddP: Callable[[Any], Any]
    description: dict = field(default_factory=dict, compare=False)

    @classmethod
    def power(cls, exponent: float = 1.4, coefficient: float = 1.0) -> "PressureLaw":
        """``P(rho) = coefficient * rho**exponent / exponent`` so that ``P'(1) = coefficient``."""
        g, a = float(exponent), float(coefficient)
        if g <= 0:
            raise ParameterError("pressure exponent must be positive")
        return cls(
            P=lambda r: a * np.power(r, g) / g,
            dP=lambda r: a * np.power(r, g - 1.0),
            ddP=lambda r: a * (g - 1.0) * np.power(r, g - 2.0),
            description={"kind": "power", "exponent": g, "coefficient": a},
        )

    def check_consistency(self, tol: float = 1e-6, samples: int = 21) -> float:
        """Largest central-difference mismatch of ``dP``/``ddP`` on ``[0.5, 1.5]``."""
        rho = np.linspace(0.5, 1.5, samples)
        h = 1e-4
        fd1 = (self.P(rho + h) - self.P(rho - h)) / (2 * h)
        fd2 = (self.dP(rho + h) - self.dP(rho - h)) / (2 * h)
        err = max(np.max(np.abs(fd1 - self.dP(rho))), np.max(np.abs(fd2 - self.ddP(rho))))
        if err > tol:
            raise ParameterError(f"pressure law derivatives inconsistent (max mismatch {err:.3e})")
        return float(err)


@dataclass(frozen=True)
class PhysicalParameters:
    mu: float
    mu_prime: float
    kappa: float
    n: int = 2
    pressure: PressureLaw = field(default_factory=PressureLaw.power)

    def validate(self) -> None:
        if self.n not in (2, 3):
            raise ParameterError(f"dimension n must be 2 or 3, got {self.n}")
        if not self.mu > 0:
            raise ParameterError(f"violated mu > 0 (mu={self.mu})")
        if (2.0 / self.n) * self.mu + self.mu_prime < 0:
            raise ParameterError(
                f"violated (2/n)*mu + mu_prime >= 0 ((2/{self.n})*{self.mu} + {self.mu_prime} < 0)"
            )
        if not self.kappa > 0:
            raise ParameterError(f"violated kappa > 0 (kappa={self.kappa})")
        if not float(self.pressure.dP(1.0)) > 0:
            raise ParameterError("violated P'(1) > 0")

    def echo(self) -> dict:
        return {
            "mu": self.mu,
            "mu_prime": self.mu_prime,
            "kappa": self.kappa,
            "n": self.n,
            "pressure": dict(self.pressure.description),
        }


@dataclass(frozen=True)
class DerivedParameters:
    gamma: float
    nu: float
    nu_tilde: float
    kappa0: float
    A: float
    B: float
    K: float
    regime: Regime
    n: int = 2

    @property
    def r_deg(self) -> float:
        """``B / sqrt|1 - K^2|``: the radius where the two roots coincide (K < 1)."""
        if self.regime is Regime.K_EQ_1:
            return math.inf
        return self.B / math.sqrt(abs(1.0 - self.K ** 2))

    def echo(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        return d


def derive_constants(phys: PhysicalParameters) -> DerivedParameters:
    phys.validate()
    gamma = math.sqrt(float(phys.pressure.dP(1.0)))
    nu = phys.mu
    nu_tilde = phys.mu + phys.mu_prime
    kappa0 = phys.kappa / gamma
    s = nu + nu_tilde
    if s <= 0:
        raise ParameterError(f"violated nu + nu_tilde > 0 (got {s})")
    A = s / 2.0
    B = 2.0 * gamma / s
    K = 2.0 * math.sqrt(kappa0 * gamma) / s
    lhs, rhs = 4.0 * kappa0 * gamma, s * s
    if abs(lhs - rhs) <= K_EQ_1_RTOL * max(lhs, rhs):
        regime = Regime.K_EQ_1
    elif lhs < rhs:
        regime = Regime.K_LT_1
    else:
        regime = Regime.K_GT_1
    return DerivedParameters(gamma, nu, nu_tilde, kappa0, A, B, K, regime, phys.n)


def _check_phi(phi):
    phi = np.asarray(phi, dtype=float)
    if np.any(1.0 + phi <= 0):
        raise VacuumError("1 + phi <= 0: density perturbation crosses vacuum")
    return phi


def p1_of_phi(phi):
    """``int_0^1 f'(1 + tau*phi) dtau`` with ``f(tau) = 1/tau``; equals ``-1/(1 + phi)``."""
    phi = _check_phi(phi)
    out = -1.0 / (1.0 + phi)
    return out if out.ndim else float(out)


def p1_quadrature(phi, nodes: int = 64):
    phi = _check_phi(phi)
    x, w = np.polynomial.legendre.leggauss(nodes)
    tau = 0.5 * (x + 1.0)
    vals = -1.0 / (1.0 + np.multiply.outer(phi, tau)) ** 2
    out = 0.5 * vals @ w
    return out if np.ndim(out) else float(out)


def p2_of_phi(phi, pressure: PressureLaw, nodes: int = 64):
    """``int_0^1 (1 - tau) P''(1 + tau*phi) dtau`` by Gauss-Legendre quadrature.

    Accepts scalars or arrays.  Sixteen nodes already reach round-off for
    ``|phi| < 0.5`` with the power law; the field solver uses that.
    """
    phi = _check_phi(phi)
    x, w = np.polynomial.legendre.leggauss(nodes)
    tau = 0.5 * (x + 1.0)
    wt = 0.5 * w * (1.0 - tau)
    if phi.ndim == 0:
        return float(np.sum(wt * pressure.ddP(1.0 + tau * float(phi))))
    out = np.zeros_like(phi)
    for tk, wk in zip(tau, wt):
        out += wk * pressure.ddP(1.0 + tk * phi)
    return out


_FLAT_KEYS = {"mu", "mu_prime", "kappa", "n", "pressure_exponent", "pressure_coefficient"}


def parameters_from_mapping(cfg: Mapping[str, Any]) -> PhysicalParameters:
    """Build parameters from a flat key-value mapping (JSON-compatible).

    Recognized keys: ``mu, mu_prime, kappa, n, pressure_exponent,
    pressure_coefficient``.  Missing required keys raise ``KeyError``
    naming the field.
    """
    unknown = set(cfg) - _FLAT_KEYS
    if unknown:
        raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
    for key in ("mu", "mu_prime", "kappa"):
        if key not in cfg:
            raise KeyError(key)
    pressure = PressureLaw.power(
        cfg.get("pressure_exponent", 1.4), cfg.get("pressure_coefficient", 1.0)
    )
    phys = PhysicalParameters(
        float(cfg["mu"]), float(cfg["mu_prime"]), float(cfg["kappa"]), int(cfg.get("n", 2)), pressure
    )
    phys.validate()
    return phys


def load_parameters(path) -> PhysicalParameters:
    with open(path) as fh:
        return parameters_from_mapping(json.load(fh))
