import json
import math
import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nskdecay.params import (
    ParameterError,
    PhysicalParameters,
    PressureLaw,
    Regime,
    VacuumError,
    derive_constants,
    load_parameters,
    p1_of_phi,
    p1_quadrature,
    p2_of_phi,
    parameters_from_mapping,
)


def linear_pressure(dp1=1.0):
    # P(rho) = dp1 * rho, so P'(1) = dp1
    return PressureLaw.power(1.0, dp1)


def test_derive_constants_k_equal_one():
    # [DERIVED] hand evaluation of A, B, K with gamma = nu = nu_tilde = kappa0 = 1
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 1.0, 2, linear_pressure()))
    assert (dp.gamma, dp.nu, dp.nu_tilde, dp.A, dp.B, dp.K) == (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    assert dp.regime is Regime.K_EQ_1
    assert math.isinf(dp.r_deg)


def test_derive_constants_k_two():
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 4.0, 2, linear_pressure()))
    assert dp.K == pytest.approx(2.0, rel=1e-15)
    assert dp.regime is Regime.K_GT_1


def test_k_less_than_one():
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 0.25, 2))
    assert dp.regime is Regime.K_LT_1
    assert dp.K == pytest.approx(0.5)
    assert dp.r_deg == pytest.approx(1 / math.sqrt(0.75))


def test_viscosity_boundary_accepted():
    # (2/n) mu + mu' = 0 exactly is allowed
    dp = derive_constants(PhysicalParameters(1.0, -1.0, 1.0, 2))
    assert dp.nu_tilde == 0.0


@pytest.mark.parametrize(
    "kwargs, fragment",
    [
        (dict(mu=0.0, mu_prime=0.0, kappa=1.0), "mu > 0"),
        (dict(mu=1.0, mu_prime=-1.5, kappa=1.0), "(2/n)*mu + mu_prime >= 0"),
        (dict(mu=1.0, mu_prime=0.0, kappa=0.0), "kappa > 0"),
        (dict(mu=1.0, mu_prime=0.0, kappa=1.0, n=4), "dimension"),
    ],
)
def test_invalid_parameters_name_the_inequality(kwargs, fragment):
    with pytest.raises(ParameterError, match=re.escape(fragment)):
        derive_constants(PhysicalParameters(**kwargs))


def test_negative_sound_speed_rejected():
    bad = PressureLaw(lambda r: -r, lambda r: -1.0 + 0 * r, lambda r: 0 * r)
    with pytest.raises(ParameterError, match="P'\\(1\\) > 0"):
        derive_constants(PhysicalParameters(1.0, 0.0, 1.0, 2, bad))


def test_default_pressure_gives_unit_sound_speed():
    assert derive_constants(PhysicalParameters(1.0, 0.0, 1.0)).gamma == 1.0


def test_pressure_consistency_check():
    assert PressureLaw.power(1.4).check_consistency() < 1e-6
    broken = PressureLaw(lambda r: r ** 2, lambda r: 2 * r, lambda r: 3.0 + 0 * r)
    with pytest.raises(ParameterError):
        broken.check_consistency()


@settings(max_examples=200, deadline=None)
@given(
    mu=st.floats(0.05, 5.0),
    frac=st.floats(0.0, 3.0),
    kappa=st.floats(0.01, 10.0),
    dp1=st.floats(0.1, 4.0),
    n=st.sampled_from([2, 3]),
)
def test_derived_identities(mu, frac, kappa, dp1, n):
    mu_prime = -(2.0 / n) * mu + frac
    dp = derive_constants(PhysicalParameters(mu, mu_prime, kappa, n, linear_pressure(dp1)))
    assert dp.A > 0 and dp.B > 0 and dp.K > 0
    assert dp.A * dp.B == pytest.approx(dp.gamma, rel=1e-13)
    assert dp.A * dp.K == pytest.approx(math.sqrt(dp.kappa0 * dp.gamma), rel=1e-13)


def test_regime_near_equality_routes_to_k_one():
    # 4 kappa0 gamma vs (nu + nu_tilde)^2 differ by one ulp
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 1.0 * (1 + 2e-16), 2, linear_pressure()))
    assert dp.regime is Regime.K_EQ_1
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 1.0 + 1e-10, 2, linear_pressure()))
    assert dp.regime is Regime.K_GT_1


@pytest.mark.parametrize("phi, expected", [(0.0, -1.0), (1.0, -0.5), (-0.5, -2.0)])
def test_p1_values(phi, expected):
    # [DERIVED] 64-node Gauss-Legendre of -(1 + tau phi)^-2
    assert p1_quadrature(phi) == pytest.approx(expected, rel=1e-12)
    assert p1_of_phi(phi) == pytest.approx(expected, rel=1e-15)


def test_p1_closed_form_matches_quadrature_on_random_sample():
    phi = np.random.default_rng(0).uniform(-0.9, 9.0, 1000)
    np.testing.assert_allclose(p1_of_phi(phi), p1_quadrature(phi), rtol=1e-10)


@pytest.mark.parametrize("fn", [p1_of_phi, lambda x: p2_of_phi(x, PressureLaw.power())])
def test_vacuum_rejected(fn):
    with pytest.raises(VacuumError):
        fn(-1.0)
    with pytest.raises(VacuumError):
        fn(np.array([0.0, -1.5]))


def test_p2_quadratic_pressure_is_one_half():
    quad = PressureLaw.power(2.0, 1.0)  # rho^2 / 2
    for phi in (-0.7, 0.0, 0.4, 3.0):
        assert p2_of_phi(phi, quad) == pytest.approx(0.5, rel=1e-14)


def test_p2_at_zero_is_half_second_derivative():
    pl = PressureLaw.power(1.4)
    assert p2_of_phi(0.0, pl) == pytest.approx(0.5 * pl.ddP(1.0), rel=1e-14)


def test_p2_cubic_pressure():
    # [DERIVED] int_0^1 (1 - tau) 2 (1 + tau) dtau = 4/3
    cubic = PressureLaw.power(3.0, 1.0)
    assert p2_of_phi(1.0, cubic) == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_p2_default_law_against_adaptive_quadrature():
    # [DERIVED] scipy.integrate.quad of (1 - s) 0.4 (1 + 0.3 s)^-0.6, frozen
    assert p2_of_phi(0.3, PressureLaw.power()) == pytest.approx(0.18924919749697483, rel=1e-10)


def test_p2_field_version_matches_scalar():
    pl = PressureLaw.power()
    phi = np.linspace(-0.4, 0.4, 9)
    vec = p2_of_phi(phi, pl, nodes=16)
    ref = [p2_of_phi(float(v), pl) for v in phi]
    np.testing.assert_allclose(vec, ref, rtol=1e-12)


def test_p2_taylor_identity():
    # P2 phi^2 = P(1 + phi) - P(1) - P'(1) phi
    pl = PressureLaw.power()
    for phi in (-0.3, 0.2, 0.8):
        lhs = p2_of_phi(phi, pl) * phi ** 2
        rhs = pl.P(1 + phi) - pl.P(1.0) - pl.dP(1.0) * phi
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_mapping_and_file_loading(tmp_path):
    cfg = {"mu": 1.0, "mu_prime": 0.5, "kappa": 2.0, "n": 3, "pressure_exponent": 2.0}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(cfg))
    phys = load_parameters(path)
    assert phys.n == 3 and phys.mu_prime == 0.5
    assert phys.echo()["pressure"] == {"kind": "power", "exponent": 2.0, "coefficient": 1.0}
    with pytest.raises(KeyError, match="kappa"):
        parameters_from_mapping({"mu": 1.0, "mu_prime": 0.0})
    with pytest.raises(ParameterError, match="unknown"):
        parameters_from_mapping(dict(cfg, viscosity=3))


def test_echo_is_json_serializable():
    dp = derive_constants(PhysicalParameters(1.0, 0.0, 0.25))
    json.dumps(dp.echo())
    assert dp.echo()["regime"] == "K_LT_1"
