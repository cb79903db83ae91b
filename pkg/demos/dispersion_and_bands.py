"""Characteristic roots and frequency bands in the three viscosity-capillarity regimes.

For each regime we print the roots at a few wavenumbers, the degeneracy
radius where they merge, and the radii of the low/high cut-offs.  Run with
``python3 demos/dispersion_and_bands.py``.
"""
import numpy as np

from nskdecay import PhysicalParameters, derive_constants, lambda_pm
from nskdecay.spectral import band_radii

REGIMES = {
    "K < 1 (viscosity dominates)": PhysicalParameters(1.0, 0.0, 0.25, 2),
    "K = 1 (balanced)": PhysicalParameters(1.0, 0.0, 1.0, 2),
    "K > 1 (capillarity dominates)": PhysicalParameters(1.0, 0.0, 4.0, 2),
}

for label, phys in REGIMES.items():
    dp = derive_constants(phys)
    rad = band_radii(dp)
    print(f"\n{label}: A={dp.A:.3f} B={dp.B:.3f} K={dp.K:.3f} r_deg={dp.r_deg:.4g}")
    print(f"  low cut-off falls over [{rad.low_in:.3f}, {rad.low_out:.3f}], "
          f"high cut-off rises over [{rad.high_in:.3f}, {rad.high_out:.3f}]")
    for x in (0.05, 0.5, 1.0, 2.0, 5.0):
        lp, lm = lambda_pm(x, dp)
        print(f"  |xi|={x:4.2f}  lambda+={complex(lp):.4f}  lambda-={complex(lm):.4f}")

# Near zero the roots are a damped acoustic pair: Re ~ -A|xi|^2, Im ~ +-gamma|xi|.
dp = derive_constants(REGIMES["K < 1 (viscosity dominates)"])
x = np.array([1e-3, 1e-2])
lp, _ = lambda_pm(x, dp)
print("\nsmall |xi|: Re/|xi|^2 =", np.round(lp.real / x ** 2, 6), " Im/|xi| =", np.round(lp.imag / x, 6))
