"""Diffusion-wave decay of the low-frequency linear solution in two dimensions.

Density decays like (1+t)^(-5/4) in the sup norm, faster than the
momentum's (1+t)^(-1): the acoustic wave spreads the diffusive profile
over a ring.  This demo uses a smaller grid than the acceptance run so it
finishes in a few seconds; the fitted exponents are close to the theory
but the window is shorter.
"""
from nskdecay import Grid, PhysicalParameters
from nskdecay.experiments import linear_decay_experiment

phys = PhysicalParameters(1.0, 0.0, 0.25, 2)
grid = Grid(2, 256, 200.0)
rep = linear_decay_experiment(phys, grid, T=50.0, samples=30, t_start=1.0, window=(10.0, 45.0),
                              ic={"kind": "bump_pair", "width": 3.0})

print(f"horizon (last time before wrap-around) = {rep.horizon:g}")
for c in rep.checks:
    r2 = "" if c.r2 is None else f" r2={c.r2:.3f}"
    print(f"{c.verdict.value:12s} {c.name:28s} measured={c.measured:+.3f} expected={c.expected}{r2}")
