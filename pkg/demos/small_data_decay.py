"""Relaxation of a small perturbation of a pure phase.

Start from the well value beta plus a single cosine mode.  The higher order
energy H = |grad mu|^2/2 + int nu |u|^2/2 then decays exponentially.  H is
quadratic in the perturbation, so halving the amplitude should shrink the
fitted prefactor by about four.

    python demos/small_data_decay.py
"""

import numpy as np

from hdch.darcy import ViscositySpec
from hdch.experiments import decay_experiment
from hdch.grid import Grid
from hdch.potential import PotentialSpec, potential, find_beta
from hdch.stepper import StepConfig

grid = Grid(64, 64, 4 * np.pi, 4 * np.pi)
spec = PotentialSpec()
visc = ViscositySpec(1.0, 2.0)
beta = find_beta(spec).beta

# linearising about beta, the slowest cosine mode decays at rate 2 lam (lam + psi''(beta))
lam = 2 * (np.pi / grid.lx) ** 2
print(f"linear prediction for the rate of H: {2 * lam * (lam + potential(spec, beta, 2)):.3f}")

results = {a: decay_experiment(grid, a, 5.0, spec, visc, StepConfig(dt=1e-2)) for a in (0.01, 0.005)}
for a, res in results.items():
    print(f"a={a}: rate {res.rate:.3f}, c0 {res.c0:.3e}, fit residual {res.fit_residual:.1e}, "
          f"min separation {res.min_separation:.4f}")
print(f"c0 ratio {results[0.01].c0 / results[0.005].c0:.3f}")
