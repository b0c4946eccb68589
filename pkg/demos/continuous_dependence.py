"""How far apart do two nearby solutions drift?

Two runs start from data that differ by a * w with w a fixed mean-zero
field.  If the solution map is Lipschitz in the dual norm, the ratio
sup_t ||phi_1 - phi_2|| / ||phi_01 - phi_02|| stays bounded as a shrinks.
The same experiment is repeated with the quartic potential in the l2 norm.

    python demos/continuous_dependence.py
"""

import numpy as np

from hdch.darcy import ViscositySpec
from hdch.experiments import continuous_dependence_experiment
from hdch.grid import Grid
from hdch.potential import PotentialSpec
from hdch.stepper import StepConfig, make_scenario, smooth_random_field

grid = Grid(64, 64, 4 * np.pi, 4 * np.pi)
visc = ViscositySpec(1.0, 2.0)
w = smooth_random_field(grid, 11)
amps = [1e-2, 1e-3, 1e-4]

for label, spec in (("logarithmic", PotentialSpec()), ("quartic", PotentialSpec(mode="polynomial"))):
    phi0 = make_scenario("spinodal", grid, amplitude=0.2, seed=7, spec=spec)
    rows = continuous_dependence_experiment(grid, phi0, w, amps, 0.1, spec, visc, StepConfig(dt=1e-3))
    print(label)
    for r in rows:
        print(f"  a={r.a:.0e}  dual ratio {r.R_v0dual:.5f}  l2 ratio {r.R_l2:.5f}")
