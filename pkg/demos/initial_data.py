"""Pulling near-saturated data away from the pure states.

The datum reaches |phi0| = 0.999.  Its chemical potential is cut off at
level k and the elliptic problem is solved again.  Small k gives a clear gap
to +-1.  Large k reproduces the datum.

    python demos/initial_data.py
"""

import numpy as np

from hdch.grid import Grid
from hdch.potential import PotentialSpec
from hdch.stepper import prepare_initial_data

grid = Grid(64, 64, 4 * np.pi, 4 * np.pi)
spec = PotentialSpec()
X, Y = grid.coords()
c = np.pi / grid.lx
prof = np.tanh(10 * (np.cos(c * X) * np.cos(c * Y) + 0.3 * np.cos(2 * c * X)))
phi0 = 0.999 * prof / np.max(np.abs(prof))

for k in (1, 5, 25, 125):
    prep = prepare_initial_data(grid, phi0, k, spec)
    print(f"k={k:4d}  separation {prep.delta:.3e}  H1 distance to datum {grid.h1(prep.phi0 - phi0):.3e}  "
          f"cut active: {prep.truncated}")
