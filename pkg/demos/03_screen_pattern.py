"""
Interference rings on a distant screen
======================================

A detector plane at distance L from the ion records the current j_z(rho).
The wall turns the smooth free pattern into concentric fringes whose
visibility grows with the reflection amplitude K.
"""

import numpy as np

import photodetach as pd
from photodetach import oracles, sweep

ion = pd.IonModel()
E = pd.ev_to_hartree(1.0) - ion.binding_energy
screen = pd.ScreenGeometry(distance=1e4)

table = sweep.run_sweep(sweep.preset("fig4"))
for mu in sweep.FIG4_PHASES:
    for K in sweep.FIG4_REFLECTIONS:
        wall = pd.SurfaceModel(K, mu, 100.0)
        print(
            f"K = {K:.1f}, mu = {mu:.0f}: contrast {sweep.fringe_contrast(table, K, mu):.3f},"
            f" bright rings {oracles.fringe_count(ion, wall, E, screen)}"
        )

# The current integrated over the whole screen recovers sigma0 A.
wall = pd.SurfaceModel(1.0, 2.0, 100.0)
value, qerr, tail = oracles.oracle_screen_total(ion, wall, E, screen, full_output=True)
print(f"screen total {value:.12e}, closed form {pd.sigma_total(ion, wall, E):.12e}, tail bound {tail:.1e}")

# Truncating at 50 L leaves a visible tail.
clipped = oracles.oracle_screen_total(ion, wall, E, screen, rho_max=50 * screen.distance)
print("relative shortfall at rho_max = 50 L:", 1 - clipped / value)

# The pattern never goes negative.
rho = screen.rho_grid()
print("min j_z on the default grid:", np.min(pd.screen_flux(ion, wall, E, screen, rho)))
