"""
Outgoing and absorbed parts of the cross section
================================================

The total cross section sigma0 A splits into a part carried away from the
wall (sigma1) and a part that flows into it (sigma2).
"""

import numpy as np

import photodetach as pd
from photodetach import sweep

ion = pd.IonModel()
print(f"binding energy {ion.binding_energy:.10f} hartree ({pd.hartree_to_ev(ion.binding_energy):.4f} eV)")

wall = pd.SurfaceModel(reflection=0.7, phase_index=1.5, wall_distance=100.0)
photon_ev = np.array([0.8, 1.0, 1.5])
E = pd.ev_to_hartree(photon_ev) - ion.binding_energy

s0 = pd.sigma0(ion, E)
s1 = pd.sigma1(ion, wall, E)
s2 = pd.sigma2(ion, wall, E)
total = pd.sigma_total(ion, wall, E)
for row in zip(photon_ev, s0, s1, s2, total):
    print("E_ph = {:.2f} eV  sigma0 {:.5e}  sigma1 {:.5e}  sigma2 {:.5e}  total {:.5e}".format(*row))
print("max |sigma1 + sigma2 - total| / total =", np.max(np.abs(s1 + s2 - total) / total))

# Convert to cm^2 for comparison with measured spectra.
print("sigma0 at 1 eV:", pd.au_area_to_cm2(s0[1]), "cm^2")

# The free cross section peaks exactly at E = E_b.
E_grid = np.geomspace(1e-4, 1.0, 200001)
print("argmax sigma0 / E_b =", E_grid[np.argmax(pd.sigma0(ion, E_grid))] / ion.binding_energy)

# fig3 dataset: long-format table over photon energy for nine walls.
table = sweep.run_sweep(sweep.preset("fig3"))
print(table.rows.shape[0], "rows with columns", table.columns)
