"""
Modulation of the detachment cross section by a wall
=====================================================

A detached electron that travels to the wall and back interferes with the
direct wave.  The ratio A(u) = sigma / sigma0 depends on the round-trip
action u = 2 k d, the reflection amplitude K and the reflection phase index mu.
"""

import numpy as np

import photodetach as pd
from photodetach import sweep

# Tabulate the fig2 dataset: A(u) for K in (1, 0.7, 0.4), mu in (1, 1.5, 2).
table = sweep.run_sweep(sweep.preset("fig2"))
print("columns:", table.columns)

# The oscillation shrinks as the wall absorbs more of the wave.
for mu in sweep.FIG_PHASES:
    amps = [sweep.curve_amplitude(table, K, mu) for K in sweep.FIG_REFLECTIONS]
    print(f"mu = {mu}: peak-to-trough of A for K = 1, 0.7, 0.4 ->", ", ".join(f"{a:.4f}" for a in amps))

# A fully absorbing wall (K = 0) leaves the free cross section untouched.
u = np.linspace(0, 50, 6)
print("A(u; K=0) =", pd.modulation_function(u, 0.0, 2.0))

# Near u = 0 the wave has no room to interfere and A tends to 1 - K cos(mu pi/2).
for mu in (1.0, 2.0):
    print(f"A(1e-9; K=1, mu={mu}) = {pd.modulation_function(1e-9, 1.0, mu):.12f}")

# A hard wall at u = pi: A = 1 - 6/pi^2.
print("A(pi; 1, 2) =", pd.modulation_function(np.pi, 1.0, 2.0), "vs", 1 - 6 / np.pi**2)
