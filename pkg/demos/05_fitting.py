"""
Recovering wall parameters from a spectrum
==========================================

Given sigma(E_ph) with the wall distance known, a grid search followed by
Levenberg-Marquardt recovers K and mu.  With d free the fit also returns d.
"""

import numpy as np

import photodetach as pd
from photodetach import fit

ion = pd.IonModel()
true_wall = pd.SurfaceModel(0.7, 1.5, 100.0)
photon_ev = np.linspace(0.7642, 1.7542, 200)

clean = fit.synthesize_spectrum(ion, true_wall, photon_ev)
print(fit.fit_surface(clean, ion, wall_distance=100.0).to_text())

# One percent multiplicative noise, several seeds.
for seed in range(3):
    noisy = fit.synthesize_spectrum(ion, true_wall, photon_ev, noise_sigma=0.01, seed=seed)
    res = fit.fit_surface(noisy, ion, wall_distance=100.0)
    print(f"seed {seed}: K {res.K_hat:.4f}  mu {res.mu_hat:.4f}")

# Free wall distance.
res = fit.fit_surface(clean, ion, fit_d=True)
print(f"fit_d: K {res.K_hat:.6f}  mu {res.mu_hat:.6f}  d {res.d_hat:.4f}")

# With K = 0 the phase has no effect on the data and is reported unidentifiable.
flat = fit.synthesize_spectrum(ion, pd.SurfaceModel(0.0, 1.5, 100.0), photon_ev)
print("identifiable:", fit.fit_surface(flat, ion, wall_distance=100.0).identifiable)
