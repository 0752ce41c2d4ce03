"""
Recover wall parameters (K, mu and optionally d) from a cross-section spectrum.

The forward model is sigma(E) = sigma0(E) [1 - 3 K A1(2 d k, mu)].  The
objective is oscillatory in mu and d, so a coarse grid search picks starting
points which are then polished by a damped Gauss-Newton (Levenberg-Marquardt)
iteration with a finite-difference Jacobian.
"""

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from . import model as m
from .units import ev_to_hartree

MIN_SAMPLES = 8
MU_PERIOD = 4.0

#: Below this K the phase index and wall distance carry no information.
IDENTIFIABILITY_K = 1e-6

SPECTRUM_HEADER = ("E_ph_eV", "sigma_au")


class SpectrumError(ValueError):
    """Malformed or physically invalid spectrum."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sampled total cross section, photon energies in eV."""

    photon_ev: np.ndarray
    sigma: np.ndarray
    ion: m.IonModel = m.IonModel()

    def __post_init__(self):
        e = np.asarray(self.photon_ev, dtype=float)
        s = np.asarray(self.sigma, dtype=float)
        object.__setattr__(self, "photon_ev", e)
        object.__setattr__(self, "sigma", s)
        if e.ndim != 1 or e.shape != s.shape:
            raise SpectrumError("photon energies and cross sections must be 1-D arrays of equal length")
        if e.size < MIN_SAMPLES:
            raise SpectrumError(f"need at least {MIN_SAMPLES} samples, got {e.size}")
        if not np.all(np.isfinite(e)) or not np.all(np.isfinite(s)):
            raise SpectrumError("spectrum contains non-finite values")
        if np.any(np.diff(e) <= 0):
            raise SpectrumError("photon energies must be strictly increasing")
        if np.any(ev_to_hartree(e) <= self.ion.binding_energy):
            raise SpectrumError("all photon energies must lie above the detachment threshold")

    @property
    def electron_energy(self):
        """Detached-electron energies in hartree."""
        return ev_to_hartree(self.photon_ev) - self.ion.binding_energy

    def __len__(self):
        return self.photon_ev.size


@dataclass(frozen=True)
class FitBounds:
    reflection: tuple = (0.0, 1.0)
    phase_index: tuple = (0.0, MU_PERIOD)
    wall_distance: tuple = (50.0, 500.0)

    def __post_init__(self):
        klo, khi = self.reflection
        if not 0.0 <= klo < khi <= 1.0:
            raise ValueError(f"reflection bounds must satisfy 0 <= lo < hi <= 1, got {self.reflection}")
        mlo, mhi = self.phase_index
        if not 0.0 <= mlo < mhi <= MU_PERIOD:
            raise ValueError(f"phase_index bounds must lie in [0, 4), got {self.phase_index}")
        dlo, dhi = self.wall_distance
        if not 0.0 < dlo < dhi:
            raise ValueError(f"wall_distance bounds must satisfy 0 < lo < hi, got {self.wall_distance}")


@dataclass
class FitResult:
    K_hat: float
    mu_hat: float
    d_hat: float
    residual_norm: float
    iterations: int
    converged: bool
    identifiable: bool = True
    fit_d: bool = False
    message: str = ""

    def to_text(self):
        """Flat ``key = value`` block."""
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in asdict(self).items())

    def csv_header(self):
        return ",".join(asdict(self))

    def to_csv_row(self):
        return ",".join(_fmt(v) for v in asdict(self).values())


def _fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.11e}"
    return str(value)


# --- forward model -------------------------------------------------------------


def synthesize_spectrum(ion, surface, photon_ev, noise_sigma=0.0, seed=0):
    """Forward-model spectrum with optional multiplicative Gaussian noise.

    ``noise_sigma`` is the relative noise width; draws come from
    ``numpy.random.default_rng(seed)`` so equal seeds give equal spectra.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    photon_ev = np.asarray(photon_ev, dtype=float)
    E = ev_to_hartree(photon_ev) - ion.binding_energy
    if np.any(E <= 0):
        raise m.DomainError("energy grid reaches below the detachment threshold")
    sigma = np.asarray(m.sigma_total(ion, surface, E), dtype=float)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        sigma = sigma * (1.0 + noise_sigma * rng.standard_normal(sigma.shape))
    return Spectrum(photon_ev, sigma, ion)


def _model(sigma0, k, params):
    K, mu, d = params
    return sigma0 * (1.0 - 3.0 * K * np.asarray(m.a1(2.0 * d * k, mu)))


def _grid_costs(sigma0, k, data, Ks, mus, ds):
    """Sum of squared residuals on the Cartesian grid Ks x mus x ds."""
    costs = np.empty((Ks.size, mus.size, ds.size))
    for j, mu in enumerate(mus):
        for l, d in enumerate(ds):
            shape = sigma0 * np.asarray(m.a1(2.0 * d * k, mu))
            # sigma0 - data - 3 K shape, vectorized over K
            r = (sigma0 - data)[None, :] - 3.0 * Ks[:, None] * shape[None, :]
            costs[:, j, l] = np.einsum("ij,ij->i", r, r)
    return costs


def _jacobian(sigma0, k, params, free, rel_step=1e-6):
    cols = []
    for i in free:
        h = rel_step * max(abs(params[i]), 1.0)
        up, down = params.copy(), params.copy()
        up[i] += h
        down[i] -= h
        cols.append((_model(sigma0, k, up) - _model(sigma0, k, down)) / (2.0 * h))
    return np.column_stack(cols)


def _clip(params, bounds):
    params[0] = min(max(params[0], bounds.reflection[0]), bounds.reflection[1])
    params[2] = min(max(params[2], bounds.wall_distance[0]), bounds.wall_distance[1])
    return params


def _refine(sigma0, k, data, start, free, bounds, max_iter, step_tol, cost_tol):
    """Projected Levenberg-Marquardt from ``start``.

    Returns (params, cost, iterations, converged).
    """
    params = np.array(start, dtype=float)
    r = _model(sigma0, k, params) - data
    cost = float(r @ r)
    lam = 1e-3
    for it in range(1, max_iter + 1):
        if cost == 0.0:
            return params, cost, it - 1, True
        J = _jacobian(sigma0, k, params, free)
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JtJ).copy()
        diag[diag == 0] = 1.0
        while True:
            try:
                delta = -np.linalg.solve(JtJ + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = params.copy()
            trial[free] += delta
            trial = _clip(trial, bounds)
            step = np.linalg.norm(trial[free] - params[free])
            r_trial = _model(sigma0, k, trial) - data
            cost_trial = float(r_trial @ r_trial)
            if cost_trial <= cost:
                rel_change = (cost - cost_trial) / cost
                params, r, cost = trial, r_trial, cost_trial
                lam = max(lam / 10.0, 1e-12)
                if step < step_tol or rel_change < cost_tol:
                    return params, cost, it, True
                break
            lam *= 10.0
            if step < step_tol:
                # Damping has shrunk the step to nothing: a (local) minimum.
                return params, cost, it, True
            if lam > 1e16:
                return params, cost, it, False
    return params, cost, max_iter, False


def fit_surface(
    spectrum,
    ion=None,
    fit_d=False,
    wall_distance=None,
    bounds=FitBounds(),
    grid_shape=(21, 17, 15),
    starts=5,
    max_iter=200,
    step_tol=1e-10,
    cost_tol=1e-12,
):
    """Least-squares estimate of the wall parameters behind ``spectrum``.

    Parameters
    ----------
    spectrum : Spectrum
    ion : IonModel, optional
        Defaults to the ion attached to the spectrum.
    fit_d : bool
        Fit the wall distance too; otherwise ``wall_distance`` must be given.
    wall_distance : float, optional
        Known wall distance (bohr) when ``fit_d`` is false.
    bounds : FitBounds
    grid_shape : tuple of int
        Coarse grid size in (K, mu, d); the d entry is used only with ``fit_d``.
    starts : int
        Number of best grid points polished by Levenberg-Marquardt.

    Returns
    -------
    FitResult
        ``residual_norm`` is the final sum of squared residuals.  ``mu_hat``
        is reduced to [0, 4).  ``identifiable`` is false when K_hat is
        essentially zero, in which case mu_hat and d_hat are arbitrary.
    """
    ion = spectrum.ion if ion is None else ion
    if not fit_d and wall_distance is None:
        raise ValueError("wall_distance is required when fit_d is false")
    E = ev_to_hartree(spectrum.photon_ev) - ion.binding_energy
    if np.any(E <= 0):
        raise SpectrumError("spectrum reaches below the ion's detachment threshold")
    k = np.sqrt(2.0 * E)
    s0 = np.asarray(m.sigma0(ion, E))
    data = spectrum.sigma

    nK, nmu, nd = grid_shape
    Ks = np.linspace(*bounds.reflection, nK)
    mus = np.linspace(bounds.phase_index[0], bounds.phase_index[1], nmu, endpoint=False)
    if fit_d:
        ds = np.linspace(*bounds.wall_distance, nd)
        free = [0, 1, 2]
    else:
        ds = np.array([float(wall_distance)])
        free = [0, 1]

    costs = _grid_costs(s0, k, data, Ks, mus, ds)
    order = np.argsort(costs, axis=None, kind="stable")[:starts]

    best = None
    for flat in order:
        i, j, l = np.unravel_index(flat, costs.shape)
        start = (Ks[i], mus[j], ds[l])
        params, cost, iters, ok = _refine(s0, k, data, start, free, bounds, max_iter, step_tol, cost_tol)
        if best is None or cost < best[1]:
            best = (params, cost, iters, ok)

    params, cost, iters, ok = best
    K_hat, mu_hat, d_hat = (float(p) for p in params)
    identifiable = K_hat > IDENTIFIABILITY_K
    message = "" if identifiable else "K_hat ~ 0: phase index and wall distance are unidentifiable"
    return FitResult(
        K_hat=K_hat,
        mu_hat=float(mu_hat % MU_PERIOD),
        d_hat=d_hat,
        residual_norm=cost,
        iterations=int(iters),
        converged=bool(ok),
        identifiable=identifiable,
        fit_d=fit_d,
        message=message,
    )


# --- spectrum files -------------------------------------------------------------


def write_spectrum(spectrum, destination):
    """Write ``E_ph_eV,sigma_au`` CSV to a path or text stream."""
    text = ",".join(SPECTRUM_HEADER) + "\n" + "".join(
        f"{e:.11e},{s:.11e}\n" for e, s in zip(spectrum.photon_ev, spectrum.sigma)
    )
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {destination}: {exc}") from exc


def read_spectrum(source, ion=m.IonModel()):
    """Read a spectrum CSV from a path or text stream."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise OSError(f"cannot read spectrum {source}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != SPECTRUM_HEADER:
        raise SpectrumError(f"spectrum header must be {','.join(SPECTRUM_HEADER)!r}")
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise SpectrumError(f"non-numeric spectrum entry: {exc}") from exc
    if data.size == 0:
        data = data.reshape(0, 2)
    return Spectrum(data[:, 0], data[:, 1], ion)
