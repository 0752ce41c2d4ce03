"""
Brute-force numerical checks of the closed-form model.

Each oracle recomputes a closed-form quantity by direct numerical
integration (or differentiation) of the underlying flux or wave, with no
use of the antiderivatives the closed forms rely on.
"""

import csv
import io
import math
import warnings
from dataclasses import astuple, dataclass, fields
from typing import NamedTuple

import numpy as np

from . import model as m
from .quadrature import QuadratureSpec, integrate_adaptive
from .units import ev_to_hartree


class StepSizeWarning(UserWarning):
    """Finite-difference step is outside the accurate window."""


def _solid_angle_factor(ion, E):
    # dsigma/ds = (2 pi E_ph / c) j_r, integrated over phi in [0, 2 pi)
    return 2.0 * math.pi * (E + ion.binding_energy) / ion.light_speed * 2.0 * math.pi


def oracle_sigma1(ion, surface, E, spec=QuadratureSpec()):
    """sigma1 by integrating the radial flux over the outgoing hemisphere."""
    r = 1.0

    def integrand(theta):
        return m.radial_flux(ion, surface, E, r, theta) * r**2 * np.sin(theta)

    value, _ = integrate_adaptive(integrand, 0.0, math.pi / 2, spec)
    return _solid_angle_factor(ion, E) * value


def oracle_sigma2(ion, surface, E, spec=QuadratureSpec()):
    """sigma2 by integrating the absorbed flux over the wall-facing hemisphere."""
    r = 1.0

    def integrand(theta):
        return m.absorbed_flux(ion, surface, E, r, theta) * r**2 * np.sin(theta)

    value, _ = integrate_adaptive(integrand, math.pi / 2, math.pi, spec)
    return _solid_angle_factor(ion, E) * value


def _screen_tail_bound(ion, surface, E, L, rho):
    """Upper bound on int_rho^inf |j_z| 2 pi rho' drho' from the (1+K) envelope."""
    envelope = 2.0 * m._free_flux_prefactor(ion, E) * (1.0 + surface.reflection)
    return envelope * 2.0 * math.pi * L**3 / (3.0 * (rho**2 + L**2) ** 1.5)


def oracle_screen_total(ion, surface, E, geometry, spec=QuadratureSpec(), rho_max=None, full_output=False):
    """Total cross section from the screen flux, (2 pi E_ph / c) int j_z 2 pi rho drho.

    The rho axis is covered by geometrically growing panels [0, L], [L, 2L],
    [2L, 4L], ...  With ``rho_max=None`` panels are added until the analytic
    envelope bound on the remaining tail drops below ``spec.rel_tol / 100``
    of the running total; otherwise integration stops at ``rho_max``.

    With ``full_output`` returns ``(value, quadrature_error, tail_bound)``.
    """
    L = geometry.distance
    scale = 2.0 * math.pi * (E + ion.binding_energy) / ion.light_speed

    def integrand(rho):
        return m.screen_flux(ion, surface, E, geometry, rho) * 2.0 * math.pi * rho

    total = err = 0.0
    lo, hi = 0.0, L
    while True:
        if rho_max is not None:
            hi = min(hi, rho_max)
        value, e = integrate_adaptive(integrand, lo, hi, spec)
        total += value
        err += e
        tail = _screen_tail_bound(ion, surface, E, L, hi)
        if rho_max is not None and hi >= rho_max:
            break
        if rho_max is None and tail <= 1e-2 * spec.rel_tol * abs(total):
            break
        lo, hi = hi, 2.0 * hi
    if full_output:
        return scale * total, scale * err, scale * tail
    return scale * total


def oracle_flux_from_wave(ion, surface, E, r, theta, step=None):
    """Radial flux Im(Psi* dPsi/dr) from the outgoing wave by finite differences.

    Uses the five-point central stencil.  The default step is 0.01 / k, a
    hundredth of a reduced wavelength, which keeps the O((k h)^4) truncation
    and the O(eps k r / (k h)) round-off both well below 1e-8; a
    :class:`StepSizeWarning` is raised when either estimate exceeds 1e-7.
    """
    k = math.sqrt(2.0 * E)
    if step is None:
        step = 1e-2 / k
    if not 0.0 < step < r:
        raise ValueError(f"step must satisfy 0 < step < r, got step={step!r}, r={r!r}")
    truncation = (k * step) ** 4 / 30.0
    roundoff = np.finfo(float).eps * max(k * r, 1.0) / (k * step)
    if truncation > 1e-7 or roundoff > 1e-7:
        warnings.warn(
            f"step {step:g} bohr: estimated truncation {truncation:.1e}, round-off {roundoff:.1e}",
            StepSizeWarning,
            stacklevel=2,
        )

    def psi(x):
        return m.outgoing_wave(ion, surface, E, x, theta)

    h = step
    dpsi = (psi(r - 2 * h) - 8 * psi(r - h) + 8 * psi(r + h) - psi(r + 2 * h)) / (12 * h)
    return float(np.imag(np.conj(psi(r)) * dpsi))


def fringe_count(ion, surface, E, geometry, samples_per_period=400):
    """Number of local maxima of j_z(rho) on [0, inf), rho = 0 included.

    Works in t = L / sqrt(rho^2 + L^2), a monotone map of [0, inf) onto
    (0, 1], where j_z is proportional to g(t) = t^5 [1 + K cos(u t + pi - mu pi/2)]
    with u = 2 k d.  Maxima of g are the + to - sign changes of
    g'(t) / t^4 = 5 (1 + K cos psi) - K u t sin psi; the end point t = 1
    (the screen center) is a maximum when g'(1) > 0.
    """
    k = math.sqrt(2.0 * E)
    K, mu = surface.reflection, surface.phase_index
    u = 2.0 * k * surface.wall_distance
    n = max(4001, int(samples_per_period * u / (2.0 * math.pi)) + 1)
    t = np.linspace(0.0, 1.0, n)
    psi = u * t + math.pi - mu * math.pi / 2.0
    slope = 5.0 * (1.0 + K * np.cos(psi)) - K * u * t * np.sin(psi)
    signs = np.sign(slope[1:])
    signs = signs[signs != 0]
    interior = int(np.count_nonzero((signs[:-1] > 0) & (signs[1:] < 0)))
    return interior + int(slope[-1] > 0)


# --- validation grid ---------------------------------------------------------

#: Default relative tolerances per check.
CHECK_TOLERANCES = {"sigma1": 1e-8, "sigma2": 1e-10, "screen_total": 1e-8, "identity": 1e-12}

GRIDS = {
    "full": dict(
        photon_ev=(0.8, 1.0, 1.5),
        reflection=(0.0, 0.4, 0.7, 1.0),
        phase_index=(1.0, 1.5, 2.0),
        wall_distance=(60.0, 100.0, 500.0),
    ),
    "small": dict(
        photon_ev=(1.0,),
        reflection=(0.0, 0.7, 1.0),
        phase_index=(1.0, 2.0),
        wall_distance=(100.0,),
    ),
}


@dataclass(frozen=True)
class CheckResult:
    check: str
    E_ph_eV: float
    K: float
    mu: float
    d_bohr: float
    analytic_au: float
    oracle_au: float
    rel_diff: float
    tol: float
    passed: bool


def relative_difference(analytic, oracle):
    """|a - o| / |a|, falling back to |a - o| when the analytic value is zero."""
    diff = abs(analytic - oracle)
    return diff / abs(analytic) if analytic != 0 else diff


def validate_point(ion, surface, photon_ev, geometry=m.ScreenGeometry(), tol=None, spec=QuadratureSpec()):
    """Run every oracle comparison at one parameter point."""
    E = ev_to_hartree(photon_ev) - ion.binding_energy
    u = m.action(surface, E)
    s1 = m.sigma1(ion, surface, E)
    s2 = m.sigma2(ion, surface, E)
    pairs = {
        "sigma1": (s1, oracle_sigma1(ion, surface, E, spec)),
        "sigma2": (s2, oracle_sigma2(ion, surface, E, spec)),
        "screen_total": (m.sigma_total(ion, surface, E), oracle_screen_total(ion, surface, E, geometry, spec)),
        "identity": (m.sigma0(ion, E) * m.modulation(u, surface), s1 + s2),
    }
    results = []
    for name, (analytic, oracle) in pairs.items():
        limit = CHECK_TOLERANCES[name] if tol is None else tol
        rel = relative_difference(analytic, oracle)
        results.append(
            CheckResult(
                name, photon_ev, surface.reflection, surface.phase_index, surface.wall_distance,
                analytic, oracle, rel, limit, bool(rel <= limit),
            )
        )
    return results


def run_validation(grid="full", ion=m.IonModel(), tol=None, spec=QuadratureSpec()):
    """Evaluate all checks on a named grid (``"small"`` or ``"full"``) in a fixed order."""
    axes = GRIDS[grid]
    results = []
    for photon_ev in axes["photon_ev"]:
        for K in axes["reflection"]:
            for mu in axes["phase_index"]:
                for d in axes["wall_distance"]:
                    surface = m.SurfaceModel(K, mu, d)
                    results.extend(validate_point(ion, surface, photon_ev, tol=tol, spec=spec))
    return results


def format_report(results):
    """CSV text of a validation run, one row per check."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(CheckResult)])
    for row in results:
        values = astuple(row)
        writer.writerow(
            [values[0]]
            + [f"{v:.11e}" for v in values[1:9]]
            + ["pass" if values[9] else "FAIL"]
        )
    return buf.getvalue()


class ValidationSummary(NamedTuple):
    total: int
    failed: int


def summarize(results):
    return ValidationSummary(len(results), sum(not r.passed for r in results))
