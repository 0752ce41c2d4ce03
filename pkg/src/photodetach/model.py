"""
Closed-form photodetachment model of H- in front of a partially reflecting wall.

Everything is in Hartree atomic units (hbar = m_e = e = 1): energies in
hartree, lengths in bohr, cross sections in bohr^2.  All public functions
broadcast over numpy arrays in the energy / angle / radius arguments.

The detached electron leaves the ion as a p-wave along the laser
polarization (z axis).  The half of the wave heading away from the wall
reaches the detector directly; the other half hits the wall, where a
fraction K of the amplitude is reflected with an extra phase mu*pi/2 and the
remainder T = sqrt(1 - K^2) is absorbed.  The reflected wave looks like it
comes from an image source at distance 2d, so the outgoing flux carries
two-path interference governed by the round-trip action u = 2 d k.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .units import ev_to_hartree

#: Electron affinity of H- in eV; used as the default binding energy.
H_MINUS_AFFINITY_EV = 0.7542
#: Normalization constant of the asymptotic H- bound state wave function.
H_MINUS_NORMALIZATION = 0.31552
#: Speed of light in atomic units, rounded as in the model's derivation.
LIGHT_SPEED_AU = 137.0

#: Walls closer than this (bohr) break the asymptotic approximations.
ASYMPTOTIC_MIN_DISTANCE = 50.0

#: Below this action the A1 closed form is replaced by its Maclaurin series.
SERIES_THRESHOLD = 0.05
_SERIES_TERMS = 14


class DomainError(ValueError):
    """An argument lies outside the physical domain of a formula."""


class ValidityWarning(UserWarning):
    """Parameters are legal but outside the regime where the model is accurate."""


@dataclass(frozen=True)
class IonModel:
    """Description of the H- source.

    Parameters
    ----------
    binding_energy : float
        Binding energy E_b of the extra electron (hartree).
    normalization : float
        Asymptotic normalization B of the bound state.
    light_speed : float
        Speed of light c (atomic units).
    """

    binding_energy: float = ev_to_hartree(H_MINUS_AFFINITY_EV)
    normalization: float = H_MINUS_NORMALIZATION
    light_speed: float = LIGHT_SPEED_AU

    def __post_init__(self):
        for name in ("binding_energy", "normalization", "light_speed"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def binding_wavenumber(self):
        """k_b = sqrt(2 E_b)."""
        return math.sqrt(2.0 * self.binding_energy)


@dataclass(frozen=True)
class SurfaceModel:
    """Partially reflecting wall.

    Parameters
    ----------
    reflection : float
        Amplitude reflection parameter K in [0, 1].
    phase_index : float
        Reflection phase index mu; the wall adds a phase mu*pi/2.
    wall_distance : float
        Ion-wall distance d (bohr).
    """

    reflection: float = 1.0
    phase_index: float = 2.0
    wall_distance: float = 100.0

    def __post_init__(self):
        if not 0.0 <= self.reflection <= 1.0:
            raise DomainError(f"reflection K must lie in [0, 1], got {self.reflection!r}")
        if not math.isfinite(self.phase_index):
            raise DomainError(f"phase_index mu must be finite, got {self.phase_index!r}")
        if not (math.isfinite(self.wall_distance) and self.wall_distance > 0):
            raise DomainError(f"wall_distance must be positive, got {self.wall_distance!r}")
        if self.wall_distance <= ASYMPTOTIC_MIN_DISTANCE:
            warnings.warn(
                f"wall distance {self.wall_distance} bohr <= {ASYMPTOTIC_MIN_DISTANCE}: "
                "asymptotic approximations are not reliable",
                ValidityWarning,
                stacklevel=3,
            )

    @property
    def absorption(self):
        """T = sqrt(1 - K^2), the absorbed amplitude fraction."""
        return math.sqrt((1.0 - self.reflection) * (1.0 + self.reflection))


@dataclass(frozen=True)
class DetachmentPoint:
    """A single detachment event at detached-electron energy ``energy``."""

    energy: float
    ion: IonModel = IonModel()

    def __post_init__(self):
        if not (math.isfinite(self.energy) and self.energy > 0):
            raise DomainError(f"electron energy must be positive, got {self.energy!r}")

    @classmethod
    def from_photon_energy(cls, photon_energy, ion=IonModel()):
        """Build from the photon energy (hartree); E = E_ph - E_b."""
        energy = photon_energy - ion.binding_energy
        if not energy > 0:
            raise DomainError(
                f"photon energy {photon_energy!r} hartree is below detachment threshold "
                f"{ion.binding_energy!r} hartree"
            )
        return cls(energy, ion)

    @property
    def wavenumber(self):
        return math.sqrt(2.0 * self.energy)

    @property
    def photon_energy(self):
        return self.energy + self.ion.binding_energy

    def action(self, wall_distance):
        """Round-trip action u = 2 d sqrt(2E)."""
        return 2.0 * wall_distance * self.wavenumber


@dataclass(frozen=True)
class Angle:
    """Direction of the detached electron; the model is symmetric in phi."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi!r}")


@dataclass(frozen=True)
class ScreenGeometry:
    """Detector plane perpendicular to z at distance ``distance`` from the wall.

    ``rho_stop`` and ``rho_count`` describe the radial sample grid; the stop
    defaults to ten screen distances.
    """

    distance: float = 10000.0
    rho_stop: float = None
    rho_count: int = 2001

    def __post_init__(self):
        if not (math.isfinite(self.distance) and self.distance > 0):
            raise DomainError(f"screen distance L must be positive, got {self.distance!r}")
        if self.rho_stop is not None and not self.rho_stop > 0:
            raise DomainError(f"rho_stop must be positive, got {self.rho_stop!r}")
        if self.rho_count < 2:
            raise DomainError(f"rho_count must be >= 2, got {self.rho_count!r}")

    def rho_grid(self):
        stop = 10.0 * self.distance if self.rho_stop is None else self.rho_stop
        return np.linspace(0.0, stop, self.rho_count)


def _positive_energy(E):
    E = np.asarray(E, dtype=float)
    if np.any(~(E > 0)):
        raise DomainError("electron energy must be positive (photon energy above detachment threshold)")
    return E


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def sigma0(ion, E):
    """Free-space photodetachment cross section of H- (bohr^2).

    sigma0(E) = 16 sqrt(2) pi^2 B^2 E^{3/2} / (3 c (E_b + E)^3), peaking at E = E_b.
    """
    E = _positive_energy(E)
    B, c, Eb = ion.normalization, ion.light_speed, ion.binding_energy
    value = 16.0 * math.sqrt(2.0) * math.pi**2 * B**2 * E**1.5 / (3.0 * c * (Eb + E) ** 3)
    return _scalar(value)


# --- trigonometric moments  int_0^1 t^m cos(u t - phi) dt -------------------


def _moment_series(u, phi, m):
    """Maclaurin series of int_0^1 t^m exp(i(u t - phi)) dt.

    Returns the (cosine, sine) moments.  Uses
    sum_n (i u)^n / (n! (n + m + 1)) times exp(-i phi).
    """
    u = np.asarray(u, dtype=float)
    even = np.zeros_like(u)
    odd = np.zeros_like(u)
    power = np.ones_like(u)
    for n in range(_SERIES_TERMS):
        term = power / (math.factorial(n) * (n + m + 1))
        sign = -1.0 if (n // 2) % 2 else 1.0
        if n % 2 == 0:
            even += sign * term
        else:
            odd += sign * term
        power = power * u
    c, s = np.cos(phi), np.sin(phi)
    return even * c + odd * s, odd * c - even * s


def _a1_closed(u, phi):
    s, c = np.sin(u - phi), np.cos(u - phi)
    return s / u + 2.0 * c / u**2 - 2.0 * s / u**3 - 2.0 * np.sin(phi) / u**3


def a1(u, mu):
    """Interference integral A1(u) = int_0^1 t^2 cos(u t - mu pi/2) dt.

    Closed form

        sin(u-p)/u + 2 cos(u-p)/u^2 - 2 sin(u-p)/u^3 - 2 sin(p)/u^3,  p = mu pi/2,

    switched to its Maclaurin series for u < SERIES_THRESHOLD, where the
    closed form cancels catastrophically.  A1(0) = cos(p)/3.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)):
        raise DomainError("action u must be non-negative")
    phi = mu * math.pi / 2.0
    small = u < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, _moment_series(u, phi, 2)[0], _a1_closed(safe, phi))
    return _scalar(out)


def _a1_sine(u, phi):
    """int_0^1 t^2 sin(u t - phi) dt; equals dA1/dphi."""
    small = u < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    s, c = np.sin(safe - phi), np.cos(safe - phi)
    closed = -c / safe + 2.0 * s / safe**2 + 2.0 * c / safe**3 - 2.0 * np.cos(phi) / safe**3
    return np.where(small, _moment_series(u, phi, 2)[1], closed)


def _t3_sine(u, phi):
    """int_0^1 t^3 sin(u t - phi) dt; equals -dA1/du."""
    small = u < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    s, c = np.sin(safe - phi), np.cos(safe - phi)
    closed = (
        -c / safe + 3.0 * s / safe**2 + 6.0 * c / safe**3 - 6.0 * s / safe**4 - 6.0 * np.sin(phi) / safe**4
    )
    return np.where(small, _moment_series(u, phi, 3)[1], closed)


def modulation_function(u, reflection, mu):
    """A(u) = 1 - 3 K A1(u) for raw parameters (no SurfaceModel validation)."""
    return _scalar(1.0 - 3.0 * reflection * np.asarray(a1(u, mu)))


def modulation(u, surface):
    """Modulation function A(u) = sigma / sigma0 for the given wall."""
    return modulation_function(u, surface.reflection, surface.phase_index)


def modulation_gradient(u, reflection, mu):
    """Analytic partial derivatives (dA/du, dA/dK, dA/dmu) of the modulation function."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)):
        raise DomainError("action u must be non-negative")
    phi = mu * math.pi / 2.0
    dA_du = 3.0 * reflection * _t3_sine(u, phi)
    dA_dK = -3.0 * np.asarray(a1(u, mu))
    dA_dmu = -3.0 * reflection * _a1_sine(u, phi) * (math.pi / 2.0)
    return _scalar(dA_du), _scalar(dA_dK), _scalar(dA_dmu)


def action(surface, E):
    """Round-trip action u = 2 d sqrt(2E)."""
    E = _positive_energy(E)
    return _scalar(2.0 * surface.wall_distance * np.sqrt(2.0 * E))


def sigma1(ion, surface, E):
    """Cross section carried by the outgoing (direct + reflected) hemisphere.

    sigma1 = (sigma0/2) [1 + K^2 - 6 K A1(2 d sqrt(2E))]
    """
    K = surface.reflection
    u = action(surface, E)
    return _scalar(0.5 * np.asarray(sigma0(ion, E)) * (1.0 + K**2 - 6.0 * K * np.asarray(a1(u, surface.phase_index))))


def sigma2(ion, surface, E):
    """Cross section absorbed by the wall, sigma0 (1 - K^2) / 2."""
    K = surface.reflection
    return _scalar(np.asarray(sigma0(ion, E)) * (1.0 - K) * (1.0 + K) / 2.0)


def sigma_total(ion, surface, E):
    """Total cross section sigma(E, K) = sigma0(E) A(2 d sqrt(2E))."""
    u = action(surface, E)
    return _scalar(np.asarray(sigma0(ion, E)) * np.asarray(modulation(u, surface)))


# --- fluxes and waves --------------------------------------------------------


def _wavenumbers(ion, E):
    E = _positive_energy(E)
    return np.sqrt(2.0 * E), 2.0 * ion.binding_energy


def _free_flux_prefactor(ion, E):
    """16 k^3 B^2 / (k_b^2 + k^2)^4: one-source radial flux times r^2 / cos^2."""
    k, kb2 = _wavenumbers(ion, E)
    return 16.0 * k**3 * ion.normalization**2 / (kb2 + k**2) ** 4


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("radius must be positive")
    return r


def _check_theta(theta, lo, hi, what):
    theta = np.asarray(theta, dtype=float)
    if np.any(~((theta >= lo) & (theta <= hi))):
        raise DomainError(f"theta must lie in [{lo:.6g}, {hi:.6g}] for the {what} hemisphere")
    return theta


def _outgoing_bracket(surface, k, cos_theta):
    K, mu, d = surface.reflection, surface.phase_index, surface.wall_distance
    return 1.0 + K**2 + 2.0 * K * np.cos(2.0 * k * d * cos_theta + math.pi - mu * math.pi / 2.0)


def radial_flux(ion, surface, E, r, theta):
    """Radial electron flux j_r on the hemisphere facing away from the wall.

    j_r = [16 k^3 B^2 / (k_b^2 + k^2)^4] cos^2(theta)
          [1 + K^2 + 2K cos(2 k d cos(theta) + pi - mu pi/2)] / r^2

    ``theta`` must lie in [0, pi/2]; see :func:`absorbed_flux` for the rest.
    """
    r = _check_radius(r)
    theta = _check_theta(theta, 0.0, math.pi / 2, "outgoing")
    k = np.sqrt(2.0 * _positive_energy(E))
    ct = np.cos(theta)
    return _scalar(_free_flux_prefactor(ion, E) * ct**2 * _outgoing_bracket(surface, k, ct) / r**2)


def absorbed_flux(ion, surface, E, r, theta):
    """Flux of the absorbed wave T * Psi on the wall-facing hemisphere, theta in [pi/2, pi]."""
    r = _check_radius(r)
    theta = _check_theta(theta, math.pi / 2, math.pi, "wall-facing")
    T2 = (1.0 - surface.reflection) * (1.0 + surface.reflection)
    return _scalar(T2 * _free_flux_prefactor(ion, E) * np.cos(theta) ** 2 / r**2)


def differential_cross_section(ion, surface, E, theta):
    """Cross section per unit solid angle on a large enclosing sphere.

    (2 pi E_ph / c) j_r r^2, taking the outgoing branch for theta <= pi/2
    and the absorbed branch beyond.  Integrating over the full sphere gives
    sigma_total.
    """
    theta = _check_theta(theta, 0.0, math.pi, "full")
    E = _positive_energy(E)
    k = np.sqrt(2.0 * E)
    ct = np.cos(theta)
    T2 = (1.0 - surface.reflection) * (1.0 + surface.reflection)
    bracket = np.where(theta <= math.pi / 2, _outgoing_bracket(surface, k, ct), T2)
    flux = _free_flux_prefactor(ion, E) * ct**2 * bracket
    return _scalar(2.0 * math.pi * (E + ion.binding_energy) / ion.light_speed * flux)


def screen_flux(ion, surface, E, geometry, rho):
    """Flux through a screen at distance L, as a function of radial position rho.

    j_z = [32 k^3 B^2 / (k_b^2 + k^2)^4] L^3 / (rho^2 + L^2)^{5/2}
          [1 + K cos(2 k d L / sqrt(rho^2 + L^2) + pi - mu pi/2)]
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho >= 0)):
        raise DomainError("rho must be non-negative")
    E = _positive_energy(E)
    k = np.sqrt(2.0 * E)
    L = geometry.distance
    K, mu, d = surface.reflection, surface.phase_index, surface.wall_distance
    s = np.hypot(rho, L)
    bracket = 1.0 + K * np.cos(2.0 * k * d * L / s + math.pi - mu * math.pi / 2.0)
    return _scalar(2.0 * _free_flux_prefactor(ion, E) * L**3 / s**5 * bracket)


def outgoing_wave(ion, surface, E, r, theta):
    """Complex outgoing wave Psi+ at large distance (theta in [0, pi/2]).

    Psi+ = [4 k^2 B i / (k_b^2 + k^2)^2] cos(theta)
           [exp(-i k d cos(theta)) - K exp(i(k d cos(theta) - mu pi/2))] exp(i k r) / (k r)
    """
    r = _check_radius(r)
    theta = _check_theta(theta, 0.0, math.pi / 2, "outgoing")
    k, kb2 = _wavenumbers(ion, E)
    K, mu, d = surface.reflection, surface.phase_index, surface.wall_distance
    ct = np.cos(theta)
    amplitude = 4.0j * k**2 * ion.normalization / (kb2 + k**2) ** 2
    bracket = np.exp(-1j * k * d * ct) - K * np.exp(1j * (k * d * ct - mu * math.pi / 2.0))
    wave = amplitude * ct * bracket * np.exp(1j * k * r) / (k * r)
    return complex(wave) if np.ndim(wave) == 0 else wave
