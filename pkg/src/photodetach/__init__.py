"""Photodetachment of H- near a partially reflecting wall.

Closed-form cross sections, modulation function and screen flux, numerical
oracles that check them, figure-dataset sweeps and a surface-parameter fitter.
"""

from .model import (
    Angle,
    DetachmentPoint,
    DomainError,
    IonModel,
    ScreenGeometry,
    SurfaceModel,
    ValidityWarning,
    a1,
    absorbed_flux,
    action,
    differential_cross_section,
    modulation,
    modulation_function,
    modulation_gradient,
    outgoing_wave,
    radial_flux,
    screen_flux,
    sigma0,
    sigma1,
    sigma2,
    sigma_total,
)
from .units import au_area_to_cm2, ev_to_hartree, hartree_to_ev

__version__ = "0.1.0"
