"""Unit conversions between laboratory units and Hartree atomic units."""

import numpy as np

#: CODATA 2018 value of the Hartree energy in eV.
HARTREE_EV = 27.211386245988

#: Bohr radius squared in cm^2 (a0 = 0.529177210903e-8 cm).
BOHR2_CM2 = 2.8002852e-17


def ev_to_hartree(value):
    """Convert an energy from eV to hartree."""
    return np.asarray(value, dtype=float) / HARTREE_EV if np.ndim(value) else float(value) / HARTREE_EV


def hartree_to_ev(value):
    """Convert an energy from hartree to eV."""
    return np.asarray(value, dtype=float) * HARTREE_EV if np.ndim(value) else float(value) * HARTREE_EV


def au_area_to_cm2(value):
    """Convert a cross section from bohr^2 to cm^2 (display only)."""
    return np.asarray(value, dtype=float) * BOHR2_CM2 if np.ndim(value) else float(value) * BOHR2_CM2
