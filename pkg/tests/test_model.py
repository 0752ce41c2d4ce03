import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from photodetach import model as m
from photodetach.units import ev_to_hartree

MUS = (0.0, 0.5, 1.0, 1.5, 2.0)

# int_0^1 t^2 cos(u t - mu pi/2) dt from 40-digit mpmath quadrature
A1_REFERENCE = {
    (1, 0): 0.2391336269283829281,
    (1, 1): 0.2232442754839327307,
    (1, 1.5): -0.01123546815502699861,
    (1, 2): -0.2391336269283829281,
    (10, 0): -0.07009549944868729076,
    (10, 1): 0.06934858763170494405,
    (10, 1.5): 0.09860185957091279061,
    (10, 2): 0.07009549944868729076,
    (100, 0): -0.004890179905357831632,
    (100, 1): -0.008724737213354215732,
    (100, 1.5): -0.002711441475332675893,
    (100, 2): 0.004890179905357831632,
}


def electron_energy(ion, photon_ev):
    return ev_to_hartree(photon_ev) - ion.binding_energy


class TestTypes:
    def test_ion_defaults(self, ion):
        assert ion.normalization == 0.31552
        assert ion.light_speed == 137.0
        assert ion.binding_energy == pytest.approx(0.027716, rel=2e-5)
        assert ion.binding_wavenumber == pytest.approx(math.sqrt(2 * ion.binding_energy))

    @pytest.mark.parametrize("field", ["binding_energy", "normalization", "light_speed"])
    def test_ion_rejects_nonpositive(self, field):
        with pytest.raises(m.DomainError):
            m.IonModel(**{field: 0.0})

    @pytest.mark.parametrize("K", [-0.1, 1.01, float("nan")])
    def test_surface_rejects_reflection(self, K):
        with pytest.raises(m.DomainError):
            m.SurfaceModel(K, 1.0, 100.0)

    def test_surface_rejects_distance(self):
        with pytest.raises(m.DomainError):
            m.SurfaceModel(0.5, 1.0, 0.0)

    def test_close_wall_warns(self):
        with pytest.warns(m.ValidityWarning):
            m.SurfaceModel(0.5, 1.0, 50.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            m.SurfaceModel(0.5, 1.0, 60.0)

    @given(st.floats(0.0, 1.0))
    def test_absorption_complements_reflection(self, K):
        T = m.SurfaceModel(K, 1.0, 100.0).absorption
        assert T**2 + K**2 == pytest.approx(1.0, abs=4.5e-16)

    def test_detachment_point(self, ion):
        p = m.DetachmentPoint.from_photon_energy(ev_to_hartree(1.0), ion)
        assert p.photon_energy == pytest.approx(ev_to_hartree(1.0), rel=1e-15)
        assert p.wavenumber == pytest.approx(math.sqrt(2 * p.energy))
        assert p.action(100.0) == pytest.approx(200.0 * p.wavenumber)
        assert p.photon_energy > ion.binding_energy
        with pytest.raises(m.DomainError, match="threshold"):
            m.DetachmentPoint.from_photon_energy(ev_to_hartree(0.5), ion)
        with pytest.raises(m.DomainError):
            m.DetachmentPoint(0.0)

    def test_angle(self):
        m.Angle(math.pi, 0.0)
        with pytest.raises(m.DomainError):
            m.Angle(-0.1)
        with pytest.raises(m.DomainError):
            m.Angle(0.1, 2 * math.pi)

    def test_screen_grid(self):
        g = m.ScreenGeometry(100.0, rho_count=11)
        np.testing.assert_allclose(g.rho_grid(), np.linspace(0, 1000.0, 11))
        with pytest.raises(m.DomainError):
            m.ScreenGeometry(0.0)


class TestSigma0:
    def test_vanishes_at_threshold_and_infinity(self, ion):
        peak = m.sigma0(ion, ion.binding_energy)
        assert m.sigma0(ion, 1e-14) < 1e-12 * peak
        assert m.sigma0(ion, 1e6) < 1e-10 * peak

    def test_value_at_binding_energy(self, ion):
        Eb, B, c = ion.binding_energy, ion.normalization, ion.light_speed
        expected = 2 * math.sqrt(2) * math.pi**2 * B**2 / (3 * c * Eb**1.5)
        assert m.sigma0(ion, Eb) == pytest.approx(expected, rel=1e-14)
        # 40-digit evaluation for the default ion
        assert m.sigma0(ion, Eb) == pytest.approx(1.4653889479065475, rel=1e-14)

    def test_peak_at_binding_energy(self, ion):
        # golden-section search on log E, independent of the analytic stationary point
        res = minimize_scalar(lambda x: -m.sigma0(ion, math.exp(x)), bracket=(-6.0, -3.0), method="golden",
                              options={"xtol": 1e-12})
        assert math.exp(res.x) == pytest.approx(ion.binding_energy, rel=1e-6)

    @pytest.mark.parametrize("E", [0.0, -1.0, float("nan")])
    def test_rejects(self, ion, E):
        with pytest.raises(m.DomainError):
            m.sigma0(ion, E)


class TestA1:
    @pytest.mark.parametrize("key", sorted(A1_REFERENCE))
    def test_reference_values(self, key):
        u, mu = key
        assert m.a1(u, mu) == pytest.approx(A1_REFERENCE[key], rel=1e-12, abs=1e-15)

    def test_spot_value(self):
        assert m.a1(math.pi, 2.0) == pytest.approx(2 / math.pi**2, abs=1e-12)

    @pytest.mark.parametrize("mu", MUS)
    def test_zero_limit(self, mu):
        assert m.a1(0.0, mu) == pytest.approx(math.cos(mu * math.pi / 2) / 3, abs=1e-16)
        assert m.a1(1e-9, mu) == pytest.approx(math.cos(mu * math.pi / 2) / 3, abs=1e-9)

    def test_decays(self):
        u = np.array([1e3, 1e4, 1e5])
        assert np.all(np.abs(m.a1(u, 1.3)) <= 1.0 / u + 2.0 / u**2 + 4.0 / u**3)

    @pytest.mark.parametrize("mu", MUS)
    def test_branch_continuity(self, mu):
        phi = mu * math.pi / 2
        u = np.linspace(0.5 * m.SERIES_THRESHOLD, 2.0 * m.SERIES_THRESHOLD, 101)
        series = m._moment_series(u, phi, 2)[0]
        direct = m._a1_closed(u, phi)
        assert np.max(np.abs(series - direct)) <= 1e-10

    def test_series_vs_low_order_maclaurin(self):
        # cos(p)/3 + (u/4) sin(p) - (u^2/10) cos(p) + O(u^3)
        u, phi = 1e-3, 0.7
        low = math.cos(phi) / 3 + u / 4 * math.sin(phi) - u**2 / 10 * math.cos(phi)
        assert m._moment_series(u, phi, 2)[0] == pytest.approx(low, abs=u**3)

    def test_broadcasts(self):
        out = m.a1(np.array([0.0, 0.01, 1.0, 10.0]), 1.5)
        assert out.shape == (4,) and np.all(np.isfinite(out))

    def test_rejects_negative(self):
        with pytest.raises(m.DomainError):
            m.a1(-1e-3, 1.0)


class TestModulation:
    @given(st.floats(0.0, 1e4), st.floats(-10, 10))
    def test_transparent_wall(self, u, mu):
        assert m.modulation_function(u, 0.0, mu) == 1.0

    @pytest.mark.parametrize("K", [0.4, 0.7, 1.0])
    @pytest.mark.parametrize("mu", [1.0, 1.5, 2.0])
    def test_small_u_limit(self, K, mu):
        assert m.modulation_function(1e-12, K, mu) == pytest.approx(1 - K * math.cos(mu * math.pi / 2), abs=1e-8)

    def test_spot(self):
        surface = m.SurfaceModel(1.0, 2.0, 100.0)
        assert m.modulation(math.pi, surface) == pytest.approx(1 - 6 / math.pi**2, abs=1e-12)
        assert m.modulation(math.pi, surface) == pytest.approx(0.39207, abs=1e-5)

    @given(st.floats(0.1, 1e4), st.floats(0.0, 1.0), st.floats(-4, 4))
    def test_envelope(self, u, K, mu):
        bound = 3 * K * (1 / u + 2 / u**2 + 4 / u**3)
        assert abs(m.modulation_function(u, K, mu) - 1) <= bound * (1 + 1e-12) + 1e-15

    @given(st.floats(0.0, 200.0), st.floats(0.0, 1.0), st.floats(-4, 4))
    def test_period_in_mu(self, u, K, mu):
        assert m.modulation_function(u, K, mu + 4) == pytest.approx(m.modulation_function(u, K, mu), abs=1e-12)

    @pytest.mark.parametrize("u", [0.01, 0.3, 2.0, 17.0, 150.0])
    @pytest.mark.parametrize("mu", [0.3, 1.0, 1.5, 2.0])
    def test_gradient_against_central_differences(self, u, mu):
        K = 0.7
        dA_du, dA_dK, dA_dmu = m.modulation_gradient(u, K, mu)
        A = m.modulation_function
        h = 1e-6
        hu = h * max(u, 1.0)
        fd_u = (A(u + hu, K, mu) - A(max(u - hu, 0.0), K, mu)) / (u + hu - max(u - hu, 0.0))
        fd_K = (A(u, K + h, mu) - A(u, K - h, mu)) / (2 * h)
        fd_mu = (A(u, K, mu + h) - A(u, K, mu - h)) / (2 * h)
        assert dA_du == pytest.approx(fd_u, rel=1e-5, abs=1e-8)
        assert dA_dK == pytest.approx(fd_K, rel=1e-7, abs=1e-9)
        assert dA_dmu == pytest.approx(fd_mu, rel=1e-7, abs=1e-9)


class TestCrossSections:
    def test_transparent_wall(self, ion):
        s = m.SurfaceModel(0.0, 1.3, 100.0)
        E = np.linspace(0.001, 0.1, 17)
        np.testing.assert_allclose(m.sigma1(ion, s, E), m.sigma0(ion, E) / 2, rtol=1e-15)
        np.testing.assert_allclose(m.sigma2(ion, s, E), m.sigma0(ion, E) / 2, rtol=1e-15)
        np.testing.assert_array_equal(m.sigma_total(ion, s, E), m.sigma0(ion, E))

    def test_hard_wall(self, ion, hard_wall):
        E = 0.01
        u = m.action(hard_wall, E)
        assert m.sigma2(ion, hard_wall, E) == 0.0
        assert m.sigma1(ion, hard_wall, E) == pytest.approx(m.sigma0(ion, E) / 2 * (2 - 6 * m.a1(u, 2.0)), rel=1e-14)

    def test_spot_total(self, ion, hard_wall):
        # E chosen so that u = 2 d sqrt(2E) = pi
        E = (math.pi / (2 * hard_wall.wall_distance)) ** 2 / 2
        assert m.action(hard_wall, E) == pytest.approx(math.pi, rel=1e-15)
        expected = m.sigma0(ion, E) * (1 - 6 / math.pi**2)
        assert m.sigma_total(ion, hard_wall, E) == pytest.approx(expected, rel=1e-12)

    def test_far_wall(self, ion):
        E = 0.02
        far = m.SurfaceModel(1.0, 1.0, 1e9)
        assert m.sigma_total(ion, far, E) == pytest.approx(m.sigma0(ion, E), rel=1e-8)

    @settings(max_examples=300)
    @given(
        st.floats(1e-4, 0.5), st.floats(0.0, 1.0), st.floats(-4.0, 4.0), st.floats(50.5, 1000.0)
    )
    def test_parts_sum_to_total(self, E, K, mu, d):
        ion = m.IonModel()
        s = m.SurfaceModel(K, mu, d)
        total = m.sigma0(ion, E) * m.modulation(m.action(s, E), s)
        assert m.sigma1(ion, s, E) + m.sigma2(ion, s, E) == pytest.approx(total, rel=1e-12)
        assert m.sigma_total(ion, s, E) == pytest.approx(total, rel=1e-15)

    @given(st.floats(1e-4, 0.5), st.floats(0.0, 1.0), st.floats(-4.0, 4.0), st.floats(50.5, 1000.0))
    def test_nonnegative(self, E, K, mu, d):
        ion = m.IonModel()
        s = m.SurfaceModel(K, mu, d)
        assert m.sigma1(ion, s, E) >= -1e-15 * m.sigma0(ion, E)
        assert m.sigma2(ion, s, E) >= 0.0


class TestFluxes:
    def test_radial_flux_edge(self, ion, hard_wall):
        forward = m.radial_flux(ion, hard_wall, 0.01, 10.0, 0.0)
        assert m.radial_flux(ion, hard_wall, 0.01, 10.0, math.pi / 2) <= 1e-25 * forward

    def test_radial_flux_forward(self, ion, hard_wall):
        E, r = 0.01, 1e3
        k = math.sqrt(2 * E)
        pref = 16 * k**3 * ion.normalization**2 / (2 * ion.binding_energy + k**2) ** 4
        expected = pref * (2 + 2 * math.cos(2 * k * hard_wall.wall_distance)) / r**2
        assert m.radial_flux(ion, hard_wall, E, r, 0.0) == pytest.approx(expected, rel=1e-13)

    @given(st.floats(0.0, 1.0), st.floats(-4, 4), st.floats(0.0, math.pi / 2))
    def test_radial_bracket_bounds(self, K, mu, theta):
        ion = m.IonModel()
        s = m.SurfaceModel(K, mu, 100.0)
        E = 0.01
        free = m.radial_flux(ion, m.SurfaceModel(0.0, 0.0, 100.0), E, 1.0, theta)
        j = m.radial_flux(ion, s, E, 1.0, theta)
        assert (1 - K) ** 2 * free * (1 - 1e-12) - 1e-300 <= j <= (1 + K) ** 2 * free * (1 + 1e-12) + 1e-300

    def test_domain_errors(self, ion, hard_wall):
        with pytest.raises(m.DomainError):
            m.radial_flux(ion, hard_wall, 0.01, 0.0, 0.1)
        with pytest.raises(m.DomainError):
            m.radial_flux(ion, hard_wall, 0.01, 1.0, 2.0)
        with pytest.raises(m.DomainError):
            m.absorbed_flux(ion, hard_wall, 0.01, 1.0, 1.0)
        with pytest.raises(m.DomainError):
            m.screen_flux(ion, hard_wall, 0.01, m.ScreenGeometry(), -1.0)

    def test_absorbed_flux_limits(self, ion):
        theta = np.linspace(math.pi / 2, math.pi, 7)
        assert np.all(m.absorbed_flux(ion, m.SurfaceModel(1.0, 1.0, 100.0), 0.01, 5.0, theta) == 0.0)
        free = m.absorbed_flux(ion, m.SurfaceModel(0.0, 1.0, 100.0), 0.01, 5.0, theta)
        half = m.absorbed_flux(ion, m.SurfaceModel(0.6, 1.0, 100.0), 0.01, 5.0, theta)
        np.testing.assert_allclose(half, 0.64 * free, rtol=1e-14)

    def test_differential_cross_section_branches(self, ion, hard_wall):
        E = 0.01
        theta = np.array([0.1, 0.7, math.pi / 2, 2.0, 3.0])
        dcs = m.differential_cross_section(ion, hard_wall, E, theta)
        scale = 2 * math.pi * (E + ion.binding_energy) / ion.light_speed
        np.testing.assert_allclose(dcs[:2], scale * m.radial_flux(ion, hard_wall, E, 1.0, theta[:2]), rtol=1e-14)
        assert dcs[2] <= 1e-30 * dcs[0]
        np.testing.assert_array_equal(dcs[3:], 0.0)
        assert np.all(dcs >= 0)

    def test_screen_center(self, ion):
        s = m.SurfaceModel(0.5, 1.0, 100.0)
        g = m.ScreenGeometry(1e4)
        E = 0.01
        k = math.sqrt(2 * E)
        pref = 32 * k**3 * ion.normalization**2 / (2 * ion.binding_energy + k**2) ** 4
        expected = pref / g.distance**2 * (1 + 0.5 * math.cos(2 * k * 100.0 + math.pi - math.pi / 2))
        assert m.screen_flux(ion, s, E, g, 0.0) == pytest.approx(expected, rel=1e-13)

    @given(st.floats(0.0, 1.0), st.floats(-4, 4), st.floats(0.0, 1e6))
    def test_screen_bracket_bounds(self, K, mu, rho):
        ion = m.IonModel()
        g = m.ScreenGeometry(1e4)
        E = 0.01
        envelope = m.screen_flux(ion, m.SurfaceModel(0.0, 0.0, 100.0), E, g, rho)
        j = m.screen_flux(ion, m.SurfaceModel(K, mu, 100.0), E, g, rho)
        assert j >= 0.0
        assert (1 - K) * envelope * (1 - 1e-12) <= j <= (1 + K) * envelope * (1 + 1e-12)

    def test_screen_decays(self, ion, hard_wall):
        j = m.screen_flux(ion, hard_wall, 0.01, m.ScreenGeometry(1e4), np.array([0.0, 1e6, 1e8]))
        assert j[2] < 1e-9 * j[0] and j[2] < j[1]


class TestOutgoingWave:
    def test_transparent_wall_is_single_source(self, ion):
        s = m.SurfaceModel(0.0, 1.0, 100.0)
        E, r, theta = 0.01, 1e4, 0.4
        k = math.sqrt(2 * E)
        amp = 4j * k**2 * ion.normalization / (2 * ion.binding_energy + k**2) ** 2
        r1 = r - s.wall_distance * math.cos(theta)
        expected = amp * math.cos(theta) * np.exp(1j * k * r1) / (k * r)
        assert m.outgoing_wave(ion, s, E, r, theta) == pytest.approx(expected, rel=1e-10)

    def test_vanishes_at_grazing(self, ion, hard_wall):
        forward = abs(m.outgoing_wave(ion, hard_wall, 0.01, 1e3, 0.3))
        assert abs(m.outgoing_wave(ion, hard_wall, 0.01, 1e3, math.pi / 2)) < 1e-15 * forward

    @pytest.mark.parametrize("theta", [0.0, 0.5, 1.2])
    def test_flux_is_k_times_density(self, ion, theta):
        s = m.SurfaceModel(0.6, 1.5, 120.0)
        E, r = 0.015, 3e3
        psi = m.outgoing_wave(ion, s, E, r, theta)
        assert math.sqrt(2 * E) * abs(psi) ** 2 == pytest.approx(m.radial_flux(ion, s, E, r, theta), rel=1e-12)
