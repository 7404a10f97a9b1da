import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streakbench import timebase
from streakbench.constants import AU_KM, MU_EARTH_KM3_S2
from streakbench.propagation import (
    DegenerateGeometryError,
    StateVector,
    UnsupportedOrbitError,
    angular_momentum,
    observation_geometry,
    orbital_period_s,
    propagate_two_body,
    solve_kepler,
    specific_energy,
    sun_position,
)

from conftest import EPOCH_2025, make_tle
from oracles import kepler_bisection


class TestKepler:
    def test_circular_orbit_identity(self):
        assert solve_kepler(1.3, 0.0) == pytest.approx(1.3, abs=1e-12)

    def test_symmetry_at_pi(self):
        assert solve_kepler(math.pi, 0.5) == pytest.approx(math.pi, abs=1e-12)

    def test_against_bisection_oracle(self):
        e_anom = solve_kepler(1.0, 0.3)
        assert e_anom == pytest.approx(kepler_bisection(1.0, 0.3), abs=1e-10)

    def test_residual_contract(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            m = rng.uniform(0.0, 2.0 * math.pi)
            e = rng.uniform(0.0, 0.999)
            e_anom = solve_kepler(m, e)
            assert abs(e_anom - e * math.sin(e_anom) - m) < 1e-12

    def test_high_eccentricity_near_zero_anomaly(self):
        # The classic hard corner for Newton starts.
        e_anom = solve_kepler(1e-3, 0.99)
        assert abs(e_anom - 0.99 * math.sin(e_anom) - 1e-3) < 1e-12

    def test_rejects_hyperbolic(self):
        with pytest.raises(UnsupportedOrbitError):
            solve_kepler(1.0, 1.0)


class TestTwoBody:
    def test_one_period_return(self):
        tle = make_tle(eccentricity=0.1, inclination_deg=63.4, mean_anomaly_deg=10.0)
        period = orbital_period_s(tle)
        s0 = propagate_two_body(tle, tle.epoch)
        s1 = propagate_two_body(tle, tle.epoch + period)
        assert np.linalg.norm(s1.position - s0.position) < 1e-6

    def test_circular_equatorial_radius(self):
        tle = make_tle(eccentricity=0.0, inclination_deg=0.0, mean_motion=16.0)
        n_rad = 16.0 * 2.0 * math.pi / 86400.0
        expected_radius = (MU_EARTH_KM3_S2 / n_rad**2) ** (1.0 / 3.0)
        for dt in np.linspace(0.0, 5000.0, 17):
            state = propagate_two_body(tle, tle.epoch + dt)
            assert np.linalg.norm(state.position) == pytest.approx(expected_radius, rel=1e-12)

    def test_energy_and_momentum_conserved(self):
        tle = make_tle(eccentricity=0.3, inclination_deg=30.0, arg_perigee_deg=75.0)
        states = [
            propagate_two_body(tle, tle.epoch + dt)
            for dt in np.linspace(0.0, 2.0 * orbital_period_s(tle), 100)
        ]
        energies = np.array([specific_energy(s) for s in states])
        momenta = np.array([angular_momentum(s) for s in states])
        assert np.ptp(energies) < 1e-9 * abs(energies[0])
        assert np.ptp(momenta) < 1e-9 * momenta[0]

    def test_vis_viva(self):
        tle = make_tle(eccentricity=0.2)
        n_rad = tle.mean_motion * 2.0 * math.pi / 86400.0
        a = (MU_EARTH_KM3_S2 / n_rad**2) ** (1.0 / 3.0)
        state = propagate_two_body(tle, tle.epoch + 1234.5)
        r = np.linalg.norm(state.position)
        v2 = float(state.velocity @ state.velocity)
        assert v2 == pytest.approx(MU_EARTH_KM3_S2 * (2.0 / r - 1.0 / a), rel=1e-12)

    def test_warns_far_from_epoch(self):
        tle = make_tle()
        with pytest.warns(UserWarning):
            propagate_two_body(tle, tle.epoch + 40 * 86400.0)


class TestSun:
    def test_radius_within_annual_band(self):
        for month in range(12):
            t = EPOCH_2025 + month * 30.4 * 86400.0
            radius_au = np.linalg.norm(sun_position(t)) / AU_KM
            assert 0.983 <= radius_au <= 1.017

    def test_march_equinox_crossing(self):
        # Scan declination sign change around the known 2000-03-20 07:35 UTC
        # equinox; the crossing must land within a day of it.
        reference = timebase.parse_utc("2000-03-20T07:35:00Z")
        ts = np.arange(reference - 3 * 86400.0, reference + 3 * 86400.0, 3600.0)
        zs = np.array([sun_position(t)[2] for t in ts])
        signs = np.sign(zs)
        (crossings,) = np.nonzero(np.diff(signs) > 0)
        assert len(crossings) == 1
        assert abs(ts[crossings[0]] - reference) < 86400.0

    def test_annual_periodicity(self):
        t0 = EPOCH_2025
        year = 365.25 * 86400.0
        d0 = sun_position(t0)
        d1 = sun_position(t0 + year)
        cosang = float(d0 @ d1 / (np.linalg.norm(d0) * np.linalg.norm(d1)))
        assert math.degrees(math.acos(min(1.0, cosang))) < 0.1

    def test_epoch_range_guard(self):
        with pytest.raises(ValueError):
            sun_position(60000.0 * 86400.0)


def _state(position, epoch=0.0):
    return StateVector(epoch=epoch, position=np.array(position, dtype=float), velocity=np.zeros(3))


class TestObservationGeometry:
    def test_axis_aligned(self):
        geom = observation_geometry(
            _state([7000.0, 0.0, 0.0]), _state([8000.0, 0.0, 0.0]), np.array([AU_KM, 0.0, 0.0])
        )
        assert geom.ra == 0.0
        assert geom.dec == 0.0
        assert geom.range_delta_km == pytest.approx(1000.0)

    def test_aligned_sun_and_observer_gives_zero_phase(self):
        # Sun and observer on the same side of the target along one line.
        geom = observation_geometry(
            _state([7000.0, 0.0, 0.0]),
            _state([8000.0, 0.0, 0.0]),
            np.array([7000.0 - AU_KM, 0.0, 0.0]),
        )
        assert geom.phase_angle == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_sun_gives_right_angle(self):
        geom = observation_geometry(
            _state([7000.0, 0.0, 0.0]),
            _state([8000.0, 0.0, 0.0]),
            np.array([8000.0, AU_KM, 0.0]),
        )
        assert geom.phase_angle == pytest.approx(math.pi / 2, abs=1e-9)

    def test_coincident_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            observation_geometry(
                _state([7000.0, 0.0, 0.0]), _state([7000.0, 0.0, 0.0]), np.array([AU_KM, 0, 0])
            )

    def test_epoch_mismatch_rejected(self):
        with pytest.raises(ValueError):
            observation_geometry(
                _state([7000.0, 0.0, 0.0], epoch=0.0),
                _state([8000.0, 0.0, 0.0], epoch=10.0),
                np.array([AU_KM, 0, 0]),
            )

    @settings(max_examples=50, deadline=None)
    @given(
        shift=st.tuples(
            st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)
        )
    )
    def test_translation_invariance(self, shift):
        obs = np.array([7000.0, 100.0, -300.0])
        tgt = np.array([8000.0, -2000.0, 500.0])
        sun = np.array([AU_KM, 0.3 * AU_KM, -0.1 * AU_KM])
        offset = np.array(shift)
        g0 = observation_geometry(_state(obs), _state(tgt), sun)
        g1 = observation_geometry(_state(obs + offset), _state(tgt + offset), sun + offset)
        assert g1.phase_angle == pytest.approx(g0.phase_angle, abs=1e-9)
        assert g1.range_delta_km == pytest.approx(g0.range_delta_km, rel=1e-12)
        assert g1.sun_range_r_km == pytest.approx(g0.sun_range_r_km, rel=1e-12)

    def test_ra_dec_ranges(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            obs = rng.uniform(-9000, 9000, 3)
            tgt = rng.uniform(-9000, 9000, 3)
            if np.linalg.norm(tgt - obs) < 1.0:
                continue
            geom = observation_geometry(_state(obs), _state(tgt), np.array([AU_KM, 0, 0]))
            assert 0.0 <= geom.ra < 2.0 * math.pi
            assert -math.pi / 2 <= geom.dec <= math.pi / 2
            assert 0.0 <= geom.phase_angle <= math.pi
