import math

import numpy as np
import pytest

from streakbench.sensor_geometry import (
    Attitude,
    DegenerateAttitudeError,
    SensorModel,
    attitude_matrix,
    back_project,
    boresight_vector,
    fov_angles,
    project_ray,
    project_to_detector,
    unit_vector_from_radec,
)

from conftest import random_attitude


class TestBoresight:
    def test_x_axis(self):
        assert boresight_vector(Attitude(0.0, 0.0)) == pytest.approx([1.0, 0.0, 0.0])

    def test_y_axis(self):
        assert boresight_vector(Attitude(math.pi / 2, 0.0)) == pytest.approx(
            [0.0, 1.0, 0.0], abs=1e-15
        )

    def test_pole(self):
        assert boresight_vector(Attitude(1.234, math.pi / 2)) == pytest.approx(
            [0.0, 0.0, 1.0], abs=1e-15
        )

    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            att = random_attitude(rng)
            assert np.linalg.norm(boresight_vector(att)) == pytest.approx(1.0, abs=1e-15)


class TestFov:
    def test_swarm_values(self, swarm_sensor):
        theta_x, theta_y = fov_angles(swarm_sensor)
        assert theta_x == pytest.approx(2.0 * math.atan(752 * 8.6 / (2 * 19980)), abs=1e-15)
        assert theta_y == pytest.approx(2.0 * math.atan(580 * 8.3 / (2 * 19980)), abs=1e-15)
        assert math.degrees(theta_x) == pytest.approx(18.38, abs=0.01)
        assert math.degrees(theta_y) == pytest.approx(13.74, abs=0.01)

    def test_right_angle_case(self):
        sensor = SensorModel(
            focal_length_um=500.0, n_x=100, n_y=100, x_p_um=10.0, y_p_um=10.0
        )
        theta_x, _ = fov_angles(sensor)  # n_x * x_p == 2 f
        assert theta_x == pytest.approx(math.pi / 2, abs=1e-15)


class TestAttitudeMatrix:
    def test_maps_boresight_to_z(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            att = random_attitude(rng)
            m = attitude_matrix(att)
            assert np.linalg.norm(m @ boresight_vector(att) - [0, 0, 1]) < 1e-12

    def test_orthonormal(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            m = attitude_matrix(random_attitude(rng))
            assert np.abs(m @ m.T - np.eye(3)).max() < 1e-12
            assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)

    def test_half_turn_roll_flips_xy_rows(self):
        att = Attitude(0.7, -0.2, 0.4)
        flipped = Attitude(0.7, -0.2, 0.4 + math.pi)
        m0 = attitude_matrix(att)
        m1 = attitude_matrix(flipped)
        assert np.abs(m1[:2] + m0[:2]).max() < 1e-12
        assert np.abs(m1[2] - m0[2]).max() < 1e-12

    def test_zero_roll_y_axis_is_projected_north(self):
        att = Attitude(1.1, 0.3, 0.0)
        m = attitude_matrix(att)
        b = boresight_vector(att)
        north = np.array([0.0, 0.0, 1.0])
        expected = north - (north @ b) * b
        expected /= np.linalg.norm(expected)
        assert np.abs(m[1] - expected).max() < 1e-12

    def test_pole_rejected(self):
        with pytest.raises(DegenerateAttitudeError):
            attitude_matrix(Attitude(0.0, math.pi / 2))


class TestProjection:
    def test_on_axis_hits_principal_point(self, swarm_sensor):
        att = Attitude(0.3, 0.1, 0.9)
        pixel = project_to_detector(boresight_vector(att), att, swarm_sensor)
        x0, y0 = swarm_sensor.principal_point
        assert pixel == pytest.approx((x0 / 8.6, y0 / 8.3), abs=1e-9)
        assert pixel == pytest.approx((752 / 2, 580 / 2), abs=1e-9)

    def test_beyond_fov_absent(self, swarm_sensor):
        att = Attitude(0.0, 0.0, 0.0)
        theta_x, _ = fov_angles(swarm_sensor)
        offset = theta_x / 2 + 1e-4
        target = unit_vector_from_radec(offset, 0.0)
        assert project_to_detector(target, att, swarm_sensor) is None

    def test_one_degree_offset_column_shift(self, swarm_sensor):
        # Offset along the +x_s great circle: delta = 0 attitude means +x_s
        # is -RA... verify via back-projection-free arithmetic instead: use
        # roll 0 and offset in declination, which moves along +y_s.
        att = Attitude(0.0, 0.0, 0.0)
        target = unit_vector_from_radec(0.0, math.radians(1.0))
        pixel = project_to_detector(target, att, swarm_sensor)
        assert pixel is not None
        expected_shift = 19980.0 * math.tan(math.radians(1.0)) / 8.3
        assert pixel[1] - 580 / 2 == pytest.approx(expected_shift, abs=1e-9)
        assert pixel[0] == pytest.approx(752 / 2, abs=1e-9)

    def test_one_degree_offset_magnitude_in_x(self, square_sensor):
        att = Attitude(0.0, 0.0, 0.0)
        target = unit_vector_from_radec(math.radians(1.0), 0.0)
        pixel = project_to_detector(target, att, square_sensor)
        assert pixel is not None
        expected = square_sensor.focal_length_um * math.tan(math.radians(1.0)) / 8.0
        assert abs(pixel[0] - 300.0) == pytest.approx(expected, abs=1e-9)

    def test_round_trip(self, swarm_sensor):
        rng = np.random.default_rng(3)
        _, theta_y = fov_angles(swarm_sensor)
        for _ in range(300):
            att = random_attitude(rng)
            # Sample pixels within the admitted circular region.
            angle = rng.uniform(0, 2 * math.pi)
            radius_px = rng.uniform(0.0, 0.9 * swarm_sensor.focal_length_um * math.tan(
                theta_y / 2) / swarm_sensor.x_p_um)
            col = 752 / 2 + radius_px * math.cos(angle)
            row = 580 / 2 + radius_px * math.sin(angle) * 0.7
            direction = back_project((col, row), att, swarm_sensor)
            pixel = project_to_detector(direction, att, swarm_sensor)
            if pixel is None:
                continue
            assert pixel[0] == pytest.approx(col, abs=1e-9)
            assert pixel[1] == pytest.approx(row, abs=1e-9)

    def test_roll_equivariance(self, square_sensor):
        rng = np.random.default_rng(4)
        centre = np.array([300.0, 300.0])
        for _ in range(100):
            att = random_attitude(rng)
            roll = rng.uniform(0, 2 * math.pi)
            rolled = Attitude(att.alpha0, att.delta0, att.roll_phi0 + roll)
            offset = rng.uniform(-40.0, 40.0, 2)
            direction = back_project(tuple(centre + offset), att, square_sensor)
            p0 = project_to_detector(direction, att, square_sensor)
            p1 = project_to_detector(direction, rolled, square_sensor)
            if p0 is None or p1 is None:
                continue
            c, s = math.cos(roll), math.sin(roll)
            rot_minus = np.array([[c, s], [-s, c]])
            expected = rot_minus @ (np.array(p0) - centre) + centre
            assert np.abs(np.array(p1) - expected).max() < 1e-9

    def test_admitted_coordinates_pass_both_checks(self, swarm_sensor):
        rng = np.random.default_rng(5)
        att = Attitude(1.0, 0.2, 2.5)
        b = boresight_vector(att)
        theta_x, theta_y = fov_angles(swarm_sensor)
        hits = 0
        for _ in range(2000):
            perturb = rng.normal(0.0, 0.08, 3)
            direction = b + perturb
            direction /= np.linalg.norm(direction)
            pixel = project_to_detector(direction, att, swarm_sensor)
            if pixel is None:
                continue
            hits += 1
            theta = math.acos(min(1.0, float(b @ direction)))
            assert theta < theta_x / 2 and theta < theta_y / 2
            assert 0 <= pixel[0] < 752 and 0 <= pixel[1] < 580
        assert hits > 50

    def test_behind_focal_plane_absent(self, swarm_sensor):
        att = Attitude(0.0, 0.0, 0.0)
        assert project_ray(np.array([-1.0, 0.0, 0.0]), att, swarm_sensor) is None

    def test_project_ray_matches_detector_projection_in_fov(self, swarm_sensor):
        att = Attitude(2.0, -0.4, 1.0)
        direction = back_project((400.0, 300.0), att, swarm_sensor)
        strict = project_to_detector(direction, att, swarm_sensor)
        loose = project_ray(direction, att, swarm_sensor)
        assert strict == pytest.approx(loose, abs=1e-12)

    def test_project_ray_allows_off_detector(self, swarm_sensor):
        att = Attitude(0.0, 0.0, 0.0)
        target = unit_vector_from_radec(math.radians(12.0), 0.0)
        assert project_to_detector(target, att, swarm_sensor) is None
        pixel = project_ray(target, att, swarm_sensor)
        assert pixel is not None
        assert not 0 <= pixel[0] < 752  # far outside the raster


class TestSensorModelValidation:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SensorModel(focal_length_um=0.0, n_x=10, n_y=10, x_p_um=1.0, y_p_um=1.0)
        with pytest.raises(ValueError):
            SensorModel(focal_length_um=10.0, n_x=0, n_y=10, x_p_um=1.0, y_p_um=1.0)
        with pytest.raises(ValueError):
            SensorModel(
                focal_length_um=10.0, n_x=10, n_y=10, x_p_um=1.0, y_p_um=1.0, efficiency=1.5
            )
        with pytest.raises(ValueError):
            Attitude(0.0, 2.0)
