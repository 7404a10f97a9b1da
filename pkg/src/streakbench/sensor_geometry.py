"""Sensor model, attitude handling and pinhole projection.

Conventions
-----------
* The celestial frame (CCS) is Earth-centred inertial; directions are unit
  vectors built from right ascension / declination.
* The sensor frame (STCS) has +z along the boresight; with zero roll the
  +y axis is the projection of celestial north onto the plane normal to the
  boresight, and roll rotates x/y right-handedly about the boresight.
* Metric image coordinates are micrometres from the detector corner, with
  the principal point defaulting to the detector centre.  Pixel coordinates
  are continuous, ``col = x_um / x_p``; integer binning is a rasterisation
  concern, not a projection one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
POLE_MARGIN_RAD = 1e-9


class DegenerateAttitudeError(ValueError):
    """Boresight at a celestial pole: the north-reference roll is undefined."""


@dataclass(frozen=True)
class NoiseConfig:
    """Additive raster noise: uniform sky, Gaussian read, constant dark,
    optional Poisson shot noise, and the electrons-per-DN gain used at
    quantisation.  Consumed by the renderer."""

    sky_background_e: float = 0.0
    read_noise_e: float = 0.0
    dark_current_e_s: float = 0.0
    gain_e_per_dn: float = 1.0
    enable_shot_noise: bool = True

    def __post_init__(self):
        if min(self.sky_background_e, self.read_noise_e, self.dark_current_e_s) < 0.0:
            raise ValueError("noise levels must be >= 0")
        if self.gain_e_per_dn <= 0.0:
            raise ValueError("gain must be > 0")


@dataclass(frozen=True)
class SensorModel:
    """Optics, detector and exposure parameters of one star tracker."""

    focal_length_um: float
    n_x: int
    n_y: int
    x_p_um: float
    y_p_um: float
    t_int_s: float = 1.0
    psf_sigma_px: tuple[float, float] = (1.0, 1.0)
    efficiency: float = 1.0
    magnitude_limit: float = 6.5
    principal_point_um: tuple[float, float] | None = None
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self):
        if self.focal_length_um <= 0.0:
            raise ValueError("focal length must be > 0")
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("pixel counts must be >= 1")
        if self.x_p_um <= 0.0 or self.y_p_um <= 0.0:
            raise ValueError("pixel pitches must be > 0")
        if self.t_int_s <= 0.0:
            raise ValueError("integration time must be > 0")
        if min(self.psf_sigma_px) <= 0.0:
            raise ValueError("PSF sigmas must be > 0")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must be in (0, 1]")

    @property
    def width_um(self) -> float:
        return self.n_x * self.x_p_um

    @property
    def height_um(self) -> float:
        return self.n_y * self.y_p_um

    @property
    def principal_point(self) -> tuple[float, float]:
        if self.principal_point_um is not None:
            return self.principal_point_um
        return (self.width_um / 2.0, self.height_um / 2.0)


@dataclass(frozen=True)
class Attitude:
    """Boresight right ascension / declination plus roll, radians."""

    alpha0: float
    delta0: float
    roll_phi0: float = 0.0

    def __post_init__(self):
        if not -math.pi / 2 <= self.delta0 <= math.pi / 2:
            raise ValueError(f"delta0 {self.delta0!r} outside [-pi/2, pi/2]")


def unit_vector_from_radec(ra: float, dec: float) -> np.ndarray:
    cos_dec = math.cos(dec)
    return np.array([cos_dec * math.cos(ra), cos_dec * math.sin(ra), math.sin(dec)])


def boresight_vector(att: Attitude) -> np.ndarray:
    return unit_vector_from_radec(att.alpha0, att.delta0)


def fov_angles(sensor: SensorModel) -> tuple[float, float]:
    """Full field-of-view angles (theta_x, theta_y) in radians."""
    theta_x = 2.0 * math.atan(sensor.width_um / (2.0 * sensor.focal_length_um))
    theta_y = 2.0 * math.atan(sensor.height_um / (2.0 * sensor.focal_length_um))
    return theta_x, theta_y


def attitude_matrix(att: Attitude) -> np.ndarray:
    """Rotation from the celestial frame into the sensor frame.

    Rows are the sensor axes expressed in the celestial frame, so
    M @ boresight == (0, 0, 1).  Raises for boresights at a pole, where
    the celestial-north reference direction degenerates.
    """
    if abs(att.delta0) >= math.pi / 2 - POLE_MARGIN_RAD:
        raise DegenerateAttitudeError(
            f"boresight declination {att.delta0!r} too close to a pole"
        )
    b = boresight_vector(att)
    north = np.array([0.0, 0.0, 1.0])
    y0 = north - float(north @ b) * b
    y0 /= np.linalg.norm(y0)
    x0 = np.cross(y0, b)
    c, s = math.cos(att.roll_phi0), math.sin(att.roll_phi0)
    x_axis = c * x0 + s * np.cross(b, x0)
    y_axis = c * y0 + s * np.cross(b, y0)
    return np.array([x_axis, y_axis, b])


def project_to_detector(
    target_dir: np.ndarray, att: Attitude, sensor: SensorModel
) -> tuple[float, float] | None:
    """Project a unit celestial direction to continuous pixel coordinates.

    Admission is two-staged: first the angular pre-test against both FOV
    half-angles, then the exact rectangular detector bounds after the
    pinhole mapping.  Returns None for anything not landing on the
    detector, including targets behind the focal plane.
    """
    b = boresight_vector(att)
    cos_theta = max(-1.0, min(1.0, float(np.dot(b, target_dir))))
    theta = math.acos(cos_theta)
    theta_x, theta_y = fov_angles(sensor)
    if theta >= theta_x / 2.0 or theta >= theta_y / 2.0:
        return None
    omega_s = attitude_matrix(att) @ np.asarray(target_dir, dtype=float)
    if omega_s[2] <= 0.0:
        return None
    x0, y0 = sensor.principal_point
    x_i = sensor.focal_length_um * omega_s[0] / omega_s[2] + x0
    y_i = sensor.focal_length_um * omega_s[1] / omega_s[2] + y0
    if not (0.0 <= x_i < sensor.width_um and 0.0 <= y_i < sensor.height_um):
        return None
    return (x_i / sensor.x_p_um, y_i / sensor.y_p_um)


def project_ray(
    target_dir: np.ndarray, att: Attitude, sensor: SensorModel
) -> tuple[float, float] | None:
    """Unbounded pinhole projection used for streak endpoints.

    No FOV or detector-bounds admission: endpoints of a moving target may
    lie far outside the raster and are clipped downstream.  Returns None
    only when the target is at or behind the focal plane.
    """
    omega_s = attitude_matrix(att) @ np.asarray(target_dir, dtype=float)
    if omega_s[2] <= 1e-12:
        return None
    x0, y0 = sensor.principal_point
    x_i = sensor.focal_length_um * omega_s[0] / omega_s[2] + x0
    y_i = sensor.focal_length_um * omega_s[1] / omega_s[2] + y0
    return (x_i / sensor.x_p_um, y_i / sensor.y_p_um)


def back_project(
    pixel: tuple[float, float], att: Attitude, sensor: SensorModel
) -> np.ndarray:
    """Unit celestial direction through a continuous pixel coordinate."""
    x0, y0 = sensor.principal_point
    x_s = pixel[0] * sensor.x_p_um - x0
    y_s = pixel[1] * sensor.y_p_um - y0
    direction = np.array([x_s, y_s, sensor.focal_length_um])
    direction /= np.linalg.norm(direction)
    return attitude_matrix(att).T @ direction
