"""Two-body orbit propagation, solar ephemeris and observation geometry.

TLE mean elements are propagated with plain Keplerian two-body motion: the
goal is plausible streak geometry for detector benchmarking, not precision
ephemerides.  The propagator sits behind one function so a perturbation
model can be slotted in later without touching callers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import TleRecord
from .constants import AU_KM, EARTH_RADIUS_KM, MU_EARTH_KM3_S2
from .timebase import SECONDS_PER_DAY

TWO_PI = 2.0 * math.pi

KEPLER_TOLERANCE = 1e-12
KEPLER_MAX_ITERATIONS = 50
PROPAGATION_WARN_SPAN_S = 30.0 * SECONDS_PER_DAY


class PropagationError(ValueError):
    pass


class UnsupportedOrbitError(PropagationError):
    """Eccentricity outside [0, 1): not representable by this propagator."""


class KeplerConvergenceError(PropagationError):
    """Bug sentinel: the safeguarded solver must converge for any e < 1."""


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    """Earth-centred inertial state: position km, velocity km/s."""

    epoch: float
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        vel = np.asarray(self.velocity, dtype=float)
        if pos.shape != (3,) or vel.shape != (3,):
            raise ValueError("position and velocity must be 3-vectors")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel))):
            raise ValueError("non-finite state components")
        pos.flags.writeable = False
        vel.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


@dataclass(frozen=True)
class ObservationGeometry:
    """Line-of-sight direction plus the ranges and solar phase angle that
    drive the reflected-brightness model."""

    ra: float
    dec: float
    range_delta_km: float
    sun_range_r_km: float
    phase_angle: float

    def __post_init__(self):
        if self.range_delta_km <= 0.0 or self.sun_range_r_km <= 0.0:
            raise ValueError("ranges must be positive")
        if not 0.0 <= self.phase_angle <= math.pi:
            raise ValueError("phase angle outside [0, pi]")


def solve_kepler(mean_anomaly: float, eccentricity: float) -> float:
    """Solve E - e*sin(E) = M by safeguarded Newton iteration.

    The anomaly is reduced modulo 2pi for the iteration and the whole turns
    are added back, so the residual contract |E - e sinE - M| < 1e-12 holds
    for the reduced anomaly.
    """
    if not 0.0 <= eccentricity < 1.0:
        raise UnsupportedOrbitError(f"eccentricity {eccentricity!r} outside [0, 1)")
    m_reduced = math.fmod(mean_anomaly, TWO_PI)
    if m_reduced < 0.0:
        m_reduced += TWO_PI
    turns = mean_anomaly - m_reduced

    # f(E) = E - e sinE - M is strictly increasing, so [M-e, M+e] brackets
    # the root for any e < 1.
    lo = m_reduced - eccentricity
    hi = m_reduced + eccentricity
    e_anom = m_reduced + eccentricity * math.sin(m_reduced)
    for _ in range(KEPLER_MAX_ITERATIONS):
        f = e_anom - eccentricity * math.sin(e_anom) - m_reduced
        if abs(f) < KEPLER_TOLERANCE:
            return e_anom + turns
        if f > 0.0:
            hi = e_anom
        else:
            lo = e_anom
        step = f / (1.0 - eccentricity * math.cos(e_anom))
        candidate = e_anom - step
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        e_anom = candidate
    raise KeplerConvergenceError(
        f"no convergence for M={mean_anomaly!r}, e={eccentricity!r}"
    )


def _rot_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_x(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def propagate_two_body(tle: TleRecord, epoch: float) -> StateVector:
    """Keplerian state of a TLE at ``epoch`` (UTC seconds since J2000).

    Semi-major axis comes from the mean motion via a = (mu/n^2)^(1/3); the
    mean anomaly advances linearly; bstar is deliberately ignored.  Beyond
    +-30 days from the element epoch a warning is emitted because mean
    elements decay in usefulness.
    """
    if not 0.0 <= tle.eccentricity < 1.0:
        raise UnsupportedOrbitError(f"eccentricity {tle.eccentricity!r} >= 1")
    dt = epoch - tle.epoch
    if abs(dt) > PROPAGATION_WARN_SPAN_S:
        warnings.warn(
            f"propagating {abs(dt) / SECONDS_PER_DAY:.1f} days from the TLE epoch "
            f"of object {tle.norad_id}; two-body accuracy degrades",
            stacklevel=2,
        )
    n = tle.mean_motion * TWO_PI / SECONDS_PER_DAY  # rad/s
    a = (MU_EARTH_KM3_S2 / (n * n)) ** (1.0 / 3.0)
    e = tle.eccentricity
    mean_anomaly = math.fmod(tle.mean_anomaly + n * dt, TWO_PI)
    e_anom = solve_kepler(mean_anomaly, e)
    cos_e, sin_e = math.cos(e_anom), math.sin(e_anom)
    r = a * (1.0 - e * cos_e)
    root = math.sqrt(1.0 - e * e)
    pos_pf = np.array([a * (cos_e - e), a * root * sin_e, 0.0])
    v_scale = math.sqrt(MU_EARTH_KM3_S2 * a) / r
    vel_pf = np.array([-v_scale * sin_e, v_scale * root * cos_e, 0.0])
    rotation = _rot_z(tle.raan) @ _rot_x(tle.inclination) @ _rot_z(tle.arg_perigee)
    return StateVector(epoch=epoch, position=rotation @ pos_pf, velocity=rotation @ vel_pf)


def orbital_period_s(tle: TleRecord) -> float:
    return SECONDS_PER_DAY / tle.mean_motion


def sun_position(epoch: float) -> np.ndarray:
    """Geocentric inertial Sun position in km from a low-precision analytic
    ephemeris (mean longitude / mean anomaly polynomials plus the
    ecliptic-to-equatorial rotation); direction good to a few hundredths of
    a degree, radius within the annual 0.983-1.017 AU band.
    """
    d = epoch / SECONDS_PER_DAY  # days since J2000
    if abs(d) > 55000.0:  # ~150 years; outside the fit's validity
        raise ValueError("sun_position supports epochs between years 1950 and 2100")
    mean_longitude = math.radians((280.460 + 0.9856474 * d) % 360.0)
    mean_anomaly = math.radians((357.528 + 0.9856003 * d) % 360.0)
    ecliptic_longitude = (
        mean_longitude
        + math.radians(1.915) * math.sin(mean_anomaly)
        + math.radians(0.020) * math.sin(2.0 * mean_anomaly)
    )
    obliquity = math.radians(23.439 - 4.0e-7 * d)
    radius_au = (
        1.00014 - 0.01671 * math.cos(mean_anomaly) - 0.00014 * math.cos(2.0 * mean_anomaly)
    )
    direction = np.array(
        [
            math.cos(ecliptic_longitude),
            math.cos(obliquity) * math.sin(ecliptic_longitude),
            math.sin(obliquity) * math.sin(ecliptic_longitude),
        ]
    )
    return radius_au * AU_KM * direction


def observation_geometry(
    observer: StateVector, target: StateVector, sun: np.ndarray
) -> ObservationGeometry:
    """Astrometric direction, ranges and solar phase angle of ``target`` as
    seen from ``observer``; both unit vectors of the phase angle emanate
    from the target."""
    if abs(observer.epoch - target.epoch) > 1e-6:
        raise ValueError(
            f"observer epoch {observer.epoch!r} != target epoch {target.epoch!r}"
        )
    rel = target.position - observer.position
    delta = float(np.linalg.norm(rel))
    if delta < 1e-9:
        raise DegenerateGeometryError("observer and target coincide")
    los = rel / delta
    ra = math.atan2(los[1], los[0]) % TWO_PI
    dec = math.asin(max(-1.0, min(1.0, float(los[2]))))
    sun_rel = np.asarray(sun, dtype=float) - target.position
    sun_range = float(np.linalg.norm(sun_rel))
    if sun_range < 1e-9:
        raise DegenerateGeometryError("target coincides with the sun position")
    cos_phase = float(np.dot(sun_rel / sun_range, -los))
    phase = math.acos(max(-1.0, min(1.0, cos_phase)))
    return ObservationGeometry(
        ra=ra,
        dec=dec,
        range_delta_km=delta,
        sun_range_r_km=sun_range,
        phase_angle=phase,
    )


def specific_energy(state: StateVector) -> float:
    """v^2/2 - mu/r; conserved along any two-body arc."""
    r = float(np.linalg.norm(state.position))
    v2 = float(np.dot(state.velocity, state.velocity))
    return 0.5 * v2 - MU_EARTH_KM3_S2 / r


def angular_momentum(state: StateVector) -> float:
    return float(np.linalg.norm(np.cross(state.position, state.velocity)))


__all__ = [
    "AU_KM",
    "EARTH_RADIUS_KM",
    "MU_EARTH_KM3_S2",
    "DegenerateGeometryError",
    "KeplerConvergenceError",
    "ObservationGeometry",
    "PropagationError",
    "StateVector",
    "UnsupportedOrbitError",
    "angular_momentum",
    "observation_geometry",
    "orbital_period_s",
    "propagate_two_body",
    "solve_kepler",
    "specific_energy",
    "sun_position",
]
