import math

import numpy as np
import pytest

from streakbench import timebase
from streakbench.catalog import TleRecord
from streakbench.constants import EARTH_RADIUS_KM, MU_EARTH_KM3_S2
from streakbench.photometry import RadiometryConfig
from streakbench.sensor_geometry import Attitude, NoiseConfig, SensorModel

EPOCH_2025 = timebase.parse_utc("2025-06-01T00:00:00Z")


def mean_motion_rev_day(altitude_km: float) -> float:
    a = EARTH_RADIUS_KM + altitude_km
    return math.sqrt(MU_EARTH_KM3_S2 / a**3) * 86400.0 / (2.0 * math.pi)


def make_tle(
    norad_id: int = 90001,
    epoch: float = EPOCH_2025,
    inclination_deg: float = 45.0,
    raan_deg: float = 0.0,
    eccentricity: float = 1e-4,
    arg_perigee_deg: float = 0.0,
    mean_anomaly_deg: float = 0.0,
    mean_motion: float | None = None,
    altitude_km: float = 500.0,
    bstar: float = 0.0,
    name: str = "TEST OBJECT",
) -> TleRecord:
    return TleRecord(
        name=name,
        norad_id=norad_id,
        epoch=epoch,
        inclination=math.radians(inclination_deg),
        raan=math.radians(raan_deg),
        eccentricity=eccentricity,
        arg_perigee=math.radians(arg_perigee_deg),
        mean_anomaly=math.radians(mean_anomaly_deg % 360.0),
        mean_motion=mean_motion if mean_motion is not None else mean_motion_rev_day(altitude_km),
        bstar=bstar,
        line1_checksum=0,
        line2_checksum=0,
    )


@pytest.fixture
def swarm_sensor() -> SensorModel:
    return SensorModel(
        focal_length_um=19980.0,
        n_x=752,
        n_y=580,
        x_p_um=8.6,
        y_p_um=8.3,
        t_int_s=1.0,
        psf_sigma_px=(1.0, 1.0),
        efficiency=0.48,
        magnitude_limit=6.5,
        noise=NoiseConfig(),
    )


@pytest.fixture
def square_sensor() -> SensorModel:
    # Square pixels so rotations act identically in metric and pixel space.
    return SensorModel(
        focal_length_um=20000.0,
        n_x=600,
        n_y=600,
        x_p_um=8.0,
        y_p_um=8.0,
        t_int_s=1.0,
        psf_sigma_px=(1.0, 1.0),
        efficiency=0.5,
        magnitude_limit=8.0,
    )


@pytest.fixture
def radiometry() -> RadiometryConfig:
    return RadiometryConfig()


def random_attitude(rng: np.random.Generator, max_abs_dec_deg: float = 85.0) -> Attitude:
    alpha = rng.uniform(0.0, 2.0 * math.pi)
    delta = math.asin(rng.uniform(-1.0, 1.0))
    cap = math.radians(max_abs_dec_deg)
    delta = max(-cap, min(cap, delta))
    roll = rng.uniform(0.0, 2.0 * math.pi)
    return Attitude(alpha0=alpha, delta0=delta, roll_phi0=roll)


def write_star_catalog(path, stars: list[tuple[int, float, float, float]]) -> None:
    lines = ["# id ra_deg dec_deg mag"]
    lines += [f"{sid} {ra:.6f} {dec:.6f} {mag:.3f}" for sid, ra, dec, mag in stars]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_tle_file(path, records) -> None:
    from streakbench.catalog import format_tle

    lines = []
    for rec in records:
        l1, l2 = format_tle(rec)
        lines += [rec.name, l1, l2]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def find_closest_approach(observer, target, t0: float, span_s: float) -> float:
    """Epoch of minimum observer-target range, coarse scan plus refinement."""
    from streakbench.propagation import propagate_two_body

    def dist(t: float) -> float:
        d = propagate_two_body(target, t).position - propagate_two_body(observer, t).position
        return float(np.linalg.norm(d))

    ts = np.arange(t0, t0 + span_s, 5.0)
    distances = [dist(float(t)) for t in ts]
    best = int(np.argmin(distances))
    lo = float(ts[max(best - 1, 0)])
    hi = float(ts[min(best + 1, len(ts) - 1)])
    for _ in range(60):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if dist(m1) < dist(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


ENCOUNTER_CFG = """
[optics]
focal_length = 19980.0
n_x = {n_x}
n_y = {n_y}
x_p = 8.6
y_p = 8.3

[detector]
integration_time = 1.0
pixel_spread = 1.0
lens_efficiency = 0.8
quantum_efficiency = 0.6
star_magnitude_limit = 6.5
full_well = 100000

[radiometry]
anchor_magnitude = 6.5
anchor_electrons = 5000

[noise]
sky_background = {sky}
read_noise = {read}
dark_current = 0.0
gain = 1.0
shot_noise = {shot}

[attitude]
mode = random
require_streak = true
min_streak_px = {min_streak}
max_tries = 20000

[catalogues]
star_catalog = stars.txt
rso_catalog = rsos.tle
observer_tle = observer.tle
rso_radius = 1.0
rso_albedo = 0.3
rso_diffusion = 0.8

[scenario]
epoch = {epoch}
frame_interval = {interval}
"""


def build_encounter_scenario(
    directory,
    count: int,
    interval_s: float,
    n_x: int = 376,
    n_y: int = 290,
    sky: float = 200.0,
    read: float = 2.0,
    shot: bool = False,
    min_streak: float = 12.0,
    star_mags=(8.5, 9.0, 9.5, 10.0),
):
    """Write a scenario whose frames straddle a timed close approach between
    two circular orbits with planes 52 degrees apart, guaranteeing bright
    multi-pixel streaks at every epoch.  Stars are fainter than the
    magnitude limit, so frames carry exactly one streak and nothing else.
    """
    from streakbench import timebase

    rng = np.random.default_rng(99)
    stars = [
        (i + 1, float(rng.uniform(0, 360)), float(rng.uniform(-80, 80)), float(mag))
        for i, mag in enumerate(star_mags)
    ]
    write_star_catalog(directory / "stars.txt", stars)

    observer = make_tle(norad_id=11111, name="OBSERVER", inclination_deg=45.0,
                        mean_anomaly_deg=0.0)
    target = make_tle(norad_id=22222, name="TARGET", inclination_deg=97.0,
                      mean_anomaly_deg=358.0)
    write_tle_file(directory / "observer.tle", [observer])
    write_tle_file(directory / "rsos.tle", [target])

    t_star = find_closest_approach(observer, target, EPOCH_2025, 600.0)
    epoch0 = t_star - (count - 1) * interval_s / 2.0
    epoch_text = timebase.datetime_from_seconds(epoch0).strftime("%Y-%m-%dT%H:%M:%S.%f")
    cfg_path = directory / "scene.cfg"
    cfg_path.write_text(
        ENCOUNTER_CFG.format(
            n_x=n_x,
            n_y=n_y,
            sky=sky,
            read=read,
            shot=str(shot).lower(),
            min_streak=min_streak,
            epoch=epoch_text,
            interval=interval_s,
        )
    )
    return cfg_path
