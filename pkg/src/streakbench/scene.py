"""Scenario configuration files and per-frame scene planning.

A scenario is a flat ``key = value`` text file with sections for optics,
detector, radiometry, noise, attitude sampling and catalogues.  Catalogue
paths are resolved relative to the config file.  Frame planning is fully
deterministic in (config, seed): attitudes, per-frame noise seeds and
epochs derive from counter-based substreams keyed on the frame index.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import timebase
from .catalog import (
    RsoEntry,
    StarEntry,
    TleRecord,
    load_star_catalog,
    load_tle_catalog,
    make_rso_entries,
)
from .photometry import RadiometryConfig, calibration_scale_for_anchor
from .render import (
    ConfigError,
    Scene,
    auto_annotate,
    clip_segment_to_rect,
    rso_streak_segments,
)
from .sensor_geometry import Attitude, NoiseConfig, SensorModel, fov_angles


@dataclass(frozen=True)
class AttitudeSampling:
    mode: str = "random"  # "random" | "fixed"
    fixed: Attitude | None = None
    require_streak: bool = False
    min_streak_px: float = 0.0
    max_tries: int = 2000


@dataclass
class ScenarioConfig:
    sensor: SensorModel
    radiometry: RadiometryConfig
    attitude: AttitudeSampling
    star_catalog: Path | None = None
    rso_catalog: Path | None = None
    observer_tle: Path | None = None
    rso_radius_m: float = 1.0
    rso_albedo: float = 0.3
    rso_diffusion: float = 1.0
    epoch0_s: float = 0.0
    frame_interval_s: float = 60.0


def _get(parser: configparser.ConfigParser, section: str, key: str, kind=float, default=None):
    if not parser.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing required key [{section}] {key}")
        return default
    raw = parser.get(section, key)
    try:
        if kind is bool:
            return parser.getboolean(section, key)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from None


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    for section in ("optics", "detector"):
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}]")

    spread = _get(parser, "detector", "pixel_spread", float, 1.0)
    sigma_x = _get(parser, "detector", "pixel_spread_x", float, spread)
    sigma_y = _get(parser, "detector", "pixel_spread_y", float, spread)
    efficiency = _get(parser, "detector", "lens_efficiency", float, 1.0) * _get(
        parser, "detector", "quantum_efficiency", float, 1.0
    )
    principal = None
    if parser.has_option("detector", "principal_point_x"):
        principal = (
            _get(parser, "detector", "principal_point_x"),
            _get(parser, "detector", "principal_point_y"),
        )
    noise = NoiseConfig(
        sky_background_e=_get(parser, "noise", "sky_background", float, 0.0)
        if parser.has_section("noise")
        else 0.0,
        read_noise_e=_get(parser, "noise", "read_noise", float, 0.0)
        if parser.has_section("noise")
        else 0.0,
        dark_current_e_s=_get(parser, "noise", "dark_current", float, 0.0)
        if parser.has_section("noise")
        else 0.0,
        gain_e_per_dn=_get(parser, "noise", "gain", float, 1.0)
        if parser.has_section("noise")
        else 1.0,
        enable_shot_noise=_get(parser, "noise", "shot_noise", bool, True)
        if parser.has_section("noise")
        else True,
    )
    try:
        sensor = SensorModel(
            focal_length_um=_get(parser, "optics", "focal_length"),
            n_x=_get(parser, "optics", "n_x", int),
            n_y=_get(parser, "optics", "n_y", int),
            x_p_um=_get(parser, "optics", "x_p"),
            y_p_um=_get(parser, "optics", "y_p"),
            t_int_s=_get(parser, "detector", "integration_time", float, 1.0),
            psf_sigma_px=(sigma_x, sigma_y),
            efficiency=efficiency,
            magnitude_limit=_get(parser, "detector", "star_magnitude_limit", float, 6.5),
            principal_point_um=principal,
            noise=noise,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid sensor parameters: {exc}") from None

    rad_kwargs = dict(
        sun_magnitude=_get(parser, "radiometry", "sun_magnitude", float, -26.7),
        sun_irradiance_W_m2=_get(parser, "radiometry", "sun_irradiance", float, 1361.0),
        planck_J_s=_get(parser, "radiometry", "planck_constant", float, 6.62607015e-34),
        full_well_e=_get(parser, "detector", "full_well", float, 100_000.0),
        albedo_area_term=_get(parser, "radiometry", "albedo_area_term", bool, False),
    ) if parser.has_section("radiometry") else dict(
        full_well_e=_get(parser, "detector", "full_well", float, 100_000.0)
    )
    try:
        radiometry = RadiometryConfig(**rad_kwargs)
        has_anchor = parser.has_option("radiometry", "anchor_magnitude")
        has_scale = parser.has_option("radiometry", "calibration_scale")
        if has_anchor and has_scale:
            raise ConfigError(
                "give either [radiometry] calibration_scale or an anchor, not both"
            )
        if has_anchor:
            scale = calibration_scale_for_anchor(
                _get(parser, "radiometry", "anchor_magnitude"),
                _get(parser, "radiometry", "anchor_electrons"),
                sensor,
                radiometry,
            )
            radiometry = RadiometryConfig(**rad_kwargs, calibration_scale=scale)
        elif has_scale:
            radiometry = RadiometryConfig(
                **rad_kwargs, calibration_scale=_get(parser, "radiometry", "calibration_scale")
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid radiometry parameters: {exc}") from None

    mode = "random"
    fixed = None
    sampling = AttitudeSampling()
    if parser.has_section("attitude"):
        mode = parser.get("attitude", "mode", fallback="random").strip().lower()
        if mode not in ("random", "fixed"):
            raise ConfigError(f"attitude mode must be random|fixed, got {mode!r}")
        if mode == "fixed":
            try:
                fixed = Attitude(
                    alpha0=math.radians(_get(parser, "attitude", "alpha0")),
                    delta0=math.radians(_get(parser, "attitude", "delta0")),
                    roll_phi0=math.radians(_get(parser, "attitude", "phi0", float, 0.0)),
                )
            except ValueError as exc:
                raise ConfigError(f"invalid fixed attitude: {exc}") from None
        sampling = AttitudeSampling(
            mode=mode,
            fixed=fixed,
            require_streak=_get(parser, "attitude", "require_streak", bool, False),
            min_streak_px=_get(parser, "attitude", "min_streak_px", float, 0.0),
            max_tries=_get(parser, "attitude", "max_tries", int, 2000),
        )

    def _path_or_none(section: str, key: str) -> Path | None:
        if parser.has_section(section) and parser.has_option(section, key):
            value = parser.get(section, key).strip()
            if value:
                return (path.parent / value).resolve()
        return None

    epoch0 = 0.0
    interval = 60.0
    if parser.has_section("scenario"):
        if parser.has_option("scenario", "epoch"):
            try:
                epoch0 = timebase.parse_utc(parser.get("scenario", "epoch"))
            except ValueError as exc:
                raise ConfigError(f"bad [scenario] epoch: {exc}") from None
        interval = _get(parser, "scenario", "frame_interval", float, 60.0)

    return ScenarioConfig(
        sensor=sensor,
        radiometry=radiometry,
        attitude=sampling,
        star_catalog=_path_or_none("catalogues", "star_catalog"),
        rso_catalog=_path_or_none("catalogues", "rso_catalog"),
        observer_tle=_path_or_none("catalogues", "observer_tle"),
        rso_radius_m=_get(parser, "catalogues", "rso_radius", float, 1.0)
        if parser.has_section("catalogues")
        else 1.0,
        rso_albedo=_get(parser, "catalogues", "rso_albedo", float, 0.3)
        if parser.has_section("catalogues")
        else 0.3,
        rso_diffusion=_get(parser, "catalogues", "rso_diffusion", float, 1.0)
        if parser.has_section("catalogues")
        else 1.0,
        epoch0_s=epoch0,
        frame_interval_s=interval,
    )


def load_inputs(
    cfg: ScenarioConfig,
) -> tuple[list[StarEntry], list[RsoEntry], TleRecord | None]:
    stars = load_star_catalog(cfg.star_catalog) if cfg.star_catalog else []
    rsos: list[RsoEntry] = []
    if cfg.rso_catalog:
        rsos = make_rso_entries(
            load_tle_catalog(cfg.rso_catalog),
            radius_m=cfg.rso_radius_m,
            albedo=cfg.rso_albedo,
            diffusion=cfg.rso_diffusion,
        )
    observer = None
    if cfg.observer_tle:
        records = load_tle_catalog(cfg.observer_tle)
        if not records:
            raise ConfigError(f"observer TLE file {cfg.observer_tle} holds no records")
        observer = records[0]
    if rsos and observer is None:
        raise ConfigError("RSO catalogue configured without an observer TLE")
    if cfg.attitude.require_streak and not rsos:
        raise ConfigError("require_streak set but no RSO catalogue configured")
    return stars, rsos, observer


def sample_attitude(rng: np.random.Generator) -> Attitude:
    """Isotropic pointing: uniform alpha, uniform sin(delta), uniform roll."""
    alpha = float(rng.uniform(0.0, 2.0 * math.pi))
    sin_delta = float(rng.uniform(-1.0, 1.0))
    delta = math.asin(max(-1.0, min(1.0, sin_delta)))
    delta = max(-math.pi / 2 + 1e-6, min(math.pi / 2 - 1e-6, delta))
    roll = float(rng.uniform(0.0, 2.0 * math.pi))
    return Attitude(alpha0=alpha, delta0=delta, roll_phi0=roll)


def _has_streak(
    cfg: ScenarioConfig,
    scene: Scene,
    rsos: list[RsoEntry],
    epoch: float,
) -> bool:
    width, height = cfg.sensor.n_x, cfg.sensor.n_y
    for segment in rso_streak_segments(scene, rsos, epoch, cfg.sensor.t_int_s):
        if auto_annotate(segment.endpoints, cfg.sensor.psf_sigma_px, (width, height)) is None:
            continue
        x1, y1, x2, y2 = segment.endpoints
        clipped = clip_segment_to_rect(x1, y1, x2, y2, 0.0, 0.0, float(width), float(height))
        if clipped is None:
            clipped_len = 0.0
        else:
            clipped_len = math.hypot(x2 - x1, y2 - y1) * (clipped[1] - clipped[0])
        if clipped_len >= cfg.attitude.min_streak_px:
            return True
    return False


@dataclass(frozen=True)
class FramePlan:
    index: int
    scene: Scene
    epoch: float


def plan_frames(
    cfg: ScenarioConfig,
    rsos: list[RsoEntry],
    observer: TleRecord | None,
    count: int,
    seed: int,
) -> Iterator[FramePlan]:
    """Yield (index, scene, epoch) for ``count`` frames.

    Random mode resamples the attitude until a streak is present when
    ``require_streak`` is set, which realises scenes guaranteed to contain
    clear streaks; a cap on attempts turns hopeless geometry into an error
    instead of an endless loop.
    """
    sampling = cfg.attitude
    if sampling.mode == "fixed" and sampling.fixed is None:
        raise ConfigError("fixed attitude mode without alpha0/delta0")
    for index in range(count):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, index))))
        epoch = cfg.epoch0_s + index * cfg.frame_interval_s
        frame_seed = int(rng.integers(0, 2**63))
        if sampling.mode == "fixed":
            attitude = sampling.fixed
        else:
            attitude = sample_attitude(rng)
            if sampling.require_streak:
                for _ in range(sampling.max_tries):
                    scene = Scene(
                        sensor=cfg.sensor,
                        attitude=attitude,
                        radiometry=cfg.radiometry,
                        observer=observer,
                        rng_seed=frame_seed,
                    )
                    if _has_streak(cfg, scene, rsos, epoch):
                        break
                    attitude = sample_attitude(rng)
                else:
                    raise ConfigError(
                        f"frame {index}: no streak-bearing attitude found in "
                        f"{sampling.max_tries} tries"
                    )
        yield FramePlan(
            index=index,
            scene=Scene(
                sensor=cfg.sensor,
                attitude=attitude,
                radiometry=cfg.radiometry,
                observer=observer,
                rng_seed=frame_seed,
            ),
            epoch=epoch,
        )


def describe(cfg: ScenarioConfig) -> list[str]:
    """Human-readable summary with the derived FOV, for validate-config."""
    theta_x, theta_y = fov_angles(cfg.sensor)
    lines = [
        f"detector: {cfg.sensor.n_x} x {cfg.sensor.n_y} px, "
        f"pitch {cfg.sensor.x_p_um} x {cfg.sensor.y_p_um} um, "
        f"focal length {cfg.sensor.focal_length_um} um",
        f"fov_x: {theta_x:.12f} rad ({math.degrees(theta_x):.6f} deg)",
        f"fov_y: {theta_y:.12f} rad ({math.degrees(theta_y):.6f} deg)",
        f"integration time: {cfg.sensor.t_int_s} s, "
        f"psf sigma {cfg.sensor.psf_sigma_px} px, "
        f"magnitude limit {cfg.sensor.magnitude_limit}",
        f"attitude mode: {cfg.attitude.mode}"
        + (", streak required" if cfg.attitude.require_streak else ""),
    ]
    return lines
