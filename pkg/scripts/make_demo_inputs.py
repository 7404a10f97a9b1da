#!/usr/bin/env python3
"""Generate the demo inputs referenced by the shipped configs: a synthetic
star catalogue, an observer TLE, and a small catalogue of co-orbital RSOs
that trail the observer closely enough to streak in every frame.

Writes demo_stars.txt, demo_observer.tle and demo_rsos.tle next to the
config files (configs/ by default).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from make_star_catalog import synthesize  # noqa: E402

from streakbench import timebase  # noqa: E402
from streakbench.catalog import TleRecord, format_tle  # noqa: E402
from streakbench.constants import EARTH_RADIUS_KM, MU_EARTH_KM3_S2  # noqa: E402

DEMO_EPOCH = "2025-06-01T00:00:00Z"
VALIDATION_BORESIGHT = (0.221, -3.667)  # fixed-attitude demo scene, degrees


def mean_motion_rev_day(altitude_km: float) -> float:
    a = EARTH_RADIUS_KM + altitude_km
    n_rad_s = math.sqrt(MU_EARTH_KM3_S2 / a**3)
    return n_rad_s * 86400.0 / (2.0 * math.pi)


def circular_tle(
    norad_id: int,
    name: str,
    epoch_s: float,
    altitude_km: float,
    inclination_deg: float,
    raan_deg: float = 0.0,
    mean_anomaly_deg: float = 0.0,
    eccentricity: float = 1e-4,
) -> TleRecord:
    return TleRecord(
        name=name,
        norad_id=norad_id,
        epoch=epoch_s,
        inclination=math.radians(inclination_deg),
        raan=math.radians(raan_deg),
        eccentricity=eccentricity,
        arg_perigee=0.0,
        mean_anomaly=math.radians(mean_anomaly_deg % 360.0),
        mean_motion=mean_motion_rev_day(altitude_km),
        bstar=0.0,
        line1_checksum=0,
        line2_checksum=0,
    )


def write_tles(path: Path, records: list[TleRecord]) -> None:
    lines = []
    for rec in records:
        l1, l2 = format_tle(rec)
        lines += [rec.name, l1, l2]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "configs"))
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    epoch_s = timebase.parse_utc(DEMO_EPOCH)

    stars = synthesize(
        count=9095,
        seed=args.seed,
        mag_min=1.0,
        mag_max=6.5,
        cluster=(VALIDATION_BORESIGHT[0], VALIDATION_BORESIGHT[1], 5.0, 120),
    )
    (out / "demo_stars.txt").write_text("\n".join(stars) + "\n", encoding="utf-8")

    observer = circular_tle(10001, "DEMO OBSERVER", epoch_s, 500.0, 45.0, raan_deg=10.0)
    write_tles(out / "demo_observer.tle", [observer])

    # Trailing along-track offsets keep the range short (bright streaks);
    # slight inclination offsets fan the targets across the observer's sky
    # and mild eccentricities vary the apparent streak rates.
    rsos = [
        circular_tle(20001, "DEMO TARGET A", epoch_s, 500.0, 45.0, 10.0, -0.67),
        circular_tle(20002, "DEMO TARGET B", epoch_s, 500.0, 45.5, 10.0, -1.25,
                     eccentricity=0.015),
        circular_tle(20003, "DEMO TARGET C", epoch_s, 500.0, 44.5, 10.0, -2.08,
                     eccentricity=0.025),
    ]
    write_tles(out / "demo_rsos.tle", rsos)

    print(f"wrote demo_stars.txt, demo_observer.tle, demo_rsos.tle to {out}")


if __name__ == "__main__":
    main()
