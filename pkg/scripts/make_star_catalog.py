#!/usr/bin/env python3
"""Generate a synthetic all-sky star catalogue in the 4-column interchange
format (`id ra_deg dec_deg mag`).

Real bright-star catalogues cannot be redistributed here, so demo scenes
use a synthetic sky: isotropic positions, magnitudes drawn so that counts
roughly triple per magnitude step, plus an optional dense cluster around a
chosen boresight for validation scenes.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np


def synthesize(
    count: int,
    seed: int,
    mag_min: float,
    mag_max: float,
    cluster: tuple[float, float, float, int] | None = None,
) -> list[str]:
    rng = np.random.default_rng(seed)
    lines = [f"# synthetic star catalogue, {count} entries, seed {seed}"]
    ras = rng.uniform(0.0, 360.0, count)
    decs = np.degrees(np.arcsin(rng.uniform(-1.0, 1.0, count)))
    # N(<m) ~ 10^(0.5 m): inverse-cdf sampling of an exponential magnitude law
    u = rng.uniform(0.0, 1.0, count)
    span = 10.0 ** (0.5 * (mag_max - mag_min))
    mags = mag_min + 2.0 * np.log10(1.0 + u * (span - 1.0))
    star_id = 1
    for ra, dec, mag in zip(ras, decs, mags):
        lines.append(f"{star_id} {ra:.6f} {dec:.6f} {mag:.2f}")
        star_id += 1
    if cluster is not None:
        ra0, dec0, radius_deg, n = cluster
        c_ra = ra0 + rng.uniform(-radius_deg, radius_deg, int(n))
        c_dec = np.clip(dec0 + rng.uniform(-radius_deg, radius_deg, int(n)), -90.0, 90.0)
        c_mag = rng.uniform(mag_min, mag_max, int(n))
        for ra, dec, mag in zip(c_ra, c_dec, c_mag):
            lines.append(f"{star_id} {ra % 360.0:.6f} {dec:.6f} {mag:.2f}")
            star_id += 1
    return lines


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=9095)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--mag-min", type=float, default=1.0)
    ap.add_argument("--mag-max", type=float, default=6.5)
    ap.add_argument(
        "--cluster",
        nargs=4,
        type=float,
        metavar=("RA_DEG", "DEC_DEG", "RADIUS_DEG", "COUNT"),
        default=None,
        help="add a dense star cluster around a boresight",
    )
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    cluster = tuple(args.cluster) if args.cluster else None
    lines = synthesize(args.count, args.seed, args.mag_min, args.mag_max, cluster)
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines) - 1} stars to {args.out}")


if __name__ == "__main__":
    main()
