"""Star and RSO catalogue parsing.

Star catalogues are exchanged as plain 4-column text (``id ra_deg dec_deg
mag``); orbital elements arrive as classic 69-character two-line element
sets.  Both parsers validate aggressively: bad lines carry their line
number, TLE checksums are recomputed and compared digit for digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from . import timebase

TLE_LINE_LENGTH = 69
TWO_PI = 2.0 * math.pi


class CatalogError(ValueError):
    """Base class for catalogue parsing failures."""


class CatalogParseError(CatalogError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class CatalogRangeError(CatalogParseError):
    """A parsed value lies outside its physical range."""


class TleError(CatalogError):
    """Base class for TLE decoding failures."""


class TleFormatError(TleError):
    pass


class TleChecksumError(TleError):
    def __init__(self, line_number: int, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(
            f"checksum mismatch on line {line_number}: expected {expected}, found {found}"
        )


@dataclass(frozen=True)
class StarEntry:
    """One catalogue star: astrometric position (radians) plus visual magnitude."""

    id: int
    ra: float
    dec: float
    magnitude: float

    def __post_init__(self):
        if not 0.0 <= self.ra < TWO_PI:
            raise CatalogRangeError(f"ra {self.ra!r} outside [0, 2pi)")
        if not -math.pi / 2 <= self.dec <= math.pi / 2:
            raise CatalogRangeError(f"dec {self.dec!r} outside [-pi/2, pi/2]")
        if not math.isfinite(self.magnitude):
            raise CatalogRangeError(f"magnitude {self.magnitude!r} not finite")


@dataclass(frozen=True)
class TleRecord:
    """Mean orbital elements decoded from one two-line element set.

    Angles are stored in radians, ``mean_motion`` in revolutions/day and
    ``epoch`` as UTC seconds since J2000.  ``bstar`` is retained verbatim for
    provenance but is ignored by the two-body propagator.
    """

    name: str
    norad_id: int
    epoch: float
    inclination: float
    raan: float
    eccentricity: float
    arg_perigee: float
    mean_anomaly: float
    mean_motion: float
    bstar: float
    line1_checksum: int
    line2_checksum: int

    def __post_init__(self):
        if not 0.0 <= self.eccentricity < 1.0:
            raise CatalogRangeError(f"eccentricity {self.eccentricity!r} outside [0, 1)")
        if self.mean_motion <= 0.0:
            raise CatalogRangeError(f"mean_motion {self.mean_motion!r} must be > 0")
        for label, digit in (("line1", self.line1_checksum), ("line2", self.line2_checksum)):
            if digit not in range(10):
                raise CatalogRangeError(f"{label} checksum {digit!r} not a single digit")

    @property
    def epoch_datetime(self):
        return timebase.datetime_from_seconds(self.epoch)


@dataclass(frozen=True)
class RsoEntry:
    """A resident space object: orbit plus the physical terms of the
    reflected-light model (cannonball sphere of radius ``radius_m``)."""

    tle: TleRecord
    radius_m: float
    albedo: float
    diffusion: float

    def __post_init__(self):
        if self.radius_m <= 0.0:
            raise CatalogRangeError(f"radius_m {self.radius_m!r} must be > 0")
        if not 0.0 < self.albedo <= 1.0:
            raise CatalogRangeError(f"albedo {self.albedo!r} outside (0, 1]")
        if not 0.0 <= self.diffusion <= 1.0:
            raise CatalogRangeError(f"diffusion {self.diffusion!r} outside [0, 1]")


# ---------------------------------------------------------------------------
# Star catalogue
# ---------------------------------------------------------------------------

def parse_star_catalog(lines: Iterable[str]) -> list[StarEntry]:
    """Parse ``id ra_deg dec_deg mag`` lines into StarEntry records.

    ``#``-prefixed lines and blank lines are skipped.  Right ascension is
    normalised into [0, 2pi); a declination outside [-90, 90] degrees is an
    error rather than being wrapped, since it is always a data defect.
    """
    entries: list[StarEntry] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 4:
            raise CatalogParseError(
                f"expected 4 columns (id ra_deg dec_deg mag), got {len(tokens)}", lineno
            )
        try:
            star_id = int(tokens[0])
            ra_deg, dec_deg, mag = (float(tok) for tok in tokens[1:])
        except ValueError as exc:
            raise CatalogParseError(f"unparsable field: {exc}", lineno) from None
        if not (math.isfinite(ra_deg) and math.isfinite(dec_deg) and math.isfinite(mag)):
            raise CatalogParseError("non-finite value", lineno)
        if not -90.0 <= dec_deg <= 90.0:
            raise CatalogRangeError(f"dec {dec_deg} deg outside [-90, 90]", lineno)
        ra = math.radians(ra_deg) % TWO_PI
        entries.append(StarEntry(id=star_id, ra=ra, dec=math.radians(dec_deg), magnitude=mag))
    return entries


def load_star_catalog(path: str | Path) -> list[StarEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_star_catalog(fh)


def filter_visible(entries: list[StarEntry], magnitude_limit: float) -> list[StarEntry]:
    """Keep entries at or brighter than the limit (inclusive), order preserved."""
    return [entry for entry in entries if entry.magnitude <= magnitude_limit]


# ---------------------------------------------------------------------------
# Two-line elements
# ---------------------------------------------------------------------------

def tle_checksum(line: str) -> int:
    """Mod-10 checksum over the first 68 characters.

    Digits count face value, a minus sign counts 1, everything else 0.
    """
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _check_line(line: str, expected_prefix: str, which: int) -> None:
    if len(line) != TLE_LINE_LENGTH:
        raise TleFormatError(
            f"line {which} has length {len(line)}, must be {TLE_LINE_LENGTH}"
        )
    if line[:2] != expected_prefix:
        raise TleFormatError(
            f"line {which} must start with {expected_prefix!r}, found {line[:2]!r}"
        )
    stored = line[68]
    if not stored.isdigit():
        raise TleFormatError(f"line {which} checksum column is {stored!r}, not a digit")
    computed = tle_checksum(line)
    if computed != int(stored):
        raise TleChecksumError(which, expected=computed, found=int(stored))


def _parse_exp_field(field: str) -> float:
    """Decode the implied-decimal exponent notation, e.g. ' 34123-4' -> 0.34123e-4."""
    sign = -1.0 if field[0] == "-" else 1.0
    mantissa = field[1:6]
    exponent = field[6:8]
    if not mantissa.strip().isdigit():
        raise TleFormatError(f"bad exponent-field mantissa {field!r}")
    if exponent[0] not in "+-" or not exponent[1].isdigit():
        raise TleFormatError(f"bad exponent-field exponent {field!r}")
    return sign * int(mantissa) * 1e-5 * 10.0 ** int(exponent)


def _tle_year(two_digit: int) -> int:
    # Standard convention: 57-99 -> 1957-1999, 00-56 -> 2000-2056.
    return 1900 + two_digit if two_digit >= 57 else 2000 + two_digit


def parse_tle(line1: str, line2: str, name: str = "") -> TleRecord:
    """Decode one element set, validating length, line prefixes and checksums."""
    _check_line(line1, "1 ", 1)
    _check_line(line2, "2 ", 2)
    try:
        norad_id = int(line1[2:7])
        epoch_year = int(line1[18:20])
        epoch_day = float(line1[20:32])
        bstar = _parse_exp_field(line1[53:61])
        inclination = math.radians(float(line2[8:16]))
        raan = math.radians(float(line2[17:25]))
        eccentricity = float("0." + line2[26:33].strip())
        arg_perigee = math.radians(float(line2[34:42]))
        mean_anomaly = math.radians(float(line2[43:51]))
        mean_motion = float(line2[52:63])
    except (ValueError, TleFormatError) as exc:
        if isinstance(exc, TleFormatError):
            raise
        raise TleFormatError(f"unparsable TLE field: {exc}") from None
    epoch = timebase.seconds_from_year_day(_tle_year(epoch_year), epoch_day)
    return TleRecord(
        name=name.strip(),
        norad_id=norad_id,
        epoch=epoch,
        inclination=inclination,
        raan=raan,
        eccentricity=eccentricity,
        arg_perigee=arg_perigee,
        mean_anomaly=mean_anomaly,
        mean_motion=mean_motion,
        bstar=bstar,
        line1_checksum=int(line1[68]),
        line2_checksum=int(line2[68]),
    )


def _format_exp_field(value: float) -> str:
    if value == 0.0:
        return " 00000+0"
    sign = "-" if value < 0.0 else " "
    x = abs(value)
    exponent = math.floor(math.log10(x)) + 1
    digits = round(x / 10.0 ** exponent * 1e5)
    if digits == 100000:  # rounding carried the mantissa past 1
        digits = 10000
        exponent += 1
    if not -9 <= exponent <= 9:
        raise ValueError(f"value {value!r} not representable in TLE exponent field")
    exp_sign = "-" if exponent <= 0 else "+"
    return f"{sign}{digits:05d}{exp_sign}{abs(exponent)}"


def _with_checksum(body: str) -> str:
    assert len(body) == 68
    return body + str(tle_checksum(body))


def format_tle(record: TleRecord) -> tuple[str, str]:
    """Serialise a record back to a canonical 69-character line pair.

    Drag-rate columns not carried by TleRecord are emitted as zeros; all
    round-trippable fields keep the standard column precision.
    """
    year, day = timebase.year_day_from_seconds(record.epoch)
    if not 1957 <= year <= 2056:
        raise ValueError(f"epoch year {year} outside the two-digit TLE range")
    intl = f"{year % 100:02d}001A  "
    body1 = (
        f"1 {record.norad_id:05d}U {intl} "
        f"{year % 100:02d}{day:012.8f} "
        f" .00000000 "
        f" 00000+0 "
        f"{_format_exp_field(record.bstar)} "
        f"0 "
        f"{999:4d}"
    )
    body2 = (
        f"2 {record.norad_id:05d} "
        f"{math.degrees(record.inclination):8.4f} "
        f"{math.degrees(record.raan):8.4f} "
        f"{round(record.eccentricity * 1e7):07d} "
        f"{math.degrees(record.arg_perigee):8.4f} "
        f"{math.degrees(record.mean_anomaly):8.4f} "
        f"{record.mean_motion:11.8f}"
        f"{1:5d}"
    )
    return _with_checksum(body1), _with_checksum(body2)


def _tle_groups(lines: Iterable[str]) -> Iterator[tuple[str, str, str]]:
    name = ""
    pending: str | None = None
    for raw in lines:
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("1 ") and pending is None:
            pending = line
        elif line.startswith("2 ") and pending is not None:
            yield name, pending, line
            name, pending = "", None
        elif pending is None:
            name = line
        else:
            raise TleFormatError(f"expected a '2 ' line after {pending[:18]!r}")
    if pending is not None:
        raise TleFormatError("dangling '1 ' line at end of TLE input")


def parse_tle_catalog(lines: Iterable[str]) -> list[TleRecord]:
    """Parse repeating 2-line (or name + 2-line) groups."""
    return [parse_tle(l1, l2, name) for name, l1, l2 in _tle_groups(lines)]


def load_tle_catalog(path: str | Path) -> list[TleRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tle_catalog(fh)


def make_rso_entries(
    records: Iterable[TleRecord],
    radius_m: float = 1.0,
    albedo: float = 0.3,
    diffusion: float = 1.0,
) -> list[RsoEntry]:
    """Attach uniform physical parameters to a TLE catalogue.

    The interchange TLE format carries no size/reflectivity information, so
    the scene configuration supplies one set of defaults for all targets.
    """
    return [
        RsoEntry(tle=rec, radius_m=radius_m, albedo=albedo, diffusion=diffusion)
        for rec in records
    ]
