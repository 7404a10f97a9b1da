"""Absolute time carried as UTC seconds since the J2000 epoch.

Leap seconds are ignored; the sub-second error is irrelevant at the
geometric fidelity of this toolkit.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

J2000_UTC = datetime(2000, 1, 1, 12, 0, 0, tzinfo=timezone.utc)
SECONDS_PER_DAY = 86400.0


def seconds_from_datetime(dt: datetime) -> float:
    """Seconds since J2000 for an aware or naive (treated as UTC) datetime."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return (dt - J2000_UTC).total_seconds()


def datetime_from_seconds(t: float) -> datetime:
    return J2000_UTC + timedelta(seconds=t)


def parse_utc(text: str) -> float:
    """Parse an ISO-8601 UTC timestamp into seconds since J2000."""
    cleaned = text.strip()
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    return seconds_from_datetime(datetime.fromisoformat(cleaned))


def seconds_from_year_day(year: int, day_of_year: float) -> float:
    """Convert a calendar year plus fractional day-of-year (1.0 = Jan 1 00:00)."""
    start = datetime(year, 1, 1, tzinfo=timezone.utc)
    return seconds_from_datetime(start) + (day_of_year - 1.0) * SECONDS_PER_DAY


def year_day_from_seconds(t: float) -> tuple[int, float]:
    dt = datetime_from_seconds(t)
    start = datetime(dt.year, 1, 1, tzinfo=timezone.utc)
    day = 1.0 + (dt - start).total_seconds() / SECONDS_PER_DAY
    return dt.year, day
