"""Zone occupancy: learning, forecasting and synthetic generation.

Occupancy in each zone is binary and modeled as a non-homogeneous Markov
chain: the day is split into equal windows (48 half-hour windows by default)
and a separate transition matrix is learned per window, so the chain's
dynamics follow the time of day. The chain state augments the occupancy bit
with how long the zone has been in that state, bucketed into a few duration
classes, which captures the tendency of short absences (coffee) to end
quickly and long absences (gone home) to persist.

A synthetic office-schedule generator stands in for field data: stochastic
arrival/departure times, a lunch dip, and random meetings produce traces with
the familiar ramp-up / midday-dip / ramp-down daily profile.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

MINUTES_PER_DAY = 1440
DEFAULT_INTERVAL_MIN = 5
DEFAULT_WINDOW_MIN = 30
DEFAULT_BUCKET_BOUNDS = (30.0, 120.0)

# calendar anchor for minute-zero of synthetic traces (a Monday)
BASE_DATE = datetime(2026, 1, 5)

ROW_TOL = 1e-9


class TraceError(ValueError):
    """An occupancy trace violates length or sampling requirements."""


@dataclass(frozen=True)
class OccupancyTrace:
    """Uniformly sampled binary occupancy for one zone.

    ``occupied[k]`` is the state at minute ``start_minute + k * interval_minutes``
    (absolute minutes since the day-0 midnight).
    """

    zone_id: str
    start_minute: int
    interval_minutes: int
    occupied: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "occupied", np.asarray(self.occupied, dtype=bool))
        if self.interval_minutes <= 0:
            raise TraceError("interval_minutes must be positive")

    @property
    def times(self) -> np.ndarray:
        return self.start_minute + np.arange(len(self.occupied)) * self.interval_minutes

    @property
    def span_minutes(self) -> int:
        return len(self.occupied) * self.interval_minutes


def trace_from_samples(
    zone_id: str,
    samples: list[tuple[float, bool]],
    interval_minutes: int = DEFAULT_INTERVAL_MIN,
) -> OccupancyTrace:
    """Resample (minute, occupied) samples onto a uniform grid by zero-order hold.

    Accepts event-triggered or irregular samples; timestamps must be strictly
    increasing.
    """
    if not samples:
        raise TraceError("no samples")
    times = [t for t, _ in samples]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise TraceError("sample timestamps must be strictly increasing")
    start = int(times[0] // interval_minutes) * interval_minutes
    end = int(times[-1])
    grid = np.arange(start, end + 1, interval_minutes)
    idx = np.searchsorted(np.asarray(times), grid, side="right") - 1
    idx = np.clip(idx, 0, len(samples) - 1)
    values = np.array([occ for _, occ in samples], dtype=bool)[idx]
    return OccupancyTrace(zone_id, start, interval_minutes, values)


@dataclass(frozen=True)
class OccupancyModel:
    """Per-window transition matrices over the (occupied, duration-bucket) state space."""

    zone_id: str
    window_minutes: int
    interval_minutes: int
    bucket_bounds_min: tuple[float, ...]
    matrices: np.ndarray  # (n_windows, n_states, n_states), row-stochastic

    def __post_init__(self):
        object.__setattr__(self, "matrices", np.asarray(self.matrices, dtype=float))
        if MINUTES_PER_DAY % self.window_minutes != 0:
            raise TraceError(f"window_minutes {self.window_minutes} must divide {MINUTES_PER_DAY}")
        expected = MINUTES_PER_DAY // self.window_minutes
        if self.matrices.shape[0] != expected:
            raise TraceError(f"{self.matrices.shape[0]} windows, expected {expected}")
        s = self.n_states
        if self.matrices.shape[1:] != (s, s):
            raise TraceError(f"matrix shape {self.matrices.shape[1:]}, expected ({s}, {s})")
        rows = self.matrices.sum(axis=2)
        if np.max(np.abs(rows - 1.0)) > ROW_TOL:
            raise TraceError("transition matrices must be row-stochastic")

    @property
    def n_buckets(self) -> int:
        return len(self.bucket_bounds_min) + 1

    @property
    def n_states(self) -> int:
        return 2 * self.n_buckets

    @property
    def n_windows(self) -> int:
        return MINUTES_PER_DAY // self.window_minutes

    def bucket(self, duration_min: float) -> int:
        return int(np.searchsorted(self.bucket_bounds_min, duration_min, side="right"))

    def state_index(self, occupied: bool, duration_min: float) -> int:
        return int(occupied) * self.n_buckets + self.bucket(duration_min)

    def window_of(self, minute: float) -> int:
        return int(minute % MINUTES_PER_DAY) // self.window_minutes

    def occupied_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_states, dtype=bool)
        mask[self.n_buckets:] = True
        return mask


@dataclass(frozen=True)
class OccupancyForecast:
    zone_id: str
    entries: tuple[tuple[float, float], ...]  # (absolute minute, occupied probability)

    def prob_at_end(self) -> float:
        return self.entries[-1][1]


def fit_occupancy(
    trace: OccupancyTrace,
    bucket_bounds_min: tuple[float, ...] = DEFAULT_BUCKET_BOUNDS,
    window_minutes: int = DEFAULT_WINDOW_MIN,
    laplace: float = 0.0,
    min_days: int = 7,
) -> OccupancyModel:
    """Maximum-likelihood per-window transition matrices from one trace.

    Transition counts are keyed by the window of the departing sample and
    normalized per row. Rows never observed keep a self-transition (identity)
    row rather than a uniform one, so rarely visited night windows do not
    churn state. ``laplace > 0`` adds that constant to every count for
    smoothing on sparse traces.
    """
    if trace.span_minutes < min_days * MINUTES_PER_DAY:
        raise TraceError(
            f"trace spans {trace.span_minutes / MINUTES_PER_DAY:.1f} days, "
            f"need >= {min_days}"
        )
    if MINUTES_PER_DAY % window_minutes != 0:
        raise TraceError(f"window_minutes {window_minutes} must divide {MINUTES_PER_DAY}")

    n_buckets = len(bucket_bounds_min) + 1
    n_states = 2 * n_buckets
    n_windows = MINUTES_PER_DAY // window_minutes
    counts = np.zeros((n_windows, n_states, n_states))

    def state_of(occ: bool, dur: float) -> int:
        b = int(np.searchsorted(bucket_bounds_min, dur, side="right"))
        return int(occ) * n_buckets + b

    occ = trace.occupied
    times = trace.times
    duration = 0.0
    for k in range(len(occ) - 1):
        s = state_of(occ[k], duration)
        if occ[k + 1] == occ[k]:
            duration += trace.interval_minutes
        else:
            duration = 0.0
        s_next = state_of(occ[k + 1], duration)
        w = int(times[k] % MINUTES_PER_DAY) // window_minutes
        counts[w, s, s_next] += 1.0

    if laplace > 0:
        counts += laplace
    matrices = np.empty_like(counts)
    for w in range(n_windows):
        for s in range(n_states):
            row_total = counts[w, s].sum()
            if row_total > 0:
                matrices[w, s] = counts[w, s] / row_total
            else:
                matrices[w, s] = 0.0
                matrices[w, s, s] = 1.0

    return OccupancyModel(
        zone_id=trace.zone_id,
        window_minutes=window_minutes,
        interval_minutes=trace.interval_minutes,
        bucket_bounds_min=tuple(bucket_bounds_min),
        matrices=matrices,
    )


def forecast(
    model: OccupancyModel,
    current_state: tuple[bool, float],
    now_minute: float,
    horizon_minutes: float,
) -> OccupancyForecast:
    """Propagate the state distribution forward and marginalize out duration.

    The first entry is at ``now_minute`` with the known current state; one
    entry follows per sampling interval up to the horizon.
    """
    occupied, duration = current_state
    dist = np.zeros(model.n_states)
    dist[model.state_index(occupied, duration)] = 1.0
    mask = model.occupied_mask()

    entries = [(float(now_minute), float(dist[mask].sum()))]
    t = float(now_minute)
    n_steps = int(horizon_minutes // model.interval_minutes)
    for _ in range(n_steps):
        dist = dist @ model.matrices[model.window_of(t)]
        total = dist.sum()
        if abs(total - 1.0) > 1e-6:
            raise TraceError(f"state distribution drifted to mass {total}")
        dist = dist / total
        t += model.interval_minutes
        entries.append((t, float(dist[mask].sum())))
    return OccupancyForecast(zone_id=model.zone_id, entries=tuple(entries))


def step_state(
    model: OccupancyModel, state_index: int, minute: float, rng: np.random.Generator
) -> int:
    """Sample one transition of the chain at the given time of day."""
    row = model.matrices[model.window_of(minute), state_index]
    return int(np.searchsorted(np.cumsum(row), rng.random(), side="right"))


def simulate(
    model: OccupancyModel,
    seed: int,
    days: int,
    initial_state: tuple[bool, float] = (False, 1e9),
    start_minute: int = 0,
) -> OccupancyTrace:
    """Sample a trajectory of the non-homogeneous chain; reproducible per seed."""
    rng = np.random.default_rng(seed)
    n_steps = days * MINUTES_PER_DAY // model.interval_minutes
    state = model.state_index(*initial_state)
    occupied_from = model.n_buckets
    out = np.empty(n_steps, dtype=bool)
    t = float(start_minute)
    for k in range(n_steps):
        out[k] = state >= occupied_from
        state = step_state(model, state, t, rng)
        t += model.interval_minutes
    return OccupancyTrace(model.zone_id, start_minute, model.interval_minutes, out)


def window_occupied_frequency(trace: OccupancyTrace, window_minutes: int = DEFAULT_WINDOW_MIN) -> np.ndarray:
    """Empirical likelihood-of-occupied per time-of-day window (the daily pattern)."""
    n_windows = MINUTES_PER_DAY // window_minutes
    sums = np.zeros(n_windows)
    counts = np.zeros(n_windows)
    windows = (trace.times % MINUTES_PER_DAY) // window_minutes
    np.add.at(sums, windows, trace.occupied.astype(float))
    np.add.at(counts, windows, 1.0)
    with np.errstate(invalid="ignore"):
        freq = sums / counts
    return np.nan_to_num(freq)


# ---------------------------------------------------------------------------
# Synthetic office schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OfficeProfile:
    """Parameters of the stochastic daily office schedule."""

    arrival_mean_min: float = 8.5 * 60
    arrival_std_min: float = 30.0
    departure_mean_min: float = 17.0 * 60
    departure_std_min: float = 30.0
    lunch_prob: float = 0.7
    lunch_start_mean_min: float = 12.5 * 60
    lunch_std_min: float = 20.0
    lunch_duration_min: float = 40.0
    meeting_rate_per_day: float = 1.5
    meeting_duration_min: float = 45.0
    attendance_prob: float = 0.95
    interval_minutes: int = DEFAULT_INTERVAL_MIN


def generate_office_trace(
    profile: OfficeProfile, seed: int, days: int, zone_id: str = "zone"
) -> OccupancyTrace:
    """Sample ``days`` worth of office occupancy under the given profile."""
    if profile.arrival_mean_min >= profile.departure_mean_min:
        raise TraceError("profile arrival must precede departure")
    if not 0.0 <= profile.attendance_prob <= 1.0:
        raise TraceError("attendance_prob must be in [0, 1]")
    rng = np.random.default_rng(seed)
    steps_per_day = MINUTES_PER_DAY // profile.interval_minutes
    occupied = np.zeros(days * steps_per_day, dtype=bool)
    minutes_of_day = np.arange(steps_per_day) * profile.interval_minutes

    for d in range(days):
        if rng.random() >= profile.attendance_prob:
            continue
        arrival = rng.normal(profile.arrival_mean_min, profile.arrival_std_min)
        departure = rng.normal(profile.departure_mean_min, profile.departure_std_min)
        departure = max(departure, arrival + 60.0)
        present = (minutes_of_day >= arrival) & (minutes_of_day < departure)

        away = np.zeros(steps_per_day, dtype=bool)
        if rng.random() < profile.lunch_prob:
            t0 = rng.normal(profile.lunch_start_mean_min, profile.lunch_std_min)
            away |= (minutes_of_day >= t0) & (minutes_of_day < t0 + profile.lunch_duration_min)
        for _ in range(rng.poisson(profile.meeting_rate_per_day)):
            lo, hi = arrival, max(arrival + 1.0, departure - profile.meeting_duration_min)
            t0 = rng.uniform(lo, hi)
            away |= (minutes_of_day >= t0) & (minutes_of_day < t0 + profile.meeting_duration_min)

        occupied[d * steps_per_day : (d + 1) * steps_per_day] = present & ~away

    return OccupancyTrace(zone_id, 0, profile.interval_minutes, occupied)


# ---------------------------------------------------------------------------
# File formats: trace CSV and model JSON
# ---------------------------------------------------------------------------

def minute_to_iso(minute: float) -> str:
    return (BASE_DATE + timedelta(minutes=float(minute))).isoformat()


def iso_to_minute(stamp: str) -> float:
    return (datetime.fromisoformat(stamp) - BASE_DATE).total_seconds() / 60.0


def write_trace_csv(trace: OccupancyTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp_iso8601", "zone_id", "occupied"])
        for t, occ in zip(trace.times, trace.occupied):
            writer.writerow([minute_to_iso(t), trace.zone_id, int(occ)])


def read_trace_csv(path: str | Path, interval_minutes: int = DEFAULT_INTERVAL_MIN) -> OccupancyTrace:
    """Read a trace file, resampling onto the uniform grid if necessary."""
    samples: list[tuple[float, bool]] = []
    zone_id = ""
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            zone_id = row["zone_id"]
            samples.append((iso_to_minute(row["timestamp_iso8601"]), row["occupied"] in ("1", "True", "true")))
    return trace_from_samples(zone_id, samples, interval_minutes)


def model_to_dict(model: OccupancyModel) -> dict:
    return {
        "zone_id": model.zone_id,
        "window_minutes": model.window_minutes,
        "interval_minutes": model.interval_minutes,
        "bucket_bounds_min": list(model.bucket_bounds_min),
        "matrices": model.matrices.tolist(),
    }


def model_from_dict(doc: dict) -> OccupancyModel:
    return OccupancyModel(
        zone_id=doc["zone_id"],
        window_minutes=int(doc["window_minutes"]),
        interval_minutes=int(doc["interval_minutes"]),
        bucket_bounds_min=tuple(doc["bucket_bounds_min"]),
        matrices=np.asarray(doc["matrices"], dtype=float),
    )


def save_model(model: OccupancyModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n")


def load_model(path: str | Path) -> OccupancyModel:
    return model_from_dict(json.loads(Path(path).read_text()))
