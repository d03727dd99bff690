"""Per-alternative criterion scores and their discrete distributions.

Two criteria are scored on [0, 1]: occupant comfort and load curtailment.
Comfort depends on whether anyone is in the zone, so the comfort score of an
alternative is a two-atom mixture driven by the zone's occupancy probability:
an unoccupied zone always scores 1 (turning things down hurts nobody), an
occupied zone scores whatever the comfort model for the appliance kind says.
Curtailment is deterministic given the estimated power reduction, log-scaled
so that a 100 W plug and a multi-kW setpoint change land on a comparable
scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

from .domain import ApplianceKind, ControlAlternative, Zone

# score values are snapped to this grid before distributions are assembled so
# that exact-tie events between alternatives are detectable in float arithmetic
SCORE_GRID = 1e-4

PROB_TOL = 1e-9


class ScoringError(ValueError):
    """Input outside the domain of a score function."""


class CurtailmentClampWarning(UserWarning):
    """A power reduction fell outside the fleet's [p_min, p_max] band and was clamped."""


def snap_to_grid(value: float) -> float:
    return round(value / SCORE_GRID) * SCORE_GRID


@dataclass(frozen=True)
class ScoreDistribution:
    """Finite discrete distribution of one criterion score on [0, 1].

    ``support`` holds (value, probability) atoms with unique values sorted
    ascending and probabilities summing to 1.
    """

    support: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.support:
            raise ScoringError("empty support")
        total = 0.0
        prev = -math.inf
        for value, prob in self.support:
            if not (0.0 <= value <= 1.0):
                raise ScoringError(f"support value {value} outside [0, 1]")
            if not (0.0 < prob <= 1.0):
                raise ScoringError(f"atom probability {prob} outside (0, 1]")
            if value <= prev:
                raise ScoringError("support values must be unique and ascending")
            prev = value
            total += prob
        if abs(total - 1.0) > PROB_TOL:
            raise ScoringError(f"probabilities sum to {total}, expected 1")

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]]) -> "ScoreDistribution":
        """Build a distribution from raw (value, prob) pairs.

        Values are snapped to the score grid, equal values merged, zero-mass
        atoms dropped, and the result sorted.
        """
        merged: dict[float, float] = {}
        for value, prob in atoms:
            if prob <= 0.0:
                continue
            key = snap_to_grid(value)
            merged[key] = merged.get(key, 0.0) + prob
        return cls(support=tuple(sorted(merged.items())))

    @classmethod
    def atom(cls, value: float) -> "ScoreDistribution":
        return cls.from_atoms([(value, 1.0)])

    def mean(self) -> float:
        return sum(v * p for v, p in self.support)

    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.support)

    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.support)


@dataclass(frozen=True)
class CurtailmentScaleParams:
    """Fleet-wide scaling of the curtailment score.

    ``p_max_W`` / ``p_min_W`` are the largest and smallest power reductions on
    offer across the alternative set; the score runs from 1/alpha2 at the
    smallest up to 1 at the largest.
    """

    alpha2: float = 10.0
    p_max_W: float = 1.0
    p_min_W: float = 1.0

    def __post_init__(self):
        if not self.alpha2 > 1:
            raise ScoringError(f"alpha2 {self.alpha2} must be > 1")
        if not (self.p_max_W >= self.p_min_W > 0):
            raise ScoringError(
                f"need p_max_W >= p_min_W > 0, got ({self.p_max_W}, {self.p_min_W})"
            )


def fleet_scale(reductions_W: Iterable[float], alpha2: float = 10.0) -> CurtailmentScaleParams:
    """Scale params from the positive reductions currently on offer."""
    positive = [r for r in reductions_W if r > 0]
    if not positive:
        return CurtailmentScaleParams(alpha2=alpha2, p_max_W=1.0, p_min_W=1.0)
    return CurtailmentScaleParams(alpha2=alpha2, p_max_W=max(positive), p_min_W=min(positive))


def comfort_hvac(zone_temp_C: float, desired_temp_C: float, delta_C: float, alpha1: float) -> float:
    """Thermal comfort of a zone temperature relative to its most-comfortable point.

    Equals 1 at the desired temperature, decays symmetrically as the
    temperature moves away, with ``delta_C`` setting how fast perceived
    comfort degrades and ``alpha1 > 1`` the shape of the decay.
    """
    for x in (zone_temp_C, desired_temp_C, delta_C, alpha1):
        if not math.isfinite(x):
            raise ScoringError(f"non-finite input {x}")
    if not alpha1 > 1:
        raise ScoringError(f"alpha1 {alpha1} must be > 1")
    if not delta_C > 0:
        raise ScoringError(f"delta_C {delta_C} must be > 0")
    dt = (zone_temp_C - desired_temp_C) / delta_C
    base = alpha1 + 1.0 / alpha1
    # grouping keeps the dt -> -dt symmetry exact in floating point
    return (base + 2.0) / (base + (alpha1**dt + alpha1**-dt))


def comfort_light(power_W: float, rated_power_W: float) -> float:
    """Perceived brightness: square root of the dimmed-to-rated power ratio."""
    if not rated_power_W > 0:
        raise ScoringError(f"rated_power_W {rated_power_W} must be > 0")
    if not -1e-12 <= power_W <= rated_power_W * (1 + 1e-12):
        raise ScoringError(f"power {power_W} outside [0, {rated_power_W}]")
    return math.sqrt(min(max(power_W / rated_power_W, 0.0), 1.0))


def comfort_plug(power_W: float, rated_power_W: float) -> float:
    """On/off comfort by the plug sign convention: 1 when off, 0 when on.

    The occupied/unoccupied reinterpretation of this convention lives in
    :func:`score_alternative`; this is the raw curve.
    """
    if not rated_power_W > 0:
        raise ScoringError(f"rated_power_W {rated_power_W} must be > 0")
    if power_W != 0.0 and power_W != rated_power_W:
        raise ScoringError(f"plug power {power_W} must be 0 or {rated_power_W}")
    return 1.0 - power_W / rated_power_W


def curtailment_score(p_reduction_W: float, params: CurtailmentScaleParams) -> float:
    """Log-scaled curtailment score on [1/alpha2, 1].

    exp(-log(alpha2) * log(p_max/p) / log(p_max/p_min)); the logarithms give
    alternatives whose reductions differ by orders of magnitude comparable
    scores. Reductions outside the fleet band are clamped with a warning
    because the fleet statistics can lag appliance config edits. A degenerate
    single-power fleet (p_max == p_min) scores 1 by convention.
    """
    if params.p_max_W == params.p_min_W:
        return 1.0
    p = p_reduction_W
    if p < params.p_min_W or p > params.p_max_W:
        warnings.warn(
            f"reduction {p_reduction_W:.1f} W clamped to "
            f"[{params.p_min_W:.1f}, {params.p_max_W:.1f}] W",
            CurtailmentClampWarning,
            stacklevel=2,
        )
        p = min(max(p, params.p_min_W), params.p_max_W)
    return math.exp(
        -math.log(params.alpha2)
        * math.log(params.p_max_W / p)
        / math.log(params.p_max_W / params.p_min_W)
    )


@dataclass(frozen=True)
class ApplianceState:
    """What an appliance is doing right now: actual electrical power drawn."""

    power_W: float


@dataclass(frozen=True)
class ZoneState:
    """Zone-level snapshot used when scoring: temperature plus appliance powers."""

    temp_C: float
    setpoint_C: float
    appliance_powers_W: dict[str, float]


def estimate_reduction_W(
    alt: ControlAlternative,
    zone: Zone,
    state: ZoneState,
    occupied: bool,
    beta_z_W_per_C: float,
) -> float:
    """Estimated power reduction of executing ``alt`` from the current state.

    Lights and plugs: delta between the actual draw and the post-action draw
    (rated power scaled by the new setting while someone is there to use the
    appliance). HVAC: chiller sensitivity times the upward setpoint move;
    downward moves earn no curtailment credit.
    """
    if alt.kind is ApplianceKind.HVAC_SETPOINT:
        new_setpoint = zone.desired_temp_C + alt.setting.value
        d_set = new_setpoint - state.setpoint_C
        if d_set <= 0:
            return 0.0
        return max(0.0, -beta_z_W_per_C * d_set)
    actual = state.appliance_powers_W.get(alt.appliance_id, 0.0)
    _, appliance = _find_appliance(zone, alt.appliance_id)
    basis = appliance.rated_power_W if occupied else actual
    post = alt.setting.value * basis
    return actual - post


def _find_appliance(zone: Zone, appliance_id: str):
    for a in zone.appliances:
        if a.id == appliance_id:
            return zone, a
    raise KeyError(f"appliance {appliance_id!r} not in zone {zone.id}")


def occupied_comfort(alt: ControlAlternative, zone: Zone) -> float:
    """Comfort score of the post-action state conditional on the zone being occupied.

    HVAC comfort is evaluated at the predicted steady-state temperature (the
    new setpoint). A plug switched off in an occupied zone scores 0: the
    occupant loses the device.
    """
    if alt.kind is ApplianceKind.HVAC_SETPOINT:
        new_setpoint = zone.desired_temp_C + alt.setting.value
        return comfort_hvac(new_setpoint, zone.desired_temp_C, zone.comfort_delta_C, zone.comfort_alpha)
    if alt.kind is ApplianceKind.DIMMABLE_LIGHT:
        _, appliance = _find_appliance(zone, alt.appliance_id)
        return comfort_light(alt.setting.value * appliance.rated_power_W, appliance.rated_power_W)
    # plug: on keeps the device available (1), off takes it away (0)
    return 1.0 if alt.setting.value else 0.0


def score_alternative(
    alt: ControlAlternative,
    zone: Zone,
    state: ZoneState,
    occupied_prob: float,
    reduction_W: float,
    scale: CurtailmentScaleParams,
) -> list[ScoreDistribution]:
    """Score one alternative on (comfort, curtailment).

    Comfort is the occupancy mixture: with probability ``1 - occupied_prob``
    the zone is empty and the score is 1; otherwise it is the occupied-case
    comfort of the post-action state. Curtailment is a single atom from the
    log-scaled score of ``reduction_W``.
    """
    if not 0.0 <= occupied_prob <= 1.0:
        raise ScoringError(f"occupied_prob {occupied_prob} outside [0, 1]")
    comfort_occ = occupied_comfort(alt, zone)
    comfort = ScoreDistribution.from_atoms(
        [(1.0, 1.0 - occupied_prob), (comfort_occ, occupied_prob)]
    )
    curtailment = ScoreDistribution.atom(curtailment_score(reduction_W, scale))
    return [comfort, curtailment]
