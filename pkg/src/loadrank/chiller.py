"""Affine chiller-power identification and setpoint sensitivities.

Chiller power is approximated as affine in the outdoor temperature and the
zonal temperature setpoints; the per-zone coefficients are the sensitivities
used to estimate how much load a setpoint change sheds. The model targets hot
weather where the chiller dominates HVAC consumption, so fitting filters to
warm samples by default.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_T_OUT_MIN_C = 24.0
CONDITION_LIMIT = 1e8
RANK_RTOL = 1e-10


class IdentifiabilityError(ValueError):
    """The regression design matrix is rank deficient."""


@dataclass(frozen=True)
class ChillerObservation:
    timestamp_min: float
    chiller_power_W: float
    outdoor_temp_C: float
    setpoints_C: tuple[float, ...]

    def __post_init__(self):
        if not np.isfinite(self.chiller_power_W) or self.chiller_power_W < 0:
            raise ValueError(f"chiller power {self.chiller_power_W} must be finite and >= 0")


@dataclass(frozen=True)
class FitStats:
    n_samples: int
    rmse_W: float
    relative_error_quantiles: dict[str, float]
    frac_within_10pct: float
    t_out_filter_C: float | None


@dataclass(frozen=True)
class ChillerModel:
    zone_ids: tuple[str, ...]
    beta0_W: float
    beta_out_W_per_C: float
    beta_z_W_per_C: tuple[float, ...]
    fit_stats: FitStats | None = None

    def __post_init__(self):
        if len(self.beta_z_W_per_C) != len(self.zone_ids):
            raise ValueError("one beta_z per zone required")

    def beta_z(self, zone_id: str) -> float:
        try:
            return self.beta_z_W_per_C[self.zone_ids.index(zone_id)]
        except ValueError:
            raise KeyError(f"unknown zone {zone_id!r}") from None


def fit_chiller(
    observations: list[ChillerObservation],
    zone_ids: tuple[str, ...],
    t_out_min_C: float | None = DEFAULT_T_OUT_MIN_C,
) -> ChillerModel:
    """Ordinary least squares fit of the affine chiller model.

    Solves the normal equations directly while the design matrix is well
    conditioned and falls back to a rank-revealing least-squares solve past a
    condition number of 1e8. Samples below ``t_out_min_C`` outdoor temperature
    are dropped (pass None to keep everything); the filter is recorded in the
    fit stats.

    Raises :class:`IdentifiabilityError` when the design matrix is rank
    deficient, naming constant columns (the usual culprit: setpoints that
    never moved).
    """
    n_zones = len(zone_ids)
    obs = observations
    if t_out_min_C is not None:
        obs = [o for o in obs if o.outdoor_temp_C >= t_out_min_C]
    n_params = n_zones + 2
    if len(obs) < 10 * n_params:
        raise ValueError(f"{len(obs)} usable observations, need >= {10 * n_params}")
    for o in obs:
        if len(o.setpoints_C) != n_zones:
            raise ValueError(
                f"observation at t={o.timestamp_min} has {len(o.setpoints_C)} setpoints, expected {n_zones}"
            )

    y = np.array([o.chiller_power_W for o in obs])
    X = np.column_stack(
        [
            np.ones(len(obs)),
            np.array([o.outdoor_temp_C for o in obs]),
            np.array([o.setpoints_C for o in obs]),
        ]
    )

    col_names = ["intercept", "outdoor_temp_C"] + [f"setpoint_{z}_C" for z in zone_ids]
    rank = np.linalg.matrix_rank(X, tol=X.shape[0] * np.finfo(float).eps * np.abs(X).max())
    if rank < n_params:
        constant = [
            name
            for name, col in zip(col_names[1:], X.T[1:])
            if np.ptp(col) < RANK_RTOL * max(1.0, np.abs(col).max())
        ]
        detail = f"constant columns: {', '.join(constant)}" if constant else "collinear columns"
        raise IdentifiabilityError(
            f"design matrix rank {rank} < {n_params} parameters ({detail})"
        )

    if np.linalg.cond(X) < CONDITION_LIMIT:
        beta = np.linalg.solve(X.T @ X, X.T @ y)
    else:
        beta, *_ = np.linalg.lstsq(X, y, rcond=None)

    residuals = y - X @ beta
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(y != 0, residuals / y, np.nan)
    rel = rel[np.isfinite(rel)]
    quantiles = {
        "p05": float(np.quantile(rel, 0.05)) if rel.size else float("nan"),
        "p50": float(np.quantile(rel, 0.50)) if rel.size else float("nan"),
        "p95": float(np.quantile(rel, 0.95)) if rel.size else float("nan"),
    }
    stats = FitStats(
        n_samples=len(obs),
        rmse_W=float(np.sqrt(np.mean(residuals**2))),
        relative_error_quantiles=quantiles,
        frac_within_10pct=float(np.mean(np.abs(rel) <= 0.10)) if rel.size else float("nan"),
        t_out_filter_C=t_out_min_C,
    )
    return ChillerModel(
        zone_ids=tuple(zone_ids),
        beta0_W=float(beta[0]),
        beta_out_W_per_C=float(beta[1]),
        beta_z_W_per_C=tuple(float(b) for b in beta[2:]),
        fit_stats=stats,
    )


def predict_power(model: ChillerModel, outdoor_temp_C: float, setpoints_C: tuple[float, ...] | np.ndarray) -> float:
    if len(setpoints_C) != len(model.zone_ids):
        raise ValueError(f"{len(setpoints_C)} setpoints, expected {len(model.zone_ids)}")
    return float(
        model.beta0_W
        + model.beta_out_W_per_C * outdoor_temp_C
        + float(np.dot(model.beta_z_W_per_C, np.asarray(setpoints_C, dtype=float)))
    )


def setpoint_power_delta(model: ChillerModel, zone_id: str, delta_setpoint_C: float) -> float:
    """Signed chiller-power change from moving one zone's setpoint by ``delta_setpoint_C``.

    In cooling season the sensitivity is negative: raising a setpoint lowers
    chiller power, so an upward move returns a negative delta (a reduction).
    """
    return model.beta_z(zone_id) * delta_setpoint_C


def curtailment_watts(model: ChillerModel, zone_id: str, delta_setpoint_C: float) -> float:
    """Curtailment credit of a setpoint move: the power reduction, floored at zero.

    Downward moves (and the pathological case of a positive fitted
    sensitivity) earn no credit.
    """
    if delta_setpoint_C <= 0:
        return 0.0
    return max(0.0, -setpoint_power_delta(model, zone_id, delta_setpoint_C))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def observations_from_csv(path: str | Path, zone_ids: tuple[str, ...] | None = None) -> tuple[list[ChillerObservation], tuple[str, ...]]:
    """Read observations from a wide CSV with ``setpoint_<zoneid>_C`` columns.

    Returns the observations and the zone id order inferred from the header
    (or validated against ``zone_ids`` if given). Extra columns are ignored,
    which makes emulator snapshot logs directly ingestible.
    """
    from .occupancy import iso_to_minute

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        found = tuple(
            c[len("setpoint_") : -len("_C")]
            for c in header
            if c.startswith("setpoint_") and c.endswith("_C")
        )
        if zone_ids is None:
            zone_ids = found
        elif set(zone_ids) != set(found):
            raise ValueError(f"CSV setpoint columns {found} do not match zones {zone_ids}")
        out = []
        for row in reader:
            stamp = row.get("timestamp") or row.get("timestamp_iso8601") or "0"
            try:
                t = float(stamp)
            except ValueError:
                t = iso_to_minute(stamp)
            out.append(
                ChillerObservation(
                    timestamp_min=t,
                    chiller_power_W=float(row["chiller_power_W"]),
                    outdoor_temp_C=float(row["outdoor_temp_C"]),
                    setpoints_C=tuple(float(row[f"setpoint_{z}_C"]) for z in zone_ids),
                )
            )
    return out, zone_ids


def model_to_dict(model: ChillerModel) -> dict:
    doc = {
        "zone_ids": list(model.zone_ids),
        "beta0_W": model.beta0_W,
        "beta_out_W_per_C": model.beta_out_W_per_C,
        "beta_z_W_per_C": list(model.beta_z_W_per_C),
    }
    if model.fit_stats is not None:
        doc["fit_stats"] = {
            "n_samples": model.fit_stats.n_samples,
            "rmse_W": model.fit_stats.rmse_W,
            "relative_error_quantiles": model.fit_stats.relative_error_quantiles,
            "frac_within_10pct": model.fit_stats.frac_within_10pct,
            "t_out_filter_C": model.fit_stats.t_out_filter_C,
        }
    return doc


def model_from_dict(doc: dict) -> ChillerModel:
    stats = None
    if "fit_stats" in doc:
        s = doc["fit_stats"]
        stats = FitStats(
            n_samples=int(s["n_samples"]),
            rmse_W=float(s["rmse_W"]),
            relative_error_quantiles=dict(s["relative_error_quantiles"]),
            frac_within_10pct=float(s["frac_within_10pct"]),
            t_out_filter_C=s["t_out_filter_C"],
        )
    return ChillerModel(
        zone_ids=tuple(doc["zone_ids"]),
        beta0_W=float(doc["beta0_W"]),
        beta_out_W_per_C=float(doc["beta_out_W_per_C"]),
        beta_z_W_per_C=tuple(float(b) for b in doc["beta_z_W_per_C"]),
        fit_stats=stats,
    )


def save_model(model: ChillerModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path: str | Path) -> ChillerModel:
    return model_from_dict(json.loads(Path(path).read_text()))
