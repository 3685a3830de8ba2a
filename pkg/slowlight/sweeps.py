"""
Parameter sweeps

Runs one scenario per swept value, concurrently up to a job limit, and
assembles the rows in sweep order. A failing point produces a row with
status "failed" and the sweep carries on. A beta_l point of 0 is the empty
medium and is reported without propagating.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, Optional

import pandas as pd

from slowlight.config_loader import (
    BETA_L_KEY,
    IN_GAMMA,
    RADS,
    SWEEPABLE_KEYS,
    config_from_flat,
    config_to_flat,
    split_rate_key,
)
from slowlight.error_utils import ConfigError, SlowLightError, transform_error_for_user
from slowlight.logging_config import get_logger
from slowlight.models import ScenarioConfig, SweepSpec
from slowlight.physics import derive_params
from slowlight.runner import pulse_width, run_scenario

logger = get_logger(__name__)

SWEEP_COLUMNS = (
    "value", "eta", "shape_fidelity", "conservation_residual", "residual_n1", "delay_s",
    "beta_l", "kappa1_l", "kappa2_l", "eit_window_t", "broadening1", "broadening2",
    "regime_ok", "status", "error",
)


def check_sweep_key(key: str) -> None:
    if key not in SWEEPABLE_KEYS:
        raise ConfigError("not a sweepable numeric key", key=key)


def apply_sweep_value(config: ScenarioConfig, key: str, value: float) -> ScenarioConfig:
    """
    Config with one key set to a sweep value.

    beta_l sets the medium length to value / beta; beta itself does not
    depend on the length.
    """
    check_sweep_key(key)
    flat = config_to_flat(config)

    if key == BETA_L_KEY:
        if not value > 0:
            raise ConfigError(f"must be > 0 to build a medium, got {value}", key=key)
        params = derive_params(config.atoms, config.drive, config.convention_prefactor)
        if params.beta == 0:
            raise ConfigError("beta is zero, no length reaches the requested beta*L", key=key)
        flat["atoms.length_m"] = value / params.beta
    else:
        split = split_rate_key(key)
        if split is not None:
            base, _ = split
            flat.pop(base + RADS, None)
            flat.pop(base + IN_GAMMA, None)
        flat[key] = value
    return config_from_flat(flat)


def _failed_row(value: float, message: str) -> Dict[str, Any]:
    row = {column: math.nan for column in SWEEP_COLUMNS}
    row.update(value=value, regime_ok=False, status="failed", error=message)
    return row


def _empty_medium_row(config: ScenarioConfig, value: float) -> Dict[str, Any]:
    """
    Row for beta*L = 0: no medium, so every tier passes the input unchanged.

    Absorption and broadening vanish with the length; the EIT window does not.
    """
    params = derive_params(config.atoms, config.drive, config.convention_prefactor)
    thresholds = config.thresholds
    eit_window_t = params.eit_window * pulse_width(config)
    logger.info("beta*L = 0: empty medium, the photon stays on its input carrier")
    return {
        "value": value,
        "eta": 0.0,
        "shape_fidelity": 0.0,
        "conservation_residual": 0.0,
        "residual_n1": 1.0,
        "delay_s": 0.0,
        "beta_l": 0.0,
        "kappa1_l": 0.0,
        "kappa2_l": 0.0,
        "eit_window_t": eit_window_t,
        "broadening1": 0.0,
        "broadening2": 0.0,
        "regime_ok": eit_window_t >= thresholds.eit_min,
        "status": "ok",
        "error": "",
    }


def _run_point(config: ScenarioConfig, key: str, value: float, tier: Optional[str] = None) -> Dict[str, Any]:
    try:
        if key == BETA_L_KEY and value == 0:
            return _empty_medium_row(config, value)
        point = apply_sweep_value(config, key, value)
        run = run_scenario(point, tier)
    except (SlowLightError, ValueError, ArithmeticError) as e:
        message, error_type = transform_error_for_user(e)
        logger.error(f"Sweep point {key}={value!r} failed ({error_type}): {message}")
        return _failed_row(value, message)

    params, regime, result = run.params, run.regime, run.result
    broadening = regime.broadening.values
    return {
        "value": value,
        "eta": result.eta,
        "shape_fidelity": result.shape_fidelity,
        "conservation_residual": result.conservation_residual,
        "residual_n1": result.residual_n1,
        "delay_s": result.delay,
        "beta_l": params.beta_length,
        "kappa1_l": params.kappa1 * params.length,
        "kappa2_l": params.kappa2 * params.length,
        "eit_window_t": regime.eit_window.values[0],
        "broadening1": broadening[0],
        "broadening2": broadening[1],
        "regime_ok": regime.all_ok,
        "status": "ok",
        "error": "",
    }


def run_sweep(
    config: ScenarioConfig,
    spec: SweepSpec,
    jobs: int = 1,
    tier: Optional[str] = None
) -> pd.DataFrame:
    """
    Run a sweep and return one row per point, in sweep order.

    Args:
        config: Base scenario
        spec: Swept key and values
        jobs: Worker processes; 1 runs in-process
        tier: Overrides the configured tier

    Raises:
        ConfigError: If the swept key is not sweepable
    """
    check_sweep_key(spec.parameter)
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}", key="--jobs")
    values = spec.points()
    logger.info(f"Sweeping {spec.parameter} over {len(values)} point(s) with {jobs} job(s)")

    if jobs == 1 or len(values) == 1:
        rows = []
        for index, value in enumerate(values, start=1):
            rows.append(_run_point(config, spec.parameter, value, tier))
            logger.info(f"Sweep point {index}/{len(values)} done: {spec.parameter}={value!r}")
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_point, config, spec.parameter, value, tier) for value in values]
            rows = []
            for index, future in enumerate(futures, start=1):
                rows.append(future.result())
                logger.info(f"Sweep point {index}/{len(values)} done: {spec.parameter}={values[index - 1]!r}")

    frame = pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
    failed = int((frame["status"] == "failed").sum())
    if failed:
        logger.warning(f"{failed} of {len(values)} sweep point(s) failed")
    return frame
