"""
Reports

Flat key-value text reports and CSV writers for run results.
"""

from pathlib import Path
from typing import Any, List, Tuple, Union

import pandas as pd

from slowlight.analysis import complete_conversion_residual
from slowlight.models import ConditionCheck, DerivedParams, RegimeReport, TierComparison

Pairs = List[Tuple[str, Any]]

# printed with six decimals
FIXED_KEYS = {"eta", "shape_fidelity", "residual_n1", "qubit_fidelity", "r1"}


def format_value(key: str, value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, complex):
        return f"{value.real:.9g}{value.imag:+.9g}j"
    if isinstance(value, float):
        return f"{value:.6f}" if key in FIXED_KEYS else f"{value:.9g}"
    return str(value)


def format_key_values(pairs: Pairs) -> str:
    return "\n".join(f"{key} = {format_value(key, value)}" for key, value in pairs)


def regime_lines(report: RegimeReport) -> List[str]:
    """
    One line per condition: name, value(s), threshold, PASS or FAIL.

    A phase mismatch above its level prints WARN.
    """
    lines = [_condition_line(condition, "FAIL") for condition in report.conditions]
    if report.phase_mismatch is not None:
        lines.append(_condition_line(report.phase_mismatch, "WARN"))
    lines.append(f"doppler_temperature {report.doppler_temperature:.6g} K INFO")
    return lines


def _condition_line(condition: ConditionCheck, failed: str) -> str:
    values = ",".join(f"{v:.6g}" for v in condition.values)
    verdict = "PASS" if condition.passed else failed
    return f"{condition.name} {values} {condition.relation}{condition.threshold:g} {verdict}"


def params_pairs(params: DerivedParams) -> Pairs:
    return [
        ("beta_l", params.beta_length),
        ("kappa1_l", params.kappa1 * params.length),
        ("kappa2_l", params.kappa2 * params.length),
        ("v1_mps", params.v1),
        ("v2_mps", params.v2),
        ("alpha", params.alpha),
        ("eit_window_rads", params.eit_window),
        ("theta_rad", params.theta),
        ("sigma1_m2", params.sigma1),
        ("sigma2_m2", params.sigma2),
    ]


def scenario_pairs(run) -> Pairs:
    """Summary of a ScenarioRun."""
    result = run.result
    return [
        ("tier", run.tier),
        ("input_carrier", run.input_carrier),
        ("eta", result.eta),
        ("shape_fidelity", result.shape_fidelity),
        ("residual_n1", result.residual_n1),
        ("r1", complete_conversion_residual(run.history, run.input_carrier)),
        ("conservation_residual", result.conservation_residual),
        ("delay_s", result.delay),
        ("regime_ok", run.regime.all_ok),
        ("n_z", run.history.n_z),
        ("n_samples", run.history.grid.n_samples),
        ("elapsed_s", run.elapsed),
    ] + params_pairs(run.params)


def qubit_pairs(run) -> Pairs:
    """Summary of a QubitRun."""
    result = run.result
    return [
        ("tier", run.tier),
        ("a_in", run.qubit.a),
        ("b_in", run.qubit.b),
        ("a_out", result.a_out),
        ("b_out", result.b_out),
        ("global_phase_rad", result.global_phase),
        ("qubit_fidelity", result.qubit_fidelity),
        ("leakage", result.leakage),
        ("n2", result.n2),
        ("regime_ok", run.regime.all_ok),
        ("beta_l", run.params.beta_length),
    ]


def comparison_pairs(comparison: TierComparison) -> Pairs:
    pairs: Pairs = []
    for tier, eta in comparison.eta.items():
        pairs.append((f"eta_{tier}", eta))
        pairs.append((f"shape_fidelity_{tier}", comparison.shape_fidelity[tier]))
    for name, difference in comparison.eta_differences.items():
        pairs.append((f"eta_difference_{name}", difference))
    pairs.extend([
        ("max_eta_difference", comparison.max_difference),
        ("regime_ok", comparison.regime_ok),
        ("tolerance", comparison.tolerance),
        ("flagged", comparison.flagged),
    ])
    return pairs


def write_summary(pairs: Pairs, path: Union[str, Path]) -> None:
    Path(path).write_text(format_key_values(pairs) + "\n", encoding="utf-8")


def write_table_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """CSV with shortest round-trip floats."""
    frame.to_csv(path, index=False)
