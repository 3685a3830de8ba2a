"""
Scenario configuration files.

Flat dotted-key format, one `key = value` per line, `#` starts a comment:

    atoms.length_m = 1.6e-3
    drive.omega_c_in_gamma = 8

Rates are given either in rad/s (suffix _rads) or as multiples of the
transverse rate Gamma = gamma2 / 2 (suffix _in_gamma), exactly one per
quantity. gamma2 itself is always in rad/s. Saved files use _rads and the
shortest round-trip float representation.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from slowlight.error_utils import ConfigError
from slowlight.logging_config import get_logger
from slowlight.models import ScenarioConfig, gamma_unit

logger = get_logger(__name__)

RADS = "_rads"
IN_GAMMA = "_in_gamma"

# quantity -> (section, field); accepted with RADS or IN_GAMMA
RATE_KEYS: Dict[str, Tuple[str, str]] = {
    "atoms.gamma1": ("atoms", "gamma1"),
    "atoms.gamma3": ("atoms", "gamma3"),
    "drive.omega_c": ("drive", "omega_c"),
    "drive.omega_0": ("drive", "omega_0"),
    "drive.delta": ("drive", "delta"),
    "drive.delta_0": ("drive", "delta_0"),
}

# file key -> (section or None for top level, field, value type)
PLAIN_KEYS: Dict[str, Tuple[Optional[str], str, type]] = {
    "atoms.gamma2_rads": ("atoms", "gamma2", float),
    "atoms.lambda1_m": ("atoms", "lambda1", float),
    "atoms.lambda2_m": ("atoms", "lambda2", float),
    "atoms.coupling_ratio": ("atoms", "coupling_ratio", float),
    "atoms.density_m3": ("atoms", "density", float),
    "atoms.length_m": ("atoms", "length", float),
    "atoms.mass_u": ("atoms", "mass_u", float),
    "drive.lambda_c_m": ("drive", "lambda_c", float),
    "drive.lambda_0_m": ("drive", "lambda_0", float),
    "pulse.width_s": ("pulse", "width", float),
    "pulse.center_s": ("pulse", "center", float),
    "pulse.carrier": ("pulse", "carrier", int),
    "pulse.shape": ("pulse", "shape", str),
    "pulse.envelope_file": ("pulse", "envelope_file", str),
    "qubit.a_re": ("qubit", "a_re", float),
    "qubit.a_im": ("qubit", "a_im", float),
    "qubit.b_re": ("qubit", "b_re", float),
    "qubit.b_im": ("qubit", "b_im", float),
    "qubit.tau_s": ("qubit", "tau", float),
    "grid.t_start_s": ("grid", "t_start", float),
    "grid.t_end_s": ("grid", "t_end", float),
    "grid.n_samples": ("grid", "n_samples", int),
    "grid.n_z": ("grid", "n_z", int),
    "grid.v_ref_mps": ("grid", "v_ref", float),
    "tier": (None, "tier", str),
    "thresholds.absorption_max": ("thresholds", "absorption_max", float),
    "thresholds.eit_min": ("thresholds", "eit_min", float),
    "thresholds.broadening_max": ("thresholds", "broadening_max", float),
    "thresholds.phase_mismatch_max": ("thresholds", "phase_mismatch_max", float),
    "convention_prefactor": (None, "convention_prefactor", float),
}

REQUIRED_KEYS = (
    "atoms.gamma1", "atoms.gamma2_rads", "atoms.gamma3", "atoms.lambda1_m", "atoms.lambda2_m",
    "atoms.coupling_ratio", "atoms.density_m3", "atoms.length_m",
    "drive.omega_c", "drive.omega_0", "drive.delta",
)

BETA_L_KEY = "beta_l"

# numeric but discrete
CHOICE_KEYS = ("pulse.carrier",)

SWEEPABLE_KEYS = tuple(
    [key for key, (_, _, kind) in PLAIN_KEYS.items() if kind is not str and key not in CHOICE_KEYS]
    + [base + suffix for base in RATE_KEYS for suffix in (RADS, IN_GAMMA)]
    + [BETA_L_KEY]
)


@dataclass(frozen=True)
class _Entry:
    key: str
    value: Any
    line: Optional[int] = None
    column: Optional[int] = None


def split_rate_key(key: str) -> Optional[Tuple[str, str]]:
    for suffix in (RADS, IN_GAMMA):
        if key.endswith(suffix) and key[: -len(suffix)] in RATE_KEYS:
            return key[: -len(suffix)], suffix
    return None


def is_known_key(key: str) -> bool:
    return key in PLAIN_KEYS or split_rate_key(key) is not None


def _coerce(key: str, raw: Any, line: Optional[int] = None, column: Optional[int] = None) -> Any:
    kind = PLAIN_KEYS[key][2] if key in PLAIN_KEYS else float
    if kind is str:
        return str(raw)
    try:
        if kind is int:
            number = float(raw)
            if not number.is_integer():
                raise ValueError
            return int(number)
        return float(raw)
    except (TypeError, ValueError):
        expected = "an integer" if kind is int else "a number"
        raise ConfigError(f"expected {expected}, got '{raw}'", key=key, line=line, column=column)


def _parse_lines(text: str) -> List[_Entry]:
    entries: List[_Entry] = []
    seen: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0]
        if not content.strip():
            continue
        if "=" not in content:
            column = len(content) - len(content.lstrip()) + 1
            raise ConfigError("expected 'key = value'", line=number, column=column)

        key_part, value_part = content.split("=", 1)
        key = key_part.strip()
        key_column = len(key_part) - len(key_part.lstrip()) + 1
        value = value_part.strip()
        value_column = len(key_part) + 1 + len(value_part) - len(value_part.lstrip()) + 1

        if not key:
            raise ConfigError("missing key before '='", line=number, column=key_column)
        if not is_known_key(key):
            raise ConfigError("unknown key", key=key, line=number, column=key_column)
        if key in seen:
            raise ConfigError(f"duplicate key, first set on line {seen[key]}", key=key, line=number, column=key_column)
        if not value:
            raise ConfigError("missing value", key=key, line=number, column=value_column)

        seen[key] = number
        entries.append(_Entry(key, _coerce(key, value, number, value_column), number, value_column))
    return entries


def _assemble(entries: List[_Entry], base_dir: Optional[Path] = None) -> ScenarioConfig:
    by_key = {entry.key: entry for entry in entries}

    rates: Dict[str, _Entry] = {}
    for entry in entries:
        split = split_rate_key(entry.key)
        if split is None:
            continue
        base, _ = split
        if base in rates:
            raise ConfigError(
                f"give {base} once, either {base}{RADS} or {base}{IN_GAMMA}",
                key=entry.key, line=entry.line, column=entry.column,
            )
        rates[base] = entry

    missing = [key for key in REQUIRED_KEYS if key not in by_key and key not in rates]
    if missing:
        names = ", ".join(key if key in PLAIN_KEYS else f"{key}{RADS} (or {IN_GAMMA})" for key in missing)
        raise ConfigError(f"missing required key(s): {names}")

    sections: Dict[Optional[str], Dict[str, Any]] = {}
    origin: Dict[Tuple[str, ...], _Entry] = {}

    unit = gamma_unit(by_key["atoms.gamma2_rads"].value)
    for base, entry in rates.items():
        section, name = RATE_KEYS[base]
        value = entry.value * unit if entry.key.endswith(IN_GAMMA) else entry.value
        sections.setdefault(section, {})[name] = value
        origin[(section, name)] = entry

    for key, (section, name, _) in PLAIN_KEYS.items():
        if key not in by_key:
            continue
        entry = by_key[key]
        value = entry.value
        if key == "pulse.envelope_file" and base_dir is not None and not Path(value).is_absolute():
            value = str((base_dir / value).resolve())
        sections.setdefault(section, {})[name] = value
        origin[(section, name) if section else (name,)] = entry

    data = sections.pop(None, {})
    data.update(sections)
    try:
        return ScenarioConfig(**data)
    except ValidationError as e:
        raise _config_error_from_validation(e, origin) from e


def _config_error_from_validation(error: ValidationError, origin: Dict[Tuple[str, ...], _Entry]) -> ConfigError:
    item = error.errors()[0]
    loc = tuple(str(part) for part in item.get("loc", ()))
    message = item.get("msg", "invalid value")
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    if item.get("type") == "missing":
        message = "missing required key"

    entry = origin.get(loc)
    if entry is not None:
        key, line, column = entry.key, entry.line, entry.column
    else:
        key, line, column = ".".join(loc) or None, None, None
    remaining = len(error.errors()) - 1
    if remaining:
        message = f"{message} (and {remaining} more problem(s))"
    return ConfigError(message, key=key, line=line, column=column)


def parse_config_text(text: str, base_dir: Optional[Union[str, Path]] = None) -> ScenarioConfig:
    """
    Parse configuration text.

    Raises:
        ConfigError: On syntax errors (with line and column), unknown or
            duplicate keys, missing required keys, or invariant violations
    """
    base = Path(base_dir) if base_dir is not None else None
    return _assemble(_parse_lines(text), base)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Load and validate a scenario file.

    pulse.envelope_file is resolved relative to the file's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    config = parse_config_text(text, path.parent)
    logger.info(f"Loaded configuration from {path}")
    return config


def config_from_flat(values: Dict[str, Any], base_dir: Optional[Union[str, Path]] = None) -> ScenarioConfig:
    """Build a config from file keys mapped to values."""
    entries = []
    for key, value in values.items():
        if not is_known_key(key):
            raise ConfigError("unknown key", key=key)
        entries.append(_Entry(key, _coerce(key, value)))
    base = Path(base_dir) if base_dir is not None else None
    return _assemble(entries, base)


def config_to_flat(config: ScenarioConfig) -> Dict[str, Any]:
    """File keys with canonical suffixes, unset optional values left out."""
    flat: Dict[str, Any] = {}
    for base, (section, name) in RATE_KEYS.items():
        flat[base + RADS] = getattr(getattr(config, section), name)
    for key, (section, name, _) in PLAIN_KEYS.items():
        owner = getattr(config, section) if section else config
        if owner is None:
            continue
        value = getattr(owner, name)
        if value is not None:
            flat[key] = value
    return flat


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(config: ScenarioConfig) -> str:
    lines = [f"{key} = {_format_value(value)}" for key, value in config_to_flat(config).items()]
    return "\n".join(lines) + "\n"


def save_config(config: ScenarioConfig, path: Union[str, Path]) -> None:
    """Write a config that loads back to an identical ScenarioConfig."""
    Path(path).write_text(format_config(config), encoding="utf-8")
