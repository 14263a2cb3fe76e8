#!/usr/bin/env python3
"""
Hand configuration loader.

Reads a hand description from JSON, converts config units (mm, MPa) to SI,
and validates every field. Errors carry the JSON path of the offending field,
e.g. ``fingers[0].tendon.pulley_radius_mm``.

Schema::

    {
      "gravity_m_s2": 9.81,
      "fingers": [
        {
          "name": "finger1",
          "lengths_mm": [30, 15, 10],
          "masses_kg": [...],
          "com_offsets_mm": [...],
          "inertias_kg_m2": [...],
          "tendon": {
            "pulley_radius_mm": 3,
            "actuator_radius_mm": 5,
            "allowable_stress_mpa": 190,
            "friction_mu": 0.5,
            "max_grip_force_n": 6
          }
        }
      ]
    }

Unknown fields are rejected.
"""

import json
import logging
import math
import importlib.resources
from pathlib import Path
from typing import Any, Dict, List, Union

from tendon_grip.hand_model.hand_model import Finger, HandModel, LinkChain, TendonDrive

logger = logging.getLogger(__name__)

MM_PER_M = 1000.0
PA_PER_MPA = 1.0e6

HAND_FIELDS = ("gravity_m_s2", "fingers")
FINGER_FIELDS = (
    "name",
    "lengths_mm",
    "masses_kg",
    "com_offsets_mm",
    "inertias_kg_m2",
    "tendon",
)
TENDON_FIELDS = (
    "pulley_radius_mm",
    "actuator_radius_mm",
    "allowable_stress_mpa",
    "friction_mu",
    "max_grip_force_n",
)

BUNDLED_HANDS_PACKAGE = "tendon_grip.hands"


class HandConfigError(ValueError):
    """A hand config could not be parsed, broke the schema, or broke an invariant."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


# === Field checks ===
def _check_fields(obj: Any, allowed, path: str) -> Dict[str, Any]:
    if not isinstance(obj, dict):
        raise HandConfigError(path or "<root>", "expected a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise HandConfigError(
            _join(path, unknown[0]), f"unknown field (allowed: {', '.join(allowed)})"
        )
    missing = [name for name in allowed if name not in obj]
    if missing:
        raise HandConfigError(_join(path, missing[0]), "missing required field")
    return obj


def _join(path: str, name: str) -> str:
    return f"{path}.{name}" if path else name


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise HandConfigError(path, f"expected a number, got {type(value).__name__}")
    try:
        value = float(value)
    except OverflowError:
        raise HandConfigError(path, "number out of range")
    if not math.isfinite(value):
        raise HandConfigError(path, "expected a finite number")
    return value


def _number_list(value: Any, path: str) -> List[float]:
    if not isinstance(value, list) or not value:
        raise HandConfigError(path, "expected a non-empty list of numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


# === Parsing ===
def _parse_tendon(obj: Any, path: str) -> TendonDrive:
    _check_fields(obj, TENDON_FIELDS, path)
    values = {name: _number(obj[name], _join(path, name)) for name in TENDON_FIELDS}

    for name in ("pulley_radius_mm", "actuator_radius_mm", "allowable_stress_mpa"):
        if values[name] <= 0:
            raise HandConfigError(_join(path, name), "must be > 0")
    for name in ("friction_mu", "max_grip_force_n"):
        if values[name] < 0:
            raise HandConfigError(_join(path, name), "must be >= 0")

    return TendonDrive(
        pulley_radius=values["pulley_radius_mm"] / MM_PER_M,
        actuator_radius=values["actuator_radius_mm"] / MM_PER_M,
        allowable_stress=values["allowable_stress_mpa"] * PA_PER_MPA,
        friction_coefficient=values["friction_mu"],
        max_grip_force=values["max_grip_force_n"],
    )


def _parse_chain(obj: Dict[str, Any], path: str) -> LinkChain:
    lengths = _number_list(obj["lengths_mm"], _join(path, "lengths_mm"))
    n = len(lengths)
    arrays = {"lengths_mm": lengths}
    for name in ("masses_kg", "com_offsets_mm", "inertias_kg_m2"):
        arrays[name] = _number_list(obj[name], _join(path, name))
        if len(arrays[name]) != n:
            raise HandConfigError(
                _join(path, name), f"expected {n} entries to match lengths_mm"
            )

    for i in range(n):
        length = arrays["lengths_mm"][i]
        offset = arrays["com_offsets_mm"][i]
        if length <= 0:
            raise HandConfigError(f"{path}.lengths_mm[{i}]", "must be > 0")
        if arrays["masses_kg"][i] <= 0:
            raise HandConfigError(f"{path}.masses_kg[{i}]", "must be > 0")
        if not 0 < offset <= length:
            raise HandConfigError(
                f"{path}.com_offsets_mm[{i}]",
                f"must satisfy 0 < d <= L (L = {length} mm), got {offset}",
            )
        if arrays["inertias_kg_m2"][i] < 0:
            raise HandConfigError(f"{path}.inertias_kg_m2[{i}]", "must be >= 0")

    return LinkChain(
        lengths=[v / MM_PER_M for v in arrays["lengths_mm"]],
        masses=arrays["masses_kg"],
        com_offsets=[v / MM_PER_M for v in arrays["com_offsets_mm"]],
        inertias=arrays["inertias_kg_m2"],
    )


def parse_hand_config(data: Any) -> HandModel:
    """
    Build a HandModel from an already-decoded JSON document.

    Raises:
        HandConfigError: On schema or invariant violations
    """
    _check_fields(data, HAND_FIELDS, "")
    gravity = _number(data["gravity_m_s2"], "gravity_m_s2")
    if gravity < 0:
        raise HandConfigError("gravity_m_s2", "must be >= 0")

    fingers_raw = data["fingers"]
    if not isinstance(fingers_raw, list) or not fingers_raw:
        raise HandConfigError("fingers", "expected a non-empty list of fingers")

    fingers = []
    seen = set()
    for i, raw in enumerate(fingers_raw):
        path = f"fingers[{i}]"
        _check_fields(raw, FINGER_FIELDS, path)
        name = raw["name"]
        if not isinstance(name, str) or not name:
            raise HandConfigError(_join(path, "name"), "expected a non-empty string")
        if name in seen:
            raise HandConfigError(_join(path, "name"), f"duplicate finger name '{name}'")
        seen.add(name)
        chain = _parse_chain(raw, path)
        drive = _parse_tendon(raw["tendon"], _join(path, "tendon"))
        fingers.append(Finger(name=name, chain=chain, drive=drive))

    return HandModel(fingers=tuple(fingers), gravity=gravity)


def load_hand_config(config_path: Union[str, Path]) -> HandModel:
    """
    Load a hand configuration from a JSON file.

    Args:
        config_path: Path to the hand JSON file

    Returns:
        HandModel in SI units

    Raises:
        FileNotFoundError: If the file does not exist
        HandConfigError: On parse, schema or invariant errors
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise FileNotFoundError(f"Hand config file not found at: {config_path}")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise HandConfigError("<root>", f"invalid JSON ({e.msg} at line {e.lineno})")

    hand = parse_hand_config(data)
    logger.info(
        f"Loaded hand config {config_path}: {len(hand.fingers)} fingers, "
        f"{hand.total_dof} DOF, g = {hand.gravity} m/s^2"
    )
    return hand


def resolve_hand_path(name_or_path: Union[str, Path]) -> Path:
    """
    Find a hand config file.

    Lookup order:
    1. The argument as a filesystem path
    2. A bundled hand under tendon_grip/hands, with or without the .json suffix

    Raises:
        FileNotFoundError: If neither exists
    """
    candidate = Path(name_or_path)
    if candidate.exists():
        return candidate

    bundled_dir = importlib.resources.files(BUNDLED_HANDS_PACKAGE)
    file_name = candidate.name if candidate.suffix == ".json" else f"{candidate.name}.json"
    bundled = bundled_dir.joinpath(file_name)
    if bundled.is_file():
        logger.debug(f"Using bundled hand config {file_name}")
        return Path(str(bundled))

    raise FileNotFoundError(
        f"Hand config '{name_or_path}' not found as a file or bundled hand"
    )


# === Serialization ===
def serialize_hand_config(hand: HandModel) -> Dict[str, Any]:
    """Convert a HandModel back to the JSON schema, in config units."""
    fingers = []
    for finger in hand.fingers:
        chain, drive = finger.chain, finger.drive
        fingers.append(
            {
                "name": finger.name,
                "lengths_mm": [v * MM_PER_M for v in chain.lengths],
                "masses_kg": list(chain.masses),
                "com_offsets_mm": [v * MM_PER_M for v in chain.com_offsets],
                "inertias_kg_m2": list(chain.inertias),
                "tendon": {
                    "pulley_radius_mm": drive.pulley_radius * MM_PER_M,
                    "actuator_radius_mm": drive.actuator_radius * MM_PER_M,
                    "allowable_stress_mpa": drive.allowable_stress / PA_PER_MPA,
                    "friction_mu": drive.friction_coefficient,
                    "max_grip_force_n": drive.max_grip_force,
                },
            }
        )
    return {"gravity_m_s2": hand.gravity, "fingers": fingers}


def save_hand_config(hand: HandModel, config_path: Union[str, Path]) -> Path:
    """Write a HandModel to a JSON file in config units."""
    config_path = Path(config_path)
    with open(config_path, "w", encoding="utf-8") as f:
        json.dump(serialize_hand_config(hand), f, indent=2)
    logger.info(f"Saved hand config to {config_path}")
    return config_path
