#!/usr/bin/env python3
"""
grip - command-line front end for tendon_grip.

Subcommands:
- workspace:    equal-angle fingertip sweep (theta_deg, x_mm, y_mm)
- statics:      tendon force chain report for one finger (quantity, value, unit)
- hand-report:  statics of every finger at its own maximum grip force
- invdyn:       joint torques for the states in a CSV file
- simulate:     RK4 rollout under a named torque program
- verify:       closed-form vs finite-difference dynamics cross-check

Exit codes: 0 success, 1 input/config error, 2 numerical failure.
Defaults come from project_modules_configs/config_grip_cli/grip_cli_config.json.
"""

import argparse
import copy
import json
import logging
import logging.handlers
import os
import sys
import traceback
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from tendon_grip.dynamics.dynamics import (
    SimulationDivergedError,
    energy_drift,
    inverse_dynamics,
    parse_torque_program,
    simulate,
)
from tendon_grip.hand_model.hand_config import (
    HandConfigError,
    load_hand_config,
    resolve_hand_path,
)
from tendon_grip.hand_model.hand_model import Finger, HandModel, JointState
from tendon_grip.kinematics.kinematics import equal_angle_sweep, sweep_to_csv_frame
from tendon_grip.statics.statics import full_statics_report, hand_statics
from tendon_grip.verify.oracles import cross_check

# === Constants ===
# Initialize paths - handling both frozen (PyInstaller) and regular Python execution
if getattr(sys, "frozen", False):
    SCRIPT_DIR = Path(sys._MEIPASS)
else:
    SCRIPT_DIR = Path(__file__).parent.absolute()

PROJECT_ROOT = SCRIPT_DIR.parent
CONFIG_DIR = PROJECT_ROOT / "project_modules_configs" / "config_grip_cli"
CONFIG_FILE = CONFIG_DIR / "grip_cli_config.json"
DEFAULT_LOG_DIR = SCRIPT_DIR / "logs"

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2

CSV_FLOAT_FORMAT = "%.6g"
SWEEP_FLOAT_FORMAT = "%.3f"

DEFAULT_CONFIG = {
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "log_file": "grip_cli.log",
        "log_dir": "",
        "max_size_bytes": 1048576,
        "backup_count": 3,
    },
    "workspace": {"min_deg": 0.0, "max_deg": 90.0, "steps": 91},
    "statics": {"n_fingers": 3},
    "simulate": {"duration_s": 1.0, "dt_s": 1e-4, "hold_kp": 1.0, "hold_kd": 0.1},
    "verify": {"samples": 1000, "seed": 0, "tolerance": 1e-6, "fd_step": 1e-6},
}

logger = logging.getLogger("tendon_grip")


@dataclass(frozen=True)
class CommandOutcome:
    """Exit code of a subcommand and the file it wrote, if any."""

    exit_code: int
    output_path: Optional[Path] = None


class InputError(ValueError):
    """Bad command-line input (exit code 1)."""


class GripArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors on one line with exit code 1."""

    def error(self, message):
        print(f"grip: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)


# === Config Handling ===
def _merge(defaults: Dict, overrides: Dict) -> Dict:
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Path = None) -> Dict:
    """
    Load CLI defaults from grip_cli_config.json, falling back to built-in values.

    Missing sections or keys keep their built-in defaults.
    """
    config_path = Path(config_path) if config_path else CONFIG_FILE
    if not config_path.exists():
        logger.warning(f"Config file not found at {config_path}; using built-in defaults")
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            return _merge(DEFAULT_CONFIG, json.load(f))
    except json.JSONDecodeError as e:
        raise InputError(f"invalid CLI config {config_path}: {e.msg} at line {e.lineno}")


def load_environment() -> Optional[Path]:
    """Load the first .env found in the working directory or ~/.tendon_grip."""
    possible_env_paths = [
        Path.cwd() / ".env",
        Path.home() / ".tendon_grip" / ".env",
    ]
    for env_path in possible_env_paths:
        if env_path.exists():
            load_dotenv(dotenv_path=env_path)
            return env_path
    return None


# === Setup Logging ===
def setup_logging(config: Dict, verbose: bool = False) -> Optional[Path]:
    """
    Configure the package logger: rotating log file, plus the console with --verbose.

    GRIP_LOG_DIR and GRIP_LOG_LEVEL override the config's logging section. When the
    log directory cannot be written, ~/.tendon_grip/logs is tried next; if that fails
    too the run continues without a log file.

    Returns:
        Path of the log file, or None when no log directory was writable
    """
    log_config = config.get("logging", {})
    log_level = os.environ.get("GRIP_LOG_LEVEL") or log_config.get("level", "INFO")
    log_format = log_config.get("format", DEFAULT_CONFIG["logging"]["format"])
    log_dir = os.environ.get("GRIP_LOG_DIR") or log_config.get("log_dir") or DEFAULT_LOG_DIR
    log_name = log_config.get("log_file", "grip_cli.log")

    logger.setLevel(getattr(logging, str(log_level).upper(), logging.INFO))
    # Clear existing handlers to prevent duplicates
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(log_format)
    log_file = None
    failures = []
    for candidate in (Path(log_dir), Path.home() / ".tendon_grip" / "logs"):
        try:
            candidate.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                candidate / log_name,
                maxBytes=log_config.get("max_size_bytes", 1048576),
                backupCount=log_config.get("backup_count", 3),
            )
        except OSError as e:
            failures.append(f"{candidate}: {e}")
            continue
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
        log_file = candidate / log_name
        break

    if verbose:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if log_file is None:
        logger.warning(f"No writable log directory, file logging disabled ({'; '.join(failures)})")
    elif failures:
        logger.warning(f"Log directory not writable, using {log_file.parent} ({failures[0]})")
    logger.debug(f"Logging to: {log_file}")
    return log_file


# === Helpers ===
def _load_hand(args) -> HandModel:
    return load_hand_config(resolve_hand_path(args.hand))


def _select_finger(hand: HandModel, name: Optional[str]) -> Finger:
    if not name:
        raise InputError(
            f"--finger is required; available fingers: {', '.join(hand.finger_names)}"
        )
    try:
        return hand.finger(name)
    except KeyError as e:
        raise InputError(e.args[0])


def _output_path(args, command: str, finger_name: str) -> str:
    if args.out:
        return args.out
    return f"{command}_{finger_name}.csv"


def write_csv(frame: pd.DataFrame, out: str, float_format: str = CSV_FLOAT_FORMAT) -> Optional[Path]:
    """Write a table to a file, or to stdout when out is '-'."""
    if out == "-":
        frame.to_csv(sys.stdout, index=False, float_format=float_format, lineterminator="\n")
        return None
    path = Path(out)
    frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def _parse_floats(text: Optional[str], count: int, name: str) -> np.ndarray:
    if text is None:
        return np.zeros(count)
    try:
        values = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InputError(f"{name} must be a comma-separated list of numbers, got '{text}'")
    if len(values) != count:
        raise InputError(f"{name} needs {count} values, got {len(values)}")
    if not np.all(np.isfinite(values)):
        raise InputError(f"{name} must be finite")
    return values


def state_columns(n_links: int) -> List[str]:
    """Header of a state file: theta1..N, omega1..N, alpha1..N."""
    return (
        [f"theta{i + 1}" for i in range(n_links)]
        + [f"omega{i + 1}" for i in range(n_links)]
        + [f"alpha{i + 1}" for i in range(n_links)]
    )


def read_state_file(path: str, n_links: int) -> pd.DataFrame:
    """
    Read a state CSV with the mandatory header theta1..,omega1..,alpha1.. (radians).

    Raises:
        InputError: If the file is missing, empty, has the wrong header or
            non-numeric / non-finite values
    """
    if not Path(path).exists():
        raise InputError(f"state file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InputError(f"malformed state file {path}: {e}")

    expected = state_columns(n_links)
    columns = [str(c).strip() for c in frame.columns]
    if columns != expected:
        raise InputError(
            f"state file {path} must have header {','.join(expected)}, "
            f"got {','.join(columns)}"
        )
    frame.columns = expected
    if frame.empty:
        raise InputError(f"state file {path} has no rows")
    try:
        values = frame.astype(float)
    except ValueError:
        raise InputError(f"state file {path} contains non-numeric values")
    if not np.all(np.isfinite(values.to_numpy())):
        raise InputError(f"state file {path} contains non-finite values")
    return values


# === Commands ===
def cmd_workspace(args, config: Dict) -> CommandOutcome:
    """Equal-angle sweep of one finger."""
    hand = _load_hand(args)
    finger = _select_finger(hand, args.finger)
    defaults = config["workspace"]
    min_deg = defaults["min_deg"] if args.min_deg is None else args.min_deg
    max_deg = defaults["max_deg"] if args.max_deg is None else args.max_deg
    steps = defaults["steps"] if args.steps is None else args.steps
    if steps < 2:
        raise InputError(f"--steps must be >= 2, got {steps}")

    sweep = equal_angle_sweep(finger.chain, np.radians(min_deg), np.radians(max_deg), steps)
    frame = sweep_to_csv_frame(sweep)
    path = write_csv(frame, _output_path(args, "workspace", finger.name), SWEEP_FLOAT_FORMAT)
    return CommandOutcome(EXIT_OK, path)


def cmd_statics(args, config: Dict) -> CommandOutcome:
    """Force chain report of one finger."""
    hand = _load_hand(args)
    finger = _select_finger(hand, args.finger)
    force = finger.drive.max_grip_force if args.force is None else args.force
    if force < 0:
        raise InputError(f"--force must be >= 0, got {force}")
    n_fingers = config["statics"]["n_fingers"] if args.n_fingers is None else args.n_fingers

    report = full_statics_report(
        finger.chain, finger.drive, force, n_fingers=n_fingers, gravity=hand.gravity
    )
    frame = pd.DataFrame(report.report_rows(), columns=["quantity", "value", "unit"])
    path = write_csv(frame, _output_path(args, "statics", finger.name))
    return CommandOutcome(EXIT_OK, path)


def cmd_hand_report(args, config: Dict) -> CommandOutcome:
    """Statics of every finger at its maximum grip force."""
    hand = _load_hand(args)
    n_fingers = config["statics"]["n_fingers"] if args.n_fingers is None else args.n_fingers
    rows = []
    for name, report in hand_statics(hand, n_fingers=n_fingers).items():
        rows.append((name, "max_grip_force", hand.finger(name).drive.max_grip_force, "N"))
        rows += [(name, *row) for row in report.report_rows()]
    frame = pd.DataFrame(rows, columns=["finger", "quantity", "value", "unit"])
    path = write_csv(frame, args.out or "hand-report.csv")
    return CommandOutcome(EXIT_OK, path)


def cmd_invdyn(args, config: Dict) -> CommandOutcome:
    """Append inverse-dynamics torques to every row of a state file."""
    hand = _load_hand(args)
    finger = _select_finger(hand, args.finger)
    n = finger.chain.n_links
    states = read_state_file(args.states, n)

    values = states.to_numpy()
    torques = np.array(
        [
            inverse_dynamics(
                finger.chain,
                JointState(row[:n], row[n : 2 * n], row[2 * n :]),
                hand.gravity,
            )
            for row in values
        ]
    )
    frame = states.copy()
    for i in range(n):
        frame[f"tau{i + 1}"] = torques[:, i]
    path = write_csv(frame, _output_path(args, "invdyn", finger.name))
    return CommandOutcome(EXIT_OK, path)


def cmd_simulate(args, config: Dict) -> CommandOutcome:
    """RK4 rollout of one finger under a torque program."""
    hand = _load_hand(args)
    finger = _select_finger(hand, args.finger)
    chain = finger.chain
    defaults = config["simulate"]
    duration = defaults["duration_s"] if args.duration is None else args.duration
    dt = defaults["dt_s"] if args.dt is None else args.dt
    gravity = hand.gravity if args.gravity is None else args.gravity
    if not duration > 0 or not dt > 0:
        raise InputError(f"--duration and --dt must be > 0, got {duration} and {dt}")
    if dt > duration:
        raise InputError(f"--dt ({dt}) must not exceed --duration ({duration})")
    if gravity < 0:
        raise InputError(f"--gravity must be >= 0, got {gravity}")

    kp = defaults["hold_kp"] if args.kp is None else args.kp
    kd = defaults["hold_kd"] if args.kd is None else args.kd
    try:
        program = parse_torque_program(args.program, chain, gravity, kp=kp, kd=kd)
    except ValueError as e:
        raise InputError(str(e))
    theta0 = np.radians(_parse_floats(args.theta0, chain.n_links, "--theta0"))
    omega0 = _parse_floats(args.omega0, chain.n_links, "--omega0")

    trajectory = simulate(chain, theta0, omega0, program, gravity, duration, dt)
    drift = energy_drift(trajectory)
    out = _output_path(args, "simulate", finger.name)
    path = write_csv(trajectory.to_frame(), out)
    if path is None:
        logger.info(f"energy drift: {drift:.6g}")
    else:
        print(f"energy drift: {drift:.6g}")
    return CommandOutcome(EXIT_OK, path)


def cmd_verify(args, config: Dict) -> CommandOutcome:
    """Cross-check closed-form dynamics against the finite-difference oracle."""
    hand = _load_hand(args)
    finger = _select_finger(hand, args.finger)
    defaults = config["verify"]
    samples = defaults["samples"] if args.samples is None else args.samples
    seed = defaults["seed"] if args.seed is None else args.seed
    tolerance = defaults["tolerance"]
    if samples < 1:
        raise InputError(f"--samples must be >= 1, got {samples}")

    report = cross_check(
        finger.chain, hand.gravity, samples, seed, h=defaults["fd_step"]
    )
    path = write_csv(report.to_frame(), _output_path(args, "verify", finger.name))
    if report.max_relative_error > tolerance:
        print(
            f"grip: error: oracle mismatch, max relative error "
            f"{report.max_relative_error:.3e} exceeds {tolerance:.1e}",
            file=sys.stderr,
        )
        return CommandOutcome(EXIT_NUMERICAL_FAILURE, path)
    return CommandOutcome(EXIT_OK, path)


# === Parser ===
def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hand", required=True, help="Hand config JSON path or bundled hand name")
    common.add_argument("--finger", default=None, help="Finger name in the hand config")
    common.add_argument("--out", default=None, help="Output CSV path, '-' for stdout")
    common.add_argument("--verbose", action="store_true", help="Also log to the console")

    parser = GripArgumentParser(
        prog="grip",
        description="Kinematics, statics and dynamics of tendon-driven grippers",
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=GripArgumentParser)
    subparsers.required = True

    workspace = subparsers.add_parser("workspace", parents=[common], help="Equal-angle fingertip sweep")
    workspace.add_argument("--min-deg", type=float, default=None)
    workspace.add_argument("--max-deg", type=float, default=None)
    workspace.add_argument("--steps", type=int, default=None)
    workspace.set_defaults(handler=cmd_workspace)

    statics = subparsers.add_parser("statics", parents=[common], help="Tendon force chain report")
    statics.add_argument("--force", type=float, default=None, help="Grip force in N (default: finger max)")
    statics.add_argument("--n-fingers", type=int, default=None, help="Fingers sharing the payload")
    statics.set_defaults(handler=cmd_statics)

    hand_report = subparsers.add_parser("hand-report", parents=[common], help="Statics of every finger")
    hand_report.add_argument("--n-fingers", type=int, default=None)
    hand_report.set_defaults(handler=cmd_hand_report)

    invdyn = subparsers.add_parser("invdyn", parents=[common], help="Inverse dynamics of a state file")
    invdyn.add_argument("--states", required=True, help="CSV with theta1..,omega1..,alpha1.. columns")
    invdyn.set_defaults(handler=cmd_invdyn)

    sim = subparsers.add_parser(
        "simulate",
        parents=[common],
        help="RK4 forward simulation",
        description="RK4 forward simulation. The energy drift is printed after the CSV is written; "
        "with --out - it goes to the log file instead so stdout stays pure CSV.",
    )
    sim.add_argument("--program", default="zero", help="zero | gravity_comp | constant:<N*m,..> | hold:<deg,..>")
    sim.add_argument("--duration", type=float, default=None, help="Simulated time in s")
    sim.add_argument("--dt", type=float, default=None, help="RK4 step in s")
    sim.add_argument("--gravity", type=float, default=None, help="Override the hand's gravity (m/s^2)")
    sim.add_argument("--theta0", default=None, help="Initial absolute angles in degrees, comma-separated")
    sim.add_argument("--omega0", default=None, help="Initial velocities in rad/s, comma-separated")
    sim.add_argument("--kp", type=float, default=None, help="hold: proportional gain (N*m/rad)")
    sim.add_argument(
        "--kd",
        type=float,
        default=None,
        help="hold: derivative gain (N*m*s/rad). Light fingers need far smaller gains "
        "than the defaults, or a smaller --dt, or the run diverges",
    )
    sim.set_defaults(handler=cmd_simulate)

    verify = subparsers.add_parser("verify", parents=[common], help="Finite-difference dynamics cross-check")
    verify.add_argument("--samples", type=int, default=None)
    verify.add_argument("--seed", type=int, default=None)
    verify.set_defaults(handler=cmd_verify)

    return parser


# === Main ===
def _fail(exit_code: int, message: str) -> int:
    message = " ".join(str(message).split())
    print(f"grip: error: {message}", file=sys.stderr)
    return exit_code


def run(argv: Sequence[str] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = create_parser()
    args = parser.parse_args(argv)

    try:
        load_environment()
        config = load_config()
        setup_logging(config, verbose=args.verbose)
    except (InputError, OSError) as e:
        return _fail(EXIT_INPUT_ERROR, e)

    logger.info(f"grip {args.command} started")
    try:
        outcome = args.handler(args, config)
    except SimulationDivergedError as e:
        logger.error(str(e))
        return _fail(EXIT_NUMERICAL_FAILURE, e)
    except np.linalg.LinAlgError as e:
        logger.error(f"Linear algebra failure: {e}")
        return _fail(EXIT_NUMERICAL_FAILURE, f"linear algebra failure: {e}")
    except HandConfigError as e:
        logger.error(f"Invalid hand config: {e}")
        return _fail(EXIT_INPUT_ERROR, f"invalid hand config: {e}")
    except (InputError, ValueError, FileNotFoundError) as e:
        logger.error(str(e))
        logger.debug(traceback.format_exc())
        return _fail(EXIT_INPUT_ERROR, e)

    logger.info(f"grip {args.command} finished with exit code {outcome.exit_code}")
    return outcome.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
