"""
Hand data model.

Immutable descriptions of a tendon-driven hand: the link chain of each finger,
the tendon drive that actuates it, the joint state of a chain, and the hand that
groups them. All quantities are stored in SI base units; unit conversion happens
only at the config boundary (see hand_config.py).

Angles are ABSOLUTE throughout the package: each link's orientation is measured
from the world x-axis. Use relative_to_absolute / absolute_to_relative to move
between that convention and joint-relative angles.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    """Raised when a per-joint vector does not match the chain's link count."""


def _as_float_tuple(values: Iterable[float]) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


def check_dimension(chain_or_n, values: Sequence[float], name: str) -> np.ndarray:
    """
    Return values as a float array, checking it has one entry per link.

    Args:
        chain_or_n: A LinkChain or an integer link count
        values: Per-joint values
        name: Name used in the error message

    Raises:
        DimensionMismatchError: If the length does not match
    """
    n = chain_or_n if isinstance(chain_or_n, int) else chain_or_n.n_links
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DimensionMismatchError(
            f"{name} must have {n} entries, got shape {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class LinkChain:
    """Geometric and inertial description of one planar finger (SI units)."""

    lengths: Tuple[float, ...]
    masses: Tuple[float, ...]
    com_offsets: Tuple[float, ...]
    inertias: Tuple[float, ...]

    def __post_init__(self):
        for name in ("lengths", "masses", "com_offsets", "inertias"):
            object.__setattr__(self, name, _as_float_tuple(getattr(self, name)))

        n = len(self.lengths)
        if n < 1:
            raise ValueError("a link chain needs at least one link")
        for name in ("masses", "com_offsets", "inertias"):
            if len(getattr(self, name)) != n:
                raise ValueError(
                    f"{name} has {len(getattr(self, name))} entries, expected {n}"
                )

        for i in range(n):
            length, mass = self.lengths[i], self.masses[i]
            offset, inertia = self.com_offsets[i], self.inertias[i]
            if not all(math.isfinite(v) for v in (length, mass, offset, inertia)):
                raise ValueError(f"link {i} has non-finite parameters")
            if length <= 0:
                raise ValueError(f"lengths[{i}] must be > 0, got {length}")
            if mass <= 0:
                raise ValueError(f"masses[{i}] must be > 0, got {mass}")
            if not 0 < offset <= length:
                raise ValueError(
                    f"com_offsets[{i}] must satisfy 0 < d <= L ({length}), got {offset}"
                )
            if inertia < 0:
                raise ValueError(f"inertias[{i}] must be >= 0, got {inertia}")

    @property
    def n_links(self) -> int:
        return len(self.lengths)

    @property
    def reach(self) -> float:
        """Length of the fully extended chain."""
        return math.fsum(self.lengths)


@dataclass(frozen=True)
class TendonDrive:
    """Tendon transmission of one finger (SI units)."""

    pulley_radius: float
    actuator_radius: float
    allowable_stress: float
    friction_coefficient: float
    max_grip_force: float

    def __post_init__(self):
        for name in (
            "pulley_radius",
            "actuator_radius",
            "allowable_stress",
            "friction_coefficient",
            "max_grip_force",
        ):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

        if self.pulley_radius <= 0:
            raise ValueError(f"pulley_radius must be > 0, got {self.pulley_radius}")
        if self.actuator_radius <= 0:
            raise ValueError(
                f"actuator_radius must be > 0, got {self.actuator_radius}"
            )
        if self.allowable_stress <= 0:
            raise ValueError(
                f"allowable_stress must be > 0, got {self.allowable_stress}"
            )
        if self.friction_coefficient < 0:
            raise ValueError(
                f"friction_coefficient must be >= 0, got {self.friction_coefficient}"
            )
        if self.max_grip_force < 0:
            raise ValueError(f"max_grip_force must be >= 0, got {self.max_grip_force}")


@dataclass(frozen=True)
class JointState:
    """Absolute joint angles, velocities and accelerations of one chain."""

    theta: Tuple[float, ...]
    theta_dot: Tuple[float, ...]
    theta_ddot: Tuple[float, ...] = field(default=None)

    def __post_init__(self):
        theta = _as_float_tuple(self.theta)
        theta_dot = _as_float_tuple(self.theta_dot)
        if self.theta_ddot is None:
            theta_ddot = (0.0,) * len(theta)
        else:
            theta_ddot = _as_float_tuple(self.theta_ddot)

        if not len(theta) == len(theta_dot) == len(theta_ddot):
            raise DimensionMismatchError(
                "theta, theta_dot and theta_ddot must have the same length, got "
                f"{len(theta)}, {len(theta_dot)}, {len(theta_ddot)}"
            )
        if not all(math.isfinite(v) for v in theta + theta_dot + theta_ddot):
            raise ValueError("joint state entries must be finite")

        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_dot", theta_dot)
        object.__setattr__(self, "theta_ddot", theta_ddot)

    @property
    def n_links(self) -> int:
        return len(self.theta)

    @classmethod
    def at_rest(cls, theta: Sequence[float]) -> "JointState":
        n = len(theta)
        return cls(theta, (0.0,) * n, (0.0,) * n)

    def with_acceleration(self, theta_ddot: Sequence[float]) -> "JointState":
        return JointState(self.theta, self.theta_dot, theta_ddot)

    def check_against(self, chain: LinkChain) -> None:
        if self.n_links != chain.n_links:
            raise DimensionMismatchError(
                f"state has {self.n_links} joints, chain has {chain.n_links} links"
            )


@dataclass(frozen=True)
class Finger:
    """A named link chain with its tendon drive."""

    name: str
    chain: LinkChain
    drive: TendonDrive


@dataclass(frozen=True)
class HandModel:
    """A named collection of fingers sharing one gravity value."""

    fingers: Tuple[Finger, ...]
    gravity: float = 9.81

    def __post_init__(self):
        fingers = tuple(self.fingers)
        if not fingers:
            raise ValueError("a hand needs at least one finger")
        names = [f.name for f in fingers]
        if len(set(names)) != len(names):
            raise ValueError(f"finger names must be unique, got {names}")
        gravity = float(self.gravity)
        if not math.isfinite(gravity) or gravity < 0:
            raise ValueError(f"gravity must be finite and >= 0, got {gravity}")
        object.__setattr__(self, "fingers", fingers)
        object.__setattr__(self, "gravity", gravity)

    @property
    def finger_names(self) -> Tuple[str, ...]:
        return tuple(f.name for f in self.fingers)

    @property
    def total_dof(self) -> int:
        """One planar revolute DOF per link, summed over the hand."""
        return sum(f.chain.n_links for f in self.fingers)

    def finger(self, name: str) -> Finger:
        """
        Look up a finger by name.

        Raises:
            KeyError: If no finger has that name; the message lists the available ones
        """
        for f in self.fingers:
            if f.name == name:
                return f
        raise KeyError(
            f"unknown finger '{name}'; available fingers: {', '.join(self.finger_names)}"
        )


# === Angle conventions ===
def relative_to_absolute(theta_rel: Sequence[float]) -> np.ndarray:
    """Joint-relative angles to absolute angles: abs_i = sum of rel_j for j <= i."""
    return np.cumsum(np.asarray(theta_rel, dtype=float))


def absolute_to_relative(theta_abs: Sequence[float]) -> np.ndarray:
    """Absolute angles back to joint-relative angles (first differences)."""
    theta_abs = np.asarray(theta_abs, dtype=float)
    return np.diff(theta_abs, prepend=0.0)


def slender_rod_chain(
    lengths: Sequence[float],
    density: float = 2650.0,
    cross_section: float = 10e-3 * 5e-3,
    com_offsets: Optional[Sequence[float]] = None,
) -> LinkChain:
    """
    Build a chain of uniform rectangular rods.

    Masses are density * cross_section * L, centres of mass sit at L/2 unless given,
    and inertias are m L^2 / 12 about the centre of mass. The defaults describe
    aluminium 5083 bars of 10 mm x 5 mm section; these are modelling assumptions,
    not measured values.
    """
    lengths = np.asarray(lengths, dtype=float)
    masses = density * cross_section * lengths
    offsets = lengths / 2.0 if com_offsets is None else np.asarray(com_offsets, float)
    inertias = masses * lengths**2 / 12.0
    return LinkChain(lengths, masses, offsets, inertias)
