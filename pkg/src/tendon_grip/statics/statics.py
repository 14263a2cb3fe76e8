"""
Tendon statics of a straightened finger.

The force chain runs from a fingertip force F to the actuator:

    M_k = F * sum_{i>=k} L_i        joint moments, proximal to distal
    T   = max_k M_k / r_p           tendon tension at the pulley
    tau = T * r_a                   actuator torque
    m   = F * mu / g                payload held by friction, per finger
    D   = sqrt(4 T / (pi sigma))    minimum wire diameter

All inputs and outputs are SI; report_rows() gives the reporting view
(N*mm, N, N*m, kg, mm) used for CSV output.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from tendon_grip.hand_model.hand_model import HandModel, LinkChain, TendonDrive

logger = logging.getLogger(__name__)

DEFAULT_PAYLOAD_FINGERS = 3


@dataclass(frozen=True)
class StaticsReport:
    """Result of the force chain for one finger at one grip force (SI units)."""

    joint_moments: Tuple[float, ...]
    max_moment: float
    tendon_tension: float
    actuator_torque: float
    payload_per_finger: float
    payload_total: float
    min_wire_diameter: float

    def report_rows(self) -> List[Tuple[str, float, str]]:
        """(quantity, value, unit) rows in reporting units."""
        rows = [
            (f"joint_moment_{k + 1}", m * 1000.0, "N*mm")
            for k, m in enumerate(self.joint_moments)
        ]
        rows += [
            ("max_moment", self.max_moment * 1000.0, "N*mm"),
            ("tendon_tension", self.tendon_tension, "N"),
            ("actuator_torque", self.actuator_torque, "N*m"),
            ("payload_per_finger", self.payload_per_finger, "kg"),
            ("payload_total", self.payload_total, "kg"),
            ("min_wire_diameter", self.min_wire_diameter * 1000.0, "mm"),
        ]
        return rows


def joint_moments(chain: LinkChain, force: float) -> np.ndarray:
    """
    Moments at each joint for a fingertip force perpendicular to the straight finger.

    Raises:
        ValueError: If force is negative
    """
    if force < 0:
        raise ValueError(f"grip force must be >= 0, got {force}")
    lengths = np.asarray(chain.lengths)
    # lever arm of joint k is the length of everything distal to it
    lever_arms = np.cumsum(lengths[::-1])[::-1]
    return force * lever_arms


def tendon_tension(max_moment: float, drive: TendonDrive) -> float:
    """Tension needed at the pulley to hold max_moment."""
    return max_moment / drive.pulley_radius


def actuator_torque(tension: float, drive: TendonDrive) -> float:
    """Actuator torque needed to produce the tendon tension."""
    return tension * drive.actuator_radius


def payload_capacity(
    force: float, friction_mu: float, gravity: float, n_fingers: int
) -> Tuple[float, float]:
    """
    Mass held by friction: (per finger, total over n_fingers), in kg.

    Raises:
        ValueError: If gravity <= 0 or n_fingers < 1
    """
    if gravity <= 0:
        raise ValueError(f"gravity must be > 0 for payload capacity, got {gravity}")
    if n_fingers < 1:
        raise ValueError(f"n_fingers must be >= 1, got {n_fingers}")
    per_finger = force * friction_mu / gravity
    return per_finger, n_fingers * per_finger


def min_wire_diameter(tension: float, allowable_stress: float) -> float:
    """
    Smallest round wire that carries the tension at the allowable stress.

    Raises:
        ValueError: If allowable_stress <= 0 or tension < 0
    """
    if allowable_stress <= 0:
        raise ValueError(f"allowable stress must be > 0, got {allowable_stress}")
    if tension < 0:
        raise ValueError(f"tension must be >= 0, got {tension}")
    return math.sqrt(4.0 * tension / (math.pi * allowable_stress))


def full_statics_report(
    chain: LinkChain,
    drive: TendonDrive,
    force: float,
    n_fingers: int = DEFAULT_PAYLOAD_FINGERS,
    gravity: float = 9.81,
) -> StaticsReport:
    """Run the whole force chain for one finger at grip force `force`."""
    moments = joint_moments(chain, force)
    max_moment = float(moments.max())
    tension = tendon_tension(max_moment, drive)
    torque = actuator_torque(tension, drive)
    per_finger, total = payload_capacity(
        force, drive.friction_coefficient, gravity, n_fingers
    )
    diameter = min_wire_diameter(tension, drive.allowable_stress)

    logger.debug(
        f"Statics at F = {force} N: T = {tension:.6g} N, tau = {torque:.6g} N*m, "
        f"D_min = {diameter * 1000.0:.6g} mm"
    )
    return StaticsReport(
        joint_moments=tuple(float(m) for m in moments),
        max_moment=max_moment,
        tendon_tension=tension,
        actuator_torque=torque,
        payload_per_finger=per_finger,
        payload_total=total,
        min_wire_diameter=diameter,
    )


def statics_coefficients(chain: LinkChain, drive: TendonDrive) -> Dict[str, float]:
    """
    Per-newton coefficients of the force chain.

    tension_per_n is the dimensionless ratio sum(L) / r_p; torque_per_n is in m.
    """
    tension_per_n = tendon_tension(chain.reach, drive)
    return {
        "moment_per_n": chain.reach,
        "tension_per_n": tension_per_n,
        "torque_per_n": actuator_torque(tension_per_n, drive),
    }


def hand_statics(
    hand: HandModel, n_fingers: int = DEFAULT_PAYLOAD_FINGERS
) -> Dict[str, StaticsReport]:
    """StaticsReport for every finger at that finger's own maximum grip force."""
    reports = {}
    for finger in hand.fingers:
        reports[finger.name] = full_statics_report(
            finger.chain,
            finger.drive,
            finger.drive.max_grip_force,
            n_fingers=n_fingers,
            gravity=hand.gravity,
        )
    logger.info(f"Computed statics for {len(reports)} fingers")
    return reports
