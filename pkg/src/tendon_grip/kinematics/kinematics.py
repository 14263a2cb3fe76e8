"""
Forward kinematics of a planar serial chain.

Every function takes ABSOLUTE link angles (each measured from the world x-axis),
so the fingertip is simply the sum of the link vectors:

    x = sum_i L_i cos(theta_i),   y = sum_i L_i sin(theta_i)

The equal-angle sweep applies the same relative angle at every joint, which in
absolute terms is [theta, 2 theta, 3 theta, ...].
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import pandas as pd

from tendon_grip.hand_model.hand_model import (
    LinkChain,
    check_dimension,
    relative_to_absolute,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["theta_deg", "x_mm", "y_mm"]


@dataclass(frozen=True)
class PlanarPoint:
    """A point in the finger plane, in meters."""

    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def norm(self) -> float:
        return float(np.hypot(self.x, self.y))


def _link_vectors(chain: LinkChain, theta_abs: Sequence[float]) -> np.ndarray:
    theta = check_dimension(chain, theta_abs, "theta_abs")
    lengths = np.asarray(chain.lengths)
    return np.column_stack((lengths * np.cos(theta), lengths * np.sin(theta)))


def fingertip_position(chain: LinkChain, theta_abs: Sequence[float]) -> PlanarPoint:
    """Fingertip position for absolute link angles."""
    x, y = _link_vectors(chain, theta_abs).sum(axis=0)
    return PlanarPoint(float(x), float(y))


def joint_positions(chain: LinkChain, theta_abs: Sequence[float]) -> List[PlanarPoint]:
    """
    Positions at the far end of each link.

    Point k is the partial sum over the first k+1 links: the joints after the
    base, ending with the fingertip.
    """
    points = np.cumsum(_link_vectors(chain, theta_abs), axis=0)
    return [PlanarPoint(float(x), float(y)) for x, y in points]


def com_positions(chain: LinkChain, theta_abs: Sequence[float]) -> np.ndarray:
    """Centre-of-mass position of every link, shape (n_links, 2)."""
    vectors = _link_vectors(chain, theta_abs)
    theta = np.asarray(theta_abs, dtype=float)
    offsets = np.asarray(chain.com_offsets)
    proximal = np.cumsum(vectors, axis=0) - vectors
    return proximal + np.column_stack((offsets * np.cos(theta), offsets * np.sin(theta)))


def reach_radius(chain: LinkChain) -> float:
    """Upper bound on the fingertip distance from the base."""
    return chain.reach


def equal_angle_sweep(
    chain: LinkChain, theta_start: float, theta_end: float, steps: int
) -> pd.DataFrame:
    """
    Sweep one relative angle applied at every joint.

    Args:
        chain: Finger geometry
        theta_start: First relative angle (rad)
        theta_end: Last relative angle (rad)
        steps: Number of samples, both endpoints included

    Returns:
        DataFrame with columns theta (rad), x (m), y (m), one row per sample

    Raises:
        ValueError: If steps < 2
    """
    if isinstance(steps, bool) or int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps}")
    steps = int(steps)

    thetas = np.linspace(theta_start, theta_end, steps)
    rows = []
    for theta in thetas:
        theta_abs = relative_to_absolute([theta] * chain.n_links)
        tip = fingertip_position(chain, theta_abs)
        rows.append((float(theta), tip.x, tip.y))

    logger.debug(
        f"Equal-angle sweep over {steps} samples from {theta_start} to {theta_end} rad"
    )
    return pd.DataFrame(rows, columns=["theta", "x", "y"])


def sweep_to_csv_frame(sweep: pd.DataFrame) -> pd.DataFrame:
    """Convert a sweep to its CSV form: degrees and millimetres, 3 decimals."""
    frame = pd.DataFrame(
        {
            "theta_deg": np.degrees(sweep["theta"].to_numpy()),
            "x_mm": sweep["x"].to_numpy() * 1000.0,
            "y_mm": sweep["y"].to_numpy() * 1000.0,
        }
    )
    # +0.0 turns -0.0 into 0.0 so near-zero values print without a sign
    return frame.round(3) + 0.0
