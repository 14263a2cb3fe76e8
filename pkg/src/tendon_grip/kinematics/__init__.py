"""Planar serial-chain forward kinematics."""
