"""Lagrangian dynamics of planar link chains."""
