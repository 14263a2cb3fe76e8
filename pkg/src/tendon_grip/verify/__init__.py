"""Numerical oracles for the closed-form dynamics."""
