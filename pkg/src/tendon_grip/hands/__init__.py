"""Bundled hand configurations."""
