"""Bundled demo data, simulation configs and published reference tables."""
