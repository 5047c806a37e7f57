"""Semiclassical soliton ensembles for the focusing NLS hierarchy."""
__version__ = "0.1.0"
