"""Gap-free packings and desk-scale checks of perimeter divergence."""
__version__ = "0.1.0"
