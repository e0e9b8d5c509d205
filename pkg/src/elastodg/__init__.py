"""One-dimensional DG elastic-wave solver with physics-based numerical fluxes."""

__version__ = "0.1.0"
