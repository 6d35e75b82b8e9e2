"""Slow light from Autler-Townes splitting in quantum-dot ensembles."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND  # noqa: E402
