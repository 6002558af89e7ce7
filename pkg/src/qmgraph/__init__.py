"""Relation graphs of quantum matrix algebras, their Cuntz-Krieger families,
the Kraus channels built from Hamiltonian paths, and multi-qubit product tests."""

__version__ = "0.1.0"

from .errors import InvalidArgument, NotCompletelyPositive

__all__ = ["InvalidArgument", "NotCompletelyPositive", "__version__"]
