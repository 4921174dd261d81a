"""Mutation of quivers with potential and of their representations, over F_p or Q."""
from .exactlin import PrimeField, RationalField, parse_field
from .qpmut import QP, mutate
from .quiver import Quiver
from .repcat import Representation
from .repmut import mutate_rep

__version__ = "0.1.0"

__all__ = ["PrimeField", "RationalField", "parse_field", "QP", "mutate", "Quiver",
           "Representation", "mutate_rep"]
