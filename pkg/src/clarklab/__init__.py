"""Numerical toolkit for matrix-valued contractive analytic functions:
their positive matrix boundary measures, Clark-type unitary perturbations,
and sampling/reconstruction in the associated model spaces."""

from . import charfun, gallery, haar, matfun, modelspace, moments, opmodel
from .errors import ClarkLabError, DomainError, InternalError, NumericalError
from .matfun import BlaschkePotapovFactor, MatFunction

__all__ = [
    "BlaschkePotapovFactor",
    "ClarkLabError",
    "DomainError",
    "InternalError",
    "MatFunction",
    "NumericalError",
    "charfun",
    "gallery",
    "haar",
    "matfun",
    "modelspace",
    "moments",
    "opmodel",
]

__version__ = "0.1.0"
