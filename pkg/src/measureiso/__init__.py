"""Exact optimal transport, probability metrics and measure-space isometries
for finitely supported measures."""

from .errors import DomainError, MeasureIsoError, SolverError, ValidationError
from .measures import (
    Coupling,
    FinitePointMeasure,
    canonicalize,
    center_of_mass,
    coupling_cost,
    dirac,
    is_dirac,
    measure,
    product_coupling,
    push_forward,
)
from .spaces import SpaceDescriptor, discrete, distance, euclidean, line, sphere
from .transport import TransportResult, cost_matrix, solve_transport, wasserstein
from .oracle import oracle_transport

__version__ = "0.1.0"
