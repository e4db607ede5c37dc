"""Ptolemy coordinates for boundary-unipotent representations of 3-manifolds.

Submodules: triangulation, variety, solver, bloch, reconstruct, irrep,
gluing, relations, cli.
"""

from .bloch import complex_volume, lambda_element
from .errors import PtolemyError
from .solver import SolverConfig, solve_newton_multistart, substitute_component, verify_solution
from .triangulation import Triangulation, Z2Cocycle, enumerate_h2, load_triangulation, parse_triangulation
from .variety import choose_gauge, generate_relations

__version__ = "0.1.0"

__all__ = [
    "PtolemyError",
    "SolverConfig",
    "Triangulation",
    "Z2Cocycle",
    "choose_gauge",
    "complex_volume",
    "enumerate_h2",
    "generate_relations",
    "lambda_element",
    "load_triangulation",
    "parse_triangulation",
    "solve_newton_multistart",
    "substitute_component",
    "verify_solution",
]
