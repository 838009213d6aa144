"""Exact wall-crossing and tropical disc counting engine.

Everything is computed in exact rational (or Gaussian-rational) arithmetic;
no floating point enters any invariant. The package is organized as:

- gaussian:   exact complex rationals and phase comparison
- lattice:    charge lattice, skew pairing, central charges, sublevel sets
- series:     energy/degree-truncated formal series over the charge monoid
- autom:      elementary transforms, automorphisms, ordered products,
              dilogarithm generators, phase-ordered slab factorization
- scattering: planar wall diagrams, loop products, consistency completion
- tropical:   singular affine base, monodromy, tropical disc enumeration
- dt:         quadratic refinement and integer (DT-type) invariants
- qtorus:     q-deformed quantum-torus series and refined counts
- diagio:     text diagram file format
- render:     matplotlib figure output
- cli:        command line front end
"""

from .gaussian import GaussianRational
from .lattice import ChargeLattice, CentralCharge, Sector, sublevel_classes
from .series import SeriesContext, TruncatedSeries, SlabFunction
from .scattering import ScatteringDiagram
from .tropical import SingularBase, Singularity, enumerate_discs, omega_trop
from .dt import InvariantTable, slab_to_dt, multiple_cover
from .qtorus import QLaurent, q_int, refined_omega

__all__ = [
    "GaussianRational",
    "ChargeLattice",
    "CentralCharge",
    "Sector",
    "sublevel_classes",
    "SeriesContext",
    "TruncatedSeries",
    "SlabFunction",
    "ScatteringDiagram",
    "SingularBase",
    "Singularity",
    "enumerate_discs",
    "omega_trop",
    "InvariantTable",
    "slab_to_dt",
    "multiple_cover",
    "QLaurent",
    "q_int",
    "refined_omega",
]
