"""Local-unitary orbit classification for bipartite CC and CQ states."""
from .classify import Classification, OrbitReport, classify_state
from .kernels import BACKEND
from .lie import GroupSpec, Variant
from .oracle import numeric_orbit_report, polar_complex_structure, verify_formulas
from .states import (CCState, CQState, DensityMatrix, PureSeparableSpec, StateError,
                     cc_to_density, cq_to_density, parse_state)

__version__ = "0.1.0"
