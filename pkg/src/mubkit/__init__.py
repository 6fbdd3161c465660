"""Canonical MUB and the restricted Clifford group over GF(q)."""

from .gf import Field, FieldElement, PhasePoint, field_for_q, field_new, primitive_element, rays
from .hw import hw_group
from .clifford import SL2Matrix, appleby_unitary, enumerate_group, induced_symplectic, synthesize_unitary
from .states import PureState, StateSet, canonical_mub, hesse_sic
from .designs import check_2design, check_mub, check_sic, check_tight_frame, unitary_2design_potential
from .orbits import fixed_points, highly_symmetric_check, orbit, stabilizer, theorem1_experiment

__version__ = "0.1.0"
