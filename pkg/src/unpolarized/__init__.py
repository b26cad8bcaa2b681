"""Polarization multipoles, Majorana constellations and maximally unpolarized spin states."""

__version__ = "0.1.0"

from .angular import EulerAngles, HalfInt, clebsch_gordan, wigner_D, wigner_d_small
from .design import design_order, polynomial_average_check, spherical_harmonic
from .fixtures import load_fixture, verify_fixture
from .majorana import Constellation, constellation, constellation_match, constellation_to_state, q_function
from .metrology import AxisAngle, orthogonality_angle, rotation_overlap, sensitivity, sensitivity_scan
from .multipole import (
    cumulative,
    cumulative_projector,
    cumulative_pure,
    max_value,
    multipoles,
    unpolarization_order,
)
from .search import SearchConfig, SearchResult, max_killable_order, minimize, objective_and_gradient
from .spinstate import (
    SpinState,
    basis_state,
    coherent_state,
    noon_state,
    random_state,
    rotate,
    stokes_expectation,
    table1_state,
)
