"""Network Bell inequalities: bounds, optimal realizations and self-testing checks."""

from netbell.classical import brute_force_delta, classical_bound, eta_brute_force, eta_closed_form
from netbell.encoding import EncodingScheme, Policy, generate_transversal, sign_matrix
from netbell.errors import (
    CapacityError,
    DegenerateRealization,
    DimensionMismatch,
    InvalidOperand,
    InvalidParameter,
    NetbellError,
    NotApplicable,
)
from netbell.realization import Realization, apply_visibility, correlator_table, optimal_realization
from netbell.sampling import sample_and_estimate, sample_counts
from netbell.scenarios import Scenario, build_scenario
from netbell.seesaw import SeesawConfig, seesaw_optimize
from netbell.verifier import CertificationReport, certify

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CertificationReport",
    "DegenerateRealization",
    "DimensionMismatch",
    "EncodingScheme",
    "InvalidOperand",
    "InvalidParameter",
    "NetbellError",
    "NotApplicable",
    "Policy",
    "Realization",
    "Scenario",
    "SeesawConfig",
    "apply_visibility",
    "brute_force_delta",
    "build_scenario",
    "certify",
    "classical_bound",
    "correlator_table",
    "eta_brute_force",
    "eta_closed_form",
    "generate_transversal",
    "optimal_realization",
    "sample_and_estimate",
    "sample_counts",
    "seesaw_optimize",
    "sign_matrix",
]
