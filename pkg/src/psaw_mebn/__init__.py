"""Multi-entity Bayesian network engine for predictive situation awareness.

Parse an MTheory and a world, validate the theory against MEBN rules and a
conformance profile, ground a situation-specific Bayesian network, and
compute exact posterior marginals.
"""

from .core import BUILTIN_PROFILES, MSAW, PSAW, Atom, ConformanceProfile, MFrag, MTheory, RVTemplate, WorldModel
from .diagnostics import (
    Diagnostic,
    GroundingError,
    InferenceError,
    MebnError,
    OracleError,
    ParseError,
    Severity,
    SourceSpan,
)
from .dsl import (
    parse_ground_atom,
    parse_profile,
    parse_theory,
    parse_world,
    serialize_profile,
    serialize_theory,
    serialize_world,
)
from .grounding import SSBN, GroundNode, build_ssbn, export_dot, export_json
from .inference import Posterior, elimination_order, eliminate_marginal, enumerate_marginal, posterior
from .validator import ValidationReport, validate_all

__all__ = [
    "Atom", "BUILTIN_PROFILES", "ConformanceProfile", "Diagnostic", "GroundNode", "GroundingError",
    "InferenceError", "MFrag", "MSAW", "MTheory", "MebnError", "OracleError", "PSAW", "ParseError",
    "Posterior", "RVTemplate", "SSBN", "Severity", "SourceSpan", "ValidationReport", "WorldModel",
    "build_ssbn", "elimination_order", "eliminate_marginal", "enumerate_marginal", "export_dot",
    "export_json", "parse_ground_atom", "parse_profile", "parse_theory", "parse_world", "posterior",
    "serialize_profile", "serialize_theory", "serialize_world", "validate_all",
]
