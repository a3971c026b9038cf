"""Opacity verification and enforcement for Petri nets and labeled transition systems."""

from .checker import (
    CounterExample,
    DelayEstimator,
    Verdict,
    check,
    check_k_step_strong,
    check_k_step_weak,
    check_simple,
)
from .corpus import load_corpus
from .enforce import EnforcementPatch, SuperLanguageAdditions, compute_min_superlanguage, opacify
from .errors import (
    EnforcementError,
    ModelError,
    OpacityError,
    PreconditionError,
    UnboundedNetError,
    UsageError,
)
from .lts import LabeledTransitionSystem, SecretSpec, enumerate_runs, observationally_equivalent_runs, project
from .net import (
    Marking,
    OWFNet,
    PetriNet,
    SecretMarking,
    build_reachability_graph,
    enabled,
    fire,
    incidence_matrix,
    validate_wf_structure,
)
from .oracle import oracle_disclosures
from .sog import Sog, build_sog, export_dot
from .stateset import BitStateSet, ExplicitStateSet, img, saturate

__all__ = [
    "BitStateSet", "CounterExample", "DelayEstimator", "EnforcementError", "EnforcementPatch",
    "ExplicitStateSet", "LabeledTransitionSystem", "Marking", "ModelError", "OWFNet", "OpacityError",
    "PetriNet", "PreconditionError", "SecretMarking", "SecretSpec", "Sog", "SuperLanguageAdditions",
    "UnboundedNetError", "UsageError", "Verdict", "build_reachability_graph", "build_sog", "check",
    "check_k_step_strong", "check_k_step_weak", "check_simple", "compute_min_superlanguage", "enabled",
    "enumerate_runs", "export_dot", "fire", "img", "incidence_matrix", "load_corpus",
    "observationally_equivalent_runs", "opacify", "oracle_disclosures", "project", "saturate",
    "validate_wf_structure",
]
