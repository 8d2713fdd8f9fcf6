"""Description-logic features: grammar, evaluation and enumeration."""

from relgrl.features.grammar import (
    TOP,
    AndConcept,
    DistanceFeature,
    ExistsConcept,
    Feature,
    FeatureSyntaxError,
    ForallConcept,
    InverseRole,
    NotConcept,
    PrimitiveConcept,
    PrimitiveRole,
    RoleEqConcept,
    TopConcept,
    conj,
    dump_features,
    inverse,
    load_features,
    parse_concept,
    parse_node,
    parse_role,
    role_eq,
)
from relgrl.features.evaluate import (
    StateIndex,
    eval_concept,
    eval_distance,
    eval_role,
    feature_value,
    object_membership,
)
from relgrl.features.enumerate import denotation_signature, enumerate_features

__all__ = [
    "TOP",
    "AndConcept",
    "DistanceFeature",
    "ExistsConcept",
    "Feature",
    "FeatureSyntaxError",
    "ForallConcept",
    "InverseRole",
    "NotConcept",
    "PrimitiveConcept",
    "PrimitiveRole",
    "RoleEqConcept",
    "StateIndex",
    "TopConcept",
    "conj",
    "denotation_signature",
    "dump_features",
    "enumerate_features",
    "eval_concept",
    "eval_distance",
    "eval_role",
    "feature_value",
    "inverse",
    "load_features",
    "object_membership",
    "parse_concept",
    "parse_node",
    "parse_role",
    "role_eq",
]
