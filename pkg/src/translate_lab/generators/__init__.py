"""Generator constructions: the tent-based single generator and the interval pair."""

from .induction import (
    Bump,
    CompletenessReport,
    DenseFamily,
    FamilyMember,
    GeneratorRecipe,
    PolynomialFit,
    StageRecord,
    build_dense_family,
    completeness_experiment,
    construct_generator,
    fit_polynomial,
    offered_frequencies,
)
from .pair import PairChecks, PairRecipe, PairResult, pair_generators, pair_recipe
from .tent import (
    TENT_W_NORM,
    TentCoefficients,
    TentProperties,
    epsilon_schedule,
    initial_coefficients,
    partial_sum_F,
    tent_phi,
    tent_properties,
)

__all__ = [
    "Bump", "CompletenessReport", "DenseFamily", "FamilyMember", "GeneratorRecipe",
    "PolynomialFit", "StageRecord", "build_dense_family", "completeness_experiment",
    "construct_generator", "fit_polynomial", "offered_frequencies", "PairChecks", "PairRecipe",
    "PairResult", "pair_generators", "pair_recipe", "TENT_W_NORM", "TentCoefficients",
    "TentProperties", "epsilon_schedule", "initial_coefficients", "partial_sum_F", "tent_phi",
    "tent_properties",
]
