"""Piecewise-linear fuzzy numbers from 1-D data with card-based expert refinement."""

from .cards import (
    CardChain,
    CardEdit,
    apply_edit,
    cards_to_values,
    choose_precision,
    values_to_cards,
)
from .cfkm import (
    CentroidVector,
    FitReport,
    MembershipMatrix,
    bracketing_index,
    init_centroids,
    objective,
    partition_from_memberships,
    run_cfkm,
    update_centers,
    update_memberships,
)
from .fuzzy import FuzzyNumberPL, FuzzyPartition
from .samples import SampleSet

__version__ = "0.1.0"

__all__ = [
    "CardChain",
    "CardEdit",
    "CentroidVector",
    "FitReport",
    "FuzzyNumberPL",
    "FuzzyPartition",
    "MembershipMatrix",
    "SampleSet",
    "apply_edit",
    "bracketing_index",
    "cards_to_values",
    "choose_precision",
    "init_centroids",
    "objective",
    "partition_from_memberships",
    "run_cfkm",
    "update_centers",
    "update_memberships",
    "values_to_cards",
]
