"""
Labeled plane trees, the parking process, exhaustive enumeration and
Monte Carlo on geometric Galton-Watson trees.
"""

from .enumeration import (
    OracleTable,
    catalan,
    count_fully_packed,
    dyck_words,
    enumerate_Fnp,
    enumeration_cost,
    forest_convolution_table,
    plane_trees,
)
from .simulation import MCResult, compare_with_oracle, gw_parking_mc
from .trees import (
    LabeledTree,
    ParkingOutcome,
    chi_values,
    is_fully_packed,
    preorder_parents,
    run_parking,
    sequential_parking,
    subtree_surpluses,
    surplus,
)

__all__ = [
    "LabeledTree",
    "ParkingOutcome",
    "run_parking",
    "chi_values",
    "surplus",
    "subtree_surpluses",
    "is_fully_packed",
    "sequential_parking",
    "preorder_parents",
    "catalan",
    "dyck_words",
    "plane_trees",
    "OracleTable",
    "enumerate_Fnp",
    "enumeration_cost",
    "forest_convolution_table",
    "count_fully_packed",
    "MCResult",
    "gw_parking_mc",
    "compare_with_oracle",
]
