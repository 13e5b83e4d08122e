"""Functional equivariance of B-series integrator maps and modified vector fields, in exact arithmetic."""
from .config import BudgetExceeded, Limits, get_limits, limits, set_limits
from .fields import (
    augment,
    directional,
    elementary_differential,
    elementary_differential_field,
    is_chi_related,
    lie_bracket,
    series_as_field,
    tangent_lift,
    witness_field,
    witness_pair,
)
from .hseries import HSeries
from .integrate import (
    ExactFlow,
    PartitionedMethod,
    SplittingScheme,
    check_closure_under_differentiation,
    check_exact_flow_rigidity,
    check_symplectic_modified,
    fe_diagram_residual,
    fe_diagram_residual_additive,
    flow_formal,
    modified_field_polynomials,
    splitting_modified_field,
    step_formal,
    step_numeric,
)
from .numbers import QuadraticSurd
from .poly import Poly, PolyMap, PolyVectorField, variables
from .series import (
    ButcherTableau,
    PartitionSpec,
    SeriesMap,
    check_affine_root_condition,
    check_partitioned_qfe,
    check_quadratic_fe,
    modified_field_series,
    tableau_series,
)
from .trees import Tree, butcher_product, enumerate_trees, parse_tree, symmetry, to_bracket

__version__ = "0.1.0"
