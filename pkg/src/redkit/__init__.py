"""redkit: redundancy-matrix toolkit for truss structures.

Computes the redundancy matrix R = I - A K^-1 A^T C of a truss, the
distribution of static indeterminacy on its diagonal, and derives
robustness indicators (element-removal what-ifs, determinant ratios,
redundancy homogenization) and assemblability indicators (imperfection
strain fields, assembly-sequence strain profiles) from it.
"""

from .analysis import (
    AnalysisError,
    AnalysisState,
    KinematicError,
    StaticSolution,
    build_matrices,
    degree_of_static_indeterminacy,
    solve_static,
)
from .model import (
    DesignSpec,
    DesignVariable,
    MapEntry,
    ModelError,
    Node,
    StructuralModel,
    TrussElement,
    ValidationReport,
    apply_design_vector,
    load_model,
    model_to_dict,
    parse_model,
    save_model,
    serialize_model,
    validate_model,
)
from .redundancy import (
    REMOVAL_THRESHOLD,
    MechanismError,
    RedundancyMatrix,
    apply_redundancy,
    compute_redundancy_matrix,
    redundancy_diagonal,
    redundancy_diagonal_entry,
    remove_element_update,
    stress_influence,
)

__version__ = "0.1.0"
