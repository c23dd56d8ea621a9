"""Exact computation of the loop homology spectral sequence."""

from .groups import FGAbelianGroup
from .linalg import IntMatrix, smith_normal_form, kernel_basis, homology_of_pair
from .algebra import AlgebraPresentation, GeneratorDecl, Relation
from .engine import (
    DifferentialSpec,
    Page,
    build_initial_page,
    extension_report,
    leibniz_extend,
    product_table,
    run_to_infinity,
    turn_page,
)
from .models import (
    ManifoldModel,
    PresentationCandidate,
    assemble_total_degree,
    circle_loop_homology,
    cpn_model,
    custom_model_parse,
    match_presentation,
    sphere_model,
    ziller_reference,
)

__version__ = "0.1.0"
