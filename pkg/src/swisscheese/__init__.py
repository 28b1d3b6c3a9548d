"""Swiss-cheese plane sets: McKissick disc deletion, the level functions g_n and their
products, the regular cheese X1, the assembled set X = X1 n X2, and numerical
certification of the bounds behind them."""

from .construction import (
    CheeseConfig,
    LevelFamily,
    UnitCheese,
    assemble_theorem_one,
    build_level_family,
    build_regular_cheese,
    build_unit_cheese,
    epsilon_for_index,
    length_budget,
    level_scale,
    select_start_index,
    transplant,
)
from .errors import (
    BudgetError,
    DegenerateError,
    DomainError,
    PoleError,
    PoleInXError,
    PoleOnContourError,
    ResourceError,
    SearchExhausted,
    SwissCheeseError,
    ToleranceNotMet,
)
from .geometry import Disc, DiscClass, Q, Square, budget_sum, classify_disc, enumerate_admissible_discs
from .quadrature import QuadratureResult, contour_integral_boundary
from .ratfunc import LevelParams, LogComplex, ProductFunction, RationalExpr, eval_f_limit, eval_gn, eval_hN, eval_product
from .verify import CertReport, SamplePlan

__all__ = [
    "BudgetError", "CertReport", "CheeseConfig", "DegenerateError", "Disc", "DiscClass", "DomainError",
    "LevelFamily", "LevelParams", "LogComplex", "PoleError", "PoleInXError", "PoleOnContourError",
    "ProductFunction", "Q", "QuadratureResult", "RationalExpr", "ResourceError", "SamplePlan",
    "SearchExhausted", "Square", "SwissCheeseError", "ToleranceNotMet", "UnitCheese",
    "assemble_theorem_one", "budget_sum", "build_level_family", "build_regular_cheese", "build_unit_cheese",
    "classify_disc", "contour_integral_boundary", "enumerate_admissible_discs", "epsilon_for_index",
    "eval_f_limit", "eval_gn", "eval_hN", "eval_product", "length_budget", "level_scale",
    "select_start_index", "transplant",
]
