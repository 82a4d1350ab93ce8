"""Multivariate one-sample location tests from center-outward ranks and signs."""
from .assignment import Assignment, brute_force_assignment, build_cost, solve_assignment
from .baselines import HotellingResult, hotelling_t2, hotelling_test
from .codf import CoDistribution, SymmetrizedCoDistribution, co_median, fit_codf, fit_symmetrized
from .efficiency import AreResult, are_vs_hotelling, gaussian_are, noncentrality
from .estimators import (
    CenterOutwardRanks,
    HotellingTest,
    MarginalWilcoxonTest,
    RandomSignsTest,
    SymmetrizedTest,
)
from .exceptions import (
    ConfigurationError,
    CorankError,
    DegenerateSplitError,
    InvalidInputError,
    NumericalError,
    ScenarioError,
)
from .grids import Grid, grid_for_size, halton, make_grid, make_symmetric_grid, score_sum
from .harness import PowerTable, Scenario, power_curves, run_scenario, table1_suite
from .location_tests import (
    TestOutcome,
    marginal_bonferroni,
    random_signs_test,
    symmetrized_general_score,
    symmetrized_test,
    univariate_sign_test,
    univariate_wilcoxon_test,
)
from .scores import SIGN, WILCOXON, ScoreFunction, custom_score, vdw_score
from .statdist import RngState

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
