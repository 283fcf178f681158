"""Discrete weak KAM theory and nonlinear vanishing-discount limits on finite
state spaces."""

from .classical import (BarrierTable, aubry_set, comparison_check, critical_constant,
                        is_subsolution, lax_oleinik, peierls_barrier, weak_kam_solution)
from .discounted import (DiscountedSolution, apply_T_lambda, backward_orbit,
                         solve_discounted)
from .experiments import SweepReport, UniquenessReport, uniqueness_probe, vanishing_discount_sweep
from .implicit import GeneralCost, apply_implicit
from .limit import (compute_u0_mather_formula, compute_u0_sup_formula, in_S0, u0,
                    vanishing_limit)
from .lp import solve_lp
from .mather import MatherPolytope, PairMeasure, integrate, mather_value_lp, mather_vertices
from .model import (AFFINE, SATURATING, AssumptionError, AssumptionReport, CostModel,
                    ModelError, check_assumptions, derivative_at_zero, eval_cost,
                    load_model, make_model, normalize_critical, save_model)

__version__ = "0.1.0"
