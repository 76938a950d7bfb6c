"""Numerical toolkit for composition operators on Hardy spaces H^p."""
from .classifier import COMPACT, FIXES_L2, FIXES_LP_ONLY, INCONCLUSIVE, TrichotomyReport, classify
from .config import RunConfig
from .contact import contact_measure, mass_split, pullback_density, pullback_lower_bound_check
from .glidinghump import (frame_bounds_verify, gliding_hump_select, replay,
                          select_test_points)
from .hardy import QuadratureGrid, TestFunction, compactness_score, composed_test_norm, hp_norm
from .lacunary import (gram_matrix, l2_lower_bound_verify, paley_equivalence_check,
                       select_lacunary_powers)
from .nevanlinna import counting, preimages, shapiro_trend
from .symbol import Symbol, boundary_trace, parse_symbol

__version__ = "0.1.0"
