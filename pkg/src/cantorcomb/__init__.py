"""Cantor-comb domains: curve-condition integrals, two-sided points and dimension bounds."""
from .bounds import (BoundReport, SharpnessReport, c_threshold, f_p_eval, lambda_for_C,
                     lemma41_bound, m1_floor, main_bound, verify_sharpness)
from .cantor import CantorParams, LevelInterval, cantor_distance, gap_intervals, level_intervals
from .curves import CEstimate, Polyline, connect, estimate_C, polyline_integral
from .dimension import (DimensionEstimate, NetHierarchy, PointSet, box_count, build_hierarchy,
                        net_dimension, net_dimension_bound, separated_net)
from .domain import CombDomain, Point2, RasterBall, Region, boundary_distance, contains, raster
from .errors import (AdmissibilityError, ConvergenceError, DepthError, PreconditionError,
                     StageError)
from .experiment import ExperimentConfig, run_experiment
from .twosided import (ComponentLabeling, TwoSidedCertificate, components_in_ball,
                       count_meeting_half, detect)

__version__ = "0.1.0"
