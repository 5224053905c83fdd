"""Lp relative surface areas, ball floating bodies and entropy for ball-convex bodies."""
from .bodies import (Arc, ArcBody2D, Ball, BoundarySample, ConvexBody, Ellipsoid, PNormBall2D, SupportCurve2D,
                     inverse_gauss, petty_constant_diagnostic, polar_volume, support, validate_ball_convex,
                     volume)
from .entropy import (entropy_integral, entropy_limit, info_sandwich, kl_divergence, kl_identity_rhs,
                      verify_monotonicity, verify_interpolation)
from .errors import (BallConvError, CornerError, DegenerateBodyError, EvaluationError, GeometryError,
                     NotBallConvexError, ParameterError, PreconditionError, StarvationError, WeightError)
from .floating import (CutBall, WeightFn, converge_dual, converge_primal, cut_measure, dual_floating_volume,
                       find_cut_depth, floating_body, floating_volume, fp_weight, fp_weight_fn)
from .measures import (OmegaParams, as_p, homogeneity_degree, omega_p_R, valuation_construction, verify_bounds,
                       verify_homogeneity, verify_valuation, weight_w)
from .quadrature import SphereRule, build_rule, integrate

__version__ = "0.1.0"
