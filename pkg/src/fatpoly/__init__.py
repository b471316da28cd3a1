"""Learning margin-separated convex polytopes, with the supporting geometry."""
from .bounds import (generalization_error, pac_sample_size, vc_envelope_polytope,
                     vc_fat_hyperplane, vc_fat_polytope)
from .envelope import (ExpandingPolytope, ProjectionResult, envelope_region, hausdorff_distance,
                       hausdorff_speed_profile, no_reenter_check, project_onto_polytope,
                       verify_inner_identity, verify_margin_in_envelope)
from .estimators import HeuristicPolytopeClassifier, PolytopeClassifier
from .exceptions import (CombinatorialBlowup, DegenerateSystem, DimensionMismatch, InfeasibleOrTimeout,
                         LearningFailure, NetOverflowError, PerceptronFailure, ProjectionError)
from .geometry import (Hyperplane, LabeledPoint, Polytope, RegionTag, fat_classify, is_consistent,
                       margin_region, polytope_min_value, shift)
from .jl import JLProjection, JlMap, make_jl, required_dim
from .learner import (CandidateSet, LearnerConfig, build_candidates, enumerate_t_polytope,
                      greedy_polytope, learn_pac)
from .net import DirectionNet, build_net
from .perceptron import PerceptronConfig, margin_perceptron
from .sampling import RngSeed, make_rng

__version__ = "0.1.0"
