"""cylwalk: random walks on a discrete cylinder.

Simulation and numerical analysis of simple random walk on the product of a
d-dimensional torus of side N with the integers: disconnection times of the
cylinder, excursion counts between nested height blocks, vacant-set events,
level local times, and the return-probability thresholds that govern the
high-dimensional regime.
"""

from .backend import BACKEND

__version__ = "0.1.0"

from .geometry import (BlockSpec, CylinderPoint, LatticePlane, SegmentSpec,
                       boundary, core_range, enumerate_planes, inner_range,
                       neighbors, outer_range, project, star_neighbors)
from .walk import (ExcursionLedger, TrajectoryStore, WalkConfig, advance,
                   entrance_exit_times, excursions, exit_tail_stats,
                   level_local_time, tau_times, walk_z_nu)
from .vacant import (ComponentLabeling, SegmentCensus, SlabSnapshot, check_G,
                     check_U, check_V, disconnection_time, is_disconnecting,
                     segment_census, segment_linkage)
from .returnprob import QEstimate, q_monte_carlo, q_N_estimate, q_quadrature
from .crit import (ThresholdReport, chi, count_star_saws, rho, star_saw_bound,
                   threshold_scan, u0_placeholder)
from .harness import ExperimentConfig, ResultRecord, run_experiment

__all__ = [
    "BACKEND", "__version__",
    "BlockSpec", "CylinderPoint", "LatticePlane", "SegmentSpec",
    "boundary", "core_range", "enumerate_planes", "inner_range", "neighbors",
    "outer_range", "project", "star_neighbors",
    "ExcursionLedger", "TrajectoryStore", "WalkConfig", "advance",
    "entrance_exit_times", "excursions", "exit_tail_stats",
    "level_local_time", "tau_times", "walk_z_nu",
    "ComponentLabeling", "SegmentCensus", "SlabSnapshot", "check_G",
    "check_U", "check_V", "disconnection_time", "is_disconnecting",
    "segment_census", "segment_linkage",
    "QEstimate", "q_monte_carlo", "q_N_estimate", "q_quadrature",
    "ThresholdReport", "chi", "count_star_saws", "rho", "star_saw_bound",
    "threshold_scan", "u0_placeholder",
    "ExperimentConfig", "ResultRecord", "run_experiment",
]
