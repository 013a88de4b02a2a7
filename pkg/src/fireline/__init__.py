"""Stochastic simulation of one-dimensional forest-fire processes.

Sites of the integer line carry seed clocks (vacant -> occupied, rate 1),
match clocks (occupied -> burning, rate lam), and propagation clocks
(burning -> vacant while igniting occupied neighbors, rate pi).  The
package simulates this chain exactly on finite boxes, simulates the three
macroscopic limit processes it converges to (fast, intermediate with
finite front slope p, and slow regimes), and couples the two through a
shared ignition mark measure for convergence experiments.
"""

__version__ = "0.1.0"

from .discrete import (
    ClusterObservables,
    DiscreteFFP,
    PropagationRun,
    match_schedule_from_marks,
    run_propagation,
    suggested_radius,
)
from .engine import COMPILED, make_engine
from .harness import (
    BarrierResult,
    ClusterDistResult,
    CoupledRun,
    FrontGofResult,
    FrontSpeedResult,
    GammaTestResult,
    SparkFractionResult,
    TailResult,
    barrier_height_experiment,
    cluster_dist_experiment,
    coupled_distances,
    coupled_run,
    front_speed_experiment,
    front_statistics,
    gamma_test,
    ks_statistic,
    limit_tail_experiment,
    limit_trajectory,
    spark_fraction_experiment,
    wilson_interval,
)
from .limits import (
    LimitEvent,
    LimitObservables,
    LimitStateInf,
    LimitStateP,
    query_limit,
    sample_cluster_length_inf,
    simulate_alffp_p,
    simulate_lffp_0,
    simulate_lffp_inf,
)
from .rng import Mark, MarkSet, RngStream, exp_sample, poisson_rectangle
from .scales import (
    Regime,
    Scales,
    Trajectory,
    classify_regime,
    compute_scales,
    cone_contains,
    d_T,
    delta_interval,
    delta_T,
    kappa0,
    kappa_z,
    m_gamma,
    pi_for_regime,
    uniform_grid,
    varkappa_A,
)

__all__ = [
    "BarrierResult",
    "COMPILED",
    "ClusterDistResult",
    "ClusterObservables",
    "CoupledRun",
    "DiscreteFFP",
    "FrontGofResult",
    "FrontSpeedResult",
    "GammaTestResult",
    "LimitEvent",
    "LimitObservables",
    "LimitStateInf",
    "LimitStateP",
    "Mark",
    "MarkSet",
    "PropagationRun",
    "Regime",
    "RngStream",
    "Scales",
    "SparkFractionResult",
    "TailResult",
    "Trajectory",
    "barrier_height_experiment",
    "classify_regime",
    "cluster_dist_experiment",
    "compute_scales",
    "cone_contains",
    "coupled_distances",
    "coupled_run",
    "d_T",
    "delta_interval",
    "delta_T",
    "exp_sample",
    "front_speed_experiment",
    "front_statistics",
    "gamma_test",
    "kappa0",
    "kappa_z",
    "ks_statistic",
    "limit_tail_experiment",
    "limit_trajectory",
    "m_gamma",
    "make_engine",
    "match_schedule_from_marks",
    "pi_for_regime",
    "poisson_rectangle",
    "query_limit",
    "run_propagation",
    "sample_cluster_length_inf",
    "simulate_alffp_p",
    "simulate_lffp_0",
    "simulate_lffp_inf",
    "spark_fraction_experiment",
    "suggested_radius",
    "uniform_grid",
    "varkappa_A",
    "wilson_interval",
    "__version__",
]
