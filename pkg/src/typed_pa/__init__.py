"""Typed preferential-attachment graphs: simulation, exact step oracles,
drift-field analysis, and a reproducible experiment harness.

New vertices attach to m degree-weighted neighbors and take a type decided
by the sampled type counts; the package grows such graphs at scale, checks
the closed-form one-step identities by enumeration, and analyzes the
circling share dynamics of the three-type winner rule.
"""

__version__ = "0.1.0"

from .field import (LevelCurve, circuit_ratio, circuit_ratio_arclength_form,
                    field_eval, field_norm, from_chart, integrate,
                    jacobian_eigs_center, level_curve, linearized_period,
                    mean_angular_speed, to_chart)
from .graph import (GraphState, GrowthEngine, StartGraph, StepRecord,
                    add_vertex, complete_graph_start, init, load_start_graph,
                    named_start, resolve_start, sample_neighbor)
from .observables import (RunSummary, TrajectoryRecord, circuits,
                          convergence_report, max_wrapped_step, realized_noise,
                          record)
from .oracles import (OccupancyLaw, StepOutcome, UniformMaxReport, drift_f,
                      enumerate_step, expected_M_next, expected_M_next_affine,
                      expected_M_next_enumerated, occupancy, p_nmk,
                      verify_uniform_max)
from .rules import (TypeRule, all_count_vectors, linear_rule, load_table_rule,
                    make_rule, rps_rule, table_rule, uniform_visible_rule)
from .experiments import (CheckReport, ExperimentConfig, check_suite,
                          checkpoint_steps, config_hash, load_config,
                          make_config, run_experiment, run_one,
                          write_contours)

__all__ = [name for name in dir() if not name.startswith("_")]
