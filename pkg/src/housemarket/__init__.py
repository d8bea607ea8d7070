"""Allocation procedures and verification tools for single-peaked house markets."""

from .central import crawler, ttc
from .dynamics import DynamicsConfig, Heuristic, reachable_outcomes, round_robin_pairs, run_dynamics
from .experiment import (ExperimentConfig, ResultRow, emit_csv, emit_plot, linreg, load_config, read_csv,
                         run_experiment, summarize)
from .market import (Deal, DealTrace, DomainError, Instance, apply_deal, ark, enumerate_improving,
                     is_individually_rational, is_pareto_optimal, is_stable, mrk, pareto_dominates, rank)
from .optimize import max_ark, max_mrk
from .oracles import (empirical_poa, maximality_instance, pareto_optimal_set, poa_ark_instance,
                      poa_mrk_instance, reachable_by_swaps, stable_set)
from .procedures import PROCEDURES, solve
from .single_peaked import (CULTURES, CultureSpec, generate_instance, is_single_peaked, is_worst_restricted,
                            restrict)
from .textformat import format_instance, parse_instance, read_instance, write_instance

__version__ = "0.1.0"
