"""Bounded color matching: exact LP vertex solutions, iterative rounding and audits."""

from .algorithms import (
    AlgoParams,
    AlgorithmRun,
    IterationRecord,
    greedy,
    half_no_violation,
    iterative_alpha,
    lambda_round,
    relax_and_decompose,
    run_algorithm,
)
from .generators import (
    GeneratorSpec,
    budget_path,
    gap_cycle,
    generate_instance,
    greedy_adversary,
    odd_cycle,
    single_edge,
)
from .instance import (
    ColoredGraph,
    FeasibilityReport,
    InstanceError,
    Matching,
    parse_instance,
    serialize_instance,
    verify_matching,
)
from .lp import Formulation, LpState, build_model, separate_blossoms, solve_vertex, solve_with_cuts
from .oracle import RunReport, check_extendibility, exact_opt, guarantee_audit
from .structure import (
    StructureWitness,
    TightDecomposition,
    charge_audit,
    check_bounds,
    decompose_tight,
    find_witness,
)

__all__ = [
    "AlgoParams", "AlgorithmRun", "ColoredGraph", "FeasibilityReport", "Formulation",
    "GeneratorSpec", "InstanceError", "IterationRecord", "LpState", "Matching", "RunReport",
    "StructureWitness", "TightDecomposition", "budget_path", "build_model", "charge_audit",
    "check_bounds", "check_extendibility", "decompose_tight", "exact_opt", "find_witness",
    "gap_cycle", "generate_instance", "greedy", "greedy_adversary", "guarantee_audit",
    "half_no_violation", "iterative_alpha", "lambda_round", "odd_cycle", "parse_instance",
    "relax_and_decompose", "run_algorithm", "separate_blossoms", "serialize_instance",
    "single_edge", "solve_vertex", "solve_with_cuts", "verify_matching",
]
