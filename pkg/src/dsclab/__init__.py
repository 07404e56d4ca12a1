"""Layered sparse coding laboratory.

Certified coherence programs, classic and unrolled pursuit solvers, an
exact compiler from threshold schedules to affine+activation networks,
uniqueness/stability guarantee calculators, and a reproducible
benchmark harness.
"""

__version__ = "0.1.0"

from .activations import Activation, bounded_negative, parse_activation, relu
from .coherence import (CoherenceCertificate, CoherenceProfile,
                        coherence_profile, generalized_mutual_coherence,
                        mutual_coherence)
from .conv import ConvSpec, conv1d, conv2d, dcnn_forward, dcnn_forward_2d
from .errors import (BudgetExceeded, CarryClipped, ConfigError,
                     DivergingStep, DscError, InconsistentSupports,
                     IndexOutOfRange, Infeasible, InfeasibleBudget,
                     LpInfeasible, LpNumericalFailure, LpUnbounded,
                     MissingArtifact, MissingCodes, MissingTruth,
                     NoSolution, NotContractiveWarning, RateNotContractive,
                     ShapeMismatch, SparsityTooHigh, TooFewColumns,
                     TooFewPoints, UndefinedForL, ZeroColumn)
from .estimators import (BasisPursuitEncoder, IstaEncoder, LayeredEncoder,
                         ListaEncoder)
from .generate import (disjoint_support_dictionary, generate_instance,
                       low_coherence_dictionary, orthonormal_dictionary,
                       random_dictionary, simplex_frame, welch_bound)
from .guarantees import (CoincidenceCertificate, StabilityLedger,
                         UniquenessReport, check_uniqueness,
                         coincidence_certificate, corollary_bounds,
                         known_support_bound, noncumulative_bound,
                         relaxed_bound, relutype_sparsity_bound,
                         stability_ledger, uniqueness_bound)
from .io import (read_csv, read_instance, read_matrix, read_network,
                 read_schedule, write_csv, write_instance, write_matrix,
                 write_network, write_schedule)
from .lista import (ListaSchedule, compute_schedule, lista_cp_run,
                    lista_general_run, predicted_error)
from .model import (Dictionary, DscInstance, LayeredDictionary, SignalClass,
                    SparseCode, layer_product, normalize_columns)
from .network import AffineNetwork, Stage, forward, size_report
from .network import compile as compile_network
from .pipeline import LayeredRun, fit_rate, l2l1_gap, solve_layered
from .pursuit import (CosparsityResult, PursuitResult, basis_pursuit,
                      brute_force_l0, cosparsity_solve, cosparsity_stack,
                      ista, soft_threshold)
from .rng import make_generator
from .simplex import solve_lp
from .suite import SuiteConfig, run_suite, verify

__all__ = [
    "Activation", "AffineNetwork", "BasisPursuitEncoder", "BudgetExceeded",
    "CarryClipped", "CoherenceCertificate", "CoherenceProfile",
    "CoincidenceCertificate", "ConfigError", "ConvSpec", "CosparsityResult",
    "Dictionary", "DivergingStep", "DscError", "DscInstance",
    "InconsistentSupports", "IndexOutOfRange", "Infeasible",
    "InfeasibleBudget", "IstaEncoder", "LayeredDictionary",
    "LayeredEncoder", "LayeredRun", "ListaEncoder", "ListaSchedule",
    "LpInfeasible", "LpNumericalFailure", "LpUnbounded", "MissingArtifact",
    "MissingCodes", "MissingTruth", "NoSolution", "NotContractiveWarning",
    "PursuitResult", "RateNotContractive", "ShapeMismatch", "SignalClass",
    "SparseCode", "SparsityTooHigh", "Stage", "StabilityLedger",
    "SuiteConfig", "TooFewColumns", "TooFewPoints", "UndefinedForL",
    "UniquenessReport", "ZeroColumn", "basis_pursuit", "bounded_negative",
    "brute_force_l0", "check_uniqueness", "coherence_profile",
    "coincidence_certificate", "compile_network", "compute_schedule",
    "conv1d", "conv2d", "corollary_bounds", "cosparsity_solve",
    "cosparsity_stack", "dcnn_forward", "dcnn_forward_2d",
    "disjoint_support_dictionary", "fit_rate", "forward",
    "generalized_mutual_coherence", "generate_instance", "ista",
    "known_support_bound", "l2l1_gap", "layer_product", "lista_cp_run",
    "lista_general_run", "low_coherence_dictionary", "make_generator",
    "mutual_coherence", "noncumulative_bound", "normalize_columns",
    "orthonormal_dictionary", "predicted_error", "random_dictionary",
    "read_csv", "read_instance", "read_matrix", "read_network",
    "read_schedule", "relaxed_bound", "relu", "relutype_sparsity_bound",
    "run_suite", "simplex_frame", "size_report", "soft_threshold",
    "solve_layered", "solve_lp", "stability_ledger", "uniqueness_bound",
    "verify", "welch_bound", "parse_activation", "write_csv",
    "write_instance", "write_matrix", "write_network", "write_schedule",
]
