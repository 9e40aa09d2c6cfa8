"""EMOC: embedding algorithm implementations by evaluation, memory,
operations, and complexity features.

The pipeline: parse a MiniAlg program, normalize it, lower it to a fixed
29-opcode instruction stream, run it over a probe suite under an
instrumented VM, and fold the measurements into a numeric vector usable
for distance queries, clustering, and clone detection.
"""

from .analyze import (ClusterResult, DiversityReport, diversity_report,
                      kmeans_cluster, match_accuracy, nearest_neighbors)
from .corpus import (BUNDLED_GROUPS, CorpusManifest, Program,
                     bundled_manifest_path, load_manifest)
from .embedding import (DEFAULT_O_ALPHABET, DistanceWeights, EmocConfig,
                        EmocVector, distance, embed, embed_corpus,
                        scaling_exponents, vectors_from_csv,
                        vectors_from_json, vectors_to_csv, vectors_to_json)
from .equiv import (EquivVerdict, ast_equivalent, encoding_equivalent,
                    functional_equivalent, instruction_equivalent)
from .errors import (ConfigMismatchError, EmocError, EvaluationError,
                     MiniAlgNameError, MiniAlgSyntaxError,
                     NonTerminationError)
from .lang import SourceUnit, lower, parse, render
from .normalize import (PassConfig, alpha_canonicalize,
                        canonicalize_commutative, eliminate_dead_code,
                        inline_intermediates, normalize)
from .probes import (PROBLEMS, ProbeSuite, SizeSchedule, build_probe_suite,
                     oracle_output)
from .vm import BACKEND, Budgets, BudgetExhausted, EvalReport, Trap, evaluate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SourceUnit", "parse", "render", "lower",
    "PassConfig", "normalize", "alpha_canonicalize", "eliminate_dead_code",
    "inline_intermediates", "canonicalize_commutative",
    "EquivVerdict", "encoding_equivalent", "ast_equivalent",
    "instruction_equivalent", "functional_equivalent",
    "BACKEND", "Budgets", "BudgetExhausted", "EvalReport", "Trap", "evaluate",
    "PROBLEMS", "ProbeSuite", "SizeSchedule", "build_probe_suite",
    "oracle_output",
    "DEFAULT_O_ALPHABET", "EmocConfig", "EmocVector", "DistanceWeights",
    "scaling_exponents", "embed", "embed_corpus", "distance",
    "vectors_to_csv", "vectors_to_json", "vectors_from_csv",
    "vectors_from_json",
    "ClusterResult", "DiversityReport", "kmeans_cluster", "match_accuracy",
    "nearest_neighbors", "diversity_report",
    "Program", "CorpusManifest", "load_manifest", "bundled_manifest_path",
    "BUNDLED_GROUPS",
    "EmocError", "MiniAlgSyntaxError", "MiniAlgNameError", "EvaluationError",
    "NonTerminationError", "ConfigMismatchError",
]
