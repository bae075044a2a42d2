"""Generator and closed itemset mining with dominance programming.

The package is split into a dataset layer, a small model language for side
constraints and dominance relations, a depth-first search engine, the
dominance loops built on top of it, and a brute-force oracle for checking.
"""

from .dataset import MiningInstance, TransactionDb, load_transaction_db, make_instance, parse_transaction_db, support
from .dominance import MODES, RunResult, post_filter, run_cdp, run_cdpi, run_mode
from .engine import SearchConfig, Solution, enumerate_solutions
from .model_dsl import ModelSpec, builtin_model, parse_model

__all__ = [
    "MiningInstance",
    "TransactionDb",
    "load_transaction_db",
    "make_instance",
    "parse_transaction_db",
    "support",
    "MODES",
    "RunResult",
    "post_filter",
    "run_cdp",
    "run_cdpi",
    "run_mode",
    "SearchConfig",
    "Solution",
    "enumerate_solutions",
    "ModelSpec",
    "builtin_model",
    "parse_model",
]
