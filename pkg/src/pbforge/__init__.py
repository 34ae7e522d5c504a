"""pbforge: verify, search for, and catalog (q,k,t) product blocks over GF(q)."""

from .blocks import BlockSystem, ConflictReport, SystemStats, check_pair, stats, verify
from .bounds import BoundResult, bound_from_system, pa_lower_bound
from .codec import (
    ALPHABET_T5X,
    ALPHABET_T6C,
    ALPHABETS,
    LetterAlphabet,
    bounds_csv,
    emit_letters,
    extras_used,
    parse_int_blocks,
    parse_letters,
    read_json,
    write_json,
)
from .gf import Field, build_field, is_prime
from .search import (
    DEFAULT_NODE_CAP,
    Counters,
    KappaResult,
    SearchConfig,
    SearchResult,
    SearchSpaceError,
    canonical_universes,
    conflict_objective,
    derive_seed,
    estimate_nodes,
    exhaustive_search,
    kappa_lower_bound,
    local_search,
    run_search,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABETS",
    "ALPHABET_T5X",
    "ALPHABET_T6C",
    "BlockSystem",
    "BoundResult",
    "ConflictReport",
    "Counters",
    "DEFAULT_NODE_CAP",
    "Field",
    "KappaResult",
    "LetterAlphabet",
    "SearchConfig",
    "SearchResult",
    "SearchSpaceError",
    "SystemStats",
    "bound_from_system",
    "bounds_csv",
    "build_field",
    "canonical_universes",
    "check_pair",
    "conflict_objective",
    "derive_seed",
    "emit_letters",
    "estimate_nodes",
    "exhaustive_search",
    "extras_used",
    "is_prime",
    "kappa_lower_bound",
    "local_search",
    "pa_lower_bound",
    "parse_int_blocks",
    "parse_letters",
    "read_json",
    "run_search",
    "stats",
    "verify",
    "write_json",
]
