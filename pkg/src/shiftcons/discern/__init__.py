"""Discernibility of shift registers: executions, view sets, exhaustive search, refuters."""

from .config import ConfigError, DiscernConfig, load_config, parse_config
from .lemmas import (
    LEMMAS,
    Counterexample,
    NotApplicable,
    Overlap,
    partial_sum_overlap,
    refute,
    refute_by,
    refute_rllr,
    refute_same_direction,
    refute_shift_sizes,
    refute_writes,
    rllr_sets,
)
from .search import (
    ConsensusProbe,
    OutOfRange,
    SearchBudgetExceeded,
    SearchResult,
    canonical_witness,
    decide_discerning,
    op_universe,
    probe_consensus_number,
)
from .views import Execution, ViewSets, enumerate_executions, is_discerning_witness, replay, view_sets

__all__ = [
    "LEMMAS",
    "ConfigError",
    "ConsensusProbe",
    "Counterexample",
    "DiscernConfig",
    "Execution",
    "NotApplicable",
    "OutOfRange",
    "Overlap",
    "SearchBudgetExceeded",
    "SearchResult",
    "ViewSets",
    "canonical_witness",
    "decide_discerning",
    "enumerate_executions",
    "is_discerning_witness",
    "load_config",
    "op_universe",
    "parse_config",
    "partial_sum_overlap",
    "probe_consensus_number",
    "refute",
    "refute_by",
    "refute_rllr",
    "refute_same_direction",
    "refute_shift_sizes",
    "refute_writes",
    "replay",
    "rllr_sets",
    "view_sets",
]
