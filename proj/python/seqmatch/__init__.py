"""Sequence-matching rewards for imitation from a single demonstration."""

try:
    from ._seqmatch import *  # noqa: F401,F403
    from ._seqmatch import InvalidInput
except ImportError:  # in-tree build: the extension sits on sys.path directly
    from _seqmatch import *  # noqa: F401,F403
    from _seqmatch import InvalidInput

__all__ = [
    "InvalidInput",
    "build_mask",
    "cost_matrix",
    "coverage_matrix",
    "coverage_oracle",
    "dtw_align",
    "evaluate_expert",
    "evaluate_scenario",
    "perturbation_batch",
    "rewards",
    "scenario_names",
    "sinkhorn",
    "subsample_tail",
    "task_names",
    "threshold_trace",
    "train",
]
