"""Level-set recovery of bi-isotonic matrices from noisy partial observations.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (  # noqa: F401
    BisoInstance,
    ClassificationMatrix,
    ObservationSet,
    Permutation,
    PipelineResult,
    RankEstimate,
    RankPairResult,
    RngStream,
    draw_observations,
    estimate_level_set,
    gen_multi_level,
    gen_noisy_sorting,
    gen_packing,
    gen_random_biso,
    gen_two_value,
    is_bi_isotonic,
    kendall_tau,
    level_confusions,
    loss_cph,
    loss_frobenius_perm,
    loss_l01na,
    loss_lph,
    loss_rph,
    oracle_level_set,
    pipeline_threshold_vector,
    rank_pair,
    split_half,
    staircase_diagonal,
    staircase_random,
)

__all__ = [name for name in dir() if not name.startswith("_")]
