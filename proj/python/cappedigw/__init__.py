"""Capped inverse-gap-weighted exploration for continuous-action bandits."""

from ._cappedigw import (
    InvalidConfig,
    NormCsResult,
    SamplerBreaker,
    backstop_sample_count,
    bootstrap_ci,
    exploration_gamma,
    needle_loss,
    normalization_cs,
    rejection_sample,
    run_online,
    smooth_benchmark,
    smooth_sample,
    z_oracle,
)

__all__ = [
    "InvalidConfig",
    "NormCsResult",
    "SamplerBreaker",
    "backstop_sample_count",
    "bootstrap_ci",
    "exploration_gamma",
    "needle_loss",
    "normalization_cs",
    "rejection_sample",
    "run_online",
    "smooth_benchmark",
    "smooth_sample",
    "z_oracle",
]
