"""Estimate how much past information a policy uses per action."""

from ._core import (
    BudgetError,
    Estimator,
    InputError,
    JointPolicyModel,
    NoSamplesError,
    TrajectoryDataset,
    analyze,
    capacity,
    count_samples,
    digamma,
    discretize_rewards,
    entropy_of_counts,
    exact_cmi,
    generate,
    grassberger_G,
    joint_model,
    load_dataset,
    load_joint_model,
    memory_profile,
    parse_dataset,
    parse_joint_model,
    run_cli,
    verify_lower_bound,
)

__all__ = [
    "BudgetError",
    "Estimator",
    "InputError",
    "JointPolicyModel",
    "NoSamplesError",
    "TrajectoryDataset",
    "analyze",
    "capacity",
    "count_samples",
    "digamma",
    "discretize_rewards",
    "entropy_of_counts",
    "exact_cmi",
    "generate",
    "grassberger_G",
    "joint_model",
    "load_dataset",
    "load_joint_model",
    "memory_profile",
    "parse_dataset",
    "parse_joint_model",
    "run_cli",
    "verify_lower_bound",
]
