"""Causal embedding toolkit: joint factorization of biased and uniform
exposure feedback, split protocols, counterfactual policy tools."""

from causerec._core import (
    CauseError,
    Dataset,
    EmbeddingModel,
    HyperParams,
    Interaction,
    MetricReport,
    Policy,
    PropensityTable,
    SplitBundle,
    TrainResult,
    TrainSpec,
    World,
    argmax_rand_equivalence,
    auc,
    best_policy,
    binarize,
    build_dataset,
    evaluate,
    ips_estimate,
    ite,
    load_dataset,
    load_model,
    lr_at,
    make_split,
    policy_reward,
    predict_for,
    sample_logged,
    sigmoid,
    train,
    write_synth_ratings,
    xent,
)

__all__ = [
    "CauseError",
    "Dataset",
    "EmbeddingModel",
    "HyperParams",
    "Interaction",
    "MetricReport",
    "Policy",
    "PropensityTable",
    "SplitBundle",
    "TrainResult",
    "TrainSpec",
    "World",
    "argmax_rand_equivalence",
    "auc",
    "best_policy",
    "binarize",
    "build_dataset",
    "evaluate",
    "ips_estimate",
    "ite",
    "load_dataset",
    "load_model",
    "lr_at",
    "make_split",
    "policy_reward",
    "predict_for",
    "sample_logged",
    "sigmoid",
    "train",
    "write_synth_ratings",
    "xent",
]

__version__ = "0.1.0"
