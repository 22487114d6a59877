"""Interpretable feature-graph networks for mixed-type tabular data."""

from ._core import (
    EncodedMatrix,
    EncoderState,
    FeatureGraph,
    Model,
    ModelConfig,
    RawTable,
    Schema,
    TrainConfig,
    auc_binary,
    auc_weighted_ovr,
    build_graph,
    cat_num_association,
    cosine_similarity,
    encode,
    exact_shapley,
    fisher_average,
    fit_encoders,
    kendall_tau,
    kernel_shap,
    kernel_shap_complete,
    load_csv,
    load_graph,
    oversample_minority,
    parse_csv,
    pearson,
    point_biserial,
    set_self_loops,
    spearman,
    split,
    t_test_p_value,
    train,
)

__all__ = [
    "EncodedMatrix",
    "EncoderState",
    "FeatureGraph",
    "Model",
    "ModelConfig",
    "RawTable",
    "Schema",
    "TrainConfig",
    "auc_binary",
    "auc_weighted_ovr",
    "build_graph",
    "cat_num_association",
    "cosine_similarity",
    "encode",
    "exact_shapley",
    "fisher_average",
    "fit_encoders",
    "kendall_tau",
    "kernel_shap",
    "kernel_shap_complete",
    "load_csv",
    "load_graph",
    "oversample_minority",
    "parse_csv",
    "pearson",
    "point_biserial",
    "set_self_loops",
    "spearman",
    "split",
    "t_test_p_value",
    "train",
]
