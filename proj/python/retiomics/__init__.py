"""First-order retinal radiomics and cardiovascular-risk experiment engine.

Thin Python facade over the C++ core (`retiomics._core`). The main
operations — PGM decoding, first-order feature extraction, AUC/ROC/DeLong
metrics, model training and scoring, Shapley attribution, and the pipeline
commands (extract / synth / run / compare / report) — are re-exported here.
"""

from retiomics._core import (
    DataError,
    UsageError,
    __version__,
    auc,
    compare,
    delong_test,
    extract,
    extract_image_features,
    feature_names,
    first_order_features,
    grouped_folds,
    load_pgm,
    percentile,
    report,
    roc_curve,
    run,
    score_model,
    shap_values,
    synth,
    train_model,
)

__all__ = [
    "DataError",
    "UsageError",
    "__version__",
    "auc",
    "compare",
    "delong_test",
    "extract",
    "extract_image_features",
    "feature_names",
    "first_order_features",
    "grouped_folds",
    "load_pgm",
    "percentile",
    "report",
    "roc_curve",
    "run",
    "score_model",
    "shap_values",
    "synth",
    "train_model",
]
