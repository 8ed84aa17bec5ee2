"""SVM training, evaluation metrics and the cross-validation harness."""
from .harness import EvalReport, FoldPlan, LabeledDataset, cross_validate, downsample, make_folds, zero_r
from .metrics import ClassScores, ConfusionMatrix, Evaluation, evaluate, mcc_multiclass
from .svm import (
    SvmModel,
    decision_values,
    kkt_violation,
    load_model,
    predict,
    predict_many,
    save_model,
    smo,
    train_svm,
)

__all__ = [
    "ClassScores",
    "ConfusionMatrix",
    "EvalReport",
    "Evaluation",
    "FoldPlan",
    "LabeledDataset",
    "SvmModel",
    "cross_validate",
    "decision_values",
    "downsample",
    "evaluate",
    "kkt_violation",
    "load_model",
    "make_folds",
    "mcc_multiclass",
    "predict",
    "predict_many",
    "save_model",
    "smo",
    "train_svm",
    "zero_r",
]
