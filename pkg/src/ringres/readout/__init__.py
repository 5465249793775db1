from ringres.readout.metrics import (
    PAM4_ALPHABET,
    MetricKind,
    accuracy,
    nmse,
    quantize_symbols,
    score,
    ser,
    waveform_accuracy,
)
from ringres.readout.ridge import (
    DEFAULT_FOLDS,
    DEFAULT_LAMBDA_GRID,
    ReadoutModel,
    cross_validate,
    fit_readout,
    predict,
    select_lambda,
    train_ridge,
)

__all__ = [
    "DEFAULT_FOLDS",
    "DEFAULT_LAMBDA_GRID",
    "MetricKind",
    "PAM4_ALPHABET",
    "ReadoutModel",
    "accuracy",
    "cross_validate",
    "fit_readout",
    "nmse",
    "predict",
    "quantize_symbols",
    "score",
    "select_lambda",
    "ser",
    "train_ridge",
    "waveform_accuracy",
]
