"""Cause span extraction and causal emotion entailment in conversations.

Thin wrapper over the compiled core: dataset fold construction, the three
models' train/eval/predict pipeline, span and entailment metrics, and beam
decoding utilities.
"""

from mutec._core import (
    ConfigError,
    InputError,
    accuracy,
    beam_decode,
    default_config,
    emotion_names,
    entail_metrics,
    evaluate,
    fold_file_name,
    inverse_count_weights,
    normalize_answer,
    predict,
    prepare,
    span_metrics,
    sweep_beam,
    synth,
    token_f1,
    train,
)

__all__ = [
    "ConfigError",
    "InputError",
    "accuracy",
    "beam_decode",
    "default_config",
    "emotion_names",
    "entail_metrics",
    "evaluate",
    "fold_file_name",
    "inverse_count_weights",
    "normalize_answer",
    "predict",
    "prepare",
    "span_metrics",
    "sweep_beam",
    "synth",
    "token_f1",
    "train",
]

__version__ = "0.1.0"
