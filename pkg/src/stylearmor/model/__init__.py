"""Baseline authorship classifier."""

from stylearmor.model.features import FeatureSchema, FeatureVector, build_schema, vectorize, vectorize_many
from stylearmor.model.network import (
    Model,
    Params,
    forward,
    loss_and_grad,
    predict,
    predict_label,
    predict_labels,
    predict_vector,
)
from stylearmor.model.store import load_model, save_model
from stylearmor.model.train import Hyperparams, LabeledProgram, accuracy, train

__all__ = [
    "FeatureSchema",
    "FeatureVector",
    "Hyperparams",
    "LabeledProgram",
    "Model",
    "Params",
    "accuracy",
    "build_schema",
    "forward",
    "load_model",
    "loss_and_grad",
    "predict",
    "predict_label",
    "predict_labels",
    "predict_vector",
    "save_model",
    "train",
    "vectorize",
    "vectorize_many",
]
