from .adam import Adam
from .batching import GraphBatch, PreparedGraph, make_batch, prepare_graph
from .classifier import MessagePassingGraphClassifier
from .network import (BN_EPS, LayerParams, ModelParams, commit_running_stats,
                      init_model, layer_forward, loss_and_gradients,
                      model_forward, predict_proba_batch, softmax)
from .serialize import load_model, save_model
from .train import TrainConfig, evaluate_model, train_model

__all__ = [
    "Adam", "GraphBatch", "PreparedGraph", "make_batch", "prepare_graph",
    "MessagePassingGraphClassifier",
    "BN_EPS", "LayerParams", "ModelParams", "commit_running_stats",
    "init_model", "layer_forward", "loss_and_gradients", "model_forward",
    "predict_proba_batch", "softmax",
    "load_model", "save_model",
    "TrainConfig", "evaluate_model", "train_model",
]
