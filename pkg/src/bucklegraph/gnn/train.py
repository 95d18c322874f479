"""Mini-batch training and evaluation on prepared graph datasets."""

from dataclasses import dataclass

import numpy as np

from ..rng import STREAM_SHUFFLE, substream
from .adam import Adam
from .batching import make_batch, prepare_graph
from .network import (ModelParams, commit_running_stats, init_model,
                      loss_and_gradients, predict_proba_batch)
from .workspace import Workspace


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 32
    seed: int = 0
    hidden_dim: int = 64
    embed_dim: int = 64
    num_layers: int = 4
    negative_slope: float = 0.01
    bn_momentum: float = 0.1

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


def train_model(train_graphs, cfg: TrainConfig, val_graphs=None, verbose=False):
    """Train one model; returns (params, history).

    History rows are {"epoch", "train_loss", "val_acc"} with val_acc None
    when no validation split is supplied.  Everything (init, shuffling,
    tie-breaking) is seeded, so identical inputs give identical parameters.
    """
    if not train_graphs:
        raise ValueError("training split is empty")
    prepared = [prepare_graph(g) for g in train_graphs]
    in_dim = prepared[0].x.shape[1]
    params = init_model(cfg.seed, in_dim=in_dim, hidden=cfg.hidden_dim,
                        embed=cfg.embed_dim, num_layers=cfg.num_layers,
                        negative_slope=cfg.negative_slope,
                        bn_momentum=cfg.bn_momentum)
    opt = Adam(lr=cfg.learning_rate, beta1=cfg.beta1, beta2=cfg.beta2,
               eps=cfg.adam_eps)
    prepared_val = [prepare_graph(g) for g in val_graphs] if val_graphs else None
    ws = Workspace()

    history = []
    n = len(prepared)
    for epoch in range(cfg.epochs):
        order = substream(cfg.seed, STREAM_SHUFFLE, epoch).permutation(n)
        losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            batch = make_batch([prepared[i] for i in idx])
            loss, grads, running = loss_and_gradients(
                params, batch, batch_id=f"epoch{epoch}/{start}", ws=ws)
            opt.step(params.param_items(), grads)
            commit_running_stats(params, running)
            losses.append(loss)
        val_acc = None
        if prepared_val:
            val_acc, _ = _evaluate_prepared(params, prepared_val,
                                            batch_size=cfg.batch_size, ws=ws)
        row = {"epoch": epoch, "train_loss": float(np.mean(losses)),
               "val_acc": val_acc}
        history.append(row)
        if verbose:
            acc = "" if val_acc is None else f"  val_acc {val_acc:.4f}"
            print(f"epoch {epoch:3d}  loss {row['train_loss']:.4f}{acc}",
                  flush=True)
    return params, history


def evaluate_model(params: ModelParams, graphs, batch_size=256):
    """Eval-mode accuracy and per-sample class probabilities."""
    prepared = [prepare_graph(g) for g in graphs]
    return _evaluate_prepared(params, prepared, batch_size)


def _evaluate_prepared(params, prepared, batch_size=256):
    probs = []
    for start in range(0, len(prepared), batch_size):
        batch = make_batch(prepared[start:start + batch_size])
        probs.append(predict_proba_batch(params, batch))
    probs = np.concatenate(probs, axis=0)
    labels = np.array([p.label for p in prepared])
    predicted = probs.argmax(axis=1)
    known = labels >= 0
    accuracy = float((predicted[known] == labels[known]).mean()) if known.any() else None
    return accuracy, probs
