"""Message-passing classifier with hand-written reverse-mode gradients.

Architecture: four spatial-convolution layers.  Each layer sends, along every
directed edge (including self-loops), the message

    MLP([h_src, x_src - x_dst])

through a one-hidden-layer perceptron, aggregates per destination node with
an element-wise max, then applies batch normalization and a leaky ReLU.  The
four per-node outputs are concatenated (skip connections), max-pooled over
each graph's nodes, and fed to a linear two-class head trained with
cross-entropy.

Max aggregation routes its subgradient to the lowest-index winner, so the
gradients below match central finite differences away from ties and kinks.
Edge-level arrays are staged in a ``Workspace`` and mutated in place; see
``workspace.py`` for why.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalFailure
from ..rng import substream
from .batching import GraphBatch
from .workspace import Workspace

BN_EPS = 1e-5

_INIT_STREAM = 41


@dataclass
class LayerParams:
    W1: np.ndarray            # (d_in + 2, hidden)
    b1: np.ndarray            # (hidden,)
    W2: np.ndarray            # (hidden, d_out)
    b2: np.ndarray            # (d_out,)
    gamma: np.ndarray         # (d_out,)
    beta: np.ndarray          # (d_out,)
    running_mean: np.ndarray  # (d_out,) state, not trained
    running_var: np.ndarray   # (d_out,) state, not trained


@dataclass
class ModelParams:
    layers: list
    Wc: np.ndarray            # (num_layers * d_out, 2)
    bc: np.ndarray            # (2,)
    seed: int
    negative_slope: float = 0.01
    bn_momentum: float = 0.1

    @property
    def in_dim(self):
        return self.layers[0].W1.shape[0] - 2

    def param_items(self):
        """Trainable parameters in a fixed order."""
        for i, layer in enumerate(self.layers):
            for name in ("W1", "b1", "W2", "b2", "gamma", "beta"):
                yield f"layers.{i}.{name}", getattr(layer, name)
        yield "classifier.W", self.Wc
        yield "classifier.b", self.bc

    def state_items(self):
        for i, layer in enumerate(self.layers):
            yield f"layers.{i}.running_mean", layer.running_mean
            yield f"layers.{i}.running_var", layer.running_var


def init_model(seed, in_dim=4, hidden=64, embed=64, num_layers=4, classes=2,
               negative_slope=0.01, bn_momentum=0.1) -> ModelParams:
    """Fan-in-scaled uniform weights, zero biases, identity batch norm."""
    rng = substream(seed, _INIT_STREAM)
    layers = []
    d = in_dim
    for _ in range(num_layers):
        fan1 = d + 2
        W1 = rng.uniform(-1, 1, size=(fan1, hidden)) / np.sqrt(fan1)
        W2 = rng.uniform(-1, 1, size=(hidden, embed)) / np.sqrt(hidden)
        layers.append(LayerParams(
            W1=W1, b1=np.zeros(hidden), W2=W2, b2=np.zeros(embed),
            gamma=np.ones(embed), beta=np.zeros(embed),
            running_mean=np.zeros(embed), running_var=np.ones(embed)))
        d = embed
    fan_c = num_layers * embed
    Wc = rng.uniform(-1, 1, size=(fan_c, classes)) / np.sqrt(fan_c)
    return ModelParams(layers=layers, Wc=Wc, bc=np.zeros(classes), seed=seed,
                       negative_slope=negative_slope, bn_momentum=bn_momentum)


def _lrelu_into(z, slope, out):
    """out = leaky_relu(z); ``out`` may not alias ``z``."""
    np.multiply(z, slope, out=out)
    np.maximum(z, out, out=out)
    return out


def _segment_max(values, starts):
    return np.maximum.reduceat(values, starts, axis=0)


def _segment_winners(values, starts, seg_of_row, maxv, sentinel,
                     ws: Workspace, tag: str):
    """Lowest row index attaining the segment max, per (segment, channel)."""
    gathered = ws.take(f"{tag}_gather", values.shape)
    np.take(maxv, seg_of_row, axis=0, out=gathered)
    eq = ws.take(f"{tag}_eq", values.shape, dtype=bool)
    np.equal(values, gathered, out=eq)
    eq_rows, eq_cols = np.nonzero(eq)
    argwin = np.full(maxv.shape, sentinel, dtype=np.int64)
    np.minimum.at(argwin, (seg_of_row[eq_rows], eq_cols), eq_rows)
    return argwin


def layer_forward(layer: LayerParams, h, batch: GraphBatch, train: bool,
                  slope: float, momentum: float, ws: Workspace = None,
                  layer_id: int = 0):
    """One message-passing layer; returns (out, cache).

    In train mode the cache carries the updated running statistics; callers
    commit them after the optimizer step.
    """
    ws = ws or Workspace()
    d = h.shape[1]
    if layer.W1.shape[0] != d + 2:
        raise ValueError(
            f"embedding dim {d} incompatible with W1 rows {layer.W1.shape[0]}")
    E = batch.dst.shape[0]
    hidden = layer.W1.shape[1]
    embed = layer.W2.shape[1]

    proj = h @ layer.W1[:d]
    proj += layer.b1
    z1 = ws.take("edge_a", (E, hidden))
    np.take(proj, batch.src, axis=0, out=z1)
    t = ws.take("edge_b", (E, hidden))
    np.matmul(batch.dpos, layer.W1[d:], out=t)
    z1 += t
    a1 = ws.take(f"a1_{layer_id}", (E, hidden))
    _lrelu_into(z1, slope, a1)
    z2 = ws.take("edge_b", (E, embed))
    np.matmul(a1, layer.W2, out=z2)
    z2 += layer.b2

    m = _segment_max(z2, batch.seg_starts)
    argwin = (_segment_winners(z2, batch.seg_starts, batch.dst, m, E,
                               ws, "edge") if train else None)

    n = m.shape[0]
    if train:
        mean = m.mean(axis=0)
        var = m.var(axis=0)
        new_rm = (1 - momentum) * layer.running_mean + momentum * mean
        unbiased = var * n / max(n - 1, 1)
        new_rv = (1 - momentum) * layer.running_var + momentum * unbiased
    else:
        mean, var = layer.running_mean, layer.running_var
        new_rm = new_rv = None
    istd = 1.0 / np.sqrt(var + BN_EPS)
    xhat = (m - mean) * istd
    y = layer.gamma * xhat + layer.beta
    out = np.maximum(y, slope * y)
    cache = {"h": h, "argwin": argwin, "xhat": xhat, "istd": istd, "y": y,
             "running": (new_rm, new_rv), "n_nodes": n, "layer_id": layer_id}
    return out, cache


def layer_backward(layer: LayerParams, cache, d_out, batch: GraphBatch,
                   slope: float, ws: Workspace = None):
    """Gradients of one layer; returns (d_h_in, grads dict)."""
    ws = ws or Workspace()
    h = cache["h"]
    d = h.shape[1]
    xhat, istd, n = cache["xhat"], cache["istd"], cache["n_nodes"]
    E = batch.dst.shape[0]
    hidden = layer.W1.shape[1]
    embed = layer.W2.shape[1]

    dy = d_out * np.where(cache["y"] >= 0, 1.0, slope)
    dgamma = (dy * xhat).sum(axis=0)
    dbeta = dy.sum(axis=0)
    # batch-statistics backward (biased variance)
    dm = (layer.gamma * istd / n) * (n * dy - dy.sum(axis=0)
                                     - xhat * (dy * xhat).sum(axis=0))

    dZ2 = ws.take("edge_a", (E, embed))
    dZ2[:] = 0.0
    dZ2[cache["argwin"], np.arange(embed)[None, :]] = dm

    a1 = ws.take(f"a1_{cache['layer_id']}", (E, hidden))
    dW2 = a1.T @ dZ2
    db2 = dm.sum(axis=0)

    dZ1 = ws.take("edge_b", (E, hidden))
    np.matmul(dZ2, layer.W2.T, out=dZ1)
    scaled = ws.take("edge_a", (E, hidden))
    np.multiply(dZ1, slope, out=scaled)
    neg = ws.take("edge_eq", (E, hidden), dtype=bool)
    np.less(a1, 0, out=neg)
    np.copyto(dZ1, scaled, where=neg)  # leaky-relu factor from a1's sign

    dproj = batch.src_scatter @ dZ1
    dW1 = np.empty_like(layer.W1)
    dW1[:d] = h.T @ dproj
    dW1[d:] = batch.dpos.T @ dZ1
    db1 = dZ1.sum(axis=0)
    d_h = dproj @ layer.W1[:d].T
    grads = {"W1": dW1, "b1": db1, "W2": dW2, "b2": db2,
             "gamma": dgamma, "beta": dbeta}
    return d_h, grads


def model_forward(params: ModelParams, batch: GraphBatch, train: bool,
                  ws: Workspace = None):
    """Logits per graph; returns (logits, aux) for the backward pass."""
    if batch.num_nodes == 0:
        raise ValueError("empty graph batch")
    ws = ws or Workspace()
    h = batch.x
    outs, caches = [], []
    for i, layer in enumerate(params.layers):
        h, cache = layer_forward(layer, h, batch, train, params.negative_slope,
                                 params.bn_momentum, ws=ws, layer_id=i)
        outs.append(h)
        caches.append(cache)
    S = np.concatenate(outs, axis=1)
    R = _segment_max(S, batch.node_starts)
    argwin_r = (_segment_winners(S, batch.node_starts, _node_graph_ids(batch),
                                 R, batch.num_nodes, ws, "node")
                if train else None)
    logits = R @ params.Wc + params.bc
    aux = {"caches": caches, "R": R, "argwin_r": argwin_r}
    return logits, aux


def _node_graph_ids(batch: GraphBatch):
    ids = np.zeros(batch.num_nodes, dtype=np.int64)
    ids[batch.node_starts[1:]] = 1
    return np.cumsum(ids)


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def predict_proba_batch(params: ModelParams, batch: GraphBatch,
                        ws: Workspace = None):
    logits, _ = model_forward(params, batch, train=False, ws=ws)
    return softmax(logits)


def loss_and_gradients(params: ModelParams, batch: GraphBatch, batch_id=None,
                       ws: Workspace = None):
    """Mean cross-entropy and exact gradients for every trainable parameter.

    Returns (loss, grads, running_stats) where ``grads`` maps parameter names
    (as in ``ModelParams.param_items``) to arrays and ``running_stats`` holds
    the train-mode batch-norm updates to commit after the optimizer step.
    """
    ws = ws or Workspace()
    labels = batch.labels
    if (labels < 0).any():
        raise ValueError("all graphs in a training batch need labels")
    logits, aux = model_forward(params, batch, train=True, ws=ws)
    probs = softmax(logits)
    G = logits.shape[0]
    eps_floor = np.finfo(float).tiny
    loss = float(-np.log(np.maximum(probs[np.arange(G), labels], eps_floor)).mean())
    if not np.isfinite(loss):
        raise NumericalFailure(f"non-finite loss in batch {batch_id!r}")

    dlogits = probs.copy()
    dlogits[np.arange(G), labels] -= 1.0
    dlogits /= G

    R = aux["R"]
    grads = {"classifier.W": R.T @ dlogits, "classifier.b": dlogits.sum(axis=0)}
    dR = dlogits @ params.Wc.T
    dS = np.zeros((batch.num_nodes, R.shape[1]))
    dS[aux["argwin_r"], np.arange(R.shape[1])[None, :]] = dR

    embed = R.shape[1] // len(params.layers)
    d_h = None
    running = {}
    for l in range(len(params.layers) - 1, -1, -1):
        d_out = dS[:, l * embed:(l + 1) * embed]
        if d_h is not None:
            d_out = d_out + d_h
        d_h, layer_grads = layer_backward(params.layers[l], aux["caches"][l],
                                          d_out, batch, params.negative_slope,
                                          ws=ws)
        for name, g in layer_grads.items():
            grads[f"layers.{l}.{name}"] = g
        running[l] = aux["caches"][l]["running"]
    return loss, grads, running


def commit_running_stats(params: ModelParams, running):
    for l, (rm, rv) in running.items():
        params.layers[l].running_mean = rm
        params.layers[l].running_var = rv
