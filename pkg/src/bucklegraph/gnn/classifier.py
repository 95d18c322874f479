"""scikit-learn style front end for the message-passing classifier."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .train import TrainConfig, evaluate_model, train_model


class MessagePassingGraphClassifier(BaseEstimator, ClassifierMixin):
    """Graph-level binary classifier over spatial graphs.

    ``X`` is a list of normalized ``SpatialGraph`` objects.  Labels may be
    passed as ``y`` or carried on the graphs themselves.

    Parameters mirror ``TrainConfig``; ``validation`` passed to ``fit`` gives
    a per-epoch accuracy column in ``history_``.
    """

    def __init__(self, epochs=50, learning_rate=1e-3, beta1=0.9, beta2=0.999,
                 adam_eps=1e-8, batch_size=32, hidden_dim=64, embed_dim=64,
                 num_layers=4, negative_slope=0.01, bn_momentum=0.1, seed=0,
                 verbose=False):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.adam_eps = adam_eps
        self.batch_size = batch_size
        self.hidden_dim = hidden_dim
        self.embed_dim = embed_dim
        self.num_layers = num_layers
        self.negative_slope = negative_slope
        self.bn_momentum = bn_momentum
        self.seed = seed
        self.verbose = verbose

    def _train_config(self):
        return TrainConfig(
            epochs=self.epochs, learning_rate=self.learning_rate,
            beta1=self.beta1, beta2=self.beta2, adam_eps=self.adam_eps,
            batch_size=self.batch_size, seed=self.seed,
            hidden_dim=self.hidden_dim, embed_dim=self.embed_dim,
            num_layers=self.num_layers, negative_slope=self.negative_slope,
            bn_momentum=self.bn_momentum)

    def fit(self, X, y=None, validation=None):
        graphs = _with_labels(X, y)
        self.params_, self.history_ = train_model(
            graphs, self._train_config(), val_graphs=validation,
            verbose=self.verbose)
        self.classes_ = np.array([0, 1])
        return self

    def predict_proba(self, X):
        self._check_fitted()
        _, probs = evaluate_model(self.params_, X)
        return probs

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)

    def score(self, X, y=None):
        graphs = _with_labels(X, y)
        acc, _ = evaluate_model(self.params_, graphs)
        return acc

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise ValueError("classifier is not fitted; call fit() first")


def _with_labels(graphs, y):
    if y is None:
        missing = [i for i, g in enumerate(graphs) if g.label is None]
        if missing:
            raise ValueError(f"graphs {missing[:5]} carry no labels and y is None")
        return list(graphs)
    from dataclasses import replace
    return [replace(g, label=int(lbl)) for g, lbl in zip(graphs, y)]
