"""Model blobs: one JSON header line, then raw little-endian float64 arrays.

Array order matches ``ModelParams.param_items`` followed by
``ModelParams.state_items``; the header records every shape, so the format is
self-describing and byte-deterministic.
"""

import json

import numpy as np

from .network import LayerParams, ModelParams

_FORMAT = "bucklegraph/model/v1"


def save_model(params: ModelParams, path, extra=None):
    names, arrays = [], []
    for name, arr in list(params.param_items()) + list(params.state_items()):
        names.append([name, list(arr.shape)])
        arrays.append(np.ascontiguousarray(arr, dtype="<f8"))
    header = {
        "format": _FORMAT,
        "seed": params.seed,
        "num_layers": len(params.layers),
        "negative_slope": params.negative_slope,
        "bn_momentum": params.bn_momentum,
        "arrays": names,
    }
    if extra:
        header["extra"] = extra
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode())
        f.write(b"\n")
        for arr in arrays:
            f.write(arr.tobytes())


def load_model(path) -> ModelParams:
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode())
        if header.get("format") != _FORMAT:
            raise ValueError(f"{path}: not a bucklegraph model blob")
        values = {}
        for name, shape in header["arrays"]:
            n = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(f.read(n * 8), dtype="<f8").reshape(shape).copy()
            values[name] = arr
    layers = []
    for i in range(header["num_layers"]):
        layers.append(LayerParams(
            W1=values[f"layers.{i}.W1"], b1=values[f"layers.{i}.b1"],
            W2=values[f"layers.{i}.W2"], b2=values[f"layers.{i}.b2"],
            gamma=values[f"layers.{i}.gamma"], beta=values[f"layers.{i}.beta"],
            running_mean=values[f"layers.{i}.running_mean"],
            running_var=values[f"layers.{i}.running_var"]))
    return ModelParams(layers=layers, Wc=values["classifier.W"],
                       bc=values["classifier.b"], seed=header["seed"],
                       negative_slope=header["negative_slope"],
                       bn_momentum=header["bn_momentum"])
