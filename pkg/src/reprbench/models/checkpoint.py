"""Model checkpoint files.

Layout (UTF-8 text)::

    REPRBENCH-MODEL v1
    {"spec": ..., "seed": ..., "best_val_mae": ..., "normalization": ..., "parameters": ...}

Line 2 is one JSON object. Arrays are stored as ``{"shape": [...], "data": [...]}``
with row-major data; floats are written with ``repr`` precision so a load
reproduces every bit. Linear models store ``parameters`` as
``{"intercept", "history_weights", "calendar_weights", "differenced", "horizon"}``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import BadCheckpoint
from .linear import LinearModel
from .networks import build_network
from .spec import Family, ModelSpec
from .training import Normalization, TrainedModel

MAGIC = "REPRBENCH-MODEL v1"


def _arr(a) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": a.reshape(-1).tolist()}


def _unarr(d) -> np.ndarray:
    return np.asarray(d["data"], dtype=np.float64).reshape(d["shape"])


def dumps(model: TrainedModel) -> str:
    doc = {
        "spec": model.spec.to_dict(),
        "seed": model.seed,
        "best_val_mae": model.best_val_mae,
    }
    if model.spec.family is Family.LINEAR:
        m = model.parameters
        doc["parameters"] = {
            "intercept": m.intercept,
            "history_weights": _arr(m.history_weights),
            "calendar_weights": _arr(m.calendar_weights),
            "differenced": m.differenced,
            "horizon": m.horizon,
        }
    else:
        n = model.normalization
        doc["normalization"] = {
            "input_mean": _arr(n.input_mean),
            "input_std": _arr(n.input_std),
            "target_mean": n.target_mean,
            "target_std": n.target_std,
        }
        doc["parameters"] = {k: _arr(v) for k, v in model.parameters.state().items()}
    return MAGIC + "\n" + json.dumps(doc) + "\n"


def loads(text: str) -> TrainedModel:
    head, _, body = text.partition("\n")
    if head.strip() != MAGIC:
        raise BadCheckpoint(f"expected header {MAGIC!r}, found {head[:40]!r}")
    try:
        doc = json.loads(body)
        spec = ModelSpec.from_dict(doc["spec"])
        params = doc["parameters"]
        if spec.family is Family.LINEAR:
            model = TrainedModel(spec, LinearModel(
                params["intercept"], _unarr(params["history_weights"]),
                _unarr(params["calendar_weights"]), params["differenced"], params["horizon"],
            ))
        else:
            net = build_network(spec, zero=True)
            net.load_state({k: _unarr(v) for k, v in params.items()})
            n = doc["normalization"]
            norm = Normalization(_unarr(n["input_mean"]), _unarr(n["input_std"]),
                                 n["target_mean"], n["target_std"])
            model = TrainedModel(spec, net, norm)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadCheckpoint(f"malformed checkpoint: {exc}") from exc
    model.seed = doc.get("seed", 0)
    model.best_val_mae = doc.get("best_val_mae", float("nan"))
    return model


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load_model(path) -> TrainedModel:
    return loads(Path(path).read_text(encoding="utf-8"))
