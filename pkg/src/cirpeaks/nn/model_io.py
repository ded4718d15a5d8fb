"""Model serialization: spec + scaler + per-layer parameters as JSON.

Matrices are row-major nested lists; LSTM parameters stack the four gate
blocks [i, f, o, g] along the output axis, matching the in-memory layout.
"""

from __future__ import annotations

import json

import numpy as np

from .._util import atomic_write_text
from ..core.scaling import ScalerParams
from ..errors import ParseError, ValidationError
from .model import Model, build_model
from .spec import LayerSpec, ModelSpec


def spec_to_dict(spec: ModelSpec) -> dict:
    layers = []
    for layer in spec.layers:
        entry = {"kind": layer.kind}
        for name in ("width", "rate", "repeat", "activation", "returns_sequence"):
            value = getattr(layer, name)
            if value is not None:
                entry[name] = value
        layers.append(entry)
    return {"input_window": spec.input_window, "scale": spec.scale, "layers": layers}


def spec_from_dict(doc: dict) -> ModelSpec:
    layers = tuple(LayerSpec(**entry) for entry in doc["layers"])
    return ModelSpec(layers=layers, input_window=int(doc["input_window"]), scale=float(doc["scale"]))


def save_model(model: Model, path) -> None:
    doc = {
        "spec": spec_to_dict(model.spec),
        "scaler": (
            {"mean": model.scaler.mean, "std": model.scaler.std} if model.scaler else None
        ),
        "layers": [
            {"kind": layer.kind, **{k: v.tolist() for k, v in params.items()}}
            for layer, params in zip(model.spec.layers, model.params)
        ],
    }
    atomic_write_text(path, json.dumps(doc) + "\n")


def load_model(path) -> Model:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        spec = spec_from_dict(doc["spec"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: bad model spec: {exc}") from None

    # Reference allocation fixes the expected parameter shapes.
    reference = build_model(spec, seed=0)
    entries = doc["layers"]
    if len(entries) != len(reference.params):
        raise ParseError(f"{path}: expected {len(reference.params)} layer entries")
    params = []
    for pos, (entry, ref) in enumerate(zip(entries, reference.params)):
        if entry.get("kind") != spec.layers[pos].kind:
            raise ParseError(f"{path}: layer {pos} kind mismatch")
        loaded = {}
        for key, ref_arr in ref.items():
            if key not in entry:
                raise ParseError(f"{path}: layer {pos} missing parameter {key!r}")
            arr = np.ascontiguousarray(entry[key], dtype=np.float64)
            if arr.shape != ref_arr.shape:
                raise ParseError(
                    f"{path}: layer {pos} parameter {key!r} has shape {arr.shape}, "
                    f"expected {ref_arr.shape}"
                )
            if not np.isfinite(arr).all():
                raise ValidationError(f"{path}: layer {pos} parameter {key!r} is non-finite")
            loaded[key] = arr
        params.append(loaded)

    scaler_doc = doc.get("scaler")
    scaler = ScalerParams(float(scaler_doc["mean"]), float(scaler_doc["std"])) if scaler_doc else None
    return Model(spec=spec, params=params, scaler=scaler)
