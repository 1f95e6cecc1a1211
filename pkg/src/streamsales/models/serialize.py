"""Versioned JSON round-trip for fitted models.

Floats are serialized with ``repr`` precision (Python's JSON encoder emits
shortest round-trip representations), so a reloaded model reproduces
bit-identical predictions.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ArgumentError
from .base import FittedModel, ModelSpec, model_class

FORMAT_VERSION = 1


def model_to_dict(model: FittedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "algorithm": model.spec.algorithm,
        "spec": model.spec.to_dict(),
        "n_features": model.n_features,
        "payload": model.payload(),
    }


def model_from_dict(d: dict) -> FittedModel:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ArgumentError(f"unsupported model format version {version!r}")
    spec = ModelSpec.from_dict(d["spec"])
    cls = model_class(spec.algorithm)
    return cls.from_payload(spec, int(d["n_features"]), d["payload"])


def save_model(model: FittedModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n")


def load_model(path: str | Path) -> FittedModel:
    return model_from_dict(json.loads(Path(path).read_text()))
