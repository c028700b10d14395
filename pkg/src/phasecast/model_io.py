"""Versioned JSON persistence for trained models.

A model file bundles the topology, the genome phases at full round-trip
precision, the normalization bounds, the aggregation settings needed to
feed a raw trace back through the same pipeline, and training metadata.
Files are written with deterministic content so identical runs produce
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelFormatError
from .network import Topology
from .pipeline import Normalizer

MODEL_FORMAT = "phasecast-model"
MODEL_VERSION = 1


@dataclass
class TrainedModel:
    topology: Topology
    genome: np.ndarray
    normalizer: Normalizer
    interval: float | None = None
    agg_mode: str | None = None
    split: tuple[float, float, float] | None = None
    metadata: dict = field(default_factory=dict)


def save_model(model: TrainedModel, path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "topology": {
            "n_input": model.topology.n_input,
            "p_hidden": model.topology.p_hidden,
            "q_output": model.topology.q_output,
        },
        "genome": [float(g) for g in model.genome],
        "normalizer": {"d_min": model.normalizer.d_min,
                       "d_max": model.normalizer.d_max},
        "interval": model.interval,
        "agg_mode": model.agg_mode,
        "split": list(model.split) if model.split is not None else None,
        "metadata": model.metadata,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file {path} is not valid JSON: {exc}") from exc

    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path} is not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"model file {path} has version {doc.get('version')!r}; "
            f"this build reads version {MODEL_VERSION}")
    try:
        topo = Topology(**doc["topology"])
        genome = np.asarray(doc["genome"], dtype=float)
        norm = Normalizer(**doc["normalizer"])
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"model file {path} is missing fields: {exc}") from exc
    if genome.shape != (topo.genome_length,):
        raise ModelFormatError(
            f"model file {path} has {genome.size} genome phases but the "
            f"topology needs {topo.genome_length}")
    split = doc.get("split")
    return TrainedModel(
        topology=topo,
        genome=genome,
        normalizer=norm,
        interval=doc.get("interval"),
        agg_mode=doc.get("agg_mode"),
        split=tuple(split) if split is not None else None,
        metadata=doc.get("metadata", {}),
    )
