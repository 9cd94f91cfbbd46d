"""Model files: a numpy ``.npz`` archive with a JSON header.

The header holds the format version, layer sizes, labels, vocabulary, seed
and loss history; arrays ``w0, b0, w1, b1, ...`` hold the parameters. No
pickled objects are stored.
"""

from __future__ import annotations

import json
import zipfile
from pathlib import Path

import numpy as np

from stylearmor.errors import ModelFormatError, SchemaMismatch
from stylearmor.model.features import FeatureSchema
from stylearmor.model.network import Model, Params

FORMAT_VERSION = 1


def save_model(path: Path, model: Model) -> None:
    """Write ``model`` to ``path``, creating parent directories.

    Args:
        path: Destination file, conventionally ending in ``.npz``.
        model: A trained model; its schema vocabulary is stored with it.

    Example:
        save_model(Path("runs/baseline.npz"), train(items, hp))
    """
    header = {
        "version": FORMAT_VERSION,
        "layer_sizes": list(model.layer_sizes),
        "labels": list(model.labels),
        "vocab": list(model.schema.vocab),
        "schema_id": model.schema.schema_id,
        "seed": model.seed,
        "history": list(model.history),
    }
    arrays = {}
    for i, (w, b) in enumerate(zip(model.params.weights, model.params.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        np.savez(f, header=np.array(json.dumps(header)), **arrays)


def load_model(path: Path) -> Model:
    """Read a model written by :func:`save_model`.

    Args:
        path: The model file.

    Returns:
        Model: Parameters, labels and feature schema as saved.

    Raises:
        ModelFormatError: for anything that is not a readable model file of
            this version, including shape and schema mismatches.
    """
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["header"]))
            if header.get("version") != FORMAT_VERSION:
                raise ModelFormatError(f"{path}: unsupported model version {header.get('version')!r}")
            sizes = tuple(int(n) for n in header["layer_sizes"])
            layers = len(sizes) - 1
            weights = [np.array(data[f"w{i}"], dtype=float) for i in range(layers)]
            biases = [np.array(data[f"b{i}"], dtype=float) for i in range(layers)]
    except (OSError, KeyError, ValueError, zipfile.BadZipFile) as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
    for i, w in enumerate(weights):
        if w.shape != (sizes[i + 1], sizes[i]) or biases[i].shape != (sizes[i + 1],):
            raise ModelFormatError(f"{path}: layer {i} has shape {w.shape}")
    schema = FeatureSchema(tuple(header["vocab"]))
    if schema.schema_id != header.get("schema_id"):
        raise ModelFormatError(f"{path}: vocabulary does not match its schema id")
    try:
        return Model(
            sizes,
            Params(weights, biases),
            tuple(header["labels"]),
            schema,
            int(header.get("seed", 0)),
            [float(x) for x in header.get("history", [])],
        )
    except (ValueError, SchemaMismatch) as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
