"""Type embeddings from entity embeddings.

Thin wrapper over the compiled core. Report-shaped results come back as
dicts; vectors as plain lists of floats.
"""

import json as _json

from ._core import (
    DataError,
    EmbeddingStore,
    KnnIndex,
    TypeModel,
    UsageError,
    score,
    tsne,
    project_subtypes,
)
from . import _core

__all__ = [
    "DataError",
    "EmbeddingStore",
    "KnnIndex",
    "TypeModel",
    "UsageError",
    "build_model",
    "cluster",
    "evaluate",
    "partition",
    "project_subtypes",
    "score",
    "tsne",
]


def build_model(store, assertions, type_predicate=None, shards=1):
    """Builds a TypeModel from assertion files. Returns (model, report)."""
    kwargs = {"shards": shards}
    if type_predicate is not None:
        kwargs["type_predicate"] = type_predicate
    model, report = _core.build_model(store, list(assertions), **kwargs)
    return model, _json.loads(report)


def partition(assertions, folds, seed, out_dir, type_predicate=None):
    kwargs = {}
    if type_predicate is not None:
        kwargs["type_predicate"] = type_predicate
    return _json.loads(_core.partition(assertions, folds, seed, out_dir, **kwargs))


def evaluate(folds, store, **kwargs):
    return _json.loads(_core.evaluate(list(folds), store, **kwargs))


def cluster(model, store, out_dir, **kwargs):
    return _json.loads(_core.cluster(model, store, out_dir, **kwargs))
