"""Datasets: synthetic Gaussian clusters, split bookkeeping, and feature/label file formats.

A dataset is one feature matrix plus per-item label sets and three id lists.
Query and retrieval ids never overlap; training ids are a subset of retrieval
ids, matching the usual protocol where training images are drawn from the
retrieval pool.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_FEATURES_MAGIC = b"TFV1"


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: list
    train_ids: np.ndarray
    retrieval_ids: np.ndarray
    query_ids: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float32)
        if feats.ndim != 2 or feats.shape[0] == 0 or feats.shape[1] == 0:
            raise ValueError(f"features must be a non-empty [n x dim] matrix, got shape {feats.shape}")
        n = feats.shape[0]
        labels = [frozenset(ls) for ls in self.labels]
        if len(labels) != n:
            raise ValueError(f"{n} feature rows vs {len(labels)} label sets")
        if any(not ls or any(not isinstance(l, (int, np.integer)) or l < 0 for l in ls) for ls in labels):
            raise ValueError("every item needs a non-empty set of non-negative integer labels")
        ids = {}
        for name in ("train_ids", "retrieval_ids", "query_ids"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.ndim != 1 or len(set(arr.tolist())) != arr.size:
                raise ValueError(f"{name} must be a 1-d list of distinct ids")
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise ValueError(f"{name} out of range [0, {n})")
            ids[name] = arr
        if set(ids["query_ids"].tolist()) & set(ids["retrieval_ids"].tolist()):
            raise ValueError("query and retrieval ids must not overlap")
        if not set(ids["train_ids"].tolist()) <= set(ids["retrieval_ids"].tolist()):
            raise ValueError("train ids must be a subset of retrieval ids")
        if not (ids["train_ids"].size and ids["retrieval_ids"].size and ids["query_ids"].size):
            raise ValueError("train, retrieval, and query splits must all be non-empty")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        for name, arr in ids.items():
            object.__setattr__(self, name, arr)

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return 1 + max(max(ls) for ls in self.labels)

    def subset(self, ids) -> tuple:
        """(features, label sets) for an id list, in order."""
        return self.features[ids], [self.labels[i] for i in ids]


def single_labels(labels) -> np.ndarray:
    """Collapse one-element label sets to an int vector; multi-label items are rejected.

    The training loss is single-class cross-entropy, so multi-label items can
    be indexed and queried but not trained on.
    """
    out = np.empty(len(labels), dtype=np.int64)
    for i, ls in enumerate(labels):
        if len(ls) != 1:
            raise ValueError(f"item {i} has {len(ls)} labels; training requires exactly one")
        out[i] = next(iter(ls))
    return out


def gen_synthetic(
    classes: int,
    per_class: int,
    input_dim: int,
    spread: float,
    seed: int,
    *,
    query_fraction: float = 0.1,
    train_fraction: float = 0.5,
) -> Dataset:
    """Gaussian class clusters: unit-length centers plus isotropic noise.

    Centers are standard-normal draws scaled to unit Euclidean length, so
    spread alone sets the overlap between classes; samples = center +
    spread * N(0, I). Rows are class-major (item c*per_class + j belongs to
    class c) and stored as float32. Per class, a seeded permutation sends a
    query_fraction slice to the query split and the rest to retrieval; the
    first train_fraction of the retrieval part (same permutation) forms the
    training subset. Deterministic per seed.
    """
    if classes < 1 or per_class < 1 or input_dim < 1:
        raise ValueError(f"classes, per_class, input_dim must be positive, got {(classes, per_class, input_dim)}")
    if spread < 0:
        raise ValueError(f"spread must be non-negative, got {spread!r}")
    if not 0 < query_fraction < 1 or not 0 < train_fraction <= 1:
        raise ValueError("query_fraction must lie in (0, 1) and train_fraction in (0, 1]")
    n_query = round(query_fraction * per_class)
    n_retrieval = per_class - n_query
    n_train = round(train_fraction * n_retrieval)
    if n_query < 1 or n_retrieval < 1 or n_train < 1:
        raise ValueError(
            f"per_class={per_class} too small for fractions ({n_query} query, {n_retrieval} retrieval, {n_train} train)"
        )
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((classes, input_dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    features = np.empty((classes * per_class, input_dim), dtype=np.float32)
    labels = []
    train_ids, retrieval_ids, query_ids = [], [], []
    for c in range(classes):
        block = centers[c] + spread * rng.standard_normal((per_class, input_dim))
        features[c * per_class : (c + 1) * per_class] = block.astype(np.float32)
        labels.extend(frozenset({c}) for _ in range(per_class))
        perm = rng.permutation(per_class) + c * per_class
        query_ids.extend(perm[:n_query].tolist())
        retrieval_ids.extend(perm[n_query:].tolist())
        train_ids.extend(perm[n_query : n_query + n_train].tolist())
    return Dataset(
        features=features,
        labels=labels,
        train_ids=np.array(train_ids),
        retrieval_ids=np.array(retrieval_ids),
        query_ids=np.array(query_ids),
    )


def save_features(path, features) -> None:
    """Write magic 'TFV1', u32 n, u32 dim, then row-major little-endian float32."""
    arr = np.asarray(features, dtype=np.float32)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"features must be a non-empty [n x dim] matrix, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_FEATURES_MAGIC)
        fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<f4").tobytes())


def load_features(path) -> np.ndarray:
    """Inverse of save_features."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _FEATURES_MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_FEATURES_MAGIC!r}")
        n, dim = struct.unpack("<II", fh.read(8))
        if n < 1 or dim < 1:
            raise ValueError(f"invalid header: n={n}, dim={dim}")
        raw = fh.read(4 * n * dim)
        if len(raw) != 4 * n * dim:
            raise ValueError("truncated feature payload")
        if fh.read(1):
            raise ValueError("trailing bytes after feature payload")
    return np.frombuffer(raw, dtype="<f4").astype(np.float32).reshape(n, dim)


def save_labels(path, labels) -> None:
    """One line per item: comma-separated integer labels, sorted ascending."""
    lines = []
    for ls in labels:
        if not ls:
            raise ValueError("every item needs at least one label")
        lines.append(",".join(str(l) for l in sorted(ls)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_labels(path) -> list:
    """Inverse of save_labels; returns a list of frozensets."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                raise ValueError(f"{path}:{lineno}: empty label line")
            try:
                out.append(frozenset(int(tok) for tok in line.split(",")))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: labels must be comma-separated integers") from None
    if not out:
        raise ValueError(f"{path}: no labels")
    return out


def save_splits(prefix, dataset: Dataset) -> list:
    """Write <prefix>.{train,retrieval,query}.{tfv,labels}; returns the six paths."""
    paths = []
    for name, ids in (
        ("train", dataset.train_ids),
        ("retrieval", dataset.retrieval_ids),
        ("query", dataset.query_ids),
    ):
        feats, labels = dataset.subset(ids)
        fpath, lpath = f"{prefix}.{name}.tfv", f"{prefix}.{name}.labels"
        save_features(fpath, feats)
        save_labels(lpath, labels)
        paths.extend((fpath, lpath))
    return paths


def load_splits(prefix) -> Dataset:
    """Rebuild a Dataset from the six split files written by save_splits.

    Every training row must also appear in the retrieval split (same float32
    bytes, same labels); rows are matched in order, consuming duplicates.
    """
    parts = {}
    for name in ("train", "retrieval", "query"):
        feats = load_features(f"{prefix}.{name}.tfv")
        labels = load_labels(f"{prefix}.{name}.labels")
        if feats.shape[0] != len(labels):
            raise ValueError(f"{prefix}.{name}: {feats.shape[0]} feature rows vs {len(labels)} label lines")
        parts[name] = (feats, labels)
    dims = {parts[name][0].shape[1] for name in parts}
    if len(dims) != 1:
        raise ValueError(f"split feature dims disagree: {sorted(dims)}")
    r_feats, r_labels = parts["retrieval"]
    q_feats, q_labels = parts["query"]
    features = np.concatenate([r_feats, q_feats])
    labels = r_labels + q_labels
    retrieval_ids = np.arange(r_feats.shape[0])
    query_ids = np.arange(q_feats.shape[0]) + r_feats.shape[0]

    by_row = {}
    for i in range(r_feats.shape[0]):
        by_row.setdefault((r_feats[i].tobytes(), r_labels[i]), []).append(i)
    train_ids = []
    t_feats, t_labels = parts["train"]
    for i in range(t_feats.shape[0]):
        candidates = by_row.get((t_feats[i].tobytes(), t_labels[i]))
        if not candidates:
            raise ValueError(f"training row {i} does not appear in the retrieval split")
        train_ids.append(candidates.pop(0))
    return Dataset(
        features=features,
        labels=labels,
        train_ids=np.array(train_ids),
        retrieval_ids=retrieval_ids,
        query_ids=query_ids,
    )
