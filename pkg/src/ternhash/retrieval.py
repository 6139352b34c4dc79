"""Hamming-distance retrieval over packed ternary codes, scored by mean average precision.

Ranking is by ascending encoded-Hamming distance with ties broken by ascending
item id. An item is relevant to a query when their label sets intersect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import PackedCode


@dataclass(frozen=True)
class RetrievalIndex:
    """Immutable database of packed codes plus per-item label sets."""

    codes: list[PackedCode]
    labels: list[frozenset]
    _pos: np.ndarray = field(init=False, repr=False)
    _neg: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.codes:
            raise ValueError("index must hold at least one code")
        if len(self.codes) != len(self.labels):
            raise ValueError(f"{len(self.codes)} codes vs {len(self.labels)} label sets")
        d = self.codes[0].d
        if any(c.d != d for c in self.codes):
            raise ValueError("all index codes must share one length")
        labels = [frozenset(ls) for ls in self.labels]
        if any(not ls for ls in labels):
            raise ValueError("every item needs at least one label")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_pos", np.stack([c.pos for c in self.codes]))
        object.__setattr__(self, "_neg", np.stack([c.neg for c in self.codes]))

    @property
    def d(self) -> int:
        return self.codes[0].d

    def __len__(self):
        return len(self.codes)


def _resolve_k(k, n: int) -> int:
    if k == "all":
        return n
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n:
        raise ValueError(f'k must be "all" or an integer in [1, {n}], got {k!r}')
    return k


def _distances(index: RetrievalIndex, query: PackedCode) -> np.ndarray:
    if query.d != index.d:
        raise ValueError(f"query length {query.d} does not match index length {index.d}")
    return (
        np.bitwise_count(index._pos ^ query.pos).sum(axis=1) + np.bitwise_count(index._neg ^ query.neg).sum(axis=1)
    ).astype(np.int64)


def query_topk(index: RetrievalIndex, query: PackedCode, k) -> list[tuple[int, int]]:
    """Top-k (item id, distance) pairs, nearest first, id-ascending among ties.

    k is an int in [1, len(index)] or the string "all".
    """
    cut = _resolve_k(k, len(index))
    dists = _distances(index, query)
    order = np.argsort(dists, kind="stable")[:cut]
    return [(int(i), int(dists[i])) for i in order]


def average_precision(relevances, k: int, *, total_relevant=None) -> float:
    """AP over a ranked 0/1 relevance list cut at k.

    Sum of precision-at-hit over hits, divided by total_relevant (defaults to
    the number of hits within the cut). 0.0 when nothing relevant is found.
    """
    if k < 1 or k > len(relevances):
        raise ValueError(f"k must be in [1, {len(relevances)}], got {k!r}")
    positions = np.flatnonzero(np.asarray(relevances[:k]))
    acc = 0.0
    for hits, i in enumerate(positions, start=1):
        acc += hits / (int(i) + 1)
    denom = len(positions) if total_relevant is None else total_relevant
    if len(positions) == 0 or denom == 0:
        return 0.0
    return acc / denom


@dataclass(frozen=True)
class EvalReport:
    """mAP plus the per-query APs it averages, at cut k."""

    map: float
    per_query_ap: list[float]
    k: int


def mean_ap(index: RetrievalIndex, query_codes, query_labels, k, *, normalization: str = "found") -> EvalReport:
    """Mean AP over a query set.

    normalization selects the AP denominator: "found" counts relevant items
    inside the top-k cut, "capped" uses min(total relevant in index, k).
    """
    if normalization not in ("found", "capped"):
        raise ValueError(f'normalization must be "found" or "capped", got {normalization!r}')
    if len(query_codes) != len(query_labels):
        raise ValueError(f"{len(query_codes)} query codes vs {len(query_labels)} label sets")
    if not query_codes:
        raise ValueError("query set must be non-empty")
    cut = _resolve_k(k, len(index))
    aps = []
    for code, qlabels in zip(query_codes, query_labels):
        qlabels = frozenset(qlabels)
        if not qlabels:
            raise ValueError("every query needs at least one label")
        relevant = np.fromiter((bool(ls & qlabels) for ls in index.labels), dtype=bool, count=len(index))
        order = np.argsort(_distances(index, code), kind="stable")[:cut]
        total = None
        if normalization == "capped":
            total = min(int(relevant.sum()), cut)
        aps.append(average_precision(relevant[order], cut, total_relevant=total))
    acc = 0.0
    for ap in aps:
        acc += ap
    return EvalReport(map=acc / len(aps), per_query_ap=aps, k=cut)


def format_report(report: EvalReport) -> str:
    """Plain-text table: one 'qid ap' row per query, then the mAP line."""
    lines = [f"{i} {ap:.6f}" for i, ap in enumerate(report.per_query_ap)]
    lines.append(f"mAP {report.map:.6f}")
    return "\n".join(lines) + "\n"
