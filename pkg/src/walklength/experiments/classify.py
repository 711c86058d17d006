"""Leave-one-out nearest-neighbour classification and single-linkage clustering
on precomputed distance matrices (``inf`` entries allowed)."""
from __future__ import annotations

from collections import Counter
from typing import List, Sequence, Tuple

import numpy as np


def knn_classify(dm, labels: Sequence[int], k: int = 4):
    """Leave-one-out ``k``-NN on a distance matrix.

    Each item gets the majority label among its ``k`` nearest other items
    (ties in distance broken by index).  A tie between labels goes to the
    label of the nearest neighbour among the tied ones.

    Returns ``(accuracy, confusion, predictions)`` where ``confusion[i, j]``
    counts items of true class ``classes[i]`` predicted as ``classes[j]`` and
    ``classes`` is the sorted set of labels.
    """
    dm = np.asarray(dm, dtype=np.float64)
    labels = list(labels)
    m = len(labels)
    if dm.shape != (m, m):
        raise ValueError("distance matrix and labels disagree in size")
    if m < k + 1:
        raise ValueError(f"need at least {k + 1} items for {k}-NN leave-one-out")
    predictions = []
    for i in range(m):
        others = np.array([j for j in range(m) if j != i])
        order = others[np.lexsort((others, dm[i, others]))][:k]
        votes = Counter(labels[j] for j in order)
        top = max(votes.values())
        tied = {lab for lab, c in votes.items() if c == top}
        predictions.append(next(labels[j] for j in order if labels[j] in tied))
    classes = sorted(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for true, pred in zip(labels, predictions):
        confusion[index[true], index[pred]] += 1
    accuracy = float(np.mean([t == p for t, p in zip(labels, predictions)]))
    return accuracy, confusion, predictions


def single_linkage(dm, threshold: float) -> Tuple[np.ndarray, List[Tuple[int, int, int, float]]]:
    """Single-linkage merges and the flat clustering at ``threshold``.

    Merges are ``(step, cluster_a, cluster_b, distance)`` with SciPy's id
    convention (leaves ``0..m-1``, the cluster made at step ``s`` is ``m + s``).
    Infinite distances never merge.  Items whose merge distance is at most
    ``threshold`` share a label; labels are numbered by first appearance.
    """
    dm = np.asarray(dm, dtype=np.float64)
    m = len(dm)
    iu, ju = np.triu_indices(m, 1)
    d = dm[iu, ju]
    order = np.lexsort((ju, iu, d))
    parent = list(range(m))
    cluster_id = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merges = []
    flat_parent = list(range(m))

    def flat_find(x):
        while flat_parent[x] != x:
            flat_parent[x] = flat_parent[flat_parent[x]]
            x = flat_parent[x]
        return x

    for e in order:
        if not np.isfinite(d[e]):
            break
        a, b = find(iu[e]), find(ju[e])
        if a == b:
            continue
        ca, cb = sorted((cluster_id[a], cluster_id[b]))
        merges.append((len(merges), ca, cb, float(d[e])))
        parent[b] = a
        cluster_id[a] = m + len(merges) - 1
        if d[e] <= threshold:
            fa, fb = flat_find(iu[e]), flat_find(ju[e])
            flat_parent[fb] = fa
    roots = [flat_find(x) for x in range(m)]
    relabel = {}
    labels = np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=np.int64)
    return labels, merges
