"""Orbit transitions of node groups between consecutive snapshots.

For every k-node set that induces a connected subgraph in a snapshot, the
same nodes are looked up in the next snapshot: either they are still
connected (each member node moves from its old orbit to a new one) or the
group fell apart (counted per source orbit as dissolved). Accumulating
over all consecutive snapshot pairs yields a transition-count matrix per
network, which is then row-normalized and optionally discretized into a
coarse Rare/Common/Frequent fingerprint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .census import build_classification_table, connected_subgraphs, induced_mask, orbit_count
from .graph_core import SnapshotSeries, StaticGraph

FINGERPRINT_LABELS = ("Rare", "Common", "Frequent")

_LOW = 1.0 / 3.0
_HIGH = 2.0 / 3.0


@dataclass(frozen=True)
class OrbitTransitionMatrix:
    """Accumulated orbit-transition counts.

    ``counts[a-1, b-1]`` is the number of node-transitions from orbit a
    to orbit b; ``dissolved[a-1]`` counts node-transitions out of orbit a
    whose group was no longer connected in the next snapshot. Every
    surviving or dissolving group contributes exactly k node-transitions.
    """

    k: int
    counts: np.ndarray  # (m, m) int64
    dissolved: np.ndarray  # (m,) int64
    pairs_processed: int

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    def total_node_transitions(self) -> int:
        return int(self.counts.sum() + self.dissolved.sum())


@dataclass(frozen=True)
class NormalizedTransitionMatrix:
    """Row-stochastic transition matrix (all-zero rows allowed)."""

    k: int
    values: np.ndarray  # (m, m) float64


@dataclass(frozen=True)
class TransitionFingerprint:
    """Coarse per-cell classification of a transition matrix."""

    k: int
    labels: tuple[tuple[str, ...], ...]  # entries from FINGERPRINT_LABELS


def enumerate_transitions(s_from: StaticGraph, s_to: StaticGraph, k: int) -> OrbitTransitionMatrix:
    """Transition counts for one ordered snapshot pair.

    Only groups connected in ``s_from`` contribute (newly formed groups
    have no source orbit); groups that lose connectivity in ``s_to`` land
    in the dissolved counters.
    """
    if s_from.n != s_to.n:
        raise ValueError(
            f"snapshots disagree on node universe ({s_from.n} vs {s_to.n} nodes)"
        )
    table = build_classification_table(k)
    m = orbit_count(k)
    counts = np.zeros((m, m), dtype=np.int64)
    dissolved = np.zeros(m, dtype=np.int64)
    orbits_of = table.orbits_of
    for nodes, mask in connected_subgraphs(s_from, k):
        src = orbits_of[mask]
        dst = orbits_of[induced_mask(s_to, nodes)]
        if dst is None:
            for a in src:
                dissolved[a - 1] += 1
        else:
            for a, b in zip(src, dst):
                counts[a - 1, b - 1] += 1
    return OrbitTransitionMatrix(k=k, counts=counts, dissolved=dissolved, pairs_processed=1)


def accumulate_series(series: SnapshotSeries, k: int) -> OrbitTransitionMatrix:
    """Sum of pairwise transition counts over all consecutive snapshots."""
    if len(series) < 2:
        raise ValueError("need at least 2 snapshots to track transitions")
    m = orbit_count(k)
    counts = np.zeros((m, m), dtype=np.int64)
    dissolved = np.zeros(m, dtype=np.int64)
    for i in range(len(series) - 1):
        pair = enumerate_transitions(series[i], series[i + 1], k)
        counts += pair.counts
        dissolved += pair.dissolved
    return OrbitTransitionMatrix(
        k=k, counts=counts, dissolved=dissolved, pairs_processed=len(series) - 1
    )


def row_normalize(t: OrbitTransitionMatrix) -> NormalizedTransitionMatrix:
    """Divide each row by its sum; rows of an unseen source orbit stay zero.

    Dissolved counts do not enter the denominator — they live outside the
    matrix.
    """
    sums = t.counts.sum(axis=1, keepdims=True)
    values = np.divide(
        t.counts, sums, out=np.zeros_like(t.counts, dtype=np.float64), where=sums > 0
    )
    return NormalizedTransitionMatrix(k=t.k, values=values)


def discretize(nt: NormalizedTransitionMatrix | np.ndarray) -> TransitionFingerprint:
    """Bin each cell into Rare [0,1/3], Common (1/3,2/3] or Frequent (2/3,1]."""
    if isinstance(nt, NormalizedTransitionMatrix):
        k, values = nt.k, nt.values
    else:
        values = np.asarray(nt, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {values.shape}")
        k = {3: 3, 11: 4}.get(values.shape[0], 0)
    if np.any(values < 0.0) or np.any(values > 1.0):
        bad = values[(values < 0.0) | (values > 1.0)].flat[0]
        raise ValueError(f"cell value {bad} outside [0, 1]; normalize or rescale first")
    bins = (values > _LOW).astype(np.int8) + (values > _HIGH).astype(np.int8)
    labels = tuple(
        tuple(FINGERPRINT_LABELS[b] for b in row) for row in bins
    )
    return TransitionFingerprint(k=k, labels=labels)
