"""Pairwise network comparison metrics and hierarchical grouping.

Three comparison routes ship here:

* GDA — agreement between graphlet-degree distributions, one score per
  orbit averaged into a single value in [0, 1];
* OTA — agreement between orbit-transition matrices, after per-cell
  rescaling relative to the whole network set;
* motif-fingerprint distance — Euclidean distance between normalized
  over/under-representation scores of the graphlet classes versus a
  degree-preserving random ensemble.

Agreement matrices can be turned into a merge tree with a small
deterministic agglomerative clusterer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .census import (
    GRAPHLET_CLASSES,
    GraphletDegreeDistribution,
    graphlet_class_frequencies,
)
from .graph_core import StaticGraph
from .transitions import NormalizedTransitionMatrix, OrbitTransitionMatrix, row_normalize

OtaScaling = Literal["normalized", "per_orbit"]
GddScaling = Literal["inverse_k", "plain"]
Linkage = Literal["average", "single", "complete"]


@dataclass(frozen=True)
class AgreementConfig:
    """Knobs for the agreement computations.

    ``ota_scaling="normalized"`` divides the OTA sum by |O|^2 so identical
    matrices score 1; ``"per_orbit"`` divides by |O| only, so identical 11x11
    matrices score 11. ``use_relative_rescale`` switches the per-cell
    min/max rescaling across the network set. ``gdd_scaling`` picks the
    degree-distribution normalization used for GDA inputs.
    """

    ota_scaling: OtaScaling = "normalized"
    use_relative_rescale: bool = True
    gdd_scaling: GddScaling = "inverse_k"


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric pairwise scores over a named network set."""

    names: tuple[str, ...]
    values: np.ndarray  # (N, N) float64
    kind: Literal["OTA", "GDA", "MotifDistance"]


@dataclass(frozen=True)
class MotifFingerprint:
    """Unit-norm vector of per-class over/under-representation scores."""

    k: int
    class_names: tuple[str, ...]
    scores: np.ndarray  # (#classes,) float64


def gda_orbit_scores(
    gdd_a: GraphletDegreeDistribution, gdd_b: GraphletDegreeDistribution
) -> list[float]:
    """Per-orbit agreement between two degree distributions.

    Each score is 1 - sqrt(sum of squared differences)/sqrt(2); two
    distributions with disjoint support score 0, identical ones score 1.
    Orbits untouched in both networks agree perfectly (empty = empty).
    """
    if gdd_a.k != gdd_b.k:
        raise ValueError(f"orbit sets differ (k={gdd_a.k} vs k={gdd_b.k})")
    scores = []
    for dist_a, dist_b in zip(gdd_a.normalized, gdd_b.normalized):
        sq = 0.0
        for d in dist_a.keys() | dist_b.keys():
            diff = dist_a.get(d, 0.0) - dist_b.get(d, 0.0)
            sq += diff * diff
        scores.append(1.0 - math.sqrt(sq) / math.sqrt(2.0))
    return scores


def gda_pair(gdd_a: GraphletDegreeDistribution, gdd_b: GraphletDegreeDistribution) -> float:
    """Mean per-orbit agreement; lies in [0, 1]."""
    scores = gda_orbit_scores(gdd_a, gdd_b)
    return sum(scores) / len(scores)


def gda_matrix(
    names: Sequence[str],
    gdds: Sequence[Sequence[GraphletDegreeDistribution]],
) -> SimilarityMatrix:
    """All-pairs GDA over a network set.

    ``gdds[i]`` holds one or more degree distributions for network i
    (e.g. the 4-node orbits alone, or 3- and 4-node together); per-orbit
    scores are pooled across them before averaging.
    """
    if len(names) != len(gdds):
        raise ValueError("one GDD bundle required per network name")
    if len(names) < 2:
        raise ValueError("need at least 2 networks to compare")
    n = len(names)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pooled: list[float] = []
            for a, b in zip(gdds[i], gdds[j]):
                pooled.extend(gda_orbit_scores(a, b))
            values[i, j] = values[j, i] = sum(pooled) / len(pooled)
    return SimilarityMatrix(names=tuple(names), values=values, kind="GDA")


def relative_rescale(matrices: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Rescale each cell to [0, 1] relative to its spread across the set.

    Cells with no spread (identical in every network) map to 0 — they
    carry no discriminative signal.
    """
    if len(matrices) < 2:
        raise ValueError("need at least 2 networks to rescale")
    stack = np.stack([np.asarray(m, dtype=np.float64) for m in matrices])
    lo = stack.min(axis=0)
    span = stack.max(axis=0) - lo
    out = np.divide(stack - lo, span, out=np.zeros_like(stack), where=span > 0)
    return [out[i] for i in range(len(matrices))]


def ota_pair(m1: np.ndarray, m2: np.ndarray, cfg: AgreementConfig | None = None) -> float:
    """Orbit-transition agreement between two (rescaled) matrices."""
    cfg = cfg or AgreementConfig()
    m1 = np.asarray(m1, dtype=np.float64)
    m2 = np.asarray(m2, dtype=np.float64)
    if m1.shape != m2.shape:
        raise ValueError(f"matrix shapes differ: {m1.shape} vs {m2.shape}")
    total = np.sum(1.0 - np.abs(m1 - m2))
    n_orbits = m1.shape[0]
    if cfg.ota_scaling == "per_orbit":
        return float(total / n_orbits)
    return float(total / n_orbits**2)


def ota_matrix(
    names: Sequence[str],
    transition_matrices: Sequence[OrbitTransitionMatrix],
    cfg: AgreementConfig | None = None,
) -> SimilarityMatrix:
    """All-pairs OTA: row-normalize, rescale across the set, compare."""
    cfg = cfg or AgreementConfig()
    if len(names) != len(transition_matrices):
        raise ValueError("one transition matrix required per network name")
    if len(names) < 2:
        raise ValueError("need at least 2 networks to compare")
    normalized = [row_normalize(t).values for t in transition_matrices]
    if cfg.use_relative_rescale:
        normalized = relative_rescale(normalized)
    n = len(names)
    values = np.zeros((n, n))
    for i in range(n):
        values[i, i] = ota_pair(normalized[i], normalized[i], cfg)
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = ota_pair(normalized[i], normalized[j], cfg)
    return SimilarityMatrix(names=tuple(names), values=values, kind="OTA")


def motif_scores_from_counts(
    real_counts: Sequence[int],
    ensemble_means: Sequence[float],
    k: int = 4,
) -> MotifFingerprint:
    """Fingerprint from per-class counts and ensemble means, canonical order."""
    classes = GRAPHLET_CLASSES[k]
    if len(real_counts) != len(classes) or len(ensemble_means) != len(classes):
        raise ValueError(f"expected {len(classes)} class entries for k={k}")
    deltas = np.zeros(len(classes))
    for i, (fr, mean) in enumerate(zip(real_counts, ensemble_means)):
        denom = fr + mean
        if denom > 0:
            deltas[i] = (fr - mean) / denom
    norm = np.linalg.norm(deltas)
    if norm > 0:
        deltas /= norm
    return MotifFingerprint(
        k=k, class_names=tuple(c.name for c in classes), scores=deltas
    )


def motif_scores(
    real: StaticGraph, ensemble_means: dict[str, float], k: int = 4
) -> MotifFingerprint:
    """Over/under-representation of each graphlet class versus an ensemble.

    Each raw score is (observed - expected)/(observed + expected), zero
    when both are zero; the vector is then scaled to unit Euclidean norm
    (skipped if every score is zero).
    """
    real_counts = graphlet_class_frequencies(real, k)
    order = [c.name for c in GRAPHLET_CLASSES[k]]
    return motif_scores_from_counts(
        [real_counts[name] for name in order],
        [ensemble_means[name] for name in order],
        k,
    )


def fingerprint_distance(f1: MotifFingerprint, f2: MotifFingerprint) -> float:
    """Euclidean distance between two motif fingerprints."""
    if f1.class_names != f2.class_names:
        raise ValueError("fingerprints cover different class sets")
    return float(np.linalg.norm(f1.scores - f2.scores))


def motif_distance_matrix(
    names: Sequence[str], fingerprints: Sequence[MotifFingerprint]
) -> SimilarityMatrix:
    """All-pairs Euclidean distances between motif fingerprints."""
    if len(names) != len(fingerprints):
        raise ValueError("one fingerprint required per network name")
    if len(names) < 2:
        raise ValueError("need at least 2 networks to compare")
    n = len(names)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = fingerprint_distance(
                fingerprints[i], fingerprints[j]
            )
    return SimilarityMatrix(names=tuple(names), values=values, kind="MotifDistance")


@dataclass(frozen=True)
class MergeStep:
    """One agglomeration: the two merged clusters (member names, sorted)."""

    left: tuple[str, ...]
    right: tuple[str, ...]
    height: float


def hierarchical_cluster(sim: SimilarityMatrix, linkage: Linkage = "average") -> list[MergeStep]:
    """Agglomerative merge sequence for a similarity/distance matrix.

    Agreement kinds (OTA/GDA) are converted to distances as 1 - value;
    distance kinds are used as-is. Cluster distances are computed from
    the original pairwise matrix (average, single or complete linkage).
    Ties are broken by the lexicographic pair of smallest member labels,
    so the tree is deterministic.
    """
    if linkage not in ("average", "single", "complete"):
        raise ValueError(f"unknown linkage {linkage!r}")
    n = len(sim.names)
    if n < 2:
        raise ValueError("need at least 2 networks to cluster")
    if sim.kind == "MotifDistance":
        dist = np.asarray(sim.values, dtype=np.float64)
    else:
        dist = 1.0 - np.asarray(sim.values, dtype=np.float64)

    clusters: list[set[int]] = [{i} for i in range(n)]
    merges: list[MergeStep] = []

    def cluster_distance(a: set[int], b: set[int]) -> float:
        cross = dist[np.ix_(sorted(a), sorted(b))]
        if linkage == "single":
            return float(cross.min())
        if linkage == "complete":
            return float(cross.max())
        return float(cross.mean())

    def min_label(c: set[int]) -> str:
        return min(sim.names[i] for i in c)

    while len(clusters) > 1:
        best = None
        best_key = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = cluster_distance(clusters[i], clusters[j])
                labels = sorted((min_label(clusters[i]), min_label(clusters[j])))
                key = (d, labels[0], labels[1])
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        assert best is not None and best_key is not None
        i, j = best
        a, b = clusters[i], clusters[j]
        left_names = tuple(sorted(sim.names[x] for x in a))
        right_names = tuple(sorted(sim.names[x] for x in b))
        if min(left_names) > min(right_names):
            left_names, right_names = right_names, left_names
        merges.append(MergeStep(left=left_names, right=right_names, height=best_key[0]))
        clusters = [c for idx, c in enumerate(clusters) if idx not in (i, j)]
        clusters.append(a | b)
    return merges


def cut_clusters(names: Sequence[str], merges: Sequence[MergeStep], n_clusters: int) -> list[tuple[str, ...]]:
    """Partition obtained by replaying merges until ``n_clusters`` remain.

    Returns sorted member tuples, sorted by first member.
    """
    if not 1 <= n_clusters <= len(names):
        raise ValueError(f"cannot cut {len(names)} items into {n_clusters} clusters")
    parts: list[set[str]] = [{name} for name in names]
    for step in merges:
        if len(parts) == n_clusters:
            break
        merged = set(step.left) | set(step.right)
        parts = [p for p in parts if not p & merged]
        parts.append(merged)
    return sorted(tuple(sorted(p)) for p in parts)
