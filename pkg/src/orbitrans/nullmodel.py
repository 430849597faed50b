"""Degree-preserving random ensembles for motif significance testing.

A replica is produced by repeated double-edge swaps: pick two edges
(a,b) and (c,d), rewire to (a,d) and (c,b). Swaps that would create a
self-loop or a duplicate edge are rejected, so every replica is a simple
graph with exactly the original degree sequence. Ensemble class
frequencies are the mean graphlet-class counts over many replicas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .census import GRAPHLET_CLASSES, graphlet_class_frequencies
from .graph_core import StaticGraph


@dataclass(frozen=True)
class RandomizationConfig:
    replicates: int = 100
    swaps_per_edge: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.swaps_per_edge < 1:
            raise ValueError("swaps_per_edge must be >= 1")


def degree_preserving_randomize(
    g: StaticGraph,
    rng: np.random.Generator | int,
    swaps_per_edge: int = 10,
) -> StaticGraph:
    """One randomized replica of ``g`` with the same degree sequence.

    Attempts ``swaps_per_edge * |E|`` double-edge swaps; invalid swaps
    are skipped without retry. ``rng`` may be a seed or a Generator
    (advanced in place, so a shared Generator yields a different replica
    per call).
    """
    if g.edge_count < 2:
        raise ValueError("randomization needs at least 2 edges")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    edges = list(g.edges())
    edge_set = set(edges)
    m = len(edges)
    for _ in range(swaps_per_edge * m):
        i = int(rng.integers(m))
        j = int(rng.integers(m))
        flip = int(rng.integers(2))
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if flip:
            c, d = d, c
        # proposed rewiring: (a,b),(c,d) -> (a,d),(c,b)
        if a == d or c == b:
            continue
        new1 = (a, d) if a < d else (d, a)
        new2 = (c, b) if c < b else (b, c)
        if new1 in edge_set or new2 in edge_set:
            continue
        edge_set.remove(edges[i])
        edge_set.remove(edges[j])
        edge_set.add(new1)
        edge_set.add(new2)
        edges[i] = new1
        edges[j] = new2
    return StaticGraph(g.n, edges)


def randomized_replicates(g: StaticGraph, cfg: RandomizationConfig) -> Iterator[StaticGraph]:
    """The ensemble's replicas, in replicate order.

    Replica r draws from a stream seeded by (seed, r), so any subset can
    be regenerated independently and the full set never depends on
    generation order.
    """
    for r in range(cfg.replicates):
        rng = np.random.default_rng([cfg.seed, r])
        yield degree_preserving_randomize(g, rng, cfg.swaps_per_edge)


def ensemble_frequencies(
    g: StaticGraph, cfg: RandomizationConfig, k: int = 4
) -> dict[str, float]:
    """Mean graphlet-class counts over the randomized ensemble."""
    order = [c.name for c in GRAPHLET_CLASSES[k]]
    totals = np.zeros(len(order))
    for replica in randomized_replicates(g, cfg):
        counts = graphlet_class_frequencies(replica, k)
        totals += [counts[name] for name in order]
    means = totals / cfg.replicates
    return {name: float(mean) for name, mean in zip(order, means)}
