"""Core graph data types and shared utilities.

An observed network is a symmetric ``n x n`` weight matrix with zero
diagonal (:class:`AdjacencyMatrix`); a group of networks over a common node
set is a :class:`GraphSample`.  This module also provides validation of raw
matrices, absolute-value thresholding to binary graphs, five-number
summaries, and the adjacency CSV format used by the CLI.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetryError,
    DimensionMismatchError,
    EmptyInputError,
    NonFiniteEntryError,
    NonSquareError,
)


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """One observed graph: symmetric weights, zero diagonal, finite entries.

    Instances are immutable; the weight array is marked read-only.  Use
    :func:`validate_adjacency` to build one from untrusted input.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise NonSquareError(f"expected a square matrix, got shape {w.shape}")
        if w.shape[0] < 2:
            raise NonSquareError("a graph needs at least 2 nodes")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class GraphSample:
    """An ordered i.i.d. sample of graphs over a common node set."""

    graphs: tuple[AdjacencyMatrix, ...]

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if not graphs:
            raise EmptyInputError("a graph sample needs at least one graph")
        n0 = graphs[0].n
        for k, g in enumerate(graphs):
            if g.n != n0:
                raise DimensionMismatchError(
                    f"graph {k} has {g.n} nodes, expected {n0}"
                )
        object.__setattr__(self, "graphs", graphs)

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def m(self) -> int:
        return len(self.graphs)

    def stacked(self) -> np.ndarray:
        """Weights as an ``(m, n, n)`` array."""
        return np.stack([g.weights for g in self.graphs])


@dataclass(frozen=True)
class FiveNumberSummary:
    """Minimum, quartiles, and maximum of a batch of statistics."""

    min: float
    q1: float
    median: float
    q3: float
    max: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.min, self.q1, self.median, self.q3, self.max)


def validate_adjacency(raw, tolerance: float = 1e-9) -> AdjacencyMatrix:
    """Validate a raw square array and repair benign asymmetry.

    Entries must be finite.  Off-diagonal pairs that differ by at most
    ``tolerance`` are averaged (round-off repair); larger differences raise
    :class:`AsymmetryError` naming the first offending pair.  The diagonal
    is forced to exactly zero.
    """
    w = np.array(raw, dtype=np.float64, copy=True)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {w.shape}")
    if w.shape[0] < 2:
        raise NonSquareError("a graph needs at least 2 nodes")

    bad = ~np.isfinite(w)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFiniteEntryError(int(i), int(j), float(w[i, j]))

    gap = np.abs(w - w.T)
    worst = float(gap.max())
    if worst > tolerance:
        i, j = np.argwhere(gap == worst)[0]
        if i > j:
            i, j = j, i
        raise AsymmetryError(int(i), int(j), worst)

    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return AdjacencyMatrix(w)


def threshold_binarize(graph: AdjacencyMatrix, tau: float) -> AdjacencyMatrix:
    """Binarize by absolute weight: 1 where ``|w| > tau``, else 0.

    The comparison is strict, so weights exactly at ``tau`` map to 0; ties
    at the threshold do occur with rank-transformed correlation weights.
    """
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"threshold must be a finite non-negative real, got {tau!r}")
    out = (np.abs(graph.weights) > tau).astype(np.float64)
    return AdjacencyMatrix(out)


def five_number_summary(values) -> FiveNumberSummary:
    """Five-number summary with quartiles linearly interpolated between
    order statistics (median of an even-length batch is the central midpoint).
    """
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=np.float64)
    if v.size == 0:
        raise EmptyInputError("five_number_summary needs at least one value")
    if not np.isfinite(v).all():
        raise ValueError("five_number_summary requires finite values")
    lo, q1, med, q3, hi = np.percentile(v, [0, 25, 50, 75, 100])
    return FiveNumberSummary(float(lo), float(q1), float(med), float(q3), float(hi))


def load_adjacency_csv(path, tolerance: float = 1e-9) -> AdjacencyMatrix:
    """Read one adjacency CSV: n lines of n comma-separated floats, no header."""
    raw = np.loadtxt(os.fspath(path), delimiter=",", ndmin=2)
    return validate_adjacency(raw, tolerance)


def save_adjacency_csv(graph: AdjacencyMatrix, path) -> None:
    """Write the CSV form read back by :func:`load_adjacency_csv`."""
    np.savetxt(os.fspath(path), graph.weights, delimiter=",", fmt="%.17g", newline="\n")
