"""Quadrature rules that discretize L2 inner products over the state space.

A rule is a set of nodes x^(m) in R^d with strictly positive weights w_m,
representing the discrete measure

    omega_M = sum_m w_m * delta_{x^(m)},

so that integrals become weighted sums:  int f d(omega_M) = sum_m w_m f(x^(m)).
The weight matrix W = diag(w_1, ..., w_M) used downstream is never formed
explicitly; weights are kept as a vector.

Summation over nodes is done in a fixed block order (see `hdmd.dmd`), so
results are reproducible independent of the parallelism degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .matio import format_float

Box = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (M, d) and positive weights (M,) of a discrete measure."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        if nodes.shape[0] != weights.shape[0]:
            raise ValueError(
                f"node/weight count mismatch: {nodes.shape[0]} vs {weights.shape[0]}"
            )
        if weights.size < 1:
            raise ValueError("a quadrature rule needs at least one node")
        if not np.all(weights > 0):
            raise ValueError("all quadrature weights must be strictly positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def to_csv(self, path) -> None:
        """Write the rule as CSV with columns x1,...,xd,w and one header line."""
        header = ",".join(f"x{k + 1}" for k in range(self.dimension)) + ",w"
        lines = [header]
        for node, w in zip(self.nodes, self.weights):
            lines.append(",".join(format_float(c) for c in node) + f",{format_float(w)}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "QuadratureRule":
        text = Path(path).read_text().strip()
        if not text:
            raise ValueError(f"{path}: empty quadrature CSV")
        lines = text.splitlines()
        ncols = len(lines[0].split(","))
        if ncols < 2:
            raise ValueError(f"{path}: expected at least one coordinate column plus weights")
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != ncols:
                raise ValueError(f"{path}: line {lineno}: expected {ncols} fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
        data = np.array(rows, dtype=float)
        return cls(nodes=data[:, :-1], weights=data[:, -1])


def _check_box(domain: Box) -> list[tuple[float, float]]:
    box = [(float(a), float(b)) for a, b in domain]
    if not box:
        raise ValueError("domain box must have at least one axis")
    for k, (a, b) in enumerate(box):
        if not b > a:
            raise ValueError(f"axis {k}: box [{a}, {b}] is empty or inverted")
    return box


def tensor_trapezoid(domain: Box, points_per_axis: Sequence[int]) -> QuadratureRule:
    """Tensor-product trapezoidal rule on an axis-aligned box.

    Per axis the 1-D rule uses n >= 2 equispaced points including both
    endpoints; interior weights equal the spacing h, boundary weights h/2.
    Tensor weights are products of the 1-D factors, so the total mass is
    the box volume (up to roundoff).  Nodes are ordered row-major with the
    last axis varying fastest.
    """
    box = _check_box(domain)
    counts = [int(n) for n in points_per_axis]
    if len(counts) != len(box):
        raise ValueError(f"got {len(counts)} point counts for a {len(box)}-axis box")
    for k, n in enumerate(counts):
        if n < 2:
            raise ValueError(f"axis {k}: trapezoid rule needs at least 2 points, got {n}")

    axes, axis_weights = [], []
    for (a, b), n in zip(box, counts):
        pts = np.linspace(a, b, n)
        h = (b - a) / (n - 1)
        w = np.full(n, h)
        w[0] *= 0.5
        w[-1] *= 0.5
        axes.append(pts)
        axis_weights.append(w)

    grids = np.meshgrid(*axes, indexing="ij")
    nodes = np.column_stack([g.ravel() for g in grids])
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    weights = wgrids[0].ravel().copy()
    for wg in wgrids[1:]:
        weights *= wg.ravel()
    return QuadratureRule(nodes=nodes, weights=weights)


def monte_carlo(samples, total_mass: float) -> QuadratureRule:
    """Equal-weight rule over sample points; each weight is total_mass / M."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.shape[0] < 1:
        raise ValueError("need at least one sample point")
    if not total_mass > 0:
        raise ValueError(f"total_mass must be positive, got {total_mass}")
    weights = np.full(pts.shape[0], float(total_mass) / pts.shape[0])
    return QuadratureRule(nodes=pts, weights=weights)
