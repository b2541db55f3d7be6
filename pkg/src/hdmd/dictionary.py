"""Dictionaries of observables and their evaluation on snapshot data.

A dictionary is a feature map Psi: R^d -> C^{1xN} collecting N observables
psi_1, ..., psi_N.  Evaluating it at snapshot inputs {x^(m)} and outputs
{y^(m)} gives the feature matrices

    Psi_X[m, :] = Psi(x^(m)),    Psi_Y[m, :] = Psi(y^(m)),

both M x N.  Evaluators are pure closed-form functions: matrices are
materialized once (M*N can reach ~90000 x 400, which fits in memory, while
re-evaluation is wasteful).  Block and single-point evaluation share the
same arithmetic, so rows are bitwise independent of how they were produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import matio

# Relative spectral cutoff applied to the Gram matrix downstream; carried on
# FeatureMatrices so one pipeline setting reaches every consumer.
DEFAULT_RANK_TOLERANCE = 1e-12

# Rows per evaluation block; fixed so block boundaries never depend on the
# caller or on parallelism.
_BLOCK_ROWS = 4096


@dataclass(frozen=True)
class Dictionary:
    """Feature map with a known output length and input dimension."""

    size: int
    dimension: int
    point_evaluator: Callable[[np.ndarray], np.ndarray]
    block_evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, point) -> np.ndarray:
        """Evaluate at a single d-dimensional point, returning a length-N row."""
        p = np.asarray(point, dtype=float).ravel()
        if p.shape[0] != self.dimension:
            raise ValueError(f"point has dimension {p.shape[0]}, dictionary expects {self.dimension}")
        row = np.asarray(self.point_evaluator(p), dtype=complex).ravel()
        if row.shape[0] != self.size:
            raise ValueError(f"evaluator returned {row.shape[0]} values, expected {self.size}")
        return row

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an (M, d) block of points, returning the M x N matrix."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dimension:
            raise ValueError(f"points have dimension {pts.shape[1]}, dictionary expects {self.dimension}")
        out = np.empty((pts.shape[0], self.size), dtype=complex)
        for start in range(0, pts.shape[0], _BLOCK_ROWS):
            chunk = pts[start : start + _BLOCK_ROWS]
            if self.block_evaluator is not None:
                out[start : start + chunk.shape[0]] = self.block_evaluator(chunk)
            else:
                for i, p in enumerate(chunk):
                    out[start + i] = self.point_evaluator(p)
        return out


@dataclass(frozen=True)
class FeatureMatrices:
    """Dictionary evaluations at snapshot inputs (psi_x) and outputs (psi_y)."""

    psi_x: np.ndarray
    psi_y: np.ndarray
    rank_tolerance_used: float = DEFAULT_RANK_TOLERANCE

    def __post_init__(self):
        px = np.atleast_2d(np.asarray(self.psi_x, dtype=complex))
        py = np.atleast_2d(np.asarray(self.psi_y, dtype=complex))
        if px.shape != py.shape:
            raise ValueError(f"psi_x and psi_y shapes differ: {px.shape} vs {py.shape}")
        if self.rank_tolerance_used < 0:
            raise ValueError("rank_tolerance_used must be nonnegative")
        px.setflags(write=False)
        py.setflags(write=False)
        object.__setattr__(self, "psi_x", px)
        object.__setattr__(self, "psi_y", py)

    @property
    def snapshot_count(self) -> int:
        return self.psi_x.shape[0]

    @property
    def dictionary_size(self) -> int:
        return self.psi_x.shape[1]

    def to_csv(self, x_path, y_path) -> None:
        """Debugging export; complex entries become re/im column pairs."""
        matio.write_complex_csv(self.psi_x, x_path)
        matio.write_complex_csv(self.psi_y, y_path)


def gaussian_centers(centers_box, per_axis: int) -> np.ndarray:
    """Uniform tensor grid of centers, endpoints included when per_axis >= 2.

    With per_axis == 1 the single center sits at the box midpoint.  Ordering
    is row-major with the last axis fastest, matching the quadrature grids.
    """
    if per_axis < 1:
        raise ValueError(f"per_axis must be >= 1, got {per_axis}")
    axes = []
    for a, b in centers_box:
        a, b = float(a), float(b)
        if b < a:
            raise ValueError(f"center box [{a}, {b}] is inverted")
        axes.append(np.array([0.5 * (a + b)]) if per_axis == 1 else np.linspace(a, b, per_axis))
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in grids])


def gaussian_grid_dictionary(centers_box, per_axis: int, width: float, amplitude: complex) -> Dictionary:
    """Dictionary of N = per_axis^d Gaussian bumps on a uniform center grid.

    Each observable is psi_j(x) = amplitude * exp(-width * |x - c_j|^2).
    """
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    centers = gaussian_centers(centers_box, per_axis)
    centers.setflags(write=False)
    amp = complex(amplitude)
    a = float(width)
    dim = centers.shape[1]

    def point_eval(p: np.ndarray) -> np.ndarray:
        d2 = np.sum((p[None, :] - centers) ** 2, axis=1)
        return amp * np.exp(-a * d2)

    def block_eval(pts: np.ndarray) -> np.ndarray:
        d2 = np.sum((pts[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        return amp * np.exp(-a * d2)

    return Dictionary(
        size=centers.shape[0],
        dimension=dim,
        point_evaluator=point_eval,
        block_evaluator=block_eval,
    )


def evaluate_snapshots(
    dictionary: Dictionary,
    x_nodes,
    y_nodes,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> FeatureMatrices:
    """Materialize Psi_X and Psi_Y from snapshot input/output points."""
    x = np.atleast_2d(np.asarray(x_nodes, dtype=float))
    y = np.atleast_2d(np.asarray(y_nodes, dtype=float))
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"snapshot counts differ: {x.shape[0]} inputs vs {y.shape[0]} outputs")
    if x.shape[1] != dictionary.dimension or y.shape[1] != dictionary.dimension:
        raise ValueError(
            f"snapshot dimension {x.shape[1]}/{y.shape[1]} does not match "
            f"dictionary domain dimension {dictionary.dimension}"
        )
    return FeatureMatrices(
        psi_x=dictionary.evaluate(x),
        psi_y=dictionary.evaluate(y),
        rank_tolerance_used=rank_tolerance,
    )


def evaluate_function_samples(points, g) -> np.ndarray:
    """Sample a scalar observable at quadrature nodes: entry m is g(x^(m)).

    `g` may be vectorized over an (M, d) array or accept single points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    try:
        vals = np.asarray(g(pts))
        if vals.shape == (pts.shape[0],):
            return vals.astype(complex)
    except Exception:
        pass
    return np.array([complex(g(p)) for p in pts], dtype=complex)
