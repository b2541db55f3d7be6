"""Finite-section convergence diagnostics against dense matrix references.

A large Hermitian reference matrix L (n_ref x n_ref) stands in for an
operator; P_n is the projection onto the first n coordinates.  Three probes
quantify how fast the leading principal sections P_n L P_n^* recover
operator-level quantities as n grows:

  * resolvent:  || P_n^* [P_n (L - z) P_n^*]^{-1} P_n v - (L - z)^{-1} v ||_2
  * moments:    | <P_n^* (P_n L P_n^*)^k P_n v, v> - <L^k v, v> |
  * weak:       | int f d mu_{v,n} - int f d mu_v | for test functions f,
                where mu_{v,n} is the spectral measure of the n x n section
                with respect to P_n v, from a dense eigendecomposition.

The reference is itself a truncation of the operator it models, so each
probe also reports a resolution floor: the same gap evaluated at
n = n_ref / 2, i.e. how much the answer still moves between half and full
reference resolution.  Sequence entries below the floor measure the
reference, not the section method.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .matio import format_float


@dataclass(frozen=True)
class ProbeResult:
    """Rows (n, key, gap) plus per-key resolution floors at n_ref/2."""

    rows: tuple[tuple[int, str, float], ...]
    floors: dict[str, float]
    n_ref: int

    def gaps(self, key: str) -> list[tuple[int, float]]:
        return [(n, gap) for n, k, gap in self.rows if k == key]

    def keys(self) -> list[str]:
        seen: dict[str, None] = {}
        for _, k, _ in self.rows:
            seen.setdefault(k)
        return list(seen)

    def to_csv(self, path) -> None:
        lines = ["n,key,gap"]
        for n, key, gap in self.rows:
            lines.append(f"{n},{key},{format_float(gap)}")
        for key, floor in self.floors.items():
            lines.append(f"{self.n_ref // 2},{key}|floor,{format_float(floor)}")
        Path(path).write_text("\n".join(lines) + "\n")


def free_jacobi(n: int) -> np.ndarray:
    """Discrete half-line Laplacian without diagonal: ones on the off-diagonals.

    The spectral measure with respect to e_1 is the semicircle on [-2, 2];
    (L^k)_{11} counts length-k walks on the path graph returning to the
    first vertex (Catalan numbers for even k).
    """
    mat = np.zeros((n, n))
    idx = np.arange(n - 1)
    mat[idx, idx + 1] = 1.0
    mat[idx + 1, idx] = 1.0
    return mat


def _check_reference(reference, v, truncation_sizes):
    ref = np.atleast_2d(np.asarray(reference))
    if ref.shape[0] != ref.shape[1]:
        raise ValueError(f"reference must be square, got {ref.shape}")
    vec = np.asarray(v).ravel()
    if vec.shape[0] != ref.shape[0]:
        raise ValueError(f"vector length {vec.shape[0]} != reference size {ref.shape[0]}")
    sizes = [int(n) for n in truncation_sizes]
    if not sizes:
        raise ValueError("need at least one truncation size")
    if any(n < 1 for n in sizes):
        raise ValueError("truncation sizes must be >= 1")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("truncation sizes must be strictly increasing")
    if sizes[-1] > ref.shape[0]:
        raise ValueError(f"largest truncation {sizes[-1]} exceeds reference size {ref.shape[0]}")
    return ref, vec, sizes


def resolvent_convergence_probe(
    reference,
    v,
    z: complex,
    truncation_sizes: Sequence[int],
) -> ProbeResult:
    """Section-resolvent error against a dense solve on the full reference."""
    ref, vec, sizes = _check_reference(reference, v, truncation_sizes)
    if np.imag(z) == 0:
        raise ValueError("z must have nonzero imaginary part")
    n_ref = ref.shape[0]
    zc = complex(z)

    def section_solution(n: int) -> np.ndarray:
        out = np.zeros(n_ref, dtype=complex)
        out[:n] = np.linalg.solve(
            ref[:n, :n] - zc * np.eye(n), vec[:n].astype(complex)
        )
        return out

    truth = np.linalg.solve(ref - zc * np.eye(n_ref), vec.astype(complex))
    rows = tuple(
        (n, "resolvent", float(np.linalg.norm(section_solution(n) - truth))) for n in sizes
    )
    floor = float(np.linalg.norm(section_solution(n_ref // 2) - truth))
    return ProbeResult(rows=rows, floors={"resolvent": floor}, n_ref=n_ref)


def _section_moments(mat: np.ndarray, vec: np.ndarray, k_max: int) -> np.ndarray:
    """<M^k v, v> for k = 0..k_max via repeated matvec."""
    moments = np.empty(k_max + 1)
    u = vec.astype(complex)
    vc = vec.astype(complex)
    for k in range(k_max + 1):
        moments[k] = np.real(np.vdot(vc, u))
        if k < k_max:
            u = mat @ u
    return moments


def moment_convergence_probe(
    reference,
    v,
    max_moment: int,
    truncation_sizes: Sequence[int],
) -> ProbeResult:
    """Gaps |<P_n^*(P_n L P_n^*)^k P_n v, v> - <L^k v, v>| for k = 0..max_moment."""
    ref, vec, sizes = _check_reference(reference, v, truncation_sizes)
    if max_moment < 0:
        raise ValueError("max_moment must be >= 0")
    n_ref = ref.shape[0]
    truth = _section_moments(ref, vec, max_moment)

    def gaps_at(n: int) -> np.ndarray:
        return np.abs(_section_moments(ref[:n, :n], vec[:n], max_moment) - truth)

    rows = []
    for n in sizes:
        for k, gap in enumerate(gaps_at(n)):
            rows.append((n, f"k={k}", float(gap)))
    floors = {f"k={k}": float(g) for k, g in enumerate(gaps_at(n_ref // 2))}
    return ProbeResult(rows=tuple(rows), floors=floors, n_ref=n_ref)


def _fn_keys(test_fns: Sequence[Callable[[float], float]]) -> list[str]:
    keys = []
    for i, fn in enumerate(test_fns):
        name = getattr(fn, "__name__", "")
        keys.append(name if name and name != "<lambda>" else f"fn{i}")
    if len(set(keys)) != len(keys):
        keys = [f"fn{i}:{k}" for i, k in enumerate(keys)]
    return keys


def weak_convergence_probe(
    reference,
    v,
    test_fns: Sequence[Callable[[float], float]],
    truncation_sizes: Sequence[int],
) -> ProbeResult:
    """Gaps |int f d mu_{v,n} - int f d mu_v| from dense eigendecompositions."""
    ref, vec, sizes = _check_reference(reference, v, truncation_sizes)
    if not test_fns:
        raise ValueError("need at least one test function")
    keys = _fn_keys(test_fns)
    n_ref = ref.shape[0]

    def integrals(n: int) -> np.ndarray:
        evals, evecs = np.linalg.eigh(ref[:n, :n])
        coeffs = np.abs(evecs.conj().T @ vec[:n].astype(complex)) ** 2
        fvals = np.array([[float(fn(lam)) for lam in evals] for fn in test_fns])
        return fvals @ coeffs

    truth = integrals(n_ref)
    rows = []
    for n in sizes:
        for key, gap in zip(keys, np.abs(integrals(n) - truth)):
            rows.append((n, key, float(gap)))
    floors = dict(zip(keys, np.abs(integrals(n_ref // 2) - truth)))
    floors = {k: float(g) for k, g in floors.items()}
    return ProbeResult(rows=tuple(rows), floors=floors, n_ref=n_ref)
