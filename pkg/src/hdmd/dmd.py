"""Gram/correlation assembly, EDMD, and Hermitian DMD operators.

From feature matrices and quadrature weights we form

    G = Psi_X^* W Psi_X     (Hermitian PSD Gram matrix),
    A = Psi_X^* W Psi_Y     (correlation with the propagated dictionary),

whose entries are discrete approximations of <psi_k, psi_j> and
<K psi_k, psi_j>.  The unconstrained least-squares (EDMD) operator is
K = G^+ A.  Constraining K to be self-adjoint in the G-inner-product
(G K = K^* G) yields the Hermitian DMD operator

    K = G^{-1} (A + A^*) / 2,

the minimizer of || W^{1/2} Psi_Y G^{-1/2} - W^{1/2} Psi_X K G^{-1/2} ||_F
over G-Hermitian K, equivalent to a symmetric Procrustes problem whose
general solution (Higham, 1988) is also provided here.

Ill-conditioned G is handled by one spectral cutoff: eigenvalues of G below
rel_tol * lambda_max are discarded and all subsequent algebra is restricted
to the retained eigenspace.  This avoids explicit G^{-1/2}, which is
unstable for ill-conditioned G.  Under truncation the Hermitian solve
compresses (A + A^*)/2 onto the retained subspace as well, which is what
keeps G K = K^* G true at roundoff level; at full rank this reduces to the
plain formula above.

Assembly sums over snapshots in fixed 4096-row blocks combined by a fixed
pairwise tree, so results are bitwise reproducible for any thread count.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionary import FeatureMatrices
from .quadrature import QuadratureRule

logger = logging.getLogger("hdmd")

_BLOCK_ROWS = 4096


class KoopmanKind(enum.Enum):
    EDMD = "edmd"
    HERMITIAN_DMD = "hermitian_dmd"


@dataclass(frozen=True)
class GramPair:
    """G and A plus the retained eigenspace of G.

    basis (N x r) holds orthonormal eigenvectors of G for the retained
    eigenvalues basis_eigenvalues (ascending, all > g_eigen_floor where
    g_eigen_floor = rel_tol * lambda_max).  retained_rank == r.
    """

    g: np.ndarray
    a: np.ndarray
    g_eigen_floor: float
    retained_rank: int
    basis: np.ndarray
    basis_eigenvalues: np.ndarray

    @property
    def size(self) -> int:
        return self.g.shape[0]

    @property
    def rank_deficient(self) -> bool:
        return self.retained_rank < self.size

    def hermitian_part_of_a(self) -> np.ndarray:
        return 0.5 * (self.a + self.a.conj().T)

    def gram_residual(self) -> float:
        """Relative departure of G from Hermitian symmetry."""
        gk = np.linalg.norm(self.g - self.g.conj().T)
        return float(gk / max(1.0, np.linalg.norm(self.g)))


@dataclass(frozen=True)
class KoopmanMatrix:
    k: np.ndarray
    kind: KoopmanKind
    source: GramPair

    def hermiticity_residual(self) -> float:
        """||G K - K^* G||_F / max(1, ||G K||_F)."""
        gk = self.source.g @ self.k
        return float(np.linalg.norm(gk - gk.conj().T) / max(1.0, np.linalg.norm(gk)))


@dataclass(frozen=True)
class KoopmanEig:
    """Real eigenvalues (ascending) with G-orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gram: GramPair

    def orthonormality_residual(self) -> float:
        vgv = self.eigenvectors.conj().T @ self.gram.g @ self.eigenvectors
        return float(np.max(np.abs(vgv - np.eye(vgv.shape[0]))))


def _tree_reduce(parts: list[np.ndarray]) -> np.ndarray:
    """Pairwise sum in index order; the reduction shape is fixed by len(parts)."""
    while len(parts) > 1:
        parts = [
            parts[i] + parts[i + 1] if i + 1 < len(parts) else parts[i]
            for i in range(0, len(parts), 2)
        ]
    return parts[0]


def assemble_gram_pair(
    features: FeatureMatrices,
    quad: QuadratureRule,
    rank_tolerance: Optional[float] = None,
    threads: int = 1,
) -> GramPair:
    """Form G = Psi_X^* W Psi_X and A = Psi_X^* W Psi_Y as weighted snapshot sums.

    G is symmetrized as (G + G^*)/2 after assembly and eigendecomposed once;
    eigenvalues at or below rank_tolerance * lambda_max are dropped and the
    retained eigenspace is cached for every downstream solve.  Effective rank
    deficiency is reported as a warning, not a failure.
    """
    if features.snapshot_count != quad.size:
        raise ValueError(
            f"feature rows ({features.snapshot_count}) != quadrature nodes ({quad.size})"
        )
    tol = features.rank_tolerance_used if rank_tolerance is None else float(rank_tolerance)

    psi_x, psi_y, w = features.psi_x, features.psi_y, quad.weights
    blocks = range(0, quad.size, _BLOCK_ROWS)

    def partial(start: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(start, start + _BLOCK_ROWS)
        xw = psi_x[sl].conj().T * w[sl]
        return xw @ psi_x[sl], xw @ psi_y[sl]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(partial, blocks))
    else:
        parts = [partial(s) for s in blocks]

    g = _tree_reduce([p[0] for p in parts])
    a = _tree_reduce([p[1] for p in parts])
    g = 0.5 * (g + g.conj().T)

    eigvals, eigvecs = np.linalg.eigh(g)
    floor = tol * max(eigvals[-1], 0.0)
    keep = eigvals > floor
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        raise ValueError("Gram matrix has no eigenvalue above the truncation floor")
    if rank < g.shape[0]:
        logger.warning(
            "Gram matrix numerically rank deficient: retained %d of %d directions "
            "(floor %.3e)", rank, g.shape[0], floor,
        )

    for arr in (g, a):
        arr.setflags(write=False)
    return GramPair(
        g=g,
        a=a,
        g_eigen_floor=float(floor),
        retained_rank=rank,
        basis=eigvecs[:, keep],
        basis_eigenvalues=eigvals[keep],
    )


def edmd(pair: GramPair) -> KoopmanMatrix:
    """Unconstrained least-squares operator K = G^+ A (spectral-cutoff pseudoinverse)."""
    q, lam = pair.basis, pair.basis_eigenvalues
    k = q @ ((q.conj().T @ pair.a) / lam[:, None])
    return KoopmanMatrix(k=k, kind=KoopmanKind.EDMD, source=pair)


def hermitian_dmd(pair: GramPair) -> KoopmanMatrix:
    """G-Hermitian operator solving G K = (A + A^*)/2 on the retained subspace.

    With Q, Lambda the retained eigenpairs of G and B = (A + A^*)/2,

        K = Q Lambda^{-1} (Q^* B Q) Q^*,

    which equals G^{-1} B at full rank and satisfies G K = K^* G to roundoff
    in every case.
    """
    q, lam = pair.basis, pair.basis_eigenvalues
    b_proj = q.conj().T @ pair.hermitian_part_of_a() @ q
    b_proj = 0.5 * (b_proj + b_proj.conj().T)
    k = q @ (b_proj / lam[:, None]) @ q.conj().T
    return KoopmanMatrix(k=k, kind=KoopmanKind.HERMITIAN_DMD, source=pair)


def symmetric_procrustes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hermitian M minimizing ||Y - X M||_F (Higham's SVD formula).

    With X = U Sigma V^*, C = U^* Y V and singular values sigma_i (padded
    with zeros past rank), the minimizer is M = V Upsilon V^* where

        Upsilon_ij = (sigma_i C_ij + sigma_j conj(C_ji)) / (sigma_i^2 + sigma_j^2)

    and Upsilon_ij = 0 whenever sigma_i^2 + sigma_j^2 = 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    y = np.atleast_2d(np.asarray(y, dtype=complex))
    if x.shape != y.shape:
        raise ValueError(f"x and y shapes differ: {x.shape} vs {y.shape}")
    if not np.any(x):
        raise ValueError("x must be nonzero")
    n = x.shape[1]
    # tall case: economy SVD already gives the full N x N right factor;
    # wide case: full SVD, with sigma and C zero-padded past rank
    u, s, vh = np.linalg.svd(x, full_matrices=x.shape[0] < n)
    v = vh.conj().T
    sig = np.zeros(n)
    sig[: s.shape[0]] = s
    c = np.zeros((n, n), dtype=complex)
    c_rows = u.conj().T @ y @ v
    take = min(c_rows.shape[0], n)
    c[:take, :] = c_rows[:take, :]
    denom = sig[:, None] ** 2 + sig[None, :] ** 2
    numer = sig[:, None] * c + sig[None, :] * c.conj().T
    ups = np.divide(numer, denom, out=np.zeros_like(c), where=denom > 0)
    m = v @ ups @ v.conj().T
    return 0.5 * (m + m.conj().T)


def eigendecompose(k: KoopmanMatrix) -> KoopmanEig:
    """Eigenpairs of the generalized problem ((A+A^*)/2) v = lambda G v.

    Restricted to the retained eigenspace of G: with Q, Lambda retained and
    B = (A+A^*)/2, the Hermitian whitened matrix
    Lambda^{-1/2} Q^* B Q Lambda^{-1/2} is diagonalized and eigenvectors are
    mapped back through Q Lambda^{-1/2}, which makes them G-orthonormal by
    construction.  Eigenvalues are real ascending; each eigenvector's phase
    is fixed so its largest-modulus entry is real positive.
    """
    if k.kind is not KoopmanKind.HERMITIAN_DMD:
        raise ValueError(f"eigendecompose requires a Hermitian DMD operator, got kind={k.kind.value}")
    pair = k.source
    if pair.retained_rank == 0:
        raise ValueError("retained rank is zero; nothing to decompose")
    q, lam = pair.basis, pair.basis_eigenvalues
    rootlam = np.sqrt(lam)
    b_w = (q.conj().T @ pair.hermitian_part_of_a() @ q) / rootlam[:, None] / rootlam[None, :]
    b_w = 0.5 * (b_w + b_w.conj().T)
    theta, u = np.linalg.eigh(b_w)
    vectors = q @ (u / rootlam[:, None])

    # phase convention: largest-modulus entry real positive
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    phase = np.where(np.abs(lead) > 0, lead / np.abs(lead), 1.0)
    vectors = vectors / phase[None, :]

    return KoopmanEig(eigenvalues=theta, eigenvectors=vectors, gram=pair)
