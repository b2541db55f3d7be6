"""Tests for the finite-section convergence probes."""

import numpy as np
import pytest

from hdmd.probes import (
    free_jacobi,
    moment_convergence_probe,
    resolvent_convergence_probe,
    weak_convergence_probe,
)

N_REF = 400
SIZES = [2, 4, 8, 16, 100]


def first_basis_vector(n):
    v = np.zeros(n)
    v[0] = 1.0
    return v


def path_graph_walk_count(k: int, start: int = 0, end: int = 0, vertices: int = 64) -> int:
    """Number of length-k walks between two vertices of the path graph.

    Independent oracle for (L^k)_{11} of the free Jacobi matrix: dynamic
    programming over exact integer counts.
    """
    counts = [0] * vertices
    counts[start] = 1
    for _ in range(k):
        nxt = [0] * vertices
        for i, c in enumerate(counts):
            if not c:
                continue
            if i > 0:
                nxt[i - 1] += c
            if i < vertices - 1:
                nxt[i + 1] += c
        counts = nxt
    return counts[end]


# ------------------------------------------------------------------
# trivial references
# ------------------------------------------------------------------


def test_diagonal_reference_gives_zero_gaps(rng):
    diag = np.diag(np.arange(N_REF, dtype=float))
    v = first_basis_vector(N_REF)
    res = resolvent_convergence_probe(diag, v, 1j, SIZES)
    assert all(gap == 0.0 for _, gap in res.gaps("resolvent"))
    mom = moment_convergence_probe(diag, v, 4, SIZES)
    assert all(gap == 0.0 for _, _, gap in mom.rows)
    weak = weak_convergence_probe(diag, v, [lambda lam: lam / (lam * lam + 1.0)], SIZES)
    assert all(gap <= 1e-15 for _, _, gap in weak.rows)


def test_resolvent_zero_error_for_invariant_subspace():
    # L diagonal, v = e_1: P_1 is already invariant
    diag = np.diag(np.linspace(-2, 2, 50))
    res = resolvent_convergence_probe(diag, first_basis_vector(50), 2j, [1, 5, 20])
    assert all(gap == 0.0 for _, gap in res.gaps("resolvent"))


def test_block_diagonal_reference_zero_gaps_past_block_size(rng):
    b1 = rng.normal(size=(5, 5))
    b1 = 0.5 * (b1 + b1.T)
    b2 = rng.normal(size=(45, 45))
    b2 = 0.5 * (b2 + b2.T)
    ref = np.block([[b1, np.zeros((5, 45))], [np.zeros((45, 5)), b2]])
    v = np.zeros(50)
    v[:5] = rng.normal(size=5)
    v /= np.linalg.norm(v)

    sizes = [5, 10, 25]
    res = resolvent_convergence_probe(ref, v, 1j, sizes)
    assert all(gap <= 1e-12 for _, gap in res.gaps("resolvent"))
    mom = moment_convergence_probe(ref, v, 5, sizes)
    assert all(gap <= 1e-10 for _, _, gap in mom.rows)
    weak = weak_convergence_probe(ref, v, [lambda lam: 1.0 / (lam * lam + 1.0)], sizes)
    assert all(gap <= 1e-12 for _, _, gap in weak.rows)


# ------------------------------------------------------------------
# free Jacobi reference
# ------------------------------------------------------------------


def test_free_jacobi_structure():
    mat = free_jacobi(5)
    assert np.array_equal(np.diag(mat), np.zeros(5))
    assert np.array_equal(np.diag(mat, 1), np.ones(4))
    assert np.array_equal(mat, mat.T)


def test_free_jacobi_moments_match_walk_counts():
    # Catalan numbers 1, 1, 2, 5, 14 at even orders, zero at odd orders
    assert [path_graph_walk_count(k) for k in range(9)] == [1, 0, 1, 0, 2, 0, 5, 0, 14]

    ref = free_jacobi(N_REF)
    v = first_basis_vector(N_REF)
    u = v.copy()
    for k in range(9):
        assert np.vdot(v, u) == pytest.approx(path_graph_walk_count(k), abs=1e-12)
        u = ref @ u


def test_free_jacobi_moment_gaps_vanish_once_sections_cover_walks():
    ref = free_jacobi(N_REF)
    v = first_basis_vector(N_REF)
    k_max = 6
    probe = moment_convergence_probe(ref, v, k_max, SIZES)
    for n, key, gap in probe.rows:
        k = int(key.split("=")[1])
        if n > k:
            assert gap <= 1e-10, (n, key, gap)


def test_free_jacobi_resolvent_errors_decrease():
    ref = free_jacobi(N_REF)
    v = first_basis_vector(N_REF)
    probe = resolvent_convergence_probe(ref, v, 1j, SIZES)
    errors = [gap for _, gap in probe.gaps("resolvent")]
    assert errors[0] > 1e-1  # coarse sections genuinely miss the resolvent
    for prev, nxt in zip(errors, errors[1:]):
        assert nxt <= 1.1 * prev
    assert errors[-1] <= 1e-2


def test_weak_probe_constant_function_tracks_projection_mass(rng):
    ref = free_jacobi(N_REF)
    v = rng.normal(size=N_REF)
    v /= np.linalg.norm(v)
    sizes = [10, 50, 200]
    probe = weak_convergence_probe(ref, v, [lambda lam: 1.0], sizes)
    for n, _, gap in probe.rows:
        expected = abs(np.sum(v[:n] ** 2) - 1.0)
        assert gap == pytest.approx(expected, rel=1e-10, abs=1e-14)


def test_weak_probe_bump_off_spectrum_is_null():
    def bump(lam):
        t = lam - 5.0
        return float(np.exp(-1.0 / (1.0 - t * t))) if abs(t) < 1.0 else 0.0

    ref = free_jacobi(N_REF)  # spectrum inside [-2, 2]
    probe = weak_convergence_probe(ref, first_basis_vector(N_REF), [bump], SIZES)
    for n, _, gap in probe.rows:
        assert gap == 0.0


def test_weak_probe_matches_manual_dense_oracle(rng):
    ref = free_jacobi(120)
    v = rng.normal(size=120)
    v /= np.linalg.norm(v)

    def f(lam):
        return (lam - 1.0) / ((lam - 1.0) ** 2 + 1.0)

    n = 30
    probe = weak_convergence_probe(ref, v, [f], [n])

    def manual(mat, vec):
        evals, evecs = np.linalg.eigh(mat)
        c = np.abs(evecs.T @ vec) ** 2
        return float(np.sum(c * np.array([f(t) for t in evals])))

    expected = abs(manual(ref[:n, :n], v[:n]) - manual(ref, v))
    assert probe.rows[0][2] == pytest.approx(expected, rel=1e-12, abs=1e-15)


# ------------------------------------------------------------------
# floors, validation, serialization
# ------------------------------------------------------------------


def test_resolvent_floor_equals_half_reference_probe():
    ref = free_jacobi(64)
    v = first_basis_vector(64)
    probe = resolvent_convergence_probe(ref, v, 1j, [8, 32, 64])
    floor_by_rows = dict(probe.gaps("resolvent"))[32]
    assert probe.floors["resolvent"] == pytest.approx(floor_by_rows, rel=1e-12, abs=1e-15)


def test_probe_validation():
    ref = free_jacobi(32)
    v = first_basis_vector(32)
    with pytest.raises(ValueError, match="imaginary"):
        resolvent_convergence_probe(ref, v, 1.0, [4])
    with pytest.raises(ValueError, match="exceeds reference"):
        resolvent_convergence_probe(ref, v, 1j, [64])
    with pytest.raises(ValueError, match="increasing"):
        resolvent_convergence_probe(ref, v, 1j, [8, 8])
    with pytest.raises(ValueError, match="square"):
        resolvent_convergence_probe(np.zeros((3, 4)), np.zeros(3), 1j, [2])
    with pytest.raises(ValueError, match="max_moment"):
        moment_convergence_probe(ref, v, -1, [4])
    with pytest.raises(ValueError, match="test function"):
        weak_convergence_probe(ref, v, [], [4])


def test_probe_csv_layout(tmp_path):
    ref = free_jacobi(32)
    probe = moment_convergence_probe(ref, first_basis_vector(32), 2, [4, 8])
    path = tmp_path / "probe.csv"
    probe.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,key,gap"
    assert len(lines) == 1 + 2 * 3 + 3  # header + rows + one floor row per key
    assert sum(1 for ln in lines if "|floor" in ln) == 3
    assert probe.keys() == ["k=0", "k=1", "k=2"]
