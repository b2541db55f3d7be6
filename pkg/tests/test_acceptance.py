"""Acceptance suite: one test per release criterion, each reported by name.

Criterion 1 intentionally runs against the published coarse-grid reference
row at its stated tolerances.  Two of its ten sub-checks (the weight of the
third spike and the location of the fifth) are known to fail for any
deterministic implementation of this pipeline; see README "Benchmark notes"
for the analysis.  The test is kept faithful rather than loosened.
"""

import time

import numpy as np
import pytest

import hdmd
from hdmd.dictionary import FeatureMatrices
from hdmd.dmd import assemble_gram_pair, eigendecompose, hermitian_dmd, symmetric_procrustes
from hdmd.probes import (
    free_jacobi,
    moment_convergence_probe,
    resolvent_convergence_probe,
    weak_convergence_probe,
)
from hdmd.quadrature import QuadratureRule
from hdmd.spectral import cluster_table, project_observable, spectral_measure

from conftest import record_criterion

SPIKE_ENERGIES = (3.0, 5.0, 7.0, 9.0, 11.0)
ROW_75_WEIGHTS = (3.56, 5.79, 5.23, 4.55, 2.77)
ROW_75_LOCATIONS = (3.00, 5.00, 7.00, 9.01, 11.06)
EXACT_ROW_WEIGHTS = (3.56, 5.79, 5.90, 4.59, 2.86)


def random_feature_instance(rng, m, n, tol=1e-12):
    psi_x = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    psi_y = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    w = rng.uniform(0.5, 2.0, size=m)
    quad = QuadratureRule(nodes=np.zeros((m, 1)), weights=w)
    fm = FeatureMatrices(psi_x=psi_x, psi_y=psi_y, rank_tolerance_used=tol)
    return assemble_gram_pair(fm, quad), fm, quad


def test_criterion_1_coarse_grid_table_row(bench75):
    """Clustered spikes at the 75x75 grid against the reference row."""
    rows, _ = cluster_table(bench75["measure"], SPIKE_ENERGIES, radius=0.4)
    failures = []
    details = []
    for (ref, loc, weight, _), w_t, l_t in zip(rows, ROW_75_WEIGHTS, ROW_75_LOCATIONS):
        details.append(f"E={ref:g}: weight {weight:.3f} (row {w_t}), location {loc:.3f} (row {l_t})")
        if abs(weight - w_t) > 0.05:
            failures.append(f"weight at E={ref:g}: {weight:.4f} vs {w_t} (tol 0.05)")
        if abs(loc - l_t) > 0.02:
            failures.append(f"location at E={ref:g}: {loc:.4f} vs {l_t} (tol 0.02)")
    ok = not failures
    record_criterion(
        "criterion 1 (75^2 table row, +-0.05 / +-0.02)",
        ok,
        "; ".join(failures) if failures else "all five spikes match",
    )
    if failures:
        pytest.fail(
            "reference-row mismatches (see README benchmark notes): " + "; ".join(failures)
        )


def test_criterion_2_exact_row_oracle():
    """Independent quadrature oracle reproduces the exact spike weights."""
    mu = hdmd.exact_spike_weights(11)
    by_energy = dict(zip(mu.locations, mu.weights))
    worst = 0.0
    for e, target in zip(SPIKE_ENERGIES, EXACT_ROW_WEIGHTS):
        worst = max(worst, abs(by_energy[e] - target))
    ok = worst <= 0.01
    record_criterion("criterion 2 (exact row, +-0.01)", ok, f"max deviation {worst:.2e}")
    assert ok


def test_criterion_3_eigenvalue_recovery(bench100):
    """Lowest six eigenvalues at the 100x100 grid within 0.05 of (1,2,2,3,3,3)."""
    eig = bench100["eig"]
    target = np.array([1.0, 2.0, 2.0, 3.0, 3.0, 3.0])
    dev6 = np.max(np.abs(eig.eigenvalues[:6] - target))
    exact = np.array([p.energy for p in hdmd.exact_spectrum(12)])
    dev50 = np.max(np.abs(eig.eigenvalues[:50] - exact[:50]))
    ok = dev6 <= 0.05 and dev50 <= 0.2
    record_criterion(
        "criterion 3 (eigenvalue recovery)",
        ok,
        f"lowest-6 max dev {dev6:.2e}; through 50th {dev50:.2e} "
        "(full-grid agreement documented in README)",
    )
    assert dev6 <= 0.05
    assert dev50 <= 0.2


def test_criterion_4_hermiticity_invariant(bench75, bench100, rng):
    """G K = K^* G to 1e-10 for every Hermitian DMD operator produced here."""
    residuals = [bench75["operator"].hermiticity_residual(),
                 bench100["operator"].hermiticity_residual()]
    for i in range(40):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(n, 4 * n + 8))
        pair, _, _ = random_feature_instance(rng, m, n)
        residuals.append(hermitian_dmd(pair).hermiticity_residual())
    # rank-deficient operators are included
    base = rng.normal(size=(30, 4)) + 1j * rng.normal(size=(30, 4))
    psi_x = np.column_stack([base, base @ rng.normal(size=(4, 3))])
    psi_y = rng.normal(size=(30, 7)) + 1j * rng.normal(size=(30, 7))
    quad = QuadratureRule(nodes=np.zeros((30, 1)), weights=np.ones(30))
    deficient = assemble_gram_pair(FeatureMatrices(psi_x=psi_x, psi_y=psi_y), quad)
    assert deficient.rank_deficient
    residuals.append(hermitian_dmd(deficient).hermiticity_residual())

    worst = max(residuals)
    ok = worst <= 1e-10
    record_criterion(
        "criterion 4 (hermiticity residual <= 1e-10)",
        ok,
        f"worst residual {worst:.2e} over {len(residuals)} operators (benchmarks, "
        "random, rank-deficient)",
    )
    assert ok


def test_criterion_5_mass_conservation(bench75, rng):
    """Measure mass equals f^* G f to 1e-10 relative, randomized and benchmark."""
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 21))
        m = int(rng.integers(n, 3 * n + 10))
        pair, fm, quad = random_feature_instance(rng, m, n)
        eig = eigendecompose(hermitian_dmd(pair))
        samples = rng.normal(size=m) + 1j * rng.normal(size=m)
        obs = project_observable(samples, fm, quad, pair=pair)
        mu = spectral_measure(eig, obs)
        denom = max(abs(obs.mass()), 1e-30)
        worst = max(worst, abs(mu.total_mass - obs.mass()) / denom)

    bench_gap = abs(
        bench75["measure"].total_mass - bench75["observable"].mass()
    ) / bench75["observable"].mass()
    worst = max(worst, bench_gap)
    ok = worst <= 1e-10
    record_criterion(
        "criterion 5 (mass conservation, rel 1e-10)",
        ok,
        f"worst relative gap {worst:.2e} (100 random instances + benchmark)",
    )
    assert ok


def test_criterion_6_procrustes_equivalence(rng):
    """Higham solver vs closed form on orthonormal X; optimality on general X."""
    worst_gap = 0.0
    for _ in range(200):
        m = int(rng.integers(4, 16))
        n = int(rng.integers(2, min(m, 7)))
        x, _ = np.linalg.qr(rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n)))
        y = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        xy = x.conj().T @ y
        closed = 0.5 * (xy + xy.conj().T)
        worst_gap = max(worst_gap, float(np.max(np.abs(symmetric_procrustes(x, y) - closed))))

    beaten = True
    for _ in range(50):
        m, n = 10, 4
        x = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        y = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        solution = symmetric_procrustes(x, y)
        base = np.linalg.norm(y - x @ solution)
        scale = max(np.linalg.norm(solution), 1.0)
        for k in range(1000):
            delta = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            delta = 0.5 * (delta + delta.conj().T)
            delta *= (1e-2 if k % 2 else 1e-4) * scale / np.linalg.norm(delta)
            if np.linalg.norm(y - x @ (solution + delta)) < base - 1e-12:
                beaten = False

    ok = worst_gap <= 1e-10 and beaten
    record_criterion(
        "criterion 6 (procrustes equivalence + optimality)",
        ok,
        f"closed-form max gap {worst_gap:.2e} over 200 instances; "
        f"optimality {'held' if beaten else 'VIOLATED'} against 50x1000 perturbations",
    )
    assert ok


def test_criterion_7_finite_section_probes():
    """Free-Jacobi probes at n_ref = 2000: resolvent, moments, weak convergence."""
    t0 = time.perf_counter()
    n_ref = 2000
    sizes = [2, 4, 8, 16, 32, 800]
    ref = free_jacobi(n_ref)
    v = np.zeros(n_ref)
    v[0] = 1.0

    res = resolvent_convergence_probe(ref, v, 1j, sizes)
    errors = [gap for _, gap in res.gaps("resolvent")]
    res_800 = dict(res.gaps("resolvent"))[800]
    monotone = all(nxt <= 1.1 * prev for prev, nxt in zip(errors, errors[1:]))

    mom = moment_convergence_probe(ref, v, 8, sizes)
    moment_ok = all(
        gap <= 1e-10
        for n, key, gap in mom.rows
        if n > int(key.split("=")[1])
    )

    weak = weak_convergence_probe(
        ref, v, [lambda lam: lam / (lam * lam + 1.0)], sizes
    )
    weak_800 = [gap for n, _, gap in weak.rows if n == 800][0]

    elapsed = time.perf_counter() - t0
    ok = res_800 < 1e-2 and monotone and moment_ok and weak_800 < 1e-2
    record_criterion(
        "criterion 7 (finite-section probes)",
        ok,
        f"resolvent@800 {res_800:.2e}, monotone={monotone}, moments(n>k) ok={moment_ok}, "
        f"weak@800 {weak_800:.2e}, elapsed {elapsed:.1f}s",
    )
    assert res_800 < 1e-2
    assert monotone
    assert moment_ok
    assert weak_800 < 1e-2


def test_criterion_8_parity_selection(bench75):
    """Odd-odd observable leaves no measurable mass near even energies."""
    measure = bench75["measure"]
    rows, _ = cluster_table(measure, [2.0, 4.0, 6.0], radius=0.4)
    even_mass = sum(weight for _, _, weight, _ in rows)
    bound = 1e-6 * measure.total_mass
    ok = even_mass <= bound
    record_criterion(
        "criterion 8 (parity selection)",
        ok,
        f"clustered mass near E=2,4,6: {even_mass:.2e} <= {bound:.2e}",
    )
    assert ok


def test_criterion_9_planted_solution_recovery(rng):
    """Invariant-subspace data with a known G-Hermitian operator is recovered."""
    m, n = 60, 12
    psi_x = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    w = rng.uniform(0.5, 1.5, size=m)
    g = psi_x.conj().T @ (w[:, None] * psi_x)
    g = 0.5 * (g + g.conj().T)
    s = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    s = 0.5 * (s + s.conj().T)
    k_true = np.linalg.solve(g, s)

    quad = QuadratureRule(nodes=np.zeros((m, 1)), weights=w)
    fm = FeatureMatrices(psi_x=psi_x, psi_y=psi_x @ k_true)
    pair = assemble_gram_pair(fm, quad)
    recovered = hermitian_dmd(pair)
    err = float(np.linalg.norm(recovered.k - k_true))
    ok = err <= 1e-8
    record_criterion(
        "criterion 9 (planted recovery <= 1e-8)",
        ok,
        f"recovery error {err:.2e}",
    )
    assert ok
