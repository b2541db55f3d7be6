"""Command-line front end: wires configs to experiments, emits CSV/JSON artifacts.

Subcommands
    schrodinger   harmonic-oscillator benchmark (eigenvalues, raw and
                  clustered spectral measures, summary)
    probes        finite-section diagnostics for the built-in free-Jacobi
                  and diagonal references
    custom        EDMD + Hermitian DMD on user-supplied snapshot CSVs

Common flags: ``--config PATH`` (key-value file, see `hdmd.config`),
``--out DIR``, ``--threads N`` (default 1, sequential).  ``schrodinger``
additionally takes ``--full-grid`` to run the 300 x 300 snapshot grid
instead of the reduced default.  Verbosity comes from the ``HDMD_LOG``
environment variable (debug/info/warning).

All CSV artifacts are deterministic for a fixed config and seed: plot data
is CSV only, floats are written in shortest round-trip form, and runtime
appears only in summary.json.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from math import isnan
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    ExperimentConfig,
    config_as_dict,
    default_config,
    load_config,
)
from .dictionary import evaluate_function_samples, gaussian_grid_dictionary, evaluate_snapshots
from .dmd import assemble_gram_pair, edmd, eigendecompose, hermitian_dmd
from .matio import format_float, write_complex_csv
from .probes import (
    free_jacobi,
    moment_convergence_probe,
    resolvent_convergence_probe,
    weak_convergence_probe,
)
from .quadrature import monte_carlo, tensor_trapezoid
from .schrodinger import (
    GaussianDictionarySpec,
    HarmonicOscillatorProblem,
    exact_spectrum,
    generate_snapshots,
    reference_observable,
)
from .spectral import cluster_table, project_observable, spectral_measure

logger = logging.getLogger("hdmd")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

HERMITICITY_LIMIT = 1e-8
FULL_GRID_POINTS = 300


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _write_eigenvalues_csv(path: Path, computed: np.ndarray, exact=None) -> None:
    if exact is None:
        lines = ["index,computed"]
        for i, lam in enumerate(computed):
            lines.append(f"{i},{format_float(lam)}")
    else:
        lines = ["index,computed,exact"]
        for i, (lam, e) in enumerate(zip(computed, exact)):
            lines.append(f"{i},{format_float(lam)},{format_float(e)}")
    _write_lines(path, lines)


def _write_clustered_csv(path: Path, rows) -> None:
    lines = ["reference,location,weight,atom_count"]
    for ref, loc, weight, count in rows:
        loc_txt = "" if isnan(loc) else format_float(loc)
        lines.append(f"{format_float(ref)},{loc_txt},{format_float(weight)},{count}")
    _write_lines(path, lines)


def _write_summary(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_points_csv(path) -> np.ndarray:
    """Read snapshot coordinates: one header line, then rows of floats."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"{path}: {exc}") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ValueError(f"{path}: empty snapshot file")
    rows = []
    width = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if width is None:
            width = len(parts)
        elif len(parts) != width:
            raise ValueError(f"{path}: line {lineno}: expected {width} columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value in {line!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def run_schrodinger(
    config: ExperimentConfig,
    out_dir: Path,
    threads: int = 1,
    full_grid: bool = False,
) -> int:
    """Benchmark pipeline; writes eigenvalues.csv, measure.csv, clustered.csv, summary.json."""
    t0 = time.perf_counter()
    grid = (FULL_GRID_POINTS, FULL_GRID_POINTS) if full_grid else config.grid
    spec = GaussianDictionarySpec(
        centers_box=config.dictionary_box(2),
        per_axis=config.dict_per_axis,
        width=config.dict_width,
        amplitude=config.dict_amplitude,
    )
    problem = HarmonicOscillatorProblem(dictionary_spec=spec)
    quad = tensor_trapezoid(problem.domain, grid)
    logger.info("grid %s (%d nodes), dictionary size %d", grid, quad.size, spec.size)

    features = generate_snapshots(problem, quad, rank_tolerance=config.rank_tolerance)
    pair = assemble_gram_pair(features, quad, threads=threads)
    operator = hermitian_dmd(pair)
    residual = operator.hermiticity_residual()
    eig = eigendecompose(operator)

    samples = evaluate_function_samples(quad.nodes, reference_observable)
    observable = project_observable(samples, features, quad, pair=pair)
    measure = spectral_measure(eig, observable)

    references = [float(p.energy) for p in exact_spectrum(config.energy_cutoff)]
    references = sorted(set(references))
    rows, _ = cluster_table(measure, references, config.cluster_radius)

    exact = np.array([p.energy for p in exact_spectrum(config.energy_cutoff + 40)])
    count = min(eig.eigenvalues.shape[0], exact.shape[0])

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_eigenvalues_csv(out_dir / "eigenvalues.csv", eig.eigenvalues[:count], exact[:count])
    measure.to_csv(out_dir / "measure.csv")
    _write_clustered_csv(out_dir / "clustered.csv", rows)
    summary = {
        "schema": 1,
        "experiment": "schrodinger",
        "config": config_as_dict(config),
        "grid": list(grid),
        "dictionary_size": spec.size,
        "retained_rank": pair.retained_rank,
        "hermiticity_residual": residual,
        "total_mass": measure.total_mass,
        "observable_mass": observable.mass(),
        "runtime_seconds": time.perf_counter() - t0,
        "seed": config.seed,
    }
    _write_summary(out_dir / "summary.json", summary)

    if residual > HERMITICITY_LIMIT:
        logger.error("hermiticity residual %.3e exceeds %.1e", residual, HERMITICITY_LIMIT)
        return EXIT_NUMERICAL
    logger.info("done in %.2fs, total mass %.6f", summary["runtime_seconds"], measure.total_mass)
    return EXIT_OK


# weak-probe test functions; their names become the CSV row keys
def constant(lam: float) -> float:
    return 1.0


def resolvent_re(lam: float) -> float:
    # Re 1/(lam - i)
    return lam / (lam * lam + 1.0)


def resolvent_re_shifted(lam: float) -> float:
    # Re 1/(lam - (1 + i)); asymmetric, so symmetric spectra give nonzero values
    return (lam - 1.0) / ((lam - 1.0) ** 2 + 1.0)


def bump_off_spectrum(lam: float) -> float:
    # smooth bump supported on [4, 6], disjoint from the references' spectra
    t = lam - 5.0
    return float(np.exp(-1.0 / (1.0 - t * t))) if abs(t) < 1.0 else 0.0


PROBE_TEST_FNS = (constant, resolvent_re, resolvent_re_shifted, bump_off_spectrum)


def run_probes(config: ExperimentConfig, out_dir: Path, threads: int = 1) -> int:
    """Finite-section probes for the free-Jacobi and diagonal references."""
    t0 = time.perf_counter()
    n_ref = config.probe_n_ref
    sizes = list(config.probe_sizes)
    references = {
        "free_jacobi": free_jacobi(n_ref),
        "diagonal": np.diag(np.arange(n_ref, dtype=float)),
    }
    v = np.zeros(n_ref)
    v[0] = 1.0

    out_dir.mkdir(parents=True, exist_ok=True)
    floors = {}
    for name, ref in references.items():
        res = resolvent_convergence_probe(ref, v, 1j, sizes)
        mom = moment_convergence_probe(ref, v, config.probe_max_moment, sizes)
        weak = weak_convergence_probe(ref, v, PROBE_TEST_FNS, sizes)
        res.to_csv(out_dir / f"resolvent_{name}.csv")
        mom.to_csv(out_dir / f"moments_{name}.csv")
        weak.to_csv(out_dir / f"weak_{name}.csv")
        floors[name] = {
            "resolvent": res.floors,
            "moments": mom.floors,
            "weak": weak.floors,
        }
        logger.info("probes for %s reference done", name)

    summary = {
        "schema": 1,
        "experiment": "probes",
        "config": config_as_dict(config),
        "n_ref": n_ref,
        "truncation_sizes": sizes,
        "resolution_floors": floors,
        "runtime_seconds": time.perf_counter() - t0,
        "seed": config.seed,
    }
    _write_summary(out_dir / "summary.json", summary)
    return EXIT_OK


def run_custom(
    config: ExperimentConfig,
    x_path,
    y_path,
    out_dir: Path,
    threads: int = 1,
) -> int:
    """EDMD + Hermitian DMD on snapshot coordinate files (equal-weight rule).

    The spectral measure is taken with respect to the first dictionary
    function.  Artifacts: eigenvalues.csv, measure.csv, koopman_edmd.csv,
    koopman_hermitian.csv, summary.json.
    """
    t0 = time.perf_counter()
    x_pts = read_points_csv(x_path)
    y_pts = read_points_csv(y_path)
    if x_pts.shape != y_pts.shape:
        raise ValueError(
            f"snapshot shapes differ: {x_path} is {x_pts.shape}, {y_path} is {y_pts.shape}"
        )
    dim = x_pts.shape[1]
    dictionary = gaussian_grid_dictionary(
        config.dictionary_box(dim),
        config.dict_per_axis,
        config.dict_width,
        config.dict_amplitude,
    )
    quad = monte_carlo(x_pts, total_mass=1.0)
    features = evaluate_snapshots(dictionary, x_pts, y_pts, rank_tolerance=config.rank_tolerance)
    pair = assemble_gram_pair(features, quad, threads=threads)
    k_edmd = edmd(pair)
    k_herm = hermitian_dmd(pair)
    residual = k_herm.hermiticity_residual()
    eig = eigendecompose(k_herm)
    observable = project_observable(features.psi_x[:, 0], features, quad, pair=pair)
    measure = spectral_measure(eig, observable)

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_eigenvalues_csv(out_dir / "eigenvalues.csv", eig.eigenvalues)
    measure.to_csv(out_dir / "measure.csv")
    write_complex_csv(k_edmd.k, out_dir / "koopman_edmd.csv")
    write_complex_csv(k_herm.k, out_dir / "koopman_hermitian.csv")
    summary = {
        "schema": 1,
        "experiment": "custom-snapshots",
        "config": config_as_dict(config),
        "snapshot_count": int(x_pts.shape[0]),
        "snapshot_dimension": dim,
        "dictionary_size": dictionary.size,
        "retained_rank": pair.retained_rank,
        "hermiticity_residual": residual,
        "total_mass": measure.total_mass,
        "runtime_seconds": time.perf_counter() - t0,
        "seed": config.seed,
    }
    _write_summary(out_dir / "summary.json", summary)

    if residual > HERMITICITY_LIMIT:
        logger.error("hermiticity residual %.3e exceeds %.1e", residual, HERMITICITY_LIMIT)
        return EXIT_NUMERICAL
    return EXIT_OK


def _configure_logging() -> None:
    level_name = os.environ.get("HDMD_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(level)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdmd",
        description="Hermitian DMD experiments: spectra and spectral measures of "
        "self-adjoint Koopman operators.",
    )
    parser.add_argument("--version", action="version", version=f"hdmd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="key-value config file")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="assembly parallelism (default 1)")

    p_s = sub.add_parser("schrodinger", help="harmonic-oscillator benchmark")
    common(p_s)
    p_s.add_argument(
        "--full-grid",
        action="store_true",
        help=f"use the full {FULL_GRID_POINTS}x{FULL_GRID_POINTS} snapshot grid",
    )

    p_p = sub.add_parser("probes", help="finite-section convergence diagnostics")
    common(p_p)

    p_c = sub.add_parser("custom", help="pipeline on user snapshot CSVs")
    common(p_c)
    p_c.add_argument("x_csv", type=Path, help="snapshot inputs (header + coordinate rows)")
    p_c.add_argument("y_csv", type=Path, help="snapshot outputs, same shape")
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else default_config()
        if args.threads < 1:
            raise ConfigError("threads must be >= 1", field_name="threads")
        out_dir = Path(args.out) if args.out else Path(config.output_dir)
        if args.command == "schrodinger":
            return run_schrodinger(config, out_dir, threads=args.threads, full_grid=args.full_grid)
        if args.command == "probes":
            return run_probes(config, out_dir, threads=args.threads)
        return run_custom(config, args.x_csv, args.y_csv, out_dir, threads=args.threads)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"hdmd: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
