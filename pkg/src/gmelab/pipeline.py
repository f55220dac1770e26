"""Run -> estimate -> witness, and the theta sweep built on it."""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimator import DegenerateHistoryError, estimate
from .gilbert import GilbertConfig, GilbertRun, run
from .io import matrix_to_pairs
from .partitions import PartySpec, SeparabilityClass
from .states import build_state
from .witness import WitnessReport, build_witness

log = logging.getLogger(__name__)


@dataclass
class Analysis:
    run: GilbertRun
    witness: WitnessReport
    d_est: float | None
    r_star: float | None

    def report(self, state_name: str | None = None, include_css: bool = True) -> dict:
        r = self.run
        data = {
            "state": state_name,
            "class": r.cls.label,
            "grouping": r.spec.grouping.value,
            "seed": r.config.rng_seed,
            "config": r.config.to_json(),
            "corrections": r.corrections_done,
            "trials": r.trials_used,
            "escalations": r.escalations,
            "halt_reason": r.halt_reason,
            "d_last": r.d_last,
            "d_est": self.d_est,
            "r_star": self.r_star,
            "witness": self.witness.to_json(),
            "d_wit": self.witness.d_wit,
        }
        if include_css:
            data["css"] = matrix_to_pairs(r.css.matrix)
        return data


def analyze(
    rho,
    spec: PartySpec,
    cls: SeparabilityClass,
    config: GilbertConfig,
    restarts: int = 200,
    witness_class: SeparabilityClass | None = None,
    check_samples: int = 10_000,
    initial_css=None,
) -> Analysis:
    r = run(rho, cls, spec, config, initial_css=initial_css)
    try:
        est = estimate(r.history)
        d_est, r_star = est.d_est, est.r_star
    except DegenerateHistoryError as exc:
        log.info("no distance estimate: %s", exc)
        d_est = r_star = None
    w = build_witness(r, restarts, witness_class=witness_class, check_samples=check_samples)
    return Analysis(r, w, d_est, r_star)


# -- theta sweep ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    theta: float
    d_last: float
    d_est: float | None
    d_wit: float
    corrections: int


def point_seed(seed: int, index: int) -> int:
    """seed XOR a stable 64-bit hash of the grid index."""
    h = int.from_bytes(hashlib.blake2b(str(index).encode(), digest_size=8).digest(), "little")
    return (int(seed) ^ h) & (2**64 - 1)


def theta_grid(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not (0 <= start <= np.pi / 2 + 1e-12 and 0 <= stop <= np.pi / 2 + 1e-12):
        raise ValueError("theta range must lie within [0, pi/2]")
    if steps == 1:
        if start != stop:
            raise ValueError("a single step needs from == to")
        return np.array([start])
    return np.linspace(start, stop, steps)


def _sweep_point(args) -> SweepRow:
    theta, config, restarts, variant, check_samples = args
    state = build_state("rho3", theta=min(theta, np.pi / 2), variant=variant)
    a = analyze(state.rho, state.spec, SeparabilityClass.biseparable(), config, restarts, check_samples=check_samples)
    return SweepRow(float(theta), a.run.d_last, a.d_est, a.witness.d_wit, a.run.corrections_done)


def worker_count() -> int:
    raw = os.environ.get("GMELAB_THREADS")
    if raw is None:
        return 0
    n = int(raw)
    if n < 0:
        raise ValueError("GMELAB_THREADS must be >= 0")
    return n


def sweep_theta(
    start: float,
    stop: float,
    steps: int,
    config: GilbertConfig,
    restarts: int = 200,
    variant: str = "orthonormal",
    check_samples: int = 10_000,
    workers: int | None = None,
) -> list[SweepRow]:
    """Gilbert + witness on rho3(theta) over an even grid, rows in theta order.

    Point i uses seed ``point_seed(config.rng_seed, i)``. ``workers`` > 1 runs
    points in separate processes (default: ``GMELAB_THREADS``, 0 = sequential).
    """
    grid = theta_grid(start, stop, steps)
    jobs = []
    for i, theta in enumerate(grid):
        cfg = GilbertConfig(**{**config.to_json(), "rng_seed": point_seed(config.rng_seed, i)})
        jobs.append((float(theta), cfg, restarts, variant, check_samples))
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = ["theta,d_last,d_est,d_wit,corrections"]
    for r in rows:
        d_est = "" if r.d_est is None else repr(r.d_est)
        lines.append(f"{r.theta!r},{r.d_last!r},{d_est},{r.d_wit!r},{r.corrections}")
    return "\n".join(lines) + "\n"


def gnuplot_script(csv_path: str) -> str:
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'theta'\n"
        "set ylabel 'Hilbert-Schmidt distance'\n"
        f"plot '{csv_path}' using 1:2 with linespoints, '' using 1:3 with linespoints, "
        "'' using 1:4 with linespoints\n"
    )
