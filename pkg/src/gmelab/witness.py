"""Entanglement witnesses built from a closest-separable-state approximation.

Given the difference m = rho - css, the witness is

    W = (m - lam * 1) / D_last,   lam = max over admissible pure |psi> of <psi|m|psi>

so that <psi|W|psi> <= 0 on the admissible set. lam is found by multi-restart
see-saw and is therefore a lower bound on the true maximum; the report keeps
the per-structure values and restart count so that caveat stays visible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .gilbert import Factorization, GilbertRun, _seesaw, factorizations
from .operators import as_matrix, basis_ket, hs_inner, normalize
from .partitions import PartySpec, SeparabilityClass

log = logging.getLogger(__name__)

INSIDE_DISTANCE = 1e-12
POSITIVITY_TOL = 1e-9

FLAG_OK = ""
FLAG_INSIDE = "inside_set"
FLAG_POSITIVE = "positive_on_set"


@dataclass
class WitnessReport:
    witness: np.ndarray | None
    lam: float
    per_class_max: dict[str, float]
    d_last: float
    d_wit: float
    restarts_used: int
    class_label: str
    hs_rho_m: float = 0.0
    flag: str = FLAG_OK
    max_sampled: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "class": self.class_label,
            "lambda": None if np.isnan(self.lam) else self.lam,
            "per_class_max": [{"cut": k, "value": v} for k, v in self.per_class_max.items()],
            "d_last": self.d_last,
            "d_wit": self.d_wit,
            "tr_rho_m": self.hs_rho_m,
            "restarts": self.restarts_used,
            "flag": self.flag,
            "max_sampled": self.max_sampled,
        }


def _root_seed(rng) -> int:
    if rng is None:
        return 0
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(2**63))
    return int(rng)


def _seed_streams(rng, n: int) -> list[np.random.Generator]:
    """One independent generator per product structure."""
    seq = np.random.SeedSequence(_root_seed(rng))
    return [np.random.default_rng(s) for s in seq.spawn(n)]


def _atom_values(m: np.ndarray, kets: list[np.ndarray]) -> np.ndarray:
    if not kets:
        return np.zeros(0)
    psi = np.array(kets)
    return np.einsum("zi,ij,zj->z", psi.conj(), m, psi).real


def lambda_max(
    m,
    cls: SeparabilityClass,
    spec: PartySpec,
    restarts: int = 200,
    rng=None,
    sweeps: int = 200,
    tol: float = 1e-12,
    atoms: list[tuple[str | None, np.ndarray]] | None = None,
) -> tuple[float, dict[str, float]]:
    """Largest <psi|m|psi> over pure states of ``cls``, per product structure.

    Each structure gets its own random stream, so the first k restarts are the
    same whatever the total: values never decrease as ``restarts`` grows.
    ``atoms`` are extra (label, ket) candidates that are scored directly; a
    None label marks a ket admissible for every structure.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m = as_matrix(m)
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise ValueError("lambda_max needs a Hermitian operator")
    m = (m + m.conj().T) / 2
    facts = factorizations(cls, spec)
    streams = _seed_streams(rng, len(facts))
    atoms = atoms or []
    per: dict[str, float] = {}
    for f, gen in zip(facts, streams):
        best = -np.inf
        t = f.to_block_order(m).reshape(f.block_dims * 2)
        for _ in range(restarts):
            _, value = _seesaw(t, f.random_factors(gen), sweeps, tol)
            best = max(best, value)
        usable = [k for lab, k in atoms if lab is None or lab == f.label]
        vals = _atom_values(m, usable)
        if len(vals):
            best = max(best, float(vals.max()))
        per[f.label] = float(best)
    return max(per.values()), per


def witness_from_css(
    rho,
    css,
    cls: SeparabilityClass,
    spec: PartySpec,
    restarts: int = 200,
    rng=None,
    atoms=None,
    check_samples: int = 10_000,
) -> WitnessReport:
    """Witness for ``rho`` from an arbitrary approximation ``css`` of its closest state in ``cls``."""
    rho_m, css_m = as_matrix(rho), as_matrix(css)
    m = rho_m - css_m
    d_last = float(np.linalg.norm(m))
    hs = hs_inner(rho_m, m)
    if d_last < INSIDE_DISTANCE:
        log.info("distance %.3g: state is inside the set, no witness", d_last)
        return WitnessReport(None, float("nan"), {}, d_last, 0.0, 0, cls.label, hs, FLAG_INSIDE)
    seed = _root_seed(rng)
    lam, per = lambda_max(m, cls, spec, restarts, seed, atoms=atoms)
    w = (m - lam * np.eye(m.shape[0])) / d_last
    d_wit = max(0.0, (hs - lam) / d_last)
    report = WitnessReport(w, lam, per, d_last, d_wit, restarts, cls.label, hs)
    if check_samples:
        top = max_on_samples(w, cls, spec, check_samples, rng=np.random.default_rng([seed, 1]))
        report.max_sampled = top
        if top > POSITIVITY_TOL:
            report.flag = FLAG_POSITIVE
            log.warning("witness is positive (%.3g) on a sampled admissible state: lambda is underestimated", top)
    if d_wit > d_last + 1e-9:
        report.notes.append("d_wit exceeds d_last: lambda is underestimated")
        log.warning("d_wit %.6g exceeds d_last %.6g", d_wit, d_last)
    return report


def build_witness(
    run: GilbertRun,
    restarts: int = 200,
    rng=None,
    witness_class: SeparabilityClass | None = None,
    check_samples: int = 10_000,
) -> WitnessReport:
    """Witness from a finished run.

    ``lam`` is maximized over ``witness_class`` (default: the run's class).
    The run's logged pure components are scored as extra candidates, which
    guarantees d_wit <= d_last whenever they are admissible.
    """
    cls = witness_class or run.cls
    seed = run.config.rng_seed if rng is None else rng
    return witness_from_css(
        run.rho, run.css, cls, run.spec, restarts, seed, atoms=run.atoms(), check_samples=check_samples
    )


def random_admissible(cls: SeparabilityClass, spec: PartySpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` random pure states of the class, as rows in canonical order."""
    facts: list[Factorization] = factorizations(cls, spec)
    which = rng.integers(len(facts), size=size)
    out = np.empty((size, spec.total_dim), dtype=complex)
    for fi, f in enumerate(facts):
        rows = np.flatnonzero(which == fi)
        if not len(rows):
            continue
        arrays = f.random_factors(rng, len(rows))
        psi = arrays[0]
        for a in arrays[1:]:
            psi = np.einsum("za,zb->zab", psi, a).reshape(len(rows), -1)
        # block order -> canonical order: canonical axis p is block-order axis slot_map[p]
        dims = [spec.particle_dims[p] for b in f.blocks for p in b]
        psi = psi.reshape([len(rows)] + dims).transpose([0] + [s + 1 for s in f.slot_map])
        out[rows] = psi.reshape(len(rows), -1)
    return out


def max_on_samples(w, cls: SeparabilityClass, spec: PartySpec, samples: int = 10_000, rng=None) -> float:
    """Largest <psi|w|psi> over ``samples`` random admissible pure states."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    w = as_matrix(w)
    top = -np.inf
    for start in range(0, samples, 2048):
        psi = random_admissible(cls, spec, rng, min(2048, samples - start))
        top = max(top, float(np.einsum("zi,ij,zj->z", psi.conj(), w, psi).real.max()))
    return top


# -- GHZ witnesses -----------------------------------------------------------


def ghz_witness(n: int) -> np.ndarray:
    """W_N = |GHZ_N><GHZ_N| - 1/2."""
    if n < 2:
        raise ValueError("GHZ witness needs N >= 2")
    g = normalize(basis_ket("0" * n) + basis_ket("1" * n))
    return np.outer(g, g.conj()) - np.eye(2**n) / 2


def ghz_witness_mean(rho) -> float:
    m = as_matrix(rho)
    d = m.shape[0]
    n = d.bit_length() - 1
    if d < 4 or 2**n != d:
        raise ValueError(f"dimension {d} is not 2^N with N >= 2")
    return hs_inner(m, ghz_witness(n))


def scaling_mean(n: int) -> float:
    """Predicted <W_N> on the N-party state obtained from two-copy merging."""
    return -0.5 + 4 / (2 + 2 ** (n / 2))


def rho4_ghz_witness() -> np.ndarray:
    """4(|GHZ_4><GHZ_4| - 1/16)/sqrt(15): unit Hilbert-Schmidt norm."""
    g = normalize(basis_ket("0000") + basis_ket("1111"))
    return 4 * (np.outer(g, g.conj()) - np.eye(16) / 16) / np.sqrt(15)


def rho4_ghz_bound() -> float:
    """Closed-form distance bound quoted for rho4: 29/(12 sqrt 15) - 7/16."""
    return 29 / (12 * np.sqrt(15)) - 7 / 16
