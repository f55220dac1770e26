"""Partial-transpose negativities and the three-particle aggregate measures."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable

import numpy as np

from .operators import DensityMatrix, as_matrix, partial_trace, partial_transpose
from .partitions import Bipartition, PartySpec, check_cut, enumerate_bipartitions

Measure = Callable[[DensityMatrix], float]


@dataclass(frozen=True)
class NegativityResult:
    per_cut: dict[str, float]
    combined: float

    def to_json(self) -> dict:
        return {"per_cut": dict(self.per_cut), "combined": self.combined}


def _as_cut(cut: Bipartition | str, spec: PartySpec) -> Bipartition:
    if isinstance(cut, str):
        return Bipartition.parse(cut, spec.group_labels)
    check_cut(cut, spec)
    return cut


def negativity(rho, cut: Bipartition | str, spec: PartySpec) -> float:
    """-2 times the sum of negative eigenvalues of rho partially transposed on one side of ``cut``."""
    cut = _as_cut(cut, spec)
    side = spec.group_particles(cut.side_a)
    pt = partial_transpose(as_matrix(rho), side, spec.particle_dims)
    w = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return float(max(0.0, -2 * w[w < 0].sum()))


def tripartite_negativity(rho, spec: PartySpec) -> NegativityResult:
    """Geometric mean of the three one-versus-rest negativities."""
    if len(spec.groups) != 3:
        raise ValueError(f"tripartite negativity needs exactly 3 groups, got {len(spec.groups)}")
    per = {cut.label: negativity(rho, cut, spec) for cut in enumerate_bipartitions(spec)}
    combined = float(np.prod(list(per.values())) ** (1 / 3))
    return NegativityResult(per, combined)


def _triple_spec(dims) -> PartySpec:
    return PartySpec(("A", "B", "C"), (1, 1, 1), tuple(dims))


def default_measure(rho3: DensityMatrix) -> float:
    return tripartite_negativity(rho3, _triple_spec(rho3.dims)).combined


def particle_triples(spec: PartySpec, mode: str = "within") -> list[tuple[int, int, int]]:
    """Sorted particle triples summed over by :func:`aggregate_g3pe`.

    ``within``: every unordered triple of distinct particles. ``cross``: one
    particle from each of three distinct parties, all parties holding the
    same number of particles.
    """
    if spec.n_particles < 3:
        raise ValueError("need at least 3 particles")
    if mode == "within":
        return list(combinations(range(spec.n_particles), 3))
    if mode == "cross":
        counts = set(spec.particles_per_party)
        if len(counts) != 1:
            raise ValueError("cross-location sum needs the same particle count in every party")
        if len(spec.parties) < 3:
            raise ValueError("cross-location sum needs at least 3 parties")
        triples = []
        for parties in combinations(spec.parties, 3):
            pools = [spec.party_particles(p) for p in parties]
            triples.extend(tuple(sorted(t)) for t in product(*pools))
        return sorted(triples)
    raise ValueError(f"unknown mode {mode!r}; use 'within' or 'cross'")


def aggregate_g3pe(rho, spec: PartySpec, measure: Measure | None = None, mode: str = "within") -> float:
    """Sum of a three-particle measure over the reduced states of particle triples."""
    measure = measure or default_measure
    m = as_matrix(rho)
    total = 0.0
    for triple in particle_triples(spec, mode):
        total += measure(partial_trace(m, triple, spec.particle_dims))
    return float(total)


def witness_distance_measure(max_corrections: int = 500, restarts: int = 20, seed: int = 0) -> Measure:
    """Biseparable witness distance of a three-particle state (slow alternative to negativity)."""
    from .gilbert import GilbertConfig, run
    from .partitions import SeparabilityClass
    from .witness import build_witness

    def measure(rho3: DensityMatrix) -> float:
        spec = _triple_spec(rho3.dims)
        cfg = GilbertConfig(max_corrections=max_corrections, rng_seed=seed)
        r = run(rho3, SeparabilityClass.biseparable(), spec, cfg)
        return build_witness(r, restarts=restarts, check_samples=0).d_wit

    return measure
