"""Parties, particles, groupings and the convex sets they induce.

A :class:`PartySpec` says who holds which particles. Its ``grouping`` decides
what counts as a local subsystem: whole laboratories (``party``) or single
particles (``particle``). Everything downstream (cuts, trial states,
negativities) works on *groups* under the active grouping, so the same density
matrix can be analysed under either notion of locality.

Particles are always stored party-major: A1 A2 B1 B2 C1 ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np


class Grouping(str, Enum):
    PARTY = "party"
    PARTICLE = "particle"


@dataclass(frozen=True)
class PartySpec:
    parties: tuple[str, ...]
    particles_per_party: tuple[int, ...]
    particle_dims: tuple[int, ...]
    grouping: Grouping = Grouping.PARTY

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "particles_per_party", tuple(int(k) for k in self.particles_per_party))
        object.__setattr__(self, "particle_dims", tuple(int(d) for d in self.particle_dims))
        object.__setattr__(self, "grouping", Grouping(self.grouping))
        if not self.parties:
            raise ValueError("a PartySpec needs at least one party")
        if len(set(self.parties)) != len(self.parties):
            raise ValueError(f"duplicate party labels in {self.parties}")
        if len(self.particles_per_party) != len(self.parties):
            raise ValueError("particles_per_party must have one entry per party")
        if any(k < 1 for k in self.particles_per_party):
            raise ValueError("every party must hold at least one particle")
        if len(self.particle_dims) != sum(self.particles_per_party):
            raise ValueError("particle_dims must list one dimension per particle")
        if any(d < 2 for d in self.particle_dims):
            raise ValueError("particle dimensions must be at least 2")

    @classmethod
    def qubits(
        cls,
        parties: Sequence[str] | str,
        particles_per_party: Sequence[int] | None = None,
        grouping: Grouping | str = Grouping.PARTY,
    ) -> "PartySpec":
        parties = tuple(parties)
        counts = tuple(particles_per_party) if particles_per_party is not None else (1,) * len(parties)
        return cls(parties, counts, (2,) * sum(counts), Grouping(grouping))

    @property
    def n_particles(self) -> int:
        return len(self.particle_dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.particle_dims))

    def with_grouping(self, grouping: Grouping | str) -> "PartySpec":
        return replace(self, grouping=Grouping(grouping))

    def party_particles(self, party: str) -> tuple[int, ...]:
        i = self.parties.index(party)
        start = sum(self.particles_per_party[:i])
        return tuple(range(start, start + self.particles_per_party[i]))

    def party_dim(self, party: str) -> int:
        return int(np.prod([self.particle_dims[p] for p in self.party_particles(party)]))

    @property
    def particle_labels(self) -> tuple[str, ...]:
        """``A`` for a single-particle party, ``B1``, ``B2`` otherwise."""
        labels = []
        for party, k in zip(self.parties, self.particles_per_party):
            labels.extend([party] if k == 1 else [f"{party}{j + 1}" for j in range(k)])
        return tuple(labels)

    @property
    def groups(self) -> tuple[tuple[str, tuple[int, ...]], ...]:
        """(label, particle indices) for every group under the active grouping."""
        if self.grouping is Grouping.PARTY:
            return tuple((p, self.party_particles(p)) for p in self.parties)
        return tuple((lab, (i,)) for i, lab in enumerate(self.particle_labels))

    @property
    def group_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.groups)

    def group_particles(self, labels) -> tuple[int, ...]:
        lookup = dict(self.groups)
        try:
            return tuple(sorted(p for lab in labels for p in lookup[lab]))
        except KeyError as exc:
            raise ValueError(f"unknown group label {exc.args[0]!r} for {self.group_labels}") from None

    def to_json(self) -> dict:
        return {
            "parties": list(self.parties),
            "particles_per_party": list(self.particles_per_party),
            "dims": list(self.particle_dims),
            "grouping": self.grouping.value,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PartySpec":
        return cls(
            tuple(data["parties"]),
            tuple(data["particles_per_party"]),
            tuple(data["dims"]),
            Grouping(data.get("grouping", "party")),
        )


@dataclass(frozen=True)
class Bipartition:
    """A cut of the group labels into two nonempty sides.

    Stored canonically: ``side_a`` always contains the first label of
    ``labels``, so A|BCD and BCD|A are the same object.
    """

    side_a: tuple[str, ...]
    labels: tuple[str, ...] = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        side = set(self.side_a)
        unknown = side - set(labels)
        if unknown:
            raise ValueError(f"unknown labels {sorted(unknown)} for {labels}")
        if not side or side == set(labels):
            raise ValueError("a bipartition needs two nonempty sides")
        if labels[0] not in side:
            side = set(labels) - side
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "side_a", tuple(lab for lab in labels if lab in side))

    @property
    def side_b(self) -> tuple[str, ...]:
        return tuple(lab for lab in self.labels if lab not in self.side_a)

    @property
    def display_sides(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """Smaller side first; on a tie the side holding the first label."""
        a, b = self.side_a, self.side_b
        return (b, a) if len(b) < len(a) else (a, b)

    @property
    def label(self) -> str:
        a, b = self.display_sides
        return "".join(a) + "|" + "".join(b)

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, text: str, labels: Sequence[str]) -> "Bipartition":
        """Parse ``"A|BC"``, ``"AB1|B2C"`` or ``"A,B1|B2,C"``."""
        labels = tuple(labels)
        if text.count("|") != 1:
            raise ValueError(f"cut {text!r} must contain exactly one '|'")
        left, right = text.split("|")
        sides = [_tokenize(part, labels) for part in (left, right)]
        if set(sides[0]) & set(sides[1]) or set(sides[0]) | set(sides[1]) != set(labels):
            raise ValueError(f"cut {text!r} does not split {labels} into two sides")
        return cls(tuple(sides[0]), labels)


def _tokenize(text: str, labels: tuple[str, ...]) -> list[str]:
    text = text.replace(",", "").replace(" ", "")
    pattern = "|".join(re.escape(lab) for lab in sorted(labels, key=len, reverse=True))
    tokens = re.findall(pattern, text)
    if "".join(tokens) != text or not tokens:
        raise ValueError(f"cannot read {text!r} as labels from {labels}")
    return tokens


class ClassKind(str, Enum):
    SEPARABLE = "separable"
    CUT = "cut"
    BISEPARABLE = "biseparable"


@dataclass(frozen=True)
class SeparabilityClass:
    kind: ClassKind
    cut: Bipartition | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassKind(self.kind))
        if (self.kind is ClassKind.CUT) != (self.cut is not None):
            raise ValueError("a cut is required exactly for the single-cut class")

    @classmethod
    def fully_separable(cls) -> "SeparabilityClass":
        return cls(ClassKind.SEPARABLE)

    @classmethod
    def single_cut(cls, cut: Bipartition) -> "SeparabilityClass":
        return cls(ClassKind.CUT, cut)

    @classmethod
    def biseparable(cls) -> "SeparabilityClass":
        return cls(ClassKind.BISEPARABLE)

    @property
    def label(self) -> str:
        return self.cut.label if self.kind is ClassKind.CUT else self.kind.value

    def cuts(self, spec: PartySpec) -> list[Bipartition]:
        if self.kind is ClassKind.BISEPARABLE:
            return enumerate_bipartitions(spec)
        if self.kind is ClassKind.CUT:
            check_cut(self.cut, spec)
            return [self.cut]
        return []

    def factorizations(self, spec: PartySpec) -> list[tuple[str, tuple[tuple[int, ...], ...]]]:
        """Admissible product structures as (label, particle blocks).

        A pure state is in the class iff it is a tensor product over the blocks
        of one of the returned factorizations.
        """
        if self.kind is ClassKind.SEPARABLE:
            if len(spec.groups) < 2:
                raise ValueError("full separability needs at least two groups")
            label = "|".join(spec.group_labels)
            return [(label, tuple(particles for _, particles in spec.groups))]
        return [(cut.label, cut_blocks(cut, spec)) for cut in self.cuts(spec)]


def check_cut(cut: Bipartition, spec: PartySpec) -> None:
    if cut.labels != spec.group_labels:
        raise ValueError(f"cut {cut.label} is defined over {cut.labels}, spec groups are {spec.group_labels}")


def enumerate_bipartitions(spec: PartySpec) -> list[Bipartition]:
    """All 2^(n-1) - 1 cuts of the groups, ordered by size of the smaller side, then lexicographically."""
    labels = spec.group_labels
    n = len(labels)
    if n < 2:
        raise ValueError("at least two groups are needed to form a bipartition")
    cuts = []
    for size in range(1, n // 2 + 1):
        for idx in combinations(range(n), size):
            if 2 * size == n and 0 not in idx:
                continue
            cuts.append(Bipartition(tuple(labels[i] for i in idx), labels))
    return cuts


def cut_blocks(cut: Bipartition, spec: PartySpec) -> tuple[tuple[int, ...], tuple[int, ...]]:
    check_cut(cut, spec)
    return spec.group_particles(cut.side_a), spec.group_particles(cut.side_b)


def cut_factor_dims(cut: Bipartition, spec: PartySpec) -> tuple[int, int, tuple[int, ...]]:
    """(dim_a, dim_b, slot_map) with ``slot_map[particle]`` its position once side A is moved first."""
    side_a, side_b = cut_blocks(cut, spec)
    slot_map = [0] * spec.n_particles
    for pos, particle in enumerate(side_a + side_b):
        slot_map[particle] = pos
    dim_a = int(np.prod([spec.particle_dims[p] for p in side_a]))
    dim_b = int(np.prod([spec.particle_dims[p] for p in side_b]))
    return dim_a, dim_b, tuple(slot_map)


def regroup_permutation(spec_single: PartySpec, copies: int) -> tuple[int, ...]:
    """Slot map from copy-major order (A1 B1 C1 A2 B2 C2) to party-major order (A1 A2 B1 B2 C1 C2).

    ``result[old] = new`` for every particle slot of the ``copies``-fold tensor power.
    """
    if copies < 1:
        raise ValueError("copies must be at least 1")
    counts = spec_single.particles_per_party
    n = spec_single.n_particles
    slot_map = [0] * (n * copies)
    for copy in range(copies):
        for party_idx, k in enumerate(counts):
            party_start = sum(counts[:party_idx])
            for j in range(k):
                old = copy * n + party_start + j
                slot_map[old] = party_start * copies + copy * k + j
    return tuple(slot_map)


def copies_spec(spec_single: PartySpec, copies: int) -> PartySpec:
    """Party-major spec of ``copies`` copies of a state."""
    dims = []
    for party in spec_single.parties:
        local = [spec_single.particle_dims[p] for p in spec_single.party_particles(party)]
        dims.extend(local * copies)
    return PartySpec(
        spec_single.parties,
        tuple(k * copies for k in spec_single.particles_per_party),
        tuple(dims),
        spec_single.grouping,
    )
