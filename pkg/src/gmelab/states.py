"""Named states, local projections and the two conversion protocols.

All kets are normalized. Conventions fixed here:

* ``|theta> = cos(theta)|0> + sin(theta)|1>``
* ``|GHZ_N> = (|0...0> + |1...1>)/sqrt(2)``
* ``|W> = (|001> + |010> + |100>)/sqrt(3)``
* ``|Psi+> = (|00> + |11>)/sqrt(2)``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .operators import (
    DensityMatrix,
    NumericalError,
    basis_ket,
    normalize,
    permute_factors,
    projector as ket_projector,
)
from .partitions import PartySpec, copies_spec, regroup_permutation

SQRT2 = np.sqrt(2)

PSI_PLUS = normalize(basis_ket("00") + basis_ket("11"))
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

STATE_NAMES = ("psiplus", "ghz", "w3", "theta", "rho1", "rho2", "phi4", "psi4", "rho3", "rho4")


def ghz_ket(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("GHZ states need at least 2 qubits")
    return normalize(basis_ket("0" * n) + basis_ket("1" * n))


def w_ket() -> np.ndarray:
    return normalize(basis_ket("001") + basis_ket("010") + basis_ket("100"))


def theta_ket(theta: float) -> np.ndarray:
    _check_theta(theta)
    return np.array([np.cos(theta), np.sin(theta)], dtype=complex)


def _check_theta(theta: float) -> None:
    if not (0 <= theta <= np.pi / 2 + 1e-15):
        raise ValueError(f"theta={theta} outside [0, pi/2]")


def _labels(n: int) -> str:
    return "ABCDEFGHIJKLMNOPQRSTUVWXYZ"[:n]


@dataclass(frozen=True)
class NamedState:
    """A state together with the parties holding it.

    ``value`` is a normalized ket for pure states, a :class:`DensityMatrix`
    otherwise; :attr:`rho` always gives the density matrix.
    """

    name: str
    spec: PartySpec
    value: DensityMatrix | np.ndarray
    params: Mapping[str, float] = field(default_factory=dict)

    @property
    def is_pure(self) -> bool:
        return not isinstance(self.value, DensityMatrix)

    @property
    def rho(self) -> DensityMatrix:
        if isinstance(self.value, DensityMatrix):
            return self.value
        return DensityMatrix(ket_projector(self.value), self.spec.particle_dims)

    @property
    def ket(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError(f"{self.name} is a mixed state")
        return self.value


def _pure(name, spec, ket, **params) -> NamedState:
    return NamedState(name, spec, normalize(ket), dict(params))


def bd_terms(name: str, theta: float = 0.0) -> list[tuple[float, np.ndarray, str]]:
    """Explicit biseparable decomposition of rho1(theta) or rho2.

    Returns (weight, ket, cut label) triples whose mixture is the state.
    """
    if name == "rho1":
        t = theta_ket(theta)
        return [
            (0.5, np.kron(t, PSI_PLUS), "A|BC"),
            (0.5, np.kron(PSI_PLUS, t), "C|AB"),
        ]
    if name == "rho2":
        ab_cd = np.kron(PSI_PLUS, PSI_PLUS)
        # Psi+_AD (x) Psi+_BC, written in A D B C order and moved to A B C D.
        ad_bc = permute_factors(np.kron(PSI_PLUS, PSI_PLUS), [2] * 4, (0, 3, 1, 2))
        return [(0.5, ab_cd, "AB|CD"), (0.5, ad_bc, "AD|BC")]
    raise ValueError(f"no explicit decomposition stored for {name!r}")


def _mixture(terms) -> np.ndarray:
    return sum(w * ket_projector(k) for w, k, _ in terms)


def build_state(name: str, **params) -> NamedState:
    """Construct one of :data:`STATE_NAMES`.

    ``theta`` is required for ``theta``, ``rho1`` and ``rho3``; ``n`` for
    ``ghz``. ``rho3`` also accepts ``variant`` (see :func:`projector`).
    """
    key = name.lower()
    if key == "psiplus":
        return _pure("psiplus", PartySpec.qubits("AB"), PSI_PLUS)
    if key == "ghz":
        n = int(params.get("n", 3))
        return _pure("ghz", PartySpec.qubits(_labels(n)), ghz_ket(n), n=n)
    if key == "w3":
        return _pure("w3", PartySpec.qubits("ABC"), w_ket())
    if key == "theta":
        theta = _theta_param(params)
        return _pure("theta", PartySpec.qubits("A"), theta_ket(theta), theta=theta)
    if key == "rho1":
        theta = _theta_param(params)
        rho = DensityMatrix(_mixture(bd_terms("rho1", theta)), (2, 2, 2))
        return NamedState("rho1", PartySpec.qubits("ABC"), rho, {"theta": theta})
    if key == "rho2":
        rho = DensityMatrix(_mixture(bd_terms("rho2")), (2,) * 4)
        return NamedState("rho2", PartySpec.qubits("ABCD"), rho)
    if key == "phi4":
        # |Psi+>_{A B1} |Psi+>_{B2 C}; B holds two particles.
        return _pure("phi4", PartySpec.qubits("ABC", (1, 2, 1)), np.kron(PSI_PLUS, PSI_PLUS))
    if key == "psi4":
        ac_bd = permute_factors(np.kron(PSI_PLUS, PSI_PLUS), [2] * 4, (0, 2, 1, 3))
        ket = basis_ket("0000") + basis_ket("1111") + ac_bd
        return _pure("psi4", PartySpec.qubits("ABCD"), ket)
    if key == "rho3":
        theta = _theta_param(params)
        variant = params.get("variant", "orthonormal")
        pac = projector("PAC", theta, variant=variant)
        pb = projector("PB")
        state, _ = apply_local_maps(
            two_copies(build_state("rho1", theta=theta)),
            {"A": pac, "B": pb, "C": pac},
        )
        return NamedState("rho3", state.spec, state.value, {"theta": theta})
    if key == "rho4":
        pb = projector("PB")
        state, _ = apply_local_maps(two_copies(build_state("rho2")), dict.fromkeys("ABCD", pb))
        return NamedState("rho4", state.spec, state.value)
    raise ValueError(f"unknown state {name!r}; known: {', '.join(STATE_NAMES)}")


def _theta_param(params) -> float:
    if "theta" not in params:
        raise ValueError("this state needs a theta parameter")
    theta = float(params["theta"])
    _check_theta(theta)
    return theta


def rho3_zero_matrix() -> np.ndarray:
    """The closed-form 8x8 matrix of rho3 at theta = 0."""
    m = np.zeros((8, 8))
    m[0, 0], m[0, 7], m[7, 0], m[7, 7] = 8, 2, 2, 1
    return m / 9


def rho4_matrix() -> np.ndarray:
    """The closed-form 16x16 matrix of rho4."""
    support = [0, 3, 6, 9, 12, 15]
    m = np.zeros((16, 16))
    for i in support:
        for j in support:
            m[i, j] = 1
    for i, j in [(3, 6), (3, 9), (6, 12), (9, 12)]:
        m[i, j] = m[j, i] = 0
    for i in (0, 15):
        for j in (0, 15):
            m[i, j] = 4
    return m / 12


@dataclass(frozen=True)
class LocalMap:
    """A (sub)normalized r x c operator applied by one party.

    ``strict=False`` skips the operator-norm check (used only for the literal
    printed PAC matrix).
    """

    matrix: np.ndarray
    target_party: str | None = None
    strict: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        r, c = m.shape
        if r > c:
            raise ValueError(f"local map must not increase dimension ({r}x{c})")
        norm = np.linalg.norm(m, 2)
        if self.strict and norm > 1 + 1e-12:
            raise ValueError(f"local map has operator norm {norm:.6g} > 1")

    @property
    def in_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def out_dim(self) -> int:
        return self.matrix.shape[0]

    def to(self, party: str) -> "LocalMap":
        return LocalMap(self.matrix, party, self.strict)


def projector(name: str, theta: float | None = None, variant: str = "orthonormal") -> LocalMap:
    """The two-qubit-to-one-qubit maps used by the protocols.

    ``PB`` keeps {|00>, |11>}; ``PBprime`` sends (|01>+|10>)/sqrt2 to |0> and
    |00> to |1>; ``Attn`` damps |1> by 1/sqrt2; ``PAC`` keeps |theta theta>
    and its symmetric complement.

    For ``PAC`` the second row with ``variant="orthonormal"`` is
    ``-(|theta theta_perp> + |theta_perp theta>)/sqrt2``. ``variant="printed"``
    flips the sign of its last entry, which makes the rows non-orthogonal for
    0 < theta < pi/2; the two agree at theta = 0 and pi/2.
    """
    if name == "PB":
        return LocalMap([[1, 0, 0, 0], [0, 0, 0, 1]])
    if name == "PBprime":
        return LocalMap([[0, 1 / SQRT2, 1 / SQRT2, 0], [1, 0, 0, 0]])
    if name == "Attn":
        return LocalMap([[1, 0], [0, 1 / SQRT2]])
    if name == "PAC":
        if theta is None:
            raise ValueError("PAC needs theta")
        _check_theta(theta)
        c, s = np.cos(theta), np.sin(theta)
        s2, c2 = np.sin(2 * theta) / SQRT2, np.cos(2 * theta) / SQRT2
        if variant == "orthonormal":
            last = -s2
        elif variant == "printed":
            last = s2
        else:
            raise ValueError(f"unknown PAC variant {variant!r}")
        m = [[c * c, c * s, c * s, s * s], [s2, -c2, -c2, last]]
        return LocalMap(m, strict=variant == "orthonormal")
    raise ValueError(f"unknown projector {name!r}")


def two_copies(state: NamedState) -> NamedState:
    """rho (x) rho with each party's two particles made adjacent."""
    spec = state.spec
    slot_map = regroup_permutation(spec, 2)
    dims2 = spec.particle_dims * 2
    new_spec = copies_spec(spec, 2)
    if state.is_pure:
        ket = permute_factors(np.kron(state.ket, state.ket), dims2, slot_map)
        return NamedState(state.name + "^2", new_spec, ket, dict(state.params))
    rho = state.rho.matrix
    m = permute_factors(np.kron(rho, rho), dims2, slot_map)
    return NamedState(state.name + "^2", new_spec, DensityMatrix(m, new_spec.particle_dims), dict(state.params))


def apply_local_maps(
    state: NamedState, maps: Mapping[str, LocalMap] | Sequence[LocalMap]
) -> tuple[NamedState, float]:
    """Apply one local map per party; return the renormalized state and Tr(K rho K^dag).

    ``maps`` is keyed by party label or given in party order. Parties whose map
    changes the local dimension end up holding a single particle of the
    output dimension.
    """
    spec = state.spec
    if not isinstance(maps, Mapping):
        maps = dict(zip(spec.parties, maps))
    missing = set(spec.parties) - set(maps)
    if missing:
        raise ValueError(f"no local map given for parties {sorted(missing)}")
    kraus = np.ones((1, 1), dtype=complex)
    counts, dims = [], []
    for party in spec.parties:
        lm = maps[party]
        local = [spec.particle_dims[p] for p in spec.party_particles(party)]
        if lm.in_dim != int(np.prod(local)):
            raise ValueError(f"map for {party} expects dim {lm.in_dim}, party holds {int(np.prod(local))}")
        kraus = np.kron(kraus, lm.matrix)
        if lm.out_dim == lm.in_dim:
            counts.append(len(local))
            dims.extend(local)
        else:
            counts.append(1)
            dims.append(lm.out_dim)
    new_spec = PartySpec(spec.parties, tuple(counts), tuple(dims), spec.grouping)
    if state.is_pure:
        out = kraus @ state.ket
        prob = float(np.vdot(out, out).real)
        _check_prob(prob)
        value = out / np.sqrt(prob)
    else:
        sigma = kraus @ state.rho.matrix @ kraus.conj().T
        prob = float(np.trace(sigma).real)
        _check_prob(prob)
        sigma = sigma / prob
        value = DensityMatrix((sigma + sigma.conj().T) / 2, new_spec.particle_dims)
    return NamedState(state.name, new_spec, value, dict(state.params)), prob


def _check_prob(prob: float) -> None:
    if prob < 1e-14:
        raise NumericalError(f"success probability {prob:.3g} is zero: projection incompatible with the state")


def fidelity(state: NamedState, target_ket: np.ndarray) -> float:
    """<target| rho |target> for a pure target."""
    t = np.asarray(target_ket, dtype=complex)
    if state.is_pure:
        return float(abs(np.vdot(t, state.ket)) ** 2)
    return float(np.vdot(t, state.rho.matrix @ t).real)


@dataclass(frozen=True)
class Branch:
    outcome: str
    probability: float
    fidelity: float
    correction: str


@dataclass(frozen=True)
class ProtocolResult:
    final: NamedState
    success_prob: float
    exact_prob: Fraction
    branches: tuple[Branch, ...]
    intermediate: NamedState | None = None


_BRA = {
    "0": np.array([[1, 0]], dtype=complex),
    "+": np.array([[1, 1]], dtype=complex) / SQRT2,
    "-": np.array([[1, -1]], dtype=complex) / SQRT2,
}
_I2 = np.eye(2, dtype=complex)


def protocol_w_to_ghz() -> ProtocolResult:
    """Two copies of W -> GHZ.

    A projects its second particle and C its first onto |0>. Both copies
    collapse to (|01>+|10>)/sqrt2, which the bit flips X on A's and C's
    survivors turn into |Psi+>_{A B1}|Psi+>_{B2 C}. B then applies PB.
    """
    start = two_copies(build_state("w3"))
    a_map = LocalMap(PAULI_X @ np.kron(_I2, _BRA["0"]))
    c_map = LocalMap(PAULI_X @ np.kron(_BRA["0"], _I2))
    mid, p1 = apply_local_maps(start, {"A": a_map, "B": LocalMap(np.eye(4)), "C": c_map})
    final, p2 = apply_local_maps(mid, {"A": LocalMap(_I2), "B": projector("PB"), "C": LocalMap(_I2)})
    final = NamedState("w_to_ghz", final.spec, final.value)
    fid = fidelity(final, ghz_ket(3))
    branch = Branch("00", p1 * p2, fid, "X on A1 and C2")
    return ProtocolResult(final, p1 * p2, Fraction(2, 9), (branch,), intermediate=mid)


def protocol_ghz_to_w() -> ProtocolResult:
    """Two copies of GHZ -> W.

    A measures its second particle and C its first in the sigma_x basis. A
    "-" from C leaves (|00>-|11>) on A1 B1 and is undone by Z on A1; a "-"
    from A is undone by Z on C2. B then applies PBprime followed by Attn on
    its surviving qubit. Probabilities are summed over the four outcomes.
    """
    start = two_copies(build_state("ghz", n=3))
    b_map = LocalMap(projector("Attn").matrix @ projector("PBprime").matrix)
    target = w_ket()
    branches = []
    total = 0.0
    final = None
    for a_out in "+-":
        for c_out in "+-":
            a_fix = PAULI_Z if c_out == "-" else _I2
            c_fix = PAULI_Z if a_out == "-" else _I2
            a_map = LocalMap(a_fix @ np.kron(_I2, _BRA[a_out]))
            c_map = LocalMap(c_fix @ np.kron(_BRA[c_out], _I2))
            out, prob = apply_local_maps(start, {"A": a_map, "B": b_map, "C": c_map})
            out = NamedState("ghz_to_w", out.spec, out.value)
            fixes = ["Z on A1" if c_out == "-" else "", "Z on C2" if a_out == "-" else ""]
            correction = " and ".join(f for f in fixes if f) or "identity"
            branches.append(Branch(a_out + c_out, prob, fidelity(out, target), correction))
            total += prob
            if final is None:
                final = out
    return ProtocolResult(final, total, Fraction(3, 8), tuple(branches))


def separable_control_terms() -> list[tuple[float, np.ndarray, str]]:
    """Twelve two-qubit product states mixing to 3/4 * I/4 + 1/4 * Psi+.

    Six correlated Pauli-eigenstate pairs with weight 7/48 and six
    anti-correlated ones with weight 1/48.
    """
    z0, z1 = basis_ket("0"), basis_ket("1")
    xp, xm = normalize(z0 + z1), normalize(z0 - z1)
    yp, ym = normalize(z0 + 1j * z1), normalize(z0 - 1j * z1)
    correlated = [(z0, z0), (z1, z1), (xp, xp), (xm, xm), (yp, ym), (ym, yp)]
    anti = [(z0, z1), (z1, z0), (xp, xm), (xm, xp), (yp, yp), (ym, ym)]
    terms = [(7 / 48, np.kron(a, b), "A|B") for a, b in correlated]
    terms += [(1 / 48, np.kron(a, b), "A|B") for a, b in anti]
    return terms


def separable_control() -> NamedState:
    rho = DensityMatrix(_mixture(separable_control_terms()), (2, 2))
    return NamedState("separable_control", PartySpec.qubits("AB"), rho)


def maximally_mixed_state(n: int) -> NamedState:
    d = 2**n
    return NamedState("maxmixed", PartySpec.qubits(_labels(n)), DensityMatrix(np.eye(d) / d, (2,) * n), {"n": n})
