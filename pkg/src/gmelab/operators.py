"""Dense operators on small tensor-product Hilbert spaces.

States, witnesses and differences of states are all plain ``numpy`` complex
arrays. :class:`DensityMatrix` adds the factor bookkeeping (``dims``) that the
subsystem-indexed operations need, and validates the usual density-matrix
invariants on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MAX_DIM = 256
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
INPUT_HERMITIAN_TOL = 1e-10


class NumericalError(ArithmeticError):
    """A computation produced an ill-defined or degenerate result."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite operator with declared factor dims.

    ``dims`` lists the local dimension of every tensor factor (particle) in
    canonical order; their product must equal the matrix size.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        check_density_matrix(m, self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def purity(self) -> float:
        return hs_inner(self.matrix, self.matrix)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


Operand = Union[DensityMatrix, np.ndarray]


def check_density_matrix(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[0]} exceeds supported maximum {MAX_DIM}")
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"factor dims {tuple(dims)} do not multiply to {m.shape[0]}")
    dev = np.abs(m - m.conj().T).max()
    if dev > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")
    tr = np.trace(m)
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"trace is {tr.real:.15g}, expected 1")
    low = np.linalg.eigvalsh(m)[0]
    if low < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {low:.3g})")


def as_matrix(a: Operand) -> np.ndarray:
    if isinstance(a, DensityMatrix):
        return a.matrix
    return np.asarray(a, dtype=complex)


def _dims_of(rho: Operand, dims: Sequence[int] | None) -> tuple[int, ...]:
    if isinstance(rho, DensityMatrix):
        return rho.dims
    if dims is None:
        raise ValueError("factor dims are required for a raw matrix")
    return tuple(dims)


def _require_hermitian(m: np.ndarray, tol: float = INPUT_HERMITIAN_TOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def basis_ket(bits: str) -> np.ndarray:
    """Computational-basis qubit ket, e.g. ``basis_ket("010")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def pure_state(ket, dims: Sequence[int]) -> DensityMatrix:
    return DensityMatrix(projector(normalize(ket)), tuple(dims))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, tuple(dims))


def tensor(a, b):
    """Kronecker product of two kets or two operators.

    Density matrices keep their factor bookkeeping: the result's ``dims`` are
    the concatenation of both operands' dims.
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    a, b = as_matrix(a), as_matrix(b)
    if a.ndim != b.ndim:
        raise ValueError("tensor operands must both be kets or both be matrices")
    return np.kron(a, b)


def permute_factors(m: Operand, dims: Sequence[int], slot_map: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator or ket.

    ``slot_map[old] = new`` gives the new position of each factor.
    """
    m = as_matrix(m)
    dims = list(dims)
    n = len(dims)
    if sorted(slot_map) != list(range(n)):
        raise ValueError(f"{tuple(slot_map)} is not a permutation of {n} factors")
    axes = [0] * n
    for old, new in enumerate(slot_map):
        axes[new] = old
    new_dims = [dims[a] for a in axes]
    d = int(np.prod(dims))
    if m.ndim == 1:
        return m.reshape(dims).transpose(axes).reshape(d)
    t = m.reshape(dims + dims).transpose(axes + [a + n for a in axes])
    return t.reshape(int(np.prod(new_dims)), -1)


def inverse_permutation(slot_map: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(slot_map)
    for old, new in enumerate(slot_map):
        inv[new] = old
    return tuple(inv)


def partial_transpose(
    rho: Operand, subsystems: int | Iterable[int], dims: Sequence[int] | None = None
) -> np.ndarray:
    """Transpose the indices of the chosen factor(s) only."""
    dims = list(_dims_of(rho, dims))
    m = as_matrix(rho)
    n = len(dims)
    subs = [subsystems] if isinstance(subsystems, (int, np.integer)) else list(subsystems)
    for s in subs:
        if not 0 <= s < n:
            raise IndexError(f"subsystem {s} out of range for {n} factors")
    axes = list(range(2 * n))
    for s in set(subs):
        axes[s], axes[s + n] = axes[s + n], axes[s]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def partial_trace(
    rho: Operand, keep: Iterable[int], dims: Sequence[int] | None = None
) -> DensityMatrix:
    """Reduced state on the factors in ``keep`` (returned in ascending order)."""
    dims = list(_dims_of(rho, dims))
    keep = sorted(set(keep))
    n = len(dims)
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep {keep} out of range for {n} factors")
    drop = [i for i in range(n) if i not in keep]
    t = as_matrix(rho).reshape(dims + dims)
    t = t.transpose(keep + drop + [k + n for k in keep] + [k + n for k in drop])
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    reduced = np.einsum("ajbj->ab", t.reshape(dk, dd, dk, dd))
    return DensityMatrix(reduced, tuple(dims[k] for k in keep))


def hs_inner(a: Operand, b: Operand) -> float:
    """Hilbert-Schmidt inner product Tr(a b) of two Hermitian operators."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    _require_hermitian(a)
    _require_hermitian(b)
    value = np.vdot(a, b)
    if abs(value.imag) > INPUT_HERMITIAN_TOL:
        raise NumericalError(f"Tr(ab) has imaginary part {value.imag:.3g}")
    return float(value.real)


def hs_distance(a: Operand, b: Operand) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def hermitian_eig(m: Operand, method: str = "lapack") -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    ``method="jacobi"`` uses the in-repo cyclic Jacobi solver instead of LAPACK.
    """
    m = as_matrix(m)
    _require_hermitian(m)
    h = (m + m.conj().T) / 2
    if method == "lapack":
        return np.linalg.eigh(h)
    if method == "jacobi":
        return jacobi_eigh(h)
    raise ValueError(f"unknown eigensolver {method!r}")


def jacobi_eigh(
    m: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi eigensolver for Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation that zeroes it.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = 0.5 * np.arctan2(2 * mag, (a[p, p] - a[q, q]).real)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ rot
    else:
        raise NumericalError("Jacobi eigensolver did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
