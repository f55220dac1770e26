from __future__ import annotations

import numpy as np
import pytest

# rho4 transcribed literally, times 12
RHO4_TIMES_12 = np.array([
    [4, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 4],
    [0] * 16,
    [0] * 16,
    [1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1],
    [0] * 16,
    [0] * 16,
    [1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1],
    [0] * 16,
    [0] * 16,
    [1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1],
    [0] * 16,
    [0] * 16,
    [1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1],
    [0] * 16,
    [0] * 16,
    [4, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 4],
], dtype=float)

# rho3 at theta = 0, times 9
RHO3_ZERO_TIMES_9 = np.zeros((8, 8))
RHO3_ZERO_TIMES_9[0, 0] = 8
RHO3_ZERO_TIMES_9[0, 7] = RHO3_ZERO_TIMES_9[7, 0] = 2
RHO3_ZERO_TIMES_9[7, 7] = 1


def ket(*amps) -> np.ndarray:
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = rng.standard_normal((d, rank or d)) + 1j * rng.standard_normal((d, rank or d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pt_by_loops(m: np.ndarray, dims: list[int], sub: int) -> np.ndarray:
    """Reference partial transpose written with explicit multi-index loops."""
    d = int(np.prod(dims))
    out = np.zeros_like(m)
    idx = list(np.ndindex(*dims))
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            a2, b2 = list(a), list(b)
            a2[sub], b2[sub] = b[sub], a[sub]
            i2 = int(np.ravel_multi_index(a2, dims))
            j2 = int(np.ravel_multi_index(b2, dims))
            out[i2, j2] = m[i, j]
    assert out.shape == (d, d)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
