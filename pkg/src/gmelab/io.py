"""File formats: state JSON, history CSV, run reports."""

from __future__ import annotations

import csv
import io as _io
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .operators import DensityMatrix
from .partitions import PartySpec
from .states import NamedState

HISTORY_HEADER = ("correction", "d_squared")


def matrix_to_pairs(m) -> list[list[list[float]]]:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def pairs_to_matrix(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 3 or a.shape[0] != a.shape[1] or a.shape[2] != 2:
        raise ValueError("matrix must be a square array of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def state_to_json(rho: DensityMatrix, spec: PartySpec, name: str | None = None) -> dict:
    data = spec.to_json()
    if name is not None:
        data = {"name": name, **data}
    data["matrix"] = matrix_to_pairs(rho.matrix)
    return data


def dumps_state(rho: DensityMatrix, spec: PartySpec, name: str | None = None) -> str:
    """Canonical text form: one matrix row per line, shortest round-trip floats."""
    data = state_to_json(rho, spec, name)
    matrix = data.pop("matrix")
    head = json.dumps(data)[:-1]
    rows = ",\n  ".join(json.dumps(row, separators=(",", ":")) for row in matrix)
    return f'{head}, "matrix": [\n  {rows}\n]}}\n'


def loads_state(text: str) -> tuple[DensityMatrix, PartySpec, str | None]:
    data = json.loads(text)
    try:
        spec = PartySpec.from_json(data)
        m = pairs_to_matrix(data["matrix"])
    except KeyError as exc:
        raise ValueError(f"state file is missing field {exc.args[0]!r}") from None
    return DensityMatrix(m, spec.particle_dims), spec, data.get("name")


def save_state(path, state: NamedState | tuple[DensityMatrix, PartySpec]) -> None:
    if isinstance(state, NamedState):
        text = dumps_state(state.rho, state.spec, state.name)
    else:
        text = dumps_state(*state)
    Path(path).write_text(text)


def load_state(path) -> tuple[DensityMatrix, PartySpec, str | None]:
    return loads_state(Path(path).read_text())


def history_csv(history) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HISTORY_HEADER)
    for c, d2 in history:
        w.writerow([int(c), repr(float(d2))])
    return buf.getvalue()


def read_history(path) -> list[tuple[int, float]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != HISTORY_HEADER:
            raise ValueError(f"history file must start with header {','.join(HISTORY_HEADER)}")
        return [(int(c), float(d2)) for c, d2 in reader]


def report_schema() -> dict:
    return json.loads(resources.files("gmelab").joinpath("report.schema.json").read_text())


def dumps_json(data) -> str:
    return json.dumps(data, indent=2) + "\n"
