from __future__ import annotations

import json

import jsonschema
import numpy as np
import pytest

from conftest import RHO3_ZERO_TIMES_9
from gmelab import io
from gmelab.cli import EXIT_INPUT, EXIT_NUMERIC, main
from gmelab.pipeline import point_seed, sweep_theta, theta_grid
from gmelab.gilbert import GilbertConfig
from gmelab.states import build_state


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_state_file_round_trip_is_byte_identical(tmp_path):
    for name, params in [("rho3", {"theta": 0.37}), ("psi4", {}), ("phi4", {})]:
        s = build_state(name, **params)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        io.save_state(p1, s)
        rho, spec, loaded_name = io.load_state(p1)
        io.save_state(p2, (rho, spec))
        text1 = p1.read_text()
        assert loaded_name == name
        assert np.array_equal(rho.matrix, s.rho.matrix)
        assert spec == s.spec
        io.save_state(p2, io.NamedState(loaded_name, spec, rho))
        assert p2.read_text() == text1


def test_state_load_rejects_invalid_matrix(tmp_path):
    s = build_state("ghz", n=2)
    data = io.state_to_json(s.rho, s.spec)
    data["matrix"][0][0] = [0.9, 0.0]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        io.load_state(p)
    del data["matrix"]
    p.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        io.load_state(p)


def test_history_csv_round_trip(tmp_path):
    hist = [(50, 0.1), (100, 0.0712345678901234)]
    p = tmp_path / "h.csv"
    p.write_text(io.history_csv(hist))
    assert p.read_text().splitlines()[0] == "correction,d_squared"
    assert io.read_history(p) == hist
    p.write_text("c,d\n1,2\n")
    with pytest.raises(ValueError):
        io.read_history(p)


def test_cli_state_rho3_zero(tmp_path, capsys):
    out = tmp_path / "r3.json"
    code, _, _ = run_cli(["state", "rho3", "--theta", "0", "--out", str(out)], capsys)
    assert code == 0
    rho, _, _ = io.load_state(out)
    assert np.abs(rho.matrix - RHO3_ZERO_TIMES_9 / 9).max() < 1e-12


def test_cli_state_ghz4_rank_one(capsys):
    code, out, _ = run_cli(["state", "ghz", "--n", "4"], capsys)
    assert code == 0
    rho, spec, _ = io.loads_state(out)
    assert spec.parties == ("A", "B", "C", "D")
    assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 1


def test_cli_invalid_inputs(tmp_path, capsys):
    assert run_cli(["state", "nosuch"], capsys)[0] == EXIT_INPUT
    assert run_cli(["state", "rho3", "--theta", "3"], capsys)[0] == EXIT_INPUT
    assert run_cli(["gilbert", "nosuch"], capsys)[0] == EXIT_INPUT
    assert run_cli(["gilbert", "rho2", "--class", "cut", "A|XY"], capsys)[0] == EXIT_INPUT
    assert run_cli(["state", "ghz", "--out", str(tmp_path / "no" / "dir.json")], capsys)[0] == EXIT_INPUT


def test_cli_numerical_failure(tmp_path, capsys):
    p = tmp_path / "h.csv"
    p.write_text(io.history_csv([(c, 0.1) for c in range(50, 2000, 50)]))
    assert run_cli(["estimate", str(p)], capsys)[0] == EXIT_NUMERIC


def test_cli_gilbert_maximally_mixed(tmp_path, capsys):
    report = tmp_path / "r.json"
    hist = tmp_path / "h.csv"
    code, _, _ = run_cli(
        ["gilbert", "maxmixed", "--n", "3", "--class", "biseparable", "--out", str(report), "--history", str(hist)],
        capsys,
    )
    assert code == 0
    data = json.loads(report.read_text())
    jsonschema.validate(data, io.report_schema())
    assert data["d_last"] < 1e-6
    assert data["d_wit"] == 0
    assert hist.read_text().splitlines()[0] == "correction,d_squared"


def test_cli_gilbert_report_schema_and_reproducibility(tmp_path, capsys):
    args = ["gilbert", "rho3", "--theta", "0", "--class", "biseparable", "--max-corrections", "600",
            "--restarts", "5", "--seed", "17", "--check-samples", "500"]
    outs = []
    for k in range(2):
        r, h = tmp_path / f"r{k}.json", tmp_path / f"h{k}.csv"
        assert run_cli(args + ["--out", str(r), "--history", str(h)], capsys)[0] == 0
        outs.append((r.read_bytes(), h.read_bytes()))
    assert outs[0] == outs[1]
    data = json.loads(outs[0][0])
    jsonschema.validate(data, io.report_schema())
    assert data["seed"] == 17 and data["corrections"] == 600
    assert [row["cut"] for row in data["witness"]["per_class_max"]] == ["A|BC", "B|AC", "C|AB"]
    d2 = [float(line.split(",")[1]) for line in outs[0][1].decode().splitlines()[1:]]
    assert all(b <= a for a, b in zip(d2, d2[1:]))
    assert data["d_wit"] <= data["d_last"]


def test_cli_witness_reference_css(capsys):
    code, out, _ = run_cli(["witness", "rho4", "--css", "reference-rho4", "--restarts", "20", "--check-samples", "0"],
                           capsys)
    assert code == 0
    data = json.loads(out)
    assert data["d_wit"] == pytest.approx(0.01208, abs=5e-4)


def test_cli_negativity_and_g3pe(capsys):
    code, out, _ = run_cli(["negativity", "phi4"], capsys)
    data = json.loads(out)
    assert code == 0 and data["tripartite"] == pytest.approx(3 ** (1 / 3))
    code, out, _ = run_cli(["negativity", "phi4", "--grouping", "particle", "--cut", "AB1|B2C"], capsys)
    assert json.loads(out)["per_cut"]["AB1|B2C"] == pytest.approx(0, abs=1e-12)
    code, out, _ = run_cli(["g3pe", "ghz", "--n", "3"], capsys)
    assert json.loads(out)["g3pe"] == pytest.approx(1)


def test_cli_protocols(capsys):
    code, out, _ = run_cli(["protocols"], capsys)
    data = json.loads(out)
    assert data["w_to_ghz"]["exact"] == "2/9" and data["w_to_ghz"]["prob"] == pytest.approx(2 / 9, abs=1e-12)
    assert data["ghz_to_w"]["exact"] == "3/8" and data["ghz_to_w"]["prob"] == pytest.approx(3 / 8, abs=1e-12)
    assert all(f == pytest.approx(1, abs=1e-12) for k in data for f in data[k]["fidelities"])


def test_sweep_single_point_matches_gilbert(tmp_path, capsys):
    theta = 0.5
    args = ["--max-corrections", "200", "--restarts", "3", "--seed", "5", "--check-samples", "0"]
    csv_path = tmp_path / "s.csv"
    gp = tmp_path / "s.gp"
    code, _, _ = run_cli(["sweep", "--from", str(theta), "--to", str(theta), "--steps", "1",
                          "--out", str(csv_path), "--gnuplot", str(gp)] + args, capsys)
    assert code == 0
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "theta,d_last,d_est,d_wit,corrections" and len(rows) == 2
    assert "plot" in gp.read_text()
    seed = point_seed(5, 0)
    code, out, _ = run_cli(["gilbert", "rho3", "--theta", str(theta), "--class", "biseparable", "--no-css",
                            "--seed", str(seed)] + args[:4] + args[6:], capsys)
    data = json.loads(out)
    fields = rows[1].split(",")
    assert float(fields[1]) == data["d_last"]
    assert float(fields[3]) == data["d_wit"]


def test_sweep_parallel_equals_sequential():
    cfg = GilbertConfig(max_corrections=60, rng_seed=3)
    a = sweep_theta(0, np.pi / 2, 3, cfg, restarts=2, check_samples=0, workers=0)
    b = sweep_theta(0, np.pi / 2, 3, cfg, restarts=2, check_samples=0, workers=2)
    assert a == b
    assert [r.theta for r in a] == sorted(r.theta for r in a)


def test_theta_grid_validation():
    with pytest.raises(ValueError):
        theta_grid(0, 1, 0)
    with pytest.raises(ValueError):
        theta_grid(0, 2, 4)
    with pytest.raises(ValueError):
        theta_grid(0, 1, 1)
    assert len(theta_grid(0, np.pi / 2, 16)) == 16


def test_point_seeds_distinct_and_stable():
    seeds = [point_seed(42, i) for i in range(16)]
    assert len(set(seeds)) == 16
    assert seeds == [point_seed(42, i) for i in range(16)]
