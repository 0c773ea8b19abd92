import csv
import json
import subprocess
import sys

import pytest

from chuasync.cli import main

EX2 = {
    "params": {"alpha": 10.0, "beta": 15.0, "gamma": 0.1, "a": -1.31, "b": -0.75},
    "topology": {"n": 2, "edges": [[0, 1]]},
    "coupling": {"name": "linear", "k": 21.3},
    "pivot": 0,
    "sim": {"dt": 0.001, "t_end": 2, "seed": 0, "stride": 10},
}


@pytest.fixture
def write_cfg(tmp_path):
    def write(cfg, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(cfg))
        return str(path)
    return write


def with_(base, **changes):
    cfg = json.loads(json.dumps(base))
    cfg.update(changes)
    return cfg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_bundled(capsys):
    code, out, _ = run(capsys, "check", "--config", "example1")
    assert code == 0
    assert "synchronization certified" in out
    assert run(capsys, "check", "--config", "example2")[0] == 0


def test_check_uncertified(capsys, write_cfg):
    cfg = with_(EX2, coupling={"name": "linear", "k": 20.0})
    code, out, _ = run(capsys, "check", "--config", write_cfg(cfg))
    assert code == 1 and "not certified" in out


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "--config", "example1", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["certificate"]["hurwitz"] is True
    assert rep["certificate"]["spectral_abscissa"] == pytest.approx(-0.0748, abs=1e-3)
    assert rep["certificate"]["dimension"] == 38


def test_check_best_pivot(capsys, write_cfg):
    cfg = with_(EX2, pivot=None, topology={"n": 3, "generator": "star", "center": 0},
                coupling={"name": "linear", "k": 50})
    code, out, _ = run(capsys, "check", "--config", write_cfg(cfg), "--json")
    assert json.loads(out)["certificate"]["pivot"] in (1, 2)
    assert code == 0


@pytest.mark.parametrize("cfg", [
    with_(EX2, params={"alpha": 10.0, "beta": 15.0, "gamma": 0.1, "a": -1.31}),
    with_(EX2, coupling={"name": "linear", "k": -1}),
    with_(EX2, coupling={"name": "nope"}),
    with_(EX2, topology={"matrix": [[0, 1, 0], [1, 0, 1]]}),
    with_(EX2, pivot=5),
    with_(EX2, extra={}),
    with_(EX2, params={"alpha": 10.0, "beta": -1.0, "gamma": 0.1, "a": -1.31, "b": -0.75}),
])
def test_input_errors(capsys, write_cfg, cfg):
    code, _, err = run(capsys, "check", "--config", write_cfg(cfg))
    assert code == 2
    assert "input error" in err


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", "--config", str(bad))[0] == 2
    assert run(capsys, "check", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_threshold_two_node(capsys):
    code, out, _ = run(capsys, "threshold", "--config", "example2")
    assert code == 0
    assert "k > 21.282" in out
    rep = json.loads(run(capsys, "threshold", "--config", "example2", "--json")[1])
    assert rep["scanned_min_gain"] == pytest.approx(rep["two_node_threshold"], abs=1e-3)


def test_threshold_single_node(capsys, write_cfg):
    cfg = with_(EX2, topology={"n": 1, "edges": []})
    assert run(capsys, "threshold", "--config", write_cfg(cfg))[0] == 2


def test_threshold_unreachable(capsys, write_cfg):
    cfg = with_(EX2, topology={"n": 3, "edges": []}, threshold={"k_max": 10, "resolution": 0.01})
    code, out, _ = run(capsys, "threshold", "--config", write_cfg(cfg), "--json")
    assert code == 1
    assert json.loads(out)["scanned_min_gain"] is None


@pytest.mark.parametrize("coupling,expect", [
    ({"name": "linear_arctan", "c": 3}, 0),
    ({"name": "linear_arctan", "c": 3, "k1": 3.5, "k2": 4}, 1),
    ({"name": "linear", "k": 2}, 0),
    ({"name": "saturated", "k": 2, "s": 1}, 0),
])
def test_verify_coupling(capsys, write_cfg, coupling, expect):
    cfg = with_(EX2, coupling=coupling, verify={"samples": 20000, "pairs": 20000})
    code, out, _ = run(capsys, "verify-coupling", "--config", write_cfg(cfg), "--json")
    assert code == expect
    assert json.loads(out)["verdict"] == ("pass" if expect == 0 else "fail")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_simulate_outputs(capsys, write_cfg, tmp_path):
    out = tmp_path / "run"
    code, stdout, _ = run(capsys, "simulate", "--config", write_cfg(EX2), "--out", str(out), "--svg", "--json")
    assert code == 0
    rep = json.loads(stdout)
    traj = read_csv(out / "trajectory.csv")
    errs = read_csv(out / "errors.csv")
    assert traj[0] == ["t", "node", "x1", "x2", "x3"]
    assert errs[0] == ["t", "node", "norm"]
    assert len(traj) == 1 + 201 * 2 and len(errs) == 1 + 201
    assert (out / "errors.svg").read_text().startswith("<svg")
    assert json.loads((out / "report.json").read_text())["simulation"]["final_max_norm"] == \
        rep["simulation"]["final_max_norm"]
    assert rep["simulation"]["final_max_norm"] < rep["simulation"]["initial_max_norm"]
    assert rep["certificate"]["hurwitz"] is True


def test_simulate_byte_identical(capsys, write_cfg, tmp_path):
    cfg = write_cfg(EX2)
    for name in ("a", "b"):
        assert run(capsys, "simulate", "--config", cfg, "--out", str(tmp_path / name))[0] == 0
    for f in ("trajectory.csv", "errors.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_simulate_identical_initial(capsys, write_cfg, tmp_path):
    cfg = with_(EX2, sim={"dt": 0.001, "t_end": 1, "seed": 0, "stride": 100, "identical": True})
    run(capsys, "simulate", "--config", write_cfg(cfg), "--out", str(tmp_path))
    norms = [float(r[2]) for r in read_csv(tmp_path / "errors.csv")[1:]]
    assert max(norms) < 1e-12


def test_simulate_overrides(capsys, write_cfg, tmp_path):
    code, out, _ = run(capsys, "simulate", "--config", write_cfg(EX2), "--out", str(tmp_path),
                       "--t-end", "0.5", "--seed", "3", "--json")
    sim = json.loads(out)["simulation"]
    assert code == 0 and sim["t_end"] == 0.5 and sim["seed"] == 3


def test_simulate_bad_grid(capsys, write_cfg, tmp_path):
    code = run(capsys, "simulate", "--config", write_cfg(EX2), "--out", str(tmp_path), "--t-end", "0.0005")[0]
    assert code == 2


def test_simulate_divergence(capsys, write_cfg, tmp_path):
    cfg = with_(EX2, topology={"n": 1, "edges": []},
                params={"alpha": 15.61, "beta": 25.581, "gamma": 0.0, "a": -1.142, "b": -0.715},
                sim={"dt": 0.001, "t_end": 100, "seed": 1, "stride": 100})
    assert run(capsys, "simulate", "--config", write_cfg(cfg), "--out", str(tmp_path))[0] == 3


def test_scan_gain(capsys, tmp_path):
    code, _, _ = run(capsys, "scan", "--config", "example2", "--out", str(tmp_path))
    rows = read_csv(tmp_path / "scan.csv")
    assert code == 0
    assert rows[0] == ["k", "pivot", "k1", "k2", "spectral_abscissa", "hurwitz"]
    verdict = {float(r[0]): r[5] == "true" for r in rows[1:]}
    assert len(verdict) == 21
    assert not verdict[21.0] and verdict[21.5]
    assert all(v == (k > 21.282) for k, v in verdict.items())


def test_scan_single_value(capsys, write_cfg, tmp_path):
    cfg = with_(EX2, scan={"parameter": "k", "start": 21.3, "stop": 21.3, "step": 1})
    run(capsys, "scan", "--config", write_cfg(cfg), "--out", str(tmp_path))
    assert len(read_csv(tmp_path / "scan.csv")) == 2


def test_scan_pivot_star(capsys, write_cfg, tmp_path):
    cfg = with_(EX2, topology={"n": 3, "generator": "star", "center": 0},
                coupling={"name": "linear", "k": 50}, scan={"parameter": "pivot", "values": [0, 1, 2]})
    run(capsys, "scan", "--config", write_cfg(cfg), "--out", str(tmp_path))
    rows = read_csv(tmp_path / "scan.csv")[1:]
    assert [r[1] for r in rows] == ["0", "1", "2"]
    assert rows[0][5] == "false" and rows[1][5] == "true"


def test_scan_unknown_parameter(capsys, write_cfg, tmp_path):
    cfg = with_(EX2, scan={"parameter": "zeta", "values": [1]})
    assert run(capsys, "scan", "--config", write_cfg(cfg), "--out", str(tmp_path))[0] == 2


def test_asymmetric_warning(capsys, write_cfg):
    cfg = with_(EX2, topology={"matrix": [[0, 1], [0, 0]]})
    _, _, err = run(capsys, "check", "--config", write_cfg(cfg))
    assert "not symmetric" in err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "chuasync.cli", "check", "--config", "example2", "--json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["certificate"]["hurwitz"] is True


def test_missing_subcommand():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
