import json
import subprocess
import sys

import numpy as np
import pytest

from mepcomp.cli import main
from mepcomp.coordsim import KeyedDataset, save_dataset
from mepcomp.instance import load_instance, save_instance


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def inst_file(tmp_path, three_point):
    p = tmp_path / "three.json"
    save_instance(three_point, p)
    return str(p)


def test_bounds(capsys):
    code, out, _ = run(["bounds", "--alpha", "1,1.5"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["upper"] for r in rows] == pytest.approx([4, 3.375])
    code, out, _ = run(["bounds", "--alpha", "2"], capsys)
    assert json.loads(out)["rows"][0]["worst_lower"] == pytest.approx(16 / 9)
    code, out, _ = run(["bounds"], capsys)
    assert code == 0 and json.loads(out)["rows"] == []


def test_bounds_csv(capsys):
    code, out, _ = run(["bounds", "--alpha", "1,2", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert lines[0] == "alpha,upper,worst_lower,convex" and len(lines) == 3


def test_bounds_bad_alpha(capsys):
    code, _, err = run(["bounds", "--alpha", "0.5"], capsys)
    assert code == 1 and "alpha" in err


def test_eval(inst_file, capsys):
    code, out, _ = run(["eval", "--instance", inst_file, "--alpha", "1,1.5"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    r0 = [r for r in rows if r["v"] == 0 and r["alpha"] == 1][0]
    assert r0["opt"] == pytest.approx(4) and r0["square"] == pytest.approx(5) and r0["ratio"] == pytest.approx(1.25)
    r1 = [r for r in rows if r["v"] == 0 and r["alpha"] == 1.5][0]
    assert r1["ratio"] == pytest.approx(1.3125)
    assert {"square_trunc", "ratio_trunc"} <= set(r0)


def test_eval_zero_instance(tmp_path, capsys):
    p = tmp_path / "z.json"
    p.write_text(json.dumps({"values": [0, 0.5, 1], "f": [0, 0, 0]}))
    code, out, _ = run(["eval", "--instance", str(p)], capsys)
    assert all(r["ratio"] == 1 and r["ratio_trunc"] == 1 for r in json.loads(out)["rows"])


def test_eval_bad_file(tmp_path, capsys):
    code, _, err = run(["eval", "--instance", str(tmp_path / "missing.json")], capsys)
    assert code == 1 and err


def test_optimal(inst_file, capsys):
    code, out, _ = run(["optimal", "--instance", inst_file, "--tol", "1e-4"], capsys)
    d = json.loads(out)
    assert code == 0 and d["c_star"] == pytest.approx(10 / 9, abs=1e-4)
    assert d["table"]["y"][1] == pytest.approx(4 / 3, abs=1e-3)


def test_optimal_family(capsys):
    code, out, _ = run(["optimal", "--family", "pow_one_minus", "--p", "1", "--n", "200"], capsys)
    assert code == 0 and 1.1 < json.loads(out)["c_star"] < 1.25


def test_sweep(capsys):
    code, out, _ = run(["sweep", "--family", "one_minus_pow", "--p", "0.6:0.8:0.1", "--n", "50"], capsys)
    d = json.loads(out)
    assert code == 0 and [r["p"] for r in d["rows"]] == [0.6, 0.7, 0.8]
    assert d["max_c_star"] == max(r["c_star"] for r in d["rows"])
    code, out, _ = run(["sweep", "--family", "one_minus_pow", "--p", "0.6,0.8", "--n", "50", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "p,c_star,lstar_ratio"


def test_usage_errors(inst_file, capsys):
    assert run(["optimal"], capsys)[0] == 1
    assert run(["optimal", "--instance", inst_file, "--family", "one_minus_pow"], capsys)[0] == 1
    assert run(["optimal", "--family", "one_minus_pow", "--p", "0.5"], capsys)[0] == 1
    assert run(["instance", "--family", "one_minus_pow", "--p", "1.5", "--n", "4"], capsys)[0] == 1
    with pytest.raises(SystemExit) as e:
        main(["optimal", "--instance", inst_file, "--tol", "0"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["nosuch"])
    assert e.value.code == 1


def test_instance_round_trip(tmp_path, capsys):
    out = tmp_path / "i.json"
    code, _, _ = run(["instance", "--family", "one_minus_pow", "--p", "0.6", "--n", "10", "--out", str(out)], capsys)
    inst = load_instance(out)
    assert code == 0 and inst.size == 11 and inst.family == "one_minus_pow"
    code, o2, _ = run(["optimal", "--instance", str(out)], capsys)
    assert code == 0 and json.loads(o2)["c_star"] >= 1


def _dataset(tmp_path, v2):
    rng = np.random.default_rng(0)
    v1 = rng.random(100)
    p = tmp_path / "rows.csv"
    save_dataset(KeyedDataset([f"k{i}" for i in range(100)], v1, v2(v1)), p)
    return str(p)


def test_simulate(tmp_path, capsys):
    path = _dataset(tmp_path, lambda v: np.zeros_like(v))
    code, out, _ = run(["simulate", "--dataset", path, "--p", "1", "--reps", "500", "--rng-seed", "3"], capsys)
    d = json.loads(out)
    assert code == 0 and set(d) == {"truth", "mean", "stderr", "reps"}
    assert abs(d["mean"] - d["truth"]) <= 3 * d["stderr"]


def test_simulate_identical(tmp_path, capsys):
    path = _dataset(tmp_path, lambda v: v)
    code, out, _ = run(["simulate", "--dataset", path, "--p", "2", "--alpha", "1.5", "--reps", "20"], capsys)
    d = json.loads(out)
    assert d["mean"] == 0 and d["truth"] == 0


def test_simulate_errors(tmp_path, capsys):
    path = _dataset(tmp_path, lambda v: v)
    assert run(["simulate", "--dataset", path, "--reps", "1"], capsys)[0] == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n")
    assert run(["simulate", "--dataset", str(bad)], capsys)[0] == 1


def test_byte_identical_reruns(tmp_path):
    path = _dataset(tmp_path, lambda v: v[::-1])
    outs = []
    for i in range(2):
        o = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "mepcomp", "simulate", "--dataset", path, "--p", "2", "--alpha", "1.5",
                        "--reps", "200", "--rng-seed", "9", "--out", str(o)], check=True)
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
