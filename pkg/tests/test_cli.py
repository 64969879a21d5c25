import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from blendspline.blend import evaluate, fit_arrays
from blendspline.cli import main
from blendspline.serialize import (
    count_control_vectors,
    dumps_model,
    load_model,
    loads_model,
    write_data_csv,
)
from blendspline.spline1d import eval_spline, solve_smoothing_spline

from conftest import sphere_points_in_cap


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, body


@pytest.fixture
def sphere10(tmp_path, rng):
    path = tmp_path / "ten.csv"
    write_data_csv(path, np.arange(10.0), sphere_points_in_cap(rng, 10))
    return path


@pytest.fixture
def noisy100(tmp_path):
    path = tmp_path / "noisy.csv"
    assert main(["gen-testdata", "--num", "100", "--tmax", "4", "--noise", "0.05", "--seed", "7",
                 "--output", str(path)]) == 0
    return path


def fit_cli(data, model, *extra, manifold="sphere2", lam="100", n="4"):
    return main(["fit", "--manifold", manifold, "--lambda", lam, "--intervals", n,
                 "--input", str(data), "--output", str(model), *extra])


def test_fit_interpolating_sphere(sphere10, tmp_path, capsys):
    model = tmp_path / "m.json"
    assert fit_cli(sphere10, model, lam="1e8", n="9") == 0
    out = capsys.readouterr().out
    assert re.search(r"^m = 9$", out, re.M) and re.search(r"^n = 9$", out, re.M)
    misfit = float(re.search(r"^misfit = (\S+)$", out, re.M).group(1))
    assert misfit <= 1e-12
    raw = json.loads(model.read_text())
    assert count_control_vectors(raw) == 72


def test_fit_noisy_hundred(noisy100, tmp_path):
    model = tmp_path / "m.json"
    assert fit_cli(noisy100, model) == 0
    raw = json.loads(model.read_text())
    assert raw["format_version"] == 1 and raw["n"] == 4 and len(raw["intervals"]) == 4
    assert raw["manifold"] == {"kind": "sphere2", "ambient_dim": 3}
    assert len(raw["times"]) == 100


def test_model_reals_have_17_digits(noisy100, tmp_path):
    model = tmp_path / "m.json"
    fit_cli(noisy100, model)
    text = model.read_text()
    for num in re.findall(r"-?\d\.\d+e[+-]\d+", text)[:200]:
        mantissa = num.lstrip("-").split("e")[0].replace(".", "")
        assert len(mantissa) >= 17


def test_euclidean_model_matches_direct_spline(tmp_path, rng):
    t = np.array([0.0, 0.8, 2.0])
    d = rng.standard_normal((3, 2))
    data = tmp_path / "e.csv"
    write_data_csv(data, t, d)
    model = tmp_path / "e.json"
    assert main(["fit", "--manifold", "euclidean", "--dim", "2", "--lambda", "3", "--intervals", "2",
                 "--input", str(data), "--output", str(model)]) == 0
    assert main(["check", "--model", str(model), "--data", str(data)]) == 0
    B = load_model(model)
    s = solve_smoothing_spline(t, d, 3.0, domain=(0.0, 2.0))
    for x in np.linspace(0.0, 2.0, 50):
        np.testing.assert_allclose(evaluate(B, x).coords, eval_spline(s, x), atol=1e-9)


def test_sample_and_speed(noisy100, tmp_path):
    model, curve, spd = tmp_path / "m.json", tmp_path / "c.csv", tmp_path / "s.csv"
    fit_cli(noisy100, model)
    assert main(["sample", "--model", str(model), "--num", "57", "--output", str(curve)]) == 0
    header, body = read_csv(curve)
    assert header == ["t", "c0", "c1", "c2"]
    assert body.shape == (57, 4)
    assert body[0, 0] == 0.0 and body[-1, 0] == 4.0
    assert np.max(np.abs(np.linalg.norm(body[:, 1:], axis=1) - 1.0)) <= 1e-12
    assert main(["speed", "--model", str(model), "--num", "41", "--output", str(spd)]) == 0
    header, body = read_csv(spd)
    assert header == ["t", "speed"] and body.shape == (41, 2)
    assert np.all(np.isfinite(body[:, 1])) and np.all(body[:, 1] > 0)
    # continuity of the profile: no jumps between neighbouring samples
    assert np.max(np.abs(np.diff(body[:, 1]))) < 0.5


def test_speed_of_constant_and_line(tmp_path):
    p = [0.0, 0.6, 0.8]
    const = tmp_path / "const.csv"
    write_data_csv(const, [0.0, 1.0, 2.0], [p, p, p])
    model, spd = tmp_path / "c.json", tmp_path / "s.csv"
    assert fit_cli(const, model, n="2") == 0
    assert main(["speed", "--model", str(model), "--num", "21", "--output", str(spd)]) == 0
    assert np.max(read_csv(spd)[1][:, 1]) <= 1e-8

    line = tmp_path / "line.csv"
    write_data_csv(line, [0.0, 2.0], [[1.0], [5.0]])
    assert main(["fit", "--manifold", "euclidean", "--dim", "1", "--lambda", "inf", "--intervals", "2",
                 "--input", str(line), "--output", str(model)]) == 0
    assert main(["speed", "--model", str(model), "--num", "21", "--output", str(spd)]) == 0
    np.testing.assert_allclose(read_csv(spd)[1][:, 1], 2.0, atol=1e-6)


def test_round_trip_is_exact(noisy100, tmp_path):
    from blendspline.serialize import read_data_csv
    from blendspline.manifold import Sphere

    times, pts = read_data_csv(noisy100, Sphere())
    B = fit_arrays("sphere2", times, [p.coords for p in pts], 4, 100.0)
    B2 = loads_model(dumps_model(B))
    for t in np.linspace(0.0, 4.0, 101):
        assert np.array_equal(evaluate(B, t).coords, evaluate(B2, t).coords)
    assert dumps_model(B2) == dumps_model(B)


def test_deterministic_outputs(noisy100, tmp_path):
    outs = []
    for k in range(2):
        model, curve = tmp_path / f"m{k}.json", tmp_path / f"c{k}.csv"
        fit_cli(noisy100, model)
        main(["sample", "--model", str(model), "--num", "33", "--output", str(curve)])
        outs.append((model.read_bytes(), curve.read_bytes()))
    assert outs[0] == outs[1]
    again = tmp_path / "again.csv"
    main(["gen-testdata", "--num", "100", "--tmax", "4", "--noise", "0.05", "--seed", "7", "--output", str(again)])
    assert again.read_bytes() == noisy100.read_bytes()


def test_check_passes_fresh_sphere_model(noisy100, tmp_path, capsys):
    model = tmp_path / "m.json"
    fit_cli(noisy100, model)
    capsys.readouterr()
    assert main(["check", "--model", str(model), "--data", str(noisy100)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 4


@pytest.mark.parametrize("row,what", [(0, "junction-position"), (1, "junction-velocity")])
def test_check_detects_corruption(sphere10, tmp_path, capsys, row, what):
    model = tmp_path / "m.json"
    fit_cli(sphere10, model, lam="1e8", n="9")
    raw = json.loads(model.read_text())
    ctrl = raw["intervals"][4]["left_pieces"][0]["control"]
    ctrl[row] = [c + 0.05 for c in ctrl[row]]
    model.write_text(json.dumps(raw))
    capsys.readouterr()
    assert main(["check", "--model", str(model)]) == 3
    assert f"FAIL {what}" in capsys.readouterr().out


def test_exit_codes(tmp_path, rng):
    model = tmp_path / "m.json"
    missing = tmp_path / "nope.csv"
    assert fit_cli(missing, model) == 1

    bad = tmp_path / "bad.csv"
    bad.write_text("t,c0,c1,c2\n0,1,1,0\n1,0,0,1\n")
    assert fit_cli(bad, model, n="1") == 1

    unordered = tmp_path / "unordered.csv"
    unordered.write_text("t,c0,c1,c2\n1,1,0,0\n0,0,0,1\n")
    assert fit_cli(unordered, model, n="1") == 1

    antipodal = tmp_path / "anti.csv"
    antipodal.write_text("t,c0,c1,c2\n0,0,0,1\n1,1,0,0\n2,0,0,-1\n")
    assert fit_cli(antipodal, model, n="2") == 2

    ok = tmp_path / "ok.csv"
    write_data_csv(ok, [0.0, 1.0], [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    assert fit_cli(ok, model, lam="-1", n="1") == 1
    assert fit_cli(ok, model, lam="zero", n="1") == 1
    assert fit_cli(ok, model, "--dim", "4", n="1") == 1
    assert main(["fit", "--manifold", "euclidean", "--lambda", "1", "--intervals", "1",
                 "--input", str(ok), "--output", str(model)]) == 1
    assert main(["fit", "--manifold", "sphere2"]) == 1

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert main(["sample", "--model", str(garbage), "--num", "3", "--output", str(tmp_path / "x.csv")]) == 1
    assert main(["check", "--model", str(tmp_path / "absent.json")]) == 1


def test_infinite_lambda_round_trip(tmp_path, rng):
    data = tmp_path / "d.csv"
    write_data_csv(data, np.arange(5.0), sphere_points_in_cap(rng, 5))
    model = tmp_path / "m.json"
    assert fit_cli(data, model, lam="inf", n="4") == 0
    raw = json.loads(model.read_text())
    assert raw["lambda"] == "inf"
    assert math.isinf(load_model(model).lam)


def test_module_entry_point(noisy100, tmp_path):
    model = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "blendspline", "fit", "--manifold", "sphere2", "--lambda", "100",
         "--intervals", "4", "--input", str(noisy100), "--output", str(model)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "misfit =" in proc.stdout


def test_so3_pipeline(tmp_path):
    data, model = tmp_path / "r.csv", tmp_path / "r.json"
    assert main(["gen-testdata", "--manifold", "so3", "--num", "30", "--tmax", "5", "--noise", "0.05",
                 "--seed", "3", "--output", str(data)]) == 0
    assert fit_cli(data, model, manifold="so3", lam="10", n="5") == 0
    assert main(["check", "--model", str(model), "--data", str(data)]) == 0
