import subprocess
import sys

import pytest

from halobif.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_table(text):
    rows = [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]
    return rows[0], rows[1:]


def test_locate(capsys):
    code, out, _ = run(["locate", "--system", "earth-moon"], capsys)
    assert code == 0
    header, rows = parse_table(out)
    assert header == ["point", "gamma", "alpha", "X", "residual"]
    X = {r[0]: float(r[3]) for r in rows}
    assert X["L2"] == pytest.approx(-1.1557, abs=1e-5)
    assert X["L3"] == pytest.approx(1.00506, abs=1e-5)


def test_locate_out_of_range(capsys):
    code, _, err = run(["locate", "--mu", "0.9"], capsys)
    assert code == 1
    assert "mu" in err


def test_thresholds_earth_moon(capsys):
    code, out, _ = run(["thresholds", "--system", "earth-moon", "--point", "L1"], capsys)
    assert code == 0
    vals = dict(r for r in parse_table(out)[1])
    assert float(vals["h_ly"]) == pytest.approx(0.3069, abs=5e-4)


@pytest.mark.parametrize("cmd", ["linearize", "expand", "reduce"])
def test_pipeline_commands(cmd, capsys):
    code, out, _ = run([cmd, "--system", "sun-vesta"], capsys)
    assert code == 0 and out.strip()


def test_reduce_lists_known_coefficient(capsys):
    code, out, _ = run(["reduce", "--system", "sun-vesta", "--mu-from-masses"], capsys)
    assert code == 0
    line = next(l for l in out.splitlines() if l.split()[:4] == ["4", "0", "0", "0"])
    assert float(line.split()[4]) == pytest.approx(-0.02099512477285749, rel=1e-6)


def test_diagnostics_write_files(tmp_path, capsys):
    base = ["--system", "sun-vesta", "--energy", "0.05", "-o", str(tmp_path)]
    assert main(["poincare", *base, "--seeds", "3", "--crossings", "4", "--T", "40"]) == 0
    assert main(["freqmap", *base, "--num", "5"]) == 0
    assert main(["fli", *base, "--grid", "3", "3", "--T", "5"]) == 0
    capsys.readouterr()
    headers = {p.name: p.read_text().splitlines()[0].split("\t") for p in tmp_path.iterdir()}
    assert headers["section.txt"] == ["orbit", "y", "py", "t", "escaped"]
    assert headers["freqmap.txt"] == ["Jy0", "omega_y", "omega_z", "omega_r"]
    assert headers["fli.txt"] == ["y", "py", "FLI"]


def test_bifscan(capsys):
    code, out, _ = run(["bifscan", "--system", "sun-vesta", "--h-range", "0.03", "0.06", "--step", "0.01"], capsys)
    assert code == 0
    header, rows = parse_table(out)
    assert header == ["h", "index_level", "kind"]
    assert float(rows[0][0]) == pytest.approx(0.0422, abs=5e-4)


def test_determinism(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.txt"
        assert main(["poincare", "--system", "sun-vesta", "--energy", "0.05", "--seeds", "3",
                     "--crossings", "5", "--T", "50", "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("system: earth-moon\npoint: L2\n")
    code, out, _ = run(["thresholds", "--config", str(cfg)], capsys)
    vals = dict(r for r in parse_table(out)[1])
    assert code == 0 and float(vals["h_ly"]) == pytest.approx(0.3636, abs=5e-4)
    code, out, _ = run(["thresholds", "--config", str(cfg), "--point", "L1"], capsys)
    vals = dict(r for r in parse_table(out)[1])
    assert float(vals["h_ly"]) == pytest.approx(0.3069, abs=5e-4)


@pytest.mark.parametrize(
    "text, field",
    [("system: earth-moon\nbogus: 1\n", "config.bogus"), ("system: earth-moon\ntol: 1.0e-3\n", "tol"),
     ("system: earth-moon\npoint: L7\n", "point"), ("[unclosed\n", "config")],
)
def test_bad_config(tmp_path, capsys, text, field):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(text)
    code, _, err = run(["locate", "--config", str(cfg)], capsys)
    assert code == 1
    assert field in err


def test_usage_errors(capsys):
    assert run(["poincare", "--system", "sun-vesta"], capsys)[0] == 1
    assert run(["reduce", "--system", "pluto-charon"], capsys)[0] == 1
    assert run(["reduce", "--system", "earth-moon", "--point", "L3"], capsys)[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(["bifscan", "--system", "sun-vesta", "--h-range", "5", "6", "--step", "0.5"], capsys)
    assert code == 2
    assert "numerical failure" in err


def test_diff_failure_exit_code(capsys):
    # the tabulated L1 distance for this system carries only four digits
    code, out, _ = run(["reproduce-tables", "--system", "sun-barycenter", "--no-numeric"], capsys)
    assert code == 3
    assert "FAIL" in out


@pytest.mark.slow
def test_reproduce_sun_vesta(capsys):
    code, out, _ = run(["reproduce-tables", "--system", "sun-vesta"], capsys)
    assert code == 0
    cm_rows = [l for l in out.splitlines() if l.startswith("cm_coefficients")]
    assert len(cm_rows) == 17 and all(l.endswith("PASS") for l in cm_rows)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "halobif", "locate", "--system", "sun-vesta"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("point\t")
