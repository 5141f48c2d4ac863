import json
import subprocess
import sys
from fractions import Fraction

import pytest

from lozenge.cli import main
from lozenge.io import read_arcs_csv, read_density_csv, read_qseries_csv
from lozenge.qpoly import HalfQPolynomial


def run(tmp_path, *argv, sub="out"):
    out = tmp_path / sub
    code = main([*argv, "--out", str(out)])
    return code, out


def test_unit_box(tmp_path, capsys):
    code, out = run(tmp_path, "enumerate", "--box", "1", "1", "1")
    assert code == 0
    assert read_qseries_csv(out / "series.csv") == HalfQPolynomial.from_integer_powers([1, 1])
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "enumerate"
    assert set(manifest["artifacts"]) == {"series.csv"}
    assert manifest["versions"]["kernel_backend"] in ("cython", "python")
    assert "partition_function" in manifest["timings_s"]


def test_box_333_series(tmp_path):
    code, out = run(tmp_path, "enumerate", "--box", "3", "3", "3")
    assert code == 0
    s = read_qseries_csv(out / "series.csv")
    assert [s.coefficient(k) for k in range(5)] == [1, 1, 3, 6, 10]


def test_raw_box_keeps_offset(tmp_path):
    code, out = run(tmp_path, "enumerate", "--box", "1", "1", "1", "--raw")
    assert code == 0
    assert read_qseries_csv(out / "series.csv").min_twice_exponent() > 0
    assert main(["enumerate", "--box", "1", "1", "1", "--raw", "--normalize", "--out", str(tmp_path / "x")]) == 2


def test_rational_q_and_density(tmp_path):
    code, out = run(tmp_path, "enumerate", "--box", "2", "2", "2", "--q", "1", "--density-t", "0", "--density-t", "1")
    assert code == 0
    assert (out / "value.csv").read_text().splitlines()[1] == "1,20,1"
    for t in (0, 1):
        dens = read_density_csv(out / f"density_t{t}.csv")
        assert sum(dens.values()) == 2


def test_domain_file(tmp_path):
    spec = tmp_path / "d.spec"
    spec.write_text("[particles]\n1\n[time 0]\n0\n[time 1]\n-1 1\n[time 2]\n0\n")
    code, out = run(tmp_path, "enumerate", "--domain", str(spec), "--q", "1")
    assert code == 0
    assert (out / "value.csv").read_text().splitlines()[1] == "1,2,1"
    manifest = json.loads((out / "manifest.json").read_text())
    other = tmp_path / "e.spec"
    other.write_text(spec.read_text() + "# changed\n")
    run(tmp_path, "enumerate", "--domain", str(other), "--q", "1", sub="out2")
    manifest2 = json.loads((tmp_path / "out2" / "manifest.json").read_text())
    assert manifest["inputs_sha256"] != manifest2["inputs_sha256"]


def test_tsscpp(tmp_path, capsys):
    code, out = run(tmp_path, "tsscpp", "--n", "3")
    assert code == 0
    assert capsys.readouterr().out.strip() == "7"
    assert read_qseries_csv(out / "series.csv").evaluate(1) == 7


def test_plancherel(tmp_path):
    code, out = run(tmp_path, "plancherel", "--mu", "2,1", "--n", "2")
    assert code == 0
    rows = (out / "plancherel.csv").read_text().splitlines()
    assert rows[1].startswith("inf,1,3,")
    vals = {r.split(",")[0]: Fraction(int(r.split(",")[1]), int(r.split(",")[2])) for r in rows[2:]}
    assert vals == {"8": Fraction(21, 64), "10": Fraction(33, 100)}


def test_envelope_outputs(tmp_path):
    code, out = run(tmp_path, "envelope", "--hexagon", "0.3", "2", "--samples", "64", "--emit-svg")
    assert code == 0
    arcs = read_arcs_csv(out / "arcs.csv")
    assert set(arcs) == {"+", "-"}
    contacts = (out / "contacts.csv").read_text().splitlines()[1:]
    assert len(contacts) == 6 and all(r.endswith(",1") for r in contacts)
    assert (out / "envelope.svg").read_text().startswith("<svg")


def test_quantum_envelope(tmp_path):
    code, out = run(tmp_path, "envelope", "--hexagon", "0.3", "2", "--qq", "0.9", "--samples", "64")
    assert code == 0
    assert len((out / "contacts.csv").read_text().splitlines()) == 7


def test_recursion_airy(tmp_path):
    code, out = run(tmp_path, "recursion", "--airy", "--fg", "2")
    assert code == 0
    row = (out / "recursion.csv").read_text().splitlines()[1].split(",")
    assert row[0] == "F_2" and abs(float(row[1])) < 1e-8


def test_recursion_curve_file(tmp_path):
    spec = tmp_path / "airy.curve"
    spec.write_text("x.num = 0 0 1\ny.num = 0 1\n")
    code, out = run(tmp_path, "recursion", "--curve", str(spec), "--wng", "3", "0", "--at", "0.5+0.2j,1.1,-0.7j")
    assert code == 0
    assert (out / "recursion.csv").read_text().startswith("quantity,real,imag,error\nW_3^0,")


@pytest.mark.parametrize("argv", [
    ["enumerate", "--box", "1", "1"],
    ["enumerate", "--box", "1", "1", "1", "--q", "abc"],
    ["enumerate", "--domain", "/nonexistent/file.spec"],
    ["recursion", "--airy", "--wng", "3", "0"],
    ["recursion", "--airy", "--fg", "1"],
    ["envelope", "--trapezoid", "1", "--qq", "0.5"],
    ["tsscpp", "--n", "0"],
])
def test_input_errors_exit_2(tmp_path, argv):
    try:
        code = main([*argv, "--out", str(tmp_path / "o")])
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_spec_error_message(tmp_path, capsys):
    spec = tmp_path / "bad.spec"
    spec.write_text("[particles]\n1\n[time 0]\n0\n[time 1]\n  2\n")
    assert run(tmp_path, "enumerate", "--domain", str(spec))[0] == 2
    assert "line 6, column 3: parity violation" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["enumerate", "--domain", "{infeasible}"],
    ["enumerate", "--domain", "{collision}", "--density-t", "1"],
    ["envelope", "--hexagon", "1.5", "2"],
    ["recursion", "--curve", "{cusp}", "--fg", "2"],
    ["enumerate", "--box", "4", "4", "4", "--state-cap", "5"],
])
def test_infeasible_exit_3(tmp_path, argv):
    files = {
        "infeasible": "[particles]\n2\n[time 0]\n0 2\n[time 1]\n1\n",
        "collision": "[particles]\n2\n[time 0]\n0 2\n[time 1]\n1 5\n[time 2]\n0 2\n",
        "cusp": "x.num = 0 0 0 1\ny.num = 0 1\n",
    }
    for name, text in files.items():
        (tmp_path / f"{name}.txt").write_text(text)
    argv = [a.format(**{k: str(tmp_path / f"{k}.txt") for k in files}) for a in argv]
    assert main([*argv, "--out", str(tmp_path / "o")]) == 3


def test_numeric_failure_exit_4(tmp_path):
    assert run(tmp_path, "envelope", "--hexagon", "0.3", "2", "--samples", "64", "--tol", "1e-300")[0] == 4


def test_artifacts_byte_identical(tmp_path):
    argv = ["enumerate", "--box", "2", "2", "3", "--density-t", "0"]
    _, a = run(tmp_path, *argv, sub="a")
    _, b = run(tmp_path, *argv, sub="b")
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["artifacts"] == mb["artifacts"] and ma["inputs_sha256"] == mb["inputs_sha256"]
    for name in ma["artifacts"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LOZENGE_OUTPUT_DIR", str(tmp_path / "envdir"))
    assert main(["tsscpp", "--n", "2"]) == 0
    assert (tmp_path / "envdir" / "manifest.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lozenge.cli", "tsscpp", "--n", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "2"
