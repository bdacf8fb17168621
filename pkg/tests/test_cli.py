import json
import xml.etree.ElementTree as ET

import pytest

from aplab.cli import main
from aplab.svgplot import loglog_svg


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_example(capsys):
    code, out, _ = run(["bound", "--alpha", "1", "--gamma", "2", "--p0", "2"], capsys)
    assert code == 0
    assert json.loads(out)["beta_min"] == 2
    assert '"beta_min": 2,' in out or '"beta_min": 2}' in out


def test_norms_then_fit(tmp_path, capsys):
    code, _, _ = run(["--out", str(tmp_path), "norms", "--op", "hilbert", "--family", "indicator",
                      "--p-grid", "geometric:8:512:8", "--out", "h.csv", "--plot", "h.svg"], capsys)
    assert code == 0
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "operator,family,weight,p,norm" and len(lines) == 9
    ET.fromstring((tmp_path / "h.svg").read_text())
    code, out, _ = run(["fit", "--in", str(tmp_path / "h.csv"), "--endpoint", "infinity", "--tail", "8"], capsys)
    assert code == 0
    fit = json.loads(out)
    assert set(fit) == {"operator", "endpoint", "exponent", "residual", "points_used"}
    assert abs(fit["exponent"] - 1) < 0.05


def test_norms_is_deterministic(tmp_path, capsys):
    args = ["norms", "--op", "hilbert", "--p-grid", "8,16,32"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b and len(a.splitlines()) == 4


def test_ap_and_rubio(capsys):
    code, out, _ = run(["ap", "--weight", "const:1", "--p", "2"], capsys)
    assert code == 0 and json.loads(out)["value"] == 1.0
    code, out, _ = run(["rubio", "--p", "2", "--terms", "10"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass" and len(doc["checks"]) == 3


def test_verify_writes_reports(tmp_path, capsys):
    code, out, _ = run(["verify", "sparse-weak", "rearrangement", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "sparse-weak" in out and "rearrangement" in out
    doc = json.loads((tmp_path / "verify-sparse-weak.json").read_text())
    assert doc["status"] == "pass"


def test_verify_failure_exit_code(monkeypatch, capsys):
    from aplab import cli
    from aplab.suites import SuiteReport

    def failing(name, config):
        rep = SuiteReport(name)
        rep.add("too big", 2.0, 1.0)
        return rep

    monkeypatch.setattr(cli, "verify_suite", failing)
    code, out, _ = run(["verify", "rubio"], capsys)
    assert code == 1 and "fail" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nonsense"],
        ["norms", "--op", "bogus"],
        ["ap", "--weight", "wobbly:1", "--p", "2"],
        ["bound", "--alpha", "1", "--gamma", "1", "--p0", "1"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_io_errors_exit_3(tmp_path, capsys):
    code, _, err = run(["fit", "--in", str(tmp_path / "missing.csv"), "--endpoint", "infinity"], capsys)
    assert code == 3 and "I/O" in err
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(["--out", str(blocker), "bound", "--alpha", "1", "--gamma", "1", "--p0", "2", "--out", "b.json"],
                     capsys)
    assert code == 3


def test_svg_is_wellformed_with_two_decades():
    svg = loglog_svg([("a", [8, 16, 32], [1.0, 2.0, 4.0])], fits=[("fit", 1.0, -0.9, [8, 32])], title="t<&>")
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}polyline")) == 1
    labels = [t.text for t in root.findall(f"{ns}text")]
    assert "t<&>" in labels
    assert sum(1 for t in labels if t and t.startswith("1e")) >= 6
    with pytest.raises(ValueError):
        loglog_svg([("empty", [0], [0])])
