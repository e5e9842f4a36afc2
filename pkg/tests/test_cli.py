import json
import subprocess
import sys

import pytest

from hkernel import make_instance, save
from hkernel.cli import main


@pytest.fixture
def good(tmp_path):
    # passes every hypothesis; {b, d} is an H-kernel
    inst = make_instance(
        ["1", "2"], [], list("abcd"),
        [("a", "b", "1"), ("c", "d", "1"), ("b", "c", "2"), ("d", "a", "2")],
        [["1"], ["2"]], [1], [2],
    )
    p = tmp_path / "good.json"
    save(inst, p)
    return str(p)


@pytest.fixture
def bad3(tmp_path):
    inst = make_instance(["1", "2"], [("1", "2")], list("abc"), [("a", "b", "1"), ("b", "c", "2")],
                         [["1"], ["2"]], [1], [2])
    p = tmp_path / "bad3.json"
    save(inst, p)
    return str(p)


@pytest.fixture
def no_kernel(tmp_path):
    inst = make_instance(["1"], [], list("abc"), [("a", "b", "1"), ("b", "c", "1"), ("c", "a", "1")])
    p = tmp_path / "c3.json"
    save(inst, p)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys, good):
    code, out, _ = run(capsys, "check", good)
    assert code == 0 and "valid instance" in out


def test_hypotheses_fail_prints_witness(capsys, bad3):
    code, out, _ = run(capsys, "hypotheses", bad3)
    assert code == 1
    assert "hypothesis 3: FAIL" in out and '"color_pair": ["1", "2"]' in out


def test_hypotheses_structured(capsys, good):
    code, out, _ = run(capsys, "--format", "structured", "hypotheses", good)
    data = json.loads(out)
    assert code == 0 and data["pass"] and len(data["verdicts"]) == 6


def test_find_both(capsys, good):
    code, out, _ = run(capsys, "find", "--method", "both", good)
    assert code == 0
    assert out.count("H-kernel {") == 2 and "agreement" in out


def test_find_no_kernel(capsys, no_kernel):
    code, out, _ = run(capsys, "find", "--method", "brute", no_kernel)
    assert code == 1 and "no H-kernel" in out


def test_find_pipeline_hypothesis_failure(capsys, bad3):
    code, out, _ = run(capsys, "find", "--method", "pipeline", bad3)
    assert code == 1 and "not applicable" in out


def test_verify(capsys, good):
    assert run(capsys, "verify", good, "--set", "b,d")[0] == 0
    code, out, _ = run(capsys, "verify", good, "--set", "a,b")
    assert code == 1 and "witness" in out
    assert run(capsys, "verify", good, "--set", "a", "--property", "independent")[0] == 0
    assert run(capsys, "verify", good, "--set", "zz")[0] == 2


def test_reach(capsys, good):
    code, out, _ = run(capsys, "reach", good, "a", "b")
    assert code == 0 and "a b" in out
    assert run(capsys, "reach", good, "a", "c")[0] == 1
    assert run(capsys, "reach", good, "a", "b", "--filter", "d2")[0] == 1
    assert run(capsys, "reach", good, "a", "nowhere")[0] == 2


def test_ccd(capsys, good):
    code, out, _ = run(capsys, "--format", "structured", "ccd", good)
    data = json.loads(out)
    assert code == 0 and data["pattern"]["arcs"] == [["1", "2"], ["2", "1"]]
    code, out, _ = run(capsys, "ccd", good)
    assert "bipartite: yes" in out


def test_modes(capsys, good, no_kernel):
    assert run(capsys, "mode", "mp", good)[0] == 0
    assert run(capsys, "mode", "kernel", no_kernel)[0] == 1
    code, out, _ = run(capsys, "mode", "mp", no_kernel)
    assert code == 1 and "not-bipartite" in out
    assert run(capsys, "mode", "pcp", good)[0] == 0


def test_usage_and_input_errors(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"pattern": {"vertices": [], "arcs": []}, "digraph": {"vertices": ["a"], "arcs": []}, "x": 1}')
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "x" in err
    assert run(capsys, "frobnicate")[0] == 2


def test_caps_exit_three(capsys, good):
    assert run(capsys, "--max-subsets", "2", "find", "--method", "brute", good)[0] == 3
    assert run(capsys, "find", "--max-vertices", "2", good)[0] == 3
    assert run(capsys, "find", "--max-vertices", "0", good)[0] == 2


def test_emit_dot_either_position(capsys, good, tmp_path):
    for argv in (["--emit-dot", str(tmp_path / "a.dot"), "check", good],
                 ["check", good, "--emit-dot", str(tmp_path / "b.dot")]):
        assert run(capsys, *argv)[0] == 0
    for name in ("a.dot", "b.dot"):
        text = (tmp_path / name).read_text()
        for block in ("digraph D {", "digraph H {", "digraph CCD {", "digraph DS {"):
            assert block in text


def test_isolated_vertex_warning(capsys, tmp_path):
    p = tmp_path / "iso.json"
    save(make_instance(["1"], [], ["a", "b", "z"], [("a", "b", "1")]), p)
    code, _, err = run(capsys, "check", str(p))
    assert code == 0 and "isolated" in err


def test_campaign(capsys, tmp_path):
    code, out, _ = run(capsys, "campaign", "--lemma", "side-walks", "--trials", "50")
    assert code == 0 and "violations: 0" in out
    code, out, _ = run(capsys, "campaign", "--lemma", "semikernel-digraph-acyclic", "--trials", "200",
                       "--sabotage", "--reproducers", str(tmp_path / "rep"))
    assert code == 1 and "reproducer:" in out


def test_search_tight(capsys, tmp_path):
    code, out, _ = run(capsys, "search-tight", "--drop", "none", "--budget", "400")
    assert code == 0 and "control run" in out
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "search-tight", "--drop", "4", "--budget", "2000", "--out", str(cert))
    assert code == 0 and "recertified: True" in out
    assert json.loads(cert.read_text())["dropped"] == "4"
    code, out, _ = run(capsys, "search-tight", "--drop", "2", "--budget", "200")
    assert code == 3 and "not found within budget" in out


def test_module_entry_point(good):
    proc = subprocess.run([sys.executable, "-m", "hkernel", "check", good], capture_output=True, text=True)
    assert proc.returncode == 0 and "valid instance" in proc.stdout


def test_help_documents_caps(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert "--max-subsets" in out and "default 20" in out
