import json
import subprocess
import sys

import pytest

from kleinnet import limitset, sl2
from kleinnet.cli import main

try:
    import kleinnet._kernel  # noqa: F401

    HAVE_C_KERNEL = True
except ImportError:
    HAVE_C_KERNEL = False

NET_TEXT = """\
v 1
v 2
v 3
e 1 1 2
e 2 2 3
e 3 3 1
e 4 1 3
"""

REP_333 = """\
a 1.0,0.0 1.0,0.0 1.0,0.0 2.0,0.0
b 1.0,0.0 -1.0,0.0 -1.0,0.0 2.0,0.0
"""

BELL_CIRCUIT = """\
init 1 1 0 0 0
init 2 1 0 0 0
SU2 1 0 0.7071067811865476 0 0.7071067811865476 0 0.7071067811865476 0 -0.7071067811865476
CNOT 1 2
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "net.txt"
    path.write_text(NET_TEXT)
    return str(path)


@pytest.fixture
def rep_file(tmp_path):
    path = tmp_path / "rep.txt"
    path.write_text(REP_333)
    return str(path)


# -- exit codes --------------------------------------------------------------------


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["graph"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["limitset", "--no-such-flag"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_domain_errors_exit_one(capsys, rep_file):
    code, out, err = run_cli(capsys, "graph", "--file", "missing.txt")
    assert code == 1 and err.startswith("error:")
    code, out, err = run_cli(capsys, "dessin", "--subgroup", "a")
    assert code == 1 and "infinite" in err
    code, out, err = run_cli(capsys, "character", "--rep", rep_file)
    assert code == 1 and "nothing to do" in err


def test_module_entry_point(tmp_path):
    path = tmp_path / "rep.txt"
    path.write_text(REP_333)
    proc = subprocess.run(
        [sys.executable, "-m", "kleinnet", "character", "--rep", str(path), "--words", "a"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["word,re,im", "a,3,0"]


# -- graph -------------------------------------------------------------------------


def test_graph_summary(capsys, net_file):
    code, out, err = run_cli(capsys, "graph", "--file", net_file)
    assert code == 0
    lines = out.splitlines()
    assert "vertices 3" in lines
    assert "rank 2" in lines
    assert "generator a edge 2" in lines


def test_graph_walk(capsys, net_file):
    code, out, err = run_cli(capsys, "graph", "--file", net_file, "--walk", "1,2,3")
    assert code == 0
    assert out.splitlines()[-1] == "walk_word a"


def test_graph_bad_walk(capsys, net_file):
    code, out, err = run_cli(capsys, "graph", "--file", net_file, "--walk", "1,2")
    assert code == 1 and "closed" in err


# -- character ---------------------------------------------------------------------


def test_character_csv(capsys, rep_file):
    code, out, err = run_cli(capsys, "character", "--rep", rep_file, "--words", "a,ab")
    assert code == 0
    assert out.splitlines() == ["word,re,im", "a,3,0", "ab,3,0"]


def test_character_classify_and_theta(capsys, rep_file):
    code, out, err = run_cli(
        capsys, "character", "--rep", rep_file, "--words", "abAB", "--classify", "--theta"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "word,re,im,kind,length,theta"
    assert lines[1] == "abAB,-2,0,parabolic,0,1.38629436"


def test_character_moduli(capsys, rep_file):
    code, out, err = run_cli(capsys, "character", "--rep", rep_file, "--moduli")
    assert code == 0
    assert out.splitlines() == ["word,re,im", "a,3,0", "b,3,0", "ab,3,0"]


def test_character_words_file(capsys, rep_file, tmp_path):
    words_path = tmp_path / "words.txt"
    words_path.write_text("# batch\na\n\nba\n")
    code, out, err = run_cli(
        capsys, "character", "--rep", rep_file, "--words-file", str(words_path)
    )
    assert code == 0
    assert [row.split(",")[0] for row in out.splitlines()[1:]] == ["a", "ba"]


def test_character_list_classes(capsys, rep_file):
    code, out, err = run_cli(
        capsys, "character", "--rep", rep_file, "--list-classes", "--max-len", "1"
    )
    assert code == 0
    assert out.splitlines() == ["a", "A", "b", "B"]


def test_character_echo_rep_round_trip(capsys, rep_file, tmp_path):
    echoed = tmp_path / "echo.txt"
    code, out, err = run_cli(
        capsys, "character", "--rep", rep_file, "--words", "a", "--echo-rep", str(echoed)
    )
    assert code == 0
    assert sl2.load_rep(str(echoed)) == sl2.load_rep(rep_file)


# -- degenerate --------------------------------------------------------------------


def test_degenerate_csv_and_report(capsys, tmp_path):
    csv_path = tmp_path / "sweep.csv"
    code, out, err = run_cli(
        capsys,
        "degenerate",
        "--t-values",
        "15,20",
        "--max-len",
        "2",
        "--csv",
        str(csv_path),
        "--report",
    )
    assert code == 0
    body = csv_path.read_text()
    assert body.startswith("t,lambda,a,A,b,B,")
    assert "\n15,60,0.5,0.5,0.5,0.5," in body
    report = json.loads(out)
    assert report["passed"] is True
    assert report["oracle_distance"] == pytest.approx(0.01732868, abs=1e-7)


def test_degenerate_stdout(capsys):
    code, out, err = run_cli(capsys, "degenerate", "--t-values", "15,20", "--max-len", "1")
    assert code == 0
    assert out.splitlines()[0] == "t,lambda,a,A,b,B"


def test_degenerate_rejects_unknown_family(capsys):
    code, out, err = run_cli(
        capsys, "degenerate", "--t-values", "1,2", "--family", "volcano"
    )
    assert code == 1 and "volcano" in err


def test_degenerate_rejects_bad_grid(capsys):
    code, out, err = run_cli(capsys, "degenerate", "--t-values", "5,4")
    assert code == 1 and "increase" in err
    code, out, err = run_cli(capsys, "degenerate", "--t-values", "5,x")
    assert code == 1


# -- limitset ----------------------------------------------------------------------


def test_limitset_fuchsian_outputs(capsys, tmp_path):
    ppm = tmp_path / "lim.ppm"
    csv_path = tmp_path / "cloud.csv"
    code, out, err = run_cli(
        capsys,
        "limitset",
        "--traces",
        "3,3,3",
        "--eps",
        "2e-3",
        "--out",
        str(ppm),
        "--csv",
        str(csv_path),
        "--width",
        "64",
        "--height",
        "64",
    )
    assert code == 0
    stats = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(stats["circle_deviation"]) < 1e-3
    assert float(stats["invariance"]) < 5 * 2e-3
    assert 0.8 < float(stats["box_dimension"]) < 1.1
    assert stats["truncated"] == "0"
    assert ppm.read_bytes().startswith(b"P6\n64 64\n255\n")
    assert csv_path.read_text().splitlines()[0] == "re,im,chart"


def test_limitset_byte_determinism(capsys, tmp_path):
    def run(tag):
        ppm = tmp_path / f"{tag}.ppm"
        csv_path = tmp_path / f"{tag}.csv"
        code, out, err = run_cli(
            capsys,
            "limitset",
            "--traces",
            "3,3,3",
            "--eps",
            "4e-3",
            "--out",
            str(ppm),
            "--csv",
            str(csv_path),
        )
        assert code == 0
        return out, ppm.read_bytes(), csv_path.read_bytes()

    assert run("first") == run("second")


def test_limitset_from_rep_file(capsys, rep_file):
    code, out, err = run_cli(
        capsys, "limitset", "--rep", rep_file, "--eps", "5e-3"
    )
    assert code == 0
    assert out.splitlines()[0] == f"backend {limitset.kernel_backend}"


def test_limitset_complex_trace_syntax(capsys):
    code, out, err = run_cli(
        capsys, "limitset", "--traces", "3+0.5i,3", "--eps", "8e-3"
    )
    assert code == 0
    stats = dict(line.split(" ", 1) for line in out.splitlines())
    assert float(stats["circle_deviation"]) > 1e-2


@pytest.mark.skipif(not HAVE_C_KERNEL, reason="compiled kernel unavailable")
def test_limitset_backend_flags_agree(capsys, tmp_path):
    outputs = []
    for flag, name in (("c", "cython"), ("py", "python")):
        csv_path = tmp_path / f"{flag}.csv"
        code, out, err = run_cli(
            capsys,
            "limitset",
            "--traces",
            "3,3,3",
            "--eps",
            "4e-3",
            "--backend",
            flag,
            "--csv",
            str(csv_path),
        )
        assert code == 0
        assert out.splitlines()[0] == f"backend {name}"
        outputs.append(csv_path.read_bytes())
    assert outputs[0] == outputs[1]


def test_limitset_flag_validation(capsys, rep_file):
    code, out, err = run_cli(capsys, "limitset", "--eps", "1e-3")
    assert code == 1 and "exactly one" in err
    code, out, err = run_cli(
        capsys, "limitset", "--traces", "3,3", "--rep", rep_file
    )
    assert code == 1 and "exactly one" in err
    code, out, err = run_cli(capsys, "limitset", "--traces", "3,3,3,3")
    assert code == 1 and "two or three" in err
    code, out, err = run_cli(capsys, "limitset", "--traces", "3,3q,3")
    assert code == 1 and "bad complex" in err
    code, out, err = run_cli(
        capsys, "limitset", "--traces", "3,3,3", "--window", "0,1"
    )
    assert code == 1 and "window" in err
    code, out, err = run_cli(
        capsys, "limitset", "--traces", "3,3,3", "--other-root", "--rep", rep_file
    )
    assert code == 1


# -- dessin ------------------------------------------------------------------------


def test_dessin_summary(capsys, tmp_path):
    dot_path = tmp_path / "d.dot"
    code, out, err = run_cli(
        capsys, "dessin", "--subgroup", "aa,b,abA", "--dot", str(dot_path)
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index 2"
    summary = json.loads("\n".join(lines[1:]))
    assert summary["genus"] == 0
    assert summary["V"] == 3
    dot = dot_path.read_text()
    assert dot.startswith("graph dessin {") and dot.count(" -- ") == 2


def test_dessin_deterministic(capsys):
    first = run_cli(capsys, "dessin", "--subgroup", "aaa,b,abA,aabAA")
    second = run_cli(capsys, "dessin", "--subgroup", "aaa,b,abA,aabAA")
    assert first == second and first[0] == 0


# -- qnet --------------------------------------------------------------------------


def test_qnet_circuit_file(capsys, tmp_path):
    path = tmp_path / "bell.txt"
    path.write_text(BELL_CIRCUIT)
    code, out, err = run_cli(capsys, "qnet", "--circuit", str(path))
    assert code == 0
    assert out.splitlines() == [
        "basis_index,re,im",
        "0,0,0.707106781",
        "1,0,0",
        "2,0,0",
        "3,0,0.707106781",
    ]


def test_qnet_random_emit_rerun(capsys, tmp_path):
    circ = tmp_path / "circ.txt"
    out1 = tmp_path / "amps1.csv"
    out2 = tmp_path / "amps2.csv"
    code, _, _ = run_cli(
        capsys,
        "qnet",
        "--random-circuit",
        "25",
        "--areas",
        "3",
        "--seed",
        "11",
        "--emit",
        str(circ),
        "--out",
        str(out1),
    )
    assert code == 0
    code, _, _ = run_cli(capsys, "qnet", "--circuit", str(circ), "--out", str(out2))
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_qnet_seed_determinism(capsys, tmp_path):
    def run(tag):
        out = tmp_path / f"{tag}.csv"
        code, _, _ = run_cli(
            capsys,
            "qnet",
            "--random-circuit",
            "40",
            "--areas",
            "4",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        assert code == 0
        return out.read_bytes()

    assert run("a") == run("b")


def test_qnet_mode_and_zero_state_errors(capsys, tmp_path):
    code, out, err = run_cli(capsys, "qnet")
    assert code == 1 and "exactly one" in err
    path = tmp_path / "zero.txt"
    path.write_text("init 1 0 0 0 0\nNOT 1\n")
    code, out, err = run_cli(capsys, "qnet", "--circuit", str(path))
    assert code == 1 and "unnormalizable" in err
