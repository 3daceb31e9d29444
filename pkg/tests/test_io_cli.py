import json
import shutil
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahs import io
from ahs.cli import corpus, main
from ahs.families import MeusersParams, meusers_triple, random_triple
from ahs.kstructures import model_su
from ahs.triples import Triple


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_triple_round_trip(seed, n):
    t = random_triple(np.random.default_rng(seed), n)
    doc = json.loads(io.dump_json(io.triple_to_json(t)))
    assert io.triple_from_json(doc) == t


def test_lie_pair_round_trip():
    _, pair = meusers_triple(MeusersParams(5, (3, "1/2", -2, 1, "7/5")))
    back = io.lie_pair_from_json(json.loads(io.dump_json(io.lie_pair_to_json(pair))))
    assert (back.c == pair.c).all() and (back.A == pair.A).all() and (back.split == pair.split).all()
    assert back.h == pair.h


def test_su_round_trip():
    s, n = io.su_from_json(io.su_to_json(model_su(2)))
    assert n == 2 and s.psi == model_su(2).psi


def _doc(n=2):
    return io.triple_to_json(Triple.zero(n))


@pytest.mark.parametrize(
    "mutate,pointer",
    [
        (lambda d: d.__setitem__("format", "ahs/0"), "/format"),
        (lambda d: d["A"][1].pop(), "/A/1"),
        (lambda d: d["T"][0][1].__setitem__(0, 0.25), "/T/0/1/0"),
        (lambda d: d["R"][0][1][1].__setitem__(0, "3/x"), "/R/0/1/1/0"),
        (lambda d: d.pop("R"), "/"),
    ],
)
def test_schema_errors_carry_pointers(mutate, pointer):
    d = _doc()
    mutate(d)
    with pytest.raises(io.SchemaError) as info:
        io.triple_from_json(d)
    assert info.value.pointer == pointer


def test_antisymmetry_error_points_at_entry():
    d = _doc(3)
    d["T"][2][0][1] = "1/2"
    with pytest.raises(io.SchemaError) as info:
        io.triple_from_json(d)
    # either entry of the mismatched pair identifies the violation
    assert info.value.index in ((2, 0, 1), (0, 2, 1))
    assert info.value.pointer == "/T/" + "/".join(map(str, info.value.index))


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_meusers_predictions(capsys):
    code, out, err = run(["meusers", "--m", "7", "--predictions"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["predictions"]["filtration_dims"] == [6, 3, 1, 0]
    assert doc["computed"]["spencer_k1_dims"] == [1, 1, 1]
    assert "verdict: True" in err


def test_cli_exit_codes(tmp_path, fixture_dir, capsys):
    zero = tmp_path / "zero-triple.json"
    io.write_json(zero, _doc(3))
    assert run(["check", str(zero)], capsys)[0] == 0
    code, out, _ = run(["check", str(fixture_dir / "meusers_m5_perturbed.json")], capsys)
    assert code == 1
    assert [c["name"] for c in json.loads(out)["checks"] if not c["verdict"]]
    bad = tmp_path / "bad.json"
    d = _doc(2)
    d["A"][0][0][0] = 1.5
    io.write_json(bad, d)
    code, out, err = run(["check", str(bad)], capsys)
    assert code == 2
    assert json.loads(out)["pointer"] == "/A/0/0/0"
    assert "/A/0/0/0" in err
    wrong_kind = tmp_path / "su.json"
    io.write_json(wrong_kind, io.su_to_json(model_su(1)))
    assert run(["check", str(wrong_kind)], capsys)[0] == 2


def test_cli_out_file_and_timings(tmp_path, fixture_dir, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["filtration", str(fixture_dir / "meusers_m6.json"), "--ambient", "so", "--joint",
                        "--out", str(target), "--timings"], capsys)
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["filtration"]["dims"] == [3, 1, 0]
    assert set(doc["timings"]) == {"recursive", "joint"}


def test_reports_are_byte_stable(fixture_dir, capsys):
    args = ["spencer", str(fixture_dir / "meusers_m5.json"), "--ambient", "so"]
    first = run(args, capsys)[1]
    second = run(args, capsys)[1]
    assert first == second
    assert "timings" not in json.loads(first)


def test_cli_remaining_subcommands(tmp_path, fixture_dir, capsys):
    pair = fixture_dir / "meusers_m5_pair.json"
    emitted = tmp_path / "t.json"
    assert run(["from-lie", str(pair), "--emit", str(emitted)], capsys)[0] == 0
    m5 = fixture_dir / "meusers_m5.json"
    assert io.read_json(emitted)[0] == io.read_json(m5)[0]
    code, out, _ = run(["contact", str(m5), str(emitted), "--order", "3", "--defn"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["all_orders"] and doc["definition_agrees"]
    assert run(["su-verify", "--n", "3"], capsys)[0] == 0
    assert run(["su-verify", str(fixture_dir / "su_model_n2.json")], capsys)[0] == 0
    g = tmp_path / "g.json"
    assert run(["assemble", str(fixture_dir / "constant_curvature_n3.json"), "--emit", str(g)], capsys)[0] == 0
    assert io.detect_kind(io.read_json(g)[0]) == "lie_pair"
    assert run(["check", str(m5), "--variant", "tf"], capsys)[0] == 0
    assert run(["check", str(m5), "--ambient", "so", "--direct"], capsys)[0] == 0
    assert run(["crosscheck", "--count", "6", "--dim", "2", "--seed", "5"], capsys)[0] == 0


def test_custom_ambient_dimension_mismatch(tmp_path, fixture_dir, capsys):
    alg = tmp_path / "alg.json"
    io.write_json(alg, io.algebra_to_json([np.eye(2, dtype=int)], 2))
    assert run(["check", str(fixture_dir / "zero_n3.json"), "--ambient", str(alg)], capsys)[0] == 2


def test_corpus_empty_and_mixed(tmp_path, fixture_dir):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert corpus(empty) == {"files": [], "counts": {"total": 0, "positive": 0, "negative": 0, "errors": 0}}
    mixed = tmp_path / "mixed"
    mixed.mkdir()
    shutil.copy(fixture_dir / "zero_n3.json", mixed / "b_good.json")
    shutil.copy(fixture_dir / "constant_curvature_n2_perturbed.json", mixed / "c_bad.json")
    (mixed / "a_broken.json").write_text("{not json")
    d = _doc(2)
    d["R"][0][1][0][0] = 1
    io.write_json(mixed / "d_antisym.json", d)
    agg = corpus(mixed)
    assert [e["file"] for e in agg["files"]] == ["a_broken.json", "b_good.json", "c_bad.json", "d_antisym.json"]
    assert agg["counts"] == {"total": 4, "positive": 1, "negative": 1, "errors": 2}
    assert agg["files"][3]["error"]["pointer"] == "/R/0/1/0/0"


def test_bundled_corpus_matches_manifest_in_parallel(fixture_dir):
    serial = corpus(fixture_dir, jobs=1)
    parallel = corpus(fixture_dir, jobs=4)
    assert serial == parallel
    assert serial["manifest_mismatches"] == []


def test_console_script_entry_point(fixture_dir):
    proc = subprocess.run([sys.executable, "-m", "ahs.cli", "check", str(fixture_dir / "zero_n3.json"), "--quiet"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] is True


def test_numpy_fallback_gives_identical_reports(fixture_dir):
    import os

    argv = [sys.executable, "-m", "ahs.cli", "filtration", str(fixture_dir / "meusers_m6.json"), "--joint", "--quiet"]
    outputs = {}
    for flag in ("0", "1"):
        proc = subprocess.run(argv, env=dict(os.environ, AHS_DISABLE_JIT=flag), capture_output=True, text=True)
        assert proc.returncode == 0
        outputs[flag] = proc.stdout
    assert outputs["0"] == outputs["1"]
    probe = "from ahs._jit import JIT_ENABLED; print(JIT_ENABLED)"
    proc = subprocess.run([sys.executable, "-c", probe], env=dict(os.environ, AHS_DISABLE_JIT="1"),
                          capture_output=True, text=True)
    assert proc.stdout.strip() == "False"
