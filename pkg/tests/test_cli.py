import json
import random
import subprocess
import sys

import pytest

from pseudoamr.cli import main
from pseudoamr.ingest import write_conllu, write_srl_jsonl
from pseudoamr.penman import read_penman
from pseudoamr.testing import random_annotation

FIG_GUIDED = "( <R0> want-01 :ARG0 ( <R1> boy ) :ARG1 ( <R2> leave-01 :ARG0 <R1> ) )\n"


def _corpus(tmp_path, n=100, seed=0):
    rng = random.Random(seed)
    items = [random_annotation(rng) for _ in range(n)]
    srl = tmp_path / "c.srl.jsonl"
    dep = tmp_path / "c.conllu"
    srl.write_text(write_srl_jsonl([f for f, _ in items]))
    dep.write_text(write_conllu([t for _, t in items]))
    return srl, dep


def _read(path):
    return path.read_text(encoding="utf-8")


def test_amrize_srl_figure(tmp_path, data_dir):
    out = tmp_path / "fig"
    rc = main(["amrize-srl", "--srl", str(data_dir / "fig1.srl.jsonl"), "--dep", str(data_dir / "fig1.conllu"),
               "--preset", "dependency-guided", "--out-prefix", str(out)])
    assert rc == 0
    assert _read(tmp_path / "fig.seq") == FIG_GUIDED
    assert _read(tmp_path / "fig.src") == "The boy wants to leave .\n"
    assert _read(tmp_path / "fig.errors") == ""
    [(meta, _)] = read_penman(_read(tmp_path / "fig.penman"))
    assert meta == ("# ::id 1", "# ::snt The boy wants to leave .")


def test_amrize_srl_preset_all_keeps_virtual_root(tmp_path, data_dir):
    rc = main(["amrize-srl", "--srl", str(data_dir / "fig1.srl.jsonl"), "--dep", str(data_dir / "fig1.conllu"),
               "--preset", "all", "--out-prefix", str(tmp_path / "a")])
    assert rc == 0
    assert _read(tmp_path / "a.seq").startswith("( <R0> multi-sentence :snt1 ( <R1> want-01 ")


def test_fault_injection(tmp_path):
    srl, dep = _corpus(tmp_path)
    lines = _read(srl).splitlines()
    lines[41] = lines[41].replace('"frames"', '"framez"')
    srl.write_text("\n".join(lines) + "\n")
    rc = main(["amrize-srl", "--srl", str(srl), "--dep", str(dep), "--preset", "all", "--out-prefix", str(tmp_path / "o")])
    assert rc == 2
    assert len(_read(tmp_path / "o.seq").splitlines()) == 99
    assert len(_read(tmp_path / "o.src").splitlines()) == 99
    assert len(read_penman(_read(tmp_path / "o.penman"))) == 99
    [err] = _read(tmp_path / "o.errors").splitlines()
    assert err.startswith("42\tline 42\t")


def test_bad_tree_is_a_per_line_failure(tmp_path):
    srl, dep = _corpus(tmp_path, n=5)
    blocks = _read(dep).split("\n\n")
    blocks[2] = blocks[2].replace("\t0\t", "\t99\t", 1)
    dep.write_text("\n\n".join(blocks))
    rc = main(["amrize-srl", "--srl", str(srl), "--dep", str(dep), "--out-prefix", str(tmp_path / "o")])
    assert rc == 2
    assert _read(tmp_path / "o.errors").startswith("3\t")


def test_count_mismatch_aborts_before_writing(tmp_path):
    srl, dep = _corpus(tmp_path, n=4)
    srl.write_text("\n".join(_read(srl).splitlines()[:3]) + "\n")
    rc = main(["amrize-srl", "--srl", str(srl), "--dep", str(dep), "--out-prefix", str(tmp_path / "o")])
    assert rc == 1
    assert not (tmp_path / "o.seq").exists()


def test_missing_dependencies_abort(tmp_path, data_dir):
    rc = main(["amrize-srl", "--srl", str(data_dir / "fig1.srl.jsonl"), "--preset", "arg-reduction",
               "--out-prefix", str(tmp_path / "o")])
    assert rc == 1
    rc = main(["amrize-srl", "--srl", str(data_dir / "fig1.srl.jsonl"), "--preset", "reentrancy",
               "--out-prefix", str(tmp_path / "o")])
    assert rc == 0


def test_empty_corpus(tmp_path):
    (tmp_path / "e.jsonl").write_text("")
    (tmp_path / "e.conllu").write_text("")
    assert main(["amrize-srl", "--srl", str(tmp_path / "e.jsonl"), "--dep", str(tmp_path / "e.conllu"),
                 "--out-prefix", str(tmp_path / "o")]) == 0
    assert main(["amrize-dp", "--dep", str(tmp_path / "e.conllu"), "--out-prefix", str(tmp_path / "d")]) == 0
    for name in ("o.seq", "o.penman", "o.src", "o.errors", "d.seq", "d.penman"):
        assert _read(tmp_path / name) == ""


def test_zero_frame_record_is_an_error(tmp_path, data_dir):
    (tmp_path / "z.jsonl").write_text(json.dumps({"tokens": ["Hi"], "frames": []}) + "\n")
    rc = main(["amrize-srl", "--srl", str(tmp_path / "z.jsonl"), "--preset", "trivial", "--out-prefix", str(tmp_path / "o")])
    assert rc == 2
    assert "no predicate frames" in _read(tmp_path / "o.errors")


@pytest.mark.parametrize(
    "preset, expected",
    [
        ("all", "( <R0> want :NSUBJ ( <R1> boy ) :XCOMP ( <R2> leave ) )"),
        ("trivial", "( <R0> wants :NSUBJ ( <R1> boy :DET ( <R2> The ) ) :XCOMP ( <R3> leave :MARK ( <R4> to ) )"
                    " :PUNCT ( <R5> . ) )"),
    ],
)
def test_amrize_dp(tmp_path, data_dir, preset, expected):
    rc = main(["amrize-dp", "--dep", str(data_dir / "fig1.conllu"), "--preset", preset, "--out-prefix", str(tmp_path / "d")])
    assert rc == 0
    assert _read(tmp_path / "d.seq") == expected + "\n"


def test_config_files(tmp_path, data_dir):
    cfg = tmp_path / "dp.cfg"
    cfg.write_text("# keep determiners\npreset = all\nblocklist = punct, mark\n")
    assert main(["amrize-dp", "--dep", str(data_dir / "fig1.conllu"), "--config", str(cfg), "--out-prefix", str(tmp_path / "d")]) == 0
    assert _read(tmp_path / "d.seq") == "( <R0> want :NSUBJ ( <R1> boy :DET ( <R2> the ) ) :XCOMP ( <R3> leave ) )\n"
    srl_cfg = tmp_path / "srl.cfg"
    srl_cfg.write_text("preset = trivial\nrestoration = dfs\n")
    assert main(["amrize-srl", "--srl", str(data_dir / "fig1.srl.jsonl"), "--config", str(srl_cfg),
                 "--out-prefix", str(tmp_path / "s")]) == 0
    assert ":snt2 ( <R4> leave-01 :ARG0 <R2> )" in _read(tmp_path / "s.seq")
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["amrize-dp", "--dep", str(data_dir / "fig1.conllu"), "--config", str(bad), "--out-prefix", str(tmp_path / "d")]) == 1


def test_linearize_and_back(tmp_path, data_dir):
    seq = tmp_path / "g.seq"
    assert main(["linearize", "--in", str(data_dir / "fig1_gold.penman"), "--out", str(seq), "--tag", "AMR"]) == 0
    assert _read(seq) == "<AMR> " + FIG_GUIDED
    back = tmp_path / "g.penman"
    assert main(["delinearize", "--in", str(seq), "--out", str(back)]) == 0
    assert _read(back) == "# ::id 1\n(R0 / want-01 :ARG0 (R1 / boy) :ARG1 (R2 / leave-01 :ARG0 R1))\n"


def test_delinearize_modes(tmp_path):
    seq = tmp_path / "p.seq"
    seq.write_text(FIG_GUIDED + "( <R0> want-01 :ARG0 ( <R1> boy\n\n")
    assert main(["delinearize", "--in", str(seq), "--out", str(tmp_path / "s.penman")]) == 2
    assert len(read_penman(_read(tmp_path / "s.penman"))) == 1
    assert len(_read(tmp_path / "s.penman.errors").splitlines()) == 2
    assert main(["delinearize", "--in", str(seq), "--out", str(tmp_path / "l.penman"), "--mode", "lenient"]) == 2
    entries = read_penman(_read(tmp_path / "l.penman"))
    assert len(entries) == 2
    assert entries[1][0].count("# ::repair unbalanced parentheses: missing ')'") == 2
    # the blank line is the only failure left
    assert _read(tmp_path / "l.penman.errors").startswith("3\t")


def test_eval(tmp_path, data_dir, capsys):
    pred = tmp_path / "pred.penman"
    pred.write_text("(a / want-01 :ARG0 (b / boy))\n")
    out = tmp_path / "r.json"
    rc = main(["eval", "--gold", str(data_dir / "fig1_gold.penman"), "--pred", str(pred), "--out", str(out)])
    assert rc == 0
    record = json.loads(_read(out))
    assert record["metrics"]["smatch"]["matched"] == 4
    assert record["metrics"]["smatch"]["recall"] == 4 / 7
    assert record["metrics"]["negation"]["applicable"] is False
    text = capsys.readouterr().out
    assert "smatch" in text and "n/a" in text


def test_eval_failures(tmp_path, data_dir):
    gold = data_dir / "fig1_gold.penman"
    two = tmp_path / "two.penman"
    two.write_text("(a / b)\n\n(c / d)\n")
    assert main(["eval", "--gold", str(gold), "--pred", str(two)]) == 1
    broken = tmp_path / "broken.penman"
    broken.write_text("(a / b :x c)\n")
    assert main(["eval", "--gold", str(gold), "--pred", str(broken), "--out", str(tmp_path / "r.json")]) == 2
    assert json.loads(_read(tmp_path / "r.json"))["failed"] == 1


def test_stats(tmp_path, data_dir, capsys):
    assert main(["stats", "--in", str(data_dir / "fig1_gold.penman"), "--json", str(tmp_path / "s.json")]) == 0
    record = json.loads(_read(tmp_path / "s.json"))
    assert record["input"]["reentrancies"] == 1
    assert sum(record["input"]["labels"].values()) == record["input"]["edges"] == 3
    tree = tmp_path / "tree.penman"
    tree.write_text("(a / want-01 :ARG0 (b / boy))\n")
    assert main(["stats", "--in", str(tree), "--compare", str(data_dir / "fig1_gold.penman"),
                 "--json", str(tmp_path / "c.json")]) == 0
    record = json.loads(_read(tmp_path / "c.json"))
    assert record["input"]["reentrancies"] == 0
    assert record["reentrancy_delta"] == {"total": 1, "sentences_increased": 1, "sentences_decreased": 0}
    assert "reentrancy delta\t+1" in capsys.readouterr().out


def _task_files(tmp_path, name, n):
    src, tgt = tmp_path / f"{name}.src", tmp_path / f"{name}.tgt"
    src.write_text("".join(f"{name} sentence {k}\n" for k in range(n)))
    tgt.write_text("".join(f"( <R0> {name.lower()}{k} )\n" for k in range(n)))
    return f"{name}:{src}:{tgt}"


def test_make_mtl(tmp_path):
    amr, dp = _task_files(tmp_path, "AMR", 2), _task_files(tmp_path, "DP", 3)
    prefix = str(tmp_path / "mtl")
    assert main(["make-mtl", "--task", amr, "--task", dp, "--out-prefix", prefix]) == 0
    src = _read(tmp_path / "mtl.src").splitlines()
    assert src == ["<AMR> AMR sentence 0", "<AMR> AMR sentence 1"] + [f"<DP> DP sentence {k}" for k in range(3)]
    assert len(_read(tmp_path / "mtl.tgt").splitlines()) == 5
    manifest = json.loads(_read(tmp_path / "mtl.manifest.json"))
    assert [(t["name"], t["start"], t["end"]) for t in manifest["tasks"]] == [("AMR", 0, 2), ("DP", 2, 5)]

    runs = []
    for k in range(2):
        p = str(tmp_path / f"shuf{k}")
        assert main(["make-mtl", "--task", amr, "--task", dp, "--shuffle", "--seed", "3", "--out-prefix", p]) == 0
        runs.append((_read(tmp_path / f"shuf{k}.src"), _read(tmp_path / f"shuf{k}.tgt"), _read(tmp_path / f"shuf{k}.tasks")))
    assert runs[0] == runs[1]
    # pairs stay aligned after shuffling
    for s, t, task in zip(*(r.splitlines() for r in runs[0])):
        assert s.startswith(f"<{task}> ") and s.split()[-1] == t.split()[2][-1]


def test_make_itl(tmp_path):
    amr, dp = _task_files(tmp_path, "AMR", 2), _task_files(tmp_path, "DP", 3)
    assert main(["make-itl", "--task", dp, "--task", amr, "--out-prefix", str(tmp_path / "itl")]) == 0
    assert _read(tmp_path / "itl.DP.src").splitlines()[0] == "DP sentence 0"
    assert len(_read(tmp_path / "itl.AMR.tgt").splitlines()) == 2
    manifest = json.loads(_read(tmp_path / "itl.manifest.json"))
    assert [t["name"] for t in manifest["tasks"]] == ["DP", "AMR"]


def test_task_errors(tmp_path):
    amr = _task_files(tmp_path, "AMR", 2)
    (tmp_path / "AMR.tgt").write_text("only one\n")
    assert main(["make-mtl", "--task", amr, "--out-prefix", str(tmp_path / "m")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["make-mtl", "--task", "AMR-only-two:parts", "--out-prefix", str(tmp_path / "m")])
    assert exc.value.code == 1


def test_usage_errors_exit_1(tmp_path):
    assert main(["eval", "--gold", "nope.penman", "--pred", "nope.penman"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--restarts", "0", "--gold", "a", "--pred", "b"])
    assert exc.value.code == 1


def test_parallel_output_is_identical(tmp_path):
    srl, dep = _corpus(tmp_path, n=60, seed=9)
    for jobs in ("1", "4"):
        assert main(["amrize-srl", "--srl", str(srl), "--dep", str(dep), "--jobs", jobs,
                     "--out-prefix", str(tmp_path / f"j{jobs}")]) == 0
    for ext in (".penman", ".seq", ".src", ".errors"):
        assert _read(tmp_path / f"j1{ext}") == _read(tmp_path / f"j4{ext}")


def test_module_entry_point(tmp_path, data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "pseudoamr", "stats", "--in", str(data_dir / "fig1_gold.penman")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "reentrancies\t1" in proc.stdout
