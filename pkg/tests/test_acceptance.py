"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``python3 tests/test_acceptance.py`` or through pytest
(the lines are repeated in the terminal summary).
"""
import io
import random
import sys
import time
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from pseudoamr.cli import main as cli_main
from pseudoamr.dp import amrize_dp, dp_preset
from pseudoamr.finegrained import fine_grained
from pseudoamr.graph import AmrGraph, isomorphic, reentrancy_count, validate
from pseudoamr.ingest import read_conllu, read_srl_jsonl, write_conllu, write_srl_jsonl
from pseudoamr.lemmatizer import lemmatize_token
from pseudoamr.linearize import delinearize, linearize
from pseudoamr.penman import from_penman, to_penman, write_penman
from pseudoamr.smatch import brute_force_smatch, smatch
from pseudoamr.srl import SRL_PRESETS, amrize_srl, srl_preset
from pseudoamr.testing import random_annotation, random_graph, random_pair, shared_head_corpus

DATA = Path(__file__).parent / "data"
RESULTS = []


def report(number, name, ok, detail, seconds=None, limit=None):
    timing = ""
    if seconds is not None:
        timing = f" [{seconds:.2f}s" + (f" / limit {limit}s]" if limit else "]")
    line = f"criterion {number} {name}: {'PASS' if ok else 'FAIL'} - {detail}{timing}"
    RESULTS.append(line)
    print(line)
    return ok


def figure_amr():
    return AmrGraph.build(["want-01", "boy", "leave-01"], [(0, ":ARG0", 1), (0, ":ARG1", 2), (2, ":ARG0", 1)])


def test_1_figure_example():
    dep = read_conllu((DATA / "fig1.conllu").read_text())[0]
    frames = read_srl_jsonl((DATA / "fig1.srl.jsonl").read_text())[0]
    start = time.perf_counter()
    srl_graph = amrize_srl(frames, dep, srl_preset("dependency-guided"))
    f1 = smatch(figure_amr(), srl_graph).smatch.f1
    dp_graph = amrize_dp(dep, dp_preset("all"))
    seconds = time.perf_counter() - start
    dp_expected = AmrGraph.build(["want", "boy", "leave"], [(0, ":NSUBJ", 1), (0, ":XCOMP", 2)])
    ok = f1 == 1.0 and len(dp_graph.nodes) == 3 and isomorphic(dp_graph, dp_expected) and seconds < 1.0
    assert report(1, "figure example", ok, f"SRL smatch F1={f1}, DP tree {linearize(dp_graph)}", seconds, 1)


def test_2_roundtrip():
    rng = random.Random(2024)
    start = time.perf_counter()
    seq_fail = penman_fail = 0
    for _ in range(10_000):
        g = random_graph(rng, max_nodes=20)
        seq_fail += not isomorphic(g, delinearize(linearize(g)))
        penman_fail += not isomorphic(g, from_penman(to_penman(g)))
    seconds = time.perf_counter() - start
    ok = seq_fail == 0 and penman_fail == 0 and seconds < 30
    detail = f"10000 graphs, linearization failures={seq_fail}, Penman failures={penman_fail}"
    assert report(2, "roundtrip", ok, detail, seconds, 30)


def test_3_smatch_oracle():
    rng = random.Random(31)
    start = time.perf_counter()
    equal = exceeded = 0
    for k in range(1000):
        g1, g2 = random_pair(rng, max_variables=6)
        hill = smatch(g1, g2, restarts=16, seed=k).smatch.f1
        best = brute_force_smatch(g1, g2).smatch.f1
        equal += hill == best
        exceeded += hill > best
    seconds = time.perf_counter() - start
    ok = equal >= 990 and exceeded == 0 and seconds < 60
    assert report(3, "smatch oracle", ok, f"{equal}/1000 equal, {exceeded} above the optimum", seconds, 60)


def test_4_invariants():
    rng = random.Random(4)
    connected = monotone = trees = 0
    checks = 2000
    for _ in range(checks):
        frames, tree = random_annotation(rng)
        outputs = {name: amrize_srl(frames, tree, cfg) for name, cfg in SRL_PRESETS.items()}
        connected += all(validate(g).ok for g in outputs.values())
        # restoration only ever turns duplicated argument nodes into re-entrant edges
        pairs = (("trivial", "reentrancy"), ("arg-reduction", "all"))
        monotone += all(
            reentrancy_count(outputs[after]) == len(outputs[before].nodes) - len(outputs[after].nodes)
            and reentrancy_count(outputs[after]) >= reentrancy_count(outputs[before])
            for before, after in pairs
        )
        trees += all(reentrancy_count(amrize_dp(tree, dp_preset(p))) == 0 for p in ("trivial", "lemma", "rel-removal", "all"))
    words = [w for w in (DATA / "words_5000.txt").read_text().split("\n") if w and not w.startswith("#")]
    idempotent = sum(lemmatize_token(lemmatize_token(w)) == lemmatize_token(w) for w in words)
    ok = connected == monotone == trees == checks and idempotent == len(words) == 5000
    detail = (f"connected {connected}/{checks}, monotone {monotone}/{checks}, DP trees {trees}/{checks}, "
              f"lemmatizer idempotent {idempotent}/{len(words)}")
    assert report(4, "invariants", ok, detail)


def test_5_reentrancy_delta():
    start = time.perf_counter()
    corpus = shared_head_corpus(50, seed=5)
    with_ar = [reentrancy_count(amrize_srl(f, t, srl_preset("all"))) for f, t in corpus]
    rr_only = [reentrancy_count(amrize_srl(f, t, srl_preset("reentrancy"))) for f, t in corpus]
    seconds = time.perf_counter() - start
    never_less = all(a >= b for a, b in zip(with_ar, rr_only))
    strict = sum(a > b for a, b in zip(with_ar, rr_only))
    ok = never_less and strict >= 1 and seconds < 5
    detail = f"AR+RR {sum(with_ar)} vs RR-only {sum(rr_only)} reentrancies, strictly more on {strict}/50"
    assert report(5, "reentrancy delta", ok, detail, seconds, 5)


def test_6_fine_grained():
    gold = figure_amr()
    identity_ok = True
    rng = random.Random(6)
    for g in [gold] + [random_graph(rng, 15) for _ in range(200)]:
        rep = fine_grained(g, g)
        identity_ok &= all(m.f1 == 1.0 for m in rep.metrics.values() if m.applicable)
    deleted = AmrGraph.build(["want-01", "boy"], [(0, ":ARG0", 1)])
    s = fine_grained(gold, deleted)["smatch"]
    deletion_ok = (s.matched, s.test_total, s.gold_total) == (4, 4, 7) and s.precision == 1.0 and s.recall == 4 / 7
    no_reentrancy = AmrGraph.build(["want-01", "boy", "leave-01"], [(0, ":ARG0", 1), (0, ":ARG1", 2)])
    rep = fine_grained(gold, no_reentrancy)
    edge_ok = rep["reentrancy"].f1 == 0.0 and rep["srl"].recall == 2 / 3 and rep["srl"].matched == 2
    no_polarity = not rep["negation"].applicable and rep["negation"].f1 == 0.0
    ok = identity_ok and deletion_ok and edge_ok and no_polarity
    detail = (f"identity {'ok' if identity_ok else 'broken'}; subtree deletion P={s.precision} R={s.matched}/{s.gold_total}; "
              f"missing reentrant edge reentrancy F1={rep['reentrancy'].f1} srl R={rep['srl'].matched}/{rep['srl'].gold_total}")
    assert report(6, "fine-grained", ok, detail)


def _run_cli(args):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(args)
    return code, out.getvalue()


def _snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_7_determinism(tmp_path):
    rng = random.Random(7)
    items = [random_annotation(rng) for _ in range(120)]
    srl, dep = tmp_path / "in.srl.jsonl", tmp_path / "in.conllu"
    srl.write_text(write_srl_jsonl([f for f, _ in items]))
    dep.write_text(write_conllu([t for _, t in items]))
    gold = tmp_path / "gold.penman"
    pred = tmp_path / "pred.penman"
    pairs = [random_pair(rng, 8) for _ in range(120)]
    gold.write_text(write_penman([((), g) for g, _ in pairs]))
    pred.write_text(write_penman([((), p) for _, p in pairs]))
    seqs = tmp_path / "in.seq"
    seqs.write_text("".join(linearize(g).to_line() + "\n" for g, _ in pairs))
    for name in ("AMR", "DP"):
        (tmp_path / f"{name}.src").write_text("".join(f"{name} {k}\n" for k in range(40)))
        (tmp_path / f"{name}.tgt").write_text("".join(f"t{k}\n" for k in range(40)))
    tasks = [f"{n}:{tmp_path / n}.src:{tmp_path / n}.tgt" for n in ("AMR", "DP")]

    def commands(out, jobs):
        j = ["--jobs", str(jobs)]
        return {
            "amrize-srl": ["amrize-srl", "--srl", str(srl), "--dep", str(dep), "--preset", "dependency-guided",
                           "--out-prefix", str(out / "srl")] + j,
            "amrize-dp": ["amrize-dp", "--dep", str(dep), "--preset", "all", "--out-prefix", str(out / "dp")] + j,
            "linearize": ["linearize", "--in", str(gold), "--out", str(out / "g.seq"), "--tag", "AMR"] + j,
            "delinearize": ["delinearize", "--in", str(seqs), "--out", str(out / "g.penman"), "--mode", "lenient"] + j,
            "eval": ["eval", "--gold", str(gold), "--pred", str(pred), "--restarts", "4", "--seed", "11",
                     "--out", str(out / "eval.json")] + j,
            "stats": ["stats", "--in", str(gold), "--compare", str(pred), "--json", str(out / "stats.json")],
            "make-mtl": ["make-mtl", *sum((["--task", t] for t in tasks), []), "--shuffle", "--seed", "3",
                         "--out-prefix", str(out / "mtl")],
            "make-itl": ["make-itl", *sum((["--task", t] for t in tasks), []), "--out-prefix", str(out / "itl")],
        }

    snapshots = {}
    for run, jobs in (("a", 1), ("b", 1), ("c", 8), ("d", 8)):
        out = tmp_path / run
        out.mkdir()
        stdout = {}
        for name, args in commands(out, jobs).items():
            code, text = _run_cli(args)
            stdout[name] = (code, text)
        snapshots[run] = (_snapshot(out), stdout)
    base = snapshots["a"]
    same = all(snapshots[r] == base for r in "bcd")
    codes = {name: code for name, (code, _) in base[1].items()}
    ok = same and all(c in (0, 2) for c in codes.values()) and len(base[0]) >= 15
    detail = f"{len(codes)} subcommands, {len(base[0])} output files identical across 2 runs x jobs 1/8"
    assert report(7, "determinism", ok, detail)


if __name__ == "__main__":
    import tempfile

    failures = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
