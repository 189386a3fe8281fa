"""Batch command-line front end.

Exit codes: 0 success, 1 structural abort (nothing processed), 2 some
records failed (their errors are logged, the other outputs are written).
"""
from __future__ import annotations

import argparse
import configparser
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple

from .dp import DP_PRESETS, DpAmrizeConfig, amrize_dp, dp_preset
from .finegrained import METRICS, fine_grained
from .ingest import iter_conllu_blocks, parse_conllu_sentence, parse_srl_record
from .linearize import LinearSeq, linearize, restore, tag_sequence
from .penman import format_entry, from_penman, split_blocks
from .smatch import MetricScore, ScoreReport, micro_average, pair_seed
from .srl import RESTORATIONS, SRL_PRESETS, SrlAmrizeConfig, amrize_srl, srl_preset
from .stats import corpus_stats, format_stats, reentrancy_delta

EXIT_OK, EXIT_ABORT, EXIT_PARTIAL = 0, 1, 2
RECOVERABLE = (ValueError, RecursionError)


class Abort(Exception):
    """Structural problem found before processing; exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ABORT, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise Abort(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _lines(items: Sequence[str]) -> str:
    return "".join(item + "\n" for item in items)


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    """Ordered map, in-process for one job, else over a process pool."""
    if jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def load_config(path: str) -> dict:
    """Read a ``key = value`` file (``#`` comments allowed, no sections)."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string("[run]\n" + _read(path))
    except configparser.Error as exc:
        raise Abort(f"bad config {path}: {exc}") from None
    return dict(parser["run"])


def _as_bool(key: str, value: str) -> bool:
    low = value.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise Abort(f"config key {key!r}: expected a boolean, got {value!r}")


def _check_keys(conf: dict, allowed: Sequence[str]) -> None:
    unknown = sorted(set(conf) - set(allowed))
    if unknown:
        raise Abort(f"unknown config keys: {', '.join(unknown)}")


def srl_config(preset: Optional[str], restoration: Optional[str], config: Optional[str]) -> SrlAmrizeConfig:
    conf = load_config(config) if config else {}
    _check_keys(conf, ("preset", "restoration", "argument_reduction", "virtual_root_concept"))
    try:
        cfg = srl_preset(preset or conf.get("preset", "all"), restoration or conf.get("restoration"))
    except ValueError as exc:
        raise Abort(str(exc)) from None
    if "argument_reduction" in conf:
        cfg = replace(cfg, argument_reduction=_as_bool("argument_reduction", conf["argument_reduction"]))
    if "virtual_root_concept" in conf:
        cfg = replace(cfg, virtual_root_concept=conf["virtual_root_concept"])
    return cfg


def dp_config(preset: Optional[str], config: Optional[str]) -> DpAmrizeConfig:
    conf = load_config(config) if config else {}
    _check_keys(conf, ("preset", "blocklist", "lemmatize"))
    try:
        cfg = dp_preset(preset or conf.get("preset", "all"))
        if "blocklist" in conf:
            labels = frozenset(x.strip().upper() for x in conf["blocklist"].split(",") if x.strip())
            cfg = replace(cfg, relation_blocklist=labels)
    except ValueError as exc:
        raise Abort(str(exc)) from None
    if "lemmatize" in conf:
        cfg = replace(cfg, lemmatize=_as_bool("lemmatize", conf["lemmatize"]))
    return cfg


# Workers return (True, payload) or (False, error message); they must be module level to pickle.


def _srl_worker(cfg: SrlAmrizeConfig, item):
    index, lineno, line, block = item
    try:
        frames = parse_srl_record(line)
        dep = parse_conllu_sentence(block[1], block[0]) if block else None
        graph = amrize_srl(frames, dep, cfg)
        sentence = " ".join(t.form for t in frames.sentence)
        entry = format_entry(graph, (f"# ::id {index}", f"# ::snt {sentence}"))
        return True, (entry, linearize(graph).to_line(), sentence)
    except RECOVERABLE as exc:
        return False, f"{index}\tline {lineno}\t{exc}"


def _dp_worker(cfg: DpAmrizeConfig, item):
    index, (first_line, lines) = item
    try:
        dep = parse_conllu_sentence(lines, first_line)
        graph = amrize_dp(dep, cfg)
        sentence = " ".join(t.form for t in dep.tokens)
        entry = format_entry(graph, (f"# ::id {index}", f"# ::snt {sentence}"))
        return True, (entry, linearize(graph).to_line(), sentence)
    except RECOVERABLE as exc:
        return False, f"{index}\tline {first_line}\t{exc}"


def _write_amrized(prefix: str, results) -> int:
    entries, seqs, sources, errors = [], [], [], []
    for ok, payload in results:
        if ok:
            entries.append(payload[0])
            seqs.append(payload[1])
            sources.append(payload[2])
        else:
            errors.append(payload)
    _write(prefix + ".penman", "\n".join(entries))
    _write(prefix + ".seq", _lines(seqs))
    _write(prefix + ".src", _lines(sources))
    _write(prefix + ".errors", _lines(errors))
    print(f"{len(entries)} graphs written, {len(errors)} failures", file=sys.stderr)
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_amrize_srl(args) -> int:
    cfg = srl_config(args.preset, args.restoration, args.config)
    records = [(n, line) for n, line in enumerate(_read(args.srl).splitlines(), 1) if line.strip()]
    if args.dep:
        blocks = list(iter_conllu_blocks(_read(args.dep)))
        if len(blocks) != len(records):
            raise Abort(f"{len(records)} SRL records but {len(blocks)} dependency trees")
    elif cfg.needs_dependencies:
        raise Abort("this preset needs --dep (argument reduction or dependency-guided restoration)")
    else:
        blocks = [None] * len(records)
    items = [(k, n, line, block) for k, ((n, line), block) in enumerate(zip(records, blocks), 1)]
    return _write_amrized(args.out_prefix, _pmap(partial(_srl_worker, cfg), items, args.jobs))


def cmd_amrize_dp(args) -> int:
    cfg = dp_config(args.preset, args.config)
    items = list(enumerate(iter_conllu_blocks(_read(args.dep)), 1))
    return _write_amrized(args.out_prefix, _pmap(partial(_dp_worker, cfg), items, args.jobs))


def _linearize_worker(tag: Optional[str], item):
    index, block = item
    try:
        seq = linearize(from_penman(block.body))
        return True, (tag_sequence(seq, tag) if tag else seq).to_line()
    except RECOVERABLE as exc:
        return False, f"{index}\tline {block.line}\t{exc}"


def _delinearize_worker(mode: str, item):
    index, line = item
    try:
        graph, repairs = restore(LinearSeq.from_line(line), mode)
        meta = [f"# ::id {index}"] + [f"# ::repair {r}" for r in repairs]
        return True, format_entry(graph, tuple(meta))
    except RECOVERABLE as exc:
        return False, f"{index}\tline {index}\t{exc}"


def _split_results(results) -> Tuple[list, list]:
    good = [p for ok, p in results if ok]
    bad = [p for ok, p in results if not ok]
    return good, bad


def cmd_linearize(args) -> int:
    if args.tag is not None:
        try:
            tag_sequence(LinearSeq(()), args.tag)
        except ValueError as exc:
            raise Abort(str(exc)) from None
    items = list(enumerate(split_blocks(_read(args.input)), 1))
    good, bad = _split_results(_pmap(partial(_linearize_worker, args.tag), items, args.jobs))
    _write(args.output, _lines(good))
    _write(args.output + ".errors", _lines(bad))
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_delinearize(args) -> int:
    items = list(enumerate(_read(args.input).splitlines(), 1))
    good, bad = _split_results(_pmap(partial(_delinearize_worker, args.mode), items, args.jobs))
    _write(args.output, "\n".join(good))
    _write(args.output + ".errors", _lines(bad))
    return EXIT_PARTIAL if bad else EXIT_OK


def _eval_worker(restarts: int, seed: int, backend: Optional[str], item):
    index, gold_block, pred_block = item
    try:
        gold = from_penman(gold_block.body)
    except RECOVERABLE as exc:
        return False, f"{index}\tgold line {gold_block.line}\t{exc}"
    try:
        pred = from_penman(pred_block.body)
    except RECOVERABLE as exc:
        return False, f"{index}\tpred line {pred_block.line}\t{exc}"
    try:
        return True, fine_grained(gold, pred, restarts, pair_seed(seed, index), backend)
    except RECOVERABLE as exc:
        return False, f"{index}\t{exc}"


def format_report(report: ScoreReport) -> str:
    rows = [f"{'metric':<12}{'P':>8}{'R':>8}{'F':>8}{'matched':>9}{'test':>7}{'gold':>7}"]
    for name in METRICS:
        m = report.metrics.get(name, MetricScore())
        if not m.applicable:
            rows.append(f"{name:<12}{'n/a':>8}{'n/a':>8}{'n/a':>8}{m.matched:>9}{m.test_total:>7}{m.gold_total:>7}")
        else:
            rows.append(
                f"{name:<12}{m.precision:>8.4f}{m.recall:>8.4f}{m.f1:>8.4f}"
                f"{m.matched:>9}{m.test_total:>7}{m.gold_total:>7}"
            )
    return "\n".join(rows) + "\n"


def cmd_eval(args) -> int:
    gold = list(split_blocks(_read(args.gold)))
    pred = list(split_blocks(_read(args.pred)))
    if len(gold) != len(pred):
        raise Abort(f"{len(gold)} gold graphs but {len(pred)} predicted graphs")
    items = [(k, g, p) for k, (g, p) in enumerate(zip(gold, pred), 1)]
    worker = partial(_eval_worker, args.restarts, args.seed, args.backend)
    reports, bad = _split_results(_pmap(worker, items, args.jobs))
    total = micro_average(reports)
    total = ScoreReport({name: total.metrics.get(name, MetricScore()) for name in METRICS})
    for err in bad:
        print(err, file=sys.stderr)
    sys.stdout.write(f"pairs {len(items)} scored {len(reports)} failed {len(bad)}\n")
    sys.stdout.write(format_report(total))
    if args.out:
        record = {
            "pairs": len(items),
            "scored": len(reports),
            "failed": len(bad),
            "restarts": args.restarts,
            "seed": args.seed,
            "metrics": total.as_dict(),
        }
        _write(args.out, json.dumps(record, indent=2) + "\n")
    return EXIT_PARTIAL if bad else EXIT_OK


def _parse_blocks(path: str) -> Tuple[list, List[str]]:
    graphs, errors = [], []
    for k, block in enumerate(split_blocks(_read(path)), 1):
        try:
            graphs.append(from_penman(block.body))
        except RECOVERABLE as exc:
            graphs.append(None)
            errors.append(f"{path}: graph {k} at line {block.line}: {exc}")
    return graphs, errors


def cmd_stats(args) -> int:
    base, errors = _parse_blocks(args.input)
    delta = None
    record = {}
    if args.compare:
        other, more = _parse_blocks(args.compare)
        errors += more
        if len(other) != len(base):
            raise Abort(f"{len(base)} graphs in {args.input} but {len(other)} in {args.compare}")
        both = [(a, b) for a, b in zip(base, other) if a is not None and b is not None]
        delta = reentrancy_delta(corpus_stats([a for a, _ in both]), corpus_stats([b for _, b in both]))
        record["compare"] = corpus_stats([b for b in other if b is not None]).as_dict()
        record["reentrancy_delta"] = delta.as_dict()
    stats = corpus_stats([g for g in base if g is not None])
    record = {"input": stats.as_dict(), **record, "failed": len(errors)}
    for err in errors:
        print(err, file=sys.stderr)
    sys.stdout.write(format_stats(stats, delta))
    if args.json:
        _write(args.json, json.dumps(record, indent=2) + "\n")
    return EXIT_PARTIAL if errors else EXIT_OK


def parse_task(spec: str) -> Tuple[str, str, str]:
    parts = spec.split(":")
    if len(parts) != 3 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected NAME:SRC:TGT, got {spec!r}")
    name = parts[0]
    try:
        tag_sequence(LinearSeq(()), name)
    except ValueError:
        raise argparse.ArgumentTypeError(f"task name {name!r} cannot be used as a tag") from None
    return parts[0], parts[1], parts[2]


def _load_tasks(tasks) -> List[Tuple[str, str, str, List[str], List[str]]]:
    names = [t[0] for t in tasks]
    if len(set(names)) != len(names):
        raise Abort("task names must be unique")
    loaded = []
    for name, src, tgt in tasks:
        src_lines = _read(src).splitlines()
        tgt_lines = _read(tgt).splitlines()
        if len(src_lines) != len(tgt_lines):
            raise Abort(f"task {name}: {len(src_lines)} source lines but {len(tgt_lines)} target lines")
        loaded.append((name, src, tgt, src_lines, tgt_lines))
    return loaded


def cmd_make_mtl(args) -> int:
    loaded = _load_tasks(args.task)
    rows, manifest = [], []
    for name, src, tgt, src_lines, tgt_lines in loaded:
        start = len(rows)
        rows += [(name, f"<{name}> {s}", t) for s, t in zip(src_lines, tgt_lines)]
        manifest.append({"name": name, "source": src, "target": tgt, "start": start, "end": len(rows)})
    if args.shuffle:
        random.Random(args.seed).shuffle(rows)
    _write(args.out_prefix + ".src", _lines([r[1] for r in rows]))
    _write(args.out_prefix + ".tgt", _lines([r[2] for r in rows]))
    _write(args.out_prefix + ".tasks", _lines([r[0] for r in rows]))
    record = {"shuffled": args.shuffle, "seed": args.seed, "lines": len(rows), "tasks": manifest}
    _write(args.out_prefix + ".manifest.json", json.dumps(record, indent=2) + "\n")
    return EXIT_OK


def cmd_make_itl(args) -> int:
    loaded = _load_tasks(args.task)
    manifest = []
    for stage, (name, src, tgt, src_lines, tgt_lines) in enumerate(loaded, 1):
        _write(f"{args.out_prefix}.{name}.src", _lines(src_lines))
        _write(f"{args.out_prefix}.{name}.tgt", _lines(tgt_lines))
        manifest.append({"stage": stage, "name": name, "source": src, "target": tgt, "lines": len(src_lines)})
    _write(args.out_prefix + ".manifest.json", json.dumps({"tasks": manifest}, indent=2) + "\n")
    return EXIT_OK


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudoamr", description="Build, linearize and score PseudoAMR corpora.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_jobs(p):
        p.add_argument("--jobs", type=_positive, default=1, help="worker processes (output does not depend on it)")
        return p

    p = with_jobs(sub.add_parser("amrize-srl", help="SRL frames + CoNLL-U trees -> PseudoAMR"))
    p.add_argument("--srl", required=True, help="SRL records, one JSON object per line")
    p.add_argument("--dep", help="CoNLL-U trees aligned with the SRL records")
    p.add_argument("--preset", choices=sorted(SRL_PRESETS), help="ablation setting (default: all)")
    p.add_argument("--restoration", choices=RESTORATIONS, help="override the preset's reentrancy restoration")
    p.add_argument("--config", help="key = value file: preset, restoration, argument_reduction, virtual_root_concept")
    p.add_argument("--out-prefix", required=True, help="writes PREFIX.penman, .seq, .src and .errors")
    p.set_defaults(func=cmd_amrize_srl)

    p = with_jobs(sub.add_parser("amrize-dp", help="CoNLL-U trees -> PseudoAMR"))
    p.add_argument("--dep", required=True)
    p.add_argument("--preset", choices=sorted(DP_PRESETS), help="ablation setting (default: all)")
    p.add_argument("--config", help="key = value file: preset, blocklist (comma separated), lemmatize")
    p.add_argument("--out-prefix", required=True, help="writes PREFIX.penman, .seq, .src and .errors")
    p.set_defaults(func=cmd_amrize_dp)

    p = with_jobs(sub.add_parser("linearize", help="Penman graphs -> token sequences"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--tag", help="task tag prepended to every sequence, e.g. AMR")
    p.set_defaults(func=cmd_linearize)

    p = with_jobs(sub.add_parser("delinearize", help="token sequences -> Penman graphs"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    p.set_defaults(func=cmd_delinearize)

    p = with_jobs(sub.add_parser("eval", help="Smatch and fine-grained scores"))
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--restarts", type=_positive, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("numba", "numpy"), help="hill-climbing kernel (default: numba if available)")
    p.add_argument("--out", help="also write a JSON record here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="corpus counts and reentrancy delta")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--compare", help="second setting's Penman output, aligned with --in")
    p.add_argument("--json", help="also write a JSON record here")
    p.set_defaults(func=cmd_stats)

    for name, func, what in (
        ("make-mtl", cmd_make_mtl, "merge tasks into one tagged training set"),
        ("make-itl", cmd_make_itl, "write one untagged training set per task"),
    ):
        p = sub.add_parser(name, help=what)
        p.add_argument("--task", type=parse_task, action="append", required=True, metavar="NAME:SRC:TGT")
        p.add_argument("--out-prefix", required=True)
        if name == "make-mtl":
            p.add_argument("--shuffle", action="store_true")
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Abort as exc:
        print(f"pseudoamr {args.command}: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
