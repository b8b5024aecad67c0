"""Command-line entry point: one binary, one subcommand per capability.

Every run that writes files also writes a JSON manifest beside its primary
output (``<out>.manifest.json``) recording the resolved configuration, seed
discipline, and content digests of inputs and outputs, so any output can be
audited and reproduced byte-for-byte from the manifest alone.

Exit codes: 0 success, 1 data or I/O errors, 2 usage errors. Outputs are
written to a temporary file in the destination directory and renamed into
place, so interrupted runs never leave partial files at the final path.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from . import __version__
from .corpus import SeedPolicy, corpus_shards, iter_corpus, iter_shard
from .errors import ScramblekitError
from .metrics import DeltaInput, corpus_shuffle_report, relative_difference
from .permute import PermuteConfig, WindowConfig, permute_sentence_spans, window_shuffle
from .pll import bpll, pll
from .probe import convert_tsv, load_stimuli, run_probe
from .resample import AtomTable, build_atom_table, load_annotations, resample_lines
from .scorers import RemoteScorer, Scorer, UniformScorer, UnigramScorer


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _digests(path: Path) -> dict[str, str]:
    if path.is_dir():
        return {f.name: _sha256(f) for f in sorted(path.glob("*.txt"))}
    return {path.name: _sha256(path)}


def _atomic_write(path: Path, lines: Iterable[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(
    out_path: Path,
    subcommand: str,
    args: argparse.Namespace,
    inputs: list[Path],
    outputs: list[Path],
    started: float,
    started_utc: str,
) -> None:
    config = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k != "func"
    }
    manifest = {
        "tool": "scramblekit",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "global_seed": getattr(args, "seed", None),
        "seed_mode": getattr(args, "seed_mode", None),
        "inputs": {str(p): _digests(p) for p in inputs},
        "outputs": {str(p): _digests(p) for p in outputs},
        "started_utc": started_utc,
        "duration_s": round(time.monotonic() - started, 6),
    }
    manifest_path = Path(str(out_path) + ".manifest.json")
    _atomic_write(manifest_path, [json.dumps(manifest, indent=2, ensure_ascii=False)])


def _jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("SCRAMBLEKIT_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _out_shards(in_path: Path, out_path: Path) -> list[tuple[str, Path, Path]]:
    """Map input shards to output files, mirroring file/directory structure."""
    shards = corpus_shards(in_path)
    if in_path.is_dir():
        out_path.mkdir(parents=True, exist_ok=True)
        return [(shard, src, out_path / shard) for shard, src in shards]
    return [(shards[0][0], shards[0][1], out_path)]


def _permute_shard(task: tuple) -> None:
    shard, src, dst, n, max_retries, on_infeasible, mode, seed, want_spans = task
    policy = SeedPolicy(mode=mode, global_seed=seed)
    cfg = PermuteConfig(n=n, max_retries=max_retries, passthrough_short=False)
    span_records: list[str] = []
    out_shard = Path(dst).name  # sidecar describes the permuted corpus

    def lines() -> Iterable[str]:
        out_line = 0
        for sentence in iter_shard(shard, Path(src)):
            try:
                text, spans = permute_sentence_spans(
                    sentence, cfg, policy.seed_for(shard, sentence.id)
                )
            except ScramblekitError:
                if on_infeasible == "passthrough":
                    text, spans = " ".join(sentence.tokens), []
                elif on_infeasible == "drop":
                    continue
                else:
                    raise
            if want_spans:
                span_records.append(
                    json.dumps(
                        {"shard": out_shard, "line": out_line,
                         "spans": [list(s) for s in spans]},
                        ensure_ascii=False,
                    )
                )
            out_line += 1
            yield text

    _atomic_write(Path(dst), lines())
    if want_spans:
        _atomic_write(Path(str(dst) + ".spans.part"), span_records)


def _window_shard(task: tuple) -> None:
    shard, src, dst, max_tokens, max_retries, on_infeasible, mode, seed = task
    policy = SeedPolicy(mode=mode, global_seed=seed)
    wcfg = WindowConfig(max_tokens=max_tokens)
    blocks = window_shuffle(
        iter_shard(shard, Path(src)),
        wcfg,
        policy,
        max_retries=max_retries,
        on_infeasible=on_infeasible,
    )
    _atomic_write(Path(dst), blocks)


def _run_sharded(tasks: list[tuple], worker: Callable, jobs: int) -> None:
    if jobs <= 1 or len(tasks) <= 1:
        for task in tasks:
            worker(task)
        return
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        for _ in pool.map(worker, tasks):
            pass


def cmd_permute(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    pairs = _out_shards(args.input, args.output)
    tasks = [
        (shard, str(src), str(dst), args.n, args.max_retries, args.on_infeasible,
         args.seed_mode, args.seed, args.atom_spans is not None)
        for shard, src, dst in pairs
    ]
    _run_sharded(tasks, _permute_shard, _jobs(args))
    outputs = [args.output]
    if args.atom_spans is not None:
        def parts() -> Iterable[str]:
            for _, _, dst in pairs:
                part = Path(str(dst) + ".spans.part")
                yield from part.read_text(encoding="utf-8").splitlines()
                part.unlink()

        _atomic_write(args.atom_spans, parts())
        outputs.append(args.atom_spans)
    _write_manifest(args.output, "permute", args, [args.input], outputs,
                    started, started_utc)
    return 0


def cmd_window(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    pairs = _out_shards(args.input, args.output)
    tasks = [
        (shard, str(src), str(dst), args.window_tokens, args.max_retries,
         args.on_infeasible, args.seed_mode, args.seed)
        for shard, src, dst in pairs
    ]
    _run_sharded(tasks, _window_shard, _jobs(args))
    _write_manifest(args.output, "window", args, [args.input], [args.output],
                    started, started_utc)
    return 0


def cmd_resample(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    annotations = load_annotations(args.annotations) if args.annotations else None
    table, shape = build_atom_table(args.input, annotations)
    lines = resample_lines(table, shape, args.mode, args.seed)
    if args.input.is_dir():
        args.output.mkdir(parents=True, exist_ok=True)
        for shard, counts in shape.shards:
            _atomic_write(args.output / shard, (next(lines)[1] for _ in counts))
    else:
        _atomic_write(args.output, (text for _, text in lines))
    inputs = [args.input] + ([Path(args.annotations)] if args.annotations else [])
    _write_manifest(args.output, "resample", args, inputs, [args.output],
                    started, started_utc)
    return 0


def _emit_report(args: argparse.Namespace, subcommand: str, report: dict,
                 inputs: list[Path], started: float, started_utc: str) -> None:
    text = json.dumps(report, indent=2, ensure_ascii=False)
    if args.out:
        _atomic_write(args.out, [text])
        _write_manifest(args.out, subcommand, args, inputs, [args.out],
                        started, started_utc)
    else:
        print(text)


def cmd_bleu(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    orders = tuple(int(n) for n in args.orders.split(","))
    report = corpus_shuffle_report(
        args.original, args.shuffled, sample_size=args.sample, seed=args.seed,
        orders=orders,
    )
    _emit_report(args, "bleu", report.to_dict(), [args.original, args.shuffled],
                 started, started_utc)
    return 0


def cmd_delta(args: argparse.Namespace) -> int:
    value = relative_difference(
        DeltaInput(a_or=args.a_or, a_d=args.a_d, a_rand=args.a_rand, mode=args.mode)
    )
    print(f"{value:.{args.precision}f}")
    return 0


def _make_scorer(spec: str, alpha: float, timeout: float) -> Scorer:
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"scorer spec needs a prefix, got {spec!r}")
    if kind == "uniform":
        return UniformScorer(int(rest))
    if kind == "unigram":
        # a saved table (.json, as written by AtomTable.to_json) or a corpus
        if rest.endswith(".json"):
            table = AtomTable.from_json(Path(rest).read_text(encoding="utf-8"))
        else:
            table, _ = build_atom_table(rest)
        return UnigramScorer(table, alpha=alpha)
    if kind == "remote":
        return RemoteScorer.from_endpoint(rest, timeout=timeout)
    raise ValueError(f"unknown scorer kind {kind!r}")


def _parse_bootstrap(text: str) -> tuple[int, int]:
    values = dict(part.split("=") for part in text.split(","))
    return int(values["k"]), int(values["m"])


def cmd_pll(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    k, m = _parse_bootstrap(args.bootstrap)
    sentences = [s for s in iter_corpus(args.corpus) if s.tokens]
    with _make_scorer(args.scorer, args.alpha, args.timeout) as scorer:
        result = bpll(sentences, scorer, k=k, m=m, seed=args.seed)
        report = {
            "bpll": result.bpll,
            "bpll_token_weighted": result.bpll_token_weighted,
            "mean_pll": result.mean_pll,
            "k": result.k,
            "m": result.m,
            "seed": result.seed,
        }
        if args.per_sentence:
            report["per_sentence"] = [
                {"id": r.sentence_id, "pll": r.pll, "tokens": r.token_count,
                 "skipped": r.skipped_tokens}
                for r in (pll(s, scorer) for s in sentences)
            ]
    _emit_report(args, "pll", report, [args.corpus], started, started_utc)
    return 0


def cmd_probe(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    stimuli = load_stimuli(args.stimuli)
    with _make_scorer(args.scorer, args.alpha, args.timeout) as scorer:
        report = run_probe(
            stimuli, scorer, balance=args.balance, seed=args.seed,
            strict_next=args.strict_next,
        )
    _emit_report(args, "probe", report.to_dict(), [args.stimuli], started, started_utc)
    return 0


def cmd_stimuli_convert(args: argparse.Namespace) -> int:
    started, started_utc = time.monotonic(), datetime.now(timezone.utc).isoformat()
    convert_tsv(args.input, args.output)
    _write_manifest(args.output, "stimuli-convert", args, [args.input], [args.output],
                    started, started_utc)
    return 0


def _add_seed_args(p: argparse.ArgumentParser, with_mode: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="global seed (64-bit)")
    if with_mode:
        p.add_argument(
            "--seed-mode", choices=["fixed", "per-sentence", "per-shard"],
            default="fixed", help="how per-sentence seeds derive from the global seed",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scramblekit",
        description="Word-order perturbation, shuffle metrics, and masked-LM probing",
    )
    parser.add_argument("--version", action="version", version=f"scramblekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("permute", help="randomize word order per sentence")
    p.add_argument("--n", type=int, default=1, choices=[1, 2, 3, 4],
                   help="n-gram order to preserve")
    _add_seed_args(p)
    p.add_argument("--max-retries", type=int, default=100)
    p.add_argument("--on-infeasible", choices=["passthrough", "drop", "error"],
                   default="passthrough")
    p.add_argument("--jobs", type=int, default=None,
                   help="shard parallelism (default: SCRAMBLEKIT_JOBS or CPU count)")
    p.add_argument("--atom-spans", type=Path, default=None,
                   help="also write a JSON-lines sidecar of conjoined-atom "
                        "output spans (annotation-sidecar schema)")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.set_defaults(func=cmd_permute)

    p = sub.add_parser("window", help="shuffle words inside multi-sentence buffers")
    p.add_argument("--window-tokens", type=int, default=512)
    _add_seed_args(p)
    p.add_argument("--max-retries", type=int, default=100)
    p.add_argument("--on-infeasible", choices=["passthrough", "drop", "error"],
                   default="passthrough")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("resample", help="bootstrap-resample a corpus from its atoms")
    p.add_argument("--mode", choices=["frequency", "uniform"], default="frequency")
    p.add_argument("--annotations", type=Path, default=None,
                   help="JSON-lines entity spans to fuse into multi-word atoms")
    _add_seed_args(p, with_mode=False)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("bleu", help="BLEU of a shuffled corpus against the original")
    p.add_argument("--orders", default="2,3,4")
    p.add_argument("--sample", type=int, required=True)
    _add_seed_args(p, with_mode=False)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("original", type=Path)
    p.add_argument("shuffled", type=Path)
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("delta", help="relative difference between accuracies")
    p.add_argument("--mode", choices=["as-written", "table-consistent"],
                   default="table-consistent")
    p.add_argument("--a-or", type=float, required=True)
    p.add_argument("--a-d", type=float, required=True)
    p.add_argument("--a-rand", type=float, default=0.0)
    p.add_argument("--precision", type=int, default=2)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("pll", help="pseudo-log-likelihood and bootstrap perplexity")
    p.add_argument("--scorer", required=True,
                   help="uniform:N | unigram:CORPUS-or-TABLE.json | remote:CMD or HOST:PORT")
    p.add_argument("--alpha", type=float, default=1.0, help="unigram smoothing")
    p.add_argument("--timeout", type=float, default=30.0, help="remote scorer timeout (s)")
    p.add_argument("--bootstrap", default="k=5,m=100")
    _add_seed_args(p, with_mode=False)
    p.add_argument("--per-sentence", action="store_true",
                   help="include per-sentence PLLs in the report")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("corpus", type=Path)
    p.set_defaults(func=cmd_pll)

    p = sub.add_parser("probe", help="minimal-pair probing through a scorer")
    p.add_argument("--scorer", required=True,
                   help="uniform:N | unigram:CORPUS-or-TABLE.json | remote:CMD or HOST:PORT")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--balance", action="store_true",
                   help="upsample inflection classes to equal counts")
    p.add_argument("--strict-next", action="store_true",
                   help="balancing target strictly above counts already at a multiple of 100")
    _add_seed_args(p, with_mode=False)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("stimuli", type=Path)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("stimuli", help="stimulus file utilities")
    stim_sub = p.add_subparsers(dest="stimuli_command", required=True)
    pc = stim_sub.add_parser("convert", help="convert TSV stimuli to JSON-lines")
    pc.add_argument("input", type=Path)
    pc.add_argument("output", type=Path)
    pc.set_defaults(func=cmd_stimuli_convert)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScramblekitError, OSError, ValueError) as exc:
        print(f"scramblekit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
