"""Command-line front door.

Subcommands: ``weat``, ``ceat``, ``ibd``, ``eibd``, ``bank-info``.
Every run emits a manifest (command line, seed, content digests of the
inputs, tool version, timestamp) inside its JSON output, enough to
reproduce the run byte-for-byte except for the timestamp.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error.  Errors go to stderr with the machine-parsable prefix
``E:<category>:``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .ceat import run_ceat
from .detect import ALL_CONSTITUENTS, ANY_CONSTITUENT, DetectionConfig, GroupGrid
from .detect import detect_emergent, detect_intersectional
from .embed_store import load_bank, load_swe
from .errors import BiaslensError, ParameterError
from .report import format_pvalue, histogram, render_report
from .stimuli import (
    BUILTIN_TEST_IDS,
    builtin_grid,
    builtin_test,
    load_spec,
    resolve_cell,
    validation_group_label,
    validation_set,
)
from .weat import PValueMode, run_weat

DEFAULT_SEED = 10622

_USAGE_CATEGORIES = {"parameter"}


def _digest_path(path: Path) -> str:
    h = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.rglob("*") if p.is_file()):
            h.update(child.name.encode("utf-8"))
            h.update(child.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


def _run_manifest(args: argparse.Namespace, inputs: dict[str, Path]) -> dict:
    return {
        "command_line": sys.argv[1:],
        "seed": getattr(args, "seed", None),
        "samples": getattr(args, "samples", None),
        "input_digests": {name: _digest_path(p) for name, p in inputs.items()},
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _pvalue_mode(args: argparse.Namespace) -> PValueMode:
    if getattr(args, "exact", False):
        return PValueMode.exact()
    count = getattr(args, "mc", None)
    if count is None:
        count = 10_000
    return PValueMode.monte_carlo(count, seed=args.seed)


def _resolve_spec(args: argparse.Namespace):
    if args.spec in BUILTIN_TEST_IDS:
        return builtin_test(args.spec), None
    spec_path = Path(args.spec)
    return load_spec(spec_path), spec_path


def _cmd_weat(args: argparse.Namespace) -> int:
    spec, spec_path = _resolve_spec(args)
    swe_path = Path(args.swe)
    emb = load_swe(swe_path, vocab_filter=set(spec.stimuli))
    outcome = run_weat(spec, emb, _pvalue_mode(args))
    inputs = {"swe": swe_path}
    if spec_path:
        inputs["spec"] = spec_path
    doc = {
        "label": spec.label,
        "effect_size": outcome.effect_size,
        "p_value": outcome.p_value,
        "test_statistic": outcome.test_statistic,
        "p_mode": outcome.p_mode,
        "run_manifest": _run_manifest(args, inputs),
    }
    _emit(doc, args.out)
    if not args.out:
        print(
            f"# {spec.label}: ES {outcome.effect_size:.6g} "
            f"p {format_pvalue(outcome.p_value)}",
            file=sys.stderr,
        )
    return 0


def _cmd_ceat(args: argparse.Namespace) -> int:
    spec, spec_path = _resolve_spec(args)
    bank_path = Path(args.bank)
    bank = load_bank(bank_path)
    mc_count = args.mc if args.mc is not None else 1_000
    p_mode = None if args.no_sample_p else PValueMode.monte_carlo(mc_count, seed=args.seed)
    result = run_ceat(
        bank,
        spec,
        n_samples=args.samples,
        seed=args.seed,
        p_mode=p_mode,
        workers=args.workers,
    )
    if args.format != "json":
        payload = render_report(result, args.format)
        if args.out:
            Path(args.out).write_bytes(payload)
        else:
            sys.stdout.buffer.write(payload)
        return 0
    inputs = {"bank": bank_path}
    if spec_path:
        inputs["spec"] = spec_path
    doc = result.to_dict(compact=args.compact)
    doc["run_manifest"] = _run_manifest(args, inputs)
    if args.hist:
        doc["histogram"] = histogram(result.samples, args.hist, label=spec.label).to_dict()
    _emit(doc, args.out)
    m = result.meta
    print(
        f"# {spec.label}: CES {m.ces:.6g} p {format_pvalue(m.p_combined)} "
        f"(N={result.sample_count})",
        file=sys.stderr,
    )
    return 0


def _detection_setup(args: argparse.Namespace):
    swe_path = Path(args.swe)
    inputs = {"swe": swe_path}
    if args.grid:
        grid_path = Path(args.grid)
        grid = GroupGrid.from_dict(json.loads(grid_path.read_text(encoding="utf-8")))
        inputs["grid"] = grid_path
    else:
        grid = builtin_grid()
    if args.pool:
        pool_path = Path(args.pool)
        pool_doc = json.loads(pool_path.read_text(encoding="utf-8"))
        pool = tuple(pool_doc["pool"]) if isinstance(pool_doc, dict) else tuple(pool_doc)
        truth = None
        if isinstance(pool_doc, dict) and "labels" in pool_doc:
            truth = {str(w): bool(v) for w, v in pool_doc["labels"].items()}
        inputs["pool"] = pool_path
    else:
        pool = validation_set().pool()
        truth = None
    return grid, pool, truth, inputs, swe_path


def _cmd_detect(args: argparse.Namespace, emergent: bool) -> int:
    grid, pool, truth, inputs, swe_path = _detection_setup(args)
    target = resolve_cell(args.target)
    if args.threshold is None and not args.auto_roc:
        raise ParameterError("supply --threshold T or --auto-roc")
    if args.auto_roc and truth is None:
        dataset = validation_set()
        truth_group = validation_group_label(target, emergent=emergent)
        truth = dataset.labels_for(truth_group)
        inter_truth = dataset.labels_for(validation_group_label(target, emergent=False))
    else:
        inter_truth = truth

    words = set(pool)
    cfg = DetectionConfig(
        target_cell=target,
        candidate_pool=tuple(pool),
        threshold=args.threshold,
        eibd_removal=ALL_CONSTITUENTS if getattr(args, "removal", "any") == "all" else ANY_CONSTITUENT,
    )
    emb = load_swe(
        swe_path,
        vocab_filter=words | {n for cell in grid.cells() for n in grid.names(cell)},
    )
    if emergent:
        result = detect_emergent(
            grid, cfg, emb, truth=truth, intersectional_truth=inter_truth
        )
    else:
        result = detect_intersectional(grid, cfg, emb, truth=truth)
    if args.format != "json":
        payload = render_report(result, args.format)
        if args.out:
            Path(args.out).write_bytes(payload)
        else:
            sys.stdout.buffer.write(payload)
        return 0
    doc = result.to_dict()
    doc["target_cell"] = target
    doc["run_manifest"] = _run_manifest(args, inputs)
    _emit(doc, args.out)
    if result.confusion is not None:
        print(f"# accuracy {result.confusion.accuracy:.3f}", file=sys.stderr)
    return 0


def _cmd_bank_info(args: argparse.Namespace) -> int:
    bank_path = Path(args.bank)
    bank = load_bank(bank_path)
    doc = {
        "model_id": bank.model_id,
        "dimension": bank.dimension,
        "stimuli": {w: int(v.shape[0]) for w, v in sorted(bank.stimuli.items())},
        "run_manifest": _run_manifest(args, {"bank": bank_path}),
    }
    _emit(doc, args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        print(f"E:usage: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biaslens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="write JSON/CSV/SVG output to this path")
        p.add_argument("--format", choices=("json", "csv", "svg"), default="json")

    p_weat = sub.add_parser("weat", help="static association test")
    p_weat.add_argument("--swe", required=True)
    p_weat.add_argument("--spec", required=True, help="spec JSON path or builtin id (I1-I4)")
    mode = p_weat.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--mc", type=int, metavar="COUNT")
    common(p_weat)
    p_weat.set_defaults(func=_cmd_weat)

    p_ceat = sub.add_parser("ceat", help="sampled contextualized association test")
    p_ceat.add_argument("--bank", required=True)
    p_ceat.add_argument("--spec", required=True)
    p_ceat.add_argument("--samples", type=int, default=10_000)
    p_ceat.add_argument("--mc", type=int, metavar="COUNT", help="per-sample permutation count")
    p_ceat.add_argument("--no-sample-p", action="store_true")
    p_ceat.add_argument("--hist", type=int, metavar="BINS")
    p_ceat.add_argument("--compact", action="store_true", help="omit draw records")
    p_ceat.add_argument("--workers", type=int, default=1)
    common(p_ceat)
    p_ceat.set_defaults(func=_cmd_ceat)

    for name, emergent in (("ibd", False), ("eibd", True)):
        p = sub.add_parser(name, help=f"{'emergent ' if emergent else ''}intersectional bias detection")
        p.add_argument("--swe", required=True)
        p.add_argument("--grid", help="group grid JSON (default: bundled race x gender grid)")
        p.add_argument("--target", required=True, help="cell id, e.g. AF or african|female")
        p.add_argument("--pool", help="candidate pool JSON (default: bundled validation pool)")
        thr = p.add_mutually_exclusive_group()
        thr.add_argument("--threshold", type=float)
        thr.add_argument("--auto-roc", action="store_true")
        if emergent:
            p.add_argument("--removal", choices=("any", "all"), default="any")
        common(p)
        p.set_defaults(func=lambda a, e=emergent: _cmd_detect(a, e))

    p_info = sub.add_parser("bank-info", help="inspect a bank directory")
    p_info.add_argument("bank")
    common(p_info)
    p_info.set_defaults(func=_cmd_bank_info)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except BiaslensError as exc:
        print(f"E:{exc.category}: {exc}", file=sys.stderr)
        return 1 if exc.category in _USAGE_CATEGORIES else 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"E:internal: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
