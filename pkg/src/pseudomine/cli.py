"""Command-line entry point: ``pseudomine <command> [--config PATH] ...``.

Exit status is 0 on success, 1 when some papers failed (see ``errors.json`` in
the output directory), 2 for usage or configuration errors. Failures are also
summarised as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import pipeline
from .config import ConfigError, env_overrides, load_config
from .extractor import atomic_write_text

COMMANDS = list(pipeline.STAGES) + ["all"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pseudomine", description="Mine pseudocode from LaTeX source bundles.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="YAML config file (env PSEUDOMINE_CONFIG)")
    ap.add_argument("--root", help="corpus root, overrides corpus.root (env PSEUDOMINE_ROOT)")
    ap.add_argument("--output", help="output directory, overrides corpus.output (env PSEUDOMINE_OUTPUT)")
    ap.add_argument("--seed", type=int, help="seed for LDA and sampling (env PSEUDOMINE_SEED)")
    ap.add_argument("--jobs", type=int, help="worker processes (env PSEUDOMINE_JOBS)")
    ap.add_argument("--labels", help="validation labels CSV (env PSEUDOMINE_LABELS)")
    ap.add_argument("--predictions", help="predictions CSV for validate (env PSEUDOMINE_PREDICTIONS)")
    ap.add_argument("-q", "--quiet", action="store_true", help="suppress per-paper progress lines")
    return ap


def _fail(code: int, stage: str, message: str, errors: dict | None = None) -> int:
    summary = {"status": "error", "stage": stage, "message": message}
    if errors:
        summary["errors"] = errors
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    env = env_overrides()
    flags = {k: getattr(args, k) for k in ("root", "output", "seed", "jobs", "labels", "predictions")}
    overrides = {k: flags[k] if flags[k] is not None else env.get(k) for k in flags}
    try:
        cfg = load_config(args.config or env.get("config"), overrides)
    except ConfigError as exc:
        return _fail(2, args.command, str(exc))

    stages = list(pipeline.STAGES) if args.command == "all" else [args.command]
    errors: dict[str, dict[str, str]] = {}
    for name in stages:
        if name == "validate" and args.command == "all" and cfg.labels is None:
            logging.getLogger(__name__).info("no labels configured; validate skipped")
            continue
        t0 = time.perf_counter()
        try:
            result = pipeline.STAGES[name](cfg)
        except ConfigError as exc:
            return _fail(2, name, str(exc))
        except (pipeline.StageError, OSError, ValueError, KeyError) as exc:
            return _fail(1, name, f"{type(exc).__name__}: {exc}")
        logging.getLogger(__name__).info("stage=%s done in %.2fs", name, time.perf_counter() - t0)
        if result.errors:
            errors[name] = result.errors

    if errors:
        atomic_write_text(cfg.output_dir / "errors.json", json.dumps(errors, indent=2, sort_keys=True) + "\n")
        return _fail(1, args.command, "some papers failed", errors)
    return 0


if __name__ == "__main__":
    sys.exit(main())
