"""Command-line front end.

::

    opmod run --suite <name> [--config <path>] [--seed <n>] [--out <dir>]
    opmod replay <bundle>

``run`` writes ``report.json``, ``witnesses.json`` and one CSV per table into
the output directory; the exit status is 0 iff every assertion passed.
``replay`` recomputes a witness bundle and exits 0 iff every stored value is
reproduced.  ``OPMOD_THREADS`` caps the number of worker threads.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

from . import __version__
from .bundle import make_bundle, load_bundle
from .errors import ConfigError, OpmodError, SchemaError
from .suites import SUITES, SuiteResult, load_config, parse_config, replay_bundle, run_suite

EXIT_FAIL = 1
EXIT_USAGE = 2


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "%.17g" % v
    if hasattr(v, "dtype"):
        return _fmt(v.item())
    return str(v)


def table_to_csv(columns, rows) -> str:
    """CSV text with ``\\n`` line endings and 17-significant-digit floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(res: SuiteResult, out: str) -> None:
    rep = res.report
    bundle_path = os.path.join(out, "witnesses.json")
    write_atomic(bundle_path, json.dumps(make_bundle(rep.suite, rep.seed, res.entries), indent=1) + "\n")
    rep.bundles.append(bundle_path)
    for name, (cols, rows) in sorted(res.tables.items()):
        path = os.path.join(out, f"{rep.suite}-{name}.csv")
        write_atomic(path, table_to_csv(cols, rows))
        rep.outputs.append(path)
    write_atomic(os.path.join(out, "report.json"), json.dumps(rep.to_dict(), indent=1, default=float) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opmod", description="Operator-difference verification suites.")
    p.add_argument("--version", action="version", version=f"opmod {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a verification suite")
    r.add_argument("--suite", choices=SUITES, help="suite name (overrides the config)")
    r.add_argument("--config", help="JSON suite configuration")
    r.add_argument("--seed", type=int, help="random seed (overrides the config)")
    r.add_argument("--out", help="output directory (overrides the config)")
    r.add_argument("-q", "--quiet", action="store_true", help="only print the summary line")
    rp = sub.add_parser("replay", help="recompute a witness bundle")
    rp.add_argument("bundle", help="path to witnesses.json")
    return p


def _cmd_run(args) -> int:
    overrides = {"suite": args.suite, "seed": args.seed, "out": args.out}
    try:
        if args.config:
            cfg = load_config(args.config, overrides)
        else:
            cfg = parse_config("{}", overrides)
    except ConfigError as exc:
        print(f"opmod: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"opmod: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = run_suite(cfg)
    except ConfigError as exc:
        print(f"opmod: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpmodError as exc:
        print(f"opmod: {cfg.suite} (seed {cfg.seed}): {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if cfg.out:
        write_outputs(res, cfg.out)
    lines = res.report.summary_lines()
    print("\n".join(lines[-1:] if args.quiet else lines))
    return 0 if res.report.passed else EXIT_FAIL


def _cmd_replay(args) -> int:
    try:
        doc = load_bundle(args.bundle)
    except SchemaError as exc:
        print(f"opmod: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"opmod: cannot read bundle: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = replay_bundle(doc)
    print("\n".join(rep.summary_lines()))
    return 0 if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
