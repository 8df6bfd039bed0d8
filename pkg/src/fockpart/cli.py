"""Command-line front end.

    fockpart run PROGRAM.fp [options]
    fockpart --gallery NAME|all [--param k=v ...] [options]

Exit codes: 0 success, 1 an Indeterminate verdict under ``--strict``,
2 any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .classify import ClassifyConfig, classify
from .core import Statistics
from .errors import FockError, InvalidParameter
from .gallery import ALL_PRESETS, CATALOG, gallery_state
from .lang import parse, run_program
from .report import dumps, render_table, report_document


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fockpart",
        description="Classify Fock-space states by field and particle factorizability.")
    p.add_argument("command", nargs="?", choices=["run"], help="run a program file")
    p.add_argument("file", nargs="?", help="program file (.fp)")
    p.add_argument("--gallery", metavar="NAME", help="gallery state name, or 'all'")
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="gallery parameter (repeatable)")
    p.add_argument("--nmax", type=int, default=None,
                   help="truncation for gallery series (default: per state, tmsv 8)")
    p.add_argument("--tol", type=float, default=1e-8, help="relative rank cutoff")
    p.add_argument("--seed", type=int, default=42, help="seed for rank-one fits")
    p.add_argument("--stats", default=None,
                   help="default statistics for program directives without stats=")
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 when any verdict is indeterminate")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _params(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InvalidParameter(f"--param expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _gallery_runs(name: str, params: dict, cfg: ClassifyConfig) -> list:
    if name == "all":
        if params:
            raise InvalidParameter("--param cannot be combined with --gallery all")
        todo = [(n, dict(p)) for n, p in ALL_PRESETS]
    else:
        todo = [(name, params)]
    runs = []
    for entry, p in todo:
        if cfg.nmax is not None and entry in CATALOG and "nmax" in CATALOG[entry].defaults:
            p.setdefault("nmax", cfg.nmax)
        state, spec = gallery_state(entry, p)
        runs.append((entry, classify(state, cfg), spec))
    return runs


def _render(runs, fmt: str, single: bool) -> str:
    if fmt == "json":
        docs = [report_document(n, r, g) for n, r, g in runs]
        return dumps(docs[0] if single else docs)
    return "\n".join(render_table(n, r, g) for n, r, g in runs)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if (args.command is None) == (args.gallery is None):
            raise InvalidParameter("give either 'run FILE' or '--gallery NAME'")
        if args.command == "run" and not args.file:
            raise InvalidParameter("'run' needs a program file")
        cfg = ClassifyConfig(tol_rel=args.tol, seed=args.seed, nmax=args.nmax)
        if args.gallery is not None:
            runs = _gallery_runs(args.gallery, _params(args.param), cfg)
            single = args.gallery != "all"
        else:
            if args.param:
                raise InvalidParameter("--param applies to --gallery only")
            text = Path(args.file).read_text(encoding="utf-8")
            stats = Statistics.parse(args.stats) if args.stats else None
            outcomes = run_program(parse(text), cfg, stats)
            runs = [(o.name, o.report, o.gallery) for o in outcomes]
            single = False
        text = _render(runs, args.format, single)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (FockError, ValueError, KeyError, TypeError, NameError, OSError) as exc:
        print(f"fockpart: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.strict and any(r.indeterminate for _, r, _ in runs):
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
