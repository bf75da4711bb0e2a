"""Command line: build, theta, sweep, waldcheck, epscheck, ave1check.

Exit codes: 0 all assertions passed, 2 an assertion failed (the report path
is printed), 3 a budget was exhausted.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .cache import Cache, canonical_json
from .config import Config, default_config, load_config
from .lfun import ErrorBudgetExceeded
from .report import format_table
from .theta import (
    BudgetExhausted,
    Lab,
    eps_sweep,
    valuation_sweep,
    waldspurger_constancy,
    waldspurger_report,
)

EXIT_OK = 0
EXIT_ASSERT = 2
EXIT_BUDGET = 3

log = logging.getLogger("cmtheta")


def _config(args) -> Config:
    return load_config(args.config) if args.config else default_config()


def _instances(cfg: Config, names):
    if not names:
        return list(cfg.instances)
    by = {i.name: i for i in cfg.instances}
    missing = [n for n in names if n not in by]
    if missing:
        raise SystemExit(f"unknown instance(s): {', '.join(missing)}")
    return [by[n] for n in names]


def _write(out: Path | None, name: str, text: str) -> Path | None:
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _finish(ok: bool, paths: list) -> int:
    if not ok:
        shown = ", ".join(str(p) for p in paths if p is not None) or "(no report file written)"
        print(f"ASSERTION FAILED; see {shown}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def cmd_build(args, cfg: Config, cache: Cache) -> int:
    ok = True
    for inst in _instances(cfg, args.instance):
        lab = Lab(inst, cache)
        ef = lab.eigenform()
        signs = ef["signs"]
        print(f"{inst.name}: D={inst.D} classes={len(signs)} mass={ef['mass']} f={ef['coords']}")
    return _finish(ok, [])


def cmd_theta(args, cfg: Config, cache: Cache) -> int:
    inst = _instances(cfg, [args.instance])[0]
    lab = Lab(inst, cache)
    th = lab.theta(args.n)
    rec = {"instance": inst.name, "m": th.m, "order": th.group.order, "weights": list(th.weights),
           "chi0": list(inst.chi0) if inst.chi0 else None}
    print(canonical_json(rec))
    return EXIT_OK


def cmd_sweep(args, cfg: Config, cache: Cache) -> int:
    ok = True
    paths = []
    for inst in _instances(cfg, args.instance):
        lab = Lab(inst, cache)
        n_range = range(1, (args.n_max or inst.n_max) + 1)
        rep = valuation_sweep(lab, n_range)
        text = rep.to_text()
        paths.append(_write(args.out, f"sweep-{inst.name}.jsonl", text))
        print(format_table(rep) if args.table else text, end="")
        s = rep.summary
        ok = ok and s["parity_consistent"] and not s["wrong_parity_nonzero"] and s["top_level_has_unit"]
    return _finish(ok, paths)


def cmd_epscheck(args, cfg: Config, cache: Cache) -> int:
    ok = True
    paths = []
    for inst in _instances(cfg, args.instance):
        lab = Lab(inst, cache)
        rep = eps_sweep(lab, range(1, args.n_max + 1))
        paths.append(_write(args.out, f"eps-{inst.name}.jsonl", rep.to_text()))
        print(format_table(rep) if args.table else rep.to_text(), end="")
        s = rep.summary
        ok = ok and s["alternates"] and s["parity_consistent"] and not s["wrong_parity_nonzero"]
    return _finish(ok, paths)


def cmd_waldcheck(args, cfg: Config, cache: Cache) -> int:
    name = args.instance or cfg.waldspurger.get("instance")
    n = args.n or cfg.waldspurger.get("n")
    n_other = args.n_other if args.n_other is not None else cfg.waldspurger.get("n_other")
    inst = _instances(cfg, [name])[0]
    lab = Lab(inst, cache)
    tol = cfg.tolerances
    res = waldspurger_constancy(lab, n, n_other=n_other, abs_err=tol.l_abs_err)
    rep = waldspurger_report(lab, res)
    path = _write(args.out, f"wald-{inst.name}.jsonl", rep.to_text())
    print(format_table(rep) if args.table else rep.to_text(), end="")
    ok = res.max_deviation <= tol.waldspurger_rel and res.vanishing_ok
    if res.cross is not None:
        ok = ok and res.cross["cross_deviation"] <= tol.waldspurger_rel
    return _finish(ok, [path])


def cmd_ave1check(args, cfg: Config, cache: Cache) -> int:
    from .family import ave1_identity_check, surjective_characters
    rng = np.random.default_rng(args.seed)
    ok = True
    for p in args.p:
        for a in range(1, args.a_max + 1):
            for d in range(1, args.d_max + 1):
                fam = surjective_characters(p, a, d)
                worst = 0
                for _ in range(args.trials):
                    h = rng.integers(-100, 101, size=p ** (a * d))
                    worst = max(worst, ave1_identity_check(p, a, d, h).residual)
                good = worst == 0 and len(fam) == fam.expected_count
                ok = ok and good
                print(f"p={p} a={a} d={d} characters={len(fam)} expected={fam.expected_count} max_residual={worst}")
    return _finish(ok, [])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmtheta", description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, help="INI config (default: built-in instances)")
    ap.add_argument("--cache", type=Path, default=None, help="cache directory (default: none)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="class sets and CM eigenforms")
    p.add_argument("instance", nargs="*")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("theta", help="theta weights at one level")
    p.add_argument("instance")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_theta)

    for name, func, help_ in (("sweep", cmd_sweep, "valuation sweep"), ("epscheck", cmd_epscheck, "root-number parity sweep")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("instance", nargs="*")
        p.add_argument("--n-max", type=int, default=None if name == "sweep" else 5)
        p.add_argument("--out", type=Path)
        p.add_argument("--table", action="store_true", help="print the human summary instead of JSON lines")
        p.set_defaults(func=func)

    p = sub.add_parser("waldcheck", help="Waldspurger constancy")
    p.add_argument("instance", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--n-other", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_waldcheck)

    p = sub.add_parser("ave1check", help="averaging identity over surjective characters")
    p.add_argument("--p", type=int, nargs="+", default=[3, 5])
    p.add_argument("--a-max", type=int, default=2)
    p.add_argument("--d-max", type=int, default=3)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ave1check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    cfg = _config(args)
    cache = Cache(args.cache)
    try:
        return args.func(args, cfg, cache)
    except (ErrorBudgetExceeded, BudgetExhausted) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
