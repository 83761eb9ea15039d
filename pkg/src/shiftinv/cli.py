"""Command line front end.

    shiftinv verify      [--filter NAME ...] [--trials N] [--seed S] [--out DIR]
    shiftinv shift-exact --config FILE [--out DIR]
    shiftinv shift-mc    --config FILE [--replicas R] [--seed S] [--level A] [--force] [--out DIR]
    shiftinv sample      --config FILE [--replicas R] [--seed S] [--out DIR]

Exit codes: 0 everything held, 1 an identity or test failed, 2 bad usage or
configuration. Configs are JSON; exact parameters are "p/q" strings and
seeds are decimal strings.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

from . import __version__
from .exactnum import as_rational
from .latticepf import (DomainError, DownRightDomain, PreconditionError, ShiftInstance,
                        quadrant_joint_distribution, shifted_queries, two_row_domain,
                        verify_quadrant_shift, verify_shift_theorem, z_shaped_domain)
from .polysim import ParameterError, SamplerConfig, oy_richardson, run_shift_experiment, sample
from .stattest import DEFAULT_LEVEL, max_moment_z, two_sample_joint_test
from .suites import SUITES, run_suite
from .vertexcore import PoleError

SCHEMA = "v1"
MOMENT_LIMIT = 4.0


class UsageError(Exception):
    pass


def build_id() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _seed(text) -> int:
    try:
        s = int(str(text), 10)
    except ValueError:
        raise UsageError(f"seed must be a decimal integer, got {text!r}")
    if not 0 <= s < 2 ** 64:
        raise UsageError("seed must fit in 64 unsigned bits")
    return s


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"config is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


class OutputDir:
    """Write into a scratch directory and move it into place at the end."""

    def __init__(self, target):
        self.target = Path(target) if target else None
        self.tmp = None

    def __enter__(self):
        if self.target is None:
            return None
        if self.target.exists() and (not self.target.is_dir() or any(self.target.iterdir())):
            raise UsageError(f"output directory {self.target} exists and is not empty")
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".partial-", dir=self.target.parent))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if self.tmp is None:
            return False
        if exc_type is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)
            return False
        if self.target.exists():
            self.target.rmdir()
        os.replace(self.tmp, self.target)
        return False


def _report(subcommand: str, args, body: dict) -> dict:
    manifest = {"subcommand": subcommand, "config": getattr(args, "config", None),
                "seed": str(args.seed) if getattr(args, "seed", None) is not None else None,
                "out": args.out, "filter": getattr(args, "filter", None)}
    return {"schema": SCHEMA, "build": build_id(), "manifest": manifest, **body}


def _emit(report: dict, out: Path | None) -> None:
    text = json.dumps(report, indent=2, default=str)
    if out is not None:
        (out / "report.json").write_text(text + "\n")
    print(text)


# verify

def cmd_verify(args) -> int:
    names = args.filter or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    seed = _seed(args.seed if args.seed is not None else 0)
    results = [run_suite(n, seed, args.trials) for n in names]
    ok = all(r.passed for r in results)
    with OutputDir(args.out) as out:
        _emit(_report("verify", args, {"passed": ok, "suites": [r.to_dict() for r in results]}), out)
    return 0 if ok else 1


# shift-exact

def _fr(v):
    return as_rational(v)


def _domain_from(cfg: dict):
    kind = cfg.get("kind")
    q = _fr(cfg["q"])
    x = tuple(_fr(v) for v in cfg["x"])
    y = tuple(_fr(v) for v in cfg["y"])
    if kind == "two-row":
        return two_row_domain(cfg["a"], cfg["b"], cfg["c"], x, y, q)
    if kind == "z-shaped":
        return z_shaped_domain(cfg["a"], cfg["r"], cfg["b"], cfg["c"], x, y, q)
    if kind == "domain":
        return DownRightDomain(cfg["P"], cfg["Q"], x, y, q)
    raise UsageError(f"unknown domain kind {kind!r}")


def _exact_domain(cfg: dict) -> dict:
    dom = _domain_from(cfg)
    fixed = tuple(sorted((int(p), int(c)) for p, c in cfg.get("fixed", [])))
    inst = ShiftInstance(dom, frozenset(cfg.get("A", [])), frozenset(cfg.get("B", [])), fixed,
                         tuple(cfg["incoming"]), cfg["m"], cfg["h"], cfg["k"], cfg["l"], cfg["N"],
                         cfg.get("step", "D"))
    ok, phi, psi = verify_shift_theorem(inst)
    return {"identity": "Phi = Psi with the two rapidities exchanged", "passed": ok,
            "phi": str(phi), "psi": str(psi)}


def _exact_quadrant(cfg: dict) -> dict:
    X, Y = cfg["extent"]
    q = _fr(cfg["q"])
    x = [_fr(v) for v in cfg.get("x", ["1"] * Y)]
    y = [_fr(v) for v in cfg["y"]]
    qs = [(k, tuple(u)) for k, u in cfg["queries"]]
    iota, delta = cfg.get("iota", 1), cfg.get("delta", 1)
    if delta == 0:
        d = quadrant_joint_distribution(X, Y, x, y, q, qs)
        return {"identity": "zero shift: the law is compared with itself", "passed": True,
                "law": {str(k): str(v) for k, v in d.items()}}
    if delta != 1:
        raise UsageError("the quadrant shift moves one row at a time; use delta 0 or 1")
    ok, d1, d2 = verify_quadrant_shift(X, Y, x, y, q, qs, iota)
    return {"identity": "joint law unchanged by the shift with rows exchanged", "passed": ok,
            "shifted_queries": [[k, list(u)] for k, u in shifted_queries(qs, iota)],
            "law_before": {str(k): str(v) for k, v in d1.items()},
            "law_after": {str(k): str(v) for k, v in d2.items()}}


def cmd_shift_exact(args) -> int:
    cfg = load_config(args.config)
    try:
        body = _exact_quadrant(cfg) if cfg.get("kind") == "quadrant" else _exact_domain(cfg)
    except (KeyError, TypeError) as e:
        raise UsageError(f"incomplete or malformed config: {e!r}")
    with OutputDir(args.out) as out:
        _emit(_report("shift-exact", args, {"parameters": cfg, **body}), out)
    return 0 if body["passed"] else 1


# Monte Carlo

def _sampler_config(cfg: dict, args) -> SamplerConfig:
    try:
        sc = SamplerConfig.from_dict(cfg)
    except (KeyError, TypeError) as e:
        raise UsageError(f"incomplete or malformed config: {e!r}")
    if args.replicas is not None:
        sc.replicas = args.replicas
    sc.seed = _seed(args.seed if args.seed is not None else cfg.get("seed", "0"))
    args.seed = sc.seed
    return sc


def cmd_shift_mc(args) -> int:
    cfg = load_config(args.config)
    sc = _sampler_config(cfg, args)
    iota, delta = cfg.get("iota", 1), cfg.get("delta", 1)
    if isinstance(delta, str):
        delta = as_rational(delta)
    force = args.force or bool(cfg.get("force", False))
    swap = bool(cfg.get("swap", True))
    a, b, info = run_shift_experiment(sc, iota, delta, force=force, workers=args.workers, swap=swap)
    level = args.level if args.level is not None else float(cfg.get("level", DEFAULT_LEVEL))
    rep = two_sample_joint_test(a.observables, b.observables, level=level, seed=sc.seed,
                                labels=a.labels)
    worst = max_moment_z(rep.moments)
    accepted = rep.passed and worst < MOMENT_LIMIT
    body = {"parameters": sc.to_dict(), "experiment": info, "test": rep.to_dict(),
            "max_moment_z": worst, "moment_limit": MOMENT_LIMIT, "accepted": accepted,
            "labels_A": a.labels, "labels_B": b.labels,
            "seeds": {"A": str(a.seed), "B": str(b.seed)}}
    if sc.model == "oy":
        body["richardson"] = oy_richardson(sc)
    for batch in (a, b):
        if "warning" in batch.meta:
            body["warning"] = batch.meta["warning"]
    with OutputDir(args.out) as out:
        if out is not None:
            a.to_csv(out / "samples_A.csv")
            b.to_csv(out / "samples_B.csv")
        _emit(_report("shift-mc", args, body), out)
    if info["exploratory"]:
        return 0
    return 0 if accepted else 1


def cmd_sample(args) -> int:
    cfg = load_config(args.config)
    sc = _sampler_config(cfg, args)
    batch = sample(sc, workers=args.workers)
    with OutputDir(args.out) as out:
        if out is None:
            sys.stdout.write(batch.to_csv())
        else:
            batch.to_csv(out / "samples.csv")
            batch.to_json(out / "samples.json")
            (out / "report.json").write_text(json.dumps(
                _report("sample", args, {"parameters": sc.to_dict(), **batch.sidecar()}), indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftinv", description="Exact and Monte Carlo checks of shift invariance.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required):
        sp.add_argument("--config", required=config_required, help="JSON config file")
        sp.add_argument("--seed", help="64-bit unsigned decimal seed")
        sp.add_argument("--out", help="output directory, created atomically")
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    v = sub.add_parser("verify", help="run exact identity suites")
    common(v, False)
    v.add_argument("--filter", action="append", help=f"suite name, repeatable: {', '.join(SUITES)}")
    v.add_argument("--trials", type=int, help="random draws per suite (suite default if omitted)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("shift-exact", help="exact comparison for one configured instance")
    common(e, True)
    e.set_defaults(func=cmd_shift_exact)

    m = sub.add_parser("shift-mc", help="Monte Carlo shift experiment with a two-sample test")
    common(m, True)
    m.add_argument("--replicas", type=int)
    m.add_argument("--level", type=float, help=f"significance level (default {DEFAULT_LEVEL})")
    m.add_argument("--force", action="store_true", help="run despite violated hypotheses; result is exploratory")
    m.set_defaults(func=cmd_shift_mc)

    s = sub.add_parser("sample", help="raw samples as CSV")
    common(s, True)
    s.add_argument("--replicas", type=int)
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "replicas", None) is not None and args.replicas < 1:
        parser.error("--replicas must be positive")
    if args.workers < 1:
        parser.error("--workers must be positive")
    try:
        return args.func(args)
    except (UsageError, ParameterError, PreconditionError, DomainError, PoleError,
            ValueError, TypeError, KeyError) as e:
        print(f"shiftinv: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
