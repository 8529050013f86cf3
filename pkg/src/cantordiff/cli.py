"""Command-line entry point: ``cantordiff <subcommand> ...``.

Exit codes: 0 for a definitive verdict or a completed run, 2 for an
inconclusive verdict, 1 for errors (including usage errors).

Budget defaults can be overridden by ``CANTORDIFF_MAX_ORDER``,
``CANTORDIFF_MAX_WORD_LEN``, ``CANTORDIFF_TRIALS`` and
``CANTORDIFF_LEVELS``; a ``--config`` JSON file overrides those, and
explicit flags override everything.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .decision import (
    DEFAULT_MAX_WORD_LEN,
    CertificationError,
    Verdict,
    analyze,
    critical_bracket,
    decide_order1,
    parse_family,
)
from .determ import (
    cross_validate,
    decide_deterministic,
    empty_column_depth,
    scan_all_periods,
)
from .pairing import check_coloring, three_color_pairing
from .simulate import run_experiment
from .spectrum import CantorSpec, correlations, dimension, parse_csv

SUBCOMMANDS = ("analyze", "bracket", "deterministic", "simulate", "pair", "selfcheck")

ENV_DEFAULTS = {
    "max_order": "CANTORDIFF_MAX_ORDER",
    "max_word_len": "CANTORDIFF_MAX_WORD_LEN",
    "trials": "CANTORDIFF_TRIALS",
    "levels": "CANTORDIFF_LEVELS",
}

BUILTIN_DEFAULTS = {
    "max_order": None,  # resolved per M by decision.default_max_order
    "max_word_len": DEFAULT_MAX_WORD_LEN,
    "trials": 10000,
    "levels": 8,
    "seed": 0,
    "tol": 1e-4,
    "cap": 6,
    "max_m": 8,
    "threads": os.cpu_count() or 1,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    output: str = "text"  # text | json
    csv_path: Optional[str] = None

    def get(self, key, default=None):
        v = self.options.get(key)
        return default if v is None else v


@dataclass
class ResultEnvelope:
    subcommand: str
    inputs: dict
    payload: dict
    timings: dict
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "tool": "cantordiff",
            "version": self.version,
            "subcommand": self.subcommand,
            "input": self.inputs,
            "timings": self.timings,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        # json uses repr for floats, which round-trips exactly
        return json.dumps(self.to_dict(), indent=2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cantordiff", description="Interval certificates for differences of random Cantor sets.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def common(p, threads=False):
        p.add_argument("--json", action="store_true", help="emit a JSON result envelope")
        p.add_argument("--config", help="JSON file with default option values")
        if threads:
            p.add_argument("--threads", type=int, help="worker processes (default: CPU count)")

    p = sub.add_parser("analyze", help="decide interval / no interval with a certificate")
    p.add_argument("--p", required=True, help="comma separated probabilities for F1")
    p.add_argument("--q", help="probabilities for F2 (default: same as --p)")
    p.add_argument("--max-order", type=int)
    p.add_argument("--max-word-len", type=int)
    common(p)

    p = sub.add_parser("bracket", help="bracket the critical parameter of a family")
    p.add_argument("--family", required=True, help="template such as 1,0,1,rho")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-order", type=int)
    p.add_argument("--max-word-len", type=int)
    common(p)

    p = sub.add_parser("deterministic", help="exact decision for 0-1 vectors")
    p.add_argument("--p", required=True)
    p.add_argument("--q")
    p.add_argument("--cap", type=int, help="deepest level for the empty-column search")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo realisations and column statistics")
    p.add_argument("--p", required=True)
    p.add_argument("--q")
    p.add_argument("--levels", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv", dest="csv_path", help="write per-level CSV rows here")
    common(p, threads=True)

    p = sub.add_parser("pair", help="three-colour Delta-pairing of labels")
    p.add_argument("--odds", required=True)
    p.add_argument("--evens", required=True)
    common(p)

    p = sub.add_parser("selfcheck", help="exhaustive attractor scan and 0-1 cross-validation")
    p.add_argument("--max-m", type=int)
    common(p)
    return parser


def _int_list(text: str) -> list:
    if not text.strip():
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed integer list {text!r}") from exc


def parse_args(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand is None:
        raise UsageError("a subcommand is required: " + ", ".join(SUBCOMMANDS))
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "json", "config", "csv_path")}

    file_opts = {}
    if ns.config:
        with open(ns.config) as fh:
            file_opts = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
    for key, value in file_opts.items():
        if opts.get(key) is None and key in opts:
            opts[key] = value
    for key, env in ENV_DEFAULTS.items():
        if key in opts and opts[key] is None and env in os.environ:
            opts[key] = int(os.environ[env])
    for key, value in BUILTIN_DEFAULTS.items():
        if key in opts and opts[key] is None:
            opts[key] = value

    for key in ("max_order", "max_word_len", "trials", "levels", "cap", "max_m", "threads"):
        if opts.get(key) is not None and opts[key] < 1:
            raise UsageError(f"--{key.replace('_', '-')} must be positive")

    try:
        if "p" in opts:
            p = parse_csv(opts["p"])
            if opts.get("q") is not None and len(parse_csv(opts["q"])) != len(p):
                raise UsageError(f"--q has {len(parse_csv(opts['q']))} entries but --p has {len(p)}")
            opts["spec"] = CantorSpec.from_csv(opts["p"], opts.get("q"))
        if "family" in opts:
            opts["template"] = parse_family(opts["family"])
        if "odds" in opts:
            opts["odd_labels"] = _int_list(opts["odds"])
            opts["even_labels"] = _int_list(opts["evens"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    return RunConfig(ns.subcommand, opts, "json" if ns.json else "text", getattr(ns, "csv_path", None))


def _inputs(cfg: RunConfig) -> dict:
    skip = {"spec", "template", "odd_labels", "even_labels"}
    return {k: v for k, v in cfg.options.items() if k not in skip and v is not None}


def run(cfg: RunConfig) -> tuple:
    """Execute a parsed config; returns ``(envelope, exit_code, text_summary)``."""
    t0 = time.perf_counter()
    timings = {}
    code = 0
    sc = cfg.subcommand

    if sc == "analyze":
        spec = cfg.options["spec"]
        g = correlations(spec)
        d = analyze(spec, cfg.get("max_order"), cfg.get("max_word_len"))
        timings["decide"] = time.perf_counter() - t0
        payload = {
            "M": spec.M,
            "gamma": g.tolist(),
            "dimensions": list(dimension(spec)),
            "order1": decide_order1(g).to_dict(),
            "decision": d.to_dict(),
        }
        code = 2 if d.verdict is Verdict.INCONCLUSIVE else 0
        text = f"{d.verdict.value}  ({_describe(d)})"

    elif sc == "bracket":
        b = critical_bracket(
            cfg.options["template"],
            cfg.options["lo"],
            cfg.options["hi"],
            cfg.get("tol"),
            cfg.get("max_order"),
            cfg.get("max_word_len"),
        )
        timings["bracket"] = time.perf_counter() - t0
        payload = b.to_dict()
        text = f"{b.lo!r} < rho_c < {b.hi!r}  [{b.assumption}]"

    elif sc == "deterministic":
        spec = cfg.options["spec"]
        d = decide_deterministic(spec)
        timings["attractor"] = time.perf_counter() - t0
        payload = d.to_dict()
        w = empty_column_depth(spec, cap=cfg.get("cap"))
        timings["empty_column"] = time.perf_counter() - t0 - timings["attractor"]
        payload["empty_column"] = None if w is None else {"level": w.level, "index": w.index, "digits": list(w.digits)}
        text = f"{d.verdict}  attractor={payload.get('attractor')}"

    elif sc == "simulate":
        spec = cfg.options["spec"]
        stats = run_experiment(spec, cfg.get("levels"), cfg.get("trials"), cfg.get("seed"), workers=cfg.get("threads"))
        timings["simulate"] = time.perf_counter() - t0
        payload = stats.to_dict()
        if cfg.csv_path:
            with open(cfg.csv_path, "w", newline="") as fh:
                fh.write(stats.to_csv())
        text = stats.to_csv()

    elif sc == "pair":
        odds, evens = cfg.options["odd_labels"], cfg.options["even_labels"]
        c = three_color_pairing(odds, evens)
        problems = check_coloring(odds, evens, c)
        timings["pair"] = time.perf_counter() - t0
        payload = dict(c.to_dict(), violations=problems)
        code = 1 if problems else 0
        text = "\n".join(f"{e},{o} {col or '-'}" for (e, o), col in zip(c.pairs, c.colors))
        if problems:
            text += "\n" + "\n".join("violation: " + p for p in problems)

    elif sc == "selfcheck":
        periods = scan_all_periods()
        timings["attractor_scan"] = time.perf_counter() - t0
        cv = cross_validate(cfg.get("max_m"))
        timings["cross_validation"] = time.perf_counter() - t0 - timings["attractor_scan"]
        all_fixed = bool((periods == 1).all())
        ok = all_fixed and not (cv["mismatches"] or cv["occupancy_failures"] or cv["case2_failures"])
        payload = {"initial_sets": int(len(periods)), "all_attractors_fixed_points": all_fixed, "cross_validation": cv, "ok": ok}
        code = 0 if ok else 1
        text = (
            f"attractors: {len(periods)} starts, all fixed points: {all_fixed}\n"
            f"0-1 vectors M<={cv['max_M']}: {cv['vectors']} checked, {len(cv['mismatches'])} mismatches"
        )
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown subcommand {sc}")

    timings["total"] = time.perf_counter() - t0
    return ResultEnvelope(sc, _inputs(cfg), payload, timings), code, text


def _describe(d) -> str:
    if d.kind == "all-gamma":
        return f"order {d.order}, min gamma {d.min_gamma:.6g}"
    if d.kind == "consecutive-gamma":
        return f"order {d.order}, gamma[{d.column}], gamma[{d.column}+1] = {d.gammas[0]:.6g}, {d.gammas[1]:.6g}"
    if d.kind == "spectral":
        return f"word {''.join(map(str, d.word)) if max(d.word) < 10 else d.word}, eigenvalue {d.eigenvalue:.6g}"
    return f"searched orders <= {d.max_order}" + (f", words <= {d.max_word_len}" if d.max_word_len else "")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        env, code, text = run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        # CertificationError is a ValueError
        kind = "certification" if isinstance(exc, CertificationError) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return 1
    print(env.to_json() if cfg.output == "json" else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
