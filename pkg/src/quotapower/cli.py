"""Command-line entry point: ``quotapower <command> ...``.

Exit status: 0 on success, 1 on a domain error (bad input, violated
precondition, failed verification), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .ballsbins import BallsBinsConfig, exponential_probs, read_probs, sample_weights
from .game import shapley_all, shapley_diff
from .io import (
    breakpoints_csv,
    load_game,
    load_si_weights,
    parse_rational,
    power_vector_csv,
)
from .superincreasing import (
    LimitSpec,
    dary_weights,
    find_pset,
    limit_shapley,
    si_interval,
    si_shapley_all,
)
from .verify import check_identities, check_oracle

log = logging.getLogger("quotapower")


class DomainError(Exception):
    pass


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {path}: {exc}") from exc


def _emit(text: str, output: str | None):
    if output and output != "-":
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").strip("[]").split(",") if x]


def _si_weights(args):
    if args.weights:
        return load_si_weights(_int_list(args.weights))
    if args.base is not None and args.n is not None:
        return dary_weights(args.base, args.n)
    if getattr(args, "si_file", None):
        return load_si_weights(_read_json(args.si_file))
    raise DomainError("give --weights, --base with --n, or --file")


def _frac(x: Fraction) -> str:
    return str(x)


def cmd_compute(args):
    game = load_game(_read_json(args.game), args.quota)
    _emit(power_vector_csv(shapley_all(game)), args.output)


def cmd_diff(args):
    game = load_game(_read_json(args.game), args.quota)
    d = shapley_diff(game, args.i, args.j)
    _emit(json.dumps({"i": args.i, "j": args.j, "diff": _frac(d), "diff_float": float(d)}), args.output)


def cmd_sweep(args):
    doc = _read_json(args.game)
    weights = tuple(doc["weights"]) if isinstance(doc, dict) else tuple(doc)
    agents = _int_list(args.agents) if args.agents else None
    curve = ex.quota_sweep(weights, args.grid, agents)
    _emit(curve.to_csv(), args.output)


def cmd_sample(args):
    if args.rho is not None and args.probs:
        raise DomainError("--rho and --probs are mutually exclusive")
    if args.rho is not None:
        probs = exponential_probs(args.n, args.rho)
    elif args.probs:
        try:
            probs = read_probs(Path(args.probs).read_text())
        except OSError as exc:
            raise DomainError(f"cannot read {args.probs}: {exc.strerror}") from exc
    else:
        probs = ()
    config = BallsBinsConfig(args.n, args.m, probs, args.seed)
    _emit(json.dumps(sample_weights(config).to_json()), args.output)


def cmd_si_pset(args):
    w = _si_weights(args)
    p = find_pset(w, args.quota)
    iv = si_interval(w, p)
    _emit(json.dumps({
        "pset": list(p.members),
        "text": str(p),
        "beta": p.beta,
        "interval": f"({iv.lower},{iv.upper}]",
        "lower": _frac(iv.lower),
        "upper": _frac(iv.upper),
    }), args.output)


def cmd_si_shapley(args):
    w = _si_weights(args)
    _emit(power_vector_csv(si_shapley_all(w, args.quota)), args.output)


def cmd_si_breakpoints(args):
    _emit(breakpoints_csv(_si_weights(args)), args.output)


def cmd_si_limit(args):
    value, bound = limit_shapley(LimitSpec(args.base, args.depth, args.quota), args.agent)
    _emit(json.dumps({
        "agent": args.agent, "value": _frac(value), "value_float": float(value),
        "error_bound": _frac(bound),
    }), args.output)


_EXPERIMENT_KEYS = ("n", "m", "trials", "seed", "ell", "rho", "T", "offsets", "intervals")


def _experiment_config(args) -> dict:
    cfg = _read_json(args.config) if args.config else {}
    for key in _EXPERIMENT_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "seed" not in cfg:
        raise DomainError("randomized commands need an explicit seed (--seed or config)")
    for key in ("n", "m"):
        if key not in cfg:
            raise DomainError(f"missing experiment parameter {key!r}")
    return cfg


def cmd_experiment(args):
    cfg = _experiment_config(args)
    log.info("resolved experiment config: %s", json.dumps(cfg, sort_keys=True, default=str))
    common = {"trials": int(cfg.get("trials", 20)), "seed": int(cfg["seed"])}
    if args.which == "equal-power":
        offsets = [parse_rational(o) for o in cfg.get("offsets", ["1/2"])]
        report = ex.run_equal_power(int(cfg["n"]), int(cfg["m"]), offsets, **common)
    elif args.which == "min-shapley":
        report = ex.run_min_shapley(int(cfg["n"]), int(cfg["m"]), int(cfg.get("ell", 1)), **common)
    else:
        T = cfg.get("T")
        if isinstance(T, str):
            T = T.split(",")
        T = [parse_rational(t) for t in T] if T else None
        report = ex.run_exponential_match(
            int(cfg["n"]), parse_rational(cfg.get("rho", "2/5")), int(cfg["m"]), T,
            intervals=int(cfg.get("intervals", 10)), **common,
        )
    if args.records:
        Path(args.records).write_text(report.records_csv())
    _emit(report.to_json(), args.output)


def cmd_verify(args):
    if args.which == "identities":
        failures = check_identities(args.p_max, args.k_max)
    else:
        failures = check_oracle(args.games, args.seed, args.n_max)
    for f in failures[:20]:
        print(f, file=sys.stderr)
    print(f"verify {args.which}: {'FAIL' if failures else 'ok'} ({len(failures)} failures)")
    if failures:
        raise DomainError(f"{len(failures)} invariant violations")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quotapower", description=__doc__.splitlines()[0])
    p.add_argument("-q", "--quiet", action="store_true", help="suppress config logging")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--output", default=None, help="output path (default stdout)")

    c = sub.add_parser("compute", help="Shapley values of a game file")
    c.add_argument("--game", required=True, help="game JSON ('-' for stdin)")
    c.add_argument("--quota", type=parse_rational, help="override or supply the quota")
    out(c)
    c.set_defaults(func=cmd_compute)

    d = sub.add_parser("diff", help="|phi_j - phi_i| by the pairwise formula")
    d.add_argument("--game", required=True)
    d.add_argument("--quota", type=parse_rational)
    d.add_argument("-i", type=int, required=True)
    d.add_argument("-j", type=int, required=True)
    out(d)
    d.set_defaults(func=cmd_diff)

    s = sub.add_parser("sweep", help="values over a quota grid")
    s.add_argument("--game", required=True, help="game or sample JSON (quota ignored)")
    s.add_argument("--grid", default="integers", help=ex.parse_grid.__doc__.splitlines()[0])
    s.add_argument("--agents", help="comma-separated agent labels (default all)")
    out(s)
    s.set_defaults(func=cmd_sweep)

    sm = sub.add_parser("sample", help="balls-and-bins weights")
    sm.add_argument("--n", type=int, required=True)
    sm.add_argument("--m", type=int, required=True)
    sm.add_argument("--rho", type=parse_rational, help="exponential ratio in (0, 1/2)")
    sm.add_argument("--probs", help="file with one probability per line")
    sm.add_argument("--seed", type=int, required=True)
    out(sm)
    sm.set_defaults(func=cmd_sample)

    si = sub.add_parser("si", help="super-increasing analysis")
    si_sub = si.add_subparsers(dest="si_command", required=True)

    def si_weights(sp):
        sp.add_argument("--weights", help="comma-separated weights (any order)")
        sp.add_argument("--base", type=int, help="use d-ary weights d^(n-1),...,1")
        sp.add_argument("--n", type=int)
        sp.add_argument("--file", dest="si_file", help='JSON list or {"base": d, "n": n}')

    sp = si_sub.add_parser("pset", help="interval containing the quota")
    si_weights(sp)
    sp.add_argument("--quota", type=parse_rational, required=True)
    out(sp)
    sp.set_defaults(func=cmd_si_pset)

    sp = si_sub.add_parser("shapley", help="closed-form values")
    si_weights(sp)
    sp.add_argument("--quota", type=parse_rational, required=True)
    out(sp)
    sp.set_defaults(func=cmd_si_shapley)

    sp = si_sub.add_parser("breakpoints", help="all intervals with their values")
    si_weights(sp)
    out(sp)
    sp.set_defaults(func=cmd_si_breakpoints)

    sp = si_sub.add_parser("limit", help="value for w_i = d^-i")
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--quota", type=parse_rational, required=True)
    sp.add_argument("--agent", type=int, required=True)
    out(sp)
    sp.set_defaults(func=cmd_si_limit)

    e = sub.add_parser("experiment", help="seeded Monte Carlo checks")
    e.add_argument("which", choices=["equal-power", "min-shapley", "exponential"])
    e.add_argument("--config", help="experiment config JSON; flags override it")
    e.add_argument("--n", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--trials", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--ell", type=int)
    e.add_argument("--rho")
    e.add_argument("--T", help="comma-separated T values")
    e.add_argument("--offsets", type=lambda s: s.split(","))
    e.add_argument("--intervals", type=int)
    e.add_argument("--records", help="also write per-trial CSV here")
    out(e)
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("which", choices=["identities", "oracle"])
    v.add_argument("--p-max", type=int, default=40)
    v.add_argument("--k-max", type=int, default=20)
    v.add_argument("--games", type=int, default=200)
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    resolved = {k: v for k, v in vars(args).items() if k != "func"}
    log.info("resolved command: %s", json.dumps(resolved, sort_keys=True, default=str))
    try:
        args.func(args)
    except (DomainError, ValueError, IndexError, KeyError) as exc:
        print(f"quotapower: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
