"""Command-line front end: solve, cross-check and compare mechanisms on instance files."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import approx, dyn, oracle
from .dist import equal_revenue_discrete, monopoly
from .errors import InfeasibleError, InvalidStateError, ResourceLimitError
from .history import tree_size
from .io import SCHEMA_VERSION, Instance, InstanceError, Settings, load_instance, load_json, parse_instance, save_json
from .pwl import PiecewiseLinearConcave

EXIT_OK, EXIT_USAGE, EXIT_INSTANCE, EXIT_RESOURCE = 0, 2, 3, 4
TRACE_LIMIT = 1000
REPRO_TOL = 1e-9

COMMANDS = ("solve-optimal", "solve-approx", "oracle", "markov", "verify", "compare", "example-two-er")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynmech", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("instance", help="instance JSON file")
        sp.add_argument("--delta-prime", type=float, default=None, help="per-level approximation error")
        sp.add_argument("--seed", type=int, default=None, help="seed for every sampling step")
        sp.add_argument("--samples", type=int, default=0,
                        help="Monte Carlo sample count used when the history tree is too large")
        sp.add_argument("-o", "--output", default=None, help="write the result JSON here")

    sp = sub.add_parser("solve-optimal", help="backward-induction optimal mechanism")
    common(sp)
    sp.add_argument("--trace", action="store_true", help="include per-history execution traces")
    sp = sub.add_parser("solve-approx", help="two-approximation and the revenue upper bound")
    common(sp)
    sp.add_argument("--trace", action="store_true")
    sp = sub.add_parser("oracle", help="brute-force LP over the history tree")
    common(sp)
    sp.add_argument("--ic", choices=("all", "adjacent"), default="all")
    sp = sub.add_parser("markov", help="stationary two-report mechanism LP")
    common(sp)
    sp.add_argument("--markov-delta", type=float, default=None)
    sp = sub.add_parser("verify", help="brute-force PIC/IR check of an instance or a solve-optimal result")
    common(sp)
    sp = sub.add_parser("compare", help="run every method and print a revenue table")
    common(sp)
    sp.add_argument("--markov-delta", type=float, default=None)
    sp = sub.add_parser("example-two-er", help="sequential monopoly vs optimal on two equal-revenue periods")
    common(sp, instance=False)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--N", type=int, default=20)
    return p


# helpers -------------------------------------------------------------------


def _settings(inst: Instance, args) -> Settings:
    s = Settings(**inst.settings.to_dict())
    if getattr(args, "delta_prime", None) is not None:
        s.delta_prime = args.delta_prime
    if getattr(args, "seed", None) is not None:
        s.seed = args.seed
    if getattr(args, "markov_delta", None) is not None:
        s.markov_delta = args.markov_delta
    return s


def _sampled_revenue(dists, c0, mech_at, charge, n, seed) -> float:
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(n):
        reports = [float(rng.choice(d.support, p=d.probs)) for d in dists]
        total += sum(dyn._run(dists, reports, c0, mech_at, charge).pay)
    return total / n


def _all_histories(dists, seed, limit=TRACE_LIMIT):
    if tree_size(dists) <= limit:
        import itertools
        return [list(h) for h in itertools.product(*(d.support.tolist() for d in dists))]
    rng = np.random.default_rng(seed)
    return [[float(rng.choice(d.support, p=d.probs)) for d in dists] for _ in range(limit)]


def _trace_record(tr) -> dict:
    rec = tr.to_dict()
    # per-unit price when allocated, for reporting only
    rec["price_if_allocated"] = [p / x if x > 0 else None for p, x in zip(tr.pay, tr.alloc)]
    return rec


def _policy_dict(pol: dyn.OptimalPolicy) -> dict:
    return {"c0": pol.c0, "delta_prime": pol.delta_prime, "gtilde": [g.to_dict() for g in pol.gtilde]}


def _approx_dict(pol: approx.ApproxPolicy) -> dict:
    return {"c0": pol.c0, "delta_prime": pol.delta_prime, "htilde": [h.to_dict() for h in pol.htilde]}


def _policy_from_dict(dists, data) -> dyn.OptimalPolicy:
    g = [PiecewiseLinearConcave.from_dict(x) for x in data["gtilde"]]
    return dyn.OptimalPolicy(list(dists), g, float(data["c0"]), float(data["delta_prime"]))


def _optimal_block(inst, s, args, out):
    pol = dyn.plan(inst.periods, s.delta_prime)
    out["policy"] = _policy_dict(pol)
    out["revenues"]["predicted_recursive"] = pol.predicted_revenue
    try:
        tree = pol.to_tree()
        out["revenues"]["optimal_recursive"] = tree.revenue()
        out["verification"] = dyn.verify_tree(tree).to_dict()
    except ResourceLimitError:
        if not args.samples:
            raise
        out["revenues"]["optimal_recursive"] = _sampled_revenue(
            pol.dists, pol.c0, pol.stage_mechanism, dyn._charge_optimal, args.samples, s.seed)
        out["revenues"]["optimal_recursive_is_estimate"] = True
    if getattr(args, "trace", False):
        out["traces"] = [_trace_record(dyn.execute(pol, h)) for h in _all_histories(pol.dists, s.seed)]
    return pol


def _approx_block(inst, s, args, out):
    pol = approx.plan_approx(inst.periods)
    out["approx_policy"] = _approx_dict(pol)
    r = out["revenues"]
    r["mechanism1"] = approx.mechanism1_revenue(inst.periods)
    r["sequential_monopoly"] = r["mechanism1"]
    try:
        r["mechanism2"] = approx.expected_revenue2(pol)
    except ResourceLimitError:
        if not args.samples:
            raise
        r["mechanism2"] = _sampled_revenue(pol.dists, pol.c0, pol.stage_mechanism, approx._charge2,
                                           args.samples, s.seed)
        r["mechanism2_is_estimate"] = True
    r["combined"] = 0.5 * (r["mechanism1"] + r["mechanism2"])
    r["upper_bound"] = approx.upper_bound(inst.periods, policy=pol)
    if getattr(args, "trace", False):
        out["traces2"] = [_trace_record(approx.execute2(pol, h)) for h in _all_histories(pol.dists, s.seed)]
    return pol


def _oracle_block(inst, s, args, out, ic="all"):
    value, tree = oracle.global_lp_single(inst.periods, ic=ic)
    out["revenues"]["oracle_lp"] = value
    out["oracle_verification"] = dyn.verify_tree(tree).to_dict()
    if inst.agents is not None:
        out["revenues"]["oracle_lp_multi"] = oracle.global_lp_multi(inst.agents)


def _markov_block(inst, s, out):
    d = inst.periods[0]
    value = oracle.markov_lp(d, s.markov_delta)
    mono = monopoly(d)[1]
    out["markov"] = {"delta": s.markov_delta, "value": value, "monopoly": mono,
                     "excess_over_monopoly": value - mono}


def _base(inst: Instance, s: Settings, command: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "instance": Instance(inst.periods, inst.agents, s).to_dict(), "revenues": {}}


def _table(rev: dict) -> str:
    order = ["optimal_recursive", "predicted_recursive", "oracle_lp", "oracle_lp_multi", "mechanism1",
             "mechanism2", "combined", "sequential_monopoly", "upper_bound"]
    rows = [(k, rev[k]) for k in order if k in rev]
    w = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{w}}  {v:.9f}" for k, v in rows)


def _emit(out: dict, args) -> None:
    if args.output:
        save_json(out, args.output)
    else:
        json.dump(out, sys.stdout, indent=2)
        sys.stdout.write("\n")


# commands ------------------------------------------------------------------


def cmd_solve_optimal(inst, s, args):
    out = _base(inst, s, "solve-optimal")
    _optimal_block(inst, s, args, out)
    return out


def cmd_solve_approx(inst, s, args):
    out = _base(inst, s, "solve-approx")
    _approx_block(inst, s, args, out)
    return out


def cmd_oracle(inst, s, args):
    out = _base(inst, s, "oracle")
    _oracle_block(inst, s, args, out, ic=args.ic)
    return out


def cmd_markov(inst, s, args):
    out = _base(inst, s, "markov")
    _markov_block(inst, s, out)
    return out


def cmd_verify(data: dict, args):
    """Verify either an instance (solve it first) or a solve-optimal result (rebuild its policy)."""
    if "policy" in data and "instance" in data:
        inst = parse_instance(data["instance"])
        s = _settings(inst, args)
        pol = _policy_from_dict(inst.periods, data["policy"])
        out = _base(inst, s, "verify")
        tree = pol.to_tree()
        rev = tree.revenue()
        out["revenues"]["optimal_recursive"] = rev
        stored = data.get("revenues", {}).get("optimal_recursive")
        out["reproduced"] = stored is None or abs(stored - rev) <= REPRO_TOL
    else:
        inst = parse_instance(data)
        s = _settings(inst, args)
        pol = dyn.plan(inst.periods, s.delta_prime)
        out = _base(inst, s, "verify")
        tree = pol.to_tree()
        out["revenues"]["optimal_recursive"] = tree.revenue()
    rep = dyn.verify_tree(tree)
    out["verification"] = rep.to_dict()
    out["within_tolerance"] = bool(rep.max_pic_violation <= 10 * pol.delta_prime + 1e-6
                                   and rep.min_stage_utility >= -1e-9
                                   and rep.max_abs_stage_utility_before_last <= 1e-9)
    return out


def cmd_compare(inst, s, args):
    out = _base(inst, s, "compare")
    _optimal_block(inst, s, args, out)
    _approx_block(inst, s, args, out)
    _oracle_block(inst, s, args, out)
    _markov_block(inst, s, out)
    r = out["revenues"]
    tol = len(inst.periods) * s.delta_prime + 1e-6
    out["checks"] = {
        "sequential_le_optimal": r["sequential_monopoly"] <= r["oracle_lp"] + 1e-6,
        "combined_ge_half_optimal": r["combined"] >= 0.5 * r["oracle_lp"] - tol,
        "optimal_le_upper_bound": r["oracle_lp"] <= r["upper_bound"] + 1e-6,
        "recursive_within_fptas_band": r["oracle_lp"] - tol <= r["optimal_recursive"] <= r["oracle_lp"] + 1e-6,
    }
    return out


def cmd_example_two_er(args):
    if args.n < 1 or args.N < 1:
        raise InstanceError("--n and --N must be positive integers")
    dists = [equal_revenue_discrete(args.n), equal_revenue_discrete(args.N)]
    s = Settings()
    if args.delta_prime is not None:
        s.delta_prime = args.delta_prime
    if args.seed is not None:
        s.seed = args.seed
    inst = Instance(dists, None, s)
    out = _base(inst, s, "example-two-er")
    seq = approx.mechanism1_revenue(dists)
    ic = "all" if tree_size(dists) <= 200 else "adjacent"
    value, _ = oracle.global_lp_single(dists, ic=ic)
    out["revenues"].update({"sequential_monopoly": seq, "oracle_lp": value})
    out["gap"] = {"absolute": value - seq, "ratio": value / seq, "n": args.n, "N": args.N, "ic": ic}
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "example-two-er":
            out = cmd_example_two_er(args)
        elif args.command == "verify":
            try:
                data = load_json(args.instance)
            except (OSError, ValueError) as exc:
                raise InstanceError(f"cannot read {args.instance}: {exc}") from exc
            out = cmd_verify(data, args)
        else:
            inst = load_instance(args.instance)
            s = _settings(inst, args)
            handler = {"solve-optimal": cmd_solve_optimal, "solve-approx": cmd_solve_approx,
                       "oracle": cmd_oracle, "markov": cmd_markov, "compare": cmd_compare}[args.command]
            out = handler(inst, s, args)
    except InstanceError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc} (use --samples N to estimate by sampling)", file=sys.stderr)
        return EXIT_RESOURCE
    except (InfeasibleError, InvalidStateError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    if args.command in ("compare", "example-two-er"):
        print(_table(out["revenues"]))
        if args.command == "example-two-er":
            print(f"gap ratio  {out['gap']['ratio']:.9f}")
        if args.output:
            save_json(out, args.output)
    else:
        _emit(out, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
