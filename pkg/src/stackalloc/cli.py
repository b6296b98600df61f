"""Command-line front door.

Subcommands: ``solve`` (JSON report on stdout), ``generate`` (write an
instance file), ``bench`` (CSV on stdout, optional JSON mirror) and
``validate``.  Exit codes: 0 success, 2 input error, 3 enumeration or
pivot cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import bench, exact, follower, heuristic, mwu
from .lp import PivotLimitError
from .model import (BipartiteInfluenceGame, CapExceededError, InstanceFormatError,
                    MixedStrategy, allocation_of, dump_instance, generate_instance,
                    load_instance, validate)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3


def _strategy_json(game: BipartiteInfluenceGame, x: MixedStrategy) -> dict:
    return {
        "support": [{"media": list(s.media), "prob": w} for s, w in x],
        "allocation": [float(v) for v in allocation_of(x, game.n).r],
    }


def _cert_json(cert: mwu.ApproxCertificate) -> dict:
    out = {"epsilon1": cert.epsilon1, "C": cert.C, "alpha": cert.alpha,
           "empirical_regret": cert.empirical_regret}
    if cert.epsilon2 is not None:
        out.update(epsilon2=cert.epsilon2, beta=cert.beta,
                   opt_value=cert.opt_value, bound_holds=cert.bound_holds)
    return out


def _load(path: str) -> BipartiteInfluenceGame:
    with open(path, encoding="utf-8") as fh:
        return load_instance(fh)


def cmd_solve(args: argparse.Namespace) -> int:
    game = _load(args.instance)
    tie_tol = args.tie_tolerance
    started = time.perf_counter()
    certificate = None
    if args.algorithm == "greedy":
        z, _ = heuristic.greedy_baseline(game)
        x = MixedStrategy.point_mass(z)
    elif args.algorithm == "mwu":
        cfg = mwu.MwuConfig(iterations=args.iters, epsilon=args.epsilon)
        x, _, certificate = mwu.solve_mwu(game, cfg)
    elif args.algorithm == "heuristic":
        x, _ = heuristic.solve_heuristic(game, args.ell)
    elif args.algorithm == "exact":
        x = exact.solve_multi_lp(game).leader
    else:  # exact-disjoint
        x = exact.solve_disjoint_lp(game).leader
    solve_ms = (time.perf_counter() - started) * 1e3

    # Everything reported below is recomputed from the emitted strategy.
    br = follower.best_response(game, x, tie_tol=tie_tol)
    report = {
        "algorithm": args.algorithm,
        "instance": args.instance,
        "n": game.n, "m": game.m, "k_L": game.k_L, "k_F": game.k_F,
        "leader": _strategy_json(game, x),
        "follower_best_response": list(br.chosen.media),
        "value": br.leader_value,
        "follower_value": br.follower_value,
        "timings": {"solve_ms": solve_ms},
    }
    if certificate is not None:
        report["certificate"] = _cert_json(certificate)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'a,b', got {text!r}")
    a, b = float(parts[0]), float(parts[1])
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError(f"range must satisfy 0 <= a <= b <= 1, got ({a}, {b})")
    return a, b


def cmd_generate(args: argparse.Namespace) -> int:
    game = generate_instance(args.n, args.m, args.mean_degree,
                             _parse_range(args.p), _parse_range(args.pf),
                             seed=args.seed, k_L=args.kl, k_F=args.kf)
    comment = (f"generated: n={args.n} m={args.m} mean_degree={args.mean_degree} "
               f"p=U({args.p}) pF=U({args.pf}) seed={args.seed}")
    with open(args.out, "w", encoding="utf-8") as fh:
        dump_instance(game, fh, comment=comment)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        specs = bench.parse_specs(json.load(fh))
    per_spec = [(spec, bench.run_experiment(spec)) for spec in specs]
    bench.write_csv([row for _, rows in per_spec for row in rows], sys.stdout)
    if args.json:
        mirror = [bench.rows_as_json(spec, rows) for spec, rows in per_spec]
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(mirror[0] if len(mirror) == 1 else mirror, fh, indent=2)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    problem = validate(_load(args.instance))
    if problem is None:
        print("ok")
        return EXIT_OK
    print(f"violation: {problem}")
    return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stackalloc",
        description="Leader-commitment budget-allocation game solvers "
                    "(set STACKALLOC_THREADS to parallelize benchmarks)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance, JSON report on stdout")
    p.add_argument("--instance", required=True)
    p.add_argument("--algorithm", required=True,
                   choices=["greedy", "mwu", "heuristic", "exact", "exact-disjoint"])
    p.add_argument("--iters", type=int, default=100, help="MWU iterations")
    p.add_argument("--epsilon", type=float, default=0.5, help="MWU epsilon")
    p.add_argument("--ell", type=int, default=10, help="heuristic rounds")
    p.add_argument("--seed", type=int, default=0,
                   help="accepted for interface stability; all solvers are deterministic")
    p.add_argument("--tie-tolerance", type=float, default=follower.TIE_TOL)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a seeded synthetic instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mean-degree", type=float, required=True)
    p.add_argument("--p", required=True, help="activation range 'a,b'")
    p.add_argument("--pf", required=True, help="recapture range 'a,b'")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kl", type=int, default=1, help="leader budget")
    p.add_argument("--kf", type=int, default=2, help="follower budget")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run an experiment spec, CSV on stdout")
    p.add_argument("--spec", required=True, help="JSON experiment spec")
    p.add_argument("--json", help="also write a JSON mirror with per-trial values")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check instance invariants")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapExceededError, PivotLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
