"""Command line front end.

Six subcommands cover the whole workflow: generate an instance, solve
its exact operators, evaluate the bound constants, run an experiment,
run a whole figure preset, and fit a tail convergence rate from a saved
curve.  All structured output is JSON on stdout or files on disk; exit
codes are 0 for success, 2 for invalid arguments, 3 for an infeasible
plan or a degenerate instance, and 4 for I/O failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bounds import lemma_constants, with_stacked, TABLE_FIELD_ROLES
from .errors import InvalidArgument, TdcLabError, UnknownPreset
from .harness import (
    ExperimentConfig,
    fit_rate,
    preset,
    read_series,
    run_experiment,
    write_series,
)
from .mdp import generate_garnet, load_instance, save_instance
from .operators import build_problem_data

__all__ = ["main"]


def _auto_or_float(text: str) -> str | float:
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number or 'auto', got {text!r}") from None


def _parse_grid(text: str) -> dict:
    if text == "geometric":
        return {"kind": "geometric", "ratio": 1.05}
    if text.startswith("every:"):
        try:
            k = int(text[len("every:"):])
        except ValueError:
            raise InvalidArgument(f"bad record grid {text!r}") from None
        if k < 1:
            raise InvalidArgument("record grid stride must be positive")
        return {"kind": "every", "every": k}
    raise InvalidArgument(
        f"record grid must be 'geometric' or 'every:K', got {text!r}")


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_generate(args) -> int:
    mdp, policies, features = generate_garnet(
        args.ns, args.na, args.branching, args.features, args.seed,
        gamma=args.gamma)
    generator = {"p": args.branching, "q": args.features, "seed": args.seed}
    save_instance(args.out, mdp, policies, features, generator)
    _print_json({"out": str(args.out), "n_states": mdp.n_states,
                 "n_actions": mdp.n_actions, "n_features": features.d})
    return 0


def cmd_solve(args) -> int:
    mdp, policies, features = load_instance(args.mdp)
    problem = build_problem_data(mdp, policies, features)
    doc = {
        "A": problem.A.tolist(),
        "B": problem.B.tolist(),
        "C": problem.C.tolist(),
        "b": problem.b.tolist(),
        "theta_star": problem.theta_star.tolist(),
        "lambda_theta": problem.lambda_theta,
        "lambda_w": problem.lambda_w,
        "lambda_cm": problem.lambda_cm,
        "R_theta": problem.R_theta,
        "R_w": problem.R_w,
        "m_hat": problem.mixing.m_hat,
        "rho_hat": problem.mixing.rho_hat,
    }
    Path(args.out).write_text(json.dumps(doc) + "\n")
    _print_json({"out": str(args.out), "theta_star_norm":
                 float(sum(x * x for x in problem.theta_star) ** 0.5)})
    return 0


def cmd_constants(args) -> int:
    mdp, policies, features = load_instance(args.mdp)
    problem = build_problem_data(mdp, policies, features)
    table = lemma_constants(problem, r_max=mdp.r_max,
                            rho_max=policies.rho_max, gamma=mdp.gamma,
                            c_alpha=args.c_alpha, c_beta=args.c_beta)
    if args.eta is not None:
        table = with_stacked(table, problem, args.eta,
                             problem.mixing.m_hat, problem.mixing.rho_hat)
    values = {k: v for k, v in dataclasses.asdict(table).items()
              if v is not None}
    doc = {
        "inputs": {
            "c_alpha": args.c_alpha,
            "c_beta": args.c_beta,
            "eta": args.eta,
            "gamma": mdp.gamma,
            "r_max": mdp.r_max,
            "rho_max": policies.rho_max,
            "m_hat": problem.mixing.m_hat,
            "rho_hat": problem.mixing.rho_hat,
        },
        "values": values,
        "roles": {k: TABLE_FIELD_ROLES[k] for k in values
                  if k in TABLE_FIELD_ROLES},
    }
    Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _print_json({"out": str(args.out), "fields": len(values)})
    return 0


def _schedule_from_args(args) -> dict:
    if args.schedule == "diminishing":
        needed = {"c_alpha": args.c_alpha, "c_beta": args.c_beta,
                  "sigma": args.sigma, "nu": args.nu}
        missing = [k for k, v in needed.items() if v is None]
        if missing:
            raise InvalidArgument(
                "diminishing schedule needs --c-alpha --c-beta --sigma --nu")
        return {"kind": "diminishing", **needed}
    if args.schedule == "constant":
        if args.alpha is None or args.beta is None:
            raise InvalidArgument("constant schedule needs --alpha --beta")
        return {"kind": "constant", "alpha": args.alpha, "beta": args.beta}
    if args.eps_target is None:
        raise InvalidArgument("blockwise schedule needs --eps-target")
    sched = {"kind": "blockwise", "eps_target": args.eps_target}
    if args.eta is not None:
        sched["eta"] = args.eta
    if args.alpha is not None:
        sched["alpha0"] = args.alpha
    if args.c7 is not None:
        sched["c7"] = args.c7
    if args.lambda_x is not None:
        sched["lambda_x"] = args.lambda_x
    return sched


def cmd_run(args) -> int:
    schedule = _schedule_from_args(args)
    config = ExperimentConfig(
        instance={"file": str(args.mdp)},
        schedule=schedule,
        steps=args.steps,
        runs=args.runs,
        base_seed=args.seed,
        record_grid=_parse_grid(args.record_grid),
        label=args.label or f"{args.schedule} run",
        out=str(args.out),
    )
    series = run_experiment(config)
    write_series(args.out, series, config)
    _print_json({
        "out": str(args.out),
        "checkpoints": int(series.checkpoints.size),
        "final_mean_theta_sq_err": float(series.mean_theta_sq_err[-1]),
        "final_mean_z_sq_err": float(series.mean_z_sq_err[-1]),
    })
    return 0


def cmd_preset(args) -> int:
    configs = preset(args.name, args.scale)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i, config in enumerate(configs):
        path = out_dir / f"{args.name}-{i:02d}.csv"
        config = dataclasses.replace(config, out=str(path))
        series = run_experiment(config)
        write_series(path, series, config)
        written.append({"out": str(path), "label": config.label,
                        "final_mean_theta_sq_err":
                            float(series.mean_theta_sq_err[-1])})
    _print_json({"name": args.name, "curves": written})
    return 0


def cmd_fit_rate(args) -> int:
    series, _config = read_series(args.infile)
    slope, intercept, r_squared = fit_rate(series, args.tail, args.which)
    _print_json({"slope": slope, "intercept": intercept,
                 "r_squared": r_squared, "which": args.which,
                 "tail_fraction": args.tail})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdclab",
        description="Two time-scale TDC policy evaluation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random Garnet instance")
    p.add_argument("--ns", type=int, required=True, help="number of states")
    p.add_argument("--na", type=int, required=True, help="number of actions")
    p.add_argument("--branching", type=int, required=True,
                   help="successor states per state-action pair")
    p.add_argument("--features", type=int, required=True,
                   help="feature dimension")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="exact operators and spectral constants")
    p.add_argument("--mdp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("constants", help="finite-time bound constants")
    p.add_argument("--mdp", required=True)
    p.add_argument("--eta", type=float, default=None,
                   help="fast-to-slow stepsize ratio for the stacked block")
    p.add_argument("--c-alpha", type=float, default=1.0)
    p.add_argument("--c-beta", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("run", help="run one experiment to a CSV curve")
    p.add_argument("--mdp", required=True)
    p.add_argument("--schedule", required=True,
                   choices=("diminishing", "constant", "blockwise"))
    p.add_argument("--c-alpha", type=float, default=None)
    p.add_argument("--c-beta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--eps-target", type=float, default=None)
    p.add_argument("--eta", type=_auto_or_float, default=None,
                   help="fast-to-slow ratio for the plan, or 'auto'")
    p.add_argument("--c7", type=_auto_or_float, default=None,
                   help="override the planner's drift constant, or 'auto'")
    p.add_argument("--lambda-x", type=_auto_or_float, default=None,
                   help="override the stacked contraction rate, or 'auto'")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--record-grid", default="geometric",
                   help="'geometric' or 'every:K'")
    p.add_argument("--label", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a published figure setting")
    p.add_argument("--name", required=True)
    p.add_argument("--scale", type=float, default=None,
                   help="fraction of the full published size; omit for the "
                        "desk profile")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("fit-rate", help="fit a tail slope from a saved curve")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tail", type=float, default=0.5)
    p.add_argument("--which", choices=("theta", "z"), default="theta")
    p.set_defaults(func=cmd_fit_rate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgument, UnknownPreset) as exc:
        print(f"tdclab: {exc}", file=sys.stderr)
        return 2
    except TdcLabError as exc:
        print(f"tdclab: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"tdclab: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
