"""Command-line front end: solve, evaluate, trace, and verify subcommands.

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 non-convergence, 4 reachability cap exceeded.
"""

import argparse
import os
import sys

import numpy as np

from . import cost as cost_mod
from . import plots
from .errors import CapExceeded, NonConvergence, ZeroSurvivalMass
from .iterate import individually_optimal, joint_dp, joint_policy_rcls, \
    reachable_beliefs
from .major import check_walk_structure, is_neat
from .model import PagingRCL, RegistrationRCL, load_model_config, read_rcl, \
    stationary_walk_policies, write_rcl
from .regdp import walk_value_iteration


def _build_g0(model, spec):
    """Initial registration RCL from a --g0 spec.

    Accepts ``always``, ``never``, ``threshold:<d>`` (register when the
    state-index distance from the last report is at least d), or the path
    of a registration RCL file.
    """
    n, K = model.n_states, model.k_max
    if spec == "never":
        return RegistrationRCL(np.zeros((n, K, n), dtype=np.int8))
    if spec == "always":
        return RegistrationRCL(np.ones((n, K, n), dtype=np.int8))
    if spec.startswith("threshold:"):
        d = int(spec.split(":", 1)[1])
        if d < 1:
            raise ValueError("threshold distance must be at least 1")
        g = np.zeros((n, K, n), dtype=np.int8)
        for i0 in range(n):
            far = np.abs(np.arange(n) - i0) >= d
            g[i0, :, :] = far.astype(np.int8)
        return RegistrationRCL(g)
    rcl = read_rcl(spec)
    if not isinstance(rcl, RegistrationRCL):
        raise ValueError(f"{spec} is not a registration RCL file")
    if rcl.n_states != n or rcl.k_max != K:
        raise ValueError(f"{spec} does not match the model dimensions")
    return rcl


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_solve(args):
    model, _ = load_model_config(args.config)
    g0 = _build_g0(model, args.g0)
    log = individually_optimal(model, g0, tol=args.tol)
    write_rcl(_out(args, "paging.rcl"), log.f)
    write_rcl(_out(args, "registration.rcl"), log.g)
    with open(_out(args, "iteration_log.tsv"), "w") as fh:
        fh.write("round\tcost_after_paging\tcost_after_registration\n")
        for r in log.rounds:
            fh.write(f"{r.round}\t{r.cost_after_paging!r}\t"
                     f"{r.cost_after_registration!r}\n")
        fh.write(f"# converged={log.converged} final_cost={log.cost!r}\n")
    if args.plot:
        plots.save_iteration_figure(log, _out(args, "iteration_log.png"))
    print(f"converged in {len(log.rounds)} round(s); final cost {log.cost!r}")
    return 0


def cmd_evaluate(args):
    model, _ = load_model_config(args.config)
    f = read_rcl(args.f_file)
    g = read_rcl(args.g_file)
    if not isinstance(f, PagingRCL):
        raise ValueError(f"{args.f_file} is not a paging RCL file")
    if not isinstance(g, RegistrationRCL):
        raise ValueError(f"{args.g_file} is not a registration RCL file")
    if f.n_states != model.n_states or f.k_max != model.k_max \
            or g.n_states != model.n_states or g.k_max != model.k_max:
        raise ValueError("RCL dimensions do not match the model")
    f.validate(model)
    report = cost_mod.policy_cost(model, f, g)
    cost_mod.write_cost_report(_out(args, "cost_report.txt"), report)
    print(f"exact cost {report.total!r}")
    if args.mc_cycles:
        est, se = cost_mod.monte_carlo_cost(model, f, g, args.seed,
                                            args.mc_cycles)
        with open(_out(args, "cost_report.txt"), "a") as fh:
            fh.write(f"monte_carlo {est!r} stderr {se!r} seed {args.seed} "
                     f"cycles {args.mc_cycles}\n")
        print(f"monte carlo  {est!r} (stderr {se!r})")
    if args.plot:
        plots.save_cost_figure(report, _out(args, "cost_report.png"))
    return 0


def cmd_trace(args):
    model, cfg = load_model_config(args.config)
    f = read_rcl(args.f_file)
    g = read_rcl(args.g_file)
    steps = cost_mod.export_trace(model, f, g, args.seed, args.t_end)
    cost_mod.write_trace(_out(args, "trace.tsv"), steps, args.seed)
    cost_mod.write_trace_table(_out(args, "trace_table.tsv"), steps)
    if args.plot:
        grid = (cfg["i_max"], cfg["j_max"]) if cfg.get("kind") == "torus" \
            else None
        plots.save_trace_figure(model, steps, _out(args, "trace.png"),
                                grid=grid)
    print(f"wrote {len(steps)} steps")
    return 0


def cmd_verify(args):
    model, cfg = load_model_config(args.config)
    kind = cfg.get("kind")
    checks = []
    if kind == "simple":
        chain = reachable_beliefs(model, cap=args.cap)
        checks.append(("belief chain has 7 nodes", len(chain) == 7))
        result = joint_dp(model, chain, tol=min(args.tol, 1e-12))
        g0 = result.g_bar[chain.root]
        boundary = model.lambda_p * model.page_cost * model.beta
        if model.reg_cost > boundary:
            expect = np.zeros(model.n_states, dtype=np.int8)
            checks.append(("policy A jointly optimal",
                           np.array_equal(g0, expect)))
        elif model.reg_cost < boundary:
            expect = np.zeros(model.n_states, dtype=np.int8)
            expect[1] = 1
            checks.append(("policy B jointly optimal",
                           np.array_equal(g0, expect)))
        else:
            checks.append(("boundary case: A and B tie", True))
        f_j, g_j = joint_policy_rcls(model, result)
        pair_cost = cost_mod.policy_cost(model, f_j, g_j).total
        checks.append(("joint value <= RCL pair cost",
                       result.value_at_root() <= pair_cost + 1e-9))
    elif kind == "walk":
        result = walk_value_iteration(model, tol=args.tol)
        neat = is_neat((-result.V, model.x0), atol=1e-12)
        checks.append(("-V is neat", neat))
        ok_thresh = result.is_threshold and result.d_l is not None \
            and result.d_r is not None and abs(result.d_l - result.d_r) <= 1
        checks.append(("threshold registration with |d_l - d_r| <= 1",
                       ok_thresh))
        if ok_thresh:
            f_s, g_s = stationary_walk_policies(model, result.d_l, result.d_r)
            rep = check_walk_structure(model, f_s, g_s)
            checks.append(("ping-pong + threshold", rep.ok))
        if args.plot:
            plots.save_walk_value_figure(model, result,
                                         _out(args, "walk_values.png"))
    else:
        raise ValueError("verify supports only 'simple' and 'walk' models")
    failed = False
    for name, ok in checks:
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
        failed |= not ok
    return 1 if failed else 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="pagereg",
        description="Optimal paging/registration policy tools for Markov "
                    "mobility models")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="model config (JSON)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--plot", action="store_true",
                        help="also render figures next to the text outputs")

    sp = sub.add_parser("solve", help="find an individually optimal RCL pair")
    common(sp)
    sp.add_argument("--g0", default="never",
                    help="initial registration RCL: always, never, "
                         "threshold:<d>, or a file path")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("evaluate", help="exact cost of an RCL pair")
    common(sp)
    sp.add_argument("f_file", help="paging RCL file")
    sp.add_argument("g_file", help="registration RCL file")
    sp.add_argument("--mc-cycles", type=int, default=0,
                    help="Monte-Carlo replications for a cross-check")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("trace", help="simulate and export one trajectory")
    common(sp)
    sp.add_argument("f_file", help="paging RCL file")
    sp.add_argument("g_file", help="registration RCL file")
    sp.add_argument("--t-end", type=int, default=40)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("verify", help="check the structural results on a "
                                       "simple or walk model")
    common(sp)
    sp.add_argument("--cap", type=int, default=64,
                    help="belief enumeration cap (simple models)")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ZeroSurvivalMass, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NonConvergence as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
