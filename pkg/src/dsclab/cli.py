"""The `dsc-lab` command line tool.

Subcommands: gen, coherence, certify, solve, lista, compile,
verify-net, bench, verify. Exit code 0 means every checked invariant
held; anything else is nonzero. All CSV output uses 17 significant
digits so repeated runs diff clean.
"""

import argparse
import math
import sys
import warnings

import numpy as np

from .activations import parse_activation
from .coherence import generalized_mutual_coherence, mutual_coherence
from .errors import DscError, MissingTruth
from .generate import generate_instance
from .guarantees import check_uniqueness, corollary_bounds, stability_ledger
from .io import (read_instance, read_matrix, read_network, read_schedule,
                 schedule_from_obj, write_csv, write_instance, write_json,
                 write_matrix, write_network, write_schedule)
from .lista import compute_schedule, lista_general_run, predicted_error
from .model import SignalClass
from .network import compile as compile_network
from .network import forward
from .pipeline import solve_layered
from .pursuit import cosparsity_solve
from .rng import make_generator
from .suite import _rel_dev, run_suite
from .suite import verify as verify_artifacts


def _int_list(text):
    return [int(v) for v in text.split(",") if v != ""]


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--tol-structural", type=float, default=1e-9)
    common.add_argument("--tol-equivalence", type=float, default=1e-10)
    common.add_argument("--tol-coincidence", type=float, default=1e-6)

    parser = argparse.ArgumentParser(
        prog="dsc-lab",
        description="layered sparse coding laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a reproducible instance")
    p.add_argument("--dims", required=True, type=_int_list,
                   help="comma separated d_0,d_1,...,d_J")
    p.add_argument("--lam", required=True, type=_int_list,
                   help="comma separated per-layer budgets")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--mode", choices=["exact-chain", "tolerance-chain"],
                   default="exact-chain")
    p.add_argument("--noise0-norm", type=float, default=0.0)
    p.add_argument("--ensemble", default="gaussian")
    p.add_argument("--out", required=True)

    p = sub.add_parser("coherence", parents=[common],
                       help="coherence certificate for a dictionary")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=["exact", "fast"], default="exact")
    p.add_argument("--out", required=True)

    p = sub.add_parser("certify", parents=[common],
                       help="bundle coherence, uniqueness and stability")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", parents=[common],
                       help="solve all layers with one method")
    p.add_argument("--method", required=True,
                   choices=["bp", "ista", "l0", "cosparse"])
    p.add_argument("--instance", required=True)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("lista", parents=[common],
                       help="run the unrolled encoder on layer 1")
    p.add_argument("--instance", required=True)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--mode", choices=["exact", "fast"], default="exact")
    p.add_argument("--activation", default="relu")
    p.add_argument("--trace", required=True)
    p.add_argument("--out-schedule", default=None)

    p = sub.add_parser("compile", parents=[common],
                       help="compile a schedule into an affine network")
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify-net", parents=[common],
                       help="compare compiled and iterative encoders")
    p.add_argument("--net", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("bench", parents=[common],
                       help="run a suite config and write artifacts")
    p.add_argument("--suite", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="re-check invariants of a results directory")
    p.add_argument("--out", required=True)

    return parser


def _cmd_gen(args):
    dims = args.dims
    if len(dims) < 2:
        raise ValueError("--dims needs at least d_0,d_1")
    shape = [(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]
    inst = generate_instance(shape=shape, lam=args.lam, B=args.B,
                             mode=args.mode,
                             noise0_norm=args.noise0_norm,
                             seed=args.seed, ensemble=args.ensemble)
    write_instance(args.out, inst)
    print("wrote %s (J=%d, seed=%d)" % (args.out, inst.depth, args.seed))
    return 0


def _cmd_coherence(args):
    D = read_matrix(args.infile)
    cert = generalized_mutual_coherence(D, mode=args.mode)
    w_file = args.out.rsplit(".json", 1)[0] + "_W.mat.txt"
    write_matrix(w_file, cert.w)
    write_json(args.out, {"format": "coherence-certificate",
                          "mu": cert.mu, "mu_tilde": cert.mu_tilde,
                          "C_W": cert.c_w, "w_file": w_file})
    print("mu=%.17g mu_tilde=%.17g C_W=%.17g"
          % (cert.mu, cert.mu_tilde, cert.c_w))
    return 0


def _cmd_certify(args):
    inst = read_instance(args.instance)
    mus = [mutual_coherence(inst.dicts[j].data)
           if inst.dicts[j].cols >= 2 else 0.0
           for j in range(1, inst.depth + 1)]
    bundle = {"format": "certify-bundle", "mu": mus}
    try:
        rep = check_uniqueness(inst, mus)
        bundle["uniqueness"] = {"bounds": list(rep.bounds),
                                "counts": list(rep.counts),
                                "verdicts": list(rep.verdicts),
                                "overall": rep.overall}
    except (DscError, ValueError):
        bundle["uniqueness"] = None
    eps0 = (float(np.linalg.norm(inst.noise0))
            if inst.noise0 is not None else float(inst.eps[0]))
    ledger = stability_ledger(eps0, inst.eps, inst.lam, mus)
    bundle["ledger"] = {"delta": list(ledger.delta),
                        "feasible": list(ledger.feasible)}
    cor = corollary_bounds(eps0, inst.eps, inst.lam, mus)
    bundle["corollaries"] = {k: list(v) for k, v in cor.items()}
    write_json(args.out, bundle)
    print("wrote %s (overall uniqueness: %s)"
          % (args.out, bundle["uniqueness"] and
             bundle["uniqueness"]["overall"]))
    return 0


def _cmd_solve(args):
    inst = read_instance(args.instance)
    if args.method == "cosparse":
        if inst.truth is None:
            raise MissingTruth("cosparse needs the planted supports")
        supports = [list(c.support) for c in inst.truth]
        res = cosparsity_solve(inst.dicts, inst.y, supports)
        codes = [c.values for c in res.codes]
        obj = {"format": "solve-result", "method": "cosparse",
               "null_dim": res.null_dim,
               "empty_null_space": res.empty_null_space,
               "codes": [c.tolist() for c in codes]}
        resid = [float(np.linalg.norm(
            (inst.y if j == 0 else codes[j - 1])
            - inst.dicts[j + 1].data @ codes[j]))
            for j in range(inst.depth)]
        obj["residuals"] = resid
    else:
        run = solve_layered(inst, args.method, K=args.iters,
                            gamma=args.gamma)
        obj = {"format": "solve-result", "method": args.method,
               "iterations": run.iterations,
               "codes": [c.values.tolist() for c in run.codes],
               "residuals": list(run.residuals),
               "errors": ([list(e) for e in run.errors]
                          if run.errors[0] is not None else None)}
        resid = run.residuals
    write_json(args.out, obj)
    print("wrote %s (max residual %.3e)" % (args.out, max(resid)))
    return 0


def _lista_signal_class(inst):
    truth_1 = inst.truth[0].values if inst.truth is not None else None
    if truth_1 is not None and np.any(truth_1 != 0):
        B = float(np.abs(truth_1).max())
    else:
        B = max(float(np.abs(inst.dicts[1].data.T @ inst.y).max()), 1e-12)
    if inst.noise0 is not None:
        delta = float(np.abs(inst.noise0).sum())
    else:
        delta = math.sqrt(inst.dicts[1].rows) * inst.eps[0]
    return SignalClass(B=B, s=inst.lam[0], delta=delta)


def _cmd_lista(args):
    inst = read_instance(args.instance)
    if inst.truth is None:
        raise MissingTruth("the trace's error columns need planted codes")
    act = parse_activation(args.activation)
    D = inst.dicts[1]
    K = args.iters
    sched = compute_schedule(D, _lista_signal_class(inst), K,
                             mode=args.mode, activation=act)
    traj = lista_general_run(sched, D, inst.y)
    x_true = inst.truth[0].values
    rows = []
    for k in range(K + 1):
        theta = (sched.theta_list[min(k, K - 1)] if K else "")
        rows.append([
            k,
            float(np.linalg.norm(traj[k] - x_true)),
            float(np.abs(traj[k] - x_true).sum()),
            sched.s_hat_trace[k],
            theta,
            predicted_error(sched, act, k)[1],
        ])
    write_csv(args.trace, ["k", "err_l2", "err_l1", "s_hat", "theta",
                           "bound"], rows)
    if args.out_schedule:
        write_schedule(args.out_schedule, sched, dictionary=D)
    print("wrote %s (final err_l2 %.3e)" % (args.trace, rows[-1][1]))
    return 0


def _cmd_compile(args):
    sched, D = read_schedule(args.schedule)
    if D is None:
        raise ValueError(
            "%s does not embed its dictionary; regenerate it with "
            "`dsc-lab lista --out-schedule`" % args.schedule)
    net = compile_network(sched, D)
    write_network(args.out, net, schedule=sched, dictionary=D)
    print("wrote %s (%d stages, state dims %s)"
          % (args.out, len(net.stages), net.state_dims))
    return 0


def _cmd_verify_net(args):
    net, sched_obj = read_network(args.net)
    inst = read_instance(args.instance)
    if sched_obj is None:
        raise ValueError("%s carries no schedule to replay" % args.net)
    sched, D = schedule_from_obj(sched_obj)
    if D is None:
        D = inst.dicts[1]
    klass = sched.signal_class
    rng = make_generator(args.seed)
    worst = 0.0
    for trial in range(args.trials):
        if trial == 0:
            y = inst.y
        else:
            x = np.zeros(D.cols)
            supp = rng.permutation(D.cols)[:klass.s]
            mags = rng.uniform(klass.B / 2.0, klass.B, size=klass.s)
            signs = rng.integers(0, 2, size=klass.s) * 2.0 - 1.0
            x[supp] = mags * signs
            y = D.data @ x
            if klass.delta > 0:
                noise = rng.standard_normal(D.rows)
                y = y + noise * (klass.delta / np.abs(noise).sum())
        traj = lista_general_run(sched, D, y)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            outs = forward(net, y, return_stages=True)
        for i, out in enumerate(outs):
            worst = max(worst, _rel_dev(out, traj[i + 1]))
    print("max relative deviation over %d trials: %.3e"
          % (args.trials, worst))
    return 0 if worst <= args.tol_equivalence else 1


def _cmd_bench(args):
    code, report = run_suite(args.suite, out_dir=args.out,
                             threads=args.threads)
    for msg in report["messages"]:
        print("recipe error: %s" % msg, file=sys.stderr)
    print("rows=%d violations=%d failures=%d"
          % (report["rows"], report["violations"], report["failures"]))
    return code


def _cmd_verify(args):
    report = verify_artifacts(args.out, tolerances={
        "structural": args.tol_structural,
        "equivalence": args.tol_equivalence,
        "coincidence": args.tol_coincidence,
    })
    for problem in report["problems"]:
        print("problem: %s" % problem, file=sys.stderr)
    print("checked=%d problems=%d" % (report["checked"],
                                      len(report["problems"])))
    return 0 if report["clean"] else 1


_DISPATCH = {
    "gen": _cmd_gen,
    "coherence": _cmd_coherence,
    "certify": _cmd_certify,
    "solve": _cmd_solve,
    "lista": _cmd_lista,
    "compile": _cmd_compile,
    "verify-net": _cmd_verify_net,
    "bench": _cmd_bench,
    "verify": _cmd_verify,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (DscError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
