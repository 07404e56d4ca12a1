"""Benchmark harness: run recipe suites, write artifacts, re-verify them.

A suite config (JSON) lists instance recipes and a solver matrix. For
every recipe x solver cell the runner writes

    instances/<name>.json
    certificates/<name>.json (+ <name>_W.mat.txt)
    traces/<name>__<method>[__<act>__K<k>].csv
    networks/<name>__lista__<act>__K<k>.json
    summary.csv

and counts invariant violations (error above its envelope, compiled
network drifting from the iteration, noiseless run missing the 1e-6
target). The envelope for a row is the larger of the closed-form
prediction and the recursive threshold trace; the two differ only by
the 1e-12-scale threshold floor, and a hair of relative slack (1e-9)
absorbs float noise at plateaus where the measured error touches the
bound. Exit code 0 means zero violations and zero failed recipes.
One failing recipe never suppresses the artifacts of the others.

verify() re-checks everything from the files alone, so any hand edit
of a matrix entry or a trace row is caught.
"""

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .activations import parse_activation, relu
from .coherence import generalized_mutual_coherence, mutual_coherence
from .errors import ConfigError, DscError, MissingArtifact
from .generate import generate_instance
from .io import (read_csv, read_instance, read_json, read_matrix,
                 read_network, schedule_from_obj, write_csv, write_instance,
                 write_json, write_matrix, write_network)
from .lista import lista_general_run
from .network import compile as compile_network
from .network import forward
from .pipeline import solve_layered

DEFAULT_TOLERANCES = {
    "structural": 1e-9,
    "equivalence": 1e-10,
    "coincidence": 1e-6,
}

_SUBDIRS = ("instances", "certificates", "traces", "networks")
_METHODS = ("lista", "ista", "bp", "l0")

SUMMARY_HEADER = ["recipe", "method", "activation", "iterations", "status",
                  "mu", "mu_tilde", "c_hat", "final_err", "violations"]


def _slug(text):
    return "".join(ch if ch.isalnum() or ch in "._-" else "-"
                   for ch in str(text))


class SuiteConfig:
    """Parsed and validated suite description."""

    def __init__(self, recipes, methods, activations, iterations,
                 tolerances=None, gamma=0.1, cert_mode="exact",
                 plots=False, out_dir=None):
        self.recipes = recipes
        self.methods = methods
        self.activations = activations
        self.iterations = iterations
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(tolerances or {})
        self.gamma = float(gamma)
        self.cert_mode = cert_mode
        self.plots = bool(plots)
        self.out_dir = out_dir

    @classmethod
    def from_obj(cls, obj):
        if not isinstance(obj, dict):
            raise ConfigError("suite config must be a JSON object")
        recipes = obj.get("recipes", [])
        if not isinstance(recipes, list):
            raise ConfigError("recipes must be a list", "recipes")
        seen_names = set()
        seen_seeds = set()
        for i, rec in enumerate(recipes):
            where = "recipes[%d]" % i
            if not isinstance(rec, dict):
                raise ConfigError("recipe must be an object", where)
            name = rec.get("name")
            if not name or _slug(name) != name:
                raise ConfigError(
                    "recipe needs a filesystem-safe name", where + ".name")
            if name in seen_names:
                raise ConfigError("duplicate recipe name %r" % name,
                                  where + ".name")
            seen_names.add(name)
            shape = rec.get("shape")
            if (not isinstance(shape, list) or not shape
                    or any(len(pair) != 2 for pair in shape)):
                raise ConfigError("shape must be a list of [rows, cols]",
                                  where + ".shape")
            lam = rec.get("lambda")
            if not isinstance(lam, list) or len(lam) != len(shape):
                raise ConfigError("lambda must list one budget per layer",
                                  where + ".lambda")
            if float(rec.get("B", 1.0)) <= 0:
                raise ConfigError("B must be positive", where + ".B")
            if rec.get("mode", "exact-chain") not in ("exact-chain",
                                                      "tolerance-chain"):
                raise ConfigError("unknown mode", where + ".mode")
            if float(rec.get("noise0_norm", 0.0)) < 0:
                raise ConfigError("noise0_norm must be nonnegative",
                                  where + ".noise0_norm")
            seed = rec.get("seed")
            if not isinstance(seed, int):
                raise ConfigError("seed must be an integer", where + ".seed")
            if seed in seen_seeds:
                raise ConfigError("seed %d reused across recipes" % seed,
                                  where + ".seed")
            seen_seeds.add(seed)
        solvers = obj.get("solvers", {})
        methods = solvers.get("methods", ["lista"])
        for m in methods:
            if m not in _METHODS:
                raise ConfigError("unknown method %r" % m, "solvers.methods")
        activations = solvers.get("activations", ["relu"])
        for a in activations:
            parse_activation(a)
        iterations = [int(k) for k in solvers.get("iterations", [30])]
        if any(k < 0 for k in iterations):
            raise ConfigError("iteration counts must be nonnegative",
                              "solvers.iterations")
        tolerances = obj.get("tolerances", {})
        for key, val in tolerances.items():
            if key not in DEFAULT_TOLERANCES or float(val) <= 0:
                raise ConfigError("bad tolerance override %r" % key,
                                  "tolerances." + str(key))
        return cls(recipes=recipes, methods=list(methods),
                   activations=list(activations), iterations=iterations,
                   tolerances=tolerances,
                   gamma=float(obj.get("gamma", 0.1)),
                   cert_mode=obj.get("cert_mode", "exact"),
                   plots=bool(obj.get("plots", False)),
                   out_dir=obj.get("out_dir"))

    @classmethod
    def from_file(cls, path):
        return cls.from_obj(read_json(path))

    def combos(self):
        out = []
        for m in self.methods:
            if m == "lista":
                out.extend((m, a, k) for a in self.activations
                           for k in self.iterations)
            elif m == "ista":
                out.extend((m, "-", k) for k in self.iterations)
            else:
                out.append((m, "-", 0))
        return out


def _write_svg(path, errs):
    """Minimal log10-error-vs-k polyline, no plotting dependency."""
    w, h, pad = 480, 320, 42
    ys = [math.log10(max(float(e), 1e-17)) for e in errs]
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0
    pts = []
    for i, v in enumerate(ys):
        px = pad + (w - 2 * pad) * (i / max(len(ys) - 1, 1))
        py = pad + (h - 2 * pad) * (1.0 - (v - lo) / span)
        pts.append("%.1f,%.1f" % (px, py))
    with open(path, "w") as fh:
        fh.write('<svg xmlns="http://www.w3.org/2000/svg" '
                 'width="%d" height="%d">\n' % (w, h))
        fh.write('<rect width="%d" height="%d" fill="white"/>\n' % (w, h))
        fh.write('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>\n'
                 % (pad, h - pad, w - pad, h - pad))
        fh.write('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>\n'
                 % (pad, pad, pad, h - pad))
        fh.write('<polyline points="%s" fill="none" stroke="steelblue"/>\n'
                 % " ".join(pts))
        fh.write('<text x="%d" y="16" font-size="12">log10 error vs k'
                 '</text>\n' % pad)
        fh.write("</svg>\n")


def _rel_dev(got, ref):
    num = float(np.linalg.norm(np.asarray(got) - np.asarray(ref)))
    den = max(float(np.linalg.norm(ref)), 1e-30)
    return num / den


def _run_id(name, method, act, k):
    if method == "lista":
        return "%s__lista__%s__K%d" % (name, _slug(act), k)
    if method == "ista":
        return "%s__ista__K%d" % (name, k)
    return "%s__%s" % (name, method)


def _failed_row(name, method, act, k, exc):
    label = "failed(%s)" % type(exc).__name__
    return [name, method, act, k, label, "", "", "", "", 0]


def _run_recipe(config, recipe, out):
    """All artifacts and summary rows for one recipe.

    Returns (rows, violations, failures, messages).
    """
    name = recipe["name"]
    rows = []
    violations = 0
    failures = 0
    messages = []
    try:
        inst = generate_instance(
            shape=recipe["shape"], lam=recipe["lambda"],
            B=float(recipe.get("B", 1.0)),
            mode=recipe.get("mode", "exact-chain"),
            noise0_norm=float(recipe.get("noise0_norm", 0.0)),
            seed=int(recipe["seed"]),
            ensemble=recipe.get("ensemble", "gaussian"))
        write_instance(os.path.join(out, "instances", name + ".json"), inst)
        cert = generalized_mutual_coherence(inst.dicts[1],
                                            mode=config.cert_mode)
        w_file = name + "_W.mat.txt"
        write_matrix(os.path.join(out, "certificates", w_file), cert.w)
        write_json(os.path.join(out, "certificates", name + ".json"),
                   {"format": "coherence-certificate", "mu": cert.mu,
                    "mu_tilde": cert.mu_tilde, "C_W": cert.c_w,
                    "w_file": w_file})
    except (DscError, ValueError) as exc:
        messages.append("%s: %s" % (name, exc))
        return ([_failed_row(name, "-", "-", 0, exc)], 0, 1, messages)

    noiseless = (all(e == 0 for e in inst.eps)
                 and (inst.noise0 is None
                      or float(np.linalg.norm(inst.noise0)) == 0))
    eq_tol = config.tolerances["equivalence"]
    certs = [cert] + [None] * (inst.depth - 1)

    for method, act, k in config.combos():
        run_id = _run_id(name, method, act, k)
        act_obj = parse_activation(act) if act != "-" else relu()
        bad = 0
        c_hat = ""
        final_err = ""
        try:
            run = solve_layered(inst, method, K=k, activation=act_obj,
                                gamma=config.gamma, mode=config.cert_mode,
                                certificates=certs if method == "lista"
                                else None)
            trace_path = os.path.join(out, "traces", run_id + ".csv")
            if method == "lista":
                trows = []
                for j in range(1, inst.depth + 1):
                    errs = run.errors[j - 1]
                    sched = run.schedules[j - 1]
                    env = run.envelopes[j - 1]
                    truth_j = inst.truth[j - 1].values
                    for step in range(k + 1):
                        theta = (sched.theta_list[min(step,
                                                      max(k - 1, 0))]
                                 if sched.theta_list else "")
                        l1 = float(np.abs(run.iterates[j - 1][step]
                                          - truth_j).sum())
                        trows.append([step, j, errs[step], l1,
                                      sched.s_hat_trace[step], theta,
                                      env[step]])
                        envelope = max(env[step],
                                       sched.s_hat_trace[step])
                        if errs[step] > envelope * (1.0 + 1e-9):
                            bad += 1
                write_csv(trace_path,
                          ["k", "layer", "err_l2", "err_l1", "s_hat",
                           "theta", "bound"], trows)
                final_err = run.errors[-1][-1]
                if noiseless and k >= 30 and final_err >= 1e-6:
                    bad += 1
                if run.rates[0] is not None:
                    c_hat = run.rates[0][0]
                net = compile_network(run.schedules[0], inst.dicts[1])
                write_network(os.path.join(out, "networks",
                                           run_id + ".json"),
                              net, schedule=run.schedules[0],
                              dictionary=inst.dicts[1])
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    out_net = forward(net, inst.y)
                if _rel_dev(out_net, run.iterates[0][-1]) > eq_tol:
                    bad += 1
                if config.plots:
                    _write_svg(os.path.join(out, "plots",
                                            run_id + ".svg"),
                               run.errors[0])
            elif method == "ista":
                trows = []
                for j in range(1, inst.depth + 1):
                    errs = run.errors[j - 1]
                    for step, e in enumerate(errs):
                        trows.append([step, j, e])
                write_csv(trace_path, ["k", "layer", "err_l2"], trows)
                final_err = run.errors[-1][-1]
            else:
                trows = [[0, j, run.errors[j - 1][-1],
                          run.residuals[j - 1]]
                         for j in range(1, inst.depth + 1)]
                write_csv(trace_path,
                          ["k", "layer", "err_l2", "residual"], trows)
                final_err = run.errors[-1][-1]
            rows.append([name, method, act, k, "ok", cert.mu,
                         cert.mu_tilde, c_hat, final_err, bad])
            violations += bad
        except (DscError, ValueError) as exc:
            messages.append("%s: %s" % (run_id, exc))
            rows.append(_failed_row(name, method, act, k, exc))
            failures += 1
    return rows, violations, failures, messages


def run_suite(config, out_dir=None, threads=1):
    """Execute every recipe; returns (exit_code, report dict)."""
    if isinstance(config, str):
        config = SuiteConfig.from_file(config)
    elif isinstance(config, dict):
        config = SuiteConfig.from_obj(config)
    out = out_dir or config.out_dir
    if not out:
        raise ConfigError("no output directory given", "out_dir")
    os.makedirs(out, exist_ok=True)
    for sub in _SUBDIRS:
        os.makedirs(os.path.join(out, sub), exist_ok=True)
    if config.plots:
        os.makedirs(os.path.join(out, "plots"), exist_ok=True)

    if threads > 1 and len(config.recipes) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(
                lambda rec: _run_recipe(config, rec, out), config.recipes))
    else:
        results = [_run_recipe(config, rec, out) for rec in config.recipes]

    rows = []
    violations = 0
    failures = 0
    messages = []
    for rrows, rviol, rfail, rmsg in results:
        rows.extend(rrows)
        violations += rviol
        failures += rfail
        messages.extend(rmsg)
    write_csv(os.path.join(out, "summary.csv"), SUMMARY_HEADER, rows)
    code = 0 if violations == 0 and failures == 0 else 1
    return code, {"rows": len(rows), "violations": violations,
                  "failures": failures, "messages": messages}


def verify(paths, tolerances=None):
    """Re-check every recorded invariant from disk artifacts alone."""
    out = paths
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    if not os.path.isdir(out) or not os.listdir(out):
        raise MissingArtifact("no artifacts under %r" % out)
    summary_path = os.path.join(out, "summary.csv")
    if not os.path.exists(summary_path):
        raise MissingArtifact("no summary.csv under %r" % out)
    header, srows = read_csv(summary_path)
    problems = []
    checked = 0

    instances = {}
    inst_dir = os.path.join(out, "instances")
    for fname in sorted(os.listdir(inst_dir)) if os.path.isdir(inst_dir) \
            else []:
        if not fname.endswith(".json"):
            continue
        name = fname[:-len(".json")]
        try:
            instances[name] = read_instance(os.path.join(inst_dir, fname))
        except (DscError, ValueError) as exc:
            problems.append("instance %s: %s" % (name, exc))
        checked += 1

    cert_dir = os.path.join(out, "certificates")
    for fname in sorted(os.listdir(cert_dir)) if os.path.isdir(cert_dir) \
            else []:
        if not fname.endswith(".json"):
            continue
        name = fname[:-len(".json")]
        obj = read_json(os.path.join(cert_dir, fname))
        inst = instances.get(name)
        if inst is None:
            problems.append("certificate %s has no instance" % name)
            continue
        W = read_matrix(os.path.join(cert_dir, obj["w_file"]))
        D = inst.dicts[1].data
        G = W.T @ D
        gate = 1e-7
        if np.abs(np.diag(G) - 1.0).max() > gate:
            problems.append("certificate %s: W'D diagonal off 1" % name)
        off = np.abs(G - np.diag(np.diag(G))).max() if G.shape[1] > 1 else 0.0
        if off > obj["mu_tilde"] + gate:
            problems.append("certificate %s: off-diagonal exceeds mu_tilde"
                            % name)
        if abs(float(np.abs(W).max()) - obj["C_W"]) > 1e-9:
            problems.append("certificate %s: C_W mismatch" % name)
        if abs(mutual_coherence(D) - obj["mu"]) > 1e-9:
            problems.append("certificate %s: mu mismatch" % name)
        checked += 1

    net_dir = os.path.join(out, "networks")
    for fname in sorted(os.listdir(net_dir)) if os.path.isdir(net_dir) \
            else []:
        if not fname.endswith(".json"):
            continue
        run_id = fname[:-len(".json")]
        name = run_id.split("__")[0]
        inst = instances.get(name)
        if inst is None:
            problems.append("network %s has no instance" % run_id)
            continue
        net, sched_obj = read_network(os.path.join(net_dir, fname))
        if sched_obj is None:
            problems.append("network %s carries no schedule" % run_id)
            continue
        schedule, D_embed = schedule_from_obj(sched_obj)
        D = D_embed if D_embed is not None else inst.dicts[1]
        traj = lista_general_run(schedule, D, inst.y)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            outs = forward(net, inst.y, return_stages=True)
        dev = max((_rel_dev(outs[i], traj[i + 1])
                   for i in range(len(outs))), default=0.0)
        if dev > tol["equivalence"]:
            problems.append("network %s deviates %.3g from the iteration"
                            % (run_id, dev))
        checked += 1

    trace_dir = os.path.join(out, "traces")
    for fname in sorted(os.listdir(trace_dir)) if os.path.isdir(trace_dir) \
            else []:
        if "__lista__" not in fname or not fname.endswith(".csv"):
            continue
        thead, trows = read_csv(os.path.join(trace_dir, fname))
        col = {c: i for i, c in enumerate(thead)}
        for row in trows:
            err = float(row[col["err_l2"]])
            envelope = max(float(row[col["bound"]]),
                           float(row[col["s_hat"]]))
            if err > envelope * (1.0 + 1e-9):
                problems.append("trace %s: error above its envelope"
                                % fname)
                break
        checked += 1

    col = {c: i for i, c in enumerate(header)}
    for row in srows:
        if row[col["status"]] != "ok":
            problems.append("summary row %s/%s marked %s"
                            % (row[col["recipe"]], row[col["method"]],
                               row[col["status"]]))
        elif row[col["violations"]] != "0":
            problems.append("summary row %s/%s recorded violations"
                            % (row[col["recipe"]], row[col["method"]]))
    checked += len(srows)

    return {"checked": checked, "problems": problems,
            "clean": not problems}
