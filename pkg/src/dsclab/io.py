"""File formats: text matrices, JSON artifacts, deterministic CSV.

* matrix text (.mat.txt): first line "rows cols", then one row per
  line, space separated, 17 significant digits (%.17g), which
  round-trips IEEE doubles exactly;
* instance / schedule / network files: JSON (json's float repr is also
  exact);
* CSV: all floats printed with %.17g so repeated runs are
  byte-identical.
"""

import json
import os

import numpy as np

from .activations import Activation
from .errors import MissingArtifact, ShapeMismatch
from .lista import ListaSchedule
from .model import Dictionary, DscInstance, LayeredDictionary, SignalClass
from .network import AffineNetwork, Stage

FLOAT_FMT = "%.17g"


def format_float(v):
    return FLOAT_FMT % float(v)


def write_matrix(path, A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    with open(path, "w") as fh:
        fh.write("%d %d\n" % A.shape)
        for row in A:
            fh.write(" ".join(FLOAT_FMT % v for v in row) + "\n")


def read_matrix(path):
    if not os.path.exists(path):
        raise MissingArtifact("no matrix file at %s" % path)
    with open(path) as fh:
        first = fh.readline().split()
        if len(first) != 2:
            raise ShapeMismatch("matrix header must be 'rows cols'")
        try:
            rows, cols = int(first[0]), int(first[1])
        except ValueError:
            raise ShapeMismatch("matrix header must be 'rows cols'")
        data = [[float(v) for v in fh.readline().split()]
                for _ in range(rows)]
    if any(len(r) != cols for r in data):
        raise ShapeMismatch("matrix body does not match its header")
    return np.array(data, dtype=float).reshape(rows, cols)


def write_csv(path, header, rows):
    """All floats at 17 significant digits; ints and strings verbatim."""

    def cell(v):
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return FLOAT_FMT % float(v)
        return str(v)

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(v) for v in row) + "\n")


def read_csv(path):
    if not os.path.exists(path):
        raise MissingArtifact("no csv file at %s" % path)
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise MissingArtifact("empty csv at %s" % path)
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_json(path):
    if not os.path.exists(path):
        raise MissingArtifact("no file at %s" % path)
    with open(path) as fh:
        return json.load(fh)


def write_instance(path, inst, matrix_files=False):
    """Serialize an instance; matrices inline or as sibling .mat.txt."""
    J = inst.depth
    dims = inst.dicts.dims()
    obj = {
        "format": "dsc-instance",
        "shape": [[dims[j - 1], dims[j]] for j in range(1, J + 1)],
        "lambda": list(inst.lam),
        "eps": list(inst.eps),
        "seed": inst.seed,
        "mode": inst.mode,
        "y": inst.y.tolist(),
        "truth": ([c.values.tolist() for c in inst.truth]
                  if inst.truth is not None else None),
        "noise0": (inst.noise0.tolist() if inst.noise0 is not None
                   else None),
    }
    if matrix_files:
        base = os.path.splitext(path)[0]
        refs = []
        for j in range(1, J + 1):
            name = "%s_D%d.mat.txt" % (os.path.basename(base), j)
            write_matrix(os.path.join(os.path.dirname(path) or ".", name),
                         inst.dicts[j].data)
            refs.append(name)
        obj["matrices"] = refs
    else:
        obj["matrices"] = [inst.dicts[j].data.tolist()
                           for j in range(1, J + 1)]
    write_json(path, obj)


def read_instance(path):
    obj = read_json(path)
    if obj.get("format") != "dsc-instance":
        raise ShapeMismatch("%s is not an instance file" % path)
    layers = []
    for entry in obj["matrices"]:
        if isinstance(entry, str):
            layers.append(Dictionary(read_matrix(
                os.path.join(os.path.dirname(path) or ".", entry))))
        else:
            layers.append(Dictionary(np.array(entry, dtype=float)))
    truth = obj.get("truth")
    noise0 = obj.get("noise0")
    return DscInstance(
        y=np.array(obj["y"], dtype=float),
        dicts=LayeredDictionary(layers),
        lam=obj["lambda"],
        eps=obj["eps"],
        truth=([np.array(t, dtype=float) for t in truth]
               if truth is not None else None),
        noise0=(np.array(noise0, dtype=float) if noise0 is not None
                else None),
        seed=obj.get("seed"),
        mode=obj.get("mode"))


def _activation_obj(act):
    return {"kind": act.kind, "beta": act.beta, "L": act.L, "m": act.m}


def _activation_from(obj):
    return Activation(kind=obj["kind"], beta=obj["beta"], L=obj["L"],
                      m=int(obj["m"]))


def schedule_to_obj(schedule, dictionary=None):
    obj = {
        "format": "lista-schedule",
        "iterations": schedule.iterations,
        "signal_class": {"B": schedule.signal_class.B,
                         "s": schedule.signal_class.s,
                         "delta": schedule.signal_class.delta},
        "mu_tilde": schedule.mu_tilde,
        "c_w": schedule.c_w,
        "activation": _activation_obj(schedule.activation),
        "theta": list(schedule.theta_list),
        "s_hat": list(schedule.s_hat_trace),
        "w": (schedule.w_list[0].tolist() if schedule.iterations
              else []),
    }
    if dictionary is not None:
        data = (dictionary.data if isinstance(dictionary, Dictionary)
                else np.asarray(dictionary, dtype=float))
        obj["dictionary"] = data.tolist()
    return obj


def schedule_from_obj(obj):
    """Returns (schedule, dictionary-or-None)."""
    if obj.get("format") != "lista-schedule":
        raise ShapeMismatch("not a schedule object")
    K = int(obj["iterations"])
    sc = obj["signal_class"]
    W = np.array(obj["w"], dtype=float)
    W.setflags(write=False)
    schedule = ListaSchedule(
        w_list=(W,) * K,
        theta_list=tuple(float(t) for t in obj["theta"]),
        signal_class=SignalClass(B=sc["B"], s=int(sc["s"]),
                                 delta=sc["delta"]),
        mu_tilde=float(obj["mu_tilde"]),
        c_w=float(obj["c_w"]),
        s_hat_trace=tuple(float(v) for v in obj["s_hat"]),
        activation=_activation_from(obj["activation"]))
    D = obj.get("dictionary")
    return schedule, (Dictionary(np.array(D, dtype=float))
                      if D is not None else None)


def write_schedule(path, schedule, dictionary=None):
    write_json(path, schedule_to_obj(schedule, dictionary=dictionary))


def read_schedule(path):
    return schedule_from_obj(read_json(path))


def write_network(path, net, schedule=None, dictionary=None):
    """Dense stage blocks as JSON; optionally embeds the schedule."""
    obj = {
        "format": "affine-network",
        "input_dim": net.input_dim,
        "code_dim": net.code_dim,
        "carry_bound": net.carry_bound,
        "activation": (_activation_obj(net.stages[0].activation)
                       if net.stages else _activation_obj(
                           Activation(kind="relu"))),
        "stages": [{"A": st.A.tolist(), "B": st.B.tolist(),
                    "c": st.c.tolist(), "e": st.e.tolist()}
                   for st in net.stages],
    }
    if schedule is not None:
        obj["schedule"] = schedule_to_obj(schedule, dictionary=dictionary)
    write_json(path, obj)


def read_network(path):
    obj = read_json(path)
    if obj.get("format") != "affine-network":
        raise ShapeMismatch("%s is not a network file" % path)
    act = _activation_from(obj["activation"])
    stages = tuple(
        Stage(A=np.array(st["A"], dtype=float),
              B=np.array(st["B"], dtype=float),
              c=np.array(st["c"], dtype=float),
              e=np.array(st["e"], dtype=float),
              activation=act)
        for st in obj["stages"])
    net = AffineNetwork(stages=stages, input_dim=int(obj["input_dim"]),
                        code_dim=int(obj["code_dim"]),
                        carry_bound=float(obj["carry_bound"]))
    return net, obj.get("schedule")
