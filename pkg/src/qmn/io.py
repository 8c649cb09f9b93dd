"""JSON file formats for quivers, representations, and networks.

Quiver:          {"vertices": [...], "arrows": [{"id","from","to"}, ...],
                  "roles": {vertex: "input"|"bias"|"output"|"hidden"}?,
                  "network": bool?}
Representation:  {"dims": {vertex: int}, "weights": {arrow: [[...]] | scalar},
                  "quiver": {...}?}
Network:         representation keys plus {"activations": {vertex: tag},
                  "bias": [vertices]}

Emitted files embed the quiver so they are self-contained; a quiver passed
explicitly takes precedence.
"""

import csv
import json

import numpy as np

from .errors import QmnError
from .network import NeuralNetwork
from .quiver import Quiver
from .rep import Representation
from .thincat import ThinRep


def _load(path_or_obj):
    if isinstance(path_or_obj, dict):
        return path_or_obj
    with open(path_or_obj) as fh:
        return json.load(fh)


def quiver_from_json(obj) -> Quiver:
    obj = _load(obj)
    try:
        arrows = [(a["id"], a["from"], a["to"]) for a in obj["arrows"]]
        return Quiver(obj["vertices"], arrows, roles=obj.get("roles"), network=obj.get("network", False))
    except KeyError as exc:
        raise QmnError(f"malformed quiver file: missing key {exc}") from exc


def quiver_to_json(q: Quiver) -> dict:
    return {
        "vertices": list(q.vertices),
        "arrows": [{"id": a.id, "from": a.source, "to": a.target} for a in q.arrows],
        "roles": dict(q.roles),
        "network": q.network,
    }


def representation_from_json(obj, quiver: Quiver = None) -> Representation:
    obj = _load(obj)
    if quiver is None:
        if "quiver" not in obj:
            raise QmnError("representation file has no embedded quiver and none was supplied")
        quiver = quiver_from_json(obj["quiver"])
    return Representation(quiver, dict(obj["dims"]), dict(obj["weights"]))


def representation_to_json(r: Representation) -> dict:
    weights = {}
    for aid, m in r.matrices.items():
        weights[aid] = float(m[0, 0]) if m.shape == (1, 1) else m.tolist()
    return {"quiver": quiver_to_json(r.quiver), "dims": dict(r.dims), "weights": weights}


def thin_from_json(obj, quiver: Quiver = None) -> ThinRep:
    r = representation_from_json(obj, quiver)
    if not r.is_thin():
        raise QmnError("expected a thin representation (all dimensions 1)")
    return ThinRep(r.quiver, {aid: float(m[0, 0]) for aid, m in r.matrices.items()})


def thin_to_json(t: ThinRep) -> dict:
    return {
        "quiver": quiver_to_json(t.quiver),
        "dims": {v: 1 for v in t.quiver.vertices},
        "weights": dict(t.weights),
    }


def network_from_json(obj, quiver: Quiver = None) -> NeuralNetwork:
    obj = _load(obj)
    if quiver is None:
        if "quiver" not in obj:
            raise QmnError("network file has no embedded quiver and none was supplied")
        qj = dict(obj["quiver"])
        qj["network"] = True
        quiver = quiver_from_json(qj)
    thin = thin_from_json({**obj, "quiver": quiver_to_json(quiver)}, quiver)
    bias = set(obj.get("bias", []))
    bias |= {v for v, r in quiver.roles.items() if r == "bias"}
    activations = dict(obj.get("activations", {}))
    for v in quiver.hidden:
        activations.setdefault(v, "identity")
    return NeuralNetwork(thin, activations, frozenset(bias))


def network_to_json(net: NeuralNetwork) -> dict:
    out = thin_to_json(net.weights)
    out["activations"] = dict(net.activations)
    out["bias"] = sorted(net.bias)
    return out


def load_data_csv(path, n_inputs: int, n_outputs: int):
    """One sample per row: n_inputs feature columns then n_outputs label columns."""
    samples = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or all(not cell.strip() for cell in row):
                continue
            vals = [float(c) for c in row]
            if len(vals) != n_inputs + n_outputs:
                raise QmnError(
                    f"data row has {len(vals)} columns, expected {n_inputs + n_outputs}"
                )
            samples.append((np.array(vals[:n_inputs]), np.array(vals[n_inputs:])))
    return samples
