"""Bundled fixture quivers used by the CLI recipes and throughout the tests."""

import numpy as np

from .network import NeuralNetwork
from .quiver import Quiver
from .rep import DoubleFramedTriple, Representation, split
from .thincat import ThinRep


def quiver_a3() -> Quiver:
    """Three vertices in a line: one source, one hidden, one sink."""
    return Quiver(["i", "j", "k"], [("ij", "i", "j"), ("jk", "j", "k")])


def quiver_single_vertex() -> Quiver:
    """One hidden vertex framed by one source and one sink."""
    return Quiver(["s", "v", "t"], [("f", "s", "v"), ("h", "v", "t")])


def quiver_d4tilde() -> Quiver:
    """Five hidden vertices in the extended-D4 pattern: v1, v2 feed v3, which
    feeds v4, v5; three sources (two shared by v1 and v2, one into v5) and two
    sinks fed by v4 and v5."""
    vertices = ["s1", "s2", "s3", "v1", "v2", "v3", "v4", "v5", "t1", "t2"]
    arrows = [
        ("phi1", "s1", "v1"),
        ("phi2", "s2", "v1"),
        ("psi1", "s1", "v2"),
        ("psi2", "s2", "v2"),
        ("lam", "s3", "v5"),
        ("a", "v1", "v3"),
        ("b", "v2", "v3"),
        ("c", "v3", "v4"),
        ("d", "v3", "v5"),
        ("v_1", "v4", "t1"),
        ("v_2", "v4", "t2"),
        ("w_1", "v5", "t1"),
        ("w_2", "v5", "t2"),
    ]
    return Quiver(vertices, arrows)


def thin_dims(q: Quiver) -> dict:
    return {v: 1 for v in q.vertices}


def d4tilde_triple(a, b, c, d, lam, v, w, phi, psi) -> DoubleFramedTriple:
    """Triple on the extended-D4 quiver from its nine scalar/vector parameters:
    hidden scalars a, b, c, d, lam; sink vectors v, w (length 2); source
    covectors phi, psi (length 2)."""
    q = quiver_d4tilde()
    v, w = np.asarray(v, float).ravel(), np.asarray(w, float).ravel()
    phi, psi = np.asarray(phi, float).ravel(), np.asarray(psi, float).ravel()
    weights = {
        "phi1": phi[0],
        "phi2": phi[1],
        "psi1": psi[0],
        "psi2": psi[1],
        "lam": lam,
        "a": a,
        "b": b,
        "c": c,
        "d": d,
        "v_1": v[0],
        "v_2": v[1],
        "w_1": w[0],
        "w_2": w[1],
    }
    mats = {k: np.array([[float(val)]]) for k, val in weights.items()}
    return split(Representation(q, thin_dims(q), mats))


def d4tilde_template(a, b, c, d, lam, v, w, phi, psi) -> np.ndarray:
    """Closed-form assembled coordinate matrix of the extended-D4 triple:
    [[ac v phi, bc v psi, 0], [ad w phi, bd w psi, lam w]]."""
    v, w = np.asarray(v, float).ravel(), np.asarray(w, float).ravel()
    phi, psi = np.asarray(phi, float).ravel(), np.asarray(psi, float).ravel()
    top = np.hstack([a * c * np.outer(v, phi), b * c * np.outer(v, psi), np.zeros((2, 1))])
    bot = np.hstack([a * d * np.outer(w, phi), b * d * np.outer(w, psi), lam * w.reshape(2, 1)])
    return np.vstack([top, bot])


def single_vertex_net(f, h, activation="relu") -> NeuralNetwork:
    q = Quiver(["s", "v", "t"], [("f", "s", "v"), ("h", "v", "t")], network=True)
    return NeuralNetwork(ThinRep(q, {"f": float(f), "h": float(h)}), {"v": activation})


def d4tilde_net(weights=None, activation="identity", rng=None) -> NeuralNetwork:
    q = quiver_d4tilde()
    qn = Quiver(q.vertices, q.arrows, roles=q.roles, network=True)
    if weights is None:
        if rng is None:
            weights = {a.id: 1.0 for a in qn.arrows}
        else:
            weights = {a.id: float(rng.standard_normal()) for a in qn.arrows}
    acts = {v: activation for v in qn.hidden}
    return NeuralNetwork(ThinRep(qn, weights), acts)


def random_dag_quiver(rng, n_hidden=4, max_frame=2, edge_prob=0.5) -> Quiver:
    """Random acyclic quiver: a DAG on the hidden vertices plus enough source
    and sink arrows that every intended hidden vertex really is hidden."""
    hidden = [f"h{i}" for i in range(n_hidden)]
    arrows = []
    for i in range(n_hidden):
        for j in range(i + 1, n_hidden):
            if rng.random() < edge_prob:
                arrows.append((f"e{i}_{j}", hidden[i], hidden[j]))
    has_in = {v: False for v in hidden}
    has_out = {v: False for v in hidden}
    for _, s, t in arrows:
        has_out[s] = True
        has_in[t] = True
    sources, sinks = [], []
    for i, v in enumerate(hidden):
        n_in = rng.integers(0 if has_in[v] else 1, max_frame + 1)
        for k in range(n_in):
            s = f"src{i}_{k}"
            sources.append(s)
            arrows.append((f"in{i}_{k}", s, v))
        n_out = rng.integers(0 if has_out[v] else 1, max_frame + 1)
        for k in range(n_out):
            s = f"snk{i}_{k}"
            sinks.append(s)
            arrows.append((f"out{i}_{k}", v, s))
    return Quiver(sources + hidden + sinks, arrows)


def random_mlp_net(rng, max_layers=3, max_width=4, activation="tanh", with_bias=True) -> NeuralNetwork:
    """Fully connected layered network quiver with random weights."""
    n_layers = int(rng.integers(1, max_layers + 1))
    widths = [int(rng.integers(1, max_width + 1)) for _ in range(n_layers)]
    n_in = int(rng.integers(1, max_width + 1))
    n_out = int(rng.integers(1, max_width + 1))
    layers = [[f"x{i}" for i in range(n_in)]]
    for li, width in enumerate(widths):
        layers.append([f"l{li}_{i}" for i in range(width)])
    layers.append([f"y{i}" for i in range(n_out)])
    vertices = [v for layer in layers for v in layer]
    arrows = []
    for li in range(len(layers) - 1):
        for sv in layers[li]:
            for tv in layers[li + 1]:
                arrows.append((f"{sv}->{tv}", sv, tv))
    bias = []
    if with_bias:
        for li in range(1, len(layers) - 1):
            bv = f"b{li}"
            vertices.append(bv)
            bias.append(bv)
            for tv in layers[li]:
                arrows.append((f"{bv}->{tv}", bv, tv))
    q = Quiver(vertices, arrows, network=True)
    weights = {a.id: float(rng.standard_normal()) for a in q.arrows}
    acts = {v: activation for v in q.hidden}
    return NeuralNetwork(ThinRep(q, weights), acts, frozenset(bias))
