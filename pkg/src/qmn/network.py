"""Neural-network semantics on quivers: forward evaluation, the linear operator
attached to a gauge orbit, and the knowledge map.

A network is a thin representation on a quiver without parallel arrows plus an
activation tag per hidden vertex.  Sources split into input and bias vertices;
bias vertices always emit 1.  Sinks sum their incoming terms with no
activation applied.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch, SingularPreActivation, UnframableArrow
from .moduli import ModuliPoint, project
from .quiver import Quiver
from .rep import DoubleFramedTriple, Representation
from .thincat import ThinRep

PREACT_TOL = 1e-12


@dataclass(frozen=True)
class Activation:
    name: str
    fn: object
    dfn: object


def _relu(z):
    return z if z > 0.0 else 0.0


def _drelu(z):
    # subgradient 0 at the kink
    return 1.0 if z > 0.0 else 0.0


def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


ACTIVATIONS = {
    "identity": Activation("identity", lambda z: z, lambda z: 1.0),
    "relu": Activation("relu", _relu, _drelu),
    "tanh": Activation("tanh", math.tanh, lambda z: 1.0 - math.tanh(z) ** 2),
    "sigmoid": Activation("sigmoid", _sigmoid, lambda z: _sigmoid(z) * (1.0 - _sigmoid(z))),
}


@dataclass
class NeuralNetwork:
    weights: ThinRep
    activations: dict
    bias: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        q = self.quiver
        pairs = {(a.source, a.target) for a in q.arrows}
        if len(pairs) != len(q.arrows):
            raise ShapeMismatch("network quivers do not allow parallel arrows")
        if q.direct_source_sink_arrows():
            raise UnframableArrow("network quivers may not connect a source directly to a sink")
        self.bias = frozenset(self.bias)
        if not self.bias <= set(q.sources):
            raise ShapeMismatch("bias vertices must be sources")
        for v in q.hidden:
            tag = self.activations.get(v)
            if tag not in ACTIVATIONS:
                raise ShapeMismatch(f"vertex {v!r} has unknown activation {tag!r}")

    @property
    def quiver(self):
        return self.weights.quiver

    @property
    def input_vertices(self):
        return tuple(v for v in self.quiver.sources if v not in self.bias)

    @property
    def output_vertices(self):
        return self.quiver.sinks


@dataclass
class ForwardTrace:
    values: dict  # post-activation value per vertex
    pre: dict  # pre-activation per non-source vertex


def forward(net: NeuralNetwork, x) -> tuple:
    """Propagate x through the network in topological order.

    Returns (outputs at sinks in declaration order, trace of all vertex values).
    """
    q = net.quiver
    x = np.asarray(x, dtype=float).ravel()
    inputs = net.input_vertices
    if x.shape[0] != len(inputs):
        raise ShapeMismatch(f"expected {len(inputs)} inputs, got {x.shape[0]}")
    xval = dict(zip(inputs, x))
    values, pre = {}, {}
    hidden = set(q.hidden)
    for v in q.topological:
        if v in net.bias:
            values[v] = 1.0
        elif v in xval:
            values[v] = xval[v]
        else:
            z = sum(net.weights.weights[a.id] * values[a.source] for a in q.arrows_into(v))
            pre[v] = z
            values[v] = ACTIVATIONS[net.activations[v]].fn(z) if v in hidden else z
    out = np.array([values[v] for v in q.sinks])
    return out, ForwardTrace(values=values, pre=pre)


def linear_forward(rep: Representation, inputs: dict) -> dict:
    """Propagate vectors through a representation with no activations; works for
    any dimension vector.  inputs maps each source to a vector of its dimension."""
    q = rep.quiver
    vals = {}
    for v in q.topological:
        if v in set(q.sources):
            vec = np.asarray(inputs[v], dtype=float).reshape(rep.dims[v])
            vals[v] = vec
        else:
            acc = np.zeros(rep.dims[v])
            for a in q.arrows_into(v):
                acc = acc + rep.matrices[a.id] @ vals[a.source]
            vals[v] = acc
    return {v: vals[v] for v in q.sinks}


def in_matrix(q: Quiver, dims: dict, framing) -> np.ndarray:
    """Distribute stacked source values into every framing slot they feed."""
    src_off, off = {}, 0
    for s in q.sources:
        src_off[s] = off
        off += dims[s]
    total_in = off
    rows = sum(framing.u[i] for i in q.hidden)
    m = np.zeros((rows, total_in))
    r = 0
    for i in q.hidden:
        for a, d in framing.in_slots[i]:
            m[r : r + d, src_off[a.source] : src_off[a.source] + d] = np.eye(d)
            r += d
    return m


def out_matrix(q: Quiver, dims: dict, framing) -> np.ndarray:
    """Sum the framing-out slots into the stacked sink values."""
    snk_off, off = {}, 0
    for s in q.sinks:
        snk_off[s] = off
        off += dims[s]
    total_out = off
    cols = sum(framing.w[i] for i in q.hidden)
    m = np.zeros((total_out, cols))
    c = 0
    for j in q.hidden:
        for a, d in framing.out_slots[j]:
            m[snk_off[a.target] : snk_off[a.target] + d, c : c + d] = np.eye(d)
            c += d
    return m


def network_matrix(t: DoubleFramedTriple) -> np.ndarray:
    """The linear input-to-output map of a triple, computed through its moduli
    point; equal to activation-free forward propagation."""
    m = project(t)
    return network_matrix_from_point(m)


def network_matrix_from_point(m: ModuliPoint) -> np.ndarray:
    # assembled() spans exactly the vertices with nonzero framing, in hidden
    # declaration order, which matches the in/out matrix slot layouts
    q = m.quiver
    return out_matrix(q, m.dims, m.framing) @ m.assembled() @ in_matrix(q, m.dims, m.framing)


def knowledge_map(net: NeuralNetwork, x, tol=PREACT_TOL) -> ThinRep:
    """Input-dependent thin representation: input arrows absorb the input value,
    bias arrows keep their weight, arrows out of hidden vertices are scaled by
    activation / pre-activation.

    Raises SingularPreActivation when a needed pre-activation vanishes.
    """
    q = net.quiver
    _, trace = forward(net, x)
    weights = {}
    hidden = set(q.hidden)
    inputs = set(net.input_vertices)
    for a in q.arrows:
        wt = net.weights.weights[a.id]
        s = a.source
        if s in inputs:
            weights[a.id] = wt * trace.values[s]
        elif s in net.bias:
            weights[a.id] = wt
        else:
            z = trace.pre[s]
            if abs(z) <= tol:
                raise SingularPreActivation(s, z)
            weights[a.id] = wt * trace.values[s] / z
    return ThinRep(q, weights)


def psi_hat(obj) -> np.ndarray:
    """Evaluate on the all-ones input with identity activations.

    Accepts a thin representation or a moduli point; the two entry points agree
    on projections of thin representations.
    """
    if isinstance(obj, ModuliPoint):
        q = obj.quiver
        n = network_matrix_from_point(obj)
        ones = np.ones(sum(obj.dims[s] for s in q.sources))
        return n @ ones
    if isinstance(obj, ThinRep):
        rep = obj.to_representation()
        outs = linear_forward(rep, {s: np.ones(1) for s in obj.quiver.sources})
        return np.array([outs[s][0] for s in obj.quiver.sinks])
    raise ShapeMismatch(f"cannot evaluate object of type {type(obj).__name__}")
