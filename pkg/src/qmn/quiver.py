"""Finite acyclic quivers: validation, source/sink/hidden split, framing data, hidden paths.

Vertices and arrows are identified by strings.  A vertex with no in-arrows is a
source, one with no out-arrows is a sink, and the hidden quiver is the full
subquiver on the remaining vertices.  Framing data counts, per hidden vertex,
the incoming dimension from sources (u) and the outgoing dimension to sinks
(w), with slot order fixed by arrow declaration order.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import (
    CyclicQuiver,
    DanglingArrow,
    DuplicateArrowId,
    MultipleArrows,
    PathExplosion,
    QuiverValidationError,
)

DEFAULT_PATH_CAP = 10**6

ROLES = ("input", "bias", "output", "hidden")


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


class Quiver:
    """Acyclic directed multigraph.  Raises on construction if invalid.

    `network=True` additionally forbids parallel arrows (the convention for
    neural-network quivers).
    """

    def __init__(self, vertices, arrows, roles=None, network=False):
        self.vertices = tuple(vertices)
        self.arrows = tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in arrows)
        self.network = bool(network)

        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise QuiverValidationError("duplicate vertex ids")
        seen = set()
        for a in self.arrows:
            if a.id in seen:
                raise DuplicateArrowId(a.id)
            seen.add(a.id)
            if a.source not in vset or a.target not in vset:
                raise DanglingArrow(f"arrow {a.id}: {a.source}->{a.target} has undeclared endpoint")
        if self.network:
            pairs = {(a.source, a.target) for a in self.arrows}
            if len(pairs) != len(self.arrows):
                raise MultipleArrows("network quivers do not allow parallel arrows")

        self._into = {v: [] for v in self.vertices}
        self._out = {v: [] for v in self.vertices}
        for a in self.arrows:
            self._into[a.target].append(a)
            self._out[a.source].append(a)

        self.topological = self._toposort()
        self.sources = tuple(v for v in self.vertices if not self._into[v])
        self.sinks = tuple(v for v in self.vertices if not self._out[v])
        ss = set(self.sources) | set(self.sinks)
        self.hidden = tuple(v for v in self.vertices if v not in ss)

        self.roles = self._resolve_roles(roles)

    def _toposort(self):
        indeg = {v: len(self._into[v]) for v in self.vertices}
        queue = deque(v for v in self.vertices if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for a in self._out[v]:
                indeg[a.target] -= 1
                if indeg[a.target] == 0:
                    queue.append(a.target)
        if len(order) != len(self.vertices):
            raise CyclicQuiver("quiver has a directed cycle")
        return tuple(order)

    def _resolve_roles(self, roles):
        resolved = {}
        for v in self.vertices:
            if v in set(self.sources):
                resolved[v] = "input"
            elif v in set(self.sinks):
                resolved[v] = "output"
            else:
                resolved[v] = "hidden"
        if roles:
            for v, r in roles.items():
                if v not in resolved:
                    raise QuiverValidationError(f"role given for unknown vertex {v!r}")
                if r not in ROLES:
                    raise QuiverValidationError(f"unknown role {r!r} for vertex {v!r}")
                if r in ("input", "bias") and resolved[v] == "hidden":
                    raise QuiverValidationError(f"{v!r} is hidden, cannot have role {r!r}")
                if r in ("input", "bias") and v in set(self.sinks) and v not in set(self.sources):
                    raise QuiverValidationError(f"{v!r} is a sink, cannot have role {r!r}")
                if r == "output" and v not in set(self.sinks):
                    raise QuiverValidationError(f"{v!r} is not a sink, cannot have role 'output'")
                if r == "hidden" and v not in set(self.hidden):
                    raise QuiverValidationError(f"{v!r} is not hidden")
                resolved[v] = r
        return resolved

    def arrows_into(self, v):
        return tuple(self._into[v])

    def arrows_out_of(self, v):
        return tuple(self._out[v])

    def arrow(self, arrow_id):
        for a in self.arrows:
            if a.id == arrow_id:
                return a
        raise KeyError(arrow_id)

    def hidden_quiver(self):
        hs = set(self.hidden)
        return HiddenQuiver(
            parent=self,
            vertices=self.hidden,
            arrows=tuple(a for a in self.arrows if a.source in hs and a.target in hs),
        )

    def source_arrows_into(self, v):
        """Arrows from sources of Q into hidden vertex v, in declaration order."""
        src = set(self.sources)
        return tuple(a for a in self._into[v] if a.source in src)

    def sink_arrows_out_of(self, v):
        snk = set(self.sinks)
        return tuple(a for a in self._out[v] if a.target in snk)

    def direct_source_sink_arrows(self):
        src, snk = set(self.sources), set(self.sinks)
        return tuple(a for a in self.arrows if a.source in src and a.target in snk)

    def __repr__(self):
        return f"Quiver({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


@dataclass(frozen=True)
class HiddenQuiver:
    parent: Quiver
    vertices: tuple
    arrows: tuple

    def arrows_out_of(self, v):
        return tuple(a for a in self.arrows if a.source == v)

    def arrows_into(self, v):
        return tuple(a for a in self.arrows if a.target == v)

    def adjacency(self):
        """Arrow-count matrix indexed by self.vertices order."""
        import numpy as np

        idx = {v: i for i, v in enumerate(self.vertices)}
        m = np.zeros((len(self.vertices), len(self.vertices)), dtype=int)
        for a in self.arrows:
            m[idx[a.source], idx[a.target]] += 1
        return m


@dataclass(frozen=True)
class Classification:
    sources: tuple
    sinks: tuple
    hidden: tuple
    degenerate: tuple  # vertices that are both source and sink (isolated)
    weakly_connected: bool


def validate(q: Quiver) -> Classification:
    """Partition vertices into sources/sinks/hidden and report connectivity.

    Construction of `Quiver` already raises on cycles, dangling arrows, or
    duplicate ids; this returns the classification report.
    """
    degenerate = tuple(v for v in q.vertices if v in set(q.sources) and v in set(q.sinks))
    # weak connectivity over the underlying undirected graph
    if not q.vertices:
        connected = True
    else:
        seen = {q.vertices[0]}
        frontier = deque(seen)
        nbrs = {v: set() for v in q.vertices}
        for a in q.arrows:
            nbrs[a.source].add(a.target)
            nbrs[a.target].add(a.source)
        while frontier:
            v = frontier.popleft()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        connected = len(seen) == len(q.vertices)
    return Classification(q.sources, q.sinks, q.hidden, degenerate, connected)


@dataclass(frozen=True)
class FramingData:
    """Per hidden vertex: collected source dimension u, sink dimension w, slot lists.

    in_slots[i] is the ordered list of (arrow, dim(source)) for arrows from
    sources into i; u[i] is the sum of those dims.  out_slots/w mirror this
    for arrows into sinks.
    """

    u: dict
    w: dict
    in_slots: dict
    out_slots: dict


def framing_data(q: Quiver, dims: dict) -> FramingData:
    """Collect framing multiplicities u_i, w_i for every hidden vertex."""
    for v in q.sources + q.sinks:
        if dims.get(v, 0) <= 0:
            raise QuiverValidationError(f"dimension at framed vertex {v!r} must be positive")
    u, w, in_slots, out_slots = {}, {}, {}, {}
    for i in q.hidden:
        ins = [(a, dims[a.source]) for a in q.source_arrows_into(i)]
        outs = [(a, dims[a.target]) for a in q.sink_arrows_out_of(i)]
        in_slots[i] = tuple(ins)
        out_slots[i] = tuple(outs)
        u[i] = sum(d for _, d in ins)
        w[i] = sum(d for _, d in outs)
    return FramingData(u=u, w=w, in_slots=in_slots, out_slots=out_slots)


@dataclass(frozen=True)
class Path:
    """Directed path in the hidden quiver; empty arrow list means the lazy path."""

    start: str
    end: str
    arrows: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.arrows)

    def label(self):
        inner = ".".join(self.arrows) if self.arrows else "~"
        return f"{self.start}>{inner}>{self.end}"


def enumerate_paths(hq: HiddenQuiver, start, end):
    """All directed paths start->end in the hidden quiver, lazy path included.

    Output is sorted lexicographically by arrow-id sequence, so the lazy path
    (if any) comes first.
    """
    if start not in set(hq.vertices) or end not in set(hq.vertices):
        raise QuiverValidationError("path endpoints must be hidden vertices")
    found = []

    def walk(v, acc):
        if v == end:
            found.append(Path(start, end, tuple(acc)))
        for a in hq.arrows_out_of(v):
            acc.append(a.id)
            walk(a.target, acc)
            acc.pop()

    walk(start, [])
    found.sort(key=lambda p: p.arrows)
    return found


def count_paths(hq: HiddenQuiver) -> dict:
    """Path counts for all ordered vertex pairs, lazy paths included."""
    order = [v for v in hq.parent.topological if v in set(hq.vertices)]
    counts = {(i, j): 0 for i in hq.vertices for j in hq.vertices}
    for i in reversed(order):
        counts[(i, i)] += 1  # lazy
        for a in hq.arrows_out_of(i):
            for j in hq.vertices:
                counts[(i, j)] += counts[(a.target, j)]
    return counts


def all_hidden_paths(hq: HiddenQuiver, cap: int = DEFAULT_PATH_CAP) -> dict:
    """Paths for every ordered pair of hidden vertices, guarded by a count cap."""
    counts = count_paths(hq)
    total = sum(counts.values())
    if total > cap:
        raise PathExplosion(total, cap)
    return {
        (i, j): enumerate_paths(hq, i, j)
        for i in hq.vertices
        for j in hq.vertices
    }
