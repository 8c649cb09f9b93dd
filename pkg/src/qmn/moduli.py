"""Moduli coordinates for double-framed representations and the tests built on them.

The quotient map sends a triple (V, f, h) to the family of composite maps
h_j V_w f_i over hidden paths w : i ~> j.  That family is a complete invariant
of closed gauge orbits.  Per-vertex blocks q^(i) collect all coordinates of
paths through i; their ranks bound the hidden dimension vector, with equality
exactly on simple points.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CodimensionMismatch, ShapeMismatch
from .quiver import DEFAULT_PATH_CAP, Path, Quiver, all_hidden_paths
from .rep import DoubleFramedTriple, rep_space_dim, gauge_dim


@dataclass
class ModuliPoint:
    """Coordinates of a gauge orbit: one matrix block per hidden path between
    framed vertices.

    blocks[w] has shape (w_end, u_start); paths between unframed endpoints are
    not stored.  `paths` holds every hidden path for every ordered vertex pair
    (needed to assemble the per-vertex blocks q^(i)).
    """

    quiver: Quiver
    dims: dict
    framing: object
    paths: dict
    blocks: dict

    # --- layout helpers -------------------------------------------------

    def framed_in(self):
        return [i for i in self.quiver.hidden if self.framing.u[i] > 0]

    def framed_out(self):
        return [j for j in self.quiver.hidden if self.framing.w[j] > 0]

    def in_paths(self, i):
        """Paths j ~> i from framed-in vertices, column order of q^(i)."""
        return [p for j in self.quiver.hidden if self.framing.u[j] > 0 for p in self.paths[(j, i)]]

    def out_paths(self, i):
        """Paths i ~> k into framed-out vertices, row order of q^(i)."""
        return [p for k in self.quiver.hidden if self.framing.w[k] > 0 for p in self.paths[(i, k)]]

    # --- views ----------------------------------------------------------

    def assembled(self):
        """Single operator from stacked framing-in spaces to stacked framing-out
        spaces; parallel paths between the same pair add up, pairs without a
        path contribute structural zeros."""
        u, w = self.framing.u, self.framing.w
        cols = self.framed_in()
        rows = self.framed_out()
        col_off, c = {}, 0
        for i in cols:
            col_off[i] = c
            c += u[i]
        row_off, r = {}, 0
        for j in rows:
            row_off[j] = r
            r += w[j]
        m = np.zeros((r, c))
        for p, b in self.blocks.items():
            ro, co = row_off[p.end], col_off[p.start]
            m[ro : ro + w[p.end], co : co + u[p.start]] += b
        return m

    def vertex_block(self, i):
        """q^(i): all coordinates of paths through i, rows by out-paths, columns
        by in-paths."""
        u, w = self.framing.u, self.framing.w
        ins = self.in_paths(i)
        outs = self.out_paths(i)
        ncols = sum(u[p.start] for p in ins)
        nrows = sum(w[p.end] for p in outs)
        m = np.zeros((nrows, ncols))
        r = 0
        for po in outs:
            c = 0
            for pi in ins:
                comp = Path(pi.start, po.end, pi.arrows + po.arrows)
                m[r : r + w[po.end], c : c + u[pi.start]] = self.blocks[comp]
                c += u[pi.start]
            r += w[po.end]
        return m

    def rank_vector(self, tol=linalg.RANK_TOL):
        return {i: linalg.num_rank(self.vertex_block(i), tol) for i in self.quiver.hidden}


def path_matrix(t: DoubleFramedTriple, p: Path):
    m = np.eye(t.dims[p.start])
    for aid in p.arrows:
        m = t.hidden_matrices[aid] @ m
    return m


def project(t: DoubleFramedTriple, cap: int = DEFAULT_PATH_CAP) -> ModuliPoint:
    """Quotient map: blocks h_j V_w f_i for every hidden path w between framed
    vertices; the lazy path at i contributes h_i f_i."""
    q = t.quiver
    fr = t.framing
    paths = all_hidden_paths(q.hidden_quiver(), cap)
    blocks = {}
    for i in q.hidden:
        if fr.u[i] == 0:
            continue
        for j in q.hidden:
            if fr.w[j] == 0:
                continue
            for p in paths[(i, j)]:
                blocks[p] = t.h[j] @ path_matrix(t, p) @ t.f[i]
    return ModuliPoint(q, dict(t.dims), fr, paths, blocks)


# --- stability and simplicity -------------------------------------------


def _generated_subspaces(t: DoubleFramedTriple):
    """Smallest subrepresentation containing all framing images, as orthonormal
    bases per hidden vertex."""
    q = t.quiver
    hq = q.hidden_quiver()
    s = {i: linalg.orth(t.f[i]) for i in q.hidden}
    for _ in range(sum(t.dims[i] for i in q.hidden) + 1):
        changed = False
        for a in hq.arrows:
            image = t.hidden_matrices[a.id] @ s[a.source]
            if image.shape[1] == 0:
                continue
            grown = linalg.orth(np.hstack([s[a.target], image]))
            if grown.shape[1] > s[a.target].shape[1]:
                s[a.target] = grown
                changed = True
        if not changed:
            break
    return s

def _coobstruction_subspaces(t: DoubleFramedTriple):
    """Largest subrepresentation killed by every coframing map."""
    q = t.quiver
    hq = q.hidden_quiver()
    k = {i: linalg.null(t.h[i]) for i in q.hidden}
    for _ in range(sum(t.dims[i] for i in q.hidden) + 1):
        changed = False
        for a in hq.arrows:
            pre = linalg.preimage(t.hidden_matrices[a.id], k[a.target])
            cut = linalg.intersect(k[a.source], pre)
            if cut.shape[1] < k[a.source].shape[1]:
                k[a.source] = cut
                changed = True
        if not changed:
            break
    return k


def is_semistable(t: DoubleFramedTriple) -> bool:
    """True when the framing maps generate the whole hidden representation."""
    s = _generated_subspaces(t)
    return all(s[i].shape[1] == t.dims[i] for i in t.quiver.hidden)


def is_simple(t: DoubleFramedTriple) -> bool:
    """Generated by the framing and with no subrepresentation killed by the
    coframing; equivalent to the rank vector of the projection being full."""
    if not is_semistable(t):
        return False
    k = _coobstruction_subspaces(t)
    return all(k[i].shape[1] == 0 for i in t.quiver.hidden)


# --- existence criterion ---------------------------------------------------


@dataclass(frozen=True)
class ExistenceReport:
    exists: bool
    reason: str
    single_cycle: bool  # one-point extension is a single undirected cycle


def _one_point_cycle(q: Quiver, fr) -> bool:
    """Underlying graph of the one-point extension is a single cycle: connected,
    all degrees two, as many arrows as vertices."""
    n = len(q.hidden) + 1
    hq = q.hidden_quiver()
    deg = {i: 0 for i in q.hidden}
    deg["__inf__"] = 0
    edges = []
    for a in hq.arrows:
        deg[a.source] += 1
        deg[a.target] += 1
        edges.append((a.source, a.target))
    for i in q.hidden:
        deg[i] += fr.u[i] + fr.w[i]
        deg["__inf__"] += fr.u[i] + fr.w[i]
        edges.extend([("__inf__", i)] * fr.u[i])
        edges.extend([(i, "__inf__")] * fr.w[i])
    if len(edges) != n or any(d != 2 for d in deg.values()):
        return False
    # connectivity
    adj = {v: set() for v in deg}
    for x, y in edges:
        adj[x].add(y)
        adj[y].add(x)
    seen, stack = {"__inf__"}, ["__inf__"]
    while stack:
        v = stack.pop()
        for wv in adj[v]:
            if wv not in seen:
                seen.add(wv)
                stack.append(wv)
    return len(seen) == n


def simple_rep_exists(q: Quiver, dims: dict) -> ExistenceReport:
    """Numerical criterion (Le Bruyn-Procesi) for a simple point to exist for
    the given dimension vector.

    Outside the single-cycle case the three conditions are: some hidden vertex
    carries framing mass, and u_i / w_i dominate the in/out Euler defects
    d_i - sum of neighbour dims.
    """
    from .quiver import framing_data

    fr = framing_data(q, dims)
    if not q.hidden:
        return ExistenceReport(False, "no hidden vertices", False)
    hq = q.hidden_quiver()
    if _one_point_cycle(q, fr):
        thin = all(dims[i] == 1 for i in q.hidden)
        reason = "single-cycle extension: need thin hidden dimensions" if not thin else "single-cycle extension with thin dimensions"
        return ExistenceReport(thin, reason, True)
    if not any(dims[i] * (fr.u[i] + fr.w[i]) != 0 for i in q.hidden):
        return ExistenceReport(False, "no framed hidden vertex with positive dimension", False)
    for i in q.hidden:
        need = dims[i] - sum(dims[a.source] for a in hq.arrows_into(i))
        if fr.u[i] < need:
            return ExistenceReport(False, f"u[{i}] = {fr.u[i]} < in-defect {need}", False)
    for i in q.hidden:
        need = dims[i] - sum(dims[a.target] for a in hq.arrows_out_of(i))
        if fr.w[i] < need:
            return ExistenceReport(False, f"w[{i}] = {fr.w[i]} < out-defect {need}", False)
    return ExistenceReport(True, "all numerical conditions hold", False)


@dataclass(frozen=True)
class ModuliDimension:
    value: int
    expected_only: bool  # no simple point exists; value is the formula only


def moduli_dimension(q: Quiver, dims: dict) -> ModuliDimension:
    """dim of the representation space minus dim of the hidden gauge group."""
    value = rep_space_dim(q, dims) - gauge_dim(q, dims)
    report = simple_rep_exists(q, dims)
    return ModuliDimension(value=value, expected_only=not report.exists)


# --- closed orbits ----------------------------------------------------------


def semisimplify(t: DoubleFramedTriple, tol=linalg.RANK_TOL):
    """Invariants of the closed orbit in the closure of t's orbit: the moduli
    point and its rank vector."""
    m = project(t)
    return m.rank_vector(tol), m


def closed_orbit_representative(m: ModuliPoint, tol=linalg.RANK_TOL) -> DoubleFramedTriple:
    """Canonical triple with a closed orbit projecting to m.

    The image of each q^(i) (inside the stacked out-path space) carries an
    induced representation by path shifts; we take orthonormal coordinates on
    it, pad with a zero complement up to d_i, and read f from the lazy in-slot
    and h from the lazy out-slot.
    """
    q = m.quiver
    u, w = m.framing.u, m.framing.w
    dims = m.dims
    basis, ins, outs, in_off, out_off = {}, {}, {}, {}, {}
    for i in q.hidden:
        ins[i] = m.in_paths(i)
        outs[i] = m.out_paths(i)
        off, offs = 0, {}
        for p in ins[i]:
            offs[p] = off
            off += u[p.start]
        in_off[i] = offs
        off, offs = 0, {}
        for p in outs[i]:
            offs[p] = off
            off += w[p.end]
        out_off[i] = offs
        qi = m.vertex_block(i)
        b = linalg.orth(qi, tol)
        if b.shape[1] > dims[i]:
            raise ShapeMismatch(
                f"rank {b.shape[1]} at vertex {i!r} exceeds hidden dimension {dims[i]}"
            )
        basis[i] = b

    hidden_mats = {}
    for a in q.hidden_quiver().arrows:
        i, j = a.source, a.target
        nrows = sum(w[p.end] for p in outs[j])
        ncols = sum(w[p.end] for p in outs[i])
        shift = np.zeros((nrows, ncols))
        for p in outs[j]:
            comp = Path(i, p.end, (a.id,) + p.arrows)
            ro, co = out_off[j][p], out_off[i][comp]
            shift[ro : ro + w[p.end], co : co + w[p.end]] = np.eye(w[p.end])
        red = basis[j].T @ shift @ basis[i]
        full = np.zeros((dims[j], dims[i]))
        full[: red.shape[0], : red.shape[1]] = red
        hidden_mats[a.id] = full

    f, h = {}, {}
    for i in q.hidden:
        fi = np.zeros((dims[i], u[i]))
        if u[i] > 0:
            lazy = Path(i, i, ())
            co = in_off[i][lazy]
            qi = m.vertex_block(i)
            red = basis[i].T @ qi[:, co : co + u[i]]
            fi[: red.shape[0], :] = red
        f[i] = fi
        hi = np.zeros((w[i], dims[i]))
        if w[i] > 0:
            lazy = Path(i, i, ())
            ro = out_off[i][lazy]
            hi[:, : basis[i].shape[1]] = basis[i][ro : ro + w[i], :]
        h[i] = hi
    return DoubleFramedTriple(q, dict(dims), hidden_mats, f, h, m.framing)


# --- resolution points ------------------------------------------------------


def in_shift_matrix(m: ModuliPoint, arrow):
    """Shift map on stacked in-path spaces: the slot of path w at the arrow's
    source moves to the slot of (arrow appended to w) at its target."""
    u = m.framing.u
    i, j = arrow.source, arrow.target
    ins_i, ins_j = m.in_paths(i), m.in_paths(j)
    off_i, off = {}, 0
    for p in ins_i:
        off_i[p] = off
        off += u[p.start]
    off_j, off = {}, 0
    for p in ins_j:
        off_j[p] = off
        off += u[p.start]
    mat = np.zeros((sum(u[p.start] for p in ins_j), sum(u[p.start] for p in ins_i)))
    for p in ins_i:
        comp = Path(p.start, j, p.arrows + (arrow.id,))
        ro, co = off_j[comp], off_i[p]
        mat[ro : ro + u[p.start], co : co + u[p.start]] = np.eye(u[p.start])
    return mat


def verify_resolution_point(subspaces: dict, m: ModuliPoint, tol=1e-8) -> bool:
    """Check a candidate tuple of subspaces against a moduli point: each
    subspace of the stacked in-path space at i must have codimension d_i, be
    carried into its neighbour by every arrow shift, and lie in the kernel of
    q^(i)."""
    q = m.quiver
    u = m.framing.u
    bases = {}
    for i in q.hidden:
        ambient = sum(u[p.start] for p in m.in_paths(i))
        v = np.asarray(subspaces[i], dtype=float)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        if v.shape[0] != ambient:
            raise CodimensionMismatch(
                f"subspace at {i!r} lives in dimension {v.shape[0]}, ambient is {ambient}"
            )
        b = linalg.orth(v) if v.size else np.zeros((ambient, 0))
        if ambient - b.shape[1] != m.dims[i]:
            raise CodimensionMismatch(
                f"subspace at {i!r} has codimension {ambient - b.shape[1]}, expected {m.dims[i]}"
            )
        bases[i] = b
    for a in q.hidden_quiver().arrows:
        moved = in_shift_matrix(m, a) @ bases[a.source]
        if not linalg.contains(bases[a.target], moved, tol):
            return False
    for i in q.hidden:
        qi = m.vertex_block(i)
        if qi.size == 0 or bases[i].shape[1] == 0:
            continue
        resid = qi @ bases[i]
        scale = max(float(np.abs(qi).max()), 1.0)
        if float(np.abs(resid).max()) > tol * scale:
            return False
    return True


def resolution_data(t: DoubleFramedTriple, m: ModuliPoint = None) -> dict:
    """Tautological subspaces for a triple: the kernel of the collected map
    from stacked in-paths into V_i.  For semistable triples these have
    codimension d_i and verify against project(t)."""
    if m is None:
        m = project(t)
    out = {}
    for i in t.quiver.hidden:
        blocks = [path_matrix(t, p) @ t.f[p.start] for p in m.in_paths(i)]
        collected = np.hstack(blocks) if blocks else np.zeros((t.dims[i], 0))
        out[i] = linalg.null(collected)
    return out


# --- separation witness (thin case) ----------------------------------------


def recover_thin_gauge(t1: DoubleFramedTriple, t2: DoubleFramedTriple, tol=1e-9, zero_tol=1e-12):
    """Solve for a hidden gauge carrying t1 to t2, scalar dims only.

    Seeds each g_i from a nonzero framing entry, propagates through nonzero
    hidden weights, then verifies.  Returns the gauge dict or None.
    """
    q = t1.quiver
    if any(t1.dims[i] != 1 for i in q.hidden):
        raise ShapeMismatch("gauge recovery is implemented for thin hidden dimensions only")
    g = {}
    for i in q.hidden:
        for k in range(t1.framing.u[i]):
            if abs(t1.f[i][0, k]) > zero_tol:
                g[i] = t2.f[i][0, k] / t1.f[i][0, k]
                break
        else:
            for l in range(t1.framing.w[i]):
                if abs(t2.h[i][l, 0]) > zero_tol:
                    g[i] = t1.h[i][l, 0] / t2.h[i][l, 0]
                    break
    hq = q.hidden_quiver()
    for _ in range(len(q.hidden) + 1):
        progressed = False
        for a in hq.arrows:
            v1 = t1.hidden_matrices[a.id][0, 0]
            v2 = t2.hidden_matrices[a.id][0, 0]
            if a.source in g and a.target not in g and abs(v1) > zero_tol:
                g[a.target] = v2 * g[a.source] / v1
                progressed = True
            if a.target in g and a.source not in g and abs(v2) > zero_tol:
                g[a.source] = g[a.target] * v1 / v2
                progressed = True
        if not progressed:
            break
    for i in q.hidden:
        if i not in g or abs(g[i]) < zero_tol:
            return None
    gauge = {i: np.array([[g[i]]]) for i in q.hidden}
    from .rep import act

    moved = act(gauge, t1)
    for a in hq.arrows:
        if linalg.rel_err(moved.hidden_matrices[a.id], t2.hidden_matrices[a.id]) > tol:
            return None
    for i in q.hidden:
        if linalg.rel_err(moved.f[i], t2.f[i]) > tol or linalg.rel_err(moved.h[i], t2.h[i]) > tol:
            return None
    return gauge
