import itertools

import numpy as np
import pytest

from qmn import linalg
from qmn.errors import CodimensionMismatch
from qmn.examples import (
    d4tilde_template,
    d4tilde_triple,
    quiver_a3,
    quiver_d4tilde,
    quiver_single_vertex,
    thin_dims,
)
from qmn.moduli import (
    ModuliPoint,
    closed_orbit_representative,
    is_semistable,
    is_simple,
    moduli_dimension,
    project,
    recover_thin_gauge,
    resolution_data,
    semisimplify,
    simple_rep_exists,
    verify_resolution_point,
)
from qmn.quiver import Path, Quiver, framing_data
from qmn.rep import Representation, act, random_gauge, random_triple, split


def thin_rep(q, weights):
    return split(Representation(q, thin_dims(q), {k: float(v) for k, v in weights.items()}))


def test_project_d4tilde_all_ones():
    t = d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1])
    m = project(t)
    expected = np.array(
        [
            [1, 1, 1, 1, 0],
            [1, 1, 1, 1, 0],
            [1, 1, 1, 1, 1],
            [1, 1, 1, 1, 1],
        ],
        dtype=float,
    )
    assert np.array_equal(m.assembled(), expected)


@pytest.mark.parametrize("seed", range(10))
def test_project_d4tilde_matches_template(seed):
    rng = np.random.default_rng(seed)
    params = (
        *rng.standard_normal(5),
        rng.standard_normal(2),
        rng.standard_normal(2),
        rng.standard_normal(2),
        rng.standard_normal(2),
    )
    m = project(d4tilde_triple(*params))
    assert linalg.rel_err(m.assembled(), d4tilde_template(*params)) < 1e-14


def test_project_a3_lazy_composition():
    t = thin_rep(quiver_a3(), {"ij": 3.0, "jk": 7.0})
    m = project(t)
    lazy = Path("j", "j", ())
    assert set(m.blocks) == {lazy}
    assert m.blocks[lazy][0, 0] == pytest.approx(21.0)


@pytest.mark.parametrize("seed", range(30))
def test_project_gauge_invariant(seed):
    q = quiver_d4tilde()
    dims = {v: 2 if v == "v3" else 1 for v in q.vertices}
    rng = np.random.default_rng(seed)
    t = random_triple(q, dims, rng)
    g = random_gauge(q, dims, rng)
    a0, a1 = project(t).assembled(), project(act(g, t)).assembled()
    assert np.linalg.norm(a1 - a0) <= 1e-9 * max(np.linalg.norm(a0), 1.0)


def test_vertex_blocks_d4tilde_layout():
    rng = np.random.default_rng(7)
    t = d4tilde_triple(
        *rng.standard_normal(5),
        rng.standard_normal(2),
        rng.standard_normal(2),
        rng.standard_normal(2),
        rng.standard_normal(2),
    )
    m = project(t)

    def block(s, e):
        (p,) = [p for p in m.blocks if p.start == s and p.end == e]
        return m.blocks[p]

    a, b = block("v1", "v4"), block("v2", "v4")
    c, d = block("v1", "v5"), block("v2", "v5")
    e = block("v5", "v5")
    assert np.allclose(m.vertex_block("v3"), np.block([[a, b], [c, d]]))
    assert np.allclose(m.vertex_block("v5"), np.hstack([c, d, e]))
    assert np.allclose(m.vertex_block("v4"), np.hstack([a, b]))
    assert np.allclose(m.vertex_block("v1"), np.vstack([a, c]))
    assert np.allclose(m.vertex_block("v2"), np.vstack([b, d]))


def test_vertex_block_empty_in_paths():
    """With no framed vertex upstream the block has zero columns and rank 0.

    No quiver-derived framing can produce this, so the layout is exercised on
    a hand-built point with the framing-in slots emptied."""
    from qmn.quiver import FramingData

    q = Quiver(["s", "x", "y", "t"], [("sx", "s", "x"), ("xy", "x", "y"), ("yt", "y", "t")])
    dims = thin_dims(q)
    t = random_triple(q, dims, np.random.default_rng(0))
    m = project(t)
    fr = framing_data(q, dims)
    doctored_framing = FramingData(
        u={"x": 0, "y": 0}, w=fr.w, in_slots={"x": (), "y": ()}, out_slots=fr.out_slots
    )
    doctored = ModuliPoint(q, m.dims, doctored_framing, m.paths, {})
    assert doctored.vertex_block("y").shape[1] == 0
    assert doctored.rank_vector()["y"] == 0


def test_rank_vector_d4tilde_all_ones():
    m = project(d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1]))
    assert m.rank_vector() == {v: 1 for v in ("v1", "v2", "v3", "v4", "v5")}


def test_rank_vector_zero_triple():
    t = d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1])
    for k in t.hidden_matrices:
        t.hidden_matrices[k] = np.zeros_like(t.hidden_matrices[k])
    for i in t.quiver.hidden:
        t.f[i] = np.zeros_like(t.f[i])
        t.h[i] = np.zeros_like(t.h[i])
    m = project(t)
    assert m.rank_vector() == {v: 0 for v in t.quiver.hidden}


@pytest.mark.parametrize("seed", range(10))
def test_rank_vector_generic_thin(seed):
    rng = np.random.default_rng(seed)
    q = quiver_d4tilde()
    weights = {a.id: float(rng.uniform(0.5, 1.5) * rng.choice([-1, 1])) for a in q.arrows}
    m = project(thin_rep(q, weights))
    assert m.rank_vector() == {v: 1 for v in q.hidden}


def test_is_simple_a3():
    q = quiver_a3()
    assert is_simple(thin_rep(q, {"ij": 1.3, "jk": -0.7}))
    assert not is_simple(thin_rep(q, {"ij": 1.3, "jk": 0.0}))
    assert not is_simple(thin_rep(q, {"ij": 0.0, "jk": 1.0}))


def test_semistability_examples():
    q = quiver_a3()
    assert not is_semistable(thin_rep(q, {"ij": 0.0, "jk": 1.0}))
    assert is_semistable(thin_rep(q, {"ij": 1.0, "jk": 0.0}))
    ones = d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1])
    assert is_semistable(ones)


@pytest.mark.parametrize(
    "quiver_fn", [quiver_a3, quiver_single_vertex, quiver_d4tilde]
)
def test_simple_iff_full_rank_binary_weights(quiver_fn):
    """Fixpoint simplicity agrees with the full-rank criterion exhaustively on
    0/1 weights (small quivers only here; the acceptance suite covers more)."""
    q = quiver_fn()
    arrows = [a.id for a in q.arrows]
    if len(arrows) > 8:
        # only sample the corners and a fixed slice to keep this test snappy
        combos = list(itertools.islice(itertools.product([0.0, 1.0], repeat=len(arrows)), 256))
    else:
        combos = itertools.product([0.0, 1.0], repeat=len(arrows))
    full = {i: 1 for i in q.hidden}
    for combo in combos:
        t = thin_rep(q, dict(zip(arrows, combo)))
        assert is_simple(t) == (project(t).rank_vector() == full)


def test_simple_rep_exists_a3_single_cycle():
    q = quiver_a3()
    report = simple_rep_exists(q, thin_dims(q))
    assert report.exists and report.single_cycle
    deep = simple_rep_exists(q, {"i": 1, "j": 2, "k": 1})
    assert deep.single_cycle and not deep.exists


def test_simple_rep_exists_d4tilde_thin():
    q = quiver_d4tilde()
    report = simple_rep_exists(q, thin_dims(q))
    assert report.exists and not report.single_cycle


def test_simple_rep_exists_defect_failure():
    q = Quiver(
        ["s", "v", "t1", "t2"],
        [("sv", "s", "v"), ("vt1", "v", "t1"), ("vt2", "v", "t2")],
    )
    dims = {"s": 1, "v": 2, "t1": 1, "t2": 1}
    report = simple_rep_exists(q, dims)
    assert not report.exists and "u[v]" in report.reason


def test_moduli_dimension_values():
    qa = quiver_a3()
    assert moduli_dimension(qa, thin_dims(qa)).value == 1
    qd = quiver_d4tilde()
    md = moduli_dimension(qd, thin_dims(qd))
    assert md.value == 8 and not md.expected_only
    flagged = moduli_dimension(qa, {"i": 1, "j": 2, "k": 1})
    assert flagged.expected_only


def test_semisimplify_simple_triple_has_full_rank():
    rng = np.random.default_rng(11)
    t = random_triple(quiver_d4tilde(), thin_dims(quiver_d4tilde()), rng)
    rank, point = semisimplify(t)
    assert rank == {v: 1 for v in t.quiver.hidden}
    assert is_simple(t)


def test_semisimplify_zero_triple():
    t = d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1])
    for k in t.hidden_matrices:
        t.hidden_matrices[k] = np.zeros_like(t.hidden_matrices[k])
    for i in t.quiver.hidden:
        t.f[i] = np.zeros_like(t.f[i])
        t.h[i] = np.zeros_like(t.h[i])
    rank, point = semisimplify(t)
    assert rank == {v: 0 for v in t.quiver.hidden}
    rep = closed_orbit_representative(point)
    assert all(np.allclose(m, 0) for m in rep.hidden_matrices.values())


@pytest.mark.parametrize("seed", range(15))
def test_closed_orbit_representative_reprojects(seed):
    q = quiver_d4tilde()
    dims = {v: 2 if v in ("v1", "v3") else 1 for v in q.vertices}
    rng = np.random.default_rng(seed)
    t = random_triple(q, dims, rng)
    if seed % 3 == 0:  # exercise rank-deficient orbits as well
        t.f["v1"] = np.zeros_like(t.f["v1"])
    m = project(t)
    m2 = project(closed_orbit_representative(m))
    for p in m.blocks:
        assert linalg.rel_err(m2.blocks[p], m.blocks[p]) < 1e-9


def test_resolution_point_d4tilde_generic():
    rng = np.random.default_rng(3)
    t = d4tilde_triple(
        *rng.uniform(0.5, 1.5, size=5),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
    )
    m = project(t)
    subspaces = resolution_data(t, m)
    assert verify_resolution_point(subspaces, m)


def test_resolution_point_shift_violation():
    rng = np.random.default_rng(3)
    t = d4tilde_triple(
        *rng.uniform(0.5, 1.5, size=5),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
    )
    m = project(t)
    subspaces = resolution_data(t, m)
    # replace the subspace at v3 by a generic hyperplane: shift compatibility
    # from v1/v2 fails almost surely
    amb = subspaces["v3"].shape[0]
    subspaces["v3"] = linalg.null(rng.standard_normal((1, amb)))
    assert not verify_resolution_point(subspaces, m)


def test_resolution_point_zero_moduli_point():
    """Against the zero point, kernel conditions hold automatically; only the
    shift conditions matter."""
    rng = np.random.default_rng(5)
    t_gen = d4tilde_triple(
        *rng.uniform(0.5, 1.5, size=5),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
    )
    subspaces = resolution_data(t_gen)
    t0 = d4tilde_triple(1, 1, 1, 1, 1, [1, 1], [1, 1], [1, 1], [1, 1])
    for k in t0.hidden_matrices:
        t0.hidden_matrices[k] = np.zeros_like(t0.hidden_matrices[k])
    for i in t0.quiver.hidden:
        t0.f[i] = np.zeros_like(t0.f[i])
        t0.h[i] = np.zeros_like(t0.h[i])
    m0 = project(t0)
    assert verify_resolution_point(subspaces, m0)


def test_resolution_point_codimension_check():
    rng = np.random.default_rng(3)
    t = d4tilde_triple(
        *rng.uniform(0.5, 1.5, size=5),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
        rng.uniform(0.5, 1.5, size=2),
    )
    m = project(t)
    subspaces = resolution_data(t, m)
    subspaces["v5"] = subspaces["v5"][:, :-1]  # drop a basis vector: wrong codim
    with pytest.raises(CodimensionMismatch):
        verify_resolution_point(subspaces, m)


@pytest.mark.parametrize("seed", range(20))
def test_separation_recovers_gauge_on_thin_simple_points(seed):
    q = quiver_d4tilde()
    dims = thin_dims(q)
    rng = np.random.default_rng(seed)
    t1 = random_triple(q, dims, rng)
    g = random_gauge(q, dims, rng)
    t2 = act(g, t1)
    found = recover_thin_gauge(t1, t2)
    assert found is not None
    moved = act(found, t1)
    for i in q.hidden:
        assert np.allclose(moved.f[i], t2.f[i], atol=1e-9)
        assert np.allclose(moved.h[i], t2.h[i], atol=1e-9)


def test_separation_rejects_different_orbits():
    q = quiver_d4tilde()
    dims = thin_dims(q)
    t1 = random_triple(q, dims, np.random.default_rng(1))
    t2 = random_triple(q, dims, np.random.default_rng(2))
    assert recover_thin_gauge(t1, t2) is None


@pytest.mark.parametrize("seed", range(10))
def test_rank_bounded_by_hidden_dims(seed):
    q = quiver_d4tilde()
    rng = np.random.default_rng(seed)
    dims = {v: int(rng.integers(1, 3)) if v.startswith("v") else 1 for v in q.vertices}
    t = random_triple(q, dims, rng)
    r = project(t).rank_vector()
    assert all(r[i] <= dims[i] for i in q.hidden)


def test_simple_with_zero_weight_exists(ten_arrow_quiver):
    """Simplicity does not force all weights nonzero when a vertex has more
    than one feeding arrow."""
    q = ten_arrow_quiver
    weights = {a.id: 1.0 for a in q.arrows}
    weights["e12"] = 0.0
    t = thin_rep(q, weights)
    assert is_simple(t)
    assert project(t).rank_vector() == {i: 1 for i in q.hidden}
