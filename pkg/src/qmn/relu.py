"""Momentum-map values, level-set membership, and positive-gauge balancing.

The per-vertex momentum value collects incoming squares minus outgoing squares
of a triple; its zero and identity level sets model the two moduli spaces for
the positive-scaling subgroup relevant to ReLU networks.  `balance` searches a
positive gauge moving a thin triple onto a prescribed level set.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, ShapeMismatch
from .rep import DoubleFramedTriple, act


@dataclass
class MomentumValue:
    values: dict  # hidden vertex -> symmetric (d_i, d_i) matrix

    def scalars(self):
        out = {}
        for i, m in self.values.items():
            if m.shape != (1, 1):
                raise ShapeMismatch("scalar view needs thin hidden dimensions")
            out[i] = float(m[0, 0])
        return out


def momentum(t: DoubleFramedTriple) -> MomentumValue:
    """Per hidden vertex: sum of V V* over in-arrows minus V* V over out-arrows,
    plus f f* minus h* h.  Real scalars; adjoints are transposes."""
    q = t.quiver
    hq = q.hidden_quiver()
    vals = {}
    for i in q.hidden:
        d = t.dims[i]
        m = np.zeros((d, d))
        for a in hq.arrows_into(i):
            v = t.hidden_matrices[a.id]
            m += v @ v.T
        for a in hq.arrows_out_of(i):
            v = t.hidden_matrices[a.id]
            m -= v.T @ v
        m += t.f[i] @ t.f[i].T
        m -= t.h[i].T @ t.h[i]
        vals[i] = m
    return MomentumValue(vals)


@dataclass
class LevelSetReport:
    membership: dict  # hidden vertex -> bool
    residuals: dict  # hidden vertex -> Frobenius distance to the target level
    target: float

    def all_member(self):
        return all(self.membership.values())


def level_set_membership(t: DoubleFramedTriple, target: float, tol=1e-8) -> LevelSetReport:
    """Distance of the momentum value to target * identity, per vertex."""
    mu = momentum(t)
    membership, residuals = {}, {}
    for i, m in mu.values.items():
        d = m.shape[0]
        resid = float(np.linalg.norm(m - float(target) * np.eye(d)))
        residuals[i] = resid
        membership[i] = resid <= tol
    return LevelSetReport(membership=membership, residuals=residuals, target=float(target))


@dataclass
class BalanceResult:
    gauge: dict  # hidden vertex -> positive scalar
    triple: DoubleFramedTriple
    sweeps: int
    residual: float


def balance(
    t: DoubleFramedTriple, target: float, tol=1e-8, max_sweeps=10**4
) -> BalanceResult:
    """Find positive scalars g_i with the momentum of g . t on the target level.

    Cyclic coordinate descent: with the other factors frozen, the vertex value
    is A s - B / s in s = g_i^2, monotone in s, so each update is exact.
    Raises NoConvergence when the residual stalls above tol (for instance when
    no positive-gauge representative exists on that level set).
    """
    q = t.quiver
    if any(t.dims[i] != 1 for i in q.hidden):
        raise ShapeMismatch("balancing is implemented for thin hidden dimensions")
    hq = q.hidden_quiver()
    target = float(target)
    s = {i: 1.0 for i in q.hidden}  # squared gauge factors

    def vertex_masses(i):
        a = float(np.sum(t.f[i] ** 2))
        for ar in hq.arrows_into(i):
            a += t.hidden_matrices[ar.id][0, 0] ** 2 / s[ar.source]
        b = float(np.sum(t.h[i] ** 2))
        for ar in hq.arrows_out_of(i):
            b += t.hidden_matrices[ar.id][0, 0] ** 2 * s[ar.target]
        return a, b

    def residual():
        worst = 0.0
        for i in q.hidden:
            a, b = vertex_masses(i)
            worst = max(worst, abs(a * s[i] - b / s[i] - target))
        return worst

    sweeps = 0
    res = residual()
    prev = None
    for sweeps in range(1, max_sweeps + 1):
        for i in q.hidden:
            a, b = vertex_masses(i)
            if a > 0.0:
                s[i] = (target + math.sqrt(target**2 + 4.0 * a * b)) / (2.0 * a)
                if s[i] <= 0.0:
                    # target <= 0 with b == 0: the level is unreachable here
                    s[i] = 1.0
            elif b > 0.0 and target < 0.0:
                s[i] = b / (-target)
            # a == 0, b == 0, or unreachable sign: leave s[i]; residual decides
        res = residual()
        if res <= tol or res == prev:
            break
        prev = res
    if res > tol:
        raise NoConvergence(sweeps, res)
    gauge = {i: np.array([[math.sqrt(s[i])]]) for i in q.hidden}
    return BalanceResult(gauge=gauge, triple=act(gauge, t), sweeps=sweeps, residual=res)
