"""Exact discrete optimal transport by the transportation (network) simplex.

Bases are spanning trees of the complete bipartite supply/demand graph.
The initial tree comes from the northwest-corner rule; the entering cell is
the most negative reduced cost (Dantzig), switching to Bland's smallest-index
rule after ``10*(m+n)`` consecutive degenerate pivots. Zero-mass basic cells
are kept as they are, no perturbation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from .errors import DomainError, SolverError, ValidationError
from .measures import Coupling, FinitePointMeasure, is_dirac

PIVOT_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
DEGENERATE_RUN_FACTOR = 10  # Bland after this many * (m+n) degenerate pivots in a row


@dataclass(frozen=True, eq=False)
class TransportResult:
    plan: Coupling
    cost: float
    dual_u: np.ndarray
    dual_v: np.ndarray
    pivots: int = 0

    def certificate_errors(self, cost) -> dict:
        """Worst violations of dual feasibility, complementary slackness and strong duality."""
        cost = np.asarray(cost, dtype=float)
        slack = cost - self.dual_u[:, None] - self.dual_v[None, :]
        support = self.plan.mass > 1e-12
        dual_obj = float(self.dual_u @ self.plan.source + self.dual_v @ self.plan.target)
        return {
            "dual_feasibility": float(max(0.0, -slack.min())),
            "complementary_slackness": float(np.abs(slack[support]).max()) if support.any() else 0.0,
            "strong_duality": abs(dual_obj - self.cost),
        }

    def certificate_ok(self, cost, tol: float = FEASIBILITY_TOL) -> bool:
        return all(v <= tol for v in self.certificate_errors(cost).values())

    def to_json(self, p: float | None = None) -> dict:
        out = {
            "cost": self.cost,
            "plan": self.plan.mass.tolist(),
            "dual_u": self.dual_u.tolist(),
            "dual_v": self.dual_v.tolist(),
        }
        if p is not None:
            out["p"] = p
            out["wp"] = float(self.cost ** (1.0 / p)) if self.cost > 0 else 0.0
        return out


def power(d, p: float):
    """d**p computed as exp(p log d), with 0 -> 0."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = np.exp(p * np.log(d[pos]))
    return out


def cost_matrix(s: sp.SpaceDescriptor, mu: FinitePointMeasure, nu: FinitePointMeasure, p: float = 1.0) -> np.ndarray:
    if not p >= 1:
        raise ValidationError("INVALID_P", f"p={p} (need p >= 1)")
    if mu.space != s or nu.space != s:
        raise DomainError("SPACE_MISMATCH", f"{mu.space} / {nu.space} vs {s}")
    return power(sp.pairwise_distances(s, mu.atoms, nu.atoms), p)


class _Tree:
    """Spanning-tree basis over rows 0..m-1 and columns m..m+n-1."""

    def __init__(self, m, n, cells):
        self.m, self.n = m, n
        self.cells = set(cells)
        self.adj = [set() for _ in range(m + n)]
        for i, j in cells:
            self.adj[i].add(m + j)
            self.adj[m + j].add(i)

    def add(self, i, j):
        self.cells.add((i, j))
        self.adj[i].add(self.m + j)
        self.adj[self.m + j].add(i)

    def remove(self, i, j):
        self.cells.discard((i, j))
        self.adj[i].discard(self.m + j)
        self.adj[self.m + j].discard(i)

    def flows(self, supply, demand):
        """Basic solution on the tree, by peeling leaves."""
        m = self.m
        resid = np.concatenate([supply, demand]).astype(float)
        deg = [len(a) for a in self.adj]
        live = [set(a) for a in self.adj]
        x = {}
        leaves = deque(v for v in range(len(deg)) if deg[v] == 1)
        while leaves:
            v = leaves.popleft()
            if deg[v] != 1:
                continue
            (w,) = live[v]
            amount = resid[v]
            resid[w] -= amount
            resid[v] = 0.0
            cell = (v, w - m) if v < m else (w, v - m)
            x[cell] = max(amount, 0.0)
            live[v].discard(w)
            live[w].discard(v)
            deg[v] -= 1
            deg[w] -= 1
            if deg[w] == 1:
                leaves.append(w)
        return x

    def potentials(self, C):
        m, n = self.m, self.n
        u = np.zeros(m)
        v = np.zeros(n)
        seen = [False] * (m + n)
        seen[0] = True
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for b in self.adj[a]:
                if seen[b]:
                    continue
                seen[b] = True
                if a < m:
                    v[b - m] = C[a, b - m] - u[a]
                else:
                    u[b] = C[b, a - m] - v[a - m]
                queue.append(b)
        return u, v

    def cycle(self, i, j):
        """Cells of the cycle closed by entering (i, j), alternating +,-,+,...; entering first."""
        m = self.m
        start, goal = m + j, i
        parent = {start: None}
        queue = deque([start])
        while queue and goal not in parent:
            a = queue.popleft()
            for b in self.adj[a]:
                if b not in parent:
                    parent[b] = a
                    queue.append(b)
        path = [goal]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        # path runs goal(row i) -> ... -> start(col j); walk it from col j back to row i
        path.reverse()
        cells = [(i, j)]
        for a, b in zip(path[:-1], path[1:]):
            cells.append((b, a - m) if a >= m else (a, b - m))
        return cells


def _northwest_corner(supply, demand):
    m, n = len(supply), len(demand)
    s, d = supply.copy(), demand.copy()
    cells = []
    i = j = 0
    while True:
        amount = min(s[i], d[j])
        s[i] -= amount
        d[j] -= amount
        cells.append((i, j))
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif s[i] <= d[j]:
            # on ties the next cell (i+1, j) is a zero-mass basic cell
            i += 1
        else:
            j += 1
    return cells


def solve_transport(cost, wmu, wnu) -> TransportResult:
    """Minimise sum c_ij pi_ij over couplings of ``wmu`` (rows) and ``wnu`` (columns)."""
    C = np.asarray(cost, dtype=float)
    a = np.asarray(wmu, dtype=float).reshape(-1)
    b = np.asarray(wnu, dtype=float).reshape(-1)
    m, n = a.size, b.size
    if C.shape != (m, n):
        raise ValidationError("DIMENSION_MISMATCH", f"cost {C.shape} vs weights {m}x{n}")
    if m == 0 or n == 0:
        raise ValidationError("DIMENSION_MISMATCH", "empty marginal")
    if not np.all(np.isfinite(C)) or np.any(C < 0):
        raise ValidationError("BAD_COST", "cost entries must be finite and nonnegative")
    if np.any(a < 0) or np.any(b < 0):
        raise ValidationError("NEGATIVE_WEIGHT", "transport weights must be nonnegative")
    if abs(a.sum() - b.sum()) > FEASIBILITY_TOL:
        raise ValidationError("INFEASIBLE_WEIGHTS", f"sums {a.sum()!r} vs {b.sum()!r}")
    b = b * (a.sum() / b.sum())

    tree = _Tree(m, n, _northwest_corner(a, b))
    x = tree.flows(a, b)
    eps = PIVOT_TOL * max(1.0, float(C.max()))
    cap = 1000 * m * n
    degenerate_run = 0
    pivots = 0
    while True:
        u, v = tree.potentials(C)
        reduced = C - u[:, None] - v[None, :]
        bland = degenerate_run >= DEGENERATE_RUN_FACTOR * (m + n)
        if bland:
            neg = np.flatnonzero(reduced.ravel() < -eps)
            if neg.size == 0:
                break
            k = int(neg[0])
        else:
            k = int(np.argmin(reduced))
            if reduced.flat[k] >= -eps:
                break
        if pivots >= cap:
            raise SolverError("ITERATION_LIMIT", f"{pivots} pivots on a {m}x{n} problem")
        ie, je = divmod(k, n)
        cyc = tree.cycle(ie, je)
        minus = cyc[1::2]
        theta = min(x[c] for c in minus)
        ties = [c for c in minus if x[c] <= theta + PIVOT_TOL]
        leave = min(ties, key=lambda c: c[0] * n + c[1]) if bland else ties[0]
        tree.remove(*leave)
        tree.add(ie, je)
        x = tree.flows(a, b)
        pivots += 1
        degenerate_run = degenerate_run + 1 if theta <= PIVOT_TOL else 0

    mass = np.zeros((m, n))
    for (i, j), val in x.items():
        mass[i, j] = val
    plan = Coupling(mass, a, b)
    return TransportResult(plan, float(np.sum(C * mass)), u, v, pivots)


def transport(s: sp.SpaceDescriptor, mu: FinitePointMeasure, nu: FinitePointMeasure, p: float = 1.0) -> TransportResult:
    return solve_transport(cost_matrix(s, mu, nu, p), mu.weights, nu.weights)


def wasserstein(s: sp.SpaceDescriptor, mu: FinitePointMeasure, nu: FinitePointMeasure, p: float = 1.0) -> float:
    """W_p(mu, nu): the p-th root of the optimal transport cost for d^p."""
    if not p >= 1:
        raise ValidationError("INVALID_P", f"p={p} (need p >= 1)")
    if mu.space != s or nu.space != s:
        raise DomainError("SPACE_MISMATCH", f"{mu.space} / {nu.space} vs {s}")
    if is_dirac(mu) and is_dirac(nu):
        return sp.distance(s, mu.atom(0), nu.atom(0))
    c = transport(s, mu, nu, p).cost
    return float(c ** (1.0 / p)) if c > 0 else 0.0
