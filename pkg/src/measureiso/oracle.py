"""Brute-force transport oracle, deliberately sharing no code with the simplex solver.

Every vertex of the transportation polytope is the basic solution of some
spanning tree of K_{m,n}. We enumerate all (m+n-1)-subsets of cells, keep the
ones whose marginal system is nonsingular (exactly the spanning trees, since
the incidence matrix is totally unimodular), solve them in one batched
``np.linalg.solve`` and take the cheapest nonnegative solution.
"""

from itertools import combinations

import numpy as np

from .errors import DomainError

MAX_NODES = 9
_NEG_TOL = 1e-12


def oracle_transport(cost, wmu, wnu) -> float:
    C = np.asarray(cost, dtype=float)
    a = np.asarray(wmu, dtype=float).reshape(-1)
    b = np.asarray(wnu, dtype=float).reshape(-1)
    m, n = a.size, b.size
    if m + n > MAX_NODES:
        raise DomainError("TOO_LARGE", f"m+n={m + n} > {MAX_NODES}")
    k = m + n - 1
    cells = [(i, j) for i in range(m) for j in range(n)]
    subsets = np.array(list(combinations(range(m * n), k)), dtype=np.int64).reshape(-1, k)

    # incidence rows: one per row-marginal and col-marginal constraint; the last one is redundant
    incidence = np.zeros((m + n, m * n))
    for c, (i, j) in enumerate(cells):
        incidence[i, c] = 1.0
        incidence[m + j, c] = 1.0
    A = incidence[:k]
    rhs = np.concatenate([a, b])[:k]

    mats = np.transpose(A[:, subsets], (1, 0, 2))  # (trees, k, k)
    det = np.linalg.det(mats)
    trees = np.abs(det) > 0.5
    mats, subsets = mats[trees], subsets[trees]
    sols = np.linalg.solve(mats, np.broadcast_to(rhs, (len(mats), k))[..., None])[..., 0]
    feasible = np.all(sols >= -_NEG_TOL, axis=1)
    costs = np.sum(C.ravel()[subsets] * np.clip(sols, 0.0, None), axis=1)
    return float(costs[feasible].min())
