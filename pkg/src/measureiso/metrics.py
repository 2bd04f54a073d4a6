"""Total variation, Kolmogorov-Smirnov, Kuiper, Lévy, Lévy-Prokhorov and the
CDF form of W_1, computed exactly from their definitions for atomic measures.

Atoms of the two measures closer than 1e-12 are identified before any
comparison, so all distances here agree on which atoms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from .errors import DomainError, ValidationError
from .measures import MERGE_TOL, FinitePointMeasure

LEVY_TOL = 1e-10
LP_MAX_SUPPORT = 15


@dataclass(frozen=True, eq=False)
class StepCDF:
    """Right-continuous step CDF: ``values[k]`` is F at and after ``breakpoints[k]``."""

    breakpoints: np.ndarray
    values: np.ndarray

    def eval(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right")
        return np.where(idx > 0, self.values[np.maximum(idx - 1, 0)], 0.0)

    def eval_left(self, t):
        """Left limit F(t-) = mass of (-inf, t)."""
        idx = np.searchsorted(self.breakpoints, t, side="left")
        return np.where(idx > 0, self.values[np.maximum(idx - 1, 0)], 0.0)

    __call__ = eval


def _require_line(*ms):
    for m in ms:
        if m.space.kind != "line":
            raise DomainError("WRONG_SPACE", f"needs the real line, got {m.space}")


def _require_same_space(mu, nu):
    if mu.space != nu.space:
        raise DomainError("SPACE_MISMATCH", f"{mu.space} vs {nu.space}")


def cdf_of(m: FinitePointMeasure) -> StepCDF:
    _require_line(m)
    order = np.argsort(m.atoms[:, 0], kind="stable")
    values = np.cumsum(m.weights[order])
    values[-1] = 1.0
    return StepCDF(m.atoms[order, 0].copy(), values)


def joint_support(mu: FinitePointMeasure, nu: FinitePointMeasure):
    """Union of both supports (atoms within 1e-12 identified) and aligned weights.

    Returns ``(atoms, w_mu, w_nu)``; on the line the atoms are sorted.
    """
    _require_same_space(mu, nu)
    s = mu.space
    d = sp.pairwise_distances(s, mu.atoms, nu.atoms)
    match = np.full(len(nu), -1)
    for j in range(len(nu)):
        i = int(np.argmin(d[:, j]))
        if d[i, j] <= MERGE_TOL:
            match[j] = i
    extra = np.flatnonzero(match < 0)
    atoms = np.concatenate([mu.atoms, nu.atoms[extra]])
    wm = np.concatenate([mu.weights, np.zeros(extra.size)])
    wn = np.zeros(atoms.shape[0])
    for j in range(len(nu)):
        k = match[j] if match[j] >= 0 else len(mu) + int(np.searchsorted(extra, j))
        wn[k] += nu.weights[j]
    if s.kind == "line":
        order = np.argsort(atoms[:, 0], kind="stable")
        atoms, wm, wn = atoms[order], wm[order], wn[order]
    return atoms, wm, wn


def _line_grid(mu, nu):
    _require_line(mu, nu)
    z, wm, wn = joint_support(mu, nu)
    return z[:, 0], np.cumsum(wm), np.cumsum(wn)


def tv_distance(mu: FinitePointMeasure, nu: FinitePointMeasure) -> float:
    """sup_B |mu(B) - nu(B)|, attained at B = {atoms where mu outweighs nu}."""
    _, wm, wn = joint_support(mu, nu)
    return float(np.clip(wm - wn, 0.0, None).sum())


def ks_distance(mu: FinitePointMeasure, nu: FinitePointMeasure) -> float:
    _, Fm, Fn = _line_grid(mu, nu)
    return float(np.abs(Fm - Fn).max())


def kuiper_distance(mu: FinitePointMeasure, nu: FinitePointMeasure) -> float:
    """sup over intervals of |mu(I) - nu(I)| = sup(F_mu - F_nu) - inf(F_mu - F_nu).

    Left limits of the difference at an atom are right values at the previous
    atom, and the difference vanishes at both infinities, so 0 joins the range.
    """
    _, Fm, Fn = _line_grid(mu, nu)
    delta = np.append(Fm - Fn, 0.0)
    return float(delta.max() - delta.min())


def w1_cdf(mu: FinitePointMeasure, nu: FinitePointMeasure) -> float:
    """Integral of |F_mu - F_nu| over the line."""
    z, Fm, Fn = _line_grid(mu, nu)
    return float(np.sum(np.abs(Fm - Fn)[:-1] * np.diff(z)))


def _levy_feasible(z, Fm, Fn, eps) -> bool:
    """F(t-eps) - eps <= G(t) <= F(t+eps) + eps at every t (F = mu, G = nu)."""

    def F(t):
        idx = np.searchsorted(z, t, side="right")
        return np.where(idx > 0, Fm[np.maximum(idx - 1, 0)], 0.0)

    def G(t):
        idx = np.searchsorted(z, t, side="right")
        return np.where(idx > 0, Fn[np.maximum(idx - 1, 0)], 0.0)

    # jumps of G(t) are at z, of F(t-eps) at z+eps, of F(t+eps) at z-eps;
    # at the shifted points the F term that jumps there is read off exactly
    lo = F(z - eps) - eps
    hi = F(z + eps) + eps
    g = Fn
    if np.any(lo > g) or np.any(g > hi):
        return False
    t = z + eps
    if np.any(Fm - eps > G(t)) or np.any(G(t) > F(z + 2 * eps) + eps):
        return False
    t = z - eps
    if np.any(F(z - 2 * eps) - eps > G(t)) or np.any(G(t) > Fm + eps):
        return False
    return True


def levy_distance(mu: FinitePointMeasure, nu: FinitePointMeasure, tol: float = LEVY_TOL) -> float:
    """inf{eps : F(t-eps) - eps <= G(t) <= F(t+eps) + eps for all t}, by bisection on [0, 1]."""
    z, Fm, Fn = _line_grid(mu, nu)
    if np.all(np.abs(Fm - Fn) <= 1e-15):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_feasible(z, Fm, Fn, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def levy_prokhorov_distance(mu: FinitePointMeasure, nu: FinitePointMeasure) -> float:
    """inf{eps > 0 : mu(A) <= nu(A^eps) + eps for all Borel A}, open enlargements.

    Only subsets A of supp(mu) matter. For fixed A, nu(A^eps) is the nu-mass of
    atoms y with D_A(y) = min_{x in A} d(x, y) < eps, a step function of eps
    that is constant on each interval (t_k, t_{k+1}] between consecutive sorted
    D_A values. On that interval the constraint reads eps >= mu(A) - c_k, so
    the smallest feasible eps for A is the first interval's
    max(t_k, mu(A) - c_k) that still fits. The distance is the largest of
    these over all nonempty A.
    """
    _require_same_space(mu, nu)
    k = len(mu)
    if k > LP_MAX_SUPPORT:
        raise DomainError("SUPPORT_TOO_LARGE", f"|supp mu| = {k} > {LP_MAX_SUPPORT}")
    d = sp.pairwise_distances(mu.space, mu.atoms, nu.atoms)
    n = len(nu)
    nmask = 1 << k

    # D[mask, j] = min over i in mask of d[i, j]; mass[mask] = mu(mask)
    D = np.full((nmask, n), np.inf)
    mass = np.zeros(nmask)
    for mask in range(1, nmask):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        D[mask] = np.minimum(D[rest], d[i])
        mass[mask] = mass[rest] + mu.weights[i]
    D, mass = D[1:], mass[1:]

    order = np.argsort(D, axis=1, kind="stable")
    t = np.take_along_axis(D, order, axis=1)
    c = np.cumsum(nu.weights[order], axis=1)
    rows = D.shape[0]
    # interval k is (t_k, t_{k+1}] with t_0 = 0, t_{n+1} = inf and nu-mass c_k (c_0 = 0)
    t_lo = np.concatenate([np.zeros((rows, 1)), t], axis=1)
    t_hi = np.concatenate([t, np.full((rows, 1), np.inf)], axis=1)
    c_k = np.concatenate([np.zeros((rows, 1)), c], axis=1)
    cand = np.maximum(t_lo, mass[:, None] - c_k)
    ok = (t_lo < t_hi) & (cand <= t_hi)
    best = np.where(ok, cand, np.inf).min(axis=1)
    return float(max(0.0, best.max()))


def distance_by_name(name: str, mu: FinitePointMeasure, nu: FinitePointMeasure, p: float = 1.0) -> float:
    """Dispatch used by the CLI and the bidual check."""
    from .transport import wasserstein

    if name == "wp":
        return wasserstein(mu.space, mu, nu, p)
    fn = METRICS.get(name)
    if fn is None:
        raise ValidationError("UNKNOWN_METRIC", name)
    return fn(mu, nu)


METRICS = {
    "tv": tv_distance,
    "ks": ks_distance,
    "kuiper": kuiper_distance,
    "levy": levy_distance,
    "lp": levy_prokhorov_distance,
    "w1cdf": w1_cdf,
}
