"""Measure-space isometries and the Dirac characterisation on the sphere.

Each constructor returns a :class:`MeasureTransform` mapping a measure to a
measure on the same space. The sphere tools check two things numerically:
a measure has a partner at W_p-distance 1 iff it is a Dirac mass, and a
W_p isometry sends Dirac masses to Dirac masses through a point isometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import spaces as sp
from .errors import DomainError, ValidationError
from .measures import (
    FinitePointMeasure,
    canonicalize,
    center_of_mass,
    dirac,
    is_dirac,
    push_forward,
    random_measure,
    same_measure,
    translate,
)
from .metrics import distance_by_name
from .transport import power, wasserstein


@dataclass(frozen=True, eq=False)
class MeasureTransform:
    name: str
    params: dict
    evaluator: Callable[[FinitePointMeasure], FinitePointMeasure] = field(repr=False)

    def __call__(self, mu: FinitePointMeasure) -> FinitePointMeasure:
        return self.evaluator(mu)


def lift_isometry(psi: sp.IsometryMap) -> MeasureTransform:
    """psi -> psi_#."""
    return MeasureTransform("pushforward", {"map": psi}, lambda mu: push_forward(mu, psi))


def kloeckner_isometry(Q) -> MeasureTransform:
    """Rotate each measure about its own center of mass by the orthogonal ``Q``.

    A W_2 isometry of P_2(R^n) fixing every Dirac mass; it is not induced by
    any single point map when Q is not the identity.
    """
    rot = Q if isinstance(Q, sp.OrthogonalMap) else sp.OrthogonalMap(Q)

    def evaluate(mu):
        if mu.space.is_discrete:
            raise DomainError("DISCRETE_SPACE_UNSUPPORTED", "kloeckner map needs R^n")
        if mu.space.kind not in ("line", "euclidean") or mu.space.dim != rot.dim:
            raise DomainError("WRONG_SPACE", f"kloeckner map for R^{rot.dim} applied on {mu.space}")
        c = center_of_mass(mu)
        return translate(push_forward(translate(mu, -c), rot), c)

    return MeasureTransform("kloeckner", {"Q": rot.Q}, evaluate)


def ks_isometry(psi: sp.MonotoneRealMap, increasing: bool = True) -> MeasureTransform:
    """KS isometry F_{phi mu}(t) = F_mu(psi(t)) (increasing psi) or
    1 - F_mu(psi(t)-) (decreasing psi); both are push-forward by psi^{-1}."""
    if not isinstance(psi, sp.MonotoneRealMap) or psi.increasing != increasing:
        raise ValidationError("NOT_BIJECTIVE", "monotonicity of psi does not match the flag")
    inv = psi.inverse()
    name = "ks_increasing" if increasing else "ks_decreasing"
    return MeasureTransform(name, {"psi": psi}, lambda mu: push_forward(mu, inv))


def levy_isometry(c: float, reflect: bool = False) -> MeasureTransform:
    """F_{phi mu}(t) = F_mu(t + c), or 1 - F_mu((c - t)-) when reflecting."""
    c = float(c)
    if reflect:
        f = sp.AffineMap([[-1.0]], [c])
        name = "levy_reflection"
    else:
        f = sp.AffineMap([[1.0]], [-c])
        name = "levy_translation"
    return MeasureTransform(name, {"c": c}, lambda mu: push_forward(mu, f))


def kuiper_isometry(g: sp.MonotoneRealMap) -> MeasureTransform:
    return MeasureTransform("kuiper_homeo", {"g": g}, lambda mu: push_forward(mu, g))


def lp_isometry(psi: sp.AffineMap) -> MeasureTransform:
    if not isinstance(psi, sp.AffineMap):
        raise ValidationError("NOT_ORTHOGONAL", "Lévy-Prokhorov isometry needs an affine map")
    return MeasureTransform("lp_affine", {"map": psi}, lambda mu: push_forward(mu, psi))


# --------------------------------------------------------------------------
# sphere: Dirac characterisation


def _require_sphere(s):
    if s.kind != "sphere":
        raise DomainError("WRONG_SPACE", f"needs a sphere, got {s}")


def probe_grid(s: sp.SpaceDescriptor, count: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Probe points on the radius-1/2 sphere.

    Uniform angles for n = 2, a Fibonacci lattice for n = 3, seeded random
    points for n >= 4.
    """
    _require_sphere(s)
    n = s.dim
    if n == 2:
        theta = 2 * np.pi * np.arange(count) / count
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif n == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        r = np.sqrt(1 - z * z)
        phi = np.pi * (1 + 5**0.5) * k
        pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        pts = rng.standard_normal((count, n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return sp.SPHERE_RADIUS * pts


def dirac_integrals(mu: FinitePointMeasure, p: float, probes) -> np.ndarray:
    """y -> sum_i w_i d(x_i, y)^p at each probe: the product-coupling cost of (mu, delta_y)."""
    probes = np.asarray(probes, dtype=float).reshape(-1, mu.space.dim)
    return power(sp.pairwise_distances(mu.space, probes, mu.atoms), p) @ mu.weights


def dirac_sup_profile(s: sp.SpaceDescriptor, mu: FinitePointMeasure, p: float, probes):
    _require_sphere(s)
    if mu.space != s:
        raise DomainError("WRONG_SPACE", f"{mu.space} vs {s}")
    probes = np.asarray(probes, dtype=float).reshape(-1, s.dim)
    if probes.shape[0] == 0:
        raise ValidationError("EMPTY_PROBES", "need at least one probe")
    vals = dirac_integrals(mu, p, probes)
    k = int(np.argmax(vals))
    return float(vals[k]), probes[k].copy()


@dataclass
class DiracReport:
    dirac: bool
    passed: bool
    worst_wp: float
    max_bound: float
    margin: float
    opponents: int
    witness: dict


def verify_dirac_characterization(
    s: sp.SpaceDescriptor,
    mu: FinitePointMeasure,
    p: float,
    probe_count: int = 200,
    rng: np.random.Generator | None = None,
    random_opponents: int = 20,
    bound_tol: float = 1e-10,
) -> DiracReport:
    """Check that mu has a partner at W_p-distance 1 exactly when it is a Dirac mass.

    Dirac mu: W_p(delta_x, delta_{-x}) must equal 1 within 1e-12.
    Otherwise every opponent nu (probe Diracs, the antipodes of mu's atoms and
    random multi-atom measures) must satisfy W_p^p <= product-coupling cost < 1.
    """
    _require_sphere(s)
    rng = rng if rng is not None else np.random.default_rng(0)
    if is_dirac(mu):
        x = mu.atom(0)
        w = wasserstein(s, mu, dirac(s, sp.antipode(x)), p)
        err = abs(w - 1.0)
        return DiracReport(True, err <= 1e-12, w, 1.0, 0.0, 1, {"x": x.tolist(), "W_p": w, "error": err})

    probes = np.concatenate([probe_grid(s, probe_count, rng), -mu.atoms])
    bounds, wps = [], []
    for y in probes:
        nu = dirac(s, sp.SPHERE_RADIUS * y / np.linalg.norm(y))
        bounds.append(float(dirac_integrals(mu, p, nu.atoms)[0]))
        wps.append(wasserstein(s, mu, nu, p))
    for _ in range(random_opponents):
        nu = random_measure(s, int(rng.integers(2, 6)), rng)
        bounds.append(float(dirac_integrals(mu, p, nu.atoms) @ nu.weights))
        wps.append(wasserstein(s, mu, nu, p))
    bounds, wps = np.array(bounds), np.array(wps)
    below = bool(np.all(wps < 1.0))
    dominated = bool(np.all(wps**p <= bounds + bound_tol))
    separated = bool(np.all(bounds < 1.0))
    k = int(np.argmax(wps))
    return DiracReport(
        False,
        below and dominated and separated,
        float(wps[k]),
        float(bounds.max()),
        float(1.0 - bounds.max()),
        len(wps),
        {"worst_opponent": k, "W_p": float(wps[k]), "bound": float(bounds[k]),
         "below_one": below, "bound_dominates": dominated, "bound_below_one": separated},
    )


@dataclass
class PointMap:
    sample: np.ndarray
    images: np.ndarray
    isometry_defect: float


def extract_point_map(phi: MeasureTransform, s: sp.SpaceDescriptor, sample) -> PointMap:
    """Read off T with phi(delta_x) = delta_{T(x)} and measure how far T is from an isometry."""
    _require_sphere(s)
    sample = np.asarray(sample, dtype=float).reshape(-1, s.dim)
    images = []
    for x in sample:
        img = phi(dirac(s, x))
        if not is_dirac(img):
            raise DomainError("IMAGE_NOT_DIRAC", f"phi(delta_x) has {len(img)} atoms for x = {x.tolist()}")
        images.append(img.atom(0))
    images = np.array(images)
    d_in = sp.pairwise_distances(s, sample, sample)
    d_out = sp.pairwise_distances(s, images, images)
    return PointMap(sample, images, float(np.abs(d_out - d_in).max()))


def collapse_transform(s: sp.SpaceDescriptor, x0) -> MeasureTransform:
    """Every measure to delta_{x0}: maps Diracs to Diracs but is no isometry."""
    target = dirac(s, x0)
    return MeasureTransform("collapse", {"x0": np.asarray(x0)}, lambda mu: target)


def antipodal_mix_transform(s: sp.SpaceDescriptor, t: float = 0.5) -> MeasureTransform:
    """mu -> (1-t) mu + t (-id)_# mu: sends Diracs to two-atom measures."""

    def evaluate(mu):
        flipped = mu.atoms * -1.0
        atoms = np.concatenate([mu.atoms, flipped])
        weights = np.concatenate([(1 - t) * mu.weights, t * mu.weights])
        return canonicalize(FinitePointMeasure(s, atoms, weights))

    return MeasureTransform("antipodal_mix", {"t": t}, evaluate)


# --------------------------------------------------------------------------
# bidual characterisation (restricted to a finite universe)


def _metric_fn(metric, p=1.0):
    if callable(metric):
        return metric
    return lambda a, b: distance_by_name(metric, a, b, p)


def bidual_set(universe, metric, S, tol: float = 1e-9, p: float = 1.0) -> list:
    """U(S): members of ``universe`` at distance exactly 1 from every element of S."""
    rho = _metric_fn(metric, p)
    return [y for y in universe if all(abs(rho(y, s) - 1.0) <= tol for s in S)]


def _index_in(universe, items):
    out = []
    for m in items:
        for k, u in enumerate(universe):
            if same_measure(u, m):
                out.append(k)
                break
    return sorted(out)


def bidual_check(universe, metric, mu, tol: float = 1e-9, p: float = 1.0) -> dict:
    """Does U(U({mu})) == {mu} inside ``universe``? A finite-universe proxy only."""
    once = bidual_set(universe, metric, [mu], tol, p)
    twice = bidual_set(universe, metric, once, tol, p)
    fixed = len(twice) == 1 and same_measure(twice[0], mu)
    return {
        "U": _index_in(universe, once),
        "UU": _index_in(universe, twice),
        "fixed_point": fixed,
        "dirac": is_dirac(mu),
    }
