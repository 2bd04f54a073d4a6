"""Finitely supported probability measures and couplings."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from .errors import DomainError, ValidationError
from .spaces import SpaceDescriptor

MERGE_TOL = 1e-12
SUM_TOL = 1e-12
INPUT_SUM_TOL = 1e-9
MARGINAL_TOL = 1e-10


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FinitePointMeasure:
    """Atoms of ``space`` with positive weights summing to one.

    ``atoms`` is an (k, dim) float array for continuous spaces and a length-k
    int array of labels for discrete ones. Build instances with
    :func:`measure` (or :func:`canonicalize`), which enforce the canonical
    form: no zero weights, no duplicate atoms, lexicographic atom order.
    """

    space: SpaceDescriptor
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        s = self.space
        if s.is_discrete:
            atoms = np.asarray(self.atoms).reshape(-1)
            if atoms.size and not np.all(atoms == np.round(atoms)):
                raise ValidationError("POINT_NOT_IN_SPACE", "labels must be integers")
            atoms = atoms.astype(np.int64)
        else:
            atoms = np.asarray(self.atoms, dtype=float)
            if s.dim == 1 and atoms.ndim == 1:
                atoms = atoms.reshape(-1, 1)
            if atoms.ndim != 2 or atoms.shape[1] != s.dim:
                raise ValidationError("DIMENSION_MISMATCH", f"atoms shape {atoms.shape} for {s}")
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.shape[0] != atoms.shape[0]:
            raise ValidationError("DIMENSION_MISMATCH", "atoms and weights differ in length")
        object.__setattr__(self, "atoms", _frozen(atoms))
        object.__setattr__(self, "weights", _frozen(weights))

    def __len__(self):
        return self.weights.shape[0]

    @property
    def size(self) -> int:
        return len(self)

    def atom(self, i):
        a = self.atoms[i]
        return int(a) if self.space.is_discrete else a

    def points(self):
        return [self.atom(i) for i in range(len(self))]

    def is_canonical(self) -> bool:
        try:
            c = canonicalize(self)
        except ValidationError:
            return False
        return same_measure(c, self, tol=0.0)

    def to_json(self) -> dict:
        if self.space.is_discrete:
            atoms = [int(a) for a in self.atoms]
        else:
            atoms = [[float(c) for c in a] for a in self.atoms]
        return {"space": self.space.to_json(), "atoms": atoms, "weights": [float(w) for w in self.weights]}

    def __repr__(self):
        pts = ", ".join(
            f"{w:.4g}@{a if self.space.is_discrete else np.round(a, 6).tolist()}"
            for a, w in zip(self.atoms, self.weights)
        )
        return f"FinitePointMeasure({self.space}; {pts})"


def _lex_order(atoms: np.ndarray) -> np.ndarray:
    if atoms.ndim == 1:
        return np.argsort(atoms, kind="stable")
    return np.lexsort(atoms.T[::-1])


def _membership_errors(s, atoms):
    if s.is_discrete:
        return np.where((atoms >= 0) & (atoms < s.dim), 0.0, np.inf)
    err = np.where(np.all(np.isfinite(atoms), axis=1), 0.0, np.inf)
    if s.kind == "sphere":
        err = err + np.abs(np.linalg.norm(atoms, axis=1) - sp.SPHERE_RADIUS)
    return err


def canonicalize(m: FinitePointMeasure) -> FinitePointMeasure:
    """Drop zero weights, merge atoms closer than 1e-12, sort, renormalise."""
    s = m.space
    w = m.weights
    if np.any(~np.isfinite(w)):
        raise ValidationError("NEGATIVE_WEIGHT", "non-finite weight")
    if np.any(w < 0):
        raise ValidationError("NEGATIVE_WEIGHT", f"min weight {w.min():.3g}")
    total = float(w.sum())
    if abs(total - 1.0) > INPUT_SUM_TOL:
        raise ValidationError("SUM_OUT_OF_TOLERANCE", f"weights sum to {total!r}")
    bad = np.flatnonzero(_membership_errors(s, m.atoms) > sp.MEMBERSHIP_TOL)
    if bad.size:
        raise ValidationError("POINT_NOT_IN_SPACE", f"atom {m.atom(bad[0])} not in {s}")

    keep = w > 0
    atoms, w = m.atoms[keep], w[keep]
    order = _lex_order(atoms)
    atoms, w = atoms[order], w[order]

    # greedy clustering in lexicographic order; each cluster keeps its first atom
    rep = np.full(len(w), -1)
    if s.is_discrete:
        for i in range(len(w)):
            if i > 0 and atoms[i] == atoms[i - 1]:
                rep[i] = rep[i - 1]
            else:
                rep[i] = i
    else:
        d = sp.pairwise_distances(s, atoms, atoms)
        for i in range(len(w)):
            if rep[i] >= 0:
                continue
            close = (d[i] <= MERGE_TOL) & (rep < 0)
            rep[close] = i
    heads = np.flatnonzero(rep == np.arange(len(w)))
    merged = np.array([w[rep == h].sum() for h in heads])
    total = merged.sum()
    # already-normalised weights are left bit-for-bit alone so canonicalize is idempotent
    if abs(total - 1.0) > 1e-14:
        merged = merged / total
    return FinitePointMeasure(s, atoms[heads], merged)


def measure(space: SpaceDescriptor, atoms, weights=None) -> FinitePointMeasure:
    """Canonical measure from raw atoms; ``weights=None`` means uniform."""
    atoms = list(atoms) if not isinstance(atoms, np.ndarray) else atoms
    n = len(atoms)
    if n == 0:
        raise ValidationError("SUM_OUT_OF_TOLERANCE", "empty measure")
    if weights is None:
        weights = np.full(n, 1.0 / n)
    if space.is_discrete:
        raw = np.asarray(atoms).reshape(-1)
    else:
        raw = np.array([sp.as_point(space, a) for a in atoms], dtype=float)
    return canonicalize(FinitePointMeasure(space, raw, weights))


def dirac(space: SpaceDescriptor, x) -> FinitePointMeasure:
    return measure(space, [x], [1.0])


def is_dirac(m: FinitePointMeasure) -> bool:
    return len(m) == 1 or len(canonicalize(m)) == 1


def same_measure(a: FinitePointMeasure, b: FinitePointMeasure, tol: float = 1e-12) -> bool:
    """Equality of canonical forms: same atoms (within ``tol``) and weights (within ``tol``)."""
    if a.space != b.space or len(a) != len(b):
        return False
    if a.space.is_discrete:
        atoms_ok = np.array_equal(a.atoms, b.atoms)
    else:
        atoms_ok = bool(np.all(np.abs(a.atoms - b.atoms) <= tol))
    return atoms_ok and bool(np.all(np.abs(a.weights - b.weights) <= max(tol, 1e-15)))


def push_forward(m: FinitePointMeasure, f, target: SpaceDescriptor | None = None) -> FinitePointMeasure:
    """Image measure f_# m: atoms moved by ``f``, colliding images merged."""
    target = target or m.space
    images = [sp.apply(f, m.atom(i), target) for i in range(len(m))]
    if target.is_discrete:
        raw = np.array(images, dtype=np.int64)
    else:
        raw = np.array(images, dtype=float).reshape(len(m), target.dim)
        if target.kind == "sphere":
            # images passed the 1e-10 apply check; snap norms so canonical membership holds
            raw = sp.SPHERE_RADIUS * raw / np.linalg.norm(raw, axis=1, keepdims=True)
    return canonicalize(FinitePointMeasure(target, raw, m.weights))


def center_of_mass(m: FinitePointMeasure) -> np.ndarray:
    if m.space.is_discrete:
        raise DomainError("DISCRETE_SPACE_UNSUPPORTED", "no center of mass on a label set")
    return m.weights @ m.atoms


def translate(m: FinitePointMeasure, v) -> FinitePointMeasure:
    """Push forward by x -> x + v (Euclidean spaces only)."""
    if m.space.kind not in ("line", "euclidean"):
        raise DomainError("DISCRETE_SPACE_UNSUPPORTED", f"translation on {m.space}")
    v = np.asarray(v, dtype=float).reshape(-1)
    return canonicalize(FinitePointMeasure(m.space, m.atoms + v, m.weights))


# --------------------------------------------------------------------------
# couplings


@dataclass(frozen=True, eq=False)
class Coupling:
    """Nonnegative m x n mass matrix with the weights of ``source``/``target`` as marginals."""

    mass: np.ndarray
    source: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        src = np.asarray(self.source, dtype=float).reshape(-1)
        tgt = np.asarray(self.target, dtype=float).reshape(-1)
        if mass.shape != (src.size, tgt.size):
            raise ValidationError("DIMENSION_MISMATCH", f"mass {mass.shape} vs marginals {src.size}x{tgt.size}")
        if np.any(mass < 0):
            raise ValidationError("NEGATIVE_WEIGHT", f"min mass {mass.min():.3g}")
        if np.abs(mass.sum(axis=1) - src).max() > MARGINAL_TOL or np.abs(mass.sum(axis=0) - tgt).max() > MARGINAL_TOL:
            raise ValidationError("MARGINAL_MISMATCH", "coupling marginals do not match")
        object.__setattr__(self, "mass", _frozen(mass))
        object.__setattr__(self, "source", _frozen(src))
        object.__setattr__(self, "target", _frozen(tgt))

    @property
    def rows(self):
        return self.mass.shape[0]

    @property
    def cols(self):
        return self.mass.shape[1]


def _weights_of(x):
    return x.weights if isinstance(x, FinitePointMeasure) else np.asarray(x, dtype=float)


def product_coupling(mu, nu) -> Coupling:
    wm, wn = _weights_of(mu), _weights_of(nu)
    return Coupling(np.outer(wm, wn), wm, wn)


def coupling_cost(c: Coupling, cost) -> float:
    cost = np.asarray(cost, dtype=float)
    if cost.shape != c.mass.shape:
        raise ValidationError("DIMENSION_MISMATCH", f"cost {cost.shape} vs plan {c.mass.shape}")
    return float(np.sum(cost * c.mass))


# --------------------------------------------------------------------------
# JSON


def measure_from_json(obj) -> FinitePointMeasure:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        space = SpaceDescriptor.from_json(obj["space"])
        atoms = obj["atoms"]
        weights = obj["weights"]
    except (KeyError, TypeError) as exc:
        raise ValidationError("PARSE_ERROR", f"missing field {exc}") from exc
    if len(atoms) != len(weights):
        raise ValidationError("DIMENSION_MISMATCH", "atoms and weights differ in length")
    return measure(space, atoms, weights)


def measure_to_json(m: FinitePointMeasure) -> str:
    return json.dumps(m.to_json(), sort_keys=True)


def load_measure(path) -> FinitePointMeasure:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("PARSE_ERROR", str(exc)) from exc
    return measure_from_json(obj)


def save_measure(m: FinitePointMeasure, path):
    with open(path, "w") as fh:
        fh.write(measure_to_json(m))
        fh.write("\n")


# --------------------------------------------------------------------------
# random measures


def random_measure(s: SpaceDescriptor, k: int, rng: np.random.Generator, grid: float | None = None) -> FinitePointMeasure:
    """``k`` random atoms with normalised uniform weights.

    With ``grid`` set, continuous coordinates are rounded to that step so
    atoms of independently drawn measures can coincide.
    """
    if s.is_discrete:
        k = min(k, s.dim)
        atoms = rng.choice(s.dim, size=k, replace=False)
    else:
        atoms = np.array([sp.random_point(s, rng) for _ in range(k)])
        if grid is not None and s.kind != "sphere":
            atoms = np.round(atoms / grid) * grid
    u = rng.uniform(0.05, 1.0, size=k)
    return canonicalize(FinitePointMeasure(s, atoms, u / u.sum()))
