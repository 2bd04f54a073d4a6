"""Metric spaces and the point isometries acting on them.

Four spaces are supported: the real line, Euclidean n-space, the sphere of
radius 1/2 in R^n (chordal metric, diameter 1) and a finite set of ``k``
labels with the 0/1 metric.

Continuous points are 1-d float arrays of length ``dim``; discrete points are
plain ints in ``range(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ValidationError

SPHERE_RADIUS = 0.5
MEMBERSHIP_TOL = 1e-12
APPLY_TOL = 1e-10
ORTHO_TOL = 1e-10

KINDS = ("line", "euclidean", "sphere", "discrete")


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError("UNKNOWN_SPACE", f"kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError("BAD_DIMENSION", f"dim={self.dim}")
        if self.kind == "line" and self.dim != 1:
            raise ValidationError("BAD_DIMENSION", "the line has dim 1")
        if self.kind == "sphere" and self.dim < 2:
            raise ValidationError("BAD_DIMENSION", "sphere needs ambient dim >= 2")

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def ambient_dim(self) -> int:
        """Length of a coordinate vector (0 for discrete spaces)."""
        return 0 if self.is_discrete else self.dim

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    @classmethod
    def from_json(cls, obj: dict) -> "SpaceDescriptor":
        kind = obj.get("kind")
        dim = obj.get("dim", 1)
        return cls(kind, int(dim))

    def __str__(self):
        return f"{self.kind}({self.dim})"


def line() -> SpaceDescriptor:
    return SpaceDescriptor("line", 1)


def euclidean(n: int) -> SpaceDescriptor:
    return SpaceDescriptor("euclidean", n)


def sphere(n: int) -> SpaceDescriptor:
    return SpaceDescriptor("sphere", n)


def discrete(k: int) -> SpaceDescriptor:
    return SpaceDescriptor("discrete", k)


def as_point(s: SpaceDescriptor, x):
    """Coerce ``x`` to the point representation of ``s`` (no membership check)."""
    if s.is_discrete:
        if isinstance(x, (np.ndarray, list, tuple)):
            x = np.asarray(x).reshape(-1)
            if x.size != 1:
                raise ValidationError("POINT_NOT_IN_SPACE", f"label {x} in {s}")
            x = x[0]
        if float(x) != int(x):
            raise ValidationError("POINT_NOT_IN_SPACE", f"label {x} in {s}")
        return int(x)
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape != (s.dim,):
        raise ValidationError("POINT_NOT_IN_SPACE", f"shape {arr.shape} in {s}")
    return arr


def membership_error(s: SpaceDescriptor, x) -> float:
    """How far ``x`` is from lying in ``s`` (0 for members)."""
    if s.is_discrete:
        return 0.0 if 0 <= x < s.dim else float("inf")
    if not np.all(np.isfinite(x)):
        return float("inf")
    if s.kind == "sphere":
        return abs(float(np.linalg.norm(x)) - SPHERE_RADIUS)
    return 0.0


def contains(s: SpaceDescriptor, x, tol: float = MEMBERSHIP_TOL) -> bool:
    try:
        x = as_point(s, x)
    except ValidationError:
        return False
    return membership_error(s, x) <= tol


def check_point(s: SpaceDescriptor, x, tol: float = MEMBERSHIP_TOL, code="POINT_NOT_IN_SPACE"):
    x = as_point(s, x)
    if membership_error(s, x) > tol:
        raise ValidationError(code, f"{x} not in {s}")
    return x


def distance(s: SpaceDescriptor, x, y) -> float:
    """Metric of ``s``: Euclidean (chordal on the sphere) or 0/1 on labels."""
    x = check_point(s, x)
    y = check_point(s, y)
    if s.is_discrete:
        return 0.0 if x == y else 1.0
    return float(np.linalg.norm(x - y))


def pairwise_distances(s: SpaceDescriptor, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Distance matrix between two atom arrays of ``s`` (no membership checks)."""
    if s.is_discrete:
        xs = np.asarray(xs).reshape(-1)
        ys = np.asarray(ys).reshape(-1)
        return (xs[:, None] != ys[None, :]).astype(float)
    xs = np.asarray(xs, dtype=float).reshape(-1, s.dim)
    ys = np.asarray(ys, dtype=float).reshape(-1, s.dim)
    diff = xs[:, None, :] - ys[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def antipode(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < 2 or abs(np.linalg.norm(x) - SPHERE_RADIUS) > MEMBERSHIP_TOL:
        raise ValidationError("POINT_NOT_IN_SPACE", f"{x} is not on the radius-1/2 sphere")
    return -x


# --------------------------------------------------------------------------
# isometry maps


def _check_orthogonal(Q: np.ndarray) -> np.ndarray:
    Q = np.array(Q, dtype=float)
    if Q.ndim == 0:
        Q = Q.reshape(1, 1)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValidationError("NOT_ORTHOGONAL", f"shape {Q.shape}")
    defect = np.abs(Q.T @ Q - np.eye(Q.shape[0])).max()
    if defect > ORTHO_TOL:
        raise ValidationError("NOT_ORTHOGONAL", f"|Q^T Q - I|_max = {defect:.3g}")
    Q.setflags(write=False)
    return Q


class IsometryMap:
    """A point map with a known inverse. Subclasses implement ``_map``."""

    def _map(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self._map(x)

    def inverse(self) -> "IsometryMap":
        raise NotImplementedError

    def compose(self, inner: "IsometryMap") -> "IsometryMap":
        """``self ∘ inner``."""
        return Composite(self, inner)


@dataclass(frozen=True, eq=False)
class AffineMap(IsometryMap):
    """x -> Qx + b with Q orthogonal."""

    Q: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        Q = _check_orthogonal(self.Q)
        b = np.array(self.b, dtype=float).reshape(-1)
        if b.shape != (Q.shape[0],):
            raise ValidationError("DIMENSION_MISMATCH", f"Q {Q.shape} vs b {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)

    @property
    def dim(self):
        return self.Q.shape[0]

    def _map(self, x):
        return self.Q @ np.asarray(x, dtype=float).reshape(-1) + self.b

    def inverse(self):
        return AffineMap(self.Q.T, -(self.Q.T @ self.b))

    def compose(self, inner):
        if isinstance(inner, AffineMap):
            return AffineMap(self.Q @ inner.Q, self.Q @ inner.b + self.b)
        if isinstance(inner, OrthogonalMap):
            return AffineMap(self.Q @ inner.Q, self.b)
        return super().compose(inner)


@dataclass(frozen=True, eq=False)
class OrthogonalMap(IsometryMap):
    """x -> Qx; acts on both R^n and the sphere."""

    Q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Q", _check_orthogonal(self.Q))

    @property
    def dim(self):
        return self.Q.shape[0]

    def _map(self, x):
        return self.Q @ np.asarray(x, dtype=float).reshape(-1)

    def inverse(self):
        return OrthogonalMap(self.Q.T)

    def compose(self, inner):
        if isinstance(inner, OrthogonalMap):
            return OrthogonalMap(self.Q @ inner.Q)
        if isinstance(inner, AffineMap):
            return AffineMap(self.Q @ inner.Q, self.Q @ inner.b)
        return super().compose(inner)


@dataclass(frozen=True, eq=False)
class LabelPermutation(IsometryMap):
    perm: tuple

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValidationError("NOT_BIJECTIVE", f"{perm} is not a permutation")
        object.__setattr__(self, "perm", perm)

    def _map(self, x):
        return self.perm[int(x)]

    def inverse(self):
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return LabelPermutation(tuple(inv))

    def compose(self, inner):
        if isinstance(inner, LabelPermutation):
            return LabelPermutation(tuple(self.perm[j] for j in inner.perm))
        return super().compose(inner)


_PROBE_TS = np.array([-1e3, -17.5, -3.0, -1.0, -0.25, 0.0, 0.3, 1.0, 2.5, 40.0, 1e3])


@dataclass(frozen=True, eq=False)
class MonotoneRealMap(IsometryMap):
    """Strictly monotone continuous bijection of R with an explicit inverse.

    Not a metric isometry of R in general; it is the point map behind the
    KS, Lévy and Kuiper isometries of measures on the line.
    """

    forward: Callable[[float], float]
    backward: Callable[[float], float]
    increasing: bool = True
    name: str = "g"

    def __post_init__(self):
        fx = np.array([float(self.forward(t)) for t in _PROBE_TS])
        if not np.all(np.isfinite(fx)):
            raise ValidationError("NOT_BIJECTIVE", f"{self.name} not finite on probes")
        steps = np.diff(fx)
        if (self.increasing and not np.all(steps > 0)) or (
            not self.increasing and not np.all(steps < 0)
        ):
            raise ValidationError("NOT_BIJECTIVE", f"{self.name}: monotonicity flag inconsistent")
        back = np.array([float(self.backward(v)) for v in fx])
        if np.max(np.abs(back - _PROBE_TS) / np.maximum(1.0, np.abs(_PROBE_TS))) > APPLY_TOL:
            raise ValidationError("NOT_BIJECTIVE", f"{self.name}: inverse check failed")

    def _map(self, x):
        return np.array([float(self.forward(float(np.asarray(x).reshape(-1)[0])))])

    def inverse(self):
        return MonotoneRealMap(self.backward, self.forward, self.increasing, f"{self.name}^-1")

    def compose(self, inner):
        if isinstance(inner, MonotoneRealMap):
            f, g = self.forward, inner.forward
            fi, gi = self.backward, inner.backward
            return MonotoneRealMap(
                lambda t: f(g(t)),
                lambda t: gi(fi(t)),
                self.increasing == inner.increasing,
                f"{self.name}∘{inner.name}",
            )
        return super().compose(inner)


@dataclass(frozen=True, eq=False)
class Composite(IsometryMap):
    outer: IsometryMap
    inner: IsometryMap

    def _map(self, x):
        return self.outer(self.inner(x))

    def inverse(self):
        return Composite(self.inner.inverse(), self.outer.inverse())


def identity_map(s: SpaceDescriptor) -> IsometryMap:
    if s.is_discrete:
        return LabelPermutation(tuple(range(s.dim)))
    if s.kind == "sphere":
        return OrthogonalMap(np.eye(s.dim))
    return AffineMap(np.eye(s.dim), np.zeros(s.dim))


def affine_real(slope: float, offset: float) -> MonotoneRealMap:
    """t -> slope*t + offset as a monotone map of the line."""
    if slope == 0:
        raise ValidationError("NOT_BIJECTIVE", "zero slope")
    return MonotoneRealMap(
        lambda t: slope * t + offset,
        lambda t: (t - offset) / slope,
        slope > 0,
        f"{slope:g}t{offset:+g}",
    )


def cube_map() -> MonotoneRealMap:
    return MonotoneRealMap(lambda t: t**3, lambda t: float(np.cbrt(t)), True, "t^3")


def apply(f, x, space: SpaceDescriptor | None = None):
    """Apply a point map; when ``space`` is given the image must lie in it."""
    y = f(x)
    if space is None:
        return y
    if space.kind == "sphere":
        return check_point(space, y, tol=APPLY_TOL, code="IMAGE_NOT_IN_SPACE")
    return check_point(space, y, code="IMAGE_NOT_IN_SPACE")


# --------------------------------------------------------------------------
# random inputs


def random_point(s: SpaceDescriptor, rng: np.random.Generator, scale: float = 1.0):
    """A seeded random member of ``s``.

    Line/Euclidean points are N(0, scale^2) per coordinate; sphere points are
    normalised standard normals; labels are uniform.
    """
    if s.is_discrete:
        return int(rng.integers(s.dim))
    if s.kind == "sphere":
        for _ in range(100):
            g = rng.standard_normal(s.dim)
            nrm = np.linalg.norm(g)
            if nrm >= 1e-8:
                return SPHERE_RADIUS * g / nrm
        raise DomainError("DEGENERATE_SAMPLE", "could not draw a non-degenerate normal")
    return scale * rng.standard_normal(s.dim)


def random_orthogonal_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with R's diagonal made positive."""
    for _ in range(100):
        A = rng.standard_normal((n, n))
        Q, R = np.linalg.qr(A)
        d = np.diag(R)
        if np.min(np.abs(d)) >= 1e-8:
            return Q * np.sign(d)
    raise DomainError("DEGENERATE_SAMPLE", "singular Gaussian matrix")


def random_orthogonal(n: int, rng: np.random.Generator) -> OrthogonalMap:
    return OrthogonalMap(random_orthogonal_matrix(n, rng))


def random_isometry(s: SpaceDescriptor, rng: np.random.Generator) -> IsometryMap:
    """A random metric isometry of ``s``."""
    if s.is_discrete:
        return LabelPermutation(tuple(int(i) for i in rng.permutation(s.dim)))
    if s.kind == "sphere":
        return random_orthogonal(s.dim, rng)
    return AffineMap(random_orthogonal_matrix(s.dim, rng), rng.normal(scale=2.0, size=s.dim))


def rotation2d(theta: float) -> np.ndarray:
    c, s_ = np.cos(theta), np.sin(theta)
    return np.array([[c, -s_], [s_, c]])
