"""Seeded verification suites behind ``measureiso verify``.

Trial ``t`` of a run with master seed ``s`` draws from
``np.random.default_rng([s, t])`` (a SeedSequence over the pair), so any
failing trial can be replayed on its own. Reports only aggregate by max and
all(), so trial order does not matter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import spaces as sp
from .errors import DomainError
from .isometries import (
    antipodal_mix_transform,
    bidual_check,
    collapse_transform,
    extract_point_map,
    kloeckner_isometry,
    ks_isometry,
    kuiper_isometry,
    levy_isometry,
    lift_isometry,
    lp_isometry,
    verify_dirac_characterization,
)
from .measures import FinitePointMeasure, dirac, measure, random_measure
from .metrics import (
    cdf_of,
    ks_distance,
    kuiper_distance,
    levy_distance,
    levy_prokhorov_distance,
    tv_distance,
    w1_cdf,
)
from .oracle import oracle_transport
from .transport import solve_transport, wasserstein

SPACES = {
    "line": sp.line(),
    "R2": sp.euclidean(2),
    "R3": sp.euclidean(3),
    "S2": sp.sphere(3),
    "D6": sp.discrete(6),
}


@dataclass
class Report:
    suite: str
    seed: int
    trials: int
    max_error: float
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "max_error": self.max_error,
            "pass": self.passed,
            "witness": self.witness,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, default=_jsonable)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    return str(o)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


class _Tracker:
    """Keeps the worst error seen and the context it was seen in."""

    def __init__(self, tol):
        self.tol = tol
        self.max_error = 0.0
        self.witness = {}
        self.ok = True

    def record(self, err, tol=None, **context):
        tol = self.tol if tol is None else tol
        err = float(err)
        if not np.isfinite(err) or err > tol:
            if self.ok:
                self.witness = {"first_failure": context, "error": err, "tol": tol}
            self.ok = False
        if err > self.max_error or not np.isfinite(err):
            self.max_error = err
            if self.ok:
                self.witness = {**context, "error": err}

    def fail(self, **context):
        if self.ok:
            self.witness = {"first_failure": context}
        self.ok = False

    def report(self, suite, seed, trials, **extra):
        w = dict(self.witness)
        w.update(extra)
        return Report(suite, seed, trials, self.max_error, self.ok, w)


def _line_measure(rng, max_atoms=8, grid=0.25):
    return random_measure(sp.line(), int(rng.integers(1, max_atoms + 1)), rng, grid=grid)


def _space_measure(s, rng, max_atoms=6):
    return random_measure(s, int(rng.integers(1, max_atoms + 1)), rng, grid=0.25 if s.kind == "line" else None)


# --------------------------------------------------------------------------
# suites


def suite_dirac_embedding(seed: int, trials: int = 100) -> Report:
    """|W_p(delta_x, delta_y) - d(x, y)| on every space, p in {1, 1.5, 2, 3}."""
    spaces = [sp.line(), sp.euclidean(2), sp.euclidean(3), sp.sphere(3), sp.discrete(6)]
    tr = _Tracker(1e-12)
    for t in range(trials):
        rng = trial_rng(seed, t)
        for s in spaces:
            x, y = sp.random_point(s, rng), sp.random_point(s, rng)
            d = sp.distance(s, x, y)
            for p in (1.0, 1.5, 2.0, 3.0):
                w = wasserstein(s, dirac(s, x), dirac(s, y), p)
                tr.record(abs(w - d), trial=t, space=str(s), p=p)
    return tr.report("dirac-embedding", seed, trials)


def suite_oracle(seed: int, trials: int = 200, max_side: int = 4) -> Report:
    """Network simplex vs spanning-tree enumeration, plus the dual certificate."""
    tr = _Tracker(1e-10)
    worst_cert = 0.0
    for t in range(trials):
        rng = trial_rng(seed, t)
        m, n = (int(v) for v in rng.integers(1, max_side + 1, size=2))
        a = rng.uniform(0.05, 1, m)
        b = rng.uniform(0.05, 1, n)
        if t % 3 == 0:
            a, b = np.ones(m), np.ones(n)
        a, b = a / a.sum(), b / b.sum()
        C = rng.uniform(0, 1, (m, n))
        if t % 4 == 0:
            C = np.round(3 * C)
        res = solve_transport(C, a, b)
        tr.record(abs(res.cost - oracle_transport(C, a, b)), trial=t, m=m, n=n)
        cert = max(res.certificate_errors(C).values())
        worst_cert = max(worst_cert, cert)
        if cert > 1e-9:
            tr.fail(trial=t, certificate=res.certificate_errors(C))
    return tr.report("oracle", seed, trials, max_certificate_error=worst_cert)


def suite_w1_tv(seed: int, trials: int = 100, k: int = 8) -> Report:
    s = sp.discrete(k)
    tr = _Tracker(1e-10)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu = random_measure(s, int(rng.integers(1, k + 1)), rng)
        nu = random_measure(s, int(rng.integers(1, k + 1)), rng)
        tr.record(abs(wasserstein(s, mu, nu, 1) - tv_distance(mu, nu)), trial=t)
    return tr.report("w1-tv", seed, trials)


def suite_w1_cdf(seed: int, trials: int = 100) -> Report:
    s = sp.line()
    tr = _Tracker(1e-10)
    for t in range(trials):
        rng = trial_rng(seed, t)
        grid = 0.25 if t % 2 == 0 else None
        mu, nu = _line_measure(rng, grid=grid), _line_measure(rng, grid=grid)
        tr.record(abs(wasserstein(s, mu, nu, 1) - w1_cdf(mu, nu)), trial=t)
    return tr.report("w1-cdf", seed, trials)


def suite_chain(seed: int, trials: int = 200) -> Report:
    """0 <= d_KS <= d_KU <= d_TV <= 1; error is the worst violation."""
    tr = _Tracker(1e-12)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu, nu = _line_measure(rng), _line_measure(rng)
        ks, ku, tv = ks_distance(mu, nu), kuiper_distance(mu, nu), tv_distance(mu, nu)
        tr.record(max(0.0, -ks, ks - ku, ku - tv, tv - 1.0), trial=t, ks=ks, kuiper=ku, tv=tv)
    return tr.report("chain", seed, trials)


def suite_metric_axioms(seed: int, trials: int = 50) -> Report:
    """Identity, symmetry and triangle inequality for every distance in the package."""
    tr = _Tracker(1e-9)
    line_metrics = {
        "tv": tv_distance,
        "ks": ks_distance,
        "kuiper": kuiper_distance,
        "levy": levy_distance,
        "lp": levy_prokhorov_distance,
        "w1cdf": w1_cdf,
    }
    for t in range(trials):
        rng = trial_rng(seed, t)
        for name, s in SPACES.items():
            x, y, z = (sp.random_point(s, rng) for _ in range(3))
            dxy, dyx = sp.distance(s, x, y), sp.distance(s, y, x)
            tr.record(abs(dxy - dyx), trial=t, what=f"d symmetry {name}")
            tr.record(sp.distance(s, x, x), trial=t, what=f"d identity {name}")
            tr.record(dxy - sp.distance(s, x, z) - sp.distance(s, z, y), tol=1e-12, trial=t, what=f"d triangle {name}")
            mu, nu, eta = (_space_measure(s, rng) for _ in range(3))
            for p in (1.0, 2.0):
                w = lambda a, b: wasserstein(s, a, b, p)  # noqa: E731
                tr.record(w(mu, mu), trial=t, what=f"W_{p} identity {name}")
                tr.record(abs(w(mu, nu) - w(nu, mu)), trial=t, what=f"W_{p} symmetry {name}")
                tr.record(w(mu, nu) - w(mu, eta) - w(eta, nu), trial=t, what=f"W_{p} triangle {name}")
        mu, nu, eta = (_line_measure(rng) for _ in range(3))
        for name, f in line_metrics.items():
            tr.record(f(mu, mu), trial=t, what=f"{name} identity")
            tr.record(abs(f(mu, nu) - f(nu, mu)), trial=t, what=f"{name} symmetry")
            tr.record(f(mu, nu) - f(mu, eta) - f(eta, nu), trial=t, what=f"{name} triangle")
    return tr.report("metric-axioms", seed, trials)


def suite_pushforward(seed: int, trials: int = 100, ps=(1.0, 2.0, 3.0)) -> Report:
    """W_p(psi_# mu, psi_# nu) = W_p(mu, nu) for random isometries psi of each space,
    plus the group law (psi o chi)_# = psi_# o chi_#."""
    tr = _Tracker(1e-9)
    for t in range(trials):
        rng = trial_rng(seed, t)
        for name, s in SPACES.items():
            psi, chi = sp.random_isometry(s, rng), sp.random_isometry(s, rng)
            mu, nu = _space_measure(s, rng), _space_measure(s, rng)
            lift = lift_isometry(psi)
            for p in ps:
                err = abs(wasserstein(s, lift(mu), lift(nu), p) - wasserstein(s, mu, nu, p))
                tr.record(err, trial=t, space=name, p=p)
            lhs = lift_isometry(psi.compose(chi))(mu)
            rhs = lift(lift_isometry(chi)(mu))
            tr.record(_measure_gap(lhs, rhs), tol=1e-10, trial=t, space=name, what="group law")
    return tr.report("pushforward", seed, trials)


def _measure_gap(a: FinitePointMeasure, b: FinitePointMeasure) -> float:
    if a.space != b.space or len(a) != len(b):
        return float("inf")
    if a.space.is_discrete:
        atom_gap = 0.0 if np.array_equal(a.atoms, b.atoms) else float("inf")
    else:
        atom_gap = float(np.abs(a.atoms - b.atoms).max())
    return max(atom_gap, float(np.abs(a.weights - b.weights).max()))


def suite_kloeckner(seed: int, trials: int = 100, max_atoms: int = 6) -> Report:
    """Center-of-mass rotations: W_2 preserved to 1e-7, Diracs fixed to 1e-12.

    W_1 and W_3 distortions are measured and reported, not asserted.
    """
    tr = _Tracker(1e-7)
    other_p = {1.0: 0.0, 3.0: 0.0}
    worst_dirac = 0.0
    for t in range(trials):
        rng = trial_rng(seed, t)
        for n in (2, 3):
            s = sp.euclidean(n)
            phi = kloeckner_isometry(sp.random_orthogonal(n, rng))
            mu = random_measure(s, int(rng.integers(1, max_atoms + 1)), rng)
            nu = random_measure(s, int(rng.integers(1, max_atoms + 1)), rng)
            a, b = phi(mu), phi(nu)
            tr.record(abs(wasserstein(s, a, b, 2) - wasserstein(s, mu, nu, 2)), trial=t, n=n)
            for p in other_p:
                other_p[p] = max(other_p[p], abs(wasserstein(s, a, b, p) - wasserstein(s, mu, nu, p)))
            x = sp.random_point(s, rng)
            img = phi(dirac(s, x))
            gap = float(np.abs(img.atoms[0] - x).max()) if len(img) == 1 else float("inf")
            worst_dirac = max(worst_dirac, gap)
            tr.record(gap, tol=1e-12, trial=t, n=n, what="dirac fixed")
    return tr.report(
        "kloeckner", seed, trials,
        dirac_max_error=worst_dirac,
        unasserted_distortion={f"W_{p:g}": v for p, v in other_p.items()},
    )


def _cdf_identity_error(phi_mu, mu, f, increasing):
    """|F_{phi mu}(t) - F_mu(f(t))| (increasing f) or |F_{phi mu}(t) - (1 - F_mu(f(t)-))| (decreasing f).

    Both sides are right-continuous step functions jumping only at the atoms
    of phi mu, so agreement at the gap midpoints and beyond both ends is
    agreement everywhere; evaluating exactly at atoms would instead test
    whether f(f^{-1}(x)) rounds back to x.
    """
    Fp, Fm = cdf_of(phi_mu), cdf_of(mu)
    z = phi_mu.atoms[:, 0]
    ts = np.concatenate([[z[0] - 1.0], 0.5 * (z[:-1] + z[1:]), [z[-1] + 1.0]])
    err = 0.0
    for t in ts:
        target = Fm.eval(f(t)) if increasing else 1.0 - Fm.eval_left(f(t))
        err = max(err, abs(float(Fp.eval(t)) - float(target)))
    return err


def _random_affine_real(rng, increasing):
    slope = rng.uniform(0.2, 3.0) * (1 if increasing else -1)
    return sp.affine_real(float(slope), float(rng.uniform(-2, 2)))


def suite_ks_iso(seed: int, trials: int = 100) -> Report:
    tr = _Tracker(1e-10)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu, nu = _line_measure(rng), _line_measure(rng)
        d0 = ks_distance(mu, nu)
        for increasing in (True, False):
            psi = _random_affine_real(rng, increasing)
            phi = ks_isometry(psi, increasing)
            tr.record(abs(ks_distance(phi(mu), phi(nu)) - d0), trial=t, increasing=increasing)
            tr.record(_cdf_identity_error(phi(mu), mu, psi.forward, increasing), tol=1e-12, trial=t, what="cdf identity")
    return tr.report("ks-iso", seed, trials)


def suite_levy_iso(seed: int, trials: int = 100) -> Report:
    tr = _Tracker(1e-9)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu, nu = _line_measure(rng, grid=None), _line_measure(rng, grid=None)
        d0 = levy_distance(mu, nu)
        c = float(rng.uniform(-2, 2))
        for reflect in (False, True):
            phi = levy_isometry(c, reflect)
            tr.record(abs(levy_distance(phi(mu), phi(nu)) - d0), trial=t, reflect=reflect, c=c)
            # F_{phi mu}(t) = F_mu(t + c)   or   1 - F_mu((c - t)-)
            f = (lambda u: c - u) if reflect else (lambda u: u + c)
            tr.record(_cdf_identity_error(phi(mu), mu, f, not reflect), tol=1e-12, trial=t, what="cdf identity")
    return tr.report("levy-iso", seed, trials)


def suite_kuiper_iso(seed: int, trials: int = 100) -> Report:
    tr = _Tracker(1e-9)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu, nu = _line_measure(rng), _line_measure(rng)
        d0 = kuiper_distance(mu, nu)
        for g in (sp.cube_map(), _random_affine_real(rng, True)):
            phi = kuiper_isometry(g)
            tr.record(abs(kuiper_distance(phi(mu), phi(nu)) - d0), trial=t, g=g.name)
    return tr.report("kuiper-iso", seed, trials)


def suite_lp_iso(seed: int, trials: int = 100, max_atoms: int = 8) -> Report:
    s = sp.euclidean(2)
    tr = _Tracker(1e-8)
    for t in range(trials):
        rng = trial_rng(seed, t)
        mu = random_measure(s, int(rng.integers(1, max_atoms + 1)), rng)
        nu = random_measure(s, int(rng.integers(1, max_atoms + 1)), rng)
        phi = lp_isometry(sp.random_isometry(s, rng))
        tr.record(abs(levy_prokhorov_distance(phi(mu), phi(nu)) - levy_prokhorov_distance(mu, nu)), trial=t)
    return tr.report("lp-iso", seed, trials)


def _non_dirac_sphere_measure(s, rng, t):
    """Alternate generic measures, antipodal pairs and near-Dirac (1-eps) mixtures."""
    x = sp.random_point(s, rng)
    kind = t % 3
    if kind == 0:
        return random_measure(s, int(rng.integers(2, 6)), rng), "random"
    if kind == 1:
        return measure(s, [x, -x], [0.5, 0.5]), "antipodal"
    eps = (0.1, 0.01)[(t // 3) % 2]
    return measure(s, [x, sp.random_point(s, rng)], [1 - eps, eps]), f"near-dirac {eps}"


def suite_dirac_claim(seed: int, trials: int = 50, ps=(1.0, 2.0, 3.0), probe_count: int = 200,
                      random_opponents: int = 20) -> Report:
    """Diracs reach W_p = 1 at their antipode; non-Diracs stay strictly below 1."""
    tr = _Tracker(0.0)
    worst = {"dirac_error": 0.0, "worst_non_dirac_wp": 0.0, "min_margin": 1.0, "min_opponents": None}
    for t in range(trials):
        rng = trial_rng(seed, t)
        for n in (2, 3):
            s = sp.sphere(n)
            for p in ps:
                x = sp.random_point(s, rng)
                rep = verify_dirac_characterization(s, dirac(s, x), p, rng=rng)
                worst["dirac_error"] = max(worst["dirac_error"], rep.witness["error"])
                if not rep.passed:
                    tr.fail(trial=t, n=n, p=p, what="dirac", **rep.witness)
                mu, kind = _non_dirac_sphere_measure(s, rng, t)
                rep = verify_dirac_characterization(s, mu, p, probe_count, rng, random_opponents)
                worst["worst_non_dirac_wp"] = max(worst["worst_non_dirac_wp"], rep.worst_wp)
                worst["min_margin"] = min(worst["min_margin"], rep.margin)
                if worst["min_opponents"] is None or rep.opponents < worst["min_opponents"]:
                    worst["min_opponents"] = rep.opponents
                if not rep.passed:
                    tr.fail(trial=t, n=n, p=p, kind=kind, **rep.witness)
    tr.max_error = worst["dirac_error"]
    return tr.report("dirac-claim", seed, trials, **worst)


def suite_point_map(seed: int, trials: int = 20, sample_size: int = 30) -> Report:
    """Recover T from phi(delta_x) = delta_{T(x)} for orthogonal lifts on S^2,
    and make sure non-isometries are caught."""
    s = sp.sphere(3)
    tr = _Tracker(1e-10)
    worst_defect = 0.0
    for t in range(trials):
        rng = trial_rng(seed, t)
        Q = sp.random_orthogonal(3, rng)
        sample = np.array([sp.random_point(s, rng) for _ in range(sample_size)])
        pm = extract_point_map(lift_isometry(Q), s, sample)
        tr.record(np.abs(pm.images - sample @ Q.Q.T).max(), trial=t, what="T vs Q")
        worst_defect = max(worst_defect, pm.isometry_defect)
        tr.record(pm.isometry_defect, tol=1e-9, trial=t, what="defect")
        # collapse map: Dirac images but huge defect
        collapsed = extract_point_map(collapse_transform(s, sample[0]), s, sample)
        if not collapsed.isometry_defect > 0.1:
            tr.fail(trial=t, what="collapse not flagged", defect=collapsed.isometry_defect)
        try:
            extract_point_map(antipodal_mix_transform(s), s, sample)
            tr.fail(trial=t, what="antipodal mix not flagged")
        except DomainError as exc:
            if exc.code != "IMAGE_NOT_DIRAC":
                raise
    return tr.report("point-map", seed, trials, max_defect=worst_defect)


def antipodal_pair_value(s, x, y) -> float:
    """W_2(1/2 delta_x + 1/2 delta_{-x}, delta_y) by the solver."""
    return wasserstein(s, measure(s, [x, -x], [0.5, 0.5]), dirac(s, y), 2.0)


def suite_antipodal_pair(seed: int, trials: int = 20) -> Report:
    s = sp.sphere(3)
    tr = _Tracker(1e-10)
    for t in range(trials):
        rng = trial_rng(seed, t)
        x, y = sp.random_point(s, rng), sp.random_point(s, rng)
        tr.record(abs(antipodal_pair_value(s, x, y) - np.sqrt(0.5)), trial=t)
    return tr.report("antipodal-pair", seed, trials)


def ks_universe(rng: np.random.Generator, size: int = 20) -> list:
    """delta_0, Diracs at +-0.5 and at random points with |x| >= 0.6, and
    multi-atom measures on the nonzero integers in [-4, 4] (one of them with
    atoms on both sides of 0)."""
    L = sp.line()
    grid = np.array([g for g in range(-4, 5) if g != 0], dtype=float)
    straddle = [-float(rng.integers(1, 5)), float(rng.integers(1, 5))]
    out = [dirac(L, 0.0), dirac(L, 0.5), dirac(L, -0.5), measure(L, straddle, rng.dirichlet([1.0, 1.0]))]
    while len(out) < size:
        if rng.uniform() < 0.3:
            m = dirac(L, float(rng.choice(grid)) * float(rng.uniform(0.6, 1.0)))
        else:
            k = int(rng.integers(2, 4))
            m = measure(L, rng.choice(grid, size=k, replace=False), rng.dirichlet(np.ones(k)))
        if not any(_measure_gap(m, u) <= 1e-12 for u in out):
            out.append(m)
    return out


def suite_bidual(seed: int, trials: int = 10, size: int = 20) -> Report:
    """In a finite KS universe: U(U({delta_0})) = {delta_0}, and a non-Dirac member
    is not a fixed point. A finite-universe proxy, not a statement about all measures."""
    tr = _Tracker(0.0)
    last = {}
    for t in range(trials):
        rng = trial_rng(seed, t)
        uni = ks_universe(rng, size)
        dirac_check = bidual_check(uni, "ks", uni[0])
        non_dirac = next(m for m in uni if len(m) > 1 and m.atoms[0, 0] < 0 < m.atoms[-1, 0])
        other_check = bidual_check(uni, "ks", non_dirac)
        if not dirac_check["fixed_point"]:
            tr.fail(trial=t, what="delta_0 not a bidual fixed point", **dirac_check)
        if other_check["fixed_point"]:
            tr.fail(trial=t, what="non-Dirac member is a bidual fixed point", **other_check)
        last = {"delta_0": dirac_check, "non_dirac": other_check}
    return tr.report("bidual", seed, trials, proxy="restricted finite universe", last_trial=last)


SUITES = {
    "metric-axioms": suite_metric_axioms,
    "chain": suite_chain,
    "w1-tv": suite_w1_tv,
    "w1-cdf": suite_w1_cdf,
    "pushforward": suite_pushforward,
    "kloeckner": suite_kloeckner,
    "ks-iso": suite_ks_iso,
    "levy-iso": suite_levy_iso,
    "kuiper-iso": suite_kuiper_iso,
    "lp-iso": suite_lp_iso,
    "dirac-claim": suite_dirac_claim,
    "point-map": suite_point_map,
    "oracle": suite_oracle,
    "bidual": suite_bidual,
    "dirac-embedding": suite_dirac_embedding,
    "antipodal-pair": suite_antipodal_pair,
}


def run_suite(name: str, seed: int, trials: int | None = None) -> Report:
    fn = SUITES[name]
    return fn(seed) if trials is None else fn(seed, trials)


@dataclass(frozen=True)
class RunConfig:
    """Which suites to run, with what master seed and trial counts.

    ``trials`` overrides the per-suite defaults; suites not listed there keep
    theirs. An empty ``suites`` tuple means all of them.
    """

    seed: int = 20261017
    suites: tuple = ()
    trials: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.suites) | set(self.trials)
        unknown -= set(SUITES)
        if unknown:
            raise KeyError(f"unknown suites: {sorted(unknown)}")

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        return cls(int(doc.get("seed", cls.seed)), tuple(doc.get("suites", ())), dict(doc.get("trials", {})))

    def names(self) -> list:
        return list(self.suites) if self.suites else sorted(SUITES)

    def run(self):
        """Yield ``(name, report)`` for each selected suite in order."""
        for name in self.names():
            yield name, run_suite(name, self.seed, self.trials.get(name))
