import json

import pytest

from measureiso import spaces as sp
from measureiso.suites import SUITES, Report, RunConfig, ks_universe, run_suite, trial_rng


def test_trial_rng_is_reproducible_and_distinct():
    assert trial_rng(3, 5).uniform() == trial_rng(3, 5).uniform()
    assert trial_rng(3, 5).uniform() != trial_rng(3, 6).uniform()
    assert trial_rng(3, 5).uniform() != trial_rng(4, 5).uniform()


@pytest.mark.parametrize("name", ["oracle", "chain", "ks-iso", "bidual", "point-map"])
def test_reports_are_deterministic(name):
    a, b = run_suite(name, 11, 3), run_suite(name, 11, 3)
    assert a.dumps() == b.dumps()
    assert a.passed


def test_report_json_shape():
    doc = json.loads(Report("x", 1, 2, 0.5, True, {"k": 1}).dumps())
    assert doc == {"suite": "x", "seed": 1, "trials": 2, "max_error": 0.5, "pass": True, "witness": {"k": 1}}


@pytest.mark.parametrize("name", sorted(set(SUITES) - {"dirac-claim"}))
def test_every_suite_passes_a_short_run(name):
    assert run_suite(name, 2, 2).passed


def test_ks_universe():
    uni = ks_universe(trial_rng(0, 0), 20)
    assert len(uni) == 20
    assert uni[0].atoms.tolist() == [[0.0]]
    assert all(m.space == sp.line() for m in uni)


def test_run_config():
    cfg = RunConfig.from_json({"seed": 4, "suites": ["chain"], "trials": {"chain": 3}})
    ((name, rep),) = list(cfg.run())
    assert name == "chain" and rep.trials == 3 and rep.seed == 4
    assert RunConfig().names() == sorted(SUITES)
    with pytest.raises(KeyError):
        RunConfig(suites=("nope",))
