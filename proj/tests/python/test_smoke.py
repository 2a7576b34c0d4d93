import math
import os
import sys

module_dir = os.environ.get("SMOOTHLTF_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

import pytest

try:
    import smoothltf_py as sm
except ImportError:
    repo_python = os.path.join(os.path.dirname(__file__), "..", "..", "python")
    sys.path.insert(0, os.path.abspath(repo_python))
    import smoothltf_py as sm


def test_ltf_eval_sign_convention():
    assert sm.ltf_eval([1.0, 1.0], 0.0, [1, -1]) == 1  # sign(0) is +1
    assert sm.ltf_eval([1.0, 1.0], 0.5, [-1, -1]) == -1


def test_noise_sensitivity_dictator():
    est = sm.noise_sensitivity([1.0, 0.0, 0.0], 0.0, 0.2)
    assert est.exact
    assert est.value == pytest.approx(0.1, abs=1e-12)
    assert sm.noise_sensitivity([1.0] * 8, 0.3, 0.04).value <= 1.25 * math.sqrt(0.04)


def test_smoothing_gap_dictator():
    est = sm.smoothing_l1_gap([1.0, 0.0], 0.0, 0.3, 0.5)
    assert est.value == pytest.approx(0.3, abs=1e-12)


def test_critical_index():
    rep = sm.critical_index([0.0, 5.0, 0.0, 0.0], 0.5)
    assert rep["ell"] == 2
    assert rep["head_size"] == 1
    assert rep["sorted_abs"][0] == 5.0


def test_berry_esseen_two_atom():
    gap, bound = sm.berry_esseen_gap([1.0])
    assert gap == pytest.approx(0.3413447, abs=1e-6)
    assert bound == pytest.approx(1.0)


def test_approx_routines():
    assert sm.exp_neg_approx_sup_error(10.0, 1e-3) <= 1e-3
    closed, quad = sm.tilting_second_moment(0.0)
    assert closed == pytest.approx(2.0 * math.exp(0.25) / math.sqrt(math.pi), rel=1e-12)
    assert abs(closed - quad) <= 1e-8


def test_learn_round_trip():
    data = sm.generate_dataset(n=6, count=1500, seed=3, eta=0.05)
    h = sm.learn(data, degree=1, seed=7)
    fresh = sm.generate_dataset(n=6, count=2000, seed=11, eta=0.0)
    assert sm.evaluate(h, fresh) <= 0.15
    back = sm.PolynomialHypothesis.from_json(h.to_json())
    x = data[0][0]
    assert back.classify(x) == h.classify(x)
    bench = sm.smoothed_error([1.0] * 6, 0.0, fresh, 0.05)
    assert 0.0 <= bench.value <= 0.5


def test_lemma_check_smoke():
    rows = sm.lemma_check(["rerandomization", "berry-esseen"], "smoke")
    assert rows
    assert all(r["pass"] for r in rows)
    scaled = sm.lemma_check(["noise-sensitivity"], "smoke", 0.05)
    assert any(not r["pass"] for r in scaled)
