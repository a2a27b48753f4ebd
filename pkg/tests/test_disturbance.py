import math

import numpy as np
import pytest

from ftconsensus.disturbance import DisturbanceSpec, Term, evaluate, example4_disturbance, implied_bound


def test_zero_spec():
    assert evaluate(DisturbanceSpec(), 1.7, 4).tolist() == [0.0] * 4
    assert implied_bound(DisturbanceSpec()) == 0.0


def test_example4_values():
    spec = example4_disturbance()
    np.testing.assert_array_equal(evaluate(spec, 0.0, 6), [0, 0, 0, 1, 0.8, 0.5])
    assert evaluate(spec, math.pi / 20, 6)[0] == pytest.approx(1.0)
    assert implied_bound(spec) == 1.0


def test_multi_term_bound_is_conservative():
    spec = DisturbanceSpec(((Term("sine", 0.3, 2.0), Term("cosine", 0.4, 2.0)),))
    assert implied_bound(spec) == pytest.approx(0.7)
    assert evaluate(spec, 0.0, 1)[0] == pytest.approx(0.4)


def test_phase_and_zero_terms():
    spec = DisturbanceSpec(((Term("sine", 2.0, 1.0, math.pi / 2), Term("zero")),))
    assert evaluate(spec, 0.0, 1)[0] == pytest.approx(2.0)


def test_length_mismatch():
    with pytest.raises(ValueError, match="expected 5"):
        evaluate(example4_disturbance(), 0.0, 5)
    with pytest.raises(ValueError):
        Term("square", 1.0, 1.0)


def test_bound_holds_on_random_times(rng):
    specs = [
        example4_disturbance(),
        DisturbanceSpec(((Term("sine", 0.3, 7.0, 0.2), Term("cosine", -0.4, 3.0)), (Term("sine", 1.1, 0.5),))),
    ]
    for spec in specs:
        n = len(spec.agents)
        bound = implied_bound(spec)
        for t in rng.uniform(-100, 100, 10_000):
            assert np.abs(evaluate(spec, t, n)).max() <= bound + 1e-12
