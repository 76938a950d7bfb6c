import numpy as np
import pytest

from hardycomp.trend import (INCONCLUSIVE, NON_VANISHING, VANISHING, TrendPolicy,
                             richardson_limit, trend_verdict)


def test_geometric_decay_vanishes():
    v = 2.0 ** -np.arange(4, 15)
    assert trend_verdict(v, 14) == VANISHING


def test_plateau_does_not_vanish():
    v = 2 - 2.0 ** -np.arange(4, 15)
    assert trend_verdict(v, 14) == NON_VANISHING


def test_slow_decay_is_inconclusive():
    v = 1 / np.log(np.arange(4, 15) + 1.0) * 1e-3
    assert trend_verdict(v, 14) == INCONCLUSIVE


def test_nonfinite_is_inconclusive():
    assert trend_verdict([1.0, np.nan], 5) == INCONCLUSIVE
    assert trend_verdict([], 5) == INCONCLUSIVE


def test_policy_fields():
    p = TrendPolicy()
    assert (p.decay_factor, p.abs_floor) == (10.0, 1e-3)


def test_richardson_limit():
    v = 3 + 2.0 ** -np.arange(1, 10)
    assert richardson_limit(v) == pytest.approx(3.0, abs=1e-12)
    assert richardson_limit([5.0]) == 5.0
