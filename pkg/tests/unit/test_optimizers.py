import logging

import numpy as np
import pytest

from shiftlab.core.errors import NumericError
from shiftlab.experiment.config import OptimizerConfig
from shiftlab.experiment.optimizers import OptimizerState, optimizer_step

logger = logging.getLogger(__name__)


class TestOptimizerStep:
    def test_sgd_onehot(self):
        state = OptimizerState.initial(np.array([1.0, 2.0, 3.0]))
        new = optimizer_step(state, np.array([0.0, 1.0, 0.0]), OptimizerConfig(kind="sgd", lr=0.1))
        assert np.array_equal(new.theta, [1.0, 2.0 - 0.1, 3.0])
        assert new.t == 1

    def test_adam_first_step(self):
        hyper = OptimizerConfig(kind="adam", lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8)
        theta = np.array([0.5, -0.25, 1.0])
        grad = np.array([0.3, -2.0, 1e-6])
        new = optimizer_step(OptimizerState.initial(theta), grad, hyper)

        m = (1 - 0.9) * grad
        v = (1 - 0.999) * grad**2
        m_hat = m / (1 - 0.9)
        v_hat = v / (1 - 0.999)
        expected = theta - 1e-3 * m_hat / (np.sqrt(v_hat) + 1e-8)
        assert np.allclose(new.theta, expected, rtol=1e-12, atol=0)
        assert np.allclose(theta - new.theta, 1e-3 * grad / (np.abs(grad) + 1e-8), rtol=1e-9)
        logger.info("✓ Adam's first step matches the bias-corrected recurrence")

    def test_zero_gradient(self):
        theta = np.array([1.0, -1.0])
        sgd = optimizer_step(OptimizerState.initial(theta), np.zeros(2), OptimizerConfig(kind="sgd", lr=0.5))
        assert np.array_equal(sgd.theta, theta)

        hyper = OptimizerConfig(kind="adam", lr=1e-2)
        state = OptimizerState(theta.copy(), m=np.array([0.2, -0.4]), v=np.array([0.04, 0.16]), t=3)
        decayed = optimizer_step(state, np.zeros(2), hyper)
        assert np.allclose(decayed.m, 0.9 * state.m, rtol=1e-15)
        assert np.allclose(decayed.v, 0.999 * state.v, rtol=1e-15)
        assert decayed.t == 4

    def test_inputs_untouched(self):
        theta = np.array([1.0, 2.0])
        state = OptimizerState.initial(theta)
        optimizer_step(state, np.array([1.0, 1.0]), OptimizerConfig(kind="adam", lr=0.1))
        assert np.array_equal(state.theta, theta)
        assert np.all(state.m == 0.0)
        assert state.t == 0

    def test_zero_learning_rate(self):
        theta = np.array([0.1, 0.2, 0.3])
        for kind in ("sgd", "adam"):
            new = optimizer_step(OptimizerState.initial(theta), np.array([5.0, -1.0, 2.0]), OptimizerConfig(kind=kind, lr=0.0))
            assert np.array_equal(new.theta, theta)

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite_gradient(self, bad):
        with pytest.raises(NumericError) as e:
            optimizer_step(OptimizerState.initial(np.zeros(2)), np.array([0.0, bad]), OptimizerConfig())
        assert e.value.step == 1
