import numpy as np
import pytest

from phonexl.autodiff import Tensor
from phonexl.model import LANG_ROW_MAX_NORM, TEMPERATURE_MAX
from phonexl.optim import Adam, adam_step, clip_global_norm


def test_zero_gradients_leave_parameters_unchanged():
    params = {"w": Tensor(np.array([1.0, -2.0]), name="w")}
    opt = Adam(params, lr=0.1)
    params["w"].grad = np.zeros(2)
    opt.step()
    np.testing.assert_array_equal(params["w"].value, [1.0, -2.0])
    assert opt.t == 1


def test_first_step_moves_by_lr():
    # theta = 0, g = 1: bias-corrected first step is -lr/(1 + eps)
    lr = 5e-5
    value, m, v = adam_step(np.array(0.0), np.array(1.0), np.array(0.0),
                            np.array(0.0), t=1, lr=lr, beta1=0.9, beta2=0.999,
                            eps=1e-8)
    assert float(value) == pytest.approx(-lr, rel=1e-7)
    assert float(m) == pytest.approx(0.1)
    assert float(v) == pytest.approx(0.001)


def test_two_identical_runs_are_bit_identical():
    def run():
        rng = np.random.default_rng(4)
        params = {"a": Tensor(rng.normal(size=(3, 2))),
                  "b": Tensor(rng.normal(size=2))}
        opt = Adam(params, lr=1e-2)
        for step in range(20):
            g = np.random.default_rng(step).normal(size=(3, 2))
            params["a"].grad = g
            params["b"].grad = g.sum(axis=0)
            opt.step()
        return params["a"].value.copy(), params["b"].value.copy()

    a1, b1 = run()
    a2, b2 = run()
    np.testing.assert_array_equal(a1, a2)
    np.testing.assert_array_equal(b1, b2)


def test_clip_global_norm():
    params = {"w": Tensor(np.zeros(4))}
    params["w"].grad = np.array([3.0, 0.0, 4.0, 0.0])  # norm 5
    norm = clip_global_norm(params, 1.0)
    assert norm == pytest.approx(5.0)
    np.testing.assert_allclose(params["w"].grad, [0.6, 0.0, 0.8, 0.0])
    norm2 = clip_global_norm(params, 10.0)
    assert norm2 == pytest.approx(1.0)
    np.testing.assert_allclose(params["w"].grad, [0.6, 0.0, 0.8, 0.0])


def test_temperature_clamped_after_update():
    params = {"temp.log_scale": Tensor(np.asarray(2.0), name="temp.log_scale")}
    opt = Adam(params, lr=10.0)
    params["temp.log_scale"].grad = np.asarray(-1.0)   # pushes the scale up
    opt.step()
    assert float(np.exp(params["temp.log_scale"].value)) <= TEMPERATURE_MAX + 1e-9


def test_language_rows_norm_capped():
    params = {"emb.lang": Tensor(np.zeros((3, 4)), name="emb.lang")}
    opt = Adam(params, lr=1.0)
    params["emb.lang"].grad = -np.ones((3, 4))
    for _ in range(5):
        opt.step()
        params["emb.lang"].grad = -np.ones((3, 4))
    norms = np.linalg.norm(params["emb.lang"].value, axis=1)
    assert np.all(norms <= LANG_ROW_MAX_NORM + 1e-12)
