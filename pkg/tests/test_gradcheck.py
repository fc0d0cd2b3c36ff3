import numpy as np

from phonexl import autodiff as ad
from phonexl.autodiff import Tensor
from phonexl.acceptance import build_toy_setup, loss_closures
from phonexl.gradcheck import grad_check


def test_quadratic_probe_gradient_is_exact():
    theta = {"theta": Tensor(np.random.default_rng(0).normal(size=(4, 3)), name="theta")}

    def loss():
        return ad.sum_(theta["theta"] * theta["theta"]) * 0.5

    report = grad_check(loss, theta, n_samples=24, rng=np.random.default_rng(1))
    assert report.passed
    assert report.max_rel_error < 1e-8
    ad.zero_grads(theta)
    out = loss()
    out.backward()
    np.testing.assert_allclose(theta["theta"].grad, theta["theta"].value, atol=1e-14)


def test_corrupted_gradient_fails_the_check():
    value = np.random.default_rng(2).normal(size=6)
    t = {"w": Tensor(value, name="w")}

    class Corrupted(Tensor):
        pass

    def loss():
        out = ad.sum_(t["w"] * t["w"]) * 0.5
        real_backward = out._backward

        def corrupted(grad):
            real_backward(grad * 1.01)

        out._backward = corrupted
        return out

    report = grad_check(loss, t, n_samples=12, rng=np.random.default_rng(3))
    assert not report.passed
    assert report.failures[0].tensor == "w"
    assert "FAIL" in report.summary()


def test_alignment_loss_on_toy_example_passes():
    model, examples, dictionary, weights = build_toy_setup(seed=1)
    closures = loss_closures(model, examples, dictionary, weights)
    report = grad_check(closures["L_align"], model.params, n_samples=80,
                        rng=np.random.default_rng(4))
    assert report.passed, report.summary()


def test_every_tensor_receives_at_least_one_coordinate():
    model, examples, dictionary, weights = build_toy_setup(seed=2)
    closures = loss_closures(model, examples, dictionary, weights)
    report = grad_check(closures["total"], model.params, n_samples=len(model.params),
                        rng=np.random.default_rng(5))
    assert set(report.worst_by_tensor) == set(model.params)
