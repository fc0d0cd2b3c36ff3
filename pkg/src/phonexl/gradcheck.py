"""Central finite-difference validation of analytic gradients.

Checks run in float64 with step 1e-5.  Relative error uses
|fd - analytic| / max(|fd|, |analytic|, 1e-3), so coordinates whose true
gradient is zero pass cleanly while a 1% corruption of any solid gradient
fails loudly.
"""

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor, zero_grads

DEFAULT_STEP = 1e-5
DEFAULT_TOL = 1e-4
REL_FLOOR = 1e-3


@dataclass
class CoordinateResult:
    tensor: str
    index: int
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    tolerance: float
    n_coordinates: int = 0
    worst_by_tensor: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_rel_error(self) -> float:
        if not self.worst_by_tensor:
            return 0.0
        return max(r.rel_error for r in self.worst_by_tensor.values())

    def summary(self) -> str:
        lines = [f"gradient check: {self.n_coordinates} coordinates, "
                 f"tol {self.tolerance:g}, max rel err {self.max_rel_error:.3e}, "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        for name in sorted(self.worst_by_tensor):
            r = self.worst_by_tensor[name]
            lines.append(f"  {name:24s} worst {r.rel_error:.3e} at flat index {r.index}")
        for r in self.failures:
            lines.append(f"  FAIL {r.tensor}[{r.index}]: analytic {r.analytic:.6g} "
                         f"vs numeric {r.numeric:.6g} (rel {r.rel_error:.3e})")
        return "\n".join(lines)


def _sample_coordinates(params: dict[str, Tensor], n_samples: int,
                        rng: np.random.Generator) -> list[tuple[str, int]]:
    """At least one coordinate per tensor, the rest drawn at random."""
    names = sorted(params)
    coords = [(name, int(rng.integers(params[name].value.size))) for name in names]
    sizes = np.array([params[name].value.size for name in names], dtype=np.float64)
    weights = sizes / sizes.sum()
    while len(coords) < n_samples:
        name = names[int(rng.choice(len(names), p=weights))]
        coords.append((name, int(rng.integers(params[name].value.size))))
    return coords


def grad_check(loss_fn, params: dict[str, Tensor], n_samples: int = 200,
               step: float = DEFAULT_STEP, tolerance: float = DEFAULT_TOL,
               rng: np.random.Generator | None = None) -> GradCheckReport:
    """Compare analytic gradients of `loss_fn()` against central differences.

    `loss_fn` must rebuild the forward graph on every call and return a
    scalar Tensor.  Every tensor in `params` is covered by at least one
    sampled coordinate.
    """
    rng = rng or np.random.default_rng(0)
    zero_grads(params)
    loss = loss_fn()
    loss.backward()
    analytic = {name: (t.grad.copy() if t.grad is not None else np.zeros_like(t.value))
                for name, t in params.items()}

    report = GradCheckReport(tolerance=tolerance)
    for name, index in _sample_coordinates(params, n_samples, rng):
        flat = params[name].value.reshape(-1)
        original = flat[index]
        flat[index] = original + step
        f_plus = float(loss_fn().value)
        flat[index] = original - step
        f_minus = float(loss_fn().value)
        flat[index] = original
        numeric = (f_plus - f_minus) / (2.0 * step)
        an = float(analytic[name].reshape(-1)[index])
        rel = abs(numeric - an) / max(abs(numeric), abs(an), REL_FLOOR)
        result = CoordinateResult(name, index, an, numeric, rel)
        report.n_coordinates += 1
        worst = report.worst_by_tensor.get(name)
        if worst is None or rel > worst.rel_error:
            report.worst_by_tensor[name] = result
        if rel >= tolerance:
            report.failures.append(result)
    return report
