"""Central finite-difference verification of tape gradients."""

from dataclasses import dataclass, field

import numpy as np

from dagn.numerics.tensor import Tape, backward


class OracleError(RuntimeError):
    """The function under test is not deterministic."""


# keeps the relative error defined where both gradients vanish
DENOM_FLOOR = 1e-6


@dataclass
class GradCheckReport:
    errors: dict = field(default_factory=dict)  # parameter name -> max relative error
    tol: float = 0.0
    relu_margin: float = np.inf  # min |x| at any ReLU input during the taped pass

    @property
    def passed(self):
        return all(e <= self.tol for e in self.errors.values())

    @property
    def max_error(self):
        return max(self.errors.values(), default=0.0)

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        worst = max(self.errors, key=self.errors.get) if self.errors else "-"
        return f"gradcheck {status}: max rel err {self.max_error:.3e} ({worst}), tol {self.tol:g}"


def relative_error(analytic, numeric):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), DENOM_FLOOR)
    return float((np.abs(analytic - numeric) / denom).max(initial=0.0))


def finite_diff_check(f, params, h=1e-5, tol=1e-4):
    """Compare tape gradients of ``f()`` against central differences.

    ``f`` takes no arguments and returns a scalar Tensor computed from
    ``params``. Each parameter element is perturbed in place by +-h and
    restored afterwards.
    """
    if not 0.0 < h <= 1e-2:
        raise ValueError(f"step h must lie in (0, 1e-2], got {h}")
    base = float(f().data)
    if float(f().data) != base:
        raise OracleError("f returned different values for identical parameters")

    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = f()
    backward(loss)
    analytic = {id(p): p.grad.copy() for p in params}

    report = GradCheckReport(tol=tol, relu_margin=tape.relu_margin)
    for p in params:
        numeric = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        num_flat = numeric.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = float(f().data)
            flat[i] = orig - h
            down = float(f().data)
            flat[i] = orig
            num_flat[i] = (up - down) / (2.0 * h)
        report.errors[p.name] = relative_error(analytic[id(p)], numeric)
    return report
