"""Dense layers with analytic backward passes, gradient checking, and the
dominant singular direction via power iteration."""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NumericError, ShapeError, ValidationError


@dataclass
class LayerParams:
    """One affine layer: weight (out_dim, in_dim) and bias (out_dim,)."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2 or self.bias.ndim != 1:
            raise ShapeError("weight must be 2-D and bias 1-D")
        if self.weight.shape[0] != self.bias.shape[0]:
            raise ShapeError(
                f"bias length {self.bias.shape[0]} != weight rows {self.weight.shape[0]}"
            )
        if not (np.isfinite(self.weight).all() and np.isfinite(self.bias).all()):
            raise ValidationError("layer parameters must be finite")

    @property
    def in_dim(self):
        return self.weight.shape[1]

    @property
    def out_dim(self):
        return self.weight.shape[0]


@dataclass
class GradCheckReport:
    max_relative_error: float
    worst_parameter_index: tuple  # (group name, flat index within group)


def tanh_activation(t):
    """Saturating odd activation (e^{2t}-1)/(e^{2t}+1); accepts scalars or arrays."""
    return np.tanh(t)


def affine_forward(layer, x):
    """Pre-activation w @ x + b for a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (layer.in_dim,):
        raise ShapeError(f"input length {x.shape} != layer in_dim {layer.in_dim}")
    return layer.weight @ x + layer.bias


def layer_backward(layer, x, upstream_grad, activation="tanh"):
    """Analytic gradients of (activation ∘ affine) at x.

    Returns (grad_weight, grad_bias, grad_input) for the given upstream
    gradient w.r.t. the layer output.  activation is 'tanh' or 'linear'.
    """
    x = np.asarray(x, dtype=np.float64)
    upstream_grad = np.asarray(upstream_grad, dtype=np.float64)
    if x.shape != (layer.in_dim,):
        raise ShapeError(f"input length {x.shape} != layer in_dim {layer.in_dim}")
    if upstream_grad.shape != (layer.out_dim,):
        raise ShapeError(f"upstream length {upstream_grad.shape} != out_dim {layer.out_dim}")
    z = layer.weight @ x + layer.bias
    if activation == "tanh":
        h = np.tanh(z)
        dz = upstream_grad * (1.0 - h * h)
    elif activation == "linear":
        dz = upstream_grad
    else:
        raise ValueError(f"unknown activation {activation!r}")
    grad_weight = np.outer(dz, x)
    grad_bias = dz
    grad_input = layer.weight.T @ dz
    return grad_weight, grad_bias, grad_input


def grad_check(loss_fn, params, step=1e-5, groups=None):
    """Compare analytic gradients against central finite differences.

    loss_fn maps a flat float64 vector to (loss, gradient).  The numeric
    side perturbs one coordinate at a time with the given step; the error
    for each coordinate is |analytic - numeric| / max(1, |analytic|,
    |numeric|).  groups, when given, is a list of (name, size) pairs that
    partition the flat vector and label the worst offender in the report.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    params = np.asarray(params, dtype=np.float64)
    loss, grad = loss_fn(params)
    if not np.isfinite(loss):
        raise NumericError("loss is non-finite at the evaluation point")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != params.shape:
        raise ShapeError("analytic gradient shape does not match params")

    worst = 0.0
    worst_idx = 0
    for i in range(params.size):
        bumped = params.copy()
        bumped[i] += step
        up = loss_fn(bumped)[0]
        bumped[i] -= 2.0 * step
        down = loss_fn(bumped)[0]
        if not (np.isfinite(up) and np.isfinite(down)):
            raise NumericError(f"loss is non-finite near parameter {i}")
        numeric = (up - down) / (2.0 * step)
        err = abs(grad[i] - numeric) / max(1.0, abs(grad[i]), abs(numeric))
        if err > worst:
            worst = err
            worst_idx = i

    if groups is None:
        label = ("params", worst_idx)
    else:
        label = None
        base = 0
        for name, size in groups:
            if worst_idx < base + size:
                label = (name, worst_idx - base)
                break
            base += size
        if label is None:
            raise ValueError("groups do not cover the parameter vector")
    return GradCheckReport(max_relative_error=float(worst), worst_parameter_index=label)


def top_singular_direction(m, tol=1e-9, max_iter=10000, seed=0):
    """Unit right-singular vector of m for its largest singular value.

    Power iteration on mᵀm; converged when successive iterates satisfy
    |<v, v_prev>| >= 1 - tol.  The sign is fixed so the entry of largest
    magnitude is positive.  Raises ConvergenceError (carrying the last
    iterate) if max_iter is exhausted.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError("expected a 2-D matrix")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.any(m):
        raise ValidationError("matrix must be nonzero")

    gram = m.T @ m
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm < 1e-300:
            # landed in the null space; re-seed the iterate
            w = rng.standard_normal(gram.shape[0])
            norm = np.linalg.norm(w)
        w /= norm
        if abs(w @ v) >= 1.0 - tol:
            v = w
            break
        v = w
    else:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations", last_iterate=v
        )
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return v
