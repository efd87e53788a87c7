"""Shared oracles for the test suite.

The finite-difference helpers here are the ground truth for every analytic
gradient in the package: they only ever call the forward/loss functions, so
they stay independent of the gradient code they check.
"""

from __future__ import annotations

import numpy as np

from optgan.nets import GradBundle, MlpParams

FD_STEP = 1e-5

PARAM_FIELDS = ("w1", "b1", "w2", "b2")


def flatten_bundle(bundle: GradBundle) -> np.ndarray:
    return np.concatenate([getattr(bundle, f).ravel() for f in PARAM_FIELDS])


def fd_param_grads(loss_fn, params: MlpParams, step: float = FD_STEP) -> np.ndarray:
    """Central finite differences of ``loss_fn(params)`` over every parameter.

    Perturbs entries in place and restores them, returning the flattened
    gradient in the same order as :func:`flatten_bundle`.
    """
    pieces = []
    for field in PARAM_FIELDS:
        arr = getattr(params, field)
        grad = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + step
            up = loss_fn(params)
            arr[idx] = orig - step
            down = loss_fn(params)
            arr[idx] = orig
            grad[idx] = (up - down) / (2.0 * step)
        pieces.append(grad.ravel())
    return np.concatenate(pieces)


def fd_input_grad(forward_fn, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Central finite differences of a scalar-valued function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        bump = np.zeros_like(x)
        bump[i] = step
        grad[i] = (forward_fn(x + bump) - forward_fn(x - bump)) / (2.0 * step)
    return grad


def rel_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """Whole-vector relative error with an absolute floor for near-zero exacts."""
    denom = max(float(np.linalg.norm(exact)), 1e-10)
    return float(np.linalg.norm(approx - exact)) / denom


def brute_force_update(opt_set, candidates):
    """Independent knowledge-base oracle: explicit decorate-sort with the
    documented tie rules (fitness, incumbents before candidates, then original
    index), truncated to capacity."""
    decorated = [(m.fitness, 0, i, m) for i, m in enumerate(opt_set.members)]
    decorated += [(c.fitness, 1, i, c) for i, c in enumerate(candidates)]
    decorated.sort(key=lambda item: item[:3])
    return [item[3] for item in decorated[:opt_set.capacity]]


def brute_force_ecdf(traces, targets, budgets):
    """Triple-loop ECDF oracle: a (trace, target) pair is solved at budget b
    when any record with fes <= b has indicator strictly below the target."""
    out = []
    for b in budgets:
        hits = 0
        for trace in traces:
            for tau in targets:
                if any(f <= b and v < tau for f, v in trace.records):
                    hits += 1
        out.append(hits / (len(traces) * len(targets)))
    return out


def kink_clearance(params: MlpParams, batch: np.ndarray) -> float:
    """Smallest |pre-activation| over a batch.

    Central differences are only a valid oracle when no hidden unit sits
    within the FD step of its kink; callers should redraw batches whose
    clearance is below a few FD steps.
    """
    z = np.atleast_2d(batch) @ params.w1.T + params.b1
    return float(np.min(np.abs(z)))


def linear_critic(weights: np.ndarray, slope: float = 0.01) -> MlpParams:
    """Exactly linear critic ``D(x) = weights . x`` built from one leaky pair.

    ``leaky(z) - leaky(-z) = (1 + slope) z`` for every z, so two mirrored
    hidden units reproduce a clean linear map through the nonlinearity.
    """
    weights = np.asarray(weights, dtype=np.float64)
    n = weights.size
    gain = 1.0 / (1.0 + slope)
    return MlpParams(
        w1=np.vstack([weights, -weights]),
        b1=np.zeros(2),
        w2=np.array([[gain, -gain]]),
        b2=np.zeros(1),
        hidden_slope=slope,
    )
