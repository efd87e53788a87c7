"""Minimal numeric layer for the adversarial optimizer.

Single-hidden-layer perceptrons (the solution generator and the two critics)
with closed-form gradients for the fixed architecture: forward pass, exact
input gradients, parameter gradients of the Wasserstein critic loss, parameter
gradients of the gradient-penalty term (which differentiates through the input
gradient), the generator's mixture loss, and Adam updates.

Everything is float64 and purely functional: no function mutates its inputs,
and results depend only on the arguments (plus the explicit RNG where one is
taken).  Batches are rows of 2-D arrays.

Conventions for a network ``y = act_out(w2 @ leaky_relu(w1 @ x + b1) + b2)``:

* ``w1`` has shape (hidden, in), ``b1`` (hidden,), ``w2`` (out, hidden),
  ``b2`` (out,).
* Critics have scalar linear output (``out == 1``, ``output_box is None``).
* A generator carries ``output_box``: its raw output is squashed with tanh and
  scaled onto the box, so samples always land strictly inside the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import Box


@dataclass
class MlpParams:
    """Weights and biases of a single-hidden-layer perceptron.

    ``output_box is None`` means a linear output layer (critics); otherwise
    the output is ``center + halfwidth * tanh(output_gain * raw)`` per
    component.  The gain trades output-space step size against the raw range
    needed to cover the box; it only matters for squashed outputs.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    hidden_slope: float = 0.01
    output_box: Box | None = None
    output_gain: float = 1.0

    @property
    def in_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def out_dim(self) -> int:
        return self.w2.shape[0]

    def copy(self) -> "MlpParams":
        return MlpParams(self.w1.copy(), self.b1.copy(), self.w2.copy(),
                         self.b2.copy(), self.hidden_slope, self.output_box,
                         self.output_gain)


@dataclass
class GradBundle:
    """Per-parameter arrays shaped exactly like the fields of an MlpParams."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __add__(self, other: "GradBundle") -> "GradBundle":
        return GradBundle(self.w1 + other.w1, self.b1 + other.b1,
                          self.w2 + other.w2, self.b2 + other.b2)

    def scaled(self, factor: float) -> "GradBundle":
        return GradBundle(factor * self.w1, factor * self.b1,
                          factor * self.w2, factor * self.b2)

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in (self.w1, self.b1, self.w2, self.b2))


def zeros_like_params(params: MlpParams) -> GradBundle:
    return GradBundle(np.zeros_like(params.w1), np.zeros_like(params.b1),
                      np.zeros_like(params.w2), np.zeros_like(params.b2))


@dataclass
class AdamState:
    """First/second moment estimates for one MlpParams, plus step counter."""

    m: GradBundle
    v: GradBundle
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def _param_sizes(params: MlpParams):
    h, i, o = params.hidden_dim, params.in_dim, params.out_dim
    return h * i, h * i + h, h * i + h + o * h, h * i + h + o * h + o


def _pack(w1, b1, w2, b2) -> np.ndarray:
    return np.concatenate([w1.ravel(), b1, w2.ravel(), b2])


def _flat_views(flat: np.ndarray, params: MlpParams):
    a, b, c, d = _param_sizes(params)
    return (flat[:a].reshape(params.hidden_dim, params.in_dim), flat[a:b],
            flat[b:c].reshape(params.out_dim, params.hidden_dim), flat[c:d])


def _flat_of_bundle(bundle, params: MlpParams) -> np.ndarray:
    # Objects produced by adam_step/init_adam_state carry their flat buffer;
    # their array fields are views of it, so the two can never disagree.
    flat = bundle.__dict__.get("_flat")
    if flat is None:
        flat = _pack(bundle.w1, bundle.b1, bundle.w2, bundle.b2)
    return flat


def _bundle_from_flat(flat: np.ndarray, params: MlpParams) -> GradBundle:
    bundle = GradBundle(*_flat_views(flat, params))
    bundle.__dict__["_flat"] = flat
    return bundle


def init_adam_state(params: MlpParams, beta1: float = 0.9, beta2: float = 0.999,
                    epsilon: float = 1e-8) -> AdamState:
    a, b, c, size = _param_sizes(params)
    return AdamState(_bundle_from_flat(np.zeros(size), params),
                     _bundle_from_flat(np.zeros(size), params),
                     0, beta1, beta2, epsilon)


def leaky_relu(z, slope: float):
    """Elementwise ``z if z >= 0 else slope * z`` with slope in (0, 1)."""
    if not 0.0 < slope < 1.0:
        raise ValueError("slope must lie in (0, 1)")
    z = np.asarray(z, dtype=np.float64)
    return np.where(z >= 0.0, z, slope * z)


def leaky_relu_grad(z, slope: float):
    """Derivative of leaky_relu; the kink at 0 is assigned derivative 1."""
    z = np.asarray(z, dtype=np.float64)
    return np.where(z >= 0.0, 1.0, slope)


def init_params(in_dim: int, hidden_dim: int, out_dim: int,
                rng: np.random.Generator, hidden_slope: float = 0.01,
                output_box: Box | None = None,
                output_gain: float = 1.0) -> MlpParams:
    """Fan-scaled uniform weight init (bound sqrt(6/(fan_in+fan_out))), zero biases."""
    for name, d in (("in_dim", in_dim), ("hidden_dim", hidden_dim), ("out_dim", out_dim)):
        if d < 1:
            raise ValueError(f"{name} must be >= 1")
    if not 0.0 < hidden_slope < 1.0:
        raise ValueError("hidden_slope must lie in (0, 1)")
    if output_box is not None and output_box.dim != out_dim:
        raise ValueError("output_box dimension must match out_dim")
    if output_gain <= 0.0:
        raise ValueError("output_gain must be > 0")
    b1 = math.sqrt(6.0 / (in_dim + hidden_dim))
    b2 = math.sqrt(6.0 / (hidden_dim + out_dim))
    return MlpParams(
        w1=rng.uniform(-b1, b1, size=(hidden_dim, in_dim)),
        b1=np.zeros(hidden_dim),
        w2=rng.uniform(-b2, b2, size=(out_dim, hidden_dim)),
        b2=np.zeros(out_dim),
        hidden_slope=hidden_slope,
        output_box=output_box,
        output_gain=output_gain,
    )


def _as_batch(x, in_dim: int):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != in_dim:
        raise ValueError(f"expected input of width {in_dim}, got shape {x.shape}")
    return batch, single


# Keeps a saturated tanh off the exact box boundary in float64.
_TANH_CLIP = 1.0 - 1e-12


def _squash(raw: np.ndarray, gain: float) -> np.ndarray:
    return np.clip(np.tanh(gain * raw), -_TANH_CLIP, _TANH_CLIP)


def _forward_parts(params: MlpParams, batch: np.ndarray):
    """Pre-activations, hidden output, raw output and activated output."""
    z = batch @ params.w1.T + params.b1
    # Identical to the leaky form for slopes in (0, 1), one temporary cheaper.
    h = np.maximum(z, params.hidden_slope * z)
    raw = h @ params.w2.T + params.b2
    if params.output_box is None:
        return z, h, raw, raw
    box = params.output_box
    return z, h, raw, box.center + box.halfwidth * _squash(raw, params.output_gain)


def mlp_forward(params: MlpParams, x) -> np.ndarray:
    """Forward pass; accepts a single vector or a batch of rows."""
    batch, single = _as_batch(x, params.in_dim)
    out = _forward_parts(params, batch)[3]
    return out[0] if single else out


def _require_critic(params: MlpParams):
    if params.out_dim != 1 or params.output_box is not None:
        raise ValueError("operation requires a critic: scalar linear output")


def _input_grad_batch(params: MlpParams, batch: np.ndarray) -> np.ndarray:
    # d D / d x = w1^T (w2 * relu'(z)); rows are per-sample gradients.
    z = batch @ params.w1.T + params.b1
    act = np.where(z >= 0.0, 1.0, params.hidden_slope) * params.w2[0]
    return act @ params.w1


def mlp_input_gradient(params: MlpParams, x) -> np.ndarray:
    """Exact gradient of a scalar critic's output with respect to its input."""
    _require_critic(params)
    batch, single = _as_batch(x, params.in_dim)
    grads = _input_grad_batch(params, batch)
    return grads[0] if single else grads


def _check_batch(name: str, batch: np.ndarray, in_dim: int) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != in_dim:
        raise ValueError(f"{name} must be a (count, {in_dim}) batch")
    if batch.shape[0] == 0:
        raise ValueError(f"{name} must be non-empty")
    return batch


def critic_loss_param_grad(params: MlpParams, batch_real, batch_fake):
    """Wasserstein critic loss ``mean D(fake) - mean D(real)`` and its exact
    parameter gradients.

    Returns ``(loss, GradBundle)``.  Batches must be non-empty and of equal
    length.  The constant output bias cancels between the two terms, so its
    gradient is exactly zero.
    """
    _require_critic(params)
    real = _check_batch("batch_real", batch_real, params.in_dim)
    fake = _check_batch("batch_fake", batch_fake, params.in_dim)
    if real.shape[0] != fake.shape[0]:
        raise ValueError("batches must have equal length")
    count = real.shape[0]

    x = np.concatenate([fake, real], axis=0)
    z, h, raw, _ = _forward_parts(params, x)
    coeff = np.empty((2 * count, 1))
    coeff[:count] = 1.0 / count
    coeff[count:] = -1.0 / count
    loss = float(coeff[:, 0] @ raw[:, 0])

    g_w2 = coeff.T @ h
    g_b2 = np.array([0.0])  # +1/S and -1/S contributions cancel exactly
    dz = (coeff @ params.w2) * np.where(z >= 0.0, 1.0, params.hidden_slope)
    g_w1 = dz.T @ x
    g_b1 = dz.sum(axis=0)
    return loss, GradBundle(g_w1, g_b1, g_w2, g_b2)


def gp_penalty_param_grad(params: MlpParams, x_hat, weight: float):
    """Gradient penalty ``mean weight * (||grad_x D(x)||_2 - 1)^2`` over a batch
    of interpolated points, with exact parameter gradients.

    This is a second derivative: the penalty depends on the critic's input
    gradient, which itself depends on the parameters.  The hidden activation
    is piecewise linear, so its second derivative vanishes almost everywhere
    and the bias gradients of the penalty are exactly zero.  A sample whose
    input-gradient norm is zero contributes ``weight * 1`` to the penalty with
    zero parameter gradient (the norm's subgradient at 0 is taken as 0).
    """
    _require_critic(params)
    if weight < 0.0:
        raise ValueError("penalty weight must be >= 0")
    batch = _check_batch("x_hat", x_hat, params.in_dim)
    count = batch.shape[0]

    z = batch @ params.w1.T + params.b1
    act = np.where(z >= 0.0, 1.0, params.hidden_slope)     # (S, H)
    a = act * params.w2[0]                                 # (S, H)
    grads = a @ params.w1                                  # (S, n) input gradients
    norms = np.sqrt(np.sum(grads * grads, axis=1))         # (S,)
    penalty = weight * float(np.mean((norms - 1.0) ** 2))

    safe = np.where(norms > 0.0, norms, 1.0)
    coeff = np.where(norms > 0.0, 2.0 * weight * (norms - 1.0) / (count * safe), 0.0)
    u = coeff[:, None] * grads                             # d penalty / d grads
    g_w1 = a.T @ u
    g_w2 = (act * (u @ params.w1.T)).sum(axis=0)[None, :]
    return penalty, GradBundle(g_w1, np.zeros_like(params.b1), g_w2,
                               np.zeros_like(params.b2))


def _generator_weighted_loss_grad(gen: MlpParams, critic_terms, noise_batch):
    """Loss ``-(1/S) sum_s sum_c weight_c * D_c(G(noise_s))`` with gradients
    taken with respect to the generator parameters only."""
    noise = _check_batch("noise_batch", noise_batch, gen.in_dim)
    count = noise.shape[0]

    z, h, raw, x = _forward_parts(gen, noise)
    dx = np.zeros_like(x)
    loss = 0.0
    for critic, w in critic_terms:
        _require_critic(critic)
        if critic.in_dim != gen.out_dim:
            raise ValueError("critic input width must match generator output width")
        values = _forward_parts(critic, x)[2]
        loss -= w * float(np.mean(values))
        if w != 0.0:
            dx -= (w / count) * _input_grad_batch(critic, x)

    if gen.output_box is None:
        draw = dx
    else:
        t = _squash(raw, gen.output_gain)
        draw = dx * gen.output_box.halfwidth * gen.output_gain * (1.0 - t * t)
    g_w2 = draw.T @ h
    g_b2 = draw.sum(axis=0)
    dz = (draw @ gen.w2) * np.where(z >= 0.0, 1.0, gen.hidden_slope)
    g_w1 = dz.T @ noise
    g_b1 = dz.sum(axis=0)
    return loss, GradBundle(g_w1, g_b1, g_w2, g_b2)


def mixture_weights(balance: float) -> tuple[float, float]:
    """Critic weights ``(1/(1+balance), balance/(1+balance))``.

    The second weight is computed as the exact complement of the first, so
    the pair sums to 1.0 exactly for every balance >= 0.
    """
    if balance < 0.0:
        raise ValueError("balance must be >= 0")
    w_exploit = 1.0 / (1.0 + balance)
    return w_exploit, 1.0 - w_exploit


def generator_loss_param_grad(gen: MlpParams, critic_exploit: MlpParams,
                              critic_explore: MlpParams, noise_batch,
                              balance: float):
    """Generator loss under the exploitation/exploration critic mixture.

    The critics are weighted with :func:`mixture_weights`.  Gradients are
    with respect to the generator parameters; critics are held fixed.
    """
    w_exploit, w_explore = mixture_weights(balance)
    return _generator_weighted_loss_grad(
        gen, [(critic_exploit, w_exploit), (critic_explore, w_explore)], noise_batch)


def generator_pretrain_loss_grad(gen: MlpParams, critic_explore: MlpParams,
                                 noise_batch):
    """Pre-training generator loss ``-(1/S) sum D_R(G(noise))`` and gradients."""
    return _generator_weighted_loss_grad(gen, [(critic_explore, 1.0)], noise_batch)


def adam_step(params: MlpParams, state: AdamState, grads: GradBundle,
              lr: float) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update.  Returns fresh params and state.

    Non-finite gradients are rejected with a ValueError so a poisoned batch
    can never silently corrupt a network.
    """
    if lr <= 0.0:
        raise ValueError("lr must be > 0")
    for name in ("w1", "b1", "w2", "b2"):
        if getattr(grads, name).shape != getattr(params, name).shape:
            raise ValueError(f"gradient shape mismatch on {name}")
    # All four parameter blocks are updated as one flat vector; the returned
    # objects expose reshaped views of it.
    g = _flat_of_bundle(grads, params)
    # A non-finite entry always drives the sum non-finite: cheap reject screen.
    if not math.isfinite(float(g.sum())):
        raise ValueError("adam_step rejected non-finite gradients")
    p = params.__dict__.get("_flat")
    if p is None:
        p = _pack(params.w1, params.b1, params.w2, params.b2)

    t = state.step_count + 1
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    m = state.beta1 * _flat_of_bundle(state.m, params)
    m += (1.0 - state.beta1) * g
    v = state.beta2 * _flat_of_bundle(state.v, params)
    v += (1.0 - state.beta2) * (g * g)
    denom = np.sqrt(v / bc2)
    denom += state.epsilon
    step = m / bc1
    step *= lr
    step /= denom
    new_flat = p - step

    new_params = replace(params, **dict(zip(("w1", "b1", "w2", "b2"),
                                            _flat_views(new_flat, params))))
    new_params.__dict__["_flat"] = new_flat
    new_state = AdamState(_bundle_from_flat(m, params),
                          _bundle_from_flat(v, params), t,
                          state.beta1, state.beta2, state.epsilon)
    return new_params, new_state
