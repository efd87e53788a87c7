"""Adversarial estimation-of-distribution optimizer (OPT-GAN).

A solution generator maps uniform noise onto the search domain and is trained
against two Wasserstein critics with gradient penalty: an *exploitation*
critic that compares generated points with bootstrap samples from the
knowledge base of best solutions, and an *exploration* critic that compares
them with uniform samples on the domain.  The generator minimizes a convex
mixture of both critics, so its sampling distribution interpolates between
"copy the best solutions found so far" and "cover the whole domain".

One run alternates epochs of adversarial training with a batch of objective
evaluations; evaluated points update the knowledge base, whose capacity
shrinks over the budget to move the balance from exploration to exploitation.
Before spending any budget, the generator is pre-trained against the
exploration critic alone until it emits near-uniform samples, which removes
initialization bias.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .benchmarks import BenchmarkProblem, EvalCounter, evaluate, problem_to_dict
from .domain import Box
from .knowledge import (OptimalSet, ScoredSolution, bootstrap_sample,
                        init_optimal_set, shrink_size, shrink_to,
                        update_optimal_set)
from .nets import (AdamState, MlpParams, adam_step, critic_loss_param_grad,
                   generator_loss_param_grad, generator_pretrain_loss_grad,
                   gp_penalty_param_grad, init_adam_state, init_params,
                   mlp_forward)
from .trace import EpochDiagnostics, RunTrace


@dataclass
class OptGanConfig:
    """All hyperparameters of one optimization run.

    The defaults are the published operating point of the method; only
    ``max_fes`` and ``seed`` normally need changing per experiment.
    """

    initial_set_size: int = 150      # knowledge-base capacity at start
    population_size: int = 30        # evaluated solutions per epoch
    shrink_rate: float = 1.5         # capacity decay; 0 fixes the size, >=1 ends at 1
    balance: float = 0.3             # exploration weight: 0 = pure exploitation
    gan_iters: int = 150             # generator updates per epoch
    critic_iters: int = 4            # critic updates per generator update
    pretrain_iters: int = 100        # outer pre-training sweeps (each runs gan_iters)
    gp_weight: float = 0.1           # gradient-penalty factor
    batch_size: int = 30             # training batch size
    hidden_size: int = 50            # hidden width of generator and critics
    noise_factor: int = 2            # generator input width = noise_factor * dim
    lr_gen: float = 1e-4
    lr_critic: float = 5e-3
    hidden_slope: float = 0.01       # negative slope of the hidden activation
    output_gain: float = 1.0         # gain of the generator's tanh squashing
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    max_fes: int = 10_000            # evaluation budget, counting initialization
    precision: float = 1e-8          # run stops once fbest - f* - precision < 0
    time_limit_secs: float | None = None
    seed: int = 0

    def validate(self):
        counts = ("initial_set_size", "population_size", "gan_iters",
                  "critic_iters", "pretrain_iters", "batch_size",
                  "hidden_size", "noise_factor", "max_fes")
        for name in counts:
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.shrink_rate < 0.0 or self.balance < 0.0 or self.gp_weight < 0.0:
            raise ValueError("shrink_rate, balance and gp_weight must be >= 0")
        if self.precision <= 0.0:
            raise ValueError("precision must be > 0")
        if self.lr_gen <= 0.0 or self.lr_critic <= 0.0:
            raise ValueError("learning rates must be > 0")
        if not 0.0 < self.hidden_slope < 1.0:
            raise ValueError("hidden_slope must lie in (0, 1)")
        if self.output_gain <= 0.0:
            raise ValueError("output_gain must be > 0")
        if self.time_limit_secs is not None and self.time_limit_secs <= 0.0:
            raise ValueError("time_limit_secs must be > 0 when set")


@dataclass
class OptGanState:
    """Networks, their optimizer moments, the knowledge base and bookkeeping."""

    gen: MlpParams
    gen_opt: AdamState
    critic_exploit: MlpParams
    critic_exploit_opt: AdamState
    critic_explore: MlpParams
    critic_explore_opt: AdamState
    opt_set: OptimalSet | None
    fes: int = 0
    epoch: int = 0


def init_state(domain: Box, config: OptGanConfig, rng: np.random.Generator,
               opt_set: OptimalSet | None = None) -> OptGanState:
    """Fresh networks for a run on ``domain``.

    Initialization order (generator, exploitation critic, exploration critic)
    is part of the determinism contract.
    """
    config.validate()
    dim = domain.dim
    adam = dict(beta1=config.adam_beta1, beta2=config.adam_beta2,
                epsilon=config.adam_epsilon)
    gen = init_params(config.noise_factor * dim, config.hidden_size, dim, rng,
                      hidden_slope=config.hidden_slope, output_box=domain,
                      output_gain=config.output_gain)
    exploit = init_params(dim, config.hidden_size, 1, rng,
                          hidden_slope=config.hidden_slope)
    explore = init_params(dim, config.hidden_size, 1, rng,
                          hidden_slope=config.hidden_slope)
    return OptGanState(gen, init_adam_state(gen, **adam),
                       exploit, init_adam_state(exploit, **adam),
                       explore, init_adam_state(explore, **adam),
                       opt_set)


def _noise(config: OptGanConfig, gen: MlpParams, count: int,
           rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(count, gen.in_dim))


def _critic_update(params: MlpParams, opt: AdamState, real: np.ndarray,
                   fake: np.ndarray, mix: np.ndarray, config: OptGanConfig):
    x_hat = mix * fake + (1.0 - mix) * real
    _, grads = critic_loss_param_grad(params, real, fake)
    _, gp = gp_penalty_param_grad(params, x_hat, config.gp_weight)
    # The penalty's bias gradients are identically zero; fold in weights only.
    np.add(grads.w1, gp.w1, out=grads.w1)
    np.add(grads.w2, gp.w2, out=grads.w2)
    return adam_step(params, opt, grads, config.lr_critic)


def train_exploit_step(state: OptGanState, config: OptGanConfig,
                       rng: np.random.Generator) -> OptGanState:
    """One update of the exploitation critic against knowledge-base samples.

    Draw order: noise batch, bootstrap indices, interpolation mixers (one
    scalar per sample pair).  Spends no function evaluations.
    """
    if state.opt_set is None or not state.opt_set.members:
        raise ValueError("exploitation training needs a non-empty optimal set")
    fake = mlp_forward(state.gen, _noise(config, state.gen, config.batch_size, rng))
    real = bootstrap_sample(state.opt_set, config.batch_size, rng)
    mix = rng.uniform(0.0, 1.0, size=(config.batch_size, 1))
    state.critic_exploit, state.critic_exploit_opt = _critic_update(
        state.critic_exploit, state.critic_exploit_opt, real, fake, mix, config)
    return state


def train_explore_step(state: OptGanState, domain: Box, config: OptGanConfig,
                       rng: np.random.Generator) -> OptGanState:
    """One update of the exploration critic against uniform domain samples.

    Draw order: noise batch, uniform batch, interpolation mixers.  Spends no
    function evaluations.
    """
    fake = mlp_forward(state.gen, _noise(config, state.gen, config.batch_size, rng))
    real = domain.sample(rng, config.batch_size)
    mix = rng.uniform(0.0, 1.0, size=(config.batch_size, 1))
    state.critic_explore, state.critic_explore_opt = _critic_update(
        state.critic_explore, state.critic_explore_opt, real, fake, mix, config)
    return state


def train_generator_step(state: OptGanState, config: OptGanConfig,
                         rng: np.random.Generator) -> OptGanState:
    """One generator update against the critic mixture; critics untouched."""
    noise = _noise(config, state.gen, config.batch_size, rng)
    _, grads = generator_loss_param_grad(state.gen, state.critic_exploit,
                                         state.critic_explore, noise,
                                         config.balance)
    state.gen, state.gen_opt = adam_step(state.gen, state.gen_opt, grads,
                                         config.lr_gen)
    return state


def pretrain_generator(state: OptGanState, domain: Box, config: OptGanConfig,
                       rng: np.random.Generator) -> OptGanState:
    """Train the generator toward uniform coverage of the domain.

    Runs ``pretrain_iters * gan_iters`` generator updates, each preceded by
    ``critic_iters`` exploration-critic updates; only the exploration critic
    takes part.  Consumes zero function evaluations.
    """
    for _ in range(config.pretrain_iters):
        for _ in range(config.gan_iters):
            for _ in range(config.critic_iters):
                train_explore_step(state, domain, config, rng)
            noise = _noise(config, state.gen, config.batch_size, rng)
            _, grads = generator_pretrain_loss_grad(state.gen,
                                                    state.critic_explore, noise)
            state.gen, state.gen_opt = adam_step(state.gen, state.gen_opt,
                                                 grads, config.lr_gen)
    return state


def sample_generator(state: OptGanState, count: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` candidate solutions (rows) from the generator.

    Outputs lie strictly inside the domain by construction.  Evaluating them
    is the caller's job; no budget is spent here.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    return mlp_forward(state.gen, rng.uniform(-1.0, 1.0,
                                              size=(count, state.gen.in_dim)))


def wasserstein_estimates(state: OptGanState, domain: Box,
                          config: OptGanConfig,
                          rng: np.random.Generator) -> tuple[float, float]:
    """Critic-based distance estimates between the generator and each target.

    Returns ``(w_exploit, w_explore)``: mean critic value on generated samples
    minus mean on knowledge-base (resp. uniform) samples.  Purely diagnostic;
    no parameters or budget change.  Draw order: exploit noise, bootstrap
    indices, explore noise, uniform batch.
    """
    if state.opt_set is None or not state.opt_set.members:
        raise ValueError("diagnostics need a non-empty optimal set")
    size = config.batch_size
    fake = mlp_forward(state.gen, _noise(config, state.gen, size, rng))
    kb = bootstrap_sample(state.opt_set, size, rng)
    w_exploit = float(np.mean(mlp_forward(state.critic_exploit, fake))
                      - np.mean(mlp_forward(state.critic_exploit, kb)))
    fake = mlp_forward(state.gen, _noise(config, state.gen, size, rng))
    uniform = domain.sample(rng, size)
    w_explore = float(np.mean(mlp_forward(state.critic_explore, fake))
                      - np.mean(mlp_forward(state.critic_explore, uniform)))
    return w_exploit, w_explore


def _params_to_dict(params: MlpParams) -> dict:
    data = {
        "w1": params.w1.tolist(),
        "b1": params.b1.tolist(),
        "w2": params.w2.tolist(),
        "b2": params.b2.tolist(),
        "hidden_slope": params.hidden_slope,
        "output_gain": params.output_gain,
    }
    if params.output_box is not None:
        data["output_low"] = params.output_box.low.tolist()
        data["output_high"] = params.output_box.high.tolist()
    return data


def params_from_dict(data: dict) -> MlpParams:
    """Rebuild network parameters from their trace-header form."""
    box = None
    if "output_low" in data:
        box = Box(np.asarray(data["output_low"], dtype=np.float64),
                  np.asarray(data["output_high"], dtype=np.float64))
    return MlpParams(np.asarray(data["w1"], dtype=np.float64),
                     np.asarray(data["b1"], dtype=np.float64),
                     np.asarray(data["w2"], dtype=np.float64),
                     np.asarray(data["b2"], dtype=np.float64),
                     float(data["hidden_slope"]), box,
                     float(data.get("output_gain", 1.0)))


def optimize(problem: BenchmarkProblem, config: OptGanConfig,
             rng: np.random.Generator,
             counter: EvalCounter | None = None
             ) -> tuple[ScoredSolution, RunTrace]:
    """Run the full optimization on ``problem`` and return (best, trace).

    Budget accounting: the ``initial_set_size`` seeding queries count toward
    ``max_fes``, and an epoch starts only if its ``population_size``
    evaluations still fit, so the recorded budget never exceeds ``max_fes``.
    Termination: indicator below zero ("precision"), budget exhausted
    ("budget"), or wall clock past ``time_limit_secs`` ("time").  Non-finite
    objective values are recorded as +inf fitness so they can never enter a
    training batch as numbers.
    """
    config.validate()
    if config.max_fes <= config.initial_set_size:
        raise ValueError("max_fes must exceed initial_set_size")
    if counter is None:
        counter = EvalCounter()
    start = time.monotonic()

    def query(x: np.ndarray) -> float:
        value = evaluate(problem, x, counter)
        return value if math.isfinite(value) else math.inf

    def out_of_time() -> bool:
        return (config.time_limit_secs is not None
                and time.monotonic() - start > config.time_limit_secs)

    opt_set = init_optimal_set(problem.domain, config.initial_set_size, query, rng)
    state = init_state(problem.domain, config, rng, opt_set)
    state.fes = counter.count

    def indicator() -> float:
        return state.opt_set.members[0].fitness - problem.f_star - config.precision

    records = [(state.fes, indicator())]
    diagnostics: list[EpochDiagnostics] = []
    reason = None
    if records[-1][1] < 0.0:
        reason = "precision"

    if reason is None:
        pretrain_generator(state, problem.domain, config, rng)
    while reason is None:
        if out_of_time():
            reason = "time"
            break
        if state.fes + config.population_size > config.max_fes:
            reason = "budget"
            break
        for _ in range(config.gan_iters):
            for _ in range(config.critic_iters):
                train_exploit_step(state, config, rng)
                train_explore_step(state, problem.domain, config, rng)
            train_generator_step(state, config, rng)
        candidates = [ScoredSolution(x, query(x))
                      for x in sample_generator(state, config.population_size, rng)]
        state.opt_set = update_optimal_set(state.opt_set, candidates)
        capacity = shrink_size(config.initial_set_size, config.shrink_rate,
                               counter.count, config.max_fes)
        state.opt_set = shrink_to(state.opt_set, capacity)
        state.fes = counter.count
        state.epoch += 1
        w_exploit, w_explore = wasserstein_estimates(state, problem.domain,
                                                     config, rng)
        records.append((state.fes, indicator()))
        diagnostics.append(EpochDiagnostics(state.fes, capacity,
                                            state.opt_set.members[0].fitness,
                                            w_exploit, w_explore))
        if records[-1][1] < 0.0:
            reason = "precision"

    best = state.opt_set.members[0]
    header = {
        "format": "optgan-trace-v1",
        "build": __version__,
        "optimizer": "opt-gan",
        "problem": problem_to_dict(problem),
        "config": asdict(config),
        "seed": config.seed,
        "evaluations": counter.count,
        "fes_accounting": "initialization queries count toward max_fes",
        "final_generator": _params_to_dict(state.gen),
    }
    trace = RunTrace(header, records, diagnostics, reason)
    return best, trace
