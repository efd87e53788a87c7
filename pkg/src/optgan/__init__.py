"""Black-box global optimization with an adversarially trained generator.

The package bundles the optimizer itself (:mod:`optgan.optimizer`), its
numeric core (:mod:`optgan.nets`), the knowledge base
(:mod:`optgan.knowledge`), a benchmark suite (:mod:`optgan.benchmarks`), and
an experiment harness with baselines, ECDF curves and heatmap export
(:mod:`optgan.harness`).
"""

__version__ = "0.1.0"

from .benchmarks import (BenchmarkProblem, EvalCounter, evaluate, kernel_value,
                         make_problem, problem_from_dict, problem_to_dict,
                         random_rotation)
from .domain import Box
from .knowledge import (OptimalSet, ScoredSolution, bootstrap_sample,
                        init_optimal_set, shrink_size, shrink_to,
                        update_optimal_set)
from .nets import (AdamState, GradBundle, MlpParams, adam_step,
                   critic_loss_param_grad, generator_loss_param_grad,
                   generator_pretrain_loss_grad, gp_penalty_param_grad,
                   init_adam_state, init_params, leaky_relu, mixture_weights,
                   mlp_forward, mlp_input_gradient)
from .optimizer import (OptGanConfig, OptGanState, init_state, optimize,
                        params_from_dict, pretrain_generator, sample_generator,
                        train_explore_step, train_exploit_step,
                        train_generator_step, wasserstein_estimates)
from .trace import (EpochDiagnostics, RunTrace, read_trace, trace_from_string,
                    trace_to_string, write_trace)

__all__ = [
    "AdamState", "BenchmarkProblem", "Box", "EpochDiagnostics", "EvalCounter",
    "GradBundle", "MlpParams", "OptGanConfig", "OptGanState", "OptimalSet",
    "RunTrace", "ScoredSolution", "adam_step", "bootstrap_sample",
    "critic_loss_param_grad", "evaluate", "generator_loss_param_grad",
    "generator_pretrain_loss_grad", "gp_penalty_param_grad", "init_adam_state",
    "init_optimal_set", "init_params", "init_state", "kernel_value",
    "leaky_relu", "make_problem", "mixture_weights", "mlp_forward",
    "mlp_input_gradient",
    "optimize", "params_from_dict", "pretrain_generator", "problem_from_dict",
    "problem_to_dict", "random_rotation", "read_trace", "sample_generator",
    "shrink_size", "shrink_to", "trace_from_string", "trace_to_string",
    "train_explore_step", "train_exploit_step", "train_generator_step",
    "update_optimal_set", "wasserstein_estimates", "write_trace",
]
