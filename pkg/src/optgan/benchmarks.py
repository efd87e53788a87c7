"""Analytic black-box benchmark problems with instance transforms.

Each problem is a standard test-function kernel composed with an instance
transform: ``f(x) = kernel(R @ (x - shift)) + value_offset``.  The optimizer
only ever sees query access through :func:`evaluate`, which increments an
evaluation counter.

Instances are BBOB-flavoured, not bit-compatible with any official suite: the
kernels are the standard textbook formulas, shifts place the optimum uniformly
in the central 80% of the domain, and rotations are Haar-random orthogonal
matrices.  Every instance is exactly reconstructable from its serialized form
(or from ``(kernel, dim, instance_seed, rotated)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import Box

_TWO_PI = 2.0 * np.pi


def _sphere(z):
    return np.sum(z * z, axis=-1)


def _ellipsoidal(z):
    n = z.shape[-1]
    if n == 1:
        return z[..., 0] ** 2
    weights = 10.0 ** (6.0 * np.arange(n) / (n - 1))
    return np.sum(weights * z * z, axis=-1)


def _rastrigin(z):
    n = z.shape[-1]
    return 10.0 * n + np.sum(z * z - 10.0 * np.cos(_TWO_PI * z), axis=-1)


def _rosenbrock(z):
    a = z[..., :-1]
    b = z[..., 1:]
    return np.sum(100.0 * (b - a * a) ** 2 + (a - 1.0) ** 2, axis=-1)


def _bent_cigar(z):
    return z[..., 0] ** 2 + 1.0e6 * np.sum(z[..., 1:] ** 2, axis=-1)


def _different_powers(z):
    n = z.shape[-1]
    exponents = np.full(1, 2.0) if n == 1 else 2.0 + 4.0 * np.arange(n) / (n - 1)
    return np.sqrt(np.sum(np.abs(z) ** exponents, axis=-1))


def _schaffers_f7(z):
    s = np.sqrt(z[..., :-1] ** 2 + z[..., 1:] ** 2)
    root = np.sqrt(s)
    return np.mean(root + root * np.sin(50.0 * s ** 0.2) ** 2, axis=-1) ** 2


# Series constants for the Weierstrass kernel (a = 0.5, b = 3, 21 terms).
_W_AK = 0.5 ** np.arange(21)
_W_BK = 3.0 ** np.arange(21)
_W_FLOOR = float(np.sum(_W_AK * np.cos(_TWO_PI * _W_BK * 0.5)))


def _weierstrass(z):
    # Inputs are compressed by 0.05 so one period of the fractal ridge spans
    # 20 units and the shifted optimum stays the dominant basin on [-5, 5].
    u = 0.05 * z
    n = u.shape[-1]
    per_dim = np.sum(_W_AK * np.cos(_TWO_PI * _W_BK * (u[..., None] + 0.5)), axis=-1)
    return np.sum(per_dim, axis=-1) - n * _W_FLOOR


_SCHWEFEL_OPT = 420.9687462275036


def _schwefel(z):
    # Modified sin-sqrt Schwefel: inputs scaled by 10 onto the classic
    # [-1000, 1000] range, out-of-range values folded back with a quadratic
    # penalty so the function stays bounded below with its minimum at z = 0.
    n = z.shape[-1]
    w = 10.0 * z + _SCHWEFEL_OPT
    aw = np.abs(w)
    g_inside = w * np.sin(np.sqrt(aw))
    u_hi = 500.0 - np.mod(w, 500.0)
    g_hi = u_hi * np.sin(np.sqrt(np.abs(u_hi))) - (w - 500.0) ** 2 / (10000.0 * n)
    u_lo = np.mod(aw, 500.0) - 500.0
    g_lo = u_lo * np.sin(np.sqrt(np.abs(u_lo))) - (w + 500.0) ** 2 / (10000.0 * n)
    g = np.where(aw <= 500.0, g_inside, np.where(w > 500.0, g_hi, g_lo))
    return 418.9829 * n - np.sum(g, axis=-1)


def _michalewicz(z):
    n = z.shape[-1]
    steep = np.arange(1, n + 1)
    return -np.sum(np.sin(z) * np.sin(steep * z * z / np.pi) ** 20, axis=-1)


def _lunacek_bi_rastrigin(z):
    n = z.shape[-1]
    mu1 = 2.5
    depth = 1.0
    s = 1.0 - 1.0 / (2.0 * math.sqrt(n + 20.0) - 8.2)
    mu2 = -math.sqrt((mu1 * mu1 - depth) / s)
    d1 = z - mu1
    d2 = z - mu2
    funnel1 = np.sum(d1 * d1, axis=-1)
    funnel2 = depth * n + s * np.sum(d2 * d2, axis=-1)
    ripple = 10.0 * (n - np.sum(np.cos(_TWO_PI * d1), axis=-1))
    return np.minimum(funnel1, funnel2) + ripple


def _zeros(n: int) -> np.ndarray:
    return np.zeros(n)


@dataclass(frozen=True)
class KernelSpec:
    """A raw kernel plus the instance conventions that go with it."""

    func: Callable[[np.ndarray], np.ndarray]
    bounds: tuple[float, float]
    min_dim: int = 1
    rotated_default: bool = False
    shifted: bool = True
    offset_scale: float = 100.0
    optimum: Callable[[int], np.ndarray] | None = _zeros
    lower_bound: Callable[[int], float] | None = None


KERNELS: dict[str, KernelSpec] = {
    "sphere": KernelSpec(_sphere, (-5.0, 5.0)),
    "ellipsoidal": KernelSpec(_ellipsoidal, (-5.0, 5.0)),
    "rastrigin": KernelSpec(_rastrigin, (-5.0, 5.0)),
    "rosenbrock": KernelSpec(_rosenbrock, (-5.0, 5.0), min_dim=2,
                             optimum=lambda n: np.ones(n)),
    "bent_cigar": KernelSpec(_bent_cigar, (-5.0, 5.0), rotated_default=True),
    "different_powers": KernelSpec(_different_powers, (-5.0, 5.0),
                                   rotated_default=True),
    "schaffers_f7": KernelSpec(_schaffers_f7, (-5.0, 5.0), min_dim=2,
                               rotated_default=True),
    "weierstrass": KernelSpec(_weierstrass, (-5.0, 5.0), rotated_default=True),
    "schwefel": KernelSpec(_schwefel, (-100.0, 100.0), rotated_default=True),
    # The Michalewicz landscape is anchored to its domain, so it gets no
    # instance transform; its exact minimum has no closed form, so f* is the
    # per-term lower bound -n (never attained, indicator stays positive).
    "michalewicz": KernelSpec(_michalewicz, (0.0, 4.0), shifted=False,
                              offset_scale=0.0, optimum=None,
                              lower_bound=lambda n: -float(n)),
    # The funnel-separation constant is only positive for n >= 2.
    "lunacek_bi_rastrigin": KernelSpec(_lunacek_bi_rastrigin, (-5.0, 5.0),
                                       min_dim=2, rotated_default=True,
                                       optimum=lambda n: np.full(n, 2.5)),
}


def kernel_value(kernel: str, z) -> float | np.ndarray:
    """Raw (untransformed) kernel value at ``z`` (vector or batch of rows)."""
    spec = _kernel_spec(kernel)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] < spec.min_dim:
        raise ValueError(f"{kernel} requires dim >= {spec.min_dim}")
    out = spec.func(z)
    return float(out) if z.ndim == 1 else out


def _kernel_spec(kernel: str) -> KernelSpec:
    try:
        return KERNELS[kernel]
    except KeyError:
        raise ValueError(f"unsupported kernel {kernel!r}; "
                         f"known: {', '.join(sorted(KERNELS))}") from None


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation matrix (orthogonal, determinant +1)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.array([[1.0]])
    gauss = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


@dataclass
class EvalCounter:
    """Counts objective queries; incremented by exactly 1 per evaluate call."""

    count: int = 0


@dataclass
class BenchmarkProblem:
    """A kernel with its search domain and frozen instance transform."""

    kernel: str
    dim: int
    domain: Box
    shift: np.ndarray
    rotation: np.ndarray
    value_offset: float
    f_star: float
    instance_seed: int
    rotated: bool

    @property
    def optimum_location(self) -> np.ndarray | None:
        """Where f attains f_star, or None when only a lower bound is known."""
        spec = _kernel_spec(self.kernel)
        if spec.optimum is None:
            return None
        return self.shift + self.rotation.T @ spec.optimum(self.dim)


def make_problem(kernel: str, dim: int, instance_seed: int,
                 rotated: bool | None = None) -> BenchmarkProblem:
    """Build a deterministic problem instance.

    The optimum location is drawn uniformly in the central 80% of the domain
    and the optimal value is offset by a uniform draw in +-100 (rounded to two
    decimals), so the indicator ``fbest - f*`` is well defined and positive
    away from the optimum.  ``rotated=None`` uses the kernel's convention.
    """
    spec = _kernel_spec(kernel)
    if dim < spec.min_dim:
        raise ValueError(f"{kernel} requires dim >= {spec.min_dim}")
    domain = Box.cube(spec.bounds[0], spec.bounds[1], dim)
    if rotated is None:
        rotated = spec.rotated_default
    rotated = bool(rotated) and dim > 1

    rng = np.random.default_rng(instance_seed)
    rotation = random_rotation(dim, rng) if rotated else np.eye(dim)
    if spec.shifted:
        location = domain.shrunk(0.8).sample(rng, 1)[0]
        shift = location - rotation.T @ spec.optimum(dim)
    else:
        shift = np.zeros(dim)
    if spec.offset_scale > 0.0:
        offset = round(float(rng.uniform(-spec.offset_scale, spec.offset_scale)), 2)
    else:
        offset = 0.0
    if spec.optimum is not None:
        f_min = float(spec.func(spec.optimum(dim)))
    else:
        f_min = float(spec.lower_bound(dim))
    return BenchmarkProblem(kernel, dim, domain, shift, rotation,
                            offset, f_min + offset, instance_seed, rotated)


def evaluate(problem: BenchmarkProblem, x, counter: EvalCounter) -> float:
    """Query the objective at ``x`` and charge one evaluation.

    Out-of-domain points are evaluated as-is (no penalty or clipping); domain
    feasibility is the optimizer's responsibility.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.dim,):
        raise ValueError(f"expected a vector of length {problem.dim}, got {x.shape}")
    z = problem.rotation @ (x - problem.shift)
    value = float(_kernel_spec(problem.kernel).func(z) + problem.value_offset)
    counter.count += 1
    return value


def problem_to_dict(problem: BenchmarkProblem) -> dict:
    """JSON-serializable descriptor from which the instance is exactly rebuilt."""
    return {
        "kernel": problem.kernel,
        "dim": problem.dim,
        "instance_seed": problem.instance_seed,
        "rotated": problem.rotated,
        "domain_low": problem.domain.low.tolist(),
        "domain_high": problem.domain.high.tolist(),
        "shift": problem.shift.tolist(),
        "rotation": problem.rotation.tolist(),
        "value_offset": problem.value_offset,
        "f_star": problem.f_star,
    }


def problem_from_dict(data: dict) -> BenchmarkProblem:
    return BenchmarkProblem(
        kernel=data["kernel"],
        dim=int(data["dim"]),
        domain=Box(np.asarray(data["domain_low"], dtype=np.float64),
                   np.asarray(data["domain_high"], dtype=np.float64)),
        shift=np.asarray(data["shift"], dtype=np.float64),
        rotation=np.asarray(data["rotation"], dtype=np.float64),
        value_offset=float(data["value_offset"]),
        f_star=float(data["f_star"]),
        instance_seed=int(data["instance_seed"]),
        rotated=bool(data["rotated"]),
    )
