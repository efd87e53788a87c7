"""Benchmark suite: kernels, instance transforms, counters, serialization."""

import numpy as np
import pytest

from optgan import (EvalCounter, evaluate, kernel_value, make_problem,
                    problem_from_dict, problem_to_dict, random_rotation)
from optgan.benchmarks import KERNELS


class TestKernelValues:
    def test_sphere_origin(self):
        assert kernel_value("sphere", np.zeros(2)) == 0.0

    def test_rastrigin_at_ones(self):
        # per dim: 10 + 1 - 10 cos(2 pi) = 1, summed over two dims
        assert kernel_value("rastrigin", np.ones(2)) == pytest.approx(2.0)

    def test_rosenbrock_at_ones(self):
        assert kernel_value("rosenbrock", np.ones(2)) == 0.0

    def test_bent_cigar_value(self):
        assert kernel_value("bent_cigar", np.array([0.0, 1.0])) == pytest.approx(1e6)

    def test_ellipsoidal_conditioning(self):
        assert kernel_value("ellipsoidal", np.array([0.0, 1.0])) == pytest.approx(1e6)
        assert kernel_value("ellipsoidal", np.array([1.0, 0.0])) == pytest.approx(1.0)

    def test_unsupported_kernel_rejected(self):
        with pytest.raises(ValueError):
            kernel_value("nope", np.zeros(2))
        with pytest.raises(ValueError):
            kernel_value("schaffers_f7", np.zeros(1))

    def test_known_minima_at_native_optimum(self):
        for name, spec in KERNELS.items():
            if spec.optimum is None:
                continue
            for dim in (spec.min_dim, 5):
                z_opt = spec.optimum(dim)
                base = kernel_value(name, z_opt)
                # Nearby points never undercut the optimum.
                rng = np.random.default_rng(17)
                for _ in range(200):
                    z = z_opt + rng.uniform(-0.5, 0.5, dim)
                    assert kernel_value(name, z) >= base

    def test_batch_evaluation_matches_single(self):
        rng = np.random.default_rng(3)
        z = rng.uniform(-4, 4, (32, 3))
        for name in KERNELS:
            batch = kernel_value(name, z)
            singles = np.array([kernel_value(name, row) for row in z])
            np.testing.assert_allclose(batch, singles, rtol=1e-12)


class TestRandomRotation:
    def test_one_dimensional_is_identity(self):
        np.testing.assert_array_equal(
            random_rotation(1, np.random.default_rng(0)), [[1.0]])

    def test_orthogonality(self):
        for dim in (2, 3, 7):
            r = random_rotation(dim, np.random.default_rng(dim))
            assert np.max(np.abs(r.T @ r - np.eye(dim))) < 1e-10
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-10)

    def test_norm_preservation(self):
        rng = np.random.default_rng(5)
        r = random_rotation(6, rng)
        for _ in range(10):
            x = rng.normal(size=6)
            assert np.linalg.norm(r @ x) == pytest.approx(np.linalg.norm(x),
                                                          rel=1e-10)


class TestMakeProblem:
    def test_deterministic_per_seed(self):
        a = make_problem("rastrigin", 3, 11)
        b = make_problem("rastrigin", 3, 11)
        np.testing.assert_array_equal(a.shift, b.shift)
        np.testing.assert_array_equal(a.rotation, b.rotation)
        assert a.f_star == b.f_star

    def test_sphere_optimum_at_shift(self):
        p = make_problem("sphere", 2, 4)
        c = EvalCounter()
        assert evaluate(p, p.shift, c) == pytest.approx(p.f_star, abs=1e-10)
        assert np.array_equal(p.rotation, np.eye(2))

    def test_optimum_location_inside_central_region(self):
        for name in ("sphere", "rosenbrock", "lunacek_bi_rastrigin", "schwefel"):
            for seed in range(5):
                p = make_problem(name, 2, seed)
                loc = p.optimum_location
                assert p.domain.shrunk(0.8).contains(loc)
                c = EvalCounter()
                assert evaluate(p, loc, c) == pytest.approx(p.f_star, abs=1e-8)

    def test_rotation_orthogonal(self):
        p = make_problem("bent_cigar", 4, 0)
        assert np.max(np.abs(p.rotation.T @ p.rotation - np.eye(4))) < 1e-10

    def test_michalewicz_untransformed(self):
        p = make_problem("michalewicz", 2, 9)
        assert np.all(p.shift == 0.0) and p.value_offset == 0.0
        assert p.f_star == -2.0 and p.optimum_location is None

    def test_unsupported_rejected(self):
        with pytest.raises(ValueError):
            make_problem("nope", 2, 0)
        with pytest.raises(ValueError):
            make_problem("rosenbrock", 1, 0)


class TestEvaluate:
    def test_counter_increments_by_one(self):
        p = make_problem("sphere", 2, 0)
        c = EvalCounter()
        for expected in (1, 2, 3):
            evaluate(p, np.zeros(2), c)
            assert c.count == expected

    def test_identity_transform_equals_kernel(self):
        p = make_problem("rastrigin", 3, 1)
        p.shift = np.zeros(3)
        p.rotation = np.eye(3)
        p.value_offset = 0.0
        rng = np.random.default_rng(0)
        c = EvalCounter()
        for _ in range(20):
            x = rng.uniform(-5, 5, 3)
            assert evaluate(p, x, c) == pytest.approx(
                kernel_value("rastrigin", x), rel=1e-12)

    def test_rotated_instance_change_of_variables(self):
        p = make_problem("bent_cigar", 3, 2)
        rng = np.random.default_rng(1)
        c = EvalCounter()
        for _ in range(20):
            z = rng.uniform(-3, 3, 3)
            x = p.shift + p.rotation.T @ z
            assert evaluate(p, x, c) == pytest.approx(
                kernel_value("bent_cigar", z) + p.value_offset, rel=1e-9, abs=1e-9)

    def test_dimension_mismatch_rejected(self):
        p = make_problem("sphere", 2, 0)
        with pytest.raises(ValueError):
            evaluate(p, np.zeros(3), EvalCounter())

    def test_out_of_domain_still_evaluated(self):
        p = make_problem("sphere", 2, 0)
        v = evaluate(p, np.array([50.0, -50.0]), EvalCounter())
        assert np.isfinite(v) and v > p.f_star

    def test_indicator_never_negative_on_random_queries(self):
        # Every query on every instance respects fbest - f* >= 0.
        rng = np.random.default_rng(7)
        per_kernel = 100_000 // len(KERNELS)
        for name, spec in KERNELS.items():
            dim = max(2, spec.min_dim)
            for seed in (0, 1):
                p = make_problem(name, dim, seed)
                pts = p.domain.sample(rng, per_kernel // 2)
                z = (pts - p.shift) @ p.rotation.T
                values = spec.func(z) + p.value_offset
                assert float(values.min()) >= p.f_star


class TestSerialization:
    def test_round_trip_exact(self):
        for name in ("sphere", "schwefel", "michalewicz", "lunacek_bi_rastrigin"):
            p = make_problem(name, 3 if name != "michalewicz" else 2, 5)
            q = problem_from_dict(problem_to_dict(p))
            np.testing.assert_array_equal(p.shift, q.shift)
            np.testing.assert_array_equal(p.rotation, q.rotation)
            assert p.f_star == q.f_star and p.kernel == q.kernel
            x = p.domain.sample(np.random.default_rng(0), 1)[0]
            assert evaluate(p, x, EvalCounter()) == evaluate(q, x, EvalCounter())

    def test_json_compatible(self):
        import json
        p = make_problem("bent_cigar", 2, 3)
        text = json.dumps(problem_to_dict(p))
        q = problem_from_dict(json.loads(text))
        assert evaluate(p, np.ones(2), EvalCounter()) == \
            evaluate(q, np.ones(2), EvalCounter())
