"""Knowledge base: seeding, merge/truncate updates, shrink schedule, sampling."""

import math

import numpy as np
import pytest
from conftest import brute_force_update

from optgan import (Box, ScoredSolution, bootstrap_sample, init_optimal_set,
                    shrink_size, shrink_to, update_optimal_set)
from optgan.knowledge import OptimalSet


def make_set(fitnesses, capacity=None):
    members = [ScoredSolution(np.array([float(i)]), float(f))
               for i, f in enumerate(sorted(fitnesses))]
    return OptimalSet(members, capacity or len(members), capacity or len(members))


class TestInit:
    def test_single_point(self):
        box = Box.cube(-1, 1, 2)
        s = init_optimal_set(box, 1, lambda x: float(np.sum(x * x)),
                             np.random.default_rng(0))
        assert len(s.members) == 1 and s.capacity == 1

    def test_sorted_ascending(self):
        box = Box.cube(-5, 5, 3)
        s = init_optimal_set(box, 40, lambda x: float(np.sum(x * x)),
                             np.random.default_rng(1))
        fits = [m.fitness for m in s.members]
        assert fits == sorted(fits)

    def test_consumes_one_evaluation_per_point(self):
        calls = []
        box = Box.cube(0, 1, 1)
        init_optimal_set(box, 25, lambda x: calls.append(1) or 0.0,
                         np.random.default_rng(2))
        assert len(calls) == 25

    def test_uniform_sampling_mean(self):
        # 1e4 points on [-5,5]^2: CLT bound sigma/sqrt(n) ~ 0.029, +-5 sigma.
        box = Box.cube(-5, 5, 2)
        s = init_optimal_set(box, 10_000, lambda x: 0.0,
                             np.random.default_rng(3))
        points = np.stack([m.x for m in s.members])
        for d in range(2):
            assert -0.15 < points[:, d].mean() < 0.15

    def test_invalid_arguments(self):
        box = Box.cube(0, 1, 1)
        with pytest.raises(ValueError):
            init_optimal_set(box, 0, lambda x: 0.0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            Box(np.array([1.0]), np.array([0.0]))


class TestUpdate:
    def test_worse_candidates_leave_full_set_unchanged(self):
        s = make_set([1.0, 2.0, 3.0])
        out = update_optimal_set(s, [ScoredSolution(np.zeros(1), 9.0)])
        assert [m.fitness for m in out.members] == [1.0, 2.0, 3.0]
        assert out.members[0] is s.members[0]

    def test_merge_example(self):
        s = make_set([3.0, 5.0])
        out = update_optimal_set(s, [ScoredSolution(np.zeros(1), 1.0),
                                     ScoredSolution(np.zeros(1), 4.0)])
        assert [m.fitness for m in out.members] == [1.0, 3.0]

    def test_best_never_degrades(self):
        rng = np.random.default_rng(4)
        s = make_set(rng.uniform(0, 10, 20).tolist(), capacity=10)
        best = s.members[0].fitness
        for _ in range(50):
            cands = [ScoredSolution(np.zeros(1), float(f))
                     for f in rng.uniform(0, 10, 5)]
            s = update_optimal_set(s, cands)
            assert s.members[0].fitness <= best
            best = s.members[0].fitness

    def test_empty_candidates_retruncate(self):
        s = make_set([1.0, 2.0, 3.0])
        s.capacity = 2
        out = update_optimal_set(s, [])
        assert [m.fitness for m in out.members] == [1.0, 2.0]

    def test_ties_prefer_incumbents_then_candidate_order(self):
        inc = ScoredSolution(np.array([0.0]), 1.0)
        s = OptimalSet([inc], 2, 2)
        c1 = ScoredSolution(np.array([1.0]), 1.0)
        c2 = ScoredSolution(np.array([2.0]), 1.0)
        out = update_optimal_set(s, [c1, c2])
        assert out.members[0] is inc and out.members[1] is c1

    def test_nan_candidate_rejected_inf_allowed(self):
        s = make_set([1.0])
        with pytest.raises(ValueError):
            update_optimal_set(s, [ScoredSolution(np.zeros(1), float("nan"))])
        out = update_optimal_set(s, [ScoredSolution(np.zeros(1), math.inf)])
        assert out.members[0].fitness == 1.0

    def test_matches_brute_force_on_random_cases(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            size = int(rng.integers(1, 8))
            cap = int(rng.integers(1, size + 3))
            # Coarse fitness grid to force plenty of ties.
            s = OptimalSet(sorted([ScoredSolution(np.array([float(i)]),
                                                  float(rng.integers(0, 4)))
                                   for i in range(size)],
                                  key=lambda m: m.fitness), cap, cap)
            cands = [ScoredSolution(np.array([100.0 + i]),
                                    float(rng.integers(0, 4)))
                     for i in range(int(rng.integers(0, 6)))]
            expected = brute_force_update(s, cands)
            got = update_optimal_set(s, cands).members
            assert [id(m) for m in got] == [id(m) for m in expected]


class TestShrinkSchedule:
    def test_start_at_initial_size(self):
        assert shrink_size(150, 1.5, 0, 10_000) == 150

    def test_terminal_capacity_one(self):
        assert shrink_size(150, 1.5, 10_000, 10_000) == 1

    def test_mid_schedule_value(self):
        # exponent 1 - 1.5*3334/10000 = 0.4999; 150**0.4999 = 12.24 -> 13
        assert shrink_size(150, 1.5, 3334, 10_000) == 13

    def test_rate_zero_keeps_size(self):
        for t in (0, 1, 5000, 10_000):
            assert shrink_size(150, 0.0, t, 10_000) == 150

    def test_non_increasing_and_at_least_one(self):
        for rate in (0.0, 0.75, 1.0, 1.5, 3.0):
            caps = [shrink_size(150, rate, t, 10_000) for t in range(0, 10_001, 7)]
            assert all(a >= b for a, b in zip(caps, caps[1:]))
            assert min(caps) >= 1

    def test_validation(self):
        with pytest.raises(ValueError):
            shrink_size(0, 1.0, 0, 100)
        with pytest.raises(ValueError):
            shrink_size(10, -0.5, 0, 100)
        with pytest.raises(ValueError):
            shrink_size(10, 1.0, -1, 100)

    def test_shrink_to_truncates(self):
        s = make_set([1.0, 2.0, 3.0, 4.0])
        out = shrink_to(s, 2)
        assert [m.fitness for m in out.members] == [1.0, 2.0]
        with pytest.raises(ValueError):
            shrink_to(out, 3)


class TestBootstrap:
    def test_singleton_returns_copies(self):
        s = make_set([2.0])
        draws = bootstrap_sample(s, 5, np.random.default_rng(0))
        assert draws.shape == (5, 1)
        assert np.all(draws == s.members[0].x)

    def test_draws_are_members(self):
        s = make_set([1.0, 2.0, 3.0])
        draws = bootstrap_sample(s, 64, np.random.default_rng(1))
        member_xs = {float(m.x[0]) for m in s.members}
        assert {float(v) for v in draws[:, 0]} <= member_xs

    def test_frequencies_near_uniform(self):
        # 3 members, 30000 draws: binomial 1/3 within the stated band.
        s = make_set([1.0, 2.0, 3.0])
        draws = bootstrap_sample(s, 30_000, np.random.default_rng(2))
        for m in s.members:
            freq = float(np.mean(draws[:, 0] == m.x[0]))
            assert 0.323 < freq < 0.343

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            bootstrap_sample(OptimalSet([], 1, 1), 3, np.random.default_rng(0))


class TestSequenceInvariants:
    def test_sorted_within_capacity_after_mixed_operations(self):
        rng = np.random.default_rng(6)
        box = Box.cube(-5, 5, 2)
        s = init_optimal_set(box, 30, lambda x: float(np.sum(x * x)), rng)
        max_fes = 1000
        used = 30
        while used < max_fes:
            cands = [ScoredSolution(box.sample(rng, 1)[0], float(rng.uniform(0, 50)))
                     for _ in range(10)]
            used += 10
            s = update_optimal_set(s, cands)
            s = shrink_to(s, shrink_size(30, 1.5, used, max_fes))
            fits = [m.fitness for m in s.members]
            assert fits == sorted(fits)
            assert len(s.members) <= s.capacity <= 30
