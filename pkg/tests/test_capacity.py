import math

import numpy as np
import pytest

from supaq import (
    DensityMatrix,
    Ensemble,
    OptimizerConfig,
    ParameterError,
    UnsupportedCopyCountError,
    coherent_information,
    depolarizing_channel,
    erasure_channel,
    finite_n_capacity,
    holevo_capacity,
    holevo_difference,
    holevo_quantity,
    identity_channel,
    mix,
    private_capacity_lb,
    private_info,
    quantum_capacity_lb,
    relative_entropy,
    superball_radius,
    tensor,
    von_neumann_entropy,
)
from conftest import random_density, random_qubit

KET0 = DensityMatrix([[1, 0], [0, 0]])
KET1 = DensityMatrix([[0, 0], [0, 1]])
MAXMIX = DensityMatrix(np.eye(2) / 2)
BASIS_PAIR = Ensemble([KET0, KET1], [0.5, 0.5])

SMALL = OptimizerConfig(restarts=6, max_evals=2500, seed=0)


def binary_entropy(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def random_ensemble(rng, dim=2, size=3):
    states = [random_density(rng, dim) for _ in range(size)]
    probs = rng.random(size)
    return Ensemble(states, probs / probs.sum())


class TestHolevoQuantity:
    def test_singleton_is_zero(self, rng):
        ens = Ensemble([random_qubit(rng)], [1.0])
        assert holevo_quantity(identity_channel(2), ens) == 0.0

    def test_identity_orthogonal_pair(self):
        assert abs(holevo_quantity(identity_channel(2), BASIS_PAIR) - 1.0) <= 1e-12

    def test_depolarizing_analytic(self):
        got = holevo_quantity(depolarizing_channel(0.25), BASIS_PAIR)
        assert abs(got - (1.0 - binary_entropy(0.125))) <= 1e-12

    def test_bounds(self, rng):
        for _ in range(50):
            ens = random_ensemble(rng)
            chi = holevo_quantity(depolarizing_channel(0.3), ens)
            assert 0.0 <= chi <= 1.0

    def test_relative_entropy_identity(self, rng):
        # chi equals the probability-weighted divergence to the average output
        ch = depolarizing_channel(0.2)
        for _ in range(20):
            ens = random_ensemble(rng)
            avg_out = ch.apply(mix(ens))
            total = sum(
                p * relative_entropy(ch.apply(s), avg_out)
                for p, s in zip(ens.probs, ens.states)
            )
            assert abs(total - holevo_quantity(ch, ens)) <= 1e-9


class TestHolevoCapacity:
    def test_identity_qubit(self):
        result = holevo_capacity(identity_channel(2), SMALL)
        assert abs(result.value - 1.0) <= 1e-4
        assert result.converged

    def test_depolarizing_quarter(self):
        result = holevo_capacity(depolarizing_channel(0.25), SMALL)
        assert abs(result.value - (1.0 - binary_entropy(0.125))) <= 1e-3
        assert result.converged

    def test_fully_depolarizing(self):
        result = holevo_capacity(depolarizing_channel(1.0), SMALL)
        assert abs(result.value) <= 1e-9


class TestCoherentInformation:
    def test_identity_returns_input_entropy(self, rng):
        for _ in range(10):
            rho = random_qubit(rng)
            got = coherent_information(identity_channel(2), rho)
            assert abs(got - von_neumann_entropy(rho)) <= 1e-10

    def test_half_erasure_is_exactly_zero(self, rng):
        ch = erasure_channel(0.5)
        for _ in range(20):
            assert abs(coherent_information(ch, random_qubit(rng))) <= 1e-12

    def test_quarter_erasure_on_maximally_mixed(self):
        got = coherent_information(erasure_channel(0.25), MAXMIX)
        assert abs(got - 0.5) <= 1e-12


class TestHolevoDifferenceAndPrivateInfo:
    def test_singleton_is_zero(self, rng):
        ens = Ensemble([random_qubit(rng)], [1.0])
        assert abs(holevo_difference(depolarizing_channel(0.3), ens)) <= 1e-12
        assert abs(private_info(depolarizing_channel(0.3), ens)) <= 1e-12

    def test_identity_orthogonal_pair(self):
        assert abs(holevo_difference(identity_channel(2), BASIS_PAIR) - 1.0) <= 1e-12
        assert abs(private_info(identity_channel(2), BASIS_PAIR) - 1.0) <= 1e-12

    def test_half_erasure_zero_for_any_ensemble(self, rng):
        ch = erasure_channel(0.5)
        for _ in range(20):
            ens = random_ensemble(rng)
            assert abs(holevo_difference(ch, ens)) <= 1e-12


class TestQuantumCapacityLowerBound:
    def test_identity(self):
        result = quantum_capacity_lb(identity_channel(2), SMALL)
        assert abs(result.value - 1.0) <= 1e-6
        achiever = mix(result.ensemble)
        assert np.max(np.abs(achiever.data - np.eye(2) / 2)) <= 1e-3

    def test_half_erasure(self):
        result = quantum_capacity_lb(erasure_channel(0.5), SMALL)
        assert abs(result.value) <= 1e-9

    def test_quarter_erasure(self):
        result = quantum_capacity_lb(erasure_channel(0.25), SMALL)
        assert abs(result.value - 0.5) <= 1e-6

    def test_value_floor(self, rng):
        # a pure input always realizes coherent information zero
        result = quantum_capacity_lb(erasure_channel(0.75), SMALL)
        assert result.value >= -1e-9

    def test_restart_monotonicity(self):
        ch = depolarizing_channel(0.15)
        values = []
        for restarts in (2, 4, 8):
            cfg = OptimizerConfig(restarts=restarts, max_evals=400, seed=7)
            values.append(quantum_capacity_lb(ch, cfg).value)
        assert values[1] >= values[0] - 1e-12
        assert values[2] >= values[1] - 1e-12


class TestFiniteCopies:
    def test_unsupported_count(self):
        with pytest.raises(UnsupportedCopyCountError):
            finite_n_capacity(identity_channel(2), 3)

    def test_dimension_cap_for_two_copies(self):
        with pytest.raises(ParameterError):
            finite_n_capacity(identity_channel(5), 2)

    def test_identity_two_copies(self):
        result = finite_n_capacity(identity_channel(2), 2, SMALL)
        assert abs(result.value - 1.0) <= 1e-6

    def test_half_erasure_two_copies(self):
        result = finite_n_capacity(erasure_channel(0.5), 2, SMALL)
        assert abs(result.value) <= 1e-9

    def test_superadditivity_check(self):
        ch = depolarizing_channel(0.08)
        one = finite_n_capacity(ch, 1, SMALL)
        two = finite_n_capacity(ch, 2, SMALL)
        assert two.value >= one.value - 1e-6

    def test_depolarizing_meets_hashing_bound(self):
        p = 0.1
        probs = np.array([1 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p])
        hashing = 1.0 - float(-(probs @ np.log2(probs)))
        result = finite_n_capacity(depolarizing_channel(p), 1, SMALL)
        assert result.value >= hashing - 1e-9


class TestPrivateCapacity:
    def test_half_erasure_is_zero(self):
        cfg = OptimizerConfig(restarts=3, max_evals=800, ensemble_size=2, seed=1)
        result = private_capacity_lb(erasure_channel(0.5), cfg)
        assert abs(result.value) <= 1e-9

    def test_identity_reaches_one_bit(self):
        cfg = OptimizerConfig(restarts=3, max_evals=1500, ensemble_size=2, seed=1)
        result = private_capacity_lb(identity_channel(2), cfg)
        assert result.value >= 0.99


class TestSuperballRadius:
    def test_single_radius(self):
        assert superball_radius([0.5]) == 0.5

    def test_zeros(self):
        assert superball_radius([0.0, 0.0]) == 0.0

    def test_private_over_two_uses(self):
        assert superball_radius([0.02, 0.0]) == 0.01

    def test_validation(self):
        with pytest.raises(ParameterError):
            superball_radius([])
        with pytest.raises(ParameterError):
            superball_radius([0.1, -0.2])


class TestOptimizerConfig:
    def test_validation(self):
        with pytest.raises(ParameterError):
            OptimizerConfig(restarts=0)
        with pytest.raises(ParameterError):
            OptimizerConfig(ensemble_size=0)
        with pytest.raises(ParameterError):
            OptimizerConfig(max_evals=0)
