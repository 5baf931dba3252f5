import json

import numpy as np
import pytest

from supaq import (
    AffineQubitMap,
    DensityMatrix,
    DimensionMismatchError,
    InvalidChannelError,
    InvalidStateError,
    KrausChannel,
    ParameterError,
    affine_map,
    bloch_to_density,
    coherent_information,
    complementary,
    density_to_bloch,
    depolarizing_channel,
    erasure_channel,
    flagged_convex,
    identity_channel,
    load_channel,
    save_channel,
    tensor,
    von_neumann_entropy,
)
from conftest import random_channel, random_density, random_qubit

KET0 = DensityMatrix([[1, 0], [0, 0]])
MAXMIX = DensityMatrix(np.eye(2) / 2)


def environment_via_isometry(ch, rho):
    """Environment state from the explicit isometry V = sum_k N_k (x) |k>."""
    d_out, d_in = ch.kraus[0].shape
    n_env = len(ch.kraus)
    iso = np.zeros((d_out * n_env, d_in), dtype=complex)
    for k, op in enumerate(ch.kraus):
        for e in range(d_out):
            iso[e * n_env + k, :] = op[e, :]
    joint = iso @ rho.data @ iso.conj().T
    joint = joint.reshape(d_out, n_env, d_out, n_env)
    return DensityMatrix(np.einsum("ikil->kl", joint))


class TestKrausChannel:
    def test_identity_apply(self, rng):
        rho = random_qubit(rng)
        assert np.allclose(identity_channel(2).apply(rho).data, rho.data)

    def test_full_depolarizing(self, rng):
        rho = random_qubit(rng)
        assert np.allclose(depolarizing_channel(1.0).apply(rho).data, np.eye(2) / 2)

    def test_depolarizing_shrinks_bloch(self):
        out = depolarizing_channel(0.5).apply(KET0)
        assert np.allclose(out.data, np.diag([0.75, 0.25]))

    def test_completeness_enforced(self):
        with pytest.raises(InvalidChannelError, match="completeness"):
            KrausChannel([np.eye(2) * 0.9])

    def test_dimension_guard(self):
        with pytest.raises(DimensionMismatchError):
            identity_channel(3).apply(MAXMIX)

    def test_trace_preservation(self, rng):
        for _ in range(30):
            ch = random_channel(rng, 2, 3, 4)
            out = ch.apply(random_qubit(rng))
            assert abs(out.data.trace().real - 1.0) <= 1e-9

    def test_complete_positivity_on_extended_input(self, rng):
        ch = random_channel(rng, 2, 2, 3)
        ext = tensor(ch, identity_channel(2))
        for _ in range(20):
            rho = random_density(rng, 4)
            out = ext.apply(rho)
            assert out.eigvals[0] >= -1e-10


class TestComplementary:
    def test_identity_has_trivial_environment(self, rng):
        comp = complementary(identity_channel(2))
        assert comp.dim_out == 1
        for _ in range(10):
            out = comp.apply(random_qubit(rng))
            assert von_neumann_entropy(out) <= 1e-12

    def test_erasure_half_is_self_complementary(self, rng):
        ch = erasure_channel(0.5)
        comp = complementary(ch)
        for _ in range(100):
            rho = random_qubit(rng)
            sb = von_neumann_entropy(ch.apply(rho))
            se = von_neumann_entropy(comp.apply(rho))
            assert abs(sb - se) <= 1e-9

    def test_matches_explicit_isometry(self, rng):
        for p in (0.1, 0.3, 0.7):
            ch = depolarizing_channel(p)
            comp = complementary(ch)
            for rho in (MAXMIX, random_qubit(rng)):
                direct = comp.apply(rho)
                oracle = environment_via_isometry(ch, rho)
                assert abs(
                    von_neumann_entropy(direct) - von_neumann_entropy(oracle)
                ) <= 1e-10

    def test_environment_dimension(self):
        assert complementary(depolarizing_channel(0.25)).dim_out == 4


class TestTensor:
    def test_identity_square(self, rng):
        ch = tensor(identity_channel(2), identity_channel(2))
        rho = random_density(rng, 4)
        assert np.allclose(ch.apply(rho).data, rho.data)

    def test_product_state_factorization(self, rng):
        for _ in range(10):
            a = random_channel(rng, 2, 2, 2)
            b = random_channel(rng, 2, 3, 3)
            rho, tau = random_qubit(rng), random_qubit(rng)
            joint = tensor(a, b).apply(DensityMatrix(np.kron(rho.data, tau.data)))
            split = np.kron(a.apply(rho).data, b.apply(tau).data)
            assert np.max(np.abs(joint.data - split)) <= 1e-10

    def test_erasure_pair_has_zero_coherent_information(self, rng):
        pair = tensor(erasure_channel(0.5), erasure_channel(0.5))
        for _ in range(20):
            rho = random_density(rng, 4)
            assert abs(coherent_information(pair, rho)) <= 1e-12


class TestFlaggedConvex:
    def test_extreme_probabilities(self, rng):
        a = depolarizing_channel(0.3)
        b = erasure_channel(0.4)
        rho = random_qubit(rng)
        full = flagged_convex(1.0, a, b).apply(rho).data
        assert np.allclose(full[:2, :2], a.apply(rho).data, atol=1e-12)
        assert np.max(np.abs(full[2:, 2:])) <= 1e-12
        none = flagged_convex(0.0, a, b).apply(rho).data
        assert np.allclose(none[2:, 2:], b.apply(rho).data, atol=1e-12)
        assert np.max(np.abs(none[:2, :2])) <= 1e-12

    def test_flag_trace_out_recovers_input(self, rng):
        ch = flagged_convex(0.5, identity_channel(2), identity_channel(2))
        rho = random_qubit(rng)
        out = ch.apply(rho).data
        assert np.allclose(out[:2, :2] + out[2:, 2:], rho.data, atol=1e-12)

    def test_probability_domain(self):
        with pytest.raises(ParameterError):
            flagged_convex(1.5, identity_channel(2), identity_channel(2))


class TestErasure:
    def test_zero_probability_embeds(self, rng):
        rho = random_qubit(rng)
        out = erasure_channel(0.0).apply(rho).data
        assert np.allclose(out[:2, :2], rho.data)
        assert abs(out[2, 2]) <= 1e-15

    def test_full_erasure(self, rng):
        out = erasure_channel(1.0).apply(random_qubit(rng)).data
        assert np.allclose(out, np.diag([0.0, 0.0, 1.0]), atol=1e-12)

    def test_half_on_maximally_mixed(self):
        out = erasure_channel(0.5).apply(MAXMIX).data
        assert np.allclose(out, np.diag([0.25, 0.25, 0.5]))


class TestAffineMap:
    def test_matches_kraus_action(self, rng):
        for ch in (depolarizing_channel(0.35), random_channel(rng, 2, 2, 3)):
            amap = affine_map(ch)
            for _ in range(50):
                v = density_to_bloch(random_qubit(rng))
                direct = np.array(density_to_bloch(ch.apply(bloch_to_density(v))))
                assert np.max(np.abs(np.array(amap.apply(v)) - direct)) <= 1e-9

    def test_rejects_expanding_map(self):
        with pytest.raises(InvalidStateError):
            AffineQubitMap(1.5 * np.eye(3), np.zeros(3))

    def test_needs_qubit_channel(self):
        with pytest.raises(DimensionMismatchError):
            affine_map(erasure_channel(0.5))


class TestChannelFiles:
    def test_identity_round_trip(self, tmp_path, rng):
        path = tmp_path / "identity.chan"
        save_channel(identity_channel(2), path)
        loaded = load_channel(path)
        rho = random_qubit(rng)
        assert np.allclose(loaded.apply(rho).data, rho.data)

    def test_depolarizing_file_matches_builtin(self, tmp_path, rng):
        builtin = depolarizing_channel(0.25)
        path = tmp_path / "dep.chan"
        save_channel(builtin, path)
        loaded = load_channel(path)
        for _ in range(20):
            rho = random_qubit(rng)
            assert np.max(
                np.abs(loaded.apply(rho).data - builtin.apply(rho).data)
            ) <= 1e-12

    def test_incomplete_kraus_rejected_with_residual(self, tmp_path):
        payload = {
            "name": "broken",
            "dim_in": 2,
            "dim_out": 2,
            "kraus": [[[0.9, 0.0], [0.0, 0.0], [0.0, 0.0], [0.9, 0.0]]],
        }
        path = tmp_path / "bad.chan"
        path.write_text(json.dumps(payload))
        with pytest.raises(InvalidChannelError, match=r"completeness.*="):
            load_channel(path)

    def test_parse_error(self, tmp_path):
        path = tmp_path / "garbage.chan"
        path.write_text("{not json")
        with pytest.raises(InvalidChannelError, match="parse"):
            load_channel(path)

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "fields.chan"
        path.write_text(json.dumps({"name": "x"}))
        with pytest.raises(InvalidChannelError, match="malformed"):
            load_channel(path)
