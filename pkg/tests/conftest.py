"""Shared construction helpers for the test suite."""

import numpy as np
import pytest

from supaq import DensityMatrix, KrausChannel, bloch_to_density, clamp_to_domain


def random_bloch(rng, max_radius=0.95):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * max_radius * rng.random() ** (1 / 3)


def random_qubit(rng, max_radius=0.95):
    return bloch_to_density(random_bloch(rng, max_radius))


def random_density(rng, dim):
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    gram = raw @ raw.conj().T
    return DensityMatrix(gram / gram.trace().real)


def random_channel(rng, dim_in, dim_out, n_kraus):
    """Random CPTP map from the QR factor of a Gaussian matrix."""
    raw = rng.normal(size=(dim_out * n_kraus, dim_in)) + 1j * rng.normal(
        size=(dim_out * n_kraus, dim_in)
    )
    isometry, _ = np.linalg.qr(raw)
    ops = [isometry[k * dim_out : (k + 1) * dim_out, :] for k in range(n_kraus)]
    return KrausChannel(ops)


def gaussian_cluster(rng, center, n, spread=0.05, max_radius=0.9):
    """Clamped qubit states scattered around a Bloch-space center."""
    out = []
    for _ in range(n):
        v = np.asarray(center, dtype=float) + rng.normal(scale=spread, size=3)
        norm = np.linalg.norm(v)
        if norm > max_radius:
            v = v / norm * max_radius
        out.append(clamp_to_domain(bloch_to_density(v)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
