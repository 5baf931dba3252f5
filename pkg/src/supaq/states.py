"""Density matrices, Bloch coordinates, entropies and divergences.

All logarithms are base 2 and every entropic quantity is reported in bits.
The quantum relative entropy D(rho||sigma) = Tr[rho (log2 rho - log2 sigma)]
is the distance measure used throughout the toolkit; the spectral evaluation
here is authoritative, the Bloch closed form is a validated fast path for
qubits (see :func:`audit_bloch_closed_form`).
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    ParameterError,
    SingularInputError,
)

__all__ = [
    "DensityMatrix",
    "BlochVector",
    "Ensemble",
    "bloch_to_density",
    "density_to_bloch",
    "von_neumann_entropy",
    "relative_entropy",
    "relative_entropy_bloch",
    "bregman_divergence",
    "matrix_log2",
    "mix",
    "audit_bloch_closed_form",
    "EIG_CUTOFF",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
#: eigenvalues at or below this value are treated as exact zeros
EIG_CUTOFF = 1e-12
#: raw divergence values above this negative floor are clipped to zero
_NEG_CLIP = -1e-9
_LN2 = math.log(2.0)


class DensityMatrix:
    """Immutable unit-trace Hermitian PSD matrix with cached spectral data.

    The eigendecomposition is computed once at construction; repeated
    divergence evaluations against the same state reuse it.
    """

    __slots__ = ("_data", "_eigvals", "_eigvecs", "_negentropy")

    def __init__(self, data) -> None:
        mat = np.array(data, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise InvalidStateError(f"expected a square matrix, got shape {mat.shape}")
        asym = float(np.max(np.abs(mat - mat.conj().T)))
        if asym > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        mat = (mat + mat.conj().T) / 2.0
        trace = float(mat.trace().real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace must be 1, got {trace!r}")
        vals, vecs = np.linalg.eigh(mat)
        if float(vals[0]) < -PSD_TOL:
            raise InvalidStateError(
                f"matrix is not positive semidefinite (min eigenvalue {vals[0]:.3e})"
            )
        for arr in (mat, vals, vecs):
            arr.setflags(write=False)
        self._data = mat
        self._eigvals = vals
        self._eigvecs = vecs
        self._negentropy = None

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def eigvals(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return self._eigvals

    @property
    def eigvecs(self) -> np.ndarray:
        """Eigenvector columns matching :attr:`eigvals`."""
        return self._eigvecs

    @property
    def negentropy(self) -> float:
        """Tr(rho log2 rho), the Bregman generator value at this state."""
        if self._negentropy is None:
            v = self._eigvals[self._eigvals > EIG_CUTOFF]
            self._negentropy = float(np.sum(v * np.log2(v)))
        return self._negentropy

    def min_eigenvalue(self) -> float:
        return float(self._eigvals[0])

    def is_full_rank(self, cutoff: float = EIG_CUTOFF) -> bool:
        return self.min_eigenvalue() >= cutoff

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class BlochVector(NamedTuple):
    """Cartesian Bloch coordinates of a qubit state."""

    x: float
    y: float
    z: float

    @property
    def radius(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


class Ensemble:
    """Probability-weighted collection of equal-dimension density matrices."""

    __slots__ = ("_states", "_probs")

    def __init__(self, states: Sequence[DensityMatrix], probs) -> None:
        states = tuple(states)
        probs = np.array(probs, dtype=float)
        if len(states) < 1 or probs.ndim != 1 or probs.size != len(states):
            raise ParameterError("need one probability per state, at least one state")
        if float(probs.min()) < -TRACE_TOL:
            raise ParameterError(f"probabilities must be nonnegative, got {probs.min()!r}")
        total = float(probs.sum())
        if abs(total - 1.0) > TRACE_TOL:
            raise ParameterError(f"probabilities must sum to 1, got {total!r}")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise DimensionMismatchError("ensemble states must share one dimension")
        probs.setflags(write=False)
        self._states = states
        self._probs = probs

    @property
    def states(self) -> tuple[DensityMatrix, ...]:
        return self._states

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def dim(self) -> int:
        return self._states[0].dim

    def __len__(self) -> int:
        return len(self._states)

    def __repr__(self) -> str:
        return f"Ensemble(size={len(self)}, dim={self.dim})"


def bloch_to_density(v) -> DensityMatrix:
    """Qubit density matrix 1/2 [[1+z, x-iy], [x+iy, 1-z]] for Bloch point v."""
    x, y, z = (float(c) for c in v)
    r = math.sqrt(x * x + y * y + z * z)
    if r > 1.0 + 1e-12:
        raise InvalidStateError(f"Bloch radius {r!r} exceeds 1")
    mat = 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]])
    return DensityMatrix(mat)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Inverse of :func:`bloch_to_density`; defined for qubits only."""
    if rho.dim != 2:
        raise DimensionMismatchError(f"Bloch coordinates need dim 2, got {rho.dim}")
    lower = complex(rho.data[1, 0])
    return BlochVector(
        2.0 * lower.real, 2.0 * lower.imag, float((rho.data[0, 0] - rho.data[1, 1]).real)
    )


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho log2 rho) in bits, with 0 log 0 := 0."""
    return -rho.negentropy


def _clip_negative(value: float) -> float:
    if _NEG_CLIP < value < 0.0:
        return 0.0
    return value


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr[rho (log2 rho - log2 sigma)] in bits.

    Returns +inf when the support of rho is not contained in the support of
    sigma (an eigenvalue of sigma at or below ``EIG_CUTOFF`` carrying rho
    weight above the same cutoff).
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dims differ: {rho.dim} vs {sigma.dim}")
    s = sigma.eigvals
    vecs = sigma.eigvecs
    # diagonal of V^dag rho V: weight of rho in each sigma eigendirection
    weights = np.einsum("ji,jk,ki->i", vecs.conj(), rho.data, vecs).real
    null = s <= EIG_CUTOFF
    if null.any() and bool(np.any(weights[null] > EIG_CUTOFF)):
        return math.inf
    supported = ~null
    cross = float(weights[supported] @ np.log2(s[supported]))
    return _clip_negative(rho.negentropy - cross)


def relative_entropy_bloch(rho, sigma) -> float:
    """Closed-form divergence between two strictly mixed qubits in Bloch form.

    Validated against :func:`relative_entropy`; see
    :func:`audit_bloch_closed_form`.
    """
    rx, ry, rz = (float(c) for c in rho)
    sx, sy, sz = (float(c) for c in sigma)
    rr = math.sqrt(rx * rx + ry * ry + rz * rz)
    rs = math.sqrt(sx * sx + sy * sy + sz * sz)
    if rr >= 1.0 - 1e-9 or rs >= 1.0 - 1e-9:
        raise SingularInputError(
            "closed form is singular at pure states (radius >= 1 - 1e-9)"
        )
    head = 0.5 * math.log2(0.25 * (1.0 - rr * rr))
    if rr > 0.0:
        head += 0.5 * rr * math.log2((1.0 + rr) / (1.0 - rr))
    head -= 0.5 * math.log2(0.25 * (1.0 - rs * rs))
    if rs < 1e-12:
        # maximally mixed sigma: the cross term vanishes with <rho, sigma>
        return _clip_negative(head)
    dot = rx * sx + ry * sy + rz * sz
    tail = (dot / (2.0 * rs)) * math.log2((1.0 + rs) / (1.0 - rs))
    return _clip_negative(head - tail)


def matrix_log2(rho: DensityMatrix) -> np.ndarray:
    """log2 of a full-rank density matrix, via its eigensystem."""
    if not rho.is_full_rank():
        raise SingularInputError(
            f"matrix log needs a full-rank state (min eigenvalue {rho.min_eigenvalue():.3e})"
        )
    vecs = rho.eigvecs
    return (vecs * np.log2(rho.eigvals)) @ vecs.conj().T


def bregman_divergence(
    rho: DensityMatrix, sigma: DensityMatrix, generator_scale: float = 1.0
) -> float:
    """Bregman divergence of the negative-entropy generator F(rho) = Tr(rho log2 rho).

    Evaluates F(rho) - F(sigma) - <rho - sigma, grad F(sigma)> with
    grad F(sigma) = log2 sigma + I/ln 2 and <A, B> = Tr(A B^dag).  Scaling the
    generator by ``generator_scale`` scales the divergence linearly, which is
    how generator linearity is exercised in tests.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dims differ: {rho.dim} vs {sigma.dim}")
    grad = matrix_log2(sigma) + (1.0 / _LN2) * np.eye(sigma.dim)
    diff = rho.data - sigma.data
    inner = float(np.trace(diff @ grad.conj().T).real)
    value = rho.negentropy - sigma.negentropy - inner
    return generator_scale * _clip_negative(value)


def mix(ensemble: Ensemble) -> DensityMatrix:
    """Averaged state sum_i p_i rho_i of an ensemble."""
    acc = np.zeros((ensemble.dim, ensemble.dim), dtype=np.complex128)
    for p, state in zip(ensemble.probs, ensemble.states):
        acc += p * state.data
    return DensityMatrix(acc)


def _random_bloch(rng: np.random.Generator, max_radius: float = 0.95) -> BlochVector:
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    radius = max_radius * rng.random() ** (1.0 / 3.0)
    return BlochVector(*(radius * direction))


def audit_bloch_closed_form(n_pairs: int = 1000, seed: int = 0) -> dict:
    """Compare the Bloch closed form against the spectral divergence.

    Returns a verdict record ``{"consistent", "max_abs_deviation", "pairs"}``.
    The closed form is only trusted while ``consistent`` is true.
    """
    rng = np.random.default_rng(seed)
    max_dev = 0.0
    for _ in range(n_pairs):
        a = _random_bloch(rng)
        b = _random_bloch(rng)
        closed = relative_entropy_bloch(a, b)
        spectral = relative_entropy(bloch_to_density(a), bloch_to_density(b))
        max_dev = max(max_dev, abs(closed - spectral))
    return {
        "consistent": max_dev <= 1e-9,
        "max_abs_deviation": max_dev,
        "pairs": n_pairs,
    }
