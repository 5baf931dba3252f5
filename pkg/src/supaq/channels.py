"""Quantum channels in Kraus form, qubit affine maps, and the channel file format.

Channels are immutable.  The complementary channel is derived from the
isometric extension V = sum_k N_k (x) |k>_E, so the environment dimension
equals the number of Kraus operators.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidChannelError,
    InvalidStateError,
    ParameterError,
)
from .states import BlochVector, DensityMatrix, bloch_to_density, density_to_bloch

__all__ = [
    "KrausChannel",
    "AffineQubitMap",
    "identity_channel",
    "depolarizing_channel",
    "erasure_channel",
    "complementary",
    "tensor",
    "flagged_convex",
    "affine_map",
    "load_channel",
    "save_channel",
    "channel_from_dict",
]

COMPLETENESS_TOL = 1e-9


class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators.

    Every operator has shape (dim_out, dim_in) and the set satisfies
    sum_k N_k^dag N_k = I within ``COMPLETENESS_TOL``.
    """

    __slots__ = ("_kraus", "_dim_in", "_dim_out", "_name")

    def __init__(self, kraus: Sequence, name: str = "") -> None:
        ops = [np.array(k, dtype=np.complex128) for k in kraus]
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(op.shape != shape for op in ops):
            raise InvalidChannelError("Kraus operators must share one 2-d shape")
        dim_out, dim_in = shape
        gram = sum(op.conj().T @ op for op in ops)
        residual = float(np.max(np.abs(gram - np.eye(dim_in))))
        if residual > COMPLETENESS_TOL:
            raise InvalidChannelError(
                f"completeness violated: max |sum N^dag N - I| = {residual:.3e}"
            )
        for op in ops:
            op.setflags(write=False)
        self._kraus = tuple(ops)
        self._dim_in = int(dim_in)
        self._dim_out = int(dim_out)
        self._name = name

    @property
    def kraus(self) -> tuple[np.ndarray, ...]:
        return self._kraus

    @property
    def dim_in(self) -> int:
        return self._dim_in

    @property
    def dim_out(self) -> int:
        return self._dim_out

    @property
    def env_dim(self) -> int:
        """Environment dimension of the isometric extension."""
        return len(self._kraus)

    @property
    def name(self) -> str:
        return self._name

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """Channel output sum_k N_k rho N_k^dag."""
        if rho.dim != self._dim_in:
            raise DimensionMismatchError(
                f"channel expects dim {self._dim_in}, state has dim {rho.dim}"
            )
        stack = np.stack(self._kraus)
        out = np.einsum("koi,ij,kpj->op", stack, rho.data, stack.conj())
        return DensityMatrix(out)

    def __repr__(self) -> str:
        label = f" {self._name!r}" if self._name else ""
        return (
            f"KrausChannel({self._dim_in}->{self._dim_out},"
            f" {len(self._kraus)} ops{label})"
        )


def complementary(ch: KrausChannel) -> KrausChannel:
    """Environment-output channel of the isometric extension of ``ch``.

    The j-th Kraus operator of the complement collects row j of every
    operator of ``ch``; the environment state it produces satisfies
    sigma_E[k, l] = Tr(N_k rho N_l^dag).
    """
    stack = np.stack(ch.kraus)  # (env, out, in)
    ops = list(stack.transpose(1, 0, 2))  # one (env, in) operator per output row
    return KrausChannel(ops, name=f"complement({ch.name})" if ch.name else "")


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Parallel composition with Kraus set {A_i (x) B_j}."""
    ops = [np.kron(ka, kb) for ka in a.kraus for kb in b.kraus]
    name = f"{a.name}(x){b.name}" if a.name and b.name else ""
    return KrausChannel(ops, name=name)


def flagged_convex(p: float, a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Convex combination p*a + (1-p)*b with an orthogonal output flag.

    The output space is the direct sum of the two output spaces: the first
    dim_out(a) rows carry sqrt(p) * a, the remaining dim_out(b) rows carry
    sqrt(1-p) * b, so tracing out the flag blocks recovers the mixture.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"mixing probability must be in [0, 1], got {p!r}")
    if a.dim_in != b.dim_in:
        raise DimensionMismatchError(
            f"input dims differ: {a.dim_in} vs {b.dim_in}"
        )
    total_out = a.dim_out + b.dim_out
    ops = []
    for op in a.kraus:
        padded = np.zeros((total_out, a.dim_in), dtype=np.complex128)
        padded[: a.dim_out] = math.sqrt(p) * op
        ops.append(padded)
    for op in b.kraus:
        padded = np.zeros((total_out, b.dim_in), dtype=np.complex128)
        padded[a.dim_out :] = math.sqrt(1.0 - p) * op
        ops.append(padded)
    return KrausChannel(ops, name=f"flagged({p:g})")


def identity_channel(dim: int = 2) -> KrausChannel:
    if dim < 1:
        raise ParameterError(f"dimension must be positive, got {dim!r}")
    return KrausChannel([np.eye(dim)], name=f"identity({dim})")


_PAULIS = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def depolarizing_channel(p: float) -> KrausChannel:
    """Qubit depolarizing channel rho -> (1-p) rho + p I/2."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"depolarizing strength must be in [0, 1], got {p!r}")
    ops = [math.sqrt(1.0 - 0.75 * p) * np.eye(2, dtype=complex)]
    ops.extend(math.sqrt(0.25 * p) * sigma for sigma in _PAULIS)
    return KrausChannel(ops, name=f"depolarizing({p:g})")


def erasure_channel(eps: float, dim: int = 2) -> KrausChannel:
    """Erasure channel rho -> (1-eps) rho (+) eps Tr(rho) |e><e|.

    Output dimension is dim + 1; the last basis vector is the erasure flag.
    One scaled isometric embedding keeps the input coherent, and one operator
    per input basis vector routes weight onto the flag.
    """
    if not 0.0 <= eps <= 1.0:
        raise ParameterError(f"erasure probability must be in [0, 1], got {eps!r}")
    if dim < 1:
        raise ParameterError(f"dimension must be positive, got {dim!r}")
    embed = np.zeros((dim + 1, dim), dtype=complex)
    embed[:dim, :dim] = np.eye(dim)
    ops = [math.sqrt(1.0 - eps) * embed]
    for i in range(dim):
        erase = np.zeros((dim + 1, dim), dtype=complex)
        erase[dim, i] = math.sqrt(eps)
        ops.append(erase)
    return KrausChannel(ops, name=f"erasure({eps:g},{dim})")


class AffineQubitMap:
    """Action v -> M v + t of a qubit channel on Bloch coordinates."""

    BALL_TOL = 1e-9

    __slots__ = ("_linear", "_shift")

    def __init__(self, linear, shift, validation_samples: int = 10_000, seed: int = 0):
        mat = np.array(linear, dtype=float)
        vec = np.array(shift, dtype=float)
        if mat.shape != (3, 3) or vec.shape != (3,):
            raise ParameterError("affine map needs a 3x3 matrix and a 3-vector")
        if validation_samples > 0:
            rng = np.random.default_rng(seed)
            dirs = rng.normal(size=(validation_samples, 3))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            norms = np.linalg.norm(dirs @ mat.T + vec, axis=1)
            worst = float(norms.max())
            if worst > 1.0 + self.BALL_TOL:
                raise InvalidStateError(
                    f"affine map leaves the Bloch ball (image radius {worst!r})"
                )
        mat.setflags(write=False)
        vec.setflags(write=False)
        self._linear = mat
        self._shift = vec

    @property
    def linear(self) -> np.ndarray:
        return self._linear

    @property
    def shift(self) -> np.ndarray:
        return self._shift

    def apply(self, v) -> BlochVector:
        image = self._linear @ np.array([*v], dtype=float) + self._shift
        return BlochVector(*image)


def affine_map(ch: KrausChannel) -> AffineQubitMap:
    """Bloch-coordinate affine representation of a qubit-to-qubit channel."""
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise DimensionMismatchError("affine representation needs a 2->2 channel")
    shift = np.array(density_to_bloch(ch.apply(bloch_to_density((0, 0, 0)))))
    columns = []
    for axis in np.eye(3):
        image = np.array(density_to_bloch(ch.apply(bloch_to_density(axis))))
        columns.append(image - shift)
    return AffineQubitMap(np.column_stack(columns), shift)


def _matrix_from_flat(flat, dim_out: int, dim_in: int) -> np.ndarray:
    pairs = list(flat)
    if len(pairs) != dim_out * dim_in:
        raise InvalidChannelError(
            f"matrix needs {dim_out * dim_in} entries, got {len(pairs)}"
        )
    values = []
    for pair in pairs:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidChannelError(f"entries must be [re, im] pairs, got {pair!r}")
        re, im = pair
        values.append(complex(float(re), float(im)))
    return np.array(values, dtype=complex).reshape(dim_out, dim_in)


def channel_from_dict(payload: dict) -> KrausChannel:
    """Build a channel from the parsed file payload; validates completeness."""
    try:
        name = str(payload.get("name", ""))
        dim_in = int(payload["dim_in"])
        dim_out = int(payload["dim_out"])
        kraus = payload["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidChannelError(f"malformed channel definition: {exc}") from exc
    if dim_in < 1 or dim_out < 1:
        raise InvalidChannelError("dimensions must be positive integers")
    if not isinstance(kraus, list) or not kraus:
        raise InvalidChannelError("'kraus' must be a non-empty list of matrices")
    ops = [_matrix_from_flat(mat, dim_out, dim_in) for mat in kraus]
    return KrausChannel(ops, name=name)


def load_channel(path) -> KrausChannel:
    """Load a channel definition file.

    The file is JSON with fields ``name``, ``dim_in``, ``dim_out`` and
    ``kraus``, where each Kraus matrix is a row-major flat list of
    ``[re, im]`` pairs.
    """
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidChannelError(f"could not parse channel file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise InvalidChannelError(f"channel file {path} must hold a JSON object")
    return channel_from_dict(payload)


def save_channel(ch: KrausChannel, path) -> None:
    """Write a channel in the definition-file format (round-trips with load)."""
    payload = {
        "name": ch.name,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [
            [[float(entry.real), float(entry.imag)] for entry in op.ravel()]
            for op in ch.kraus
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1))
