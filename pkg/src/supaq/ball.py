"""Smallest enclosing divergence ball and the three-state circumcenter.

The ball center sits in the second divergence slot: we minimize over centers
c the worst-case D(state || c).  Centers are searched in gradient space, so
every input must be strictly mixed (clamp first, see
:func:`supaq.clustering.clamp_to_domain`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .exceptions import (
    DegenerateConfigurationError,
    DimensionMismatchError,
    ParameterError,
    SingularInputError,
)
from .states import (
    DensityMatrix,
    bloch_to_density,
    density_to_bloch,
    matrix_log2,
    relative_entropy,
)

__all__ = ["InfoBall", "minimax_ball", "farthest_point", "circumcenter3"]

#: states within this distance of the radius count as support
SUPPORT_TOL = 1e-4
#: iterations without a tol-sized improvement before declaring convergence
_PATIENCE = 50


@dataclass(frozen=True)
class InfoBall:
    """Minimax divergence ball: center state, radius in bits, support set."""

    center: DensityMatrix
    radius: float
    support: tuple[int, ...]
    converged: bool
    radius_history: tuple[float, ...] = field(repr=False, default=())

    def covers(self, states: Sequence[DensityMatrix], slack: float = 1e-6) -> bool:
        """True when every state lies within radius + slack of the center."""
        return all(
            relative_entropy(s, self.center) <= self.radius + slack for s in states
        )


def _density_from_log2(log_mat: np.ndarray) -> DensityMatrix:
    vals, vecs = np.linalg.eigh(log_mat)
    probs = np.exp2(vals - vals.max())
    probs /= probs.sum()
    return DensityMatrix((vecs * probs) @ vecs.conj().T)


def _polish_center(
    center: DensityMatrix, states: Sequence[DensityMatrix], budget: int
) -> tuple[DensityMatrix, float]:
    """Local minimax refinement of the center.

    The gradient-averaging loop keeps an O(1/t) memory of its early farthest
    points, which leaves a radius bias of up to a few 1e-3 at practical
    iteration counts; a direct simplex descent from its best iterate removes
    that bias.
    """
    dim = center.dim
    half = dim * dim

    def to_state(theta):
        raw = (theta[:half] + 1j * theta[half:]).reshape(dim, dim)
        gram = raw @ raw.conj().T
        trace = float(gram.trace().real)
        if trace < 1e-12:
            return DensityMatrix(np.eye(dim) / dim)
        return DensityMatrix(gram / trace)

    def objective(theta):
        c = to_state(theta)
        return max(relative_entropy(s, c) for s in states)

    root = center.eigvecs * np.sqrt(np.clip(center.eigvals, 0.0, None))
    start = np.concatenate([root.real.ravel(), root.imag.ravel()])
    res = optimize.minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"maxfev": budget, "maxiter": budget, "xatol": 1e-9, "fatol": 1e-12},
    )
    return to_state(res.x), float(res.fun)


def farthest_point(
    center: DensityMatrix, states: Sequence[DensityMatrix]
) -> tuple[int, float]:
    """Index and divergence of the state farthest from the center.

    Ties break toward the smallest index.
    """
    states = list(states)
    if not states:
        raise ParameterError("farthest_point needs at least one state")
    distances = [relative_entropy(s, center) for s in states]
    index = int(np.argmax(distances))
    return index, distances[index]


def minimax_ball(
    states: Sequence[DensityMatrix],
    tol: float = 1e-6,
    max_iter: int = 5000,
    support_tol: float = SUPPORT_TOL,
) -> InfoBall:
    """Smallest enclosing ball under D(state || center).

    Farthest-point iteration in gradient space: starting from the arithmetic
    mean, each step blends the center's gradient with the farthest state's
    gradient at rate 1/(t+1) and maps back through the inverse gradient
    (2^M renormalized to unit trace).  The best iterate seen is returned;
    ``converged`` is False when ``max_iter`` passes while the radius is still
    improving by more than ``tol`` per patience window.
    """
    states = list(states)
    if not states:
        raise ParameterError("minimax_ball needs at least one state")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DimensionMismatchError("states must share one dimension")
    for i, s in enumerate(states):
        if not s.is_full_rank():
            raise SingularInputError(
                f"state {i} is singular (min eigenvalue {s.min_eigenvalue():.3e});"
                " clamp inputs before building the ball"
            )
    if len(states) == 1:
        return InfoBall(states[0], 0.0, (0,), True, (0.0,))

    grads = [matrix_log2(s) for s in states]
    center = DensityMatrix(np.mean([s.data for s in states], axis=0))
    center_grad = matrix_log2(center)

    history: list[float] = []
    best_trace: list[float] = []
    best_radius = np.inf
    best_center = center
    best_distances: list[float] = []
    converged = False

    for step in range(1, max_iter + 1):
        distances = [relative_entropy(s, center) for s in states]
        far = int(np.argmax(distances))
        radius = distances[far]
        history.append(radius)
        if radius < best_radius:
            best_radius = radius
            best_center = center
            best_distances = distances
        best_trace.append(best_radius)
        if step > _PATIENCE and best_trace[-_PATIENCE - 1] - best_radius < tol:
            converged = True
            break
        eta = 1.0 / (step + 1.0)
        center_grad = (1.0 - eta) * center_grad + eta * grads[far]
        center = _density_from_log2(center_grad)

    polished, polished_radius = _polish_center(best_center, states, budget=4000)
    if polished_radius < best_radius:
        best_center = polished
        best_radius = polished_radius
        best_distances = [relative_entropy(s, best_center) for s in states]
    support = tuple(
        i for i, d in enumerate(best_distances) if best_radius - d <= support_tol
    )
    return InfoBall(best_center, float(best_radius), support, converged, tuple(history))


def _bloch_distances(
    point: np.ndarray, targets: Sequence[DensityMatrix]
) -> tuple[list[float], DensityMatrix]:
    radius = float(np.linalg.norm(point))
    if radius >= 0.999999:
        point = point * (0.999999 / radius)
    center = bloch_to_density(point)
    return [relative_entropy(t, center) for t in targets], center


def circumcenter3(
    a: DensityMatrix, b: DensityMatrix, c: DensityMatrix, tol: float = 1e-6
) -> tuple[DensityMatrix, float]:
    """Qubit state equidistant in divergence from three states, plus the distance.

    The search runs over the affine hull of the three Bloch points, solving
    the two equidistance equations with a root finder.
    """
    triple = (a, b, c)
    for i, s in enumerate(triple):
        if s.dim != 2:
            raise DimensionMismatchError(f"state {i} is not a qubit")
        if not s.is_full_rank():
            raise SingularInputError(f"state {i} is singular; clamp inputs first")
    points = [np.array(density_to_bloch(s)) for s in triple]
    if all(np.max(np.abs(points[0] - p)) <= 1e-12 for p in points[1:]):
        return a, 0.0

    base = points[0]
    u1 = points[1] - base
    u2 = points[2] - base

    def residuals(params):
        s, u = params
        dists, _ = _bloch_distances(base + s * u1 + u * u2, triple)
        return [dists[0] - dists[1], dists[0] - dists[2]]

    starts = [(1 / 3, 1 / 3), (0.25, 0.25), (0.45, 0.2), (0.2, 0.45), (0.1, 0.1)]
    for start in starts:
        sol = optimize.root(residuals, start, method="hybr")
        point = base + sol.x[0] * u1 + sol.x[1] * u2
        if float(np.linalg.norm(point)) >= 0.999999:
            continue
        dists, center = _bloch_distances(point, triple)
        spread = max(dists) - min(dists)
        if spread <= tol:
            return center, float(np.mean(dists))
    raise DegenerateConfigurationError(
        "no equidistant state inside the open Bloch ball for this triple"
    )
