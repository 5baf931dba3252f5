"""Scikit-learn style estimators so the solvers compose with ML pipelines.

Inputs are stacks of density matrices with shape (n_states, dim, dim); the
validation helper turns them into toolkit states and clamps them away from
the boundary, where the divergence is singular in its second slot.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .ball import minimax_ball
from .clustering import (
    MuSimilarDomain,
    WeightedStateSet,
    bicriteria,
    build_coreset,
    clamp_to_domain,
    cluster,
    divergence_matrix,
)
from .exceptions import ParameterError
from .states import DensityMatrix

__all__ = ["as_state_stack", "SmallestEnclosingBall", "BregmanKMedian"]


def as_state_stack(X) -> list[DensityMatrix]:
    """Validate an (n, d, d) array-like into a list of density matrices."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ParameterError(
            f"expected an (n, d, d) stack of density matrices, got shape {arr.shape}"
        )
    if arr.shape[0] < 1:
        raise ParameterError("need at least one state")
    return [DensityMatrix(mat) for mat in arr]


class SmallestEnclosingBall(TransformerMixin, BaseEstimator):
    """Minimax divergence ball over a stack of density matrices.

    Parameters
    ----------
    tol : float
        Radius-improvement tolerance of the farthest-point iteration.
    max_iter : int
        Iteration cap.
    clamp_floor : float
        Eigenvalue floor applied to the inputs before fitting.

    Attributes
    ----------
    center_ : ndarray of shape (d, d)
        Fitted ball center.
    radius_ : float
        Fitted radius in bits.
    support_ : tuple of int
        Indices of input states attaining the radius.
    converged_ : bool
    n_iter_ : int
    """

    def __init__(self, tol: float = 1e-6, max_iter: int = 5000, clamp_floor: float = 1e-4):
        self.tol = tol
        self.max_iter = max_iter
        self.clamp_floor = clamp_floor

    def _domain(self) -> MuSimilarDomain:
        return MuSimilarDomain(self.clamp_floor, 1.0 - self.clamp_floor)

    def fit(self, X, y=None):
        dom = self._domain()
        states = [clamp_to_domain(s, dom) for s in as_state_stack(X)]
        ball = minimax_ball(states, tol=self.tol, max_iter=self.max_iter)
        self.center_state_ = ball.center
        self.center_ = np.array(ball.center.data)
        self.radius_ = ball.radius
        self.support_ = ball.support
        self.converged_ = ball.converged
        self.n_iter_ = len(ball.radius_history)
        return self

    def transform(self, X):
        """Divergence of each state to the fitted center, shape (n, 1)."""
        if not hasattr(self, "center_state_"):
            raise NotFittedError("call fit before transform")
        states = as_state_stack(X)
        return divergence_matrix(states, [self.center_state_])


class BregmanKMedian(ClusterMixin, BaseEstimator):
    """k-median clustering of density matrices under the quantum divergence.

    Parameters
    ----------
    n_clusters : int
        Number of medians to search for.
    eps, delta : float
        Approximation and confidence parameters of the recursive search.
    clamp_floor : float
        Eigenvalue floor applied to the inputs.
    candidate_cap : int
        Candidate centroids sampled per recursion node.
    coreset_size : int or None
        When set, a bicriteria median set plus a ring coreset of this
        per-ring size replaces the full input during the search.
    coreset_beta : float
        Oversampling factor of the bicriteria stage.
    random_state : int

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_found, d, d)
    labels_ : ndarray of shape (n_states,)
    inertia_ : float
        Summed divergence of the inputs to their nearest centers.
    """

    def __init__(
        self,
        n_clusters: int = 2,
        eps: float = 0.3,
        delta: float = 0.3,
        clamp_floor: float = 1e-4,
        candidate_cap: int = 16,
        coreset_size: int | None = None,
        coreset_beta: float = 2.0,
        random_state: int = 0,
    ):
        self.n_clusters = n_clusters
        self.eps = eps
        self.delta = delta
        self.clamp_floor = clamp_floor
        self.candidate_cap = candidate_cap
        self.coreset_size = coreset_size
        self.coreset_beta = coreset_beta
        self.random_state = random_state

    def fit(self, X, y=None):
        dom = MuSimilarDomain(self.clamp_floor, 1.0 - self.clamp_floor)
        states = [clamp_to_domain(s, dom) for s in as_state_stack(X)]
        working = WeightedStateSet(states, np.ones(len(states)))
        if self.coreset_size is not None:
            rough = bicriteria(
                states, self.n_clusters, beta=self.coreset_beta, seed=self.random_state
            )
            working = build_coreset(
                states,
                rough,
                m=self.coreset_size,
                alpha=max(self.coreset_beta * self.n_clusters, 1.0),
                seed=self.random_state,
            )
        result = cluster(
            working,
            m=self.n_clusters,
            found=None,
            eps=self.eps,
            delta=self.delta,
            dom=dom,
            seed=self.random_state,
            candidate_cap=self.candidate_cap,
        )
        self.median_states_ = result.medians
        self.cluster_centers_ = np.stack([m.data for m in result.medians])
        dmat = divergence_matrix(states, result.medians)
        self.labels_ = dmat.argmin(axis=1)
        self.inertia_ = float(dmat.min(axis=1).sum())
        self.truncated_ = bool(result.meta.get("candidates_truncated", False))
        return self

    def predict(self, X):
        """Nearest-median index for each state in the stack."""
        if not hasattr(self, "median_states_"):
            raise NotFittedError("call fit before predict")
        states = as_state_stack(X)
        return divergence_matrix(states, self.median_states_).argmin(axis=1)
