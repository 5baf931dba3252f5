"""Divergence-domain clamping, k-median errors, coresets, and clustering.

Restricting eigenvalues to a band [floor, ceiling] makes the divergence
mu-similar to the quadratic form |rho - sigma|_F^2 / (2 floor) with
mu = floor / ceiling, which removes the singularities that pure states put
into the second divergence slot.  All randomized routines are deterministic
given their seed; recursion branches derive independent streams from the
(seed, branch-path) pair so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .exceptions import (
    CombinatorialLimitError,
    DimensionMismatchError,
    ParameterError,
)
from .states import EIG_CUTOFF, DensityMatrix

__all__ = [
    "MuSimilarDomain",
    "WeightedStateSet",
    "MedianSet",
    "DEFAULT_DOMAIN",
    "clamp_to_domain",
    "divergence_matrix",
    "kmedian_error",
    "weighted_error",
    "bicriteria",
    "build_coreset",
    "cluster",
    "centroid",
    "brute_force_kmedian",
]


@dataclass(frozen=True)
class MuSimilarDomain:
    """Eigenvalue band [floor, ceiling] on which the divergence is mu-similar."""

    floor: float = 1e-4
    ceiling: float = 1.0 - 1e-4

    def __post_init__(self):
        if not 0.0 < self.floor < self.ceiling <= 1.0:
            raise ParameterError(
                f"need 0 < floor < ceiling <= 1, got ({self.floor!r}, {self.ceiling!r})"
            )

    @property
    def mu(self) -> float:
        return self.floor / self.ceiling

    def quadratic_form(self, rho: DensityMatrix, sigma: DensityMatrix) -> float:
        """Reference quadratic |rho - sigma|_F^2 / (2 floor), in bits-scale units."""
        diff = rho.data - sigma.data
        return float(np.sum(np.abs(diff) ** 2)) / (2.0 * self.floor)


DEFAULT_DOMAIN = MuSimilarDomain()


def clamp_to_domain(rho: DensityMatrix, dom: MuSimilarDomain = DEFAULT_DOMAIN) -> DensityMatrix:
    """Clip eigenvalues into the domain band and renormalize to unit trace.

    The scale of the pre-clip spectrum is chosen by bisection so the clipped
    values sum to one, which makes the map idempotent: a clamped state has
    its spectrum inside the band with unit trace and passes through unchanged.
    """
    if dom.floor * rho.dim > 1.0 or dom.ceiling * rho.dim < 1.0:
        raise ParameterError(
            f"domain ({dom.floor!r}, {dom.ceiling!r}) cannot hold a unit-trace"
            f" spectrum in dimension {rho.dim}"
        )
    vals = np.clip(np.asarray(rho.eigvals, dtype=float), 0.0, None)
    lo, hi = 0.0, 1.0
    while np.clip(vals * hi, dom.floor, dom.ceiling).sum() < 1.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(vals * mid, dom.floor, dom.ceiling).sum() < 1.0:
            lo = mid
        else:
            hi = mid
    clipped = np.clip(vals * hi, dom.floor, dom.ceiling)
    clipped /= clipped.sum()
    vecs = rho.eigvecs
    return DensityMatrix((vecs * clipped) @ vecs.conj().T)


class WeightedStateSet:
    """Positively weighted set of equal-dimension density matrices."""

    __slots__ = ("_states", "_weights", "_stack", "_negents", "_div_cache")

    def __init__(self, states: Sequence[DensityMatrix], weights) -> None:
        states = tuple(states)
        weights = np.array(weights, dtype=float)
        if len(states) < 1 or weights.ndim != 1 or weights.size != len(states):
            raise ParameterError("need one positive weight per state")
        if float(weights.min()) <= 0.0:
            raise ParameterError("weights must be strictly positive")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise DimensionMismatchError("states must share one dimension")
        weights.setflags(write=False)
        self._states = states
        self._weights = weights
        self._stack = None
        self._negents = None
        self._div_cache: dict[int, tuple[DensityMatrix, np.ndarray]] = {}

    @property
    def states(self) -> tuple[DensityMatrix, ...]:
        return self._states

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def total_weight(self) -> float:
        return float(self._weights.sum())

    @property
    def dim(self) -> int:
        return self._states[0].dim

    def __len__(self) -> int:
        return len(self._states)

    def subset(self, indices) -> "WeightedStateSet":
        indices = list(indices)
        return WeightedStateSet(
            [self._states[i] for i in indices], self._weights[indices]
        )

    def _arrays(self):
        if self._stack is None:
            self._stack = np.stack([s.data for s in self._states])
            self._negents = np.array([s.negentropy for s in self._states])
        return self._stack, self._negents

    def divergences_to(self, sigma: DensityMatrix) -> np.ndarray:
        """Vector of D(state_i || sigma); cached per sigma object."""
        hit = self._div_cache.get(id(sigma))
        if hit is not None and hit[0] is sigma:
            return hit[1]
        stack, negents = self._arrays()
        values = _divergences(stack, negents, sigma)
        self._div_cache[id(sigma)] = (sigma, values)
        return values


def _divergences(stack: np.ndarray, negents: np.ndarray, sigma: DensityMatrix) -> np.ndarray:
    vecs = sigma.eigvecs
    s = sigma.eigvals
    weights = np.einsum("ji,njk,ki->ni", vecs.conj(), stack, vecs).real
    null = s <= EIG_CUTOFF
    supported = ~null
    cross = weights[:, supported] @ np.log2(s[supported])
    values = negents - cross
    np.clip(values, 0.0, None, out=values)
    if null.any():
        values[np.any(weights[:, null] > EIG_CUTOFF, axis=1)] = np.inf
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class MedianSet:
    """Median states of a clustering, with the targeted cluster count k."""

    medians: tuple[DensityMatrix, ...]
    k: int
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.medians) < 1:
            raise ParameterError("a median set holds at least one state")
        if self.k < 1:
            raise ParameterError(f"k must be positive, got {self.k!r}")
        object.__setattr__(self, "medians", tuple(self.medians))

    def __len__(self) -> int:
        return len(self.medians)


def _stack_of(states: Sequence[DensityMatrix]):
    stack = np.stack([s.data for s in states])
    negents = np.array([s.negentropy for s in states])
    return stack, negents


def divergence_matrix(
    states: Sequence[DensityMatrix], medians: Sequence[DensityMatrix]
) -> np.ndarray:
    """Matrix D[i, j] = D(state_i || median_j)."""
    stack, negents = _stack_of(states)
    return np.column_stack([_divergences(stack, negents, m) for m in medians])


def kmedian_error(states: Sequence[DensityMatrix], medians: MedianSet) -> float:
    """Unweighted k-median cost: sum over states of the nearest-median divergence."""
    states = list(states)
    if not states:
        raise ParameterError("kmedian_error needs at least one state")
    return float(divergence_matrix(states, medians.medians).min(axis=1).sum())


def weighted_error(weighted: WeightedStateSet, medians: MedianSet) -> float:
    """Weighted k-median cost sum_i w_i min_j D(state_i || median_j)."""
    columns = [weighted.divergences_to(m) for m in medians.medians]
    nearest = np.min(columns, axis=0)
    return float(weighted.weights @ nearest)


def bicriteria(
    states: Sequence[DensityMatrix], k: int, beta: float = 2.0, seed: int = 0
) -> MedianSet:
    """Divergence-proportional sampling of up to ceil(beta * k) medians.

    The first median is uniform over the input; each next one is drawn with
    probability D(state || chosen) / total error.  Sampling stops early once
    the error hits zero.
    """
    states = list(states)
    n = len(states)
    if k < 1 or n < k:
        raise ParameterError(f"need 1 <= k <= n, got k={k!r}, n={n}")
    if beta < 1.0:
        raise ParameterError(f"beta must be at least 1, got {beta!r}")
    target = min(math.ceil(beta * k - 1e-9), n)
    rng = np.random.default_rng(seed)
    stack, negents = _stack_of(states)

    chosen = [int(rng.integers(n))]
    nearest = _divergences(stack, negents, states[chosen[0]]).copy()
    while len(chosen) < target:
        infinite = np.isinf(nearest)
        if infinite.any():
            probs = infinite / infinite.sum()
        else:
            total = float(nearest.sum())
            if total <= 1e-15:
                break
            probs = nearest / total
        pick = int(rng.choice(n, p=probs))
        chosen.append(pick)
        nearest = np.minimum(nearest, _divergences(stack, negents, states[pick]))
    return MedianSet(
        tuple(states[i] for i in chosen), k=k, meta={"indices": tuple(chosen)}
    )


def build_coreset(
    states: Sequence[DensityMatrix],
    medians: MedianSet,
    m: int,
    alpha: float,
    seed: int = 0,
) -> WeightedStateSet:
    """Ring-partitioned weak coreset around a bicriteria median set.

    Each state joins its nearest median's cell; cells split into the inner
    ball of radius R = error / (alpha n) and doubling rings up to radius
    2^g R with g = ceil(log2(alpha n)).  Every nonempty ring contributes
    min(m, |ring|) uniform samples, each weighted |ring| / #samples, so the
    weights always sum to n.
    """
    states = list(states)
    n = len(states)
    if n < 1:
        raise ParameterError("build_coreset needs at least one state")
    if m < 1:
        raise ParameterError(f"m must be positive, got {m!r}")
    if alpha <= 0.0:
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    dmat = divergence_matrix(states, medians.medians)
    nearest_idx = dmat.argmin(axis=1)
    nearest = dmat[np.arange(n), nearest_idx]
    error = float(nearest.sum())
    if error <= 1e-15:
        counts = np.array(
            [max(int((nearest_idx == j).sum()), 0) for j in range(len(medians))],
            dtype=float,
        )
        keep = counts > 0
        return WeightedStateSet(
            [medians.medians[j] for j in np.nonzero(keep)[0]], counts[keep]
        )

    base_radius = error / (alpha * n)
    rings = max(math.ceil(math.log2(alpha * n) - 1e-9), 0)
    rng = np.random.default_rng(seed)
    picked: list[DensityMatrix] = []
    weights: list[float] = []
    for j in range(len(medians)):
        members = np.nonzero(nearest_idx == j)[0]
        if members.size == 0:
            continue
        dist = nearest[members]
        for ring in range(rings + 1):
            if ring == 0:
                mask = dist <= base_radius
            else:
                lo = 2.0 ** (ring - 1) * base_radius
                hi = 2.0**ring * base_radius
                # top ring absorbs fp stragglers at the outer boundary
                mask = (dist > lo) & (dist <= hi if ring < rings else np.ones_like(dist, bool))
            cell = members[mask]
            if cell.size == 0:
                continue
            take = min(m, cell.size)
            if take == cell.size:
                sample = cell
            else:
                sample = np.sort(rng.choice(cell, size=take, replace=False))
            cell_weight = cell.size / take
            picked.extend(states[i] for i in sample)
            weights.extend([cell_weight] * take)
    return WeightedStateSet(picked, np.array(weights))


def centroid(weighted: WeightedStateSet) -> DensityMatrix:
    """Weighted arithmetic mean; minimizes the weighted divergence to the right slot."""
    stack, _ = weighted._arrays()
    w = weighted.weights / weighted.total_weight
    return DensityMatrix(np.tensordot(w, stack, axes=1))


def brute_force_kmedian(states: Sequence[DensityMatrix], k: int) -> MedianSet:
    """Exact discrete k-median by exhausting all k-subsets of the input."""
    states = list(states)
    n = len(states)
    if k < 1 or n < k:
        raise ParameterError(f"need 1 <= k <= n, got k={k!r}, n={n}")
    if comb(n, k) > 1_000_000:
        raise CombinatorialLimitError(
            f"C({n},{k}) = {comb(n, k)} candidate subsets exceed the 1e6 cap"
        )
    dmat = divergence_matrix(states, states)
    from itertools import combinations

    best_err = np.inf
    best: tuple[int, ...] = tuple(range(k))
    for subset in combinations(range(n), k):
        err = float(dmat[:, subset].min(axis=1).sum())
        if err < best_err:
            best_err = err
            best = subset
    return MedianSet(
        tuple(states[i] for i in best),
        k=k,
        meta={"error": best_err, "indices": best},
    )


def _subset_family_size(n: int, max_size: int) -> int:
    total = 0
    for s in range(1, max_size + 1):
        total += comb(n, s)
        if total > 1_000_000_000:
            break
    return total


@dataclass
class _ClusterContext:
    eps: float
    delta: float
    mu: float
    seed: int
    candidate_cap: int
    truncated: bool = False


def _node_rng(ctx: _ClusterContext, path: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=ctx.seed, spawn_key=path))


def _error_of(weighted: WeightedStateSet, medians: Sequence[DensityMatrix]) -> float:
    columns = [weighted.divergences_to(m) for m in medians]
    return float(weighted.weights @ np.min(columns, axis=0))


def _cluster_rec(
    weighted: WeightedStateSet,
    m: int,
    found: list[DensityMatrix],
    ctx: _ClusterContext,
    path: tuple[int, ...],
) -> tuple[list[DensityMatrix], float]:
    if m == 0:
        return found, _error_of(weighted, found)
    if m >= len(weighted):
        merged = found + list(weighted.states)
        return merged, _error_of(weighted, merged)

    rng = _node_rng(ctx, path)
    k = m + len(found)
    scale = ctx.eps * ctx.eps * ctx.mu * ctx.delta
    sample_size = min(math.ceil(96.0 * k * k / scale), len(weighted))
    subset_max = min(math.ceil(3.0 / (ctx.eps * ctx.mu * ctx.delta)), sample_size)
    probs = weighted.weights / weighted.total_weight
    sample = rng.choice(len(weighted), size=sample_size, replace=True, p=probs)

    family_size = _subset_family_size(sample_size, subset_max)
    n_candidates = min(ctx.candidate_cap, family_size)
    if family_size > ctx.candidate_cap:
        ctx.truncated = True
    # geometric size ladder: small subsets are the ones that concentrate
    # inside a single cluster, large ones approach the global centroid
    size_ladder = [min(2**j, subset_max) for j in range(int(math.log2(subset_max)) + 1)]
    candidates = []
    for c in range(n_candidates):
        size = size_ladder[int(rng.integers(len(size_ladder)))]
        slots = rng.choice(sample_size, size=size, replace=False)
        indices = sample[slots]
        sub = weighted.subset(indices)
        candidates.append(centroid(sub))

    best: tuple[list[DensityMatrix], float] | None = None
    for j, cand in enumerate(candidates):
        result, err = _cluster_rec(weighted, m - 1, found + [cand], ctx, path + (j + 1,))
        if best is None or err < best[1]:
            best = (result, err)

    if found:
        to_found = np.min([weighted.divergences_to(c) for c in found], axis=0)
        order = np.argsort(to_found, kind="stable")
        cumulative = np.cumsum(weighted.weights[order])
        half = weighted.total_weight / 2.0
        # shortest closest-first prefix reaching half the weight leaves the set
        cut = int(np.searchsorted(cumulative, half)) + 1
        remainder = order[cut:]
        if remainder.size > 0:
            rest = weighted.subset(remainder)
            result, _ = _cluster_rec(rest, m, list(found), ctx, path + (0,))
            err = _error_of(weighted, result)
            if best is None or err < best[1]:
                best = (result, err)

    assert best is not None
    return best


def cluster(
    weighted: WeightedStateSet,
    m: int,
    found: MedianSet | None,
    eps: float,
    delta: float,
    dom: MuSimilarDomain = DEFAULT_DOMAIN,
    seed: int = 0,
    candidate_cap: int = 16,
) -> MedianSet:
    """Recursive median search over a weighted state set.

    With m medians still to find: sample a weighted multiset, form candidate
    centroids from random subsets of it, recurse with m-1 for each candidate,
    and additionally split off the closer weight-half of the input and recurse
    on the remainder with m unchanged.  The branch with the smallest weighted
    error on the current set wins.  ``meta['candidates_truncated']`` records
    whether the candidate family was subsampled to ``candidate_cap``.
    """
    if m < 0:
        raise ParameterError(f"m must be nonnegative, got {m!r}")
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise ParameterError("eps and delta must lie in (0, 1)")
    for i, s in enumerate(weighted.states):
        if s.min_eigenvalue() < dom.floor - 1e-6:
            raise ParameterError(
                f"state {i} lies outside the domain (min eigenvalue"
                f" {s.min_eigenvalue():.3e} < floor {dom.floor!r}); clamp first"
            )
    existing = list(found.medians) if found is not None else []
    if m == 0 and not existing:
        raise ParameterError("nothing to do: m = 0 with no medians found yet")
    ctx = _ClusterContext(
        eps=eps, delta=delta, mu=dom.mu, seed=seed, candidate_cap=candidate_cap
    )
    medians, err = _cluster_rec(weighted, m, existing, ctx, ())
    return MedianSet(
        tuple(medians),
        k=max(m + len(existing), 1),
        meta={"error": err, "candidates_truncated": ctx.truncated},
    )
