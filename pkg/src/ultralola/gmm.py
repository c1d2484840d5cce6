"""Gaussian mixture feature model and the Mahalanobis classifier."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import rng
from .errors import EmptyFusion, IndivisibleDimensions
from .numerics import q_function
from .results import SimResult


@dataclass(frozen=True, eq=False)
class GmmModel:
    """Class centroids with a shared diagonal covariance.

    ``centroids`` has shape ``(L, N)``; ``covariance_diag`` has shape ``(N,)``.
    Arrays are copied and made read-only on construction.
    """

    centroids: np.ndarray
    covariance_diag: np.ndarray

    def __post_init__(self):
        mu = np.array(self.centroids, dtype=float)
        cov = np.array(self.covariance_diag, dtype=float)
        if mu.ndim != 2 or mu.shape[0] < 2:
            raise ValueError("need at least two centroids of equal length")
        if cov.shape != (mu.shape[1],):
            raise ValueError(f"covariance_diag must have length {mu.shape[1]}")
        if not np.all(cov > 0) or not np.all(np.isfinite(cov)):
            raise ValueError("covariance entries must be positive and finite")
        if not np.all(np.isfinite(mu)):
            raise ValueError("centroids must be finite")
        mu.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "centroids", mu)
        object.__setattr__(self, "covariance_diag", cov)
        for a, b in itertools.combinations(range(mu.shape[0]), 2):
            if np.array_equal(mu[a], mu[b]):
                raise ValueError(f"centroids {a + 1} and {b + 1} coincide")

    @property
    def L(self) -> int:
        return self.centroids.shape[0]

    @property
    def N(self) -> int:
        return self.centroids.shape[1]

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "centroids": self.centroids.tolist(),
            "covariance_diag": self.covariance_diag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GmmModel":
        model = cls(np.asarray(d["centroids"], dtype=float), np.asarray(d["covariance_diag"], dtype=float))
        if "L" in d and int(d["L"]) != model.L:
            raise ValueError(f"L={d['L']} disagrees with {model.L} centroids")
        if "N" in d and int(d["N"]) != model.N:
            raise ValueError(f"N={d['N']} disagrees with centroid length {model.N}")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GmmModel":
        return cls.from_dict(json.loads(text))


def _check_label(model: GmmModel, label: int) -> int:
    label = int(label)
    if not 1 <= label <= model.L:
        raise ValueError(f"class label {label} outside [1, {model.L}]")
    return label - 1


def synthetic_model(L: int, N: int, variance: float) -> GmmModel:
    """Block-sign centroids: class l is -1 on its own N/L block, +1 elsewhere."""
    if L < 2 or N < 1:
        raise ValueError("need L >= 2 and N >= 1")
    if N % L:
        raise IndivisibleDimensions(f"N={N} is not divisible by L={L}")
    width = N // L
    mu = np.ones((L, N))
    for ell in range(L):
        mu[ell, ell * width:(ell + 1) * width] = -1.0
    return GmmModel(mu, np.full(N, float(variance)))


def equidistant_model(L: int, N: int, g: float) -> GmmModel:
    """Unit-covariance model whose every pairwise discriminant gain equals ``g``.

    Centroids sit on scaled coordinate axes, so ``L <= N`` is required
    unless ``L == 2``.
    """
    if L < 2 or N < 1 or (L > 2 and L > N):
        raise ValueError("equidistant model needs L >= 2 and L <= N (or L == 2)")
    if g <= 0:
        raise ValueError("g must be positive")
    mu = np.zeros((L, N))
    if L == 2:
        mu[1, 0] = math.sqrt(g)
    else:
        mu[np.arange(L), np.arange(L)] = math.sqrt(g / 2.0)
    return GmmModel(mu, np.ones(N))


def discriminant_gain(model: GmmModel, a: int, b: int) -> float:
    """Symmetric KL divergence between classes ``a`` and ``b`` (1-based)."""
    diff = model.centroids[_check_label(model, a)] - model.centroids[_check_label(model, b)]
    return float(np.sum(diff * diff / model.covariance_diag))


def min_discriminant_gain(model: GmmModel) -> float:
    return min(
        discriminant_gain(model, a, b)
        for a, b in itertools.combinations(range(1, model.L + 1), 2)
    )


def sample_features(model: GmmModel, label: int, count: int, rng_seed: int) -> np.ndarray:
    """``count`` i.i.d. feature vectors of class ``label``; shape ``(count, N)``."""
    idx = _check_label(model, label)
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng.stream(rng_seed, rng.TAG_FEATURES)
    z = gen.standard_normal((count, model.N))
    return model.centroids[idx] + z * np.sqrt(model.covariance_diag)


def fuse(features: Iterable[np.ndarray]) -> np.ndarray:
    """Average pooling of feature vectors."""
    arr = np.array(list(features), dtype=float)
    if arr.shape[0] == 0:
        raise EmptyFusion("cannot fuse an empty set of feature vectors")
    return arr.mean(axis=0)


def mahalanobis_sq(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distance of ``x`` to every centroid."""
    diff = np.asarray(x, dtype=float)[None, :] - model.centroids
    return np.sum(diff * diff / model.covariance_diag, axis=1)


def classify(model: GmmModel, fused: np.ndarray) -> int:
    """Nearest centroid in Mahalanobis distance; ties go to the lowest label."""
    fused = np.asarray(fused, dtype=float)
    if fused.shape != (model.N,):
        raise ValueError(f"expected a vector of length {model.N}")
    # same arithmetic as the batch path so exact ties break identically
    return int(classify_batch(model, fused[None, :])[0]) + 1


def classify_batch(model: GmmModel, X: np.ndarray) -> np.ndarray:
    """Row-wise :func:`classify`, returning 0-based class indices."""
    inv = 1.0 / model.covariance_diag
    best = np.full(X.shape[0], np.inf)
    out = np.zeros(X.shape[0], dtype=np.int64)
    for ell in range(model.L):
        diff = X - model.centroids[ell]
        d = (diff * diff) @ inv
        closer = d < best  # strict: earlier class keeps ties
        best = np.where(closer, d, best)
        out[closer] = ell
    return out


def accuracy_lower_bound(L: int, g_min: float, K: int) -> float:
    """Union-bound accuracy with K fused snapshots, floored at 1/L."""
    if L < 2:
        raise ValueError("L must be >= 2")
    if g_min <= 0:
        raise ValueError("g_min must be positive")
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K == 0:
        return 1.0 / L
    return max(1.0 / L, 1.0 - (L - 1) * q_function(math.sqrt(K * g_min) / 2.0))


def binary_accuracy_exact(g12: float, K: int) -> float:
    """Exact two-class accuracy with K fused snapshots."""
    if g12 <= 0 or K < 1:
        raise ValueError("need g12 > 0 and K >= 1")
    return q_function(-math.sqrt(K * g12) / 2.0)


def draw_fused(
    model: GmmModel,
    labels: np.ndarray,
    counts: np.ndarray,
    gen: np.random.Generator,
    explicit_views: bool = False,
) -> np.ndarray:
    """Fused feature vector per trial, averaging ``counts[i]`` fresh draws.

    With ``explicit_views`` every view is drawn and pooled; otherwise the
    pooled mean is drawn directly from N(mu, C / count), which has the same
    distribution. Rows with ``counts == 0`` are returned as NaN.
    """
    n = labels.shape[0]
    sd = np.sqrt(model.covariance_diag)
    mu = model.centroids[labels]
    out = np.full((n, model.N), np.nan)
    ok = counts > 0
    if explicit_views:
        total = np.zeros((n, model.N))
        for k in range(int(counts.max()) if n else 0):
            z = gen.standard_normal((n, model.N))
            total += z * (k < counts)[:, None]
        out[ok] = mu[ok] + sd * total[ok] / counts[ok, None]
    else:
        z = gen.standard_normal((n, model.N))
        scale = np.zeros(n)
        scale[ok] = 1.0 / np.sqrt(counts[ok])
        out[ok] = mu[ok] + sd * z[ok] * scale[ok, None]
    return out


def run_blocks(fn, trials: int, workers: int = 1) -> int:
    """Sum ``fn(block_index, n_trials)`` over all trial blocks."""
    parts = rng.blocks(trials)
    if workers <= 1 or len(parts) == 1:
        return sum(fn(b, n) for b, n in parts)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda bn: fn(*bn), parts))


def mc_classification_accuracy(
    model: GmmModel,
    K: int,
    trials: int,
    rng_seed: int,
    explicit_views: bool = False,
    workers: int = 1,
) -> SimResult:
    """Monte Carlo accuracy of the classifier on K fused snapshots (no link)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    seed = rng.check_seed(rng_seed)

    def block(b: int, n: int) -> int:
        gen = rng.stream(seed, rng.TAG_CLASSIFICATION, b)
        labels = gen.integers(0, model.L, size=n)
        fused = draw_fused(model, labels, np.full(n, K), gen, explicit_views)
        return int(np.count_nonzero(classify_batch(model, fused) == labels))

    return SimResult.from_counts(trials, run_blocks(block, trials, workers), seed)
