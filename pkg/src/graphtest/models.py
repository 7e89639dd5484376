"""Generative models for the simulation designs.

A :class:`TwoBlockModel` splits the (even) node set into two equal blocks
and draws each edge weight independently from a Beta or Bernoulli
distribution: one parameter set for within-block pairs, another for
between-block pairs.  A non-negative shift ``epsilon`` defines the second
population (``Beta(a+eps, b+eps)`` / ``Bern(p+eps)``), so ``epsilon = 0``
is the null configuration.

Arbitrary inhomogeneous means enter through :class:`MeanMatrix`, which the
diagnostics consume directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigError,
    NonPositiveParameterError,
    OddNodeCountError,
    ProbabilityRangeError,
)
from .graphs import AdjacencyMatrix, GraphSample

FAMILIES = ("beta", "bernoulli")


@dataclass(frozen=True)
class TwoBlockModel:
    """Two-block edge-weight model.

    ``within``/``between`` are ``(a, b)`` shape pairs for the Beta family or
    success probabilities for the Bernoulli family.
    """

    n: int
    family: str
    within: tuple[float, float] | float
    between: tuple[float, float] | float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.n < 2:
            raise ConfigError(f"node count must be at least 2, got {self.n}")
        if self.n % 2 != 0:
            raise OddNodeCountError(f"two-block designs need even n, got {self.n}")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ConfigError(f"epsilon must be a non-negative real, got {self.epsilon!r}")
        for params in (self.within, self.between):
            self._check_params(params)

    def _check_params(self, params) -> None:
        if self.family == "beta":
            if not (isinstance(params, tuple) and len(params) == 2):
                raise ConfigError(f"beta parameters must be an (a, b) pair, got {params!r}")
            a, b = params
            for shift in (0.0, self.epsilon):
                if a + shift <= 0 or b + shift <= 0:
                    raise NonPositiveParameterError(
                        f"beta shapes must stay positive, got ({a}, {b}) with shift {shift}"
                    )
        else:
            if not isinstance(params, (int, float)):
                raise ConfigError(f"bernoulli parameter must be a probability, got {params!r}")
            for shift in (0.0, self.epsilon):
                p = params + shift
                if not 0.0 <= p <= 1.0:
                    raise ProbabilityRangeError(
                        f"bernoulli probability {params} + shift {shift} leaves [0, 1]"
                    )

    def params(self, shifted: bool) -> tuple:
        """(within, between) parameters, with the shift applied if requested."""
        if not shifted or self.epsilon == 0.0:
            return self.within, self.between
        if self.family == "beta":
            e = self.epsilon
            (a, b), (c, d) = self.within, self.between
            return (a + e, b + e), (c + e, d + e)
        return self.within + self.epsilon, self.between + self.epsilon


@dataclass(frozen=True, eq=False)
class MeanMatrix:
    """Per-pair edge-weight means and variances (symmetric, zero diagonal)."""

    mu: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64, copy=True)
        s2 = np.array(self.sigma2, dtype=np.float64, copy=True)
        for name, arr in (("mu", mu), ("sigma2", s2)):
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ConfigError(f"{name} must be square, got shape {arr.shape}")
            if not np.allclose(arr, arr.T, atol=0, rtol=0, equal_nan=False):
                raise ConfigError(f"{name} must be symmetric")
            if np.diagonal(arr).any():
                raise ConfigError(f"{name} must have a zero diagonal")
        if mu.shape != s2.shape:
            raise ConfigError("mu and sigma2 must have matching shapes")
        if (s2 < 0).any():
            raise ConfigError("variances must be non-negative")
        mu.setflags(write=False)
        s2.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", s2)

    @property
    def n(self) -> int:
        return self.mu.shape[0]


def block_of_pair(i: int, j: int, n: int) -> str:
    """Classify the 1-based node pair ``i < j`` as "within" or "between"."""
    if n % 2 != 0:
        raise OddNodeCountError(f"two-block designs need even n, got {n}")
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got ({i}, {j}) with n={n}")
    half = n // 2
    return "between" if i <= half < j else "within"


@lru_cache(maxsize=None)
def _pair_layout(n: int):
    """Upper-triangle index arrays and the within-block mask for size n."""
    rows, cols = np.triu_indices(n, k=1)
    half = n // 2
    within = (rows < half) == (cols < half)
    return rows, cols, within


def beta_moments(alpha: float, beta: float) -> tuple[float, float]:
    """Mean and variance of Beta(alpha, beta)."""
    if alpha <= 0 or beta <= 0:
        raise NonPositiveParameterError(
            f"beta shapes must be positive, got ({alpha}, {beta})"
        )
    s = alpha + beta
    mean = alpha / s
    var = alpha * beta / (s * s * (s + 1.0))
    return mean, var


def bernoulli_moments(p: float) -> tuple[float, float]:
    """Mean and variance of Bern(p)."""
    if not 0.0 <= p <= 1.0:
        raise ProbabilityRangeError(f"probability must lie in [0, 1], got {p}")
    return p, p * (1.0 - p)


def _family_moments(family: str, params) -> tuple[float, float]:
    if family == "beta":
        return beta_moments(*params)
    return bernoulli_moments(params)


def model_mean_matrix(model: TwoBlockModel, shifted: bool = False) -> MeanMatrix:
    """Per-pair mean/variance matrices implied by the model (shift optional)."""
    p_within, p_between = model.params(shifted)
    mw, vw = _family_moments(model.family, p_within)
    mb, vb = _family_moments(model.family, p_between)
    rows, cols, within = _pair_layout(model.n)

    mu = np.zeros((model.n, model.n))
    s2 = np.zeros((model.n, model.n))
    mu[rows, cols] = np.where(within, mw, mb)
    s2[rows, cols] = np.where(within, vw, vb)
    mu += mu.T
    s2 += s2.T
    return MeanMatrix(mu, s2)


def _draw_pairs(family: str, params, size: int, rng: np.random.Generator) -> np.ndarray:
    if family == "beta":
        a, b = params
        return rng.beta(a, b, size=size)
    # Bern(p) as a thresholded uniform; exact at p = 0 and p = 1.
    return (rng.random(size) < params).astype(np.float64)


def sample_graph(model: TwoBlockModel, shifted: bool, rng: np.random.Generator) -> AdjacencyMatrix:
    """Draw one graph: independent weights per unordered pair.

    Within-block pairs are drawn before between-block pairs, so a given
    stream state always produces the same graph.
    """
    p_within, p_between = model.params(shifted)
    rows, cols, within = _pair_layout(model.n)
    vals = np.empty(rows.size)
    n_within = int(within.sum())
    vals[within] = _draw_pairs(model.family, p_within, n_within, rng)
    vals[~within] = _draw_pairs(model.family, p_between, rows.size - n_within, rng)

    mat = np.zeros((model.n, model.n))
    mat[rows, cols] = vals
    mat[cols, rows] = vals
    return AdjacencyMatrix(mat)


def sample_population(
    model: TwoBlockModel, shifted: bool, m: int, rng: np.random.Generator
) -> GraphSample:
    """Draw ``m`` i.i.d. graphs from the model."""
    if m < 1:
        raise ConfigError(f"population size must be at least 1, got {m}")
    return GraphSample(tuple(sample_graph(model, shifted, rng) for _ in range(m)))


def beta_params_from_moments(mean: float, variance: float) -> tuple[float, float]:
    """Invert (mean, variance) to Beta shape parameters.

    Requires 0 < mean < 1 and 0 < variance < mean*(1-mean).
    """
    if not 0.0 < mean < 1.0:
        raise NonPositiveParameterError(f"beta mean must lie in (0, 1), got {mean}")
    limit = mean * (1.0 - mean)
    if not 0.0 < variance < limit:
        raise NonPositiveParameterError(
            f"beta variance must lie in (0, {limit:g}), got {variance}"
        )
    concentration = limit / variance - 1.0
    return mean * concentration, (1.0 - mean) * concentration


def sample_graph_from_means(
    mean: MeanMatrix, family: str, rng: np.random.Generator
) -> AdjacencyMatrix:
    """Draw one graph with an arbitrary inhomogeneous mean structure.

    Each pair (i, j) is drawn independently from the family member with
    mean ``mean.mu[i, j]``; the Beta family additionally matches
    ``mean.sigma2[i, j]`` (method of moments), while the Bernoulli family's
    variance is implied by its mean.  Pairs are drawn in upper-triangle
    row-major order.
    """
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}, got {family!r}")
    n = mean.n
    rows, cols = np.triu_indices(n, k=1)
    mu = mean.mu[rows, cols]
    if family == "bernoulli":
        if ((mu < 0) | (mu > 1)).any():
            raise ProbabilityRangeError("bernoulli means must lie in [0, 1]")
        vals = (rng.random(rows.size) < mu).astype(np.float64)
    else:
        alphas = np.empty(rows.size)
        betas = np.empty(rows.size)
        for k in range(rows.size):
            alphas[k], betas[k] = beta_params_from_moments(
                mu[k], mean.sigma2[rows[k], cols[k]]
            )
        vals = rng.beta(alphas, betas)
    mat = np.zeros((n, n))
    mat[rows, cols] = vals
    mat[cols, rows] = vals
    return AdjacencyMatrix(mat)


MODEL_KEYS = {"schema", "family", "n", "within", "between", "epsilon"}


def model_from_json(doc: dict) -> TwoBlockModel:
    """Build a model from its JSON document form.

    Expected shape: ``{"schema": 1, "family": "beta"|"bernoulli", "n": int,
    "within": [a, b] | p, "between": [c, d] | p, "epsilon": float}``.
    Unknown keys are rejected to catch typos.
    """
    if not isinstance(doc, dict):
        raise ConfigError("model document must be a JSON object")
    unknown = set(doc) - MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model keys: {sorted(unknown)}")
    if doc.get("schema") != 1:
        raise ConfigError("model document must declare \"schema\": 1")
    missing = {"family", "n", "within", "between"} - set(doc)
    if missing:
        raise ConfigError(f"model document missing keys: {sorted(missing)}")

    family = doc["family"]
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}, got {family!r}")

    def _params(value, key):
        if family == "beta":
            if not (isinstance(value, (list, tuple)) and len(value) == 2):
                raise ConfigError(f"{key} must be an [a, b] pair for the beta family")
            return (float(value[0]), float(value[1]))
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{key} must be a probability for the bernoulli family")
        return float(value)

    return TwoBlockModel(
        n=int(doc["n"]),
        family=family,
        within=_params(doc["within"], "within"),
        between=_params(doc["between"], "between"),
        epsilon=float(doc.get("epsilon", 0.0)),
    )


def load_model_json(path) -> TwoBlockModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON in {path}: {err}") from err
    return model_from_json(doc)
