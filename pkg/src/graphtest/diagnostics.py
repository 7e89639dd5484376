"""Closed-form calibration and power diagnostics.

Everything here is exact arithmetic on model moments, no sampling:

* ``null_variance`` - the true variance of the statistic's numerator under
  the null, ``sum over pairs of m^2 sigma_ij^4``.
* ``condition_ratios`` - the four vanishing ratios behind the normal
  approximation; small values mean the null calibration is trustworthy.
* ``bernoulli_condition`` - the simplified check for binary graphs, which
  only needs ``n`` versus the squared Frobenius norm of the mean matrix.
* ``lambda_n`` - the noncentrality that governs power under the
  alternative; the test's power climbs to one as it grows.
* ``lambda_sparse_bernoulli`` - leading-order noncentrality for two sparse
  binary regimes (proportional means; common level with a small split).
* ``tfro_consistency_ratio`` - expected ratio of the baseline's squared
  denominator to the true numerator variance; values far from 1 predict a
  miscalibrated (typically severely conservative) baseline.
* ``exact_fourth_moment`` - exact fourth moment of a per-edge product,
  used as an oracle for the moment bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import (
    DegenerateModelError,
    InvalidScenarioParamsError,
    OddSampleSizeError,
)
from .models import MeanMatrix, TwoBlockModel, _pair_layout, model_mean_matrix


@dataclass(frozen=True, eq=False)
class ModelMoments:
    """Per-pair moments of a model pair (population 1 vs population 2).

    Under the null the two mean/variance sets coincide and ``eta`` holds the
    per-pair fourth moment of a weight difference between two independent
    null graphs.
    """

    n: int
    m: int
    mu1: np.ndarray
    mu2: np.ndarray
    sigma1_sq: np.ndarray
    sigma2_sq: np.ndarray
    eta: np.ndarray | None = None

    @property
    def is_null(self) -> bool:
        return bool(
            np.array_equal(self.mu1, self.mu2)
            and np.array_equal(self.sigma1_sq, self.sigma2_sq)
        )

    def _require_null(self, what: str) -> None:
        if not self.is_null:
            raise ValueError(f"{what} is a null-model diagnostic; use epsilon = 0 moments")


def _upper(matrix: np.ndarray) -> np.ndarray:
    rows, cols = np.triu_indices(matrix.shape[0], k=1)
    return matrix[rows, cols]


def beta_raw_moment(alpha: float, beta: float, k: int) -> float:
    """k-th raw moment of Beta(alpha, beta)."""
    value = 1.0
    for r in range(k):
        value *= (alpha + r) / (alpha + beta + r)
    return value


def _beta_central_fourth(alpha: float, beta: float) -> float:
    m1 = beta_raw_moment(alpha, beta, 1)
    m2 = beta_raw_moment(alpha, beta, 2)
    m3 = beta_raw_moment(alpha, beta, 3)
    m4 = beta_raw_moment(alpha, beta, 4)
    return m4 - 4 * m3 * m1 + 6 * m2 * m1**2 - 3 * m1**4


def paired_difference_fourth_moment(family: str, params) -> float:
    """E[(X - Y)^4] for X, Y i.i.d. from the given edge distribution.

    Expanding around the mean gives ``2*mu4 + 6*sigma^4`` with ``mu4`` the
    central fourth moment.
    """
    if family == "beta":
        a, b = params
        s = a + b
        var = a * b / (s * s * (s + 1.0))
        mu4 = _beta_central_fourth(a, b)
    else:
        p = float(params)
        var = p * (1.0 - p)
        mu4 = var * (1.0 - 3.0 * var)
    return 2.0 * mu4 + 6.0 * var * var


def two_block_moments(model: TwoBlockModel, m: int) -> ModelMoments:
    """Moments for the pair (unshifted model, shifted model).

    With ``epsilon = 0`` this is a null configuration.  ``eta`` is always
    computed from the unshifted distributions, matching its null-only role.
    """
    base = model_mean_matrix(model, shifted=False)
    shifted = model_mean_matrix(model, shifted=True)

    p_within, p_between = model.params(shifted=False)
    eta_w = paired_difference_fourth_moment(model.family, p_within)
    eta_b = paired_difference_fourth_moment(model.family, p_between)
    rows, cols, within = _pair_layout(model.n)
    eta = np.zeros((model.n, model.n))
    eta[rows, cols] = np.where(within, eta_w, eta_b)
    eta += eta.T

    return ModelMoments(
        n=model.n,
        m=m,
        mu1=base.mu,
        mu2=shifted.mu,
        sigma1_sq=base.sigma2,
        sigma2_sq=shifted.sigma2,
        eta=eta,
    )


def mean_matrix_moments(mean: MeanMatrix, m: int) -> ModelMoments:
    """Null moments from a user-supplied mean/variance matrix (no eta)."""
    return ModelMoments(
        n=mean.n,
        m=m,
        mu1=mean.mu,
        mu2=mean.mu,
        sigma1_sq=mean.sigma2,
        sigma2_sq=mean.sigma2,
        eta=None,
    )


def null_variance(moments: ModelMoments) -> float:
    """True variance of the numerator under the null: sum of m^2 sigma^4."""
    moments._require_null("null_variance")
    s4 = _upper(moments.sigma1_sq) ** 2
    return float(moments.m**2 * s4.sum())


@dataclass(frozen=True)
class ConditionRatios:
    """The four quantities that must vanish for the normal approximation.

    In order: ``n / sum(sigma^4)``, ``sum(sigma^8) / sum(sigma^4)^2``,
    ``sum(sigma^4 * eta) / (m * sum(sigma^4)^2)``, and
    ``sum(eta^2) / (m^2 * sum(sigma^4)^2)``.
    """

    size_vs_sigma4: float
    sigma8_concentration: float
    sigma4_eta: float
    eta_sq: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.size_vs_sigma4, self.sigma8_concentration,
                self.sigma4_eta, self.eta_sq)

    def all_below(self, cutoff: float) -> bool:
        return all(r < cutoff for r in self.as_tuple())


def condition_ratios(moments: ModelMoments) -> ConditionRatios:
    """Finite-sample values of the four vanishing ratios (caller judges
    smallness; there is no universal cutoff)."""
    moments._require_null("condition_ratios")
    if moments.eta is None:
        raise ValueError("condition_ratios needs fourth moments (eta)")
    s4 = _upper(moments.sigma1_sq) ** 2
    eta = _upper(moments.eta)
    total_s4 = float(s4.sum())
    if total_s4 == 0.0:
        raise DegenerateModelError("all edge variances are zero")
    total_sq = total_s4 * total_s4
    return ConditionRatios(
        size_vs_sigma4=moments.n / total_s4,
        sigma8_concentration=float((s4 * s4).sum()) / total_sq,
        sigma4_eta=float((s4 * eta).sum()) / (moments.m * total_sq),
        eta_sq=float((eta * eta).sum()) / (moments.m**2 * total_sq),
    )


@dataclass(frozen=True)
class BernoulliCondition:
    """Binary-graph simplification: compare n against ``|mu|_F^2``."""

    n: int
    mu_fro_sq: float
    ratio: float
    degenerate: bool
    bounded: bool
    violations: tuple[tuple[int, int], ...]


def bernoulli_condition(mu: np.ndarray, delta: float) -> BernoulliCondition:
    """Report ``n`` versus the squared Frobenius norm of the mean matrix.

    Pairs with mean above ``1 - delta`` are flagged; they break the
    variance-vs-mean bound the simplification relies on.
    """
    mu = np.asarray(mu, dtype=np.float64)
    n = mu.shape[0]
    upper = _upper(mu)
    fro_sq = float(2.0 * (upper * upper).sum())
    degenerate = fro_sq == 0.0
    ratio = float("inf") if degenerate else n / fro_sq

    rows, cols = np.triu_indices(n, k=1)
    offenders = upper > 1.0 - delta
    violations = tuple(
        (int(i), int(j)) for i, j in zip(rows[offenders], cols[offenders])
    )
    return BernoulliCondition(
        n=n,
        mu_fro_sq=fro_sq,
        ratio=ratio,
        degenerate=degenerate,
        bounded=not violations,
        violations=violations,
    )


def lambda_n(
    mu1: np.ndarray,
    mu2: np.ndarray,
    sigma1_sq: np.ndarray,
    sigma2_sq: np.ndarray,
    m: int,
) -> float:
    """Noncentrality ``m * sum((mu1-mu2)^2) / (2 * sqrt(sum(V^2)))`` with
    ``V = sigma1^2 + sigma2^2 + (mu1-mu2)^2`` per pair."""
    d = _upper(np.asarray(mu1) - np.asarray(mu2))
    v = _upper(np.asarray(sigma1_sq) + np.asarray(sigma2_sq)) + d * d
    total_v_sq = float((v * v).sum())
    if total_v_sq == 0.0:
        raise DegenerateModelError("all V_ij are zero; noncentrality undefined")
    return float(m * (d * d).sum() / (2.0 * sqrt(total_v_sq)))


def lambda_from_moments(moments: ModelMoments) -> float:
    return lambda_n(
        moments.mu1, moments.mu2, moments.sigma1_sq, moments.sigma2_sq, moments.m
    )


def lambda_sparse_bernoulli(
    a_n: float, tau_or_b_n: float, n: int, m: int, scenario: str
) -> float:
    """Leading-order noncentrality for two sparse binary regimes.

    Scenario "a": means ``tau * a_n`` vs ``a_n`` on every pair, giving
    ``m * n * a_n * (tau - 1)^2 / (4 * (tau + 1))``.
    Scenario "b": means ``a_n + b_n`` vs ``a_n - b_n``, giving
    ``(m * n / 2) * b_n^2 / a_n``.

    Both drop the vanishing correction factor, so they track the exact
    :func:`lambda_n` only to leading order.
    """
    if not 0.0 < a_n < 1.0:
        raise InvalidScenarioParamsError(f"a_n must lie in (0, 1), got {a_n}")
    if scenario == "a":
        tau = tau_or_b_n
        if tau <= 0:
            raise InvalidScenarioParamsError(f"tau must be positive, got {tau}")
        return m * n * a_n * (tau - 1.0) ** 2 / (4.0 * (tau + 1.0))
    if scenario == "b":
        b_n = tau_or_b_n
        # Only basic sanity here: the expression is a leading-order form for
        # a_n, b_n -> 0 and may be evaluated outside exact probability range.
        if b_n < 0:
            raise InvalidScenarioParamsError(f"b_n must be non-negative, got {b_n}")
        return (m * n / 2.0) * (b_n * b_n) / a_n
    raise InvalidScenarioParamsError(f"scenario must be 'a' or 'b', got {scenario!r}")


def tfro_consistency_ratio(moments: ModelMoments) -> float:
    """Expected squared-denominator ratio of the baseline to the true null
    variance: ``sum(mu^2) / sum(sigma^4)``.  Far from 1 means the baseline's
    normalizer estimates the wrong scale and the test fails."""
    moments._require_null("tfro_consistency_ratio")
    mu_sq = _upper(moments.mu1) ** 2
    s4 = _upper(moments.sigma1_sq) ** 2
    total_s4 = float(s4.sum())
    if total_s4 == 0.0:
        raise DegenerateModelError("all edge variances are zero")
    return float(mu_sq.sum()) / total_s4


def exact_fourth_moment(sigma2_ij, eta_ij, m: int):
    """Exact ``E[T_ij^4]`` under the null for one pair.

    Each half-sum of ``m/2`` i.i.d. centered differences has fourth moment
    ``(m/2)*eta + 3*(m/2)*((m/2)-1)*(2*sigma^2)^2`` (the pairing count of a
    quartic expansion, with ``E[d^2] = 2*sigma^2``); the two halves are
    independent, so the product's fourth moment is that quantity squared.

    Accepts scalars or arrays (broadcast elementwise).
    """
    if m % 2 != 0:
        raise OddSampleSizeError(f"group size must be even, got {m}")
    half = m // 2
    sigma2 = np.asarray(sigma2_ij, dtype=np.float64)
    eta = np.asarray(eta_ij, dtype=np.float64)
    p = half * eta + 3.0 * half * (half - 1) * (2.0 * sigma2) ** 2
    out = p * p
    if out.ndim == 0:
        return float(out)
    return out


def power_condition_ratios(moments: ModelMoments) -> dict[str, float]:
    """Side-condition diagnostics for the power statement.

    Two normalizations are in circulation, ``n / (m * sum(V^2))`` and
    ``n * m / (m^4 * sum(V^2))``; both are reported rather than adjudicated.
    """
    d = _upper(moments.mu1 - moments.mu2)
    v = _upper(moments.sigma1_sq + moments.sigma2_sq) + d * d
    total_v_sq = float((v * v).sum())
    if total_v_sq == 0.0:
        raise DegenerateModelError("all V_ij are zero")
    return {
        "statement": moments.n / (moments.m * total_v_sq),
        "proof": (moments.n * moments.m) / (moments.m**4 * total_v_sq),
    }
