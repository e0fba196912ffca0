"""Goodness-of-fit tests for normal (or user-noise) linear models.

The null hypothesis is that the linear model holds with errors
independent of the covariates and distributed, up to scale, according
to a known noise family. Standardised residuals

    eta_hat = (Y - X beta_hat) / sigma_hat,   sigma_hat^2 = ||resid||^2 / n,

have a distribution free of the unknown coefficients and scale, so null
replicas can be simulated: draw a noise vector, project it off the
column space of X, and standardise by the projected norm. The test then
assesses independence of the covariates and the standardised residuals
via entropy statistics, with the covariate-only entropy cancelling from
every comparison.

Three variants: the full-sample test, a sample-splitting version
(coefficients estimated on the second half, residuals tested on the
first), and a partitioned-design version that tests independence of the
errors and a subset X* of the covariates while still residualising
through the full design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .entropy import entropy_from_logrho
from .errors import DegenerateResidualsError, SingularDesignError
from .independence import (
    TestConfig,
    TestOutcome,
    _check_k,
    _logrho,
    _marginal_k,
    _resolve_weights,
    build_outcome,
    default_k,
)
from .rng import RESAMPLE, stream
from .samplers import NoiseModel

_COND_LIMIT = 1e10
_DEGENERATE_REL = 1e-10


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """A random-design regression sample with an optional column split.

    ``partition = (p0, p1)`` marks the first p0 design columns as the
    covariates of interest X*, the rest as auxiliary columns X**
    (intercepts, polynomial terms, ...). ``noise`` describes the error
    distribution up to scale.
    """

    design: np.ndarray
    response: np.ndarray
    partition: tuple[int, int] | None = None
    noise: NoiseModel = NoiseModel()

    def __post_init__(self):
        x = np.asarray(self.design, dtype=np.float64)
        y = np.asarray(self.response, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("design must be n x p and response length n")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("design/response contain NaN or infinite values")
        n, p = x.shape
        if n <= p:
            raise ValueError(f"need n > p, got n={n}, p={p}")
        if self.partition is not None:
            p0, p1 = self.partition
            if p0 < 1 or p1 < 0 or p0 + p1 != p:
                raise ValueError(f"partition {self.partition} incompatible with p={p}")
            object.__setattr__(self, "partition", (int(p0), int(p1)))
        object.__setattr__(self, "design", x)
        object.__setattr__(self, "response", y)

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]


class OLSFit(NamedTuple):
    beta_hat: np.ndarray
    residuals: np.ndarray
    sigma_hat: float


def _qr_fit(
    x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(beta, residuals, Q, R) via thin QR; raises on numerically singular X'X."""
    cond = np.linalg.cond(x.T @ x)
    if not np.isfinite(cond) or cond >= _COND_LIMIT:
        raise SingularDesignError(
            f"X'X condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}"
        )
    q, r = np.linalg.qr(x)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - x @ beta
    return beta, resid, q, r


def ols_fit(problem: RegressionProblem) -> OLSFit:
    """Least squares fit; sigma_hat uses divisor n (not n - p)."""
    beta, resid, _, _ = _qr_fit(problem.design, problem.response)
    sigma = float(np.linalg.norm(resid)) / math.sqrt(problem.n)
    return OLSFit(beta_hat=beta, residuals=resid, sigma_hat=sigma)


def _standardised_residuals(
    x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """(eta_hat, beta_hat, sigma_hat, Q); ||eta_hat||^2 = n by construction."""
    beta, resid, q, _ = _qr_fit(x, y)
    n = x.shape[0]
    sigma = float(np.linalg.norm(resid)) / math.sqrt(n)
    y_scale = float(np.linalg.norm(y)) / math.sqrt(n)
    if sigma <= _DEGENERATE_REL * max(y_scale, 1e-300):
        raise DegenerateResidualsError(
            f"residual scale {sigma:.3e} is zero relative to the response"
        )
    return resid / sigma, beta, sigma, q


def _project_out(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Residual of v after projecting onto the columns spanned by Q."""
    return v - q @ (q.T @ v)


def _entropy_statistic(
    x_star: np.ndarray,
    eta: np.ndarray,
    k_eta: int,
    w_eta,
    k_joint: int,
    w_joint,
    brute: bool,
    include_xstar: bool = False,
    k_xstar: int | None = None,
    w_xstar=None,
) -> float:
    """H_hat(eta) - H_hat(X*, eta), optionally plus the constant H_hat(X*)."""
    h_eta = entropy_from_logrho(_logrho(eta[:, None], k_eta, brute), 1, k_eta, w_eta)
    joint = np.hstack((x_star, eta[:, None]))
    h_joint = entropy_from_logrho(
        _logrho(joint, k_joint, brute), joint.shape[1], k_joint, w_joint
    )
    value = h_eta - h_joint
    if include_xstar:
        value += entropy_from_logrho(
            _logrho(x_star, k_xstar, brute), x_star.shape[1], k_xstar, w_xstar
        )
    return value


def _resolve_orders(config: TestConfig, n_eff: int, d_joint: int):
    k_eta = _check_k(_marginal_k(config, 0, n_eff), n_eff)
    k_joint = _check_k(config.k_joint or default_k(n_eff), n_eff)
    w_eta = _resolve_weights(k_eta, 1, config.weight_mode)
    w_joint = _resolve_weights(k_joint, d_joint, config.weight_mode)
    return k_eta, w_eta, k_joint, w_joint


def _regression_outcome(
    problem: RegressionProblem,
    config: TestConfig,
    p_star: int,
    statistic_mode: str,
) -> TestOutcome:
    if statistic_mode not in ("reduced", "full"):
        raise ValueError(f"unknown statistic_mode {statistic_mode!r}")
    x, y = problem.design, problem.response
    n = problem.n
    eta_hat, beta, sigma, q = _standardised_residuals(x, y)
    x_star = x[:, :p_star]
    k_eta, w_eta, k_joint, w_joint = _resolve_orders(config, n, p_star + 1)
    include = statistic_mode == "full"

    def stat(eta: np.ndarray) -> float:
        return _entropy_statistic(
            x_star, eta, k_eta, w_eta, k_joint, w_joint, config.brute,
            include_xstar=include, k_xstar=k_joint,
            w_xstar=_resolve_weights(k_joint, p_star, config.weight_mode) if include else None,
        )

    t0 = stat(eta_hat)
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        eta_b = problem.noise.sample(stream(config.seed, RESAMPLE, b), n)
        proj = _project_out(q, eta_b)
        s_b = float(np.linalg.norm(proj)) / math.sqrt(n)
        null[b - 1] = stat(proj / s_b)
    return build_outcome(
        t0, null, config.q, config.seed, k=k_joint,
        beta_hat=beta, sigma_hat=sigma,
    )


def mint_regression(
    problem: RegressionProblem, config: TestConfig, statistic_mode: str = "reduced"
) -> TestOutcome:
    """Full-sample goodness-of-fit test of the linear model.

    Null replicas simulate a noise vector from the problem's noise
    family, residualise it through the hat matrix and standardise it by
    the projected norm, mirroring the construction of the observed
    standardised residuals exactly.
    """
    return _regression_outcome(problem, config, problem.p, statistic_mode)


def mint_regression_partitioned(
    problem: RegressionProblem, config: TestConfig, statistic_mode: str = "reduced"
) -> TestOutcome:
    """Partitioned variant: entropies involve only the X* columns.

    The residual simulation pipeline is unchanged (full design used for
    projection); with an empty X** this is exactly ``mint_regression``.
    """
    if problem.partition is None:
        raise ValueError("partitioned variant needs problem.partition set")
    return _regression_outcome(problem, config, problem.partition[0], statistic_mode)


def mint_regression_split(
    problem: RegressionProblem, config: TestConfig
) -> TestOutcome:
    """Sample-splitting variant.

    Coefficients and scale are estimated on the second half of the
    sample; standardised residuals are formed and tested on the first
    half only. Null replicas push simulated noise through the identical
    split pipeline. With odd n the first half receives floor(n/2)
    observations.
    """
    x, y = problem.design, problem.response
    n = problem.n
    m = n // 2
    x1, x2 = x[:m], x[m:]
    y2 = y[m:]
    m2 = n - m
    if m2 <= problem.p:
        raise ValueError(f"second half has {m2} rows; need more than p={problem.p}")
    if m < 2:
        raise ValueError("first half too small to test")

    beta2, resid2, q2, r2 = _qr_fit(x2, y2)
    sigma2 = float(np.linalg.norm(resid2)) / math.sqrt(m2)
    y_scale = float(np.linalg.norm(y2)) / math.sqrt(m2)
    if sigma2 <= _DEGENERATE_REL * max(y_scale, 1e-300):
        raise DegenerateResidualsError(
            f"residual scale {sigma2:.3e} is zero relative to the response"
        )
    eta1 = (y[:m] - x1 @ beta2) / sigma2

    k_eta, w_eta, k_joint, w_joint = _resolve_orders(config, m, problem.p + 1)

    def stat(eta: np.ndarray) -> float:
        return _entropy_statistic(
            x1, eta, k_eta, w_eta, k_joint, w_joint, config.brute
        )

    t0 = stat(eta1)
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        eta_b = problem.noise.sample(stream(config.seed, RESAMPLE, b), n)
        gamma = np.linalg.solve(r2, q2.T @ eta_b[m:])
        resid_b = eta_b[m:] - x2 @ gamma
        s_b = float(np.linalg.norm(resid_b)) / math.sqrt(m2)
        null[b - 1] = stat((eta_b[:m] - x1 @ gamma) / s_b)
    return build_outcome(
        t0, null, config.q, config.seed, k=k_joint,
        beta_hat=beta2, sigma_hat=sigma2,
    )
