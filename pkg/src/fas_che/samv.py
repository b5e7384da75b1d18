"""Iterative sparse covariance-fitting channel estimator.

The stacked pilot sweeps ``y_t`` are modeled with covariance

    R = sum_g gamma_g b_g b_g^H + sigma * I,

where ``b_g`` is the effective atom obtained by pushing the g-th steering
vector through the port-switching selector.  The grid powers ``gamma`` and
the noise variance ``sigma`` are fit by alternating a (robust) weighted
sample covariance with clamped asymptotic-minimum-variance updates:

    gamma_g <- max(0, b^H Ups b / (b^H R^-1 b)^2 + gamma_g - 1 / (b^H R^-1 b))
    sigma   <- max(floor, [tr(Ups) + sigma tr(R^-2) - tr(R^-1)] / tr(R^-2))

with ``Ups = R^-1 R_K R^-1`` and ``R_K`` the weighted sample covariance.  A
one-parameter power family generalizes the gamma update,

    gamma_g <- b^H Ups b / (b^H R^-1 b)^(2 rho) * gamma_g^(2 (1 - rho)),

which at ``rho = 0.5`` blends the previous spectrum with a Capon-style
refinement.  Both rules leave ``(gamma, sigma)`` fixed when ``R_K == R``.
"""

import numpy as np
import scipy.linalg as sla
from dataclasses import dataclass
from threadpoolctl import threadpool_limits

from .errors import ConfigurationError, NumericalError
from .model import SteeringDictionary
from .schedule import StackedSelector

WEIGHT_FUNCTIONS = ("gaussian", "tyler", "huber")
UPDATE_RULES = ("additive", "power")

#: Relative-change denominators are floored here so exactly-zero grid powers
#: do not produce 0/0 in the stopping metric.
REL_CHANGE_EPS = 1e-12


@dataclass(frozen=True)
class EffectiveDictionary:
    """Steering dictionary pushed through the selector: atoms ``b_g = S a_g``."""

    atoms: np.ndarray  # (K*M, G) complex
    dictionary: SteeringDictionary
    selector: StackedSelector

    @property
    def grid_size(self) -> int:
        return self.atoms.shape[1]


def effective_dictionary(dictionary: SteeringDictionary,
                         selector: StackedSelector) -> EffectiveDictionary:
    """Select the observed coordinates of every dictionary column."""
    atoms = dictionary.atoms[selector.port_indices, :]
    return EffectiveDictionary(atoms=atoms, dictionary=dictionary, selector=selector)


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs of the iterative estimator.

    ``update_rule`` selects the additive clamped update or the ``rho``-power
    family; ``weight_function`` picks the per-snapshot reweighting (gaussian
    weights are constant 1, tyler weights ``dim / t`` are scale invariant,
    huber weights ``min(1, c / t)`` need ``huber_threshold``).  A ``None``
    ``sigma_floor`` resolves at run time to ``1e-12 * tr(R_K) / dim``.
    """

    rho: float = 0.5
    max_iterations: int = 100
    tolerance: float = 1e-6
    weight_function: str = "gaussian"
    huber_threshold: float | None = None
    update_rule: str = "additive"
    sigma_floor: float | None = None

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.5:
            raise ConfigurationError(f"rho must lie in (0, 1.5], got {self.rho}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.tolerance <= 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tolerance}")
        if self.weight_function not in WEIGHT_FUNCTIONS:
            raise ConfigurationError(
                f"weight_function must be one of {WEIGHT_FUNCTIONS}, got {self.weight_function!r}")
        if self.weight_function == "huber" and not self.huber_threshold:
            raise ConfigurationError("huber weights need a positive huber_threshold")
        if self.update_rule not in UPDATE_RULES:
            raise ConfigurationError(
                f"update_rule must be one of {UPDATE_RULES}, got {self.update_rule!r}")
        if self.sigma_floor is not None and self.sigma_floor <= 0:
            raise ConfigurationError(f"sigma_floor must be positive, got {self.sigma_floor}")


@dataclass
class IterationRecord:
    """One row of the convergence trace."""

    iteration: int
    max_rel_change: float
    sigma: float
    nll: float


@dataclass(frozen=True)
class SpectrumEstimate:
    """Fitted grid powers and noise variance with the iteration trace.

    ``gamma`` and ``sigma`` are the visited iterate with the smallest negative
    log likelihood, which coincides with the last iterate whenever the pass
    converged; ``converged`` reports whether the relative-change tolerance was
    met within the iteration budget.
    """

    gamma: np.ndarray  # (G,) nonnegative
    sigma: float
    iterations_used: int
    trace: tuple  # IterationRecord per iteration
    sigma_floor: float
    converged: bool = True


def assemble_covariance(dict_: EffectiveDictionary, gamma, sigma: float) -> np.ndarray:
    """Model covariance ``B diag(gamma) B^H + sigma I`` (exactly Hermitian)."""
    b = dict_.atoms
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (b.shape[1],):
        raise ValueError(f"gamma has shape {gamma.shape}, expected ({b.shape[1]},)")
    if (gamma < 0).any():
        raise ValueError("gamma entries must be nonnegative")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    low_rank = (b * gamma) @ b.conj().T
    r = 0.5 * (low_rank + low_rank.conj().T)
    r[np.diag_indices_from(r)] += sigma
    return r


def maronna_weights(t: np.ndarray, kind: str, dim: int,
                    huber_threshold: float | None = None) -> np.ndarray:
    """Per-snapshot weights ``phi(t)`` for the weighted sample covariance."""
    t = np.asarray(t, dtype=float)
    if kind == "gaussian":
        return np.ones_like(t)
    if kind == "tyler":
        return np.where(t > 0, dim / np.where(t > 0, t, 1.0), 0.0)
    if kind == "huber":
        if not huber_threshold:
            raise ConfigurationError("huber weights need a positive huber_threshold")
        return np.minimum(1.0, huber_threshold / np.where(t > 0, t, np.inf))
    raise ConfigurationError(f"unknown weight function {kind!r}")


def robust_sample_covariance(snapshots, r_current: np.ndarray,
                             weight_function: str = "gaussian",
                             huber_threshold: float | None = None) -> np.ndarray:
    """Weighted sample covariance ``(1/T) sum_t phi(y^H R^-1 y) y y^H``."""
    y = np.atleast_2d(np.asarray(snapshots))
    if y.shape[0] < 1:
        raise ValueError("need at least one snapshot")
    factor = _cholesky(r_current, context="sample-covariance reweighting")
    # t_t = ||L^-1 y_t||^2 = y_t^H R^-1 y_t
    z = sla.solve_triangular(factor, y.T, lower=True)
    t_vals = np.sum(np.abs(z) ** 2, axis=0)
    kappa = maronna_weights(t_vals, weight_function, dim=y.shape[1],
                            huber_threshold=huber_threshold)
    weighted = (y.T * kappa) @ y.conj()
    r_k = weighted / y.shape[0]
    return 0.5 * (r_k + r_k.conj().T)


def initialize(dict_: EffectiveDictionary, r_k: np.ndarray, snapshots) -> tuple:
    """Matched-filter grid powers and mean per-sample energy as starting point."""
    b = dict_.atoms
    norms_sq = np.sum(np.abs(b) ** 2, axis=0)
    if (norms_sq == 0).any():
        raise ConfigurationError("effective dictionary contains a zero-norm atom")
    quad = np.einsum("ij,ij->j", b.conj(), r_k @ b).real  # b_g^H R_K b_g
    gamma0 = quad / norms_sq ** 2
    y = np.atleast_2d(np.asarray(snapshots))
    sigma0 = float(np.sum(np.abs(y) ** 2) / y.size)
    return np.maximum(gamma0, 0.0), sigma0


def samv_update(gamma, sigma: float, dict_: EffectiveDictionary,
                r_k: np.ndarray, config: EstimatorConfig) -> tuple:
    """One clamped update of ``(gamma, sigma)`` against a fixed ``R_K``."""
    gamma = np.asarray(gamma, dtype=float)
    r = assemble_covariance(dict_, gamma, sigma)
    factor = _cholesky(r, context="model covariance")
    floor = _resolve_sigma_floor(config, r_k)
    return _update_from_factor(dict_.atoms, factor, r_k, gamma, sigma, config, floor)


def negative_log_likelihood(gamma, sigma: float, dict_: EffectiveDictionary,
                            snapshots) -> float:
    """Gaussian fit criterion ``T log det R + sum_t y_t^H R^-1 y_t``."""
    y = np.atleast_2d(np.asarray(snapshots))
    r = assemble_covariance(dict_, np.asarray(gamma, dtype=float), sigma)
    factor = _cholesky(r, context="likelihood evaluation")
    return _nll_from_factor(factor, y)


def run(config: EstimatorConfig, dict_: EffectiveDictionary, snapshots,
        r_k_override: np.ndarray | None = None,
        initial: tuple | None = None) -> SpectrumEstimate:
    """Fit the spectrum: initialize, then iterate reweighting and updates.

    Stops when ``max_g |dgamma_g| / max(gamma_g, eps)`` drops below the
    configured tolerance or after ``max_iterations``.  The returned
    ``(gamma, sigma)`` is the visited iterate with the smallest negative log
    likelihood: the update map is not a descent method, so when the budget
    runs out without meeting the tolerance the best-cost iterate is the
    defensible estimate (under convergence it matches the final iterate).

    ``r_k_override`` pins the sample covariance (diagnostics); ``initial``
    overrides the ``(gamma0, sigma0)`` starting point.
    """
    y = np.atleast_2d(np.asarray(snapshots, dtype=complex))
    b = dict_.atoms
    if y.shape[1] != b.shape[0]:
        raise ValueError(f"snapshots of length {y.shape[1]} do not match atoms of length {b.shape[0]}")
    with threadpool_limits(limits=1, user_api="blas"):
        # matrices here are small (dim <= a few hundred); threaded BLAS loses
        # more to synchronization than it gains per call
        return _run_loop(config, dict_, y, r_k_override, initial)


def _run_loop(config, dict_, y, r_k_override, initial):
    b = dict_.atoms
    plain_cov = (y.T @ y.conj()) / y.shape[0]
    plain_cov = 0.5 * (plain_cov + plain_cov.conj().T)
    r_k = plain_cov if r_k_override is None else np.asarray(r_k_override)
    floor = _resolve_sigma_floor(config, r_k)
    if initial is None:
        gamma, sigma = initialize(dict_, r_k, y)
    else:
        gamma, sigma = np.asarray(initial[0], dtype=float).copy(), float(initial[1])
    sigma = max(sigma, floor)

    records = []
    best_nll, best_gamma, best_sigma = np.inf, gamma, sigma
    converged = False
    reweight = config.weight_function != "gaussian" and r_k_override is None
    for it in range(1, config.max_iterations + 1):
        r = assemble_covariance(dict_, gamma, sigma)
        factor = _cholesky(r, context=f"iteration {it}")
        nll_here = _nll_from_factor(factor, y)  # cost of the entering iterate
        if records:
            records[-1].nll = nll_here
        if nll_here < best_nll:
            best_nll, best_gamma, best_sigma = nll_here, gamma, sigma
        if reweight:
            z = sla.solve_triangular(factor, y.T, lower=True)
            t_vals = np.sum(np.abs(z) ** 2, axis=0)
            kappa = maronna_weights(t_vals, config.weight_function, dim=y.shape[1],
                                    huber_threshold=config.huber_threshold)
            r_k = (y.T * kappa) @ y.conj() / y.shape[0]
            r_k = 0.5 * (r_k + r_k.conj().T)
        gamma_new, sigma_new = _update_from_factor(
            b, factor, r_k, gamma, sigma, config, floor, iteration=it)
        delta = float(np.max(np.abs(gamma_new - gamma) / np.maximum(gamma, REL_CHANGE_EPS)))
        records.append(IterationRecord(iteration=it, max_rel_change=delta,
                                       sigma=sigma_new, nll=np.nan))
        gamma, sigma = gamma_new, sigma_new
        if delta < config.tolerance:
            converged = True
            break
    final = assemble_covariance(dict_, gamma, sigma)
    nll_final = _nll_from_factor(_cholesky(final, context="final trace"), y)
    records[-1].nll = nll_final
    if nll_final < best_nll:
        best_nll, best_gamma, best_sigma = nll_final, gamma, sigma
    return SpectrumEstimate(gamma=best_gamma, sigma=best_sigma,
                            iterations_used=len(records), trace=tuple(records),
                            sigma_floor=floor, converged=converged)


def reconstruct_channel(estimate: SpectrumEstimate, dict_: EffectiveDictionary,
                        full_dictionary: SteeringDictionary, snapshots) -> np.ndarray:
    """Conditional-mean channel from the fitted spectrum.

    ``h_hat = A diag(gamma) B^H R^-1 y_bar`` with ``y_bar`` the snapshot
    average and ``R`` rebuilt at the floored noise estimate, so the solve is
    always well posed.
    """
    y = np.atleast_2d(np.asarray(snapshots))
    y_bar = y.mean(axis=0)
    sigma = max(estimate.sigma, estimate.sigma_floor)
    b = dict_.atoms
    r = assemble_covariance(dict_, estimate.gamma, sigma)
    factor = _cholesky(r, context="channel reconstruction")
    x = sla.cho_solve((factor, True), y_bar)
    coeffs = estimate.gamma * (b.conj().T @ x)
    return full_dictionary.atoms @ coeffs


def write_trace(estimate: SpectrumEstimate, path) -> None:
    """Dump the trace, one tab-separated line per iteration:
    iteration, sigma, max relative gamma change, negative log likelihood."""
    with open(path, "w") as fh:
        for rec in estimate.trace:
            fh.write(f"{rec.iteration}\t{rec.sigma:.12g}\t{rec.max_rel_change:.12g}"
                     f"\t{rec.nll:.12g}\n")


def _cholesky(r: np.ndarray, context: str) -> np.ndarray:
    r = np.asarray(r)
    if not np.isfinite(r).all():
        raise NumericalError(f"non-finite covariance entries ({context})")
    try:
        return np.linalg.cholesky(r)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"covariance not positive definite ({context})") from exc


def _nll_from_factor(factor: np.ndarray, y: np.ndarray) -> float:
    logdet = 2.0 * float(np.sum(np.log(np.diag(factor).real)))
    z = sla.solve_triangular(factor, y.T, lower=True)
    quad = float(np.sum(np.abs(z) ** 2))
    return y.shape[0] * logdet + quad


def _resolve_sigma_floor(config: EstimatorConfig, r_k: np.ndarray) -> float:
    if config.sigma_floor is not None:
        return config.sigma_floor
    dim = r_k.shape[0]
    scale = float(np.trace(r_k).real) / dim
    return 1e-12 * scale if scale > 0 else 1e-12


def _update_from_factor(b, factor, r_k, gamma, sigma, config, floor,
                        iteration: int | None = None):
    km = b.shape[0]
    rinv = sla.cho_solve((factor, True), np.eye(km, dtype=complex))
    f = rinv @ b
    denom = np.einsum("ij,ij->j", b.conj(), f).real  # b^H R^-1 b
    num = np.einsum("ij,ij->j", f.conj(), r_k @ f).real  # b^H R^-1 R_K R^-1 b
    tr_rinv = float(np.trace(rinv).real)
    tr_rinv2 = float(np.vdot(rinv, rinv).real)  # tr(R^-2), rinv Hermitian
    tr_ups = float(np.vdot(rinv, rinv @ r_k).real)  # tr(R^-1 R_K R^-1)

    if config.update_rule == "additive":
        gamma_new = np.maximum(0.0, num / denom ** 2 + gamma - 1.0 / denom)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma_new = num / denom ** (2.0 * config.rho) * gamma ** (2.0 * (1.0 - config.rho))
        gamma_new = np.maximum(0.0, gamma_new)
    sigma_new = max(floor, (tr_ups + sigma * tr_rinv2 - tr_rinv) / tr_rinv2)

    if not (np.isfinite(gamma_new).all() and np.isfinite(sigma_new)):
        where = f" at iteration {iteration}" if iteration is not None else ""
        raise NumericalError(f"non-finite estimator update{where}")
    return gamma_new, float(sigma_new)
