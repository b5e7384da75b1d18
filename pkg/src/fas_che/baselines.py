"""Reference estimators: per-port least squares and orthogonal matching pursuit."""

import warnings
from dataclasses import dataclass

import numpy as np

from .model import SteeringDictionary
from .pilots import PilotObservation
from .samv import EffectiveDictionary
from .schedule import SwitchSchedule

INTERPOLATION_KINDS = ("linear-by-port-index", "nearest")


@dataclass(frozen=True)
class BaselineConfig:
    """Settings for the reference estimators."""

    omp_max_atoms: int = 1
    omp_residual_tol: float = 1e-9
    interpolation: str = "linear-by-port-index"

    def __post_init__(self):
        if self.omp_max_atoms < 1:
            raise ValueError(f"omp_max_atoms must be >= 1, got {self.omp_max_atoms}")
        if self.omp_residual_tol <= 0:
            raise ValueError(f"omp_residual_tol must be positive, got {self.omp_residual_tol}")
        if self.interpolation not in INTERPOLATION_KINDS:
            raise ValueError(
                f"interpolation must be one of {INTERPOLATION_KINDS}, got {self.interpolation!r}")


def ls_estimate(obs: PilotObservation, schedule: SwitchSchedule,
                config: BaselineConfig) -> np.ndarray:
    """Average each observed port, then interpolate the unobserved ones.

    Averaging all measurements of a port across slots and sweeps is the least
    squares solution under a selection operator.  Real and imaginary parts are
    interpolated separately over the port index, with constant extrapolation
    beyond the first and last observed ports.
    """
    ports = obs.selector.port_indices
    if ports.size == 0:
        raise ValueError("no ports observed")
    n = schedule.n_ports
    totals = np.zeros(n, dtype=complex)
    np.add.at(totals, ports, obs.snapshots.sum(axis=0))
    counts = obs.snapshots.shape[0] * np.bincount(ports, minlength=n)
    observed = np.nonzero(counts > 0)[0]
    values = totals[observed] / counts[observed]
    all_ports = np.arange(n)
    if config.interpolation == "linear-by-port-index":
        est = (np.interp(all_ports, observed, values.real)
               + 1j * np.interp(all_ports, observed, values.imag))
    else:
        nearest = np.abs(all_ports[:, None] - observed[None, :]).argmin(axis=1)
        est = values[nearest]
    est[observed] = values
    return est


def omp_estimate(obs: PilotObservation, effective_dict: EffectiveDictionary,
                 full_dict: SteeringDictionary, config: BaselineConfig) -> np.ndarray:
    """Greedy pursuit of the averaged sweep over the effective atoms.

    Repeatedly pick the atom most correlated with the residual, re-solve the
    least squares fit on the selected set, and stop once ``omp_max_atoms``
    atoms are active or the residual drops below
    ``omp_residual_tol * ||y_bar||``.  The sparse coefficients are then lifted
    through the full dictionary to all ports.
    """
    b = effective_dict.atoms
    if b.shape[1] == 0:
        raise ValueError("effective dictionary is empty")
    y_bar = obs.snapshots.mean(axis=0)
    y_norm = np.linalg.norm(y_bar)
    coeffs = np.zeros(b.shape[1], dtype=complex)
    if y_norm == 0:
        return full_dict.atoms @ coeffs
    selected: list[int] = []
    residual = y_bar.copy()
    solution = np.zeros(0, dtype=complex)
    while len(selected) < config.omp_max_atoms:
        if np.linalg.norm(residual) <= config.omp_residual_tol * y_norm:
            break
        correlations = np.abs(b.conj().T @ residual)
        correlations[selected] = -np.inf
        atom = int(np.argmax(correlations))
        candidate = selected + [atom]
        subset = b[:, candidate]
        fit, _, rank, _ = np.linalg.lstsq(subset, y_bar, rcond=None)
        if rank < len(candidate):
            warnings.warn("pursuit stopped early: selected atoms became rank deficient")
            break
        selected = candidate
        solution = fit
        residual = y_bar - subset @ fit
    coeffs[selected] = solution
    return full_dict.atoms @ coeffs
