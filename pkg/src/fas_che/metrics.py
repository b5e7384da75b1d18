"""Estimation-quality metrics: NMSE, QPSK bit error rate, selected-port capacity.

BER and capacity follow the single-port selection use of the estimate: data
goes over the one port whose estimated gain is largest, so an estimation
error costs either a wrong port pick or a wrong equalizer coefficient.  The
SNR convention matches the pilot simulation: noise variance
``10^(-snr_db/10)`` against unit average per-port channel power.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrialRecord:
    """Metrics of one Monte-Carlo trial, one CSV row."""

    estimator: str
    snr_db: float
    trial: int
    nmse: float
    ber: float
    capacity_bits: float
    iterations: int
    elapsed_ms: float
    seed: int


def nmse(h_hat, h) -> float:
    """Normalized mean square error ``||h_hat - h||^2 / ||h||^2``."""
    h_hat = np.asarray(h_hat)
    h = np.asarray(h)
    if h_hat.shape != h.shape:
        raise ValueError(f"shape mismatch: {h_hat.shape} vs {h.shape}")
    ref = float(np.sum(np.abs(h) ** 2))
    if ref == 0:
        raise ValueError("reference channel has zero norm")
    return float(np.sum(np.abs(h_hat - h) ** 2)) / ref


def select_port(h_hat) -> int:
    """Port with the largest estimated gain magnitude (ties to the lowest index)."""
    return int(np.argmax(np.abs(np.asarray(h_hat))))


def ber_qpsk(h_hat, h, snr_db: float, n_symbols: int,
             rng: np.random.Generator) -> float:
    """Monte-Carlo Gray-QPSK bit error rate over the selected port.

    Symbols pass through the true gain at the port picked from ``h_hat`` and
    are equalized with the estimated coefficient; the return value is the
    fraction of wrong bits out of ``2 * n_symbols``.
    """
    if n_symbols < 1:
        raise ValueError(f"n_symbols must be >= 1, got {n_symbols}")
    port = select_port(h_hat)
    gain = np.asarray(h)[port]
    coeff = np.asarray(h_hat)[port]
    sigma = 10.0 ** (-snr_db / 10.0)
    bits = rng.integers(0, 2, size=(n_symbols, 2))
    symbols = ((1 - 2 * bits[:, 0]) + 1j * (1 - 2 * bits[:, 1])) / np.sqrt(2.0)
    noise = np.sqrt(sigma / 2.0) * (rng.standard_normal(n_symbols)
                                    + 1j * rng.standard_normal(n_symbols))
    received = gain * symbols + noise
    # a zero estimated coefficient (degenerate estimate) makes every symbol
    # undecodable; NaN comparisons below then decode everything as (0, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        equalized = received / coeff
    errors = int(np.sum(bits[:, 0] != (equalized.real < 0)))
    errors += int(np.sum(bits[:, 1] != (equalized.imag < 0)))
    return errors / (2.0 * n_symbols)


def capacity(h_hat, h, snr_db: float) -> float:
    """Shannon rate of the selected port, ``log2(1 + snr * |h[n*]|^2)`` bits."""
    h_hat = np.asarray(h_hat)
    h = np.asarray(h)
    if h_hat.shape != h.shape:
        raise ValueError(f"shape mismatch: {h_hat.shape} vs {h.shape}")
    port = select_port(h_hat)
    snr_linear = 10.0 ** (snr_db / 10.0)
    return float(np.log2(1.0 + snr_linear * np.abs(h[port]) ** 2))
