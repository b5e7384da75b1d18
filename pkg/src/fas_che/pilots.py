"""Noisy pilot observations through a port-switching schedule.

One snapshot is a full stacked sweep: the ``K*M`` measurements collected by
applying every slot of the schedule to the (frozen) channel, plus circular
complex Gaussian noise.  ``sweep_count`` independent snapshots share one
schedule and one channel.
"""

from dataclasses import dataclass

import numpy as np

from .schedule import StackedSelector


@dataclass(frozen=True)
class PilotObservation:
    """A batch of stacked pilot sweeps and the noise level that produced them."""

    snapshots: np.ndarray  # (T, K*M) complex
    selector: StackedSelector
    noise_variance: float  # per complex sample
    sweep_count: int


def synthesize_observation(h: np.ndarray, selector: StackedSelector,
                           sigma: float, sweep_count: int = 1,
                           rng: np.random.Generator | None = None) -> PilotObservation:
    """Observe ``selector.apply(h)`` under white complex Gaussian noise.

    ``sigma`` is the noise variance per complex sample, split evenly between
    the real and imaginary parts.  ``sigma == 0`` returns the exact coordinate
    selections.  The unit pilot symbol is absorbed into ``h``.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sweep_count < 1:
        raise ValueError(f"sweep_count must be >= 1, got {sweep_count}")
    if rng is None and sigma > 0:
        raise ValueError("a seeded rng is required when sigma > 0")
    clean = selector.apply(np.asarray(h))
    km = clean.shape[0]
    if rng is not None:
        noise = np.sqrt(sigma / 2.0) * (rng.standard_normal((sweep_count, km))
                                        + 1j * rng.standard_normal((sweep_count, km)))
    else:
        noise = np.zeros((sweep_count, km), dtype=complex)
    snapshots = clean[None, :] + noise
    return PilotObservation(snapshots=snapshots, selector=selector,
                            noise_variance=float(sigma), sweep_count=sweep_count)


def sigma_for_snr(h, snr_db: float) -> float:
    """Noise variance hitting a target SNR for a channel or channel ensemble.

    The SNR convention is average per-port channel power over noise variance,
    so ``sigma = mean(||h||^2 / N) / 10^(snr_db / 10)``.  ``h`` may be a single
    vector, a stack of vectors (one per row), or ``None`` to use the clustered
    channel model normalization ``E[||h||^2 / N] = 1``.
    """
    if h is None:
        power = 1.0
    else:
        arr = np.atleast_2d(np.asarray(h))
        power = float(np.mean(np.sum(np.abs(arr) ** 2, axis=1) / arr.shape[1]))
        if power == 0:
            raise ValueError("channel power is zero, SNR undefined")
    return power * 10.0 ** (-snr_db / 10.0)
