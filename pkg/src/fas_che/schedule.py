"""Switch schedules: which ports the RF chains occupy in each pilot slot.

A slot is described by a binary switch matrix ``S_k`` of shape ``(M, N)``:
row ``m`` has a single 1 marking the port driven by chain ``m``, and no port
is taken by two chains at once.  Stacking the ``K`` slot matrices vertically
gives the ``(K*M, N)`` selection operator applied to the channel vector.

Port indices are 0-based throughout the API; the plain-text serialization and
violation messages use 1-based indices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .model import ArrayGeometry

SCHEDULE_KINDS = ("sequential", "random")


@dataclass(frozen=True)
class SwitchSchedule:
    """Per-slot switch matrices plus the selected port index sets."""

    n_ports: int
    n_chains: int
    n_slots: int
    slots: tuple  # K matrices, each (M, N) float {0, 1}
    selected_ports: tuple  # K int arrays, each (M,), 0-based, chain order


@dataclass(frozen=True)
class StackedSelector:
    """Vertical stack of the slot matrices; picks K*M coordinates of h."""

    matrix: np.ndarray  # (K*M, N) float {0, 1}
    port_indices: np.ndarray  # (K*M,) int, row r selects h[port_indices[r]]

    def apply(self, h: np.ndarray) -> np.ndarray:
        """Exact coordinate selection, equivalent to ``matrix @ h``."""
        return np.asarray(h)[self.port_indices]


@dataclass(frozen=True)
class SwitchValidation:
    """Outcome of :func:`validate_switch_matrix`; falsy when any rule failed."""

    ok: bool
    violations: tuple = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def min_index_gap(geometry: ArrayGeometry) -> float:
    """Index separation equivalent to half-wavelength physical spacing.

    Consecutive selected ports ``p < q`` satisfy ``(q - p) * d >= lambda/2``
    exactly when ``q - p >= (N - 1) / (2 W)``.
    """
    return (geometry.n_ports - 1) / (2.0 * geometry.region_size_wavelengths)


def validate_switch_matrix(s_k: np.ndarray, geometry: ArrayGeometry,
                           enforce_spacing: bool = False) -> SwitchValidation:
    """Check one slot matrix against the selection rules.

    Rules: one selected port per row (one per RF chain), at most one chain per
    port, and optionally a minimum physical spacing of half a wavelength
    between consecutive selected ports.  Returns a report naming each failed
    rule; it does not raise on rule violations.
    """
    s_k = np.asarray(s_k)
    if not np.isin(s_k, (0, 1)).all():
        raise ValueError("switch matrix entries must be 0 or 1")
    m, n = s_k.shape
    if n != geometry.n_ports:
        raise ValueError(f"switch matrix has {n} columns, geometry has {geometry.n_ports} ports")
    violations = []
    row_sums = s_k.sum(axis=1)
    for r in np.nonzero(row_sums != 1)[0]:
        violations.append(
            f"single-port-per-chain: row {r + 1} selects {int(row_sums[r])} ports (expected 1)")
    col_sums = s_k.sum(axis=0)
    for c in np.nonzero(col_sums > 1)[0]:
        violations.append(
            f"one-chain-per-port: port {c + 1} selected by {int(col_sums[c])} chains")
    if enforce_spacing:
        ports = np.sort(np.nonzero(s_k.any(axis=0))[0])
        gaps = np.diff(ports)
        required = min_index_gap(geometry)
        for i in np.nonzero(gaps < required)[0]:
            violations.append(
                "half-wavelength-spacing: ports "
                f"{ports[i] + 1} and {ports[i + 1] + 1} are {int(gaps[i])} indices apart "
                f"(need >= {required:g})")
    return SwitchValidation(ok=not violations, violations=tuple(violations))


def sequential_schedule(n_ports: int, n_chains: int, n_slots: int) -> SwitchSchedule:
    """Deterministic sweep: slot k takes the next ``n_chains`` ports in order.

    When ``n_slots * n_chains`` exceeds ``n_ports`` the sweep wraps around and
    revisits ports from the start.
    """
    if n_chains > n_ports:
        raise ConfigurationError(
            f"n_chains ({n_chains}) cannot exceed n_ports ({n_ports})")
    if n_slots < 1:
        raise ConfigurationError(f"n_slots must be >= 1, got {n_slots}")
    slot_ports = [(k * n_chains + np.arange(n_chains)) % n_ports
                  for k in range(n_slots)]
    return _schedule_from_ports(n_ports, n_chains, n_slots, slot_ports)


def random_schedule(n_ports: int, n_chains: int, n_slots: int,
                    enforce_spacing: bool = False,
                    geometry: ArrayGeometry | None = None,
                    rng: np.random.Generator | None = None) -> SwitchSchedule:
    """Each slot draws ``n_chains`` distinct ports uniformly at random.

    With ``enforce_spacing`` the draw is uniform over the port sets whose
    sorted consecutive indices are at least :func:`min_index_gap` apart, which
    requires ``geometry``.  Infeasible spacing demands raise before sampling.
    """
    if rng is None:
        raise ConfigurationError("random_schedule requires a seeded rng")
    if n_chains > n_ports:
        raise ConfigurationError(
            f"n_chains ({n_chains}) cannot exceed n_ports ({n_ports})")
    if n_slots < 1:
        raise ConfigurationError(f"n_slots must be >= 1, got {n_slots}")
    if enforce_spacing:
        if geometry is None:
            raise ConfigurationError("enforce_spacing requires a geometry")
        if geometry.n_ports != n_ports:
            raise ConfigurationError(
                f"geometry has {geometry.n_ports} ports, schedule asked for {n_ports}")
        gap = int(np.ceil(min_index_gap(geometry)))
        if n_chains * gap > n_ports:
            raise ConfigurationError(
                f"spacing demands {n_chains} ports with index gap >= {gap} "
                f"which does not fit in {n_ports} ports")
    else:
        gap = 1
    # Sorted draws with gap >= g map bijectively onto plain sorted draws from a
    # shrunken range: subtract (g - 1) per preceding selection.
    shrink = (n_chains - 1) * (gap - 1)
    slot_ports = []
    for _ in range(n_slots):
        base = np.sort(rng.choice(n_ports - shrink, size=n_chains, replace=False))
        slot_ports.append(base + np.arange(n_chains) * (gap - 1))
    return _schedule_from_ports(n_ports, n_chains, n_slots, slot_ports)


def stack(schedule: SwitchSchedule) -> StackedSelector:
    """Stack the slot matrices into the full selection operator."""
    matrix = np.vstack(schedule.slots)
    port_indices = np.concatenate(schedule.selected_ports)
    return StackedSelector(matrix=matrix, port_indices=port_indices)


def schedule_to_text(schedule: SwitchSchedule) -> str:
    """One line per slot, selected ports comma-separated, 1-based."""
    return "\n".join(",".join(str(p + 1) for p in ports)
                     for ports in schedule.selected_ports) + "\n"


def schedule_from_text(text: str, n_ports: int) -> SwitchSchedule:
    """Rebuild a schedule from :func:`schedule_to_text` output."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ConfigurationError("schedule text contains no slots")
    slot_ports = []
    for line in lines:
        ports = np.array([int(tok) - 1 for tok in line.split(",")])
        if (ports < 0).any() or (ports >= n_ports).any():
            raise ConfigurationError(f"port index out of range in line {line!r}")
        slot_ports.append(ports)
    n_chains = len(slot_ports[0])
    if any(len(p) != n_chains for p in slot_ports):
        raise ConfigurationError("all slots must select the same number of ports")
    return _schedule_from_ports(n_ports, n_chains, len(slot_ports), slot_ports)


def _schedule_from_ports(n_ports, n_chains, n_slots, slot_ports):
    slots = []
    for ports in slot_ports:
        s_k = np.zeros((n_chains, n_ports))
        s_k[np.arange(n_chains), ports] = 1.0
        slots.append(s_k)
    return SwitchSchedule(n_ports=n_ports, n_chains=n_chains, n_slots=n_slots,
                          slots=tuple(slots),
                          selected_ports=tuple(np.asarray(p) for p in slot_ports))
