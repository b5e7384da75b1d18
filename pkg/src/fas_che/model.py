"""Array geometry, steering dictionaries, and sparse clustered channel draws.

The fluid antenna is a linear aperture of ``n_ports`` candidate positions
spread over ``region_size_wavelengths`` carrier wavelengths.  A far-field
plane wave arriving from angle ``theta`` (measured against the array axis,
``0 <= theta <= pi``) produces the unit-norm phase profile returned by
:func:`steering_vector`.  Channels are superpositions of such profiles drawn
from a clustered ray model.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

GRID_KINDS = ("uniform-angle", "uniform-cosine")


@dataclass(frozen=True)
class ArrayGeometry:
    """Linear port layout: ``n_ports`` positions over a ``W``-wavelength region.

    Port spacing is derived, never stored, so ``d = W / (N - 1)`` holds to
    machine precision by construction.
    """

    n_ports: int
    region_size_wavelengths: float

    def __post_init__(self):
        if self.n_ports < 2:
            raise ConfigurationError(f"n_ports must be >= 2, got {self.n_ports}")
        if self.region_size_wavelengths <= 0:
            raise ConfigurationError(
                f"region_size_wavelengths must be positive, got {self.region_size_wavelengths}"
            )

    @property
    def port_spacing_wavelengths(self) -> float:
        return self.region_size_wavelengths / (self.n_ports - 1)


@dataclass(frozen=True)
class SteeringDictionary:
    """Steering vectors sampled on an angular grid, one unit-norm column per angle."""

    geometry: ArrayGeometry
    grid_angles: np.ndarray  # (G,) radians, strictly increasing
    atoms: np.ndarray  # (N, G) complex, column g = steering_vector(grid_angles[g])

    @property
    def grid_size(self) -> int:
        return self.atoms.shape[1]


@dataclass(frozen=True)
class ChannelRealization:
    """A port-domain channel plus the gain/angle pairs that generated it."""

    h: np.ndarray  # (N,) complex
    path_gains: np.ndarray  # (n_clusters * rays_per_cluster,) complex
    path_angles: np.ndarray  # (n_clusters * rays_per_cluster,) radians
    n_clusters: int
    rays_per_cluster: int
    geometry: ArrayGeometry

    @property
    def paths(self):
        """Gain/angle pairs, one per ray."""
        return list(zip(self.path_gains, self.path_angles))

    def resynthesize(self) -> np.ndarray:
        """Rebuild ``h`` from the stored paths (consistency check helper)."""
        return _synthesize(self.path_gains, self.path_angles, self.geometry,
                           self.n_clusters, self.rays_per_cluster)


def steering_vector(theta: float, geometry: ArrayGeometry) -> np.ndarray:
    """Unit-norm steering vector for arrival angle ``theta`` in ``[0, pi]``.

    Entry ``k`` is ``exp(-1j * 2*pi * d * k * cos(theta)) / sqrt(N)`` with the
    port spacing ``d`` in wavelengths.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    n = geometry.n_ports
    k = np.arange(n)
    phase = -2j * np.pi * geometry.port_spacing_wavelengths * np.cos(theta) * k
    return np.exp(phase) / np.sqrt(n)


def build_dictionary(geometry: ArrayGeometry, grid_size: int,
                     grid_kind: str = "uniform-cosine") -> SteeringDictionary:
    """Sample the steering manifold on a ``grid_size``-point angular grid.

    ``uniform-angle`` spaces the angles evenly on ``[0, pi]``;
    ``uniform-cosine`` spaces their cosines evenly on ``[-1, 1]`` (uniform in
    spatial frequency).  Angles are returned strictly increasing.
    """
    if grid_size < 2:
        raise ConfigurationError(f"grid_size must be >= 2, got {grid_size}")
    if grid_kind not in GRID_KINDS:
        raise ConfigurationError(
            f"grid_kind must be one of {GRID_KINDS}, got {grid_kind!r}")
    if grid_kind == "uniform-angle":
        angles = np.linspace(0.0, np.pi, grid_size)
    else:
        # cosines run 1 -> -1 so the angles come out increasing
        angles = np.arccos(np.linspace(1.0, -1.0, grid_size))
    atoms = _steering_matrix(angles, geometry)
    return SteeringDictionary(geometry=geometry, grid_angles=angles, atoms=atoms)


def sample_ssc_channel(geometry: ArrayGeometry, n_clusters: int,
                       rays_per_cluster: int, angle_spread: float,
                       rng: np.random.Generator) -> ChannelRealization:
    """Draw one spatially sparse clustered channel.

    Cluster centers are uniform on ``[0, pi]``; each ray deviates from its
    center by a zero-mean Gaussian offset with standard deviation
    ``angle_spread`` (radians), clipped back to ``[0, pi]``.  Ray gains are
    i.i.d. circular complex Gaussian with unit variance, and the synthesis
    carries a ``sqrt(N / (n_clusters * rays_per_cluster))`` prefactor so that
    ``E[||h||^2] = N``.

    Draw order (centers, offsets, gains) is fixed so a seeded ``rng`` gives
    reproducible channels.
    """
    if n_clusters < 1 or rays_per_cluster < 1:
        raise ConfigurationError("n_clusters and rays_per_cluster must be >= 1")
    if angle_spread < 0:
        raise ConfigurationError(f"angle_spread must be >= 0, got {angle_spread}")
    centers = rng.uniform(0.0, np.pi, size=n_clusters)
    offsets = rng.normal(0.0, angle_spread, size=(n_clusters, rays_per_cluster))
    angles = np.clip(centers[:, None] + offsets, 0.0, np.pi).ravel()
    n_paths = n_clusters * rays_per_cluster
    gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2.0)
    h = _synthesize(gains, angles, geometry, n_clusters, rays_per_cluster)
    return ChannelRealization(h=h, path_gains=gains, path_angles=angles,
                              n_clusters=n_clusters, rays_per_cluster=rays_per_cluster,
                              geometry=geometry)


def _steering_matrix(angles: np.ndarray, geometry: ArrayGeometry) -> np.ndarray:
    """Steering vectors for several angles at once, one per column."""
    n = geometry.n_ports
    k = np.arange(n)[:, None]
    phase = -2j * np.pi * geometry.port_spacing_wavelengths * np.cos(np.asarray(angles))[None, :] * k
    return np.exp(phase) / np.sqrt(n)


def _synthesize(gains, angles, geometry, n_clusters, rays_per_cluster):
    prefactor = np.sqrt(geometry.n_ports / (n_clusters * rays_per_cluster))
    return prefactor * (_steering_matrix(angles, geometry) @ np.asarray(gains))
