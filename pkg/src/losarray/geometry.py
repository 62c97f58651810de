"""Antenna coordinate sets: candidate grids, actual arrays and their metrics.

Arrays live in planes orthogonal to the z-axis (boresight). Layouts are
stored as ``(n, 3)`` float arrays in meters; point order is deterministic so
that grid indices are reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ArrayLayout",
    "Geometry",
    "GridSpec",
    "GeometryError",
    "generate_grid",
    "aperture",
    "min_spacing",
    "check_spacing",
    "candidate_count",
    "in_plane_axes",
    "format_coordinates",
    "write_coordinates",
    "read_coordinates",
]


class GeometryError(ValueError):
    """Invalid grid specification or degenerate layout."""


class Geometry(str, enum.Enum):
    LINEAR = "linear"
    PLANAR = "planar"
    CIRCULAR = "circular"


@dataclass(frozen=True)
class ArrayLayout:
    """Ordered 3D antenna positions.

    Parameters
    ----------
    points : (n, 3) array_like
        Cartesian coordinates in meters, one row per antenna.
    label : str
        Free-form name used in reports.
    """

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1 and pts.size == 3:
            pts = pts.reshape(1, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise GeometryError(f"points must have shape (n, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise GeometryError("a layout needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("all coordinates must be finite")
        if pts.shape[0] > 1 and _pairwise_distances(pts)[np.triu_indices(len(pts), 1)].min() == 0.0:
            raise GeometryError("layout points must be distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def aperture(self) -> float:
        return aperture(self)

    def translated(self, offset) -> "ArrayLayout":
        return ArrayLayout(self.points + np.asarray(offset, dtype=float), self.label)

    def subset(self, indices) -> "ArrayLayout":
        idx = np.asarray(indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= len(self)):
            raise IndexError(f"indices out of range for a {len(self)}-point layout")
        return ArrayLayout(self.points[np.sort(idx)], self.label)


@dataclass(frozen=True)
class GridSpec:
    """Parameterization of a uniform candidate grid.

    ``counts`` and ``spacing`` are per dimension: one entry for linear and
    circular grids, two for planar ones. For circular grids ``spacing`` is the
    circle radius. ``normal`` is the plane normal and ``rotation`` rotates the
    in-plane axes about it (radians).
    """

    geometry: Geometry
    counts: tuple[int, ...]
    spacing: tuple[float, ...]
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: tuple[float, float, float] = (0.0, 0.0, 1.0)
    rotation: float = 0.0
    label: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        object.__setattr__(self, "counts", tuple(int(c) for c in np.atleast_1d(self.counts)))
        object.__setattr__(self, "spacing", tuple(float(s) for s in np.atleast_1d(self.spacing)))


def in_plane_axes(normal=(0.0, 0.0, 1.0), rotation: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal in-plane axes ``(u, v)`` for a plane with the given normal.

    For the default boresight normal and zero rotation, ``u`` is the x-axis and
    ``v`` the y-axis.
    """
    n = np.asarray(normal, dtype=float)
    norm = np.linalg.norm(n)
    if not np.isfinite(norm) or norm == 0:
        raise GeometryError("orientation normal must be a nonzero finite vector")
    n = n / norm
    # reference axis least aligned with the normal
    ref = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = ref - (ref @ n) * n
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    c, s = np.cos(rotation), np.sin(rotation)
    return c * u + s * v, -s * u + c * v


def generate_grid(spec: GridSpec) -> ArrayLayout:
    """Build the candidate layout described by ``spec``.

    Linear grids run along the first in-plane axis, planar grids are
    row-major lattices (first axis fastest), and circular grids place points
    at increasing angle starting on the first in-plane axis.
    """
    counts, spacing = spec.counts, spec.spacing
    if any(c < 1 for c in counts):
        raise GeometryError(f"counts must be >= 1, got {counts}")
    if any(not np.isfinite(s) or s <= 0 for s in spacing):
        raise GeometryError(f"spacing must be positive, got {spacing}")
    u, v = in_plane_axes(spec.normal, spec.rotation)
    center = np.asarray(spec.center, dtype=float)

    if spec.geometry is Geometry.LINEAR:
        if len(counts) != 1 or len(spacing) != 1:
            raise GeometryError("linear grids take a single count and spacing")
        offsets = (np.arange(counts[0]) - (counts[0] - 1) / 2.0) * spacing[0]
        pts = center + offsets[:, None] * u
    elif spec.geometry is Geometry.PLANAR:
        if len(counts) != 2:
            raise GeometryError("planar grids take two counts")
        sx, sy = (spacing * 2)[:2] if len(spacing) == 1 else spacing
        ox = (np.arange(counts[0]) - (counts[0] - 1) / 2.0) * sx
        oy = (np.arange(counts[1]) - (counts[1] - 1) / 2.0) * sy
        gy, gx = np.meshgrid(oy, ox, indexing="ij")
        pts = center + gx.reshape(-1, 1) * u + gy.reshape(-1, 1) * v
    else:
        if len(counts) != 1 or len(spacing) != 1:
            raise GeometryError("circular grids take a single count and a radius")
        n, radius = counts[0], spacing[0]
        if n == 1:
            pts = center[None, :]
        else:
            phi = 2.0 * np.pi * np.arange(n) / n
            pts = center + radius * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    return ArrayLayout(pts, spec.label)


def _pairwise_distances(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def aperture(layout: ArrayLayout) -> float:
    """Largest Euclidean distance between any two elements (0 for one point)."""
    pts = layout.points
    if len(pts) < 2:
        return 0.0
    return float(_pairwise_distances(pts).max())


def min_spacing(layout: ArrayLayout) -> float:
    """Smallest Euclidean distance between any two elements."""
    pts = layout.points
    if len(pts) < 2:
        raise GeometryError("minimum spacing is undefined for fewer than 2 points")
    d = _pairwise_distances(pts)
    return float(d[np.triu_indices(len(pts), 1)].min())


def check_spacing(layout: ArrayLayout, wavelength: float) -> bool:
    """True when every pair of elements is at least half a wavelength apart."""
    if len(layout) < 2:
        return True
    # 1e-12 relative slack: grids built at exactly lambda/2 must pass
    return min_spacing(layout) >= 0.5 * wavelength * (1 - 1e-12)


def candidate_count(n_antennas: int, eta: int) -> int:
    """Grid size when the grid pitch is ``1/eta`` of the uniform-array spacing."""
    if n_antennas < 2 or eta < 1:
        raise GeometryError(f"need N >= 2 and eta >= 1, got N={n_antennas}, eta={eta}")
    return eta * (n_antennas - 1) + 1


def format_coordinates(layout: ArrayLayout) -> str:
    return "".join(
        " ".join(_fmt9(c) for c in row) + "\n" for row in layout.points
    )


def _fmt9(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def write_coordinates(layout: ArrayLayout, path) -> None:
    """Write ``x y z`` lines (meters, 9 significant digits)."""
    from losarray.files import atomic_write_text

    atomic_write_text(Path(path), format_coordinates(layout))


def read_coordinates(path, label: str = "") -> ArrayLayout:
    data = np.loadtxt(path, ndmin=2)
    return ArrayLayout(data, label)
