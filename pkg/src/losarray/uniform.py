"""Classical optimum uniform linear arrays for a single design distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

from losarray.geometry import ArrayLayout, Geometry, GridSpec, generate_grid

__all__ = ["UlaDesign", "ula_spacing", "build_ula", "design_ula"]


@dataclass(frozen=True)
class UlaDesign:
    spacing: float
    n_antennas: int
    design_distance: float
    wavelength: float

    @property
    def aperture(self) -> float:
        return (self.n_antennas - 1) * self.spacing


def ula_spacing(
    wavelength: float,
    design_distance: float,
    n_max: int,
    symmetric: bool = True,
    fixed_other_spacing: float | None = None,
) -> float:
    """Element spacing so that ``d_t * d_r = lambda * D* / max(N, M)``.

    With ``symmetric`` both arrays share the spacing ``sqrt(lambda D* / n_max)``;
    otherwise the spacing complementary to ``fixed_other_spacing`` is returned.
    """
    if wavelength <= 0 or design_distance <= 0 or n_max < 1:
        raise ValueError("wavelength, design distance and n_max must be positive")
    product = wavelength * design_distance / n_max
    if symmetric:
        return math.sqrt(product)
    if fixed_other_spacing is None:
        raise ValueError("fixed_other_spacing is required for an asymmetric design")
    if fixed_other_spacing <= 0:
        raise ValueError("fixed_other_spacing must be positive")
    return product / fixed_other_spacing


def build_ula(n_antennas: int, spacing: float, center=(0.0, 0.0, 0.0), label: str = "ula") -> ArrayLayout:
    """Equispaced line of ``n_antennas`` elements along x, centered at ``center``."""
    spec = GridSpec(Geometry.LINEAR, (n_antennas,), (spacing,), center=tuple(center), label=label)
    return generate_grid(spec)


def design_ula(wavelength: float, design_distance: float, n_antennas: int, n_max: int | None = None) -> UlaDesign:
    n_max = n_antennas if n_max is None else n_max
    return UlaDesign(ula_spacing(wavelength, design_distance, n_max), n_antennas, design_distance, wavelength)
