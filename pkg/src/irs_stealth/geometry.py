"""Array responses for ULA/UPA apertures and the IRS/EWAM surface split.

Element order is the Kronecker order ``kron(x_axis, z_axis)``: the z index
runs fastest.  The IRS occupies a contiguous block in the middle of that
linearised order with ``n_ewam / 2`` EWAM elements on either side.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InvalidDimensionError, LayoutError
from .validation import as_complex_vector, check_count, check_finite, check_positive


@dataclass(frozen=True)
class AnglePair:
    """Azimuth/elevation pair in radians."""

    azimuth: float
    elevation: float = 0.0

    def __post_init__(self):
        check_finite(self.azimuth, "azimuth")
        check_finite(self.elevation, "elevation")

    @classmethod
    def from_degrees(cls, azimuth_deg, elevation_deg=0.0):
        return cls(math.radians(azimuth_deg), math.radians(elevation_deg))


@dataclass(frozen=True)
class RadarArrayShape:
    m_x: int = 4
    m_z: int = 4
    spacing: float | None = None
    wavelength: float = 0.1

    def __post_init__(self):
        check_count(self.m_x, "m_x")
        check_count(self.m_z, "m_z")
        check_positive(self.wavelength, "wavelength")
        if self.spacing is not None:
            check_positive(self.spacing, "spacing")

    @property
    def n_rows(self):
        return self.m_x

    @property
    def n_cols(self):
        return self.m_z

    @property
    def size(self):
        return self.m_x * self.m_z

    @property
    def element_spacing(self):
        return self.wavelength / 2 if self.spacing is None else self.spacing


@dataclass(frozen=True)
class SurfaceLayout:
    """ES surface of ``n_x * n_z`` elements, ``n_irs`` of which are tunable.

    ``n_irs = 0`` is accepted so that "no IRS" grid points of a sweep can be
    evaluated with the same code path; ``n_ewam`` must be even.
    """

    n_x: int
    n_z: int
    n_irs: int
    spacing: float | None = None
    wavelength: float = 0.1

    def __post_init__(self):
        check_count(self.n_x, "n_x")
        check_count(self.n_z, "n_z")
        check_count(self.n_irs, "n_irs", minimum=0)
        check_positive(self.wavelength, "wavelength")
        if self.spacing is not None:
            check_positive(self.spacing, "spacing")
        total = self.n_x * self.n_z
        if self.n_irs > total:
            raise LayoutError(f"n_irs={self.n_irs} exceeds the {total} surface elements")
        if (total - self.n_irs) % 2:
            raise LayoutError(
                f"n_ewam={total - self.n_irs} is odd; EWAM elements must split evenly "
                "around the IRS block"
            )

    @classmethod
    def from_counts(cls, n_irs, n_ewam, spacing=None, wavelength=0.1):
        """Build a layout for ``n_irs + n_ewam`` elements on the most square grid."""
        total = check_count(n_irs, "n_irs", minimum=0) + check_count(n_ewam, "n_ewam", minimum=0)
        if total < 1:
            raise InvalidDimensionError("surface needs at least one element")
        n_x, n_z = square_factors(total)
        return cls(n_x, n_z, n_irs, spacing=spacing, wavelength=wavelength)

    @property
    def n_rows(self):
        return self.n_x

    @property
    def n_cols(self):
        return self.n_z

    @property
    def size(self):
        return self.n_x * self.n_z

    @property
    def n_ewam(self):
        return self.size - self.n_irs

    @property
    def element_spacing(self):
        return self.wavelength / 2 if self.spacing is None else self.spacing

    def irs_slice(self):
        start = self.n_ewam // 2
        return slice(start, start + self.n_irs)

    def ewam_mask(self):
        mask = np.ones(self.size, dtype=bool)
        mask[self.irs_slice()] = False
        return mask


def square_factors(n):
    """Return ``(n_x, n_z)`` with ``n_x * n_z == n`` and ``n_x <= n_z`` as close as possible."""
    n = check_count(n, "n")
    n_x = math.isqrt(n)
    while n % n_x:
        n_x -= 1
    return n_x, n // n_x


def steering_vector(phase_step, n):
    """Symmetric ULA steering vector.

    Entry ``k`` equals ``exp(1j * (k - (n - 1) / 2) * pi * phase_step)``.

    Parameters
    ----------
    phase_step : float
        Phase difference between adjacent elements, in units of pi.
    n : int
        Number of elements.
    """
    n = check_count(n, "n")
    phase_step = check_finite(phase_step, "phase_step")
    k = np.arange(n) - (n - 1) / 2
    return np.exp(1j * np.pi * phase_step * k)


def phase_steps(angles, aperture):
    """Per-axis phase steps ``(2 * spacing / wavelength) * cos(el) * (cos(az), sin(az))``."""
    scale = 2.0 * aperture.element_spacing / aperture.wavelength
    cos_el = math.cos(angles.elevation)
    return scale * cos_el * math.cos(angles.azimuth), scale * cos_el * math.sin(angles.azimuth)


def upa_response(angles, aperture):
    """UPA response as the Kronecker product of the x- and z-axis steering vectors.

    ``aperture`` is a :class:`SurfaceLayout` or :class:`RadarArrayShape`.
    """
    step_x, step_z = phase_steps(angles, aperture)
    return np.kron(steering_vector(step_x, aperture.n_rows), steering_vector(step_z, aperture.n_cols))


def decompose_response(a_es, layout):
    """Split the ES response into zero-padded IRS and EWAM parts that sum to ``a_es``."""
    a_es = as_complex_vector(a_es, "a_es", length=layout.size)
    irs = np.zeros_like(a_es)
    ewam = np.zeros_like(a_es)
    sl = layout.irs_slice()
    mask = layout.ewam_mask()
    irs[sl] = a_es[sl]
    ewam[mask] = a_es[mask]
    return irs, ewam


def surface_responses(angles, layout):
    """Compact ``(a_irs, a_ewam)`` responses with the padding zeros removed."""
    a_es = upa_response(angles, layout)
    return a_es[layout.irs_slice()].copy(), a_es[layout.ewam_mask()]
