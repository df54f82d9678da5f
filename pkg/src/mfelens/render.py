"""Field-intensity expectation on spatial grids and binary frame I/O.

In the single-excitation sector the normally ordered intensity <E- E+>
collapses to the coherent sum |sum_lm sqrt(omega_l/2) c_lm f_lm(r,phi)|^2,
a nonnegative scalar in natural units.

Frames use a Cartesian grid over the bounding square [-R, R]^2 with
cell-centered pixels; pixels outside the lens disk carry the sentinel
value -1.0 rather than a silent zero.  The binary format is fixed:

    magic  b"MFEF"
    u32    version (= 1)           little endian
    u32    grid_n
    f64    time
    f64    extent_halfwidth
    f64    clip_level              NaN when the frame is unclipped
    f64[grid_n * grid_n]           values, row-major (y rows, x columns)
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from .dynamics import WaveFunction
from .errors import DomainError
from .modes import ModeBasis, field_sum

OUTSIDE_SENTINEL = -1.0

_HEADER = struct.Struct("<4sIIddd")
_MAGIC = b"MFEF"
_VERSION = 1


@dataclass
class IntensityFrame:
    """One rendered intensity snapshot on the bounding-square grid."""

    time: float
    grid_n: int
    extent_halfwidth: float
    values: np.ndarray
    clip_level: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid_n, self.grid_n):
            raise DomainError(
                f"frame values must be {self.grid_n}x{self.grid_n}, got {self.values.shape}"
            )

    @property
    def inside_mask(self) -> np.ndarray:
        return self.values != OUTSIDE_SENTINEL

    def axis(self) -> np.ndarray:
        """Pixel-center coordinates shared by both axes."""
        half = self.extent_halfwidth
        step = 2.0 * half / self.grid_n
        return -half + step * (np.arange(self.grid_n) + 0.5)


def _photon_weights(psi: WaveFunction, basis: ModeBasis) -> np.ndarray:
    if psi.photonic.size != len(basis):
        raise DomainError(
            f"state has {psi.photonic.size} photonic amplitudes for {len(basis)} modes"
        )
    return np.sqrt(basis.omega / 2.0) * psi.photonic


def intensity_at(psi: WaveFunction, basis: ModeBasis, r, phi):
    """<E- E+> at one point (or arrays of points) inside the disk."""
    r = np.asarray(r, dtype=float)
    basis.geometry._check_inside(r)
    weights = _photon_weights(psi, basis)
    amplitude = field_sum(basis, weights, r, np.asarray(phi, dtype=float))
    out = np.abs(amplitude) ** 2
    return float(out[0]) if r.ndim == 0 else out.reshape(r.shape)


def photon_energy(psi: WaveFunction, basis: ModeBasis) -> float:
    """sum_l omega_l |c_l|^2 / 2, the mode-space value of the gridded intensity.

    By the n^2-weighted orthonormality of the basis this equals
    integral n^2(r) <E- E+> d^2r exactly; quadrature of a rendered frame
    against it is the standard consistency check.
    """
    w = _photon_weights(psi, basis)
    return float(np.vdot(w, w).real)


def render_frame(
    psi: WaveFunction, basis: ModeBasis, grid_n: int, clip: float | None = None
) -> IntensityFrame:
    """Sample the intensity on a grid_n x grid_n cell-centered grid.

    ``clip`` caps the stored values only; the cap is recorded in
    ``clip_level`` so raw and clipped frames are distinguishable.
    """
    if grid_n < 16:
        raise DomainError(f"grid_n must be at least 16, got {grid_n}")
    if clip is not None and clip < 0:
        raise DomainError("clip level must be nonnegative")
    radius = basis.geometry.radius
    x = -radius + 2.0 * radius / grid_n * (np.arange(grid_n) + 0.5)
    xx, yy = np.meshgrid(x, x)
    rr = np.hypot(xx, yy)
    inside = rr < radius
    values = np.full((grid_n, grid_n), OUTSIDE_SENTINEL)
    weights = _photon_weights(psi, basis)
    amplitude = field_sum(basis, weights, rr[inside], np.arctan2(yy, xx)[inside])
    values[inside] = np.abs(amplitude) ** 2
    if clip is not None:
        values[inside] = np.minimum(values[inside], clip)
    return IntensityFrame(psi.time, grid_n, radius, values, clip)


def frame_quadrature(frame: IntensityFrame, n0: float = 1.0) -> float:
    """integral n^2(r) I(r) d^2r over the disk by pixel-sum quadrature."""
    axis = frame.axis()
    xx, yy = np.meshgrid(axis, axis)
    rr2 = (xx**2 + yy**2) / frame.extent_halfwidth**2
    n2 = (2.0 * n0 / (1.0 + rr2)) ** 2
    pixel_area = (2.0 * frame.extent_halfwidth / frame.grid_n) ** 2
    mask = frame.inside_mask
    return float(np.sum(frame.values[mask] * n2[mask]) * pixel_area)


def write_frame(frame: IntensityFrame, path) -> None:
    clip = math.nan if frame.clip_level is None else float(frame.clip_level)
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                _MAGIC, _VERSION, frame.grid_n, frame.time, frame.extent_halfwidth, clip
            )
        )
        fh.write(np.ascontiguousarray(frame.values, dtype="<f8").tobytes())


def read_frame(path) -> IntensityFrame:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise DomainError(f"truncated frame header in {path}")
        magic, version, grid_n, time, extent, clip = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise DomainError(f"bad magic {magic!r} in {path}")
        if version != _VERSION:
            raise DomainError(f"unsupported frame version {version} in {path}")
        payload = fh.read(8 * grid_n * grid_n)
    if len(payload) != 8 * grid_n * grid_n:
        raise DomainError(f"truncated frame payload in {path}")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid_n, grid_n).copy()
    return IntensityFrame(time, grid_n, extent, values, None if math.isnan(clip) else clip)
