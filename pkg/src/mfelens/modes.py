"""Transverse eigenmodes of the bounded lens with Dirichlet boundary.

Under the stereographic map the Helmholtz problem in the lens becomes the
Laplace-Beltrami eigenproblem on a sphere of radius n0*R, so the modes are
spherical harmonics evaluated at cos(theta(r)) with eigenfrequencies
omega_l = c*sqrt(l(l+1))/(R*n0).  The mirror at r = R sits on the equator,
which selects the harmonics that vanish there: l + m odd.  Each degree l
therefore contributes exactly l admissible orders m = -(l-1), -(l-3), ..., l-1.

Modes are normalized against the dielectric weight, int n^2 |f|^2 d^2r = 1,
which on the sphere is ordinary orthonormality restricted to the upper
hemisphere; the resulting radial profile is sqrt(2)/(n0*R) times the
orthonormal spherical harmonic.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import legendre
from .errors import DomainError, EmptyBasisError, QuadratureError
from .geometry import LensGeometry, stereographic_cos_theta
from .units import C


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Degree/order label (l, m) of a single cavity mode."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 1:
            raise DomainError(f"mode degree must be >= 1, got l={self.l}")
        if abs(self.m) > self.l - 1 or (self.l + self.m) % 2 == 0:
            raise DomainError(
                f"order m={self.m} not admissible for l={self.l}: "
                "need |m| <= l-1 with l+m odd"
            )


def eigenfrequency(geom: LensGeometry, l):
    """Angular frequency c*sqrt(l(l+1))/(R*n0) of degree-l modes.

    Independent of the order m; strictly increasing in l.  Accepts arrays.
    """
    l_arr = np.asarray(l)
    if np.any(l_arr < 1):
        raise DomainError(f"mode degree must be >= 1, got {l}")
    value = C * np.sqrt(l_arr * (l_arr + 1.0)) / (geom.radius * geom.n0)
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class ModeBasis:
    """Ordered set of modes with their frequencies and normalization constants.

    Internally flat arrays sorted by (l, m) ascending; the arrays are never
    mutated after construction.
    """

    geometry: LensGeometry
    l: np.ndarray
    m: np.ndarray
    omega: np.ndarray
    _index: dict = field(repr=False, default=None)

    def __post_init__(self):
        for arr in (self.l, self.m, self.omega):
            arr.setflags(write=False)
        object.__setattr__(
            self,
            "_index",
            {(int(l), int(m)): i for i, (l, m) in enumerate(zip(self.l, self.m))},
        )

    def __len__(self):
        return self.l.size

    def __eq__(self, other):
        return (
            isinstance(other, ModeBasis)
            and self.geometry == other.geometry
            and np.array_equal(self.l, other.l)
            and np.array_equal(self.m, other.m)
        )

    def index_of(self, mode: ModeIndex) -> int:
        try:
            return self._index[(mode.l, mode.m)]
        except KeyError:
            raise DomainError(f"mode {mode} not in basis") from None

    @property
    def l_groups(self) -> np.ndarray:
        """Distinct degrees present, ascending."""
        return np.unique(self.l)

    @property
    def norm_constants(self) -> np.ndarray:
        """N_lm such that the mode is N_lm * P_l^m(cos theta) * exp(i m phi).

        Computed in log space; extreme (l, |m|) combinations underflow to 0
        (their unnormalized P_l^m overflows correspondingly; evaluation never
        forms the two factors separately).
        """
        l, m = self.l.astype(float), self.m.astype(float)
        log_n = 0.5 * (
            np.log(2.0 * l + 1.0)
            + gammaln(l - m + 1.0)
            - gammaln(l + m + 1.0)
            - np.log(2.0 * np.pi)
        )
        return np.exp(log_n) / (self.geometry.n0 * self.geometry.radius)

    def restrict_nearest(self, omega_center: float, max_modes: int) -> "ModeBasis":
        """Sub-basis of whole degenerate groups nearest omega_center.

        Groups are admitted in order of |omega_l - omega_center| until adding
        the next whole group would exceed ``max_modes``.
        """
        groups = self.l_groups
        order = np.argsort(np.abs(eigenfrequency(self.geometry, groups) - omega_center), kind="stable")
        keep, total = [], 0
        for l in groups[order]:
            if total + l > max_modes:
                break
            keep.append(l)
            total += int(l)
        if not keep:
            raise EmptyBasisError(
                f"max_modes={max_modes} below the smallest group near {omega_center}"
            )
        mask = np.isin(self.l, keep)
        return ModeBasis(self.geometry, self.l[mask].copy(), self.m[mask].copy(), self.omega[mask].copy())


def enumerate_modes(geom: LensGeometry, omega_min: float, omega_max: float) -> ModeBasis:
    """All modes with omega_l in [omega_min, omega_max], sorted by (l, m).

    Raises EmptyBasisError if no degree falls inside the window.
    """
    if not (0.0 < omega_min < omega_max):
        raise DomainError(
            f"need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )
    # invert omega = sqrt(l(l+1))/(R n0), then fix up float edge cases
    y_lo = (omega_min * geom.radius * geom.n0 / C) ** 2
    y_hi = (omega_max * geom.radius * geom.n0 / C) ** 2
    l_lo = max(1, int(np.floor((-1.0 + np.sqrt(1.0 + 4.0 * y_lo)) / 2.0)))
    l_hi = int(np.ceil((-1.0 + np.sqrt(1.0 + 4.0 * y_hi)) / 2.0)) + 1
    while eigenfrequency(geom, l_lo) < omega_min:
        l_lo += 1
    while l_hi >= l_lo and eigenfrequency(geom, l_hi) > omega_max:
        l_hi -= 1
    if l_hi < l_lo:
        raise EmptyBasisError(
            f"no mode frequency inside [{omega_min}, {omega_max}]"
        )
    degrees = np.arange(l_lo, l_hi + 1)
    l_arr = np.repeat(degrees, degrees)
    offsets = np.concatenate([np.arange(l) for l in degrees])
    m_arr = 2 * offsets - (l_arr - 1)
    return ModeBasis(geom, l_arr, m_arr, eigenfrequency(geom, l_arr))


def _radial_factors(basis: ModeBasis, indices, u):
    """sqrt(2)/(n0 R) * sign(m) * Pbar_{l,|m|}(u) for the given basis rows.

    ``u`` may be an array of points; returns shape (len(indices), u.size).
    The sign (-1)^|m| for negative m extends Pbar to negative orders.
    """
    l = basis.l[indices]
    m = basis.m[indices]
    scale = np.sqrt(2.0) / (basis.geometry.n0 * basis.geometry.radius)
    out = np.empty((len(indices), np.atleast_1d(u).size))
    for mu in np.unique(np.abs(m)):
        rows = np.nonzero(np.abs(m) == mu)[0]
        order = np.argsort(l[rows], kind="stable")
        rows = rows[order]
        uniq_l, inverse = np.unique(l[rows], return_inverse=True)
        table = legendre.norm_legendre_select(uniq_l, int(mu), u)
        signs = np.where((m[rows] < 0) & (mu % 2 == 1), -1.0, 1.0)
        out[rows] = signs[:, None] * table[inverse]
    return scale * out


def mode_value(basis: ModeBasis, mode: ModeIndex, r, phi):
    """Complex mode amplitude f_lm(r, phi) inside the disk.

    Vanishes at r = R for every admissible mode (Dirichlet mirror) and at
    r = 0 for every m != 0.  Raises DomainError outside the disk or for a
    mode not in the basis.
    """
    i = basis.index_of(mode)
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    u = np.atleast_1d(stereographic_cos_theta(basis.geometry, r))
    radial = _radial_factors(basis, np.array([i]), u)[0]
    value = radial.reshape(r.shape) * np.exp(1j * mode.m * phi)
    return value if value.ndim else complex(value)


def mode_values(basis: ModeBasis, r: float, phi: float) -> np.ndarray:
    """All basis mode amplitudes at one point, as a length-L complex vector."""
    u = np.atleast_1d(stereographic_cos_theta(basis.geometry, r))
    radial = _radial_factors(basis, np.arange(len(basis)), u)[:, 0]
    return radial * np.exp(1j * basis.m * phi)


def field_sum(basis: ModeBasis, coefficients, r, phi) -> np.ndarray:
    """sum_i coefficients[i] * f_i(r, phi), vectorized over points.

    ``r`` and ``phi`` are same-shape arrays; memory stays O(points) by
    accumulating one Legendre recurrence per order.
    """
    coefficients = np.asarray(coefficients)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    u = stereographic_cos_theta(basis.geometry, r.ravel())
    phi_flat = phi.ravel()
    scale = np.sqrt(2.0) / (basis.geometry.n0 * basis.geometry.radius)
    total = np.zeros(u.size, dtype=complex)
    for mu in np.unique(np.abs(basis.m)):
        pos = np.nonzero(basis.m == mu)[0]
        neg = np.nonzero(basis.m == -mu)[0] if mu > 0 else []
        uniq_l = np.unique(basis.l[pos])
        weights = [np.zeros(uniq_l.size, dtype=complex)]
        lookup = {int(l): j for j, l in enumerate(uniq_l)}
        for i in pos:
            weights[0][lookup[int(basis.l[i])]] += coefficients[i]
        if mu > 0:
            weights.append(np.zeros(uniq_l.size, dtype=complex))
            sign = -1.0 if mu % 2 else 1.0
            for i in neg:
                weights[1][lookup[int(basis.l[i])]] += sign * coefficients[i]
        sums = legendre.norm_legendre_weighted_sums(np.array(weights), uniq_l, int(mu), u)
        total += sums[0] * np.exp(1j * mu * phi_flat)
        if mu > 0:
            total += sums[1] * np.exp(-1j * mu * phi_flat)
    return (scale * total).reshape(r.shape)


def mode_gram(basis: ModeBasis, tol: float = 1e-8) -> np.ndarray:
    """Dielectric-weighted overlap matrix of the basis, for validation.

    The angular integral is exact (modes with different m are orthogonal);
    the radial part reduces on the sphere to int_0^1 Pbar Pbar du, done by
    Gauss-Legendre of polynomial-exact order.  A node-doubled estimate guards
    the result: QuadratureError if the two differ by more than ``tol``.
    """
    if len(basis) == 0:
        raise EmptyBasisError("gram of an empty basis")
    l_max = int(basis.l.max())

    def compute(n_nodes):
        gram = np.zeros((len(basis), len(basis)))
        nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
        u = 0.5 * (nodes + 1.0)
        w = 0.5 * wts
        for mu in np.unique(np.abs(basis.m)):
            for m_signed in ({mu, -mu} if mu else {0}):
                rows = np.nonzero(basis.m == m_signed)[0]
                if rows.size == 0:
                    continue
                table = legendre.norm_legendre_select(basis.l[rows], int(mu), u)
                block = 4.0 * np.pi * (table * w) @ table.T
                gram[np.ix_(rows, rows)] = block
        return gram

    n = l_max + 4
    gram, check = compute(n), compute(2 * n)
    err = float(np.abs(gram - check).max())
    if err > tol:
        raise QuadratureError(
            f"gram quadrature estimate {err:.3e} exceeds tolerance {tol:.3e}"
        )
    return check
