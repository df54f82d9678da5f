"""Atom-mode coupling constants and the dense coupling block.

Each emitter k couples to mode (l, m) with strength

    g_l^(k) = g * sqrt(omega_l / (2 omega_a^3)) * F(omega_l) * f_lm(r_k, phi_k)

in natural units, where F is the Gaussian spectral cutoff (an engineering
knob: narrow F restricts the dynamics to modes near resonance).  The
off-diagonal block of the effective Hamiltonian is alpha[k, lm] = -i g_l^(k).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .geometry import LensGeometry, stereographic_cos_theta
from .modes import ModeBasis, ModeIndex, _radial_factors, enumerate_modes
from .units import OMEGA_A

# smallest admissible lower window edge: mode frequencies are positive
_OMEGA_FLOOR = 1e-9


@dataclass(frozen=True)
class EmitterSet:
    """Two-level emitters at polar positions (r[k], phi[k]) inside the lens.

    ``g`` is the bare coupling-strength parameter in units of omega_a; the
    per-mode couplings it produces are reduced by mode-specific factors.
    """

    r: np.ndarray
    phi: np.ndarray
    g: float

    def __post_init__(self):
        object.__setattr__(self, "r", np.atleast_1d(np.asarray(self.r, dtype=float)))
        object.__setattr__(self, "phi", np.atleast_1d(np.asarray(self.phi, dtype=float)))
        if self.r.size == 0:
            raise DomainError("emitter set must not be empty")
        if self.r.shape != self.phi.shape:
            raise DimensionMismatchError("emitter r and phi differ in length")
        self.r.setflags(write=False)
        self.phi.setflags(write=False)

    def __len__(self):
        return self.r.size

    def validate_inside(self, geom: LensGeometry):
        if np.any(self.r < 0) or np.any(self.r >= geom.radius):
            raise DomainError("emitters must satisfy 0 <= r < R")


@dataclass(frozen=True)
class CutoffSpec:
    """Gaussian spectral cutoff and mode-truncation rule.

    Modes enter the basis iff |omega_l - omega_a| <= truncation_sigmas * omega_c
    (and omega_l > 0).  ``drop_sqrt_omega`` replaces the sqrt(omega_l) field
    prefactor by sqrt(omega_a), so only F carries frequency dependence.
    """

    omega_c: float
    drop_sqrt_omega: bool = False
    truncation_sigmas: float = 3.0

    def __post_init__(self):
        if not self.omega_c > 0:
            raise DomainError(f"cutoff frequency must be positive, got {self.omega_c}")
        if not self.truncation_sigmas > 0:
            raise DomainError(
                f"truncation_sigmas must be positive, got {self.truncation_sigmas}"
            )

    def window(self) -> tuple[float, float]:
        """Frequency window implied by the truncation rule, floored above 0."""
        half = self.truncation_sigmas * self.omega_c
        return max(_OMEGA_FLOOR, OMEGA_A - half), OMEGA_A + half


def cutoff_value(spec: CutoffSpec, omega):
    """F(omega) = exp[-(omega - omega_a)^2 / (4 omega_c^2)].

    The square root of the Gaussian weight applied to the squared dipole
    moment, taken analytically by halving the exponent.
    """
    omega = np.asarray(omega, dtype=float)
    value = np.exp(-((omega - OMEGA_A) ** 2) / (4.0 * spec.omega_c**2))
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense atoms-by-modes block alpha[k, lm] = -i g_l^(k)."""

    alpha: np.ndarray
    basis: ModeBasis

    def __post_init__(self):
        if self.alpha.shape[1] != len(self.basis):
            raise DimensionMismatchError(
                f"alpha has {self.alpha.shape[1]} columns for {len(self.basis)} modes"
            )
        if not np.all(np.isfinite(self.alpha.view(float))):
            raise DomainError("coupling matrix contains non-finite entries")
        self.alpha.setflags(write=False)

    @property
    def n_atoms(self) -> int:
        return self.alpha.shape[0]


def _g_factors(es: EmitterSet, spec: CutoffSpec, basis: ModeBasis) -> np.ndarray:
    """Complex g_l^(k) for every atom/mode pair, shape (n_atoms, n_modes)."""
    sqrt_omega = np.sqrt(OMEGA_A if spec.drop_sqrt_omega else basis.omega)
    prefactor = es.g * sqrt_omega / np.sqrt(2.0 * OMEGA_A**3) * cutoff_value(spec, basis.omega)
    u = stereographic_cos_theta(basis.geometry, es.r)
    radial = _radial_factors(basis, np.arange(len(basis)), u)  # (modes, atoms)
    phases = np.exp(1j * np.outer(es.phi, basis.m))
    return prefactor[None, :] * radial.T * phases


def coupling_constant(
    es: EmitterSet, spec: CutoffSpec, basis: ModeBasis, k: int, mode: ModeIndex
) -> complex:
    """Single coupling constant g_l^(k) for atom k and one mode."""
    if not 0 <= k < len(es):
        raise DomainError(f"atom index {k} out of range")
    i = basis.index_of(mode)
    single = EmitterSet(es.r[k : k + 1], es.phi[k : k + 1], es.g)
    sub = ModeBasis(
        basis.geometry,
        basis.l[i : i + 1].copy(),
        basis.m[i : i + 1].copy(),
        basis.omega[i : i + 1].copy(),
    )
    return complex(_g_factors(single, spec, sub)[0, 0])


def build_coupling_matrix(
    es: EmitterSet, spec: CutoffSpec, basis: ModeBasis, window=None
) -> CouplingMatrix:
    """Assemble alpha = -i g for all atoms and modes of the basis.

    The basis must lie inside the truncation window, by default the one
    implied by ``spec`` (build the basis with ``basis_for``); a wider basis
    is rejected to prevent silent spectrum mismatches.  Passing ``window``
    explicitly decouples the truncation from the cutoff width, which is how
    a frozen mode window is scanned over cutoff candidates.
    """
    es.validate_inside(basis.geometry)
    lo, hi = spec.window() if window is None else window
    if np.any(basis.omega < lo - 1e-12) or np.any(basis.omega > hi + 1e-12):
        raise DimensionMismatchError(
            "basis contains modes outside the cutoff truncation window"
        )
    return CouplingMatrix(-1j * _g_factors(es, spec, basis), basis)


def basis_for(geom: LensGeometry, spec: CutoffSpec) -> ModeBasis:
    """Enumerate the mode basis selected by the truncation rule of ``spec``."""
    lo, hi = spec.window()
    return enumerate_modes(geom, lo, hi)
