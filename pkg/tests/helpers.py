"""Shared builders and independent oracles for the test suite."""

import json

import numpy as np
from scipy.special import gammaln, lpmv

from mfelens import (
    CouplingMatrix,
    CutoffSpec,
    EmitterSet,
    LensGeometry,
    ModeBasis,
    assemble_hamiltonian,
    basis_for,
    build_coupling_matrix,
    eigenfrequency,
)
from mfelens.geometry import refractive_index
from mfelens.modes import ModeIndex, mode_value
from mfelens.units import LAMBDA_A

# transfer time T = pi n0 R / c for the R = 3 lambda_a lens
T_TRANSFER = 6.0 * np.pi**2


def read_summary(out_dir):
    """Summary JSON written by a CLI run."""
    with open(out_dir / "summary.json", encoding="utf-8") as fh:
        return json.load(fh)


def read_csv(path):
    """CSV with header row as a structured array keyed by column name."""
    return np.genfromtxt(path, delimiter=",", names=True)


def fig3_system(truncation_sigmas=4.0):
    """Geometry, basis, coupling and Hamiltonian of the narrowband preset."""
    geom = LensGeometry(radius=3 * LAMBDA_A)
    spec = CutoffSpec(omega_c=0.1, truncation_sigmas=truncation_sigmas)
    basis = basis_for(geom, spec)
    emitters = EmitterSet(
        r=np.full(2, 0.6 * geom.radius), phi=np.array([np.pi, 0.0]), g=0.5
    )
    coupling = build_coupling_matrix(emitters, spec, basis)
    return geom, basis, coupling, assemble_hamiltonian(emitters, coupling)


def synthetic_basis(geom, omega):
    """ModeBasis carrying arbitrary frequencies, for propagator tests."""
    n = len(omega)
    return ModeBasis(
        geometry=geom,
        l=np.arange(1, n + 1),
        m=np.zeros(n, dtype=int),
        omega=np.asarray(omega, dtype=float),
    )


def random_system(rng, n_atoms=2, n_modes=10, g_scale=0.1, spread=0.3):
    """Random emitters and complex coupling over clustered frequencies."""
    geom = LensGeometry(radius=3 * LAMBDA_A)
    omega = 1.0 + spread * (rng.uniform(size=n_modes) - 0.5)
    alpha = g_scale * (
        rng.normal(size=(n_atoms, n_modes)) + 1j * rng.normal(size=(n_atoms, n_modes))
    )
    coupling = CouplingMatrix(alpha=alpha, basis=synthetic_basis(geom, omega))
    emitters = EmitterSet(
        r=np.full(n_atoms, 0.5 * geom.radius),
        phi=np.linspace(0.0, np.pi, n_atoms),
        g=1.0,
    )
    return emitters, coupling


def random_arrowhead(rng, n_atoms=2, n_modes=10, g_scale=0.1, spread=0.3):
    """Random small arrowhead Hamiltonian with complex couplings."""
    emitters, coupling = random_system(rng, n_atoms, n_modes, g_scale, spread)
    return assemble_hamiltonian(emitters, coupling)


def norm_legendre_reference(l, mu, x):
    """Spherical-harmonic normalized P_l^mu via scipy, Condon-Shortley signs."""
    log_n = 0.5 * (
        np.log(2 * l + 1.0)
        + gammaln(l - mu + 1.0)
        - gammaln(l + mu + 1.0)
        - np.log(4.0 * np.pi)
    )
    return np.exp(log_n) * lpmv(mu, l, np.asarray(x, dtype=float))


def mode_value_reference(geom, l, m, r, phi):
    """f_lm evaluated through scipy instead of the package recurrences."""
    rho2 = (np.asarray(r, dtype=float) / geom.radius) ** 2
    cos_theta = (1.0 - rho2) / (1.0 + rho2)
    bar_p = norm_legendre_reference(l, abs(m), cos_theta)
    sign = (-1.0) ** abs(m) if m < 0 else 1.0
    scale = np.sqrt(2.0) / (geom.n0 * geom.radius)
    return scale * sign * bar_p * np.exp(1j * m * np.asarray(phi, dtype=float))


def helmholtz_residual(basis, l, m, n_r=4000):
    """Relative finite-difference residual of the scalar Helmholtz equation.

    The radial factor g of a true mode satisfies
    g'' + g'/r - m^2 g / r^2 + omega^2 n^2(r) g = 0; fourth-order central
    stencils keep the discretization error far below the tested tolerance.
    """
    geom = basis.geometry
    r = np.linspace(0.05 * geom.radius, 0.97 * geom.radius, n_r)
    h = r[1] - r[0]
    g = mode_value(basis, ModeIndex(l, m), r, 0.0).real
    g1 = (g[:-4] - 8 * g[1:-3] + 8 * g[3:-1] - g[4:]) / (12 * h)
    g2 = (-g[:-4] + 16 * g[1:-3] - 30 * g[2:-2] + 16 * g[3:-1] - g[4:]) / (12 * h * h)
    rc, gc = r[2:-2], g[2:-2]
    omega = eigenfrequency(geom, l)
    n2 = refractive_index(geom, rc) ** 2
    resid = g2 + g1 / rc - (m * m) / (rc * rc) * gc + omega * omega * n2 * gc
    return np.abs(resid).max() / np.abs(omega * omega * n2 * gc).max()


def admissible_orders(l):
    """All m with |m| <= l-1 and l+m odd, ascending."""
    return list(range(-(l - 1), l, 2))
