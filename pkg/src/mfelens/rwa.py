"""Verifies the rotating-wave approximation against the full dipole coupling.

The counter-rotating terms sigma+ a-dagger and sigma- a change the total
excitation number by two, so starting from one excitation the reachable
space is the odd-parity sector: exactly one or three excitations.  States
are enumerated as (excited-atom set, photon multiset) pairs; the
Hamiltonian acts sparsely through the four dipole term types with their
bosonic sqrt factors.  Everything is kept in the lab frame; populations
never see the global phase.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement

import numpy as np
import scipy.sparse

from . import kernels
from .coupling import CouplingMatrix
from .errors import CapacityError, DimensionMismatchError, DomainError, NormDriftError
from .dynamics import WaveFunction, _check_grid
from .units import OMEGA_A

DEFAULT_CAPACITY = 200_000


@dataclass(frozen=True)
class TruncatedFockBasis:
    """Odd-parity sector states; the 1-excitation block comes first.

    Within the 1-excitation block the order is atoms then modes, matching
    the arrowhead layout of the effective Hamiltonian, so the rotating
    part restricted to that block is the same matrix entry for entry.
    """

    n_atoms: int
    n_modes: int
    states: tuple
    index: dict = field(compare=False, repr=False)

    @property
    def n_one_excitation(self) -> int:
        return self.n_atoms + self.n_modes

    def __len__(self) -> int:
        return len(self.states)


def enumerate_truncated_basis(
    n_atoms: int, n_modes: int, capacity: int = DEFAULT_CAPACITY
) -> TruncatedFockBasis:
    """All states with one or three total excitations."""
    if n_atoms < 1 or n_modes < 1:
        raise DomainError("need at least one atom and one mode")
    atoms = range(n_atoms)
    modes = range(n_modes)
    states = [((k,), ()) for k in atoms]
    states += [((), (l,)) for l in modes]
    states += [(a, ()) for a in combinations(atoms, 3)]
    states += [(a, (l,)) for a in combinations(atoms, 2) for l in modes]
    states += [
        ((k,), p) for k in atoms for p in combinations_with_replacement(modes, 2)
    ]
    states += [((), p) for p in combinations_with_replacement(modes, 3)]
    if len(states) > capacity:
        raise CapacityError(
            f"odd-parity sector for N={n_atoms}, L={n_modes} has {len(states)} "
            f"states, above the cap of {capacity}"
        )
    index = {s: i for i, s in enumerate(states)}
    return TruncatedFockBasis(n_atoms, n_modes, tuple(states), index)


@dataclass(frozen=True)
class FullCouplingHamiltonian:
    """Sparse H = diag + rotating + lambda_cr * counter-rotating terms."""

    basis: TruncatedFockBasis
    matrix: scipy.sparse.csr_matrix
    omega: np.ndarray
    lambda_cr: float

    @property
    def dim(self) -> int:
        return len(self.basis)


def _state_energy(state, omega):
    atoms, photons = state
    return OMEGA_A * len(atoms) + sum(omega[l] for l in photons)


def _remove_one(photons, l):
    out = list(photons)
    out.remove(l)
    return tuple(out)


def _add_one(photons, l):
    return tuple(sorted(photons + (l,)))


def build_full_hamiltonian(
    fock: TruncatedFockBasis, coupling: CouplingMatrix, lambda_cr: float = 1.0
) -> FullCouplingHamiltonian:
    """Assemble the CSR matrix of the full dipole Hamiltonian.

    Each column is filled by applying all four term types to its state;
    conjugate term pairs land in transposed positions, so the assembled
    matrix is Hermitian without symmetrization.
    """
    alpha = coupling.alpha
    if alpha.shape != (fock.n_atoms, fock.n_modes):
        raise DimensionMismatchError(
            f"coupling block {alpha.shape} does not match N={fock.n_atoms}, "
            f"L={fock.n_modes}"
        )
    omega = coupling.basis.omega
    rows, cols, vals = [], [], []

    def put(row_state, col, amp):
        rows.append(fock.index[row_state])
        cols.append(col)
        vals.append(amp)

    for j, (atoms, photons) in enumerate(fock.states):
        put((atoms, photons), j, _state_energy((atoms, photons), omega))
        occupied = sorted(set(photons))
        counts = {l: photons.count(l) for l in occupied}
        for k in range(fock.n_atoms):
            if k in atoms:
                reduced = tuple(a for a in atoms if a != k)
                # sigma-_k a_l^dag, amplitude conj(alpha) * sqrt(n_l + 1)
                for l in range(fock.n_modes):
                    target = (reduced, _add_one(photons, l))
                    amp = np.conj(alpha[k, l]) * math.sqrt(photons.count(l) + 1)
                    if target in fock.index:
                        put(target, j, amp)
                # counter-rotating sigma-_k a_l, amplitude alpha * sqrt(n_l)
                if lambda_cr != 0.0:
                    for l in occupied:
                        target = (reduced, _remove_one(photons, l))
                        put(target, j, lambda_cr * alpha[k, l] * math.sqrt(counts[l]))
            else:
                grown = tuple(sorted(atoms + (k,)))
                # sigma+_k a_l, amplitude alpha * sqrt(n_l)
                for l in occupied:
                    target = (grown, _remove_one(photons, l))
                    put(target, j, alpha[k, l] * math.sqrt(counts[l]))
                # counter-rotating sigma+_k a_l^dag, amplitude conj(alpha) * sqrt(n_l + 1)
                if lambda_cr != 0.0:
                    for l in range(fock.n_modes):
                        target = (grown, _add_one(photons, l))
                        amp = lambda_cr * np.conj(alpha[k, l]) * math.sqrt(photons.count(l) + 1)
                        if target in fock.index:
                            put(target, j, amp)

    matrix = scipy.sparse.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)),
        shape=(len(fock), len(fock)),
    )
    return FullCouplingHamiltonian(fock, matrix, omega, lambda_cr)


@dataclass
class RwaResult:
    """Observables of one full-coupling run."""

    times: np.ndarray
    p3: np.ndarray
    atom_populations: np.ndarray
    norm_squared: np.ndarray

    @property
    def norm_drift(self) -> float:
        return float(np.abs(np.sqrt(self.norm_squared) - 1.0).max())


def embed_one_excitation(fock: TruncatedFockBasis, psi: WaveFunction) -> np.ndarray:
    """Place a single-excitation wavefunction into the sector layout."""
    if psi.atomic.size != fock.n_atoms or psi.photonic.size != fock.n_modes:
        raise DimensionMismatchError("state does not match the Fock basis")
    c = np.zeros(len(fock), dtype=complex)
    c[: fock.n_atoms] = psi.atomic
    c[fock.n_atoms : fock.n_one_excitation] = psi.photonic
    return c


def propagate_full(
    ham: FullCouplingHamiltonian,
    psi0: WaveFunction,
    t_grid,
    dt: float | None = None,
    theta: float = 0.0125,
    norm_tol: float = 1e-6,
) -> RwaResult:
    """RK4 propagation through the sparse kernels, sampling P3 and atom pops."""
    t_grid = _check_grid(t_grid)
    c = embed_one_excitation(ham.basis, psi0)
    if abs(np.linalg.norm(c) - 1.0) > 1e-8:
        raise DomainError("initial state is not normalized")

    # a global energy shift is a pure phase on the state; centering the
    # spectrum halves the stability-limited step count
    diag = ham.matrix.diagonal().real
    shift = 0.5 * (diag.min() + diag.max())
    h = ham.matrix - shift * scipy.sparse.identity(ham.dim, dtype=complex, format="csr")
    h.sort_indices()
    offdiag_row_sum = np.abs(h).sum(axis=1).A1 - np.abs(h.diagonal())
    rho = np.abs(h.diagonal()).max() + offdiag_row_sum.max() + 1e-12
    if dt is None:
        dt = theta / rho
    stepper = kernels.make_csr_stepper(h.indptr, h.indices, h.data, ham.dim)

    fock = ham.basis
    occupancy = np.zeros((fock.n_atoms, len(fock)))
    three_exc = np.zeros(len(fock))
    for i, (atoms, photons) in enumerate(fock.states):
        for k in atoms:
            occupancy[k, i] = 1.0
        if len(atoms) + len(photons) == 3:
            three_exc[i] = 1.0

    n_t = t_grid.size
    result = RwaResult(
        times=t_grid,
        p3=np.empty(n_t),
        atom_populations=np.empty((fock.n_atoms, n_t)),
        norm_squared=np.empty(n_t),
    )
    for j, t in enumerate(t_grid):
        if j > 0:
            span = t - t_grid[j - 1]
            n_sub = max(1, int(math.ceil(span / dt - 1e-12)))
            stepper.step(c, span / n_sub, n_sub)
        prob = np.abs(c) ** 2
        result.p3[j] = three_exc @ prob
        result.atom_populations[:, j] = occupancy @ prob
        result.norm_squared[j] = prob.sum()
        if abs(math.sqrt(result.norm_squared[j]) - 1.0) > norm_tol:
            raise NormDriftError(
                f"norm drifted to {math.sqrt(result.norm_squared[j])!r} at t={t}",
                time=t,
            )
    return result


def restrict_coupling(coupling: CouplingMatrix, max_modes: int) -> CouplingMatrix:
    """Keep whole frequency groups nearest resonance, at most max_modes modes.

    Degenerate groups are never split; splitting would distort the frequency
    comb that the exchange dynamics rides on.
    """
    reduced = coupling.basis.restrict_nearest(OMEGA_A, max_modes)
    mask = np.isin(coupling.basis.l, reduced.l_groups)
    return CouplingMatrix(alpha=coupling.alpha[:, mask].copy(), basis=reduced)
