"""Odd-parity sector enumeration and full dipole coupling dynamics."""

import math

import numpy as np
import pytest
import scipy.linalg

from mfelens import (
    WaveFunction,
    assemble_hamiltonian,
    build_full_hamiltonian,
    enumerate_truncated_basis,
    propagate_full,
    restrict_coupling,
)
from mfelens.errors import (
    CapacityError,
    DimensionMismatchError,
    DomainError,
    EmptyBasisError,
)
from mfelens.rwa import embed_one_excitation

from helpers import fig3_system, random_system


def sector_size(n_atoms, n_modes):
    """Closed-form count of states with one or three excitations."""
    return (
        n_atoms
        + n_modes
        + math.comb(n_atoms, 3)
        + math.comb(n_atoms, 2) * n_modes
        + n_atoms * math.comb(n_modes + 1, 2)
        + math.comb(n_modes + 2, 3)
    )


@pytest.mark.parametrize("n_atoms,n_modes", [(1, 1), (2, 2), (2, 3), (3, 4), (2, 10)])
def test_sector_count(n_atoms, n_modes):
    """Enumeration size matches the combinatorial count."""
    fock = enumerate_truncated_basis(n_atoms, n_modes)
    assert len(fock) == sector_size(n_atoms, n_modes)
    assert fock.n_one_excitation == n_atoms + n_modes
    for k in range(n_atoms):
        assert fock.states[k] == ((k,), ())
    for l in range(n_modes):
        assert fock.states[n_atoms + l] == ((), (l,))


def test_states_unique_and_odd_parity():
    """Every state appears once and carries one or three excitations."""
    fock = enumerate_truncated_basis(3, 4)
    assert len(set(fock.states)) == len(fock.states)
    for i, (atoms, photons) in enumerate(fock.states):
        assert len(atoms) + len(photons) in (1, 3)
        assert list(atoms) == sorted(set(atoms))
        assert list(photons) == sorted(photons)
        assert fock.index[(atoms, photons)] == i


def test_capacity_and_domain_guards():
    """Oversized sectors and empty systems are rejected."""
    with pytest.raises(CapacityError):
        enumerate_truncated_basis(2, 30, capacity=1000)
    with pytest.raises(DomainError):
        enumerate_truncated_basis(0, 5)
    with pytest.raises(DomainError):
        enumerate_truncated_basis(2, 0)


@pytest.mark.parametrize("lambda_cr", [0.0, 0.37, 1.0])
def test_hamiltonian_is_exactly_hermitian(lambda_cr):
    """Conjugate term pairs make H Hermitian without symmetrization."""
    _, coupling = random_system(np.random.default_rng(3), n_modes=6)
    fock = enumerate_truncated_basis(2, 6)
    matrix = build_full_hamiltonian(fock, coupling, lambda_cr=lambda_cr).matrix
    defect = (matrix - matrix.getH()).tocsr()
    assert defect.nnz == 0 or np.abs(defect.data).max() == 0.0


def test_coupling_shape_guard():
    """The coupling block must match the Fock basis dimensions."""
    _, coupling = random_system(np.random.default_rng(3), n_modes=6)
    with pytest.raises(DimensionMismatchError):
        build_full_hamiltonian(enumerate_truncated_basis(2, 5), coupling)


def test_lambda_zero_decouples_sectors():
    """Without counter-rotating terms the parity blocks never mix."""
    emitters, coupling = random_system(np.random.default_rng(23), g_scale=0.1, spread=0.3)
    fock = enumerate_truncated_basis(2, 10)
    full = build_full_hamiltonian(fock, coupling, lambda_cr=0.0)
    n1 = fock.n_one_excitation
    assert full.matrix[:n1, n1:].nnz == 0
    assert full.matrix[n1:, :n1].nnz == 0
    block = full.matrix[:n1, :n1].toarray()
    effective = assemble_hamiltonian(emitters, coupling)
    assert np.array_equal(block, effective.dense(frame="lab"))
    grid = np.arange(0.0, 20.0 + 1e-9, 0.5)
    result = propagate_full(full, WaveFunction.single_excitation(2, 10), grid)
    assert np.all(result.p3 == 0.0)


@pytest.mark.parametrize("lambda_cr", [0.0, 1.0])
def test_dense_sector_oracle(lambda_cr):
    """Sparse RK4 in the sector matches a dense eigendecomposition."""
    _, coupling = random_system(np.random.default_rng(23), g_scale=0.1, spread=0.3)
    fock = enumerate_truncated_basis(2, 10)
    full = build_full_hamiltonian(fock, coupling, lambda_cr=lambda_cr)
    grid = np.arange(0.0, 20.0 + 1e-9, 0.5)
    result = propagate_full(full, WaveFunction.single_excitation(2, 10), grid)

    evals, vecs = scipy.linalg.eigh(full.matrix.toarray())
    weights = vecs.conj().T @ embed_one_excitation(fock, WaveFunction.single_excitation(2, 10))
    columns = vecs @ (np.exp(-1j * np.outer(evals, grid)) * weights[:, None])
    prob = np.abs(columns) ** 2
    occupancy = np.zeros((2, len(fock)))
    three_exc = np.zeros(len(fock))
    for i, (atoms, photons) in enumerate(fock.states):
        occupancy[list(atoms), i] = 1.0
        three_exc[i] = float(len(atoms) + len(photons) == 3)
    assert np.abs(occupancy @ prob - result.atom_populations).max() <= 1e-8
    assert np.abs(three_exc @ prob - result.p3).max() <= 1e-8
    assert result.norm_drift <= 1e-8


def test_counter_rotating_weight_scaling():
    """P3 grows monotonically with the counter-rotating weight, about as lambda^2."""
    _, coupling = random_system(
        np.random.default_rng(11), n_modes=8, g_scale=0.05, spread=0.25
    )
    fock = enumerate_truncated_basis(2, 8)
    grid = np.arange(0.0, 20.0 + 1e-9, 0.2)
    p3_max = []
    for lambda_cr in (0.0, 0.25, 0.5, 1.0):
        full = build_full_hamiltonian(fock, coupling, lambda_cr=lambda_cr)
        result = propagate_full(full, WaveFunction.single_excitation(2, 8), grid)
        p3_max.append(result.p3.max())
    assert p3_max[0] == 0.0
    assert np.all(np.diff(p3_max) > 0)
    assert 0.2 <= p3_max[2] / p3_max[3] <= 0.3


def test_embed_layout():
    """Embedding places atoms first, then photons, then zeros."""
    fock = enumerate_truncated_basis(2, 3)
    psi = WaveFunction(np.array([0.6, 0.0]), np.array([0.0, 0.8j, 0.0]))
    c = embed_one_excitation(fock, psi)
    assert c[0] == 0.6
    assert c[3] == 0.8j
    assert np.count_nonzero(c) == 2
    assert np.all(c[fock.n_one_excitation :] == 0.0)
    with pytest.raises(DimensionMismatchError):
        embed_one_excitation(fock, WaveFunction.single_excitation(3, 3))


def test_propagate_full_validation():
    """Unnormalized states and malformed grids are rejected."""
    _, coupling = random_system(np.random.default_rng(5), n_modes=4)
    fock = enumerate_truncated_basis(2, 4)
    full = build_full_hamiltonian(fock, coupling)
    lopsided = WaveFunction(np.array([0.5, 0.0]), np.zeros(4))
    with pytest.raises(DomainError):
        propagate_full(full, lopsided, np.arange(0.0, 1.0, 0.1))
    psi = WaveFunction.single_excitation(2, 4)
    with pytest.raises(DomainError):
        propagate_full(full, psi, np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        propagate_full(full, psi, np.array([0.0, 0.5, 0.25]))


def test_restrict_coupling_keeps_whole_groups():
    """Reduction keeps whole nearest-resonance degeneracy groups."""
    _, basis, coupling, _ = fig3_system()
    reduced = restrict_coupling(coupling, 40)
    assert list(reduced.basis.l_groups) == [18, 19]
    assert len(reduced.basis) == 37
    mask = np.isin(basis.l, reduced.basis.l_groups)
    assert np.array_equal(reduced.alpha, coupling.alpha[:, mask])
    with pytest.raises(EmptyBasisError):
        restrict_coupling(coupling, 10)
