"""Ensemble sampling, Dicke initial states and collective populations."""

import numpy as np
import pytest

from mfelens import (
    CutoffSpec,
    EmitterSet,
    EnsembleSpec,
    LensGeometry,
    WaveFunction,
    assemble_hamiltonian,
    build_coupling_matrix,
    collective_populations,
    dicke_initial_state,
    propagate,
    sample_ensembles,
)
from mfelens.errors import DomainError, EmptyBasisError, RejectionOverflowError
from mfelens.units import LAMBDA_A

from helpers import T_TRANSFER, fig3_system


@pytest.fixture(scope="module")
def geom():
    return LensGeometry(radius=3 * LAMBDA_A)


def two_cloud_spec(geom, n=50, sigma=0.02, seed=1, g=0.05):
    return EnsembleSpec(
        n_per_ensemble=n,
        centers=((0.6 * geom.radius, np.pi), (0.6 * geom.radius, 0.0)),
        sigma=sigma,
        seed=seed,
        g_individual=g,
    )


def test_sampling_is_deterministic(geom):
    """The same spec always produces bitwise identical positions."""
    spec = two_cloud_spec(geom)
    first = sample_ensembles(spec, geom)
    second = sample_ensembles(spec, geom)
    assert np.array_equal(first.r, second.r)
    assert np.array_equal(first.phi, second.phi)
    different = sample_ensembles(two_cloud_spec(geom, seed=2), geom)
    assert not np.array_equal(first.r, different.r)


def test_positions_inside_disk_and_ordered(geom):
    """Left cloud fills the first half of the emitter set, all inside the lens."""
    spec = two_cloud_spec(geom, n=200, sigma=0.05)
    emitters = sample_ensembles(spec, geom)
    assert len(emitters) == 400
    assert np.all(emitters.r < geom.radius)
    x = emitters.r * np.cos(emitters.phi)
    assert np.all(x[:200] < 0)
    assert np.all(x[200:] > 0)


def test_zero_sigma_stacks_on_centers(geom):
    """sigma = 0 puts every atom exactly on its cloud center, seed independent."""
    for seed in (1, 77):
        emitters = sample_ensembles(two_cloud_spec(geom, n=10, sigma=0.0, seed=seed), geom)
        assert np.allclose(emitters.r, 0.6 * geom.radius, rtol=1e-15)
        assert np.allclose(emitters.phi[:10], np.pi, rtol=1e-15)
        assert np.abs(emitters.phi[10:]).max() <= 1e-15


def test_sampled_spread_matches_sigma(geom):
    """Per-coordinate standard deviation reproduces sigma * R within 15%."""
    target = 0.05 * geom.radius
    for seed in (1, 2, 3):
        spec = two_cloud_spec(geom, n=2000, sigma=0.05, seed=seed)
        emitters = sample_ensembles(spec, geom)
        x = emitters.r[:2000] * np.cos(emitters.phi[:2000])
        y = emitters.r[:2000] * np.sin(emitters.phi[:2000])
        assert abs(np.std(x, ddof=1) / target - 1.0) <= 0.15
        assert abs(np.std(y, ddof=1) / target - 1.0) <= 0.15


def test_hopeless_center_raises(geom):
    """A cloud so wide that the disk is missed almost surely fails fast."""
    spec = two_cloud_spec(geom, sigma=20.0)
    with pytest.raises(RejectionOverflowError):
        sample_ensembles(spec, geom)


def test_spec_validation(geom):
    """Counts, widths, centers and couplings are validated."""
    with pytest.raises(DomainError):
        EnsembleSpec(0, ((1.0, 0.0), (1.0, np.pi)), 0.1, 1, 0.05)
    with pytest.raises(DomainError):
        EnsembleSpec(5, ((1.0, 0.0),), 0.1, 1, 0.05)
    with pytest.raises(DomainError):
        EnsembleSpec(5, ((1.0, 0.0), (1.0, np.pi)), -0.1, 1, 0.05)
    with pytest.raises(DomainError):
        EnsembleSpec(5, ((1.0, 0.0), (1.0, np.pi)), 0.1, 1, 0.0)
    outside = EnsembleSpec(5, ((2 * geom.radius, 0.0), (1.0, np.pi)), 0.1, 1, 0.05)
    with pytest.raises(DomainError):
        sample_ensembles(outside, geom)


def test_dicke_state_shape():
    """The Dicke state spreads 1/sqrt(N) over the left cloud only."""
    psi = dicke_initial_state(6, [0, 1, 2], 4)
    assert np.isclose(psi.norm, 1.0, rtol=1e-15)
    assert np.allclose(psi.atomic[:3], 1 / np.sqrt(3.0), rtol=1e-15)
    assert np.all(psi.atomic[3:] == 0.0)
    assert np.all(psi.photonic == 0.0)
    with pytest.raises(EmptyBasisError):
        dicke_initial_state(6, [], 4)
    with pytest.raises(DomainError):
        dicke_initial_state(6, [5, 6], 4)


def test_collective_populations_partition():
    """Cloud sums partition the total atomic population; overlaps are rejected."""
    from mfelens import SimulationResult

    pops = np.abs(np.random.default_rng(0).normal(size=(6, 11))) ** 2
    result = SimulationResult(
        times=np.linspace(0, 1, 11),
        atom_populations=pops,
        photon_norm=np.zeros(11),
        norm_squared=np.ones(11),
        energy=np.ones(11),
        method="dense",
    )
    record = collective_populations(result, range(3), range(3, 6))
    assert np.allclose(record.c_left_sq + record.c_right_sq, pops.sum(axis=0), rtol=1e-14)
    with pytest.raises(DomainError):
        collective_populations(result, [0, 1, 2], [2, 3, 4, 5])
    with pytest.raises(DomainError):
        collective_populations(result, [0, 1], [3, 4])


def test_stacked_ensembles_reduce_to_two_atoms(geom):
    """sigma = 0 clouds with g sqrt(N) = g_two reproduce the two-atom dynamics."""
    _, basis, _, two_atom_ham = fig3_system()
    spec = CutoffSpec(omega_c=0.1, truncation_sigmas=4.0)
    stacked = sample_ensembles(two_cloud_spec(geom, n=100, sigma=0.0, g=0.05), geom)
    ham = assemble_hamiltonian(stacked, build_coupling_matrix(stacked, spec, basis))
    t_grid = np.arange(0.0, 80.0 + 1e-9, 0.1)
    ens = propagate(ham, dicke_initial_state(200, range(100), len(basis)), t_grid, method="dense")
    record = collective_populations(ens, range(100), range(100, 200))
    two = propagate(two_atom_ham, WaveFunction.single_excitation(2, len(basis)), t_grid, method="dense")
    assert np.abs(record.c_left_sq - two.atom_populations[0]).max() <= 1e-10
    assert np.abs(record.c_right_sq - two.atom_populations[1]).max() <= 1e-10
    assert np.abs(ens.photon_norm - two.photon_norm).max() <= 1e-10


def test_narrowing_clouds_approach_two_atom_transfer(geom):
    """The collective transfer peak grows monotonically as sigma shrinks."""
    _, basis, _, _ = fig3_system()
    spec = CutoffSpec(omega_c=0.1, truncation_sigmas=4.0)
    t_grid = np.arange(0.0, 100.0 + 1e-9, 0.25)
    peaks = []
    for sigma in (0.04, 0.02, 0.01, 0.0):
        emitters = sample_ensembles(two_cloud_spec(geom, n=100, sigma=sigma, g=0.05), geom)
        ham = assemble_hamiltonian(emitters, build_coupling_matrix(emitters, spec, basis))
        result = propagate(
            ham, dicke_initial_state(200, range(100), len(basis)), t_grid, method="dense"
        )
        record = collective_populations(result, range(100), range(100, 200))
        peaks.append(record.c_right_sq[t_grid >= 0.5 * T_TRANSFER].max())
    assert np.all(np.diff(peaks) > 0)
    assert peaks[-1] > 0.97
