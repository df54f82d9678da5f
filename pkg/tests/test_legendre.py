"""Normalized associated Legendre recurrences against scipy and quadrature."""

import numpy as np
import pytest

from mfelens.legendre import (
    norm_legendre_select,
    norm_legendre_table,
    norm_legendre_weighted_sums,
)

from helpers import norm_legendre_reference


@pytest.mark.parametrize("mu", [0, 1, 2, 5, 9])
def test_table_matches_scipy(mu):
    """Recurrence equals the scipy lpmv value under the 4 pi normalization."""
    x = np.linspace(-0.99, 0.99, 23)
    table = norm_legendre_table(40, mu, x)
    for i, l in enumerate(range(mu, 41)):
        expected = norm_legendre_reference(l, mu, x)
        assert np.allclose(table[i], expected, rtol=1e-12, atol=1e-14)


def test_condon_shortley_sign():
    """Pbar_1^1 carries the Condon-Shortley minus sign."""
    x = np.array([0.3])
    value = norm_legendre_table(1, 1, x)[0, 0]
    expected = -np.sqrt(3.0 / (8.0 * np.pi)) * np.sqrt(1 - 0.3**2)
    assert np.isclose(value, expected, rtol=1e-14)


def test_select_matches_table_rows():
    """Sparse-degree selection returns exactly the table rows asked for."""
    x = np.linspace(-1.0, 1.0, 17)
    table = norm_legendre_table(30, 3, x)
    wanted = np.array([3, 7, 18, 30])
    selected = norm_legendre_select(wanted, 3, x)
    assert selected.shape == (4, 17)
    for row, l in enumerate(wanted):
        assert np.array_equal(selected[row], table[l - 3])


def test_weighted_sums_match_direct_contraction():
    """Rolling accumulation equals weights @ table, including complex weights."""
    x = np.linspace(-0.95, 0.95, 11)
    l_values = np.array([2, 5, 6, 11])
    rng = np.random.default_rng(3)
    weights = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    table = norm_legendre_select(l_values, 2, x)
    direct = weights @ table
    rolled = norm_legendre_weighted_sums(weights, l_values, 2, x)
    assert np.allclose(rolled, direct, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("l, mu", [(4, 0), (7, 3), (60, 11), (300, 7), (1000, 601)])
def test_orthonormality_by_quadrature(l, mu):
    """2 pi * integral of Pbar_l^mu squared over [-1, 1] equals 1."""
    nodes, weights = np.polynomial.legendre.leggauss(l + 1)
    row = norm_legendre_select(np.array([l]), mu, nodes)[0]
    integral = 2.0 * np.pi * np.sum(weights * row * row)
    assert abs(integral - 1.0) <= 1e-10


def test_cross_orthogonality():
    """Different degrees at the same order integrate to zero."""
    nodes, weights = np.polynomial.legendre.leggauss(40)
    rows = norm_legendre_select(np.array([5, 9]), 3, nodes)
    cross = 2.0 * np.pi * np.sum(weights * rows[0] * rows[1])
    assert abs(cross) <= 1e-12


def test_high_degree_stays_finite():
    """Degree-1000 values are finite and O(sqrt(l)) bounded."""
    x = np.linspace(-1.0, 1.0, 201)
    table = norm_legendre_table(1000, 0, x)
    assert np.all(np.isfinite(table))
    bound = np.sqrt((2 * 1000 + 1) / (4 * np.pi))
    assert np.abs(table).max() <= bound * (1 + 1e-10)


def test_degree_order_validation():
    """Degrees below the order and negative orders are rejected."""
    with pytest.raises(ValueError):
        norm_legendre_table(3, 5, np.array([0.0]))
    with pytest.raises(ValueError):
        norm_legendre_table(3, -1, np.array([0.0]))
    with pytest.raises(ValueError):
        norm_legendre_select(np.array([1, 4]), 2, np.array([0.0]))


def test_empty_selection():
    """Empty degree lists produce empty, well-shaped results."""
    out = norm_legendre_select(np.array([], dtype=int), 2, np.array([0.1, 0.2]))
    assert out.shape == (0, 2)
    sums = norm_legendre_weighted_sums(np.zeros((2, 0)), np.array([], dtype=int), 0, np.array([0.1]))
    assert sums.shape == (2, 1)
    assert np.all(sums == 0.0)
