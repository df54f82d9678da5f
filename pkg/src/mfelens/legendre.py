"""Orthonormal associated Legendre evaluation by stable recurrence.

All routines work with the spherical-harmonic normalized functions

    Pbar_l^m(x) = sqrt((2l+1)/(4*pi) * (l-m)!/(l+m)!) * P_l^m(x),

with the Condon-Shortley phase included in P_l^m.  Pbar stays O(sqrt(l))
for any degree, so the three-term recurrence in l at fixed order m is
overflow-safe up to very high degree (used here to l ~ 1000), unlike the
unnormalized P_l^m whose factorial growth overflows doubles near l ~ 150.

Orders are taken non-negative everywhere in this module; negative-order
values follow from Pbar_l^{-m} = (-1)^m Pbar_l^m and are applied by the
mode layer.
"""

import numpy as np

_SQRT_INV_4PI = 0.5 / np.sqrt(np.pi)


def _seed_sectoral(mu, x, sin_theta):
    """Pbar_{mu,mu}(x), built up from Pbar_00 through the sectoral chain."""
    p = np.full_like(x, _SQRT_INV_4PI)
    for k in range(1, mu + 1):
        p = -np.sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_theta * p
    return p


def _coeff_a(l, mu):
    return np.sqrt((4.0 * l * l - 1.0) / (l * l - mu * mu))


def _coeff_b(l, mu):
    return np.sqrt(
        (2.0 * l + 1.0)
        * ((l - 1.0) ** 2 - mu * mu)
        / ((2.0 * l - 3.0) * (l * l - mu * mu))
    )


def norm_legendre_table(l_max, mu, x):
    """Table of Pbar_l^mu(x) for l = mu .. l_max.

    Parameters
    ----------
    l_max : int
        Highest degree (inclusive); must satisfy l_max >= mu >= 0.
    mu : int
        Non-negative order.
    x : array_like
        Evaluation points in [-1, 1].

    Returns
    -------
    ndarray of shape (l_max - mu + 1, x.size).
    """
    if mu < 0 or l_max < mu:
        raise ValueError(f"need 0 <= mu <= l_max, got mu={mu}, l_max={l_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.empty((l_max - mu + 1, x.size))
    out[0] = _seed_sectoral(mu, x, sin_theta)
    if l_max > mu:
        out[1] = np.sqrt(2.0 * mu + 3.0) * x * out[0]
    for l in range(mu + 2, l_max + 1):
        i = l - mu
        out[i] = _coeff_a(l, mu) * x * out[i - 1] - _coeff_b(l, mu) * out[i - 2]
    return out


def norm_legendre_select(l_values, mu, x):
    """Pbar_l^mu(x) for the requested degrees only, without storing the full table.

    ``l_values`` must be sorted ascending.  Returns shape (len(l_values), x.size).
    """
    l_values = np.asarray(l_values)
    if l_values.size == 0:
        return np.empty((0, np.atleast_1d(x).size))
    if np.any(l_values < mu):
        raise ValueError("requested degree below the order")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.empty((l_values.size, x.size))
    wanted = {int(l): i for i, l in enumerate(l_values)}

    p_prev = _seed_sectoral(mu, x, sin_theta)
    if mu in wanted:
        out[wanted[mu]] = p_prev
    if l_values[-1] == mu:
        return out
    p_curr = np.sqrt(2.0 * mu + 3.0) * x * p_prev
    if mu + 1 in wanted:
        out[wanted[mu + 1]] = p_curr
    for l in range(mu + 2, int(l_values[-1]) + 1):
        p_prev, p_curr = p_curr, _coeff_a(l, mu) * x * p_curr - _coeff_b(l, mu) * p_prev
        if l in wanted:
            out[wanted[l]] = p_curr
    return out


def norm_legendre_weighted_sums(weight_rows, l_values, mu, x):
    """Accumulate sum_l w[row, l] * Pbar_l^mu(x) for several weight rows at once.

    ``weight_rows`` has shape (n_rows, len(l_values)); the recurrence runs once
    and every row's weighted sum is accumulated in rolling buffers, so memory
    stays O(n_rows * x.size) regardless of the degree range.  Weights may be
    complex.  Returns shape (n_rows, x.size).
    """
    l_values = np.asarray(l_values)
    weight_rows = np.asarray(weight_rows)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    acc = np.zeros((weight_rows.shape[0], x.size), dtype=np.result_type(weight_rows, 1.0))
    if l_values.size == 0:
        return acc
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    wanted = {int(l): i for i, l in enumerate(l_values)}

    def add(l, p):
        i = wanted.get(l)
        if i is not None:
            acc[...] += weight_rows[:, i, None] * p[None, :]

    p_prev = _seed_sectoral(mu, x, sin_theta)
    add(mu, p_prev)
    if l_values[-1] == mu:
        return acc
    p_curr = np.sqrt(2.0 * mu + 3.0) * x * p_prev
    add(mu + 1, p_curr)
    for l in range(mu + 2, int(l_values[-1]) + 1):
        p_prev, p_curr = p_curr, _coeff_a(l, mu) * x * p_curr - _coeff_b(l, mu) * p_prev
        add(l, p_curr)
    return acc
