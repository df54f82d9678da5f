"""Pure numpy/scipy fallback for the time-stepping kernels.

Semantics match the compiled extension: classic fixed-step RK4 for
dc/dt = -i H c, with H either an arrowhead matrix (diagonal plus a dense
atom border) or a general sparse matrix in CSR form.  The steppers mutate
the state vector in place so long runs allocate nothing per step beyond
the four stage buffers.
"""

import numpy as np
import scipy.sparse


class ArrowheadStepper:
    """RK4 stepper for H = [[0, alpha], [alpha^H, diag(delta)]]."""

    def __init__(self, delta, alpha):
        self.delta = np.asarray(delta, dtype=float)
        self.alpha = np.ascontiguousarray(alpha, dtype=complex)
        self._alpha_h = self.alpha.conj().T.copy()
        self._n = self.alpha.shape[0]

    def _rhs(self, c, out):
        n = self._n
        np.matmul(self.alpha, c[n:], out=out[:n])
        np.multiply(self.delta, c[n:], out=out[n:])
        out[n:] += self._alpha_h @ c[:n]
        out *= -1j

    def step(self, c, dt, n_steps):
        k1, k2, k3, k4, tmp = (np.empty_like(c) for _ in range(5))
        for _ in range(n_steps):
            self._rhs(c, k1)
            np.multiply(0.5 * dt, k1, out=tmp)
            tmp += c
            self._rhs(tmp, k2)
            np.multiply(0.5 * dt, k2, out=tmp)
            tmp += c
            self._rhs(tmp, k3)
            np.multiply(dt, k3, out=tmp)
            tmp += c
            self._rhs(tmp, k4)
            k2 += k3
            k1 += k4
            k1 += 2.0 * k2
            k1 *= dt / 6.0
            c += k1


class CsrStepper:
    """RK4 stepper for a general (Hermitian) sparse H given in CSR parts."""

    def __init__(self, indptr, indices, data, dim):
        self._h = scipy.sparse.csr_matrix(
            (np.asarray(data, dtype=complex), indices, indptr), shape=(dim, dim)
        )

    def step(self, c, dt, n_steps):
        h = self._h
        for _ in range(n_steps):
            k1 = -1j * (h @ c)
            k2 = -1j * (h @ (c + (0.5 * dt) * k1))
            k3 = -1j * (h @ (c + (0.5 * dt) * k2))
            k4 = -1j * (h @ (c + dt * k3))
            c += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def make_arrowhead_stepper(delta, alpha):
    return ArrowheadStepper(delta, alpha)


def make_csr_stepper(indptr, indices, data, dim):
    return CsrStepper(indptr, indices, data, dim)
