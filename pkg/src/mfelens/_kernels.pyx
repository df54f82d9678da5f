# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 time-stepping kernels.

Mirrors _kernels_py exactly: fixed-step RK4 for dc/dt = -i H c with an
arrowhead or CSR Hamiltonian.  The whole multi-step loop runs without
touching the interpreter, which is what makes long propagations cheap.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef class ArrowheadStepper:
    cdef double[::1] delta
    cdef cplx[:, ::1] alpha
    cdef cplx[::1] k1, k2, k3, k4, tmp
    cdef Py_ssize_t n_atoms, n_modes

    def __init__(self, delta, alpha):
        self.delta = np.array(delta, dtype=np.float64, order="C")
        self.alpha = np.array(alpha, dtype=np.complex128, order="C")
        self.n_atoms = self.alpha.shape[0]
        self.n_modes = self.alpha.shape[1]
        cdef Py_ssize_t dim = self.n_atoms + self.n_modes
        self.k1 = np.empty(dim, dtype=np.complex128)
        self.k2 = np.empty(dim, dtype=np.complex128)
        self.k3 = np.empty(dim, dtype=np.complex128)
        self.k4 = np.empty(dim, dtype=np.complex128)
        self.tmp = np.empty(dim, dtype=np.complex128)

    cdef void _rhs(self, cplx[::1] c, cplx[::1] out) noexcept nogil:
        cdef Py_ssize_t n = self.n_atoms, L = self.n_modes
        cdef Py_ssize_t k, j
        cdef cplx acc
        for k in range(n):
            acc = 0
            for j in range(L):
                acc = acc + self.alpha[k, j] * c[n + j]
            out[k] = -1j * acc
        for j in range(L):
            acc = self.delta[j] * c[n + j]
            for k in range(n):
                acc = acc + self.alpha[k, j].conjugate() * c[k]
            out[n + j] = -1j * acc

    def step(self, cplx[::1] c, double dt, Py_ssize_t n_steps):
        cdef Py_ssize_t dim = self.n_atoms + self.n_modes
        cdef Py_ssize_t s, i
        with nogil:
            for s in range(n_steps):
                self._rhs(c, self.k1)
                for i in range(dim):
                    self.tmp[i] = c[i] + 0.5 * dt * self.k1[i]
                self._rhs(self.tmp, self.k2)
                for i in range(dim):
                    self.tmp[i] = c[i] + 0.5 * dt * self.k2[i]
                self._rhs(self.tmp, self.k3)
                for i in range(dim):
                    self.tmp[i] = c[i] + dt * self.k3[i]
                self._rhs(self.tmp, self.k4)
                for i in range(dim):
                    c[i] = c[i] + dt / 6.0 * (
                        self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]
                    )


cdef class CsrStepper:
    cdef long long[::1] indptr, indices
    cdef cplx[::1] data
    cdef cplx[::1] k1, k2, k3, k4, tmp
    cdef Py_ssize_t dim

    def __init__(self, indptr, indices, data, dim):
        self.indptr = np.array(indptr, dtype=np.int64, order="C")
        self.indices = np.array(indices, dtype=np.int64, order="C")
        self.data = np.array(data, dtype=np.complex128, order="C")
        self.dim = dim
        self.k1 = np.empty(dim, dtype=np.complex128)
        self.k2 = np.empty(dim, dtype=np.complex128)
        self.k3 = np.empty(dim, dtype=np.complex128)
        self.k4 = np.empty(dim, dtype=np.complex128)
        self.tmp = np.empty(dim, dtype=np.complex128)

    cdef void _rhs(self, cplx[::1] c, cplx[::1] out) noexcept nogil:
        cdef Py_ssize_t row, p
        cdef cplx acc
        for row in range(self.dim):
            acc = 0
            for p in range(self.indptr[row], self.indptr[row + 1]):
                acc = acc + self.data[p] * c[self.indices[p]]
            out[row] = -1j * acc

    def step(self, cplx[::1] c, double dt, Py_ssize_t n_steps):
        cdef Py_ssize_t s, i
        with nogil:
            for s in range(n_steps):
                self._rhs(c, self.k1)
                for i in range(self.dim):
                    self.tmp[i] = c[i] + 0.5 * dt * self.k1[i]
                self._rhs(self.tmp, self.k2)
                for i in range(self.dim):
                    self.tmp[i] = c[i] + 0.5 * dt * self.k2[i]
                self._rhs(self.tmp, self.k3)
                for i in range(self.dim):
                    self.tmp[i] = c[i] + dt * self.k3[i]
                self._rhs(self.tmp, self.k4)
                for i in range(self.dim):
                    c[i] = c[i] + dt / 6.0 * (
                        self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]
                    )


def make_arrowhead_stepper(delta, alpha):
    return ArrowheadStepper(delta, alpha)


def make_csr_stepper(indptr, indices, data, dim):
    return CsrStepper(indptr, indices, data, dim)
