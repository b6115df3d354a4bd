# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled profile scanner; same contract as ``_kernels_py.scan``."""
import numpy as np

from libc.math cimport sqrt

cdef enum:
    NOT_FOUND = 0
    FOUND = 1
    BUDGET = 2


cdef inline void _matvec(const double complex[:, ::1] m,
                         const double complex[::1] x,
                         double complex[::1] y, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double complex acc
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + m[i, j] * x[j]
        y[i] = acc


def scan(const double complex[:, :, ::1] owner_set,
         const Py_ssize_t[::1] owner_idx,
         const double complex[:, :, ::1] opp_set,
         const Py_ssize_t[::1] slots,
         const double complex[::1] start,
         Py_ssize_t target, bint want_win, double tol, long long budget,
         projector=None, double inv_tol=1e-8):
    cdef Py_ssize_t n = start.shape[0]
    cdef Py_ssize_t nrounds = slots.shape[0]
    cdef Py_ssize_t k_opp = opp_set.shape[0]
    cdef Py_ssize_t r, b, s, i, nb = 0, r0
    cdef double thresh = 1.0 - tol
    cdef double resid, pr
    cdef double complex p
    cdef long long playouts = 0
    cdef bint win, invariant

    for r in range(nrounds):
        if slots[r] < 0:
            nb += 1

    branch_np = np.zeros(nb, dtype=np.intp)
    counter_np = np.zeros(nb, dtype=np.intp)
    branch_of_np = np.full(nrounds, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] branch_rounds = branch_np
    cdef Py_ssize_t[::1] counter = counter_np
    cdef Py_ssize_t[::1] branch_of = branch_of_np
    b = 0
    for r in range(nrounds):
        if slots[r] < 0:
            branch_rounds[b] = r
            branch_of[r] = b
            b += 1

    states_np = np.zeros((nrounds + 1, n), dtype=np.complex128)
    cdef double complex[:, ::1] states = states_np
    cdef double complex[::1] tmp = np.zeros(n, dtype=np.complex128)
    cdef const double complex[:, ::1] proj
    for i in range(n):
        states[0, i] = start[i]

    if projector is not None and nb > 0:
        proj = np.ascontiguousarray(projector, dtype=np.complex128)
        invariant = True
        with nogil:
            for r in range(nrounds):
                s = slots[r]
                if s < 0:
                    _matvec(proj, states[r], tmp, n)
                    resid = 0.0
                    for i in range(n):
                        p = states[r, i] - tmp[i]
                        resid += p.real * p.real + p.imag * p.imag
                    if sqrt(resid) > inv_tol:
                        invariant = False
                        break
                    for i in range(n):
                        states[r + 1, i] = states[r, i]
                else:
                    _matvec(owner_set[owner_idx[s]], states[r], states[r + 1], n)
        if invariant:
            if budget < 1:
                return BUDGET, None, 0, True
            p = states[nrounds, target]
            win = (p.real * p.real + p.imag * p.imag) >= thresh
            if win == want_win:
                return FOUND, (0,) * nb, 1, True
            return NOT_FOUND, None, 1, True

    cdef int status = NOT_FOUND
    r0 = 0
    with nogil:
        while True:
            for r in range(r0, nrounds):
                s = slots[r]
                if s >= 0:
                    _matvec(owner_set[owner_idx[s]], states[r], states[r + 1], n)
                else:
                    _matvec(opp_set[counter[branch_of[r]]], states[r], states[r + 1], n)
            if playouts >= budget:
                status = BUDGET
                break
            playouts += 1
            p = states[nrounds, target]
            pr = p.real * p.real + p.imag * p.imag
            win = pr >= thresh
            if win == want_win:
                status = FOUND
                break
            b = nb - 1
            while b >= 0 and counter[b] == k_opp - 1:
                counter[b] = 0
                b -= 1
            if b < 0:
                status = NOT_FOUND
                break
            counter[b] += 1
            r0 = branch_rounds[b]

    if status == FOUND:
        return FOUND, tuple(int(c) for c in counter_np), playouts, False
    return status, None, playouts, False
