# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Grover-iteration kernels.

Every routine mutates ``state`` in place. ``good`` is a 0/1 mask over the
basis and ``in_index`` is the basis position of the fixed input state. Two
oracle representations are supported: a reflection axis ``a`` (oracle
``2|a><a| - 1``) and a dense unitary matrix.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline void _reflect_good(cplx[::1] s, const unsigned char[::1] good) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(s.shape[0]):
        if good[k]:
            s[k] = -s[k]


cdef inline void _axis_reflect(cplx[::1] s, const cplx[::1] a) noexcept nogil:
    # s <- 2 a (a^H s) - s
    cdef Py_ssize_t k, n = s.shape[0]
    cdef cplx ov = 0
    for k in range(n):
        ov = ov + a[k].conjugate() * s[k]
    ov = 2 * ov
    for k in range(n):
        s[k] = ov * a[k] - s[k]


cdef inline void _axis_step(cplx[::1] s, const cplx[::1] a, Py_ssize_t in_index,
                            const unsigned char[::1] good) noexcept nogil:
    # D = -O R_IN O^H R_G with O = O^H
    cdef Py_ssize_t k
    _reflect_good(s, good)
    _axis_reflect(s, a)
    s[in_index] = -s[in_index]
    _axis_reflect(s, a)
    for k in range(s.shape[0]):
        s[k] = -s[k]


cdef inline void _dense_step(cplx[::1] s, cplx[::1] tmp, const cplx[:, ::1] o,
                             Py_ssize_t in_index, const unsigned char[::1] good) noexcept nogil:
    cdef Py_ssize_t i, j, n = s.shape[0]
    cdef cplx acc
    _reflect_good(s, good)
    # tmp <- O^H s
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + o[j, i].conjugate() * s[j]
        tmp[i] = acc
    tmp[in_index] = -tmp[in_index]
    # s <- -O tmp
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + o[i, j] * tmp[j]
        s[i] = -acc


cdef inline double _good_mass(const cplx[::1] s, const unsigned char[::1] good) noexcept nogil:
    cdef Py_ssize_t k
    cdef double m = 0.0
    for k in range(s.shape[0]):
        if good[k]:
            m += s[k].real * s[k].real + s[k].imag * s[k].imag
    return m


def axis_grover_power(cplx[::1] state, const cplx[::1] axis, Py_ssize_t in_index,
                      const unsigned char[::1] good, Py_ssize_t n):
    cdef Py_ssize_t t
    with nogil:
        for t in range(n):
            _axis_step(state, axis, in_index, good)


def dense_grover_power(cplx[::1] state, const cplx[:, ::1] oracle, Py_ssize_t in_index,
                       const unsigned char[::1] good, Py_ssize_t n):
    cdef Py_ssize_t t
    cdef cplx[::1] tmp = np.empty(state.shape[0], dtype=np.complex128)
    with nogil:
        for t in range(n):
            _dense_step(state, tmp, oracle, in_index, good)


def axis_good_mass_trajectory(cplx[::1] state, const cplx[::1] axis, Py_ssize_t in_index,
                              const unsigned char[::1] good, Py_ssize_t m):
    cdef double[::1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t t
    with nogil:
        for t in range(m):
            if t:
                _axis_step(state, axis, in_index, good)
            out[t] = _good_mass(state, good)
    return np.asarray(out)


def dense_good_mass_trajectory(cplx[::1] state, const cplx[:, ::1] oracle, Py_ssize_t in_index,
                               const unsigned char[::1] good, Py_ssize_t m):
    cdef double[::1] out = np.empty(m, dtype=np.float64)
    cdef cplx[::1] tmp = np.empty(state.shape[0], dtype=np.complex128)
    cdef Py_ssize_t t
    with nogil:
        for t in range(m):
            if t:
                _dense_step(state, tmp, oracle, in_index, good)
            out[t] = _good_mass(state, good)
    return np.asarray(out)
