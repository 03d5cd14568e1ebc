# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``."""

import numpy as np

NAME = "cython"


def wedge_accumulate(const double complex[:, :, :, :] F,
                     const double complex[:, :, :, :] G,
                     const Py_ssize_t[:] tf,
                     const Py_ssize_t[:] tg,
                     const Py_ssize_t[:] to,
                     const double complex[:] fac,
                     double complex[:, :, :, :] out):
    cdef Py_ssize_t nb = out.shape[0]
    cdef Py_ssize_t nt = tf.shape[0]
    cdef Py_ssize_t r = out.shape[2]
    cdef bint bf = F.shape[0] > 1
    cdef bint bg = G.shape[0] > 1
    cdef Py_ssize_t b, t, i, j, l, fi, gi, oi, fb, gb
    cdef double complex acc, c
    with nogil:
        for b in range(nb):
            fb = b if bf else 0
            gb = b if bg else 0
            for t in range(nt):
                fi = tf[t]
                gi = tg[t]
                oi = to[t]
                c = fac[t]
                for i in range(r):
                    for j in range(r):
                        acc = 0
                        for l in range(r):
                            acc = acc + F[fb, fi, i, l] * G[gb, gi, l, j]
                        out[b, oi, i, j] = out[b, oi, i, j] + c * acc
    return np.asarray(out)


def rank2_pairings(B, X, lam):
    Ba = np.ascontiguousarray(B, dtype=np.complex128).reshape(-1, 2, 2)
    Xa = np.ascontiguousarray(X, dtype=np.complex128).reshape(-1, 2, 2)
    la = np.ascontiguousarray(lam, dtype=np.float64).reshape(-1)
    shape = np.shape(lam)
    lhs = np.empty(la.shape[0])
    rhs = np.empty(la.shape[0])
    _rank2(Ba, Xa, la, lhs, rhs)
    return lhs.reshape(shape), rhs.reshape(shape)


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _rank2(const double complex[:, :, ::1] B,
                 const double complex[:, :, ::1] X,
                 const double[::1] lam,
                 double[::1] lhs, double[::1] rhs) noexcept nogil:
    cdef Py_ssize_t n = lam.shape[0]
    cdef Py_ssize_t k, i, j, m
    cdef double complex bb[2][2]
    cdef double complex xx[2][2]
    cdef double complex bx[2][2]
    cdef double complex s
    cdef double w[2][2]
    cdef double lo, hi
    for k in range(n):
        w[0][0] = 0.5
        w[0][1] = 1.0 / (1.0 + lam[k])
        w[1][0] = w[0][1]
        w[1][1] = 0.5 / lam[k]
        for i in range(2):
            for j in range(2):
                # (BB^+ + B^+B)_ij, (XX^+ + X^+X)_ij, (BX^+ + X^+B)_ij
                bb[i][j] = 0
                xx[i][j] = 0
                bx[i][j] = 0
                for m in range(2):
                    bb[i][j] = bb[i][j] + B[k, i, m] * B[k, j, m].conjugate() \
                        + B[k, m, i].conjugate() * B[k, m, j]
                    xx[i][j] = xx[i][j] + X[k, i, m] * X[k, j, m].conjugate() \
                        + X[k, m, i].conjugate() * X[k, m, j]
                    bx[i][j] = bx[i][j] + B[k, i, m] * X[k, j, m].conjugate() \
                        + X[k, m, i].conjugate() * B[k, m, j]
        lo = 0
        hi = 0
        for i in range(2):
            for j in range(2):
                s = bb[i][j].conjugate() * xx[i][j]
                lo = lo + s.real * w[i][j]
                hi = hi + _abs2(bx[i][j]) * w[i][j]
        lhs[k] = lo
        rhs[k] = hi
