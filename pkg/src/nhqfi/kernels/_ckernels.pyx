# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot loops; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


cdef inline double complex cdot(double complex[::1] x, double complex[::1] y) noexcept nogil:
    cdef Py_ssize_t i
    cdef double complex acc = 0
    for i in range(x.shape[0]):
        acc = acc + x[i].conjugate() * y[i]
    return acc


def generator_qfi_grid(v1, v2, a, b, Ga, Gb, ms, phis):
    cdef double complex[::1] cv1 = np.ascontiguousarray(v1, dtype=complex)
    cdef double complex[::1] cv2 = np.ascontiguousarray(v2, dtype=complex)
    cdef double complex[::1] ca = np.ascontiguousarray(a, dtype=complex)
    cdef double complex[::1] cb = np.ascontiguousarray(b, dtype=complex)
    cdef double complex[::1] cGa = np.ascontiguousarray(Ga, dtype=complex)
    cdef double complex[::1] cGb = np.ascontiguousarray(Gb, dtype=complex)
    cdef double[::1] cms = np.ascontiguousarray(ms, dtype=float)
    cdef double[::1] cphis = np.ascontiguousarray(phis, dtype=float)
    cdef Py_ssize_t nm = cms.shape[0], nphi = cphis.shape[0], i, j
    F_arr = np.empty((nm, nphi))
    Fp_arr = np.empty((nm, nphi))
    cdef double[:, ::1] F = F_arr
    cdef double[:, ::1] Fp = Fp_arr

    cdef double v11 = cdot(cv1, cv1).real, v22 = cdot(cv2, cv2).real
    cdef double aa = cdot(ca, ca).real, bb = cdot(cb, cb).real
    cdef double gaga = cdot(cGa, cGa).real, gbgb = cdot(cGb, cGb).real
    cdef double complex v12 = cdot(cv1, cv2), ab = cdot(ca, cb), gagb = cdot(cGa, cGb)
    cdef double complex aGa = cdot(ca, cGa), aGb = cdot(ca, cGb)
    cdef double complex bGa = cdot(cb, cGa), bGb = cdot(cb, cGb)
    cdef double complex c, mean
    cdef double c2, n0, P, second, dalpha, var
    cdef double complex[::1] unit = np.empty(nphi, dtype=complex)
    with nogil:
        # the phase factors are shared by every row
        for j in range(nphi):
            unit[j] = cos(cphis[j]) + 1j * sin(cphis[j])
        for i in range(nm):
            c2 = cms[i] * cms[i]
            for j in range(nphi):
                c = cms[i] * unit[j]
                n0 = v11 + c2 * v22 + 2 * (c * v12).real
                P = (aa + c2 * bb + 2 * (c * ab).real) / n0
                mean = (aGa + c * aGb + c.conjugate() * bGa + c2 * bGb) / n0
                second = (gaga + c2 * gbgb + 2 * (c * gagb).real) / n0
                dalpha = -mean.imag / P
                var = second / P - (mean.real * mean.real + mean.imag * mean.imag) / (P * P)
                F[i, j] = 16.0 * P * dalpha * dalpha + 4.0 * P * var
                Fp[i, j] = 4.0 * var
    return F_arr, Fp_arr
