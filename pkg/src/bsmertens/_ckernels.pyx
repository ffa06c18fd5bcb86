# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_kernels_py`` for the contracts)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sin, M_PI
from libc.stdint cimport int8_t, int32_t, int64_t

cnp.import_array()


cdef inline int _legendre(int64_t a, int64_t p) noexcept nogil:
    # Jacobi symbol (a/p) for odd p > 0
    cdef int result = 1
    cdef int64_t t
    a %= p
    if a < 0:
        a += p
    while a != 0:
        while a % 2 == 0:
            a //= 2
            t = p % 8
            if t == 3 or t == 5:
                result = -result
        t = a
        a = p
        p = t
        if a % 4 == 3 and p % 4 == 3:
            result = -result
        a %= p
    return result if p == 1 else 0


cdef inline int _kron_prime(int64_t D, int64_t p) noexcept nogil:
    cdef int64_t r
    if p == 2:
        if D % 2 == 0:
            return 0
        r = D % 8
        if r < 0:
            r += 8
        return 1 if (r == 1 or r == 7) else -1
    return _legendre(D, p)


def kronecker_primes(int64_t D, primes):
    cdef const int64_t[:] ps = np.ascontiguousarray(primes, dtype=np.int64)
    cdef Py_ssize_t n = ps.shape[0], i
    out = np.zeros(n, dtype=np.int8)
    cdef int8_t[:] o = out
    with nogil:
        for i in range(n):
            o[i] = <int8_t>_kron_prime(D, ps[i])
    return out


cdef void _fill_chars(int64_t D, const int64_t[:] spf, int8_t[:] chi) noexcept nogil:
    cdef int64_t m = chi.shape[0], a, p
    if m == 0:
        return
    chi[0] = 1 if m == 1 else 0
    if m == 1:
        return
    chi[1] = 1
    for a in range(2, m):
        p = spf[a]
        if p == a:
            chi[a] = <int8_t>_kron_prime(D, a)
        else:
            chi[a] = chi[p] * chi[a // p]


def quad_char_table(int64_t D, spf):
    cdef const int64_t[:] s = np.ascontiguousarray(spf, dtype=np.int64)
    cdef int64_t m = D if D > 0 else -D
    out = np.zeros(m, dtype=np.int8)
    cdef int8_t[:] chi = out
    with nogil:
        _fill_chars(D, s, chi)
    return out


def imag_char_moment(int64_t D, spf):
    cdef const int64_t[:] s = np.ascontiguousarray(spf, dtype=np.int64)
    cdef int64_t m = D if D > 0 else -D
    buf = np.zeros(m, dtype=np.int8)
    cdef int8_t[:] chi = buf
    cdef int64_t total = 0, a
    with nogil:
        _fill_chars(D, s, chi)
        for a in range(1, m):
            total += chi[a] * a
    return int(total)


def real_char_logsin(int64_t D, spf):
    cdef const int64_t[:] s = np.ascontiguousarray(spf, dtype=np.int64)
    buf = np.zeros(D, dtype=np.int8)
    cdef int8_t[:] chi = buf
    cdef double total = 0.0, comp = 0.0, y, t
    cdef int64_t a
    with nogil:
        _fill_chars(D, s, chi)
        for a in range(1, D):
            if chi[a] == 0:
                continue
            # Kahan-compensated accumulation
            y = chi[a] * log(sin(M_PI * a / D)) - comp
            t = total + y
            comp = (t - total) - y
            total = t
    return total


def build_exp_table(int64_t p, int m, modulus):
    cdef const int64_t[:] f = np.ascontiguousarray(modulus, dtype=np.int64)
    cdef int64_t q = p ** m, e, code, w, top
    cdef int i
    out = np.empty(q - 1, dtype=np.int32)
    cdef int32_t[:] o = out
    digits = np.zeros(m, dtype=np.int64)
    cdef int64_t[:] d = digits
    d[0] = 1
    with nogil:
        for e in range(q - 1):
            code = 0
            w = 1
            for i in range(m):
                code += d[i] * w
                w *= p
            o[e] = <int32_t>code
            top = d[m - 1]
            for i in range(m - 1, 0, -1):
                d[i] = d[i - 1]
            d[0] = 0
            if top:
                for i in range(m):
                    d[i] = ((d[i] - top * f[i]) % p + p) % p
    return out


cdef inline int64_t _add(int64_t a, int64_t b, const int32_t[:] zech, int64_t qm1) noexcept nogil:
    cdef int64_t dd, z
    if a < 0:
        return b
    if b < 0:
        return a
    dd = b - a
    if dd < 0:
        dd += qm1
    z = zech[dd]
    if z < 0:
        return -1
    z += a
    return z - qm1 if z >= qm1 else z


cdef inline int64_t _mul(int64_t a, int64_t b, int64_t qm1) noexcept nogil:
    cdef int64_t z
    if a < 0 or b < 0:
        return -1
    z = a + b
    return z - qm1 if z >= qm1 else z


cdef inline int64_t _horner(const int64_t[:] c, int64_t x, const int32_t[:] zech, int64_t qm1) noexcept nogil:
    cdef int64_t acc = -1
    cdef Py_ssize_t i
    for i in range(c.shape[0]):
        acc = _add(_mul(acc, x, qm1), c[i], zech, qm1)
    return acc


def horner_logs(coef_logs, x_logs, zech_table, int64_t qm1):
    cdef const int64_t[:] c = np.ascontiguousarray(coef_logs, dtype=np.int64)
    cdef const int64_t[:] xs = np.ascontiguousarray(x_logs, dtype=np.int64)
    cdef const int32_t[:] zech = np.ascontiguousarray(zech_table, dtype=np.int32)
    cdef Py_ssize_t n = xs.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[:] o = out
    with nogil:
        for i in range(n):
            o[i] = _horner(c, xs[i], zech, qm1)
    return out


def hyperelliptic_affine_count(coef_logs, zech_table, int64_t q):
    cdef const int64_t[:] c = np.ascontiguousarray(coef_logs, dtype=np.int64)
    cdef const int32_t[:] zech = np.ascontiguousarray(zech_table, dtype=np.int32)
    cdef int64_t qm1 = q - 1, x, v, total = 0
    with nogil:
        for x in range(-1, qm1):
            v = _horner(c, x, zech, qm1)
            if v < 0:
                total += 1
            elif v % 2 == 0:
                total += 2
    return int(total)


cdef void _rows(const int64_t[:, :] F, int64_t x, const int32_t[:] zech, int64_t qm1, int64_t[:] row) noexcept nogil:
    # row[k] = coefficient of y^(dy-1-k) at this x
    cdef Py_ssize_t dx = F.shape[0], dy = F.shape[1], i, j
    cdef int64_t acc
    for j in range(dy):
        acc = -1
        for i in range(dx - 1, -1, -1):
            acc = _add(_mul(acc, x, qm1), F[i, j], zech, qm1)
        row[dy - 1 - j] = acc


def plane_affine_count(F, Fx, Fy, zech_table, int64_t q):
    cdef const int64_t[:, :] f = np.ascontiguousarray(F, dtype=np.int64)
    cdef const int64_t[:, :] fx = np.ascontiguousarray(Fx, dtype=np.int64)
    cdef const int64_t[:, :] fy = np.ascontiguousarray(Fy, dtype=np.int64)
    cdef const int32_t[:] zech = np.ascontiguousarray(zech_table, dtype=np.int32)
    cdef int64_t qm1 = q - 1, x, y, count = 0, singular = 0
    rf = np.empty(f.shape[1], dtype=np.int64)
    rx = np.empty(fx.shape[1], dtype=np.int64)
    ry = np.empty(fy.shape[1], dtype=np.int64)
    cdef int64_t[:] row_f = rf, row_x = rx, row_y = ry
    with nogil:
        for x in range(-1, qm1):
            _rows(f, x, zech, qm1, row_f)
            _rows(fx, x, zech, qm1, row_x)
            _rows(fy, x, zech, qm1, row_y)
            for y in range(-1, qm1):
                if _horner(row_f, y, zech, qm1) < 0:
                    count += 1
                    if _horner(row_x, y, zech, qm1) < 0 and _horner(row_y, y, zech, qm1) < 0:
                        singular += 1
    return int(count), int(singular)
