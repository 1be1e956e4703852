# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Same semantics as ``_pykernel``; callable envelopes are not supported."""
from libc.math cimport log, fabs, exp, expm1, tanh, pow, copysign, INFINITY

cdef double LN2 = log(2.0)
cdef double NEG_INF = -INFINITY

cdef enum:
    FREE = 0
    HARMONIC = 1
    LATTICE = 2
    POLY = 3


cdef struct Model:
    int fam
    double p1
    double p2
    int conf
    double alpha
    double hbar2_m
    double hw
    double mw2
    double s3
    double s2l


cdef Model _unpack(km):
    cdef Model m
    if km.conf > POLY:
        raise TypeError("compiled kernel cannot evaluate callable envelopes")
    m.fam = km.fam
    m.p1 = km.p1
    m.p2 = km.p2
    m.conf = km.conf
    m.alpha = km.alpha
    m.hbar2_m = km.hbar2_m
    m.hw = km.hw
    m.mw2 = km.mw2
    m.s3 = km.s3
    m.s2l = km.s2l
    return m


cdef inline double logf(int fam, double p1, double p2, double x) nogil:
    cdef double a
    if fam == 0:
        if p1 == 0.0:
            return 0.0
        if x == 0.0:
            return NEG_INF
        return p1 * log(fabs(x))
    if fam == 1:
        return p1 * fabs(x)
    if fam == 2:
        return p1 * x * x
    if fam == 3:
        if p1 == 0.0:
            return 0.0
        if x == 0.0:
            return NEG_INF
        a = fabs(x / p2)
        return p1 * (a - LN2 + log(-expm1(-2.0 * a)))
    return p1 * pow(fabs(x), p2)


cdef inline double dlogf(int fam, double p1, double p2, double x) nogil:
    cdef double s
    if fam == 0:
        return p1 / x
    if fam == 1:
        if x != 0.0:
            return p1 * copysign(1.0, x)
        return 0.0
    if fam == 2:
        return 2.0 * p1 * x
    if fam == 3:
        return p1 / (p2 * tanh(x / p2))
    s = 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)
    return p1 * p2 * pow(fabs(x), p2 - 1.0) * s


cdef inline double d2logf(int fam, double p1, double p2, double x) nogil:
    cdef double a, c
    if fam == 0:
        return -p1 / (x * x)
    if fam == 1:
        return 0.0
    if fam == 2:
        return 2.0 * p1
    if fam == 3:
        a = fabs(x / p2)
        c = 2.0 * exp(-a) / -expm1(-2.0 * a)
        return -p1 / (p2 * p2) * c * c
    return p1 * p2 * (p2 - 1.0) * pow(fabs(x), p2 - 2.0)


cdef inline double _poly(const double[::1] coeffs, double x, int deriv) nogil:
    cdef double acc = 0.0, f
    cdef Py_ssize_t k, n = coeffs.shape[0]
    cdef int t
    for k in range(n - 1, deriv - 1, -1):
        f = 1.0
        for t in range(deriv):
            f *= k - t
        acc = acc * x + f * coeffs[k]
    return acc


cdef inline double env(Model* m, const double[::1] sites, const double[::1] poly,
                       Py_ssize_t i, double x) nogil:
    cdef double d
    if m.conf == HARMONIC:
        return -0.5 * m.alpha * x * x
    if m.conf == LATTICE:
        d = x - sites[i]
        return -0.5 * m.alpha * d * d
    if m.conf == POLY:
        return _poly(poly, x, 0)
    return 0.0


cdef inline double denv(Model* m, const double[::1] sites, const double[::1] poly,
                        Py_ssize_t i, double x) nogil:
    if m.conf == HARMONIC:
        return -m.alpha * x
    if m.conf == LATTICE:
        return -m.alpha * (x - sites[i])
    if m.conf == POLY:
        return _poly(poly, x, 1)
    return 0.0


cdef inline double d2env(Model* m, const double[::1] poly, double x) nogil:
    if m.conf == HARMONIC or m.conf == LATTICE:
        return -m.alpha
    if m.conf == POLY:
        return _poly(poly, x, 2)
    return 0.0


cdef double _log_psi(double[::1] x, Model* m, const double[::1] sites,
                     const double[::1] poly) nogil:
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double total = 0.0, lf
    for i in range(n):
        total += env(m, sites, poly, i, x[i])
    for i in range(n):
        for j in range(i + 1, n):
            lf = logf(m.fam, m.p1, m.p2, x[i] - x[j])
            if lf == NEG_INF:
                return NEG_INF
            total += lf
    return total


cdef double _local_energy(double[::1] x, Model* m, const double[::1] sites,
                          const double[::1] poly, double[:, ::1] d) nogil:
    cdef Py_ssize_t n = x.shape[0], i, j, l
    cdef double k = m.hbar2_m
    cdef double grad2 = 0.0, lap = 0.0, v2 = 0.0, v2l = 0.0, cross = 0.0
    cdef double one = 0.0, v3 = 0.0, xij, dij, d2, g, dx, dv
    for i in range(n):
        for j in range(i + 1, n):
            xij = x[i] - x[j]
            dij = dlogf(m.fam, m.p1, m.p2, xij)
            d2 = d2logf(m.fam, m.p1, m.p2, xij)
            d[i, j] = dij
            d[j, i] = -dij
            lap += 2.0 * d2
            v2 += d2 + dij * dij
            if m.conf == HARMONIC:
                v2l += xij * dij
            elif m.conf == LATTICE:
                v2l += (xij - (sites[i] - sites[j])) * dij
            elif m.conf == POLY:
                cross += (denv(m, sites, poly, i, x[i]) - denv(m, sites, poly, j, x[j])) * dij
    for i in range(n):
        g = denv(m, sites, poly, i, x[i])
        for j in range(n):
            if j != i:
                g += d[i, j]
        grad2 += g * g
        lap += d2env(m, poly, x[i])
        if m.conf == HARMONIC:
            one += 0.5 * m.mw2 * x[i] * x[i]
        elif m.conf == LATTICE:
            dx = x[i] - sites[i]
            one += 0.5 * m.mw2 * dx * dx
        elif m.conf == POLY:
            dv = denv(m, sites, poly, i, x[i])
            one += 0.5 * k * (d2env(m, poly, x[i]) + dv * dv)
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                v3 += d[i, j] * d[i, l] - d[i, j] * d[j, l] + d[i, l] * d[j, l]
    return (
        -0.5 * k * (grad2 + lap)
        + k * v2
        + m.s3 * k * v3
        - m.s2l * m.hw * v2l
        + one
        + k * cross
    )


def log_psi(double[::1] x, km):
    cdef Model m = _unpack(km)
    return _log_psi(x, &m, km.sites, km.poly)


def local_energy(double[::1] x, km):
    cdef Model m = _unpack(km)
    cdef Py_ssize_t n = x.shape[0]
    import numpy as np
    cdef double[:, ::1] d = np.zeros((n, n))
    return _local_energy(x, &m, km.sites, km.poly, d)


def metropolis(double[::1] x, km, const double[::1] disp, const double[::1] acc_u,
               double step, Py_ssize_t thin, double[:, ::1] out_x, double[::1] out_e):
    cdef Model m = _unpack(km)
    cdef const double[::1] sites = km.sites
    cdef const double[::1] poly = km.poly
    cdef Py_ssize_t n = x.shape[0], t, p, j, rec = 0, accepted = 0
    cdef Py_ssize_t nsteps = disp.shape[0]
    cdef double old, new, delta, lf, ratio
    cdef bint node
    import numpy as np
    cdef double[:, ::1] d = np.zeros((n, n))
    with nogil:
        for t in range(nsteps):
            p = t % n
            old = x[p]
            new = old + step * disp[t]
            delta = env(&m, sites, poly, p, new) - env(&m, sites, poly, p, old)
            node = False
            for j in range(n):
                if j == p:
                    continue
                lf = logf(m.fam, m.p1, m.p2, new - x[j])
                if lf == NEG_INF:
                    node = True
                    break
                delta += lf - logf(m.fam, m.p1, m.p2, old - x[j])
            if not node:
                ratio = 2.0 * delta
                if ratio > 0.0:
                    ratio = 0.0
                if acc_u[t] < exp(ratio):
                    x[p] = new
                    accepted += 1
            if thin > 0 and (t + 1) % thin == 0:
                for j in range(n):
                    out_x[rec, j] = x[j]
                out_e[rec] = _local_energy(x, &m, sites, poly, d)
                rec += 1
    return accepted
