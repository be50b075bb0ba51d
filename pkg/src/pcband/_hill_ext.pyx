# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) integrator for y'' + q(x) y = 0.

q(x) = lam * u(x) + rho(x), with u and rho finite trigonometric series of
period 1. The state carries both fundamental solutions and the Pruefer angle
of the (0, 1) solution, so one pass yields the monodromy matrix and the
Dirichlet oscillation count.
"""

import numpy as np

from libc.math cimport cos, sin, fabs, pow, M_PI

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0

cdef enum:
    NS = 5


cdef inline double _series(double x, double mean, const double[:] ac,
                           const double[:] bs, Py_ssize_t m) noexcept nogil:
    cdef double c1 = cos(2.0 * M_PI * x), s1 = sin(2.0 * M_PI * x)
    cdef double ck = 1.0, sk = 0.0, tmp
    cdef double total = mean
    cdef Py_ssize_t k
    for k in range(m):
        tmp = ck * c1 - sk * s1
        sk = sk * c1 + ck * s1
        ck = tmp
        total += ac[k] * ck + bs[k] * sk
    return total


cdef struct Coeffs:
    double lam
    double wmean
    double pmean
    Py_ssize_t wm
    Py_ssize_t pm


cdef inline void _rhs(double x, double* y, double* dy, Coeffs* cf,
                      const double[:] wa, const double[:] wb,
                      const double[:] pa, const double[:] pb) noexcept nogil:
    cdef double q = cf.lam * _series(x, cf.wmean, wa, wb, cf.wm)
    cdef double ct, st
    if cf.pm > 0 or cf.pmean != 0.0:
        q += _series(x, cf.pmean, pa, pb, cf.pm)
    dy[0] = y[1]
    dy[1] = -q * y[0]
    dy[2] = y[3]
    dy[3] = -q * y[2]
    ct = cos(y[4])
    st = sin(y[4])
    dy[4] = ct * ct + q * st * st


cdef int _run(Coeffs* cf, const double[:] wa, const double[:] wb,
              const double[:] pa, const double[:] pb, double length,
              double tol, double max_step, const double[:] xs,
              double[:, :] out, double* yfinal, long* nsteps,
              double* fail_x) noexcept nogil:
    cdef double y[NS]
    cdef double yn[NS]
    cdef double tmp[NS]
    cdef double k1[NS]
    cdef double k2[NS]
    cdef double k3[NS]
    cdef double k4[NS]
    cdef double k5[NS]
    cdef double k6[NS]
    cdef double k7[NS]
    cdef double x = 0.0, h, hprop, err, sc, e, fac, target, hmin
    cdef Py_ssize_t i, nout = xs.shape[0], iout = 0
    cdef int last, rejected = 0
    cdef long steps = 0

    y[0] = 1.0
    y[1] = 0.0
    y[2] = 0.0
    y[3] = 1.0
    y[4] = 0.0
    while iout < nout and xs[iout] <= 0.0:
        for i in range(4):
            out[iout, i] = y[i]
        iout += 1

    hprop = max_step if max_step < 1e-3 else 1e-3
    hmin = 1e-14 * (length if length > 1.0 else 1.0)
    _rhs(x, y, k1, cf, wa, wb, pa, pb)

    while x < length:
        target = length
        if iout < nout and xs[iout] < target:
            target = xs[iout]
        last = 0
        h = hprop
        if x + h >= target:
            h = target - x
            last = 1
        if hprop < hmin:
            fail_x[0] = x
            return -1

        for i in range(NS):
            tmp[i] = y[i] + h * A21 * k1[i]
        _rhs(x + C2 * h, tmp, k2, cf, wa, wb, pa, pb)
        for i in range(NS):
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        _rhs(x + C3 * h, tmp, k3, cf, wa, wb, pa, pb)
        for i in range(NS):
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(x + C4 * h, tmp, k4, cf, wa, wb, pa, pb)
        for i in range(NS):
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                 + A54 * k4[i])
        _rhs(x + C5 * h, tmp, k5, cf, wa, wb, pa, pb)
        for i in range(NS):
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                 + A64 * k4[i] + A65 * k5[i])
        _rhs(x + h, tmp, k6, cf, wa, wb, pa, pb)
        for i in range(NS):
            yn[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                + B5 * k5[i] + B6 * k6[i])
        _rhs(x + h, yn, k7, cf, wa, wb, pa, pb)

        err = 0.0
        for i in range(NS):
            e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                     + E6 * k6[i] + E7 * k7[i])
            sc = fabs(y[i]) if fabs(y[i]) > fabs(yn[i]) else fabs(yn[i])
            sc = tol * (1.0 + sc)
            e = fabs(e) / sc
            if e > err or e != e:   # a NaN forces rejection
                err = e

        if err <= 1.0:
            steps += 1
            if last:
                x = target
            else:
                x = x + h
            for i in range(NS):
                y[i] = yn[i]
                k1[i] = k7[i]
            while iout < nout and xs[iout] <= x:
                for i in range(4):
                    out[iout, i] = y[i]
                iout += 1
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                if fac < 0.2:
                    fac = 0.2
            if rejected and fac > 1.0:
                fac = 1.0
            rejected = 0
            if last:
                if h * fac > hprop:
                    hprop = h * fac
            else:
                hprop = h * fac
            if hprop > max_step:
                hprop = max_step
        else:
            rejected = 1
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2 or fac != fac:
                fac = 0.2
            hprop = h * fac

    for i in range(NS):
        yfinal[i] = y[i]
    nsteps[0] = steps
    return 0


def integrate(double lam, double wmean, const double[:] wa, const double[:] wb,
              double pmean, const double[:] pa, const double[:] pb,
              double length, double tol, double max_step, xs=None):
    """Integrate both fundamental solutions across [0, length].

    Returns ``(status, state, nsteps, samples)``. ``status`` is 0 on success;
    on step-size underflow it is -1 and ``state[0]`` holds the failing x.
    ``state`` is ``(y1, y1', y2, y2', prufer)`` at ``length`` and ``samples``
    holds ``(y1, y1', y2, y2')`` at each point of the sorted array ``xs``.
    """
    cdef Coeffs cf
    cf.lam = lam
    cf.wmean = wmean
    cf.pmean = pmean
    cf.wm = wa.shape[0]
    cf.pm = pa.shape[0]
    cdef double[::1] grid
    if xs is None:
        grid = np.empty(0)
    else:
        grid = np.ascontiguousarray(xs, dtype=np.float64)
    samples = np.zeros((grid.shape[0], 4))
    cdef double[:, :] out = samples
    cdef double yfinal[NS]
    cdef long nsteps = 0
    cdef double fail_x = 0.0
    cdef int status
    with nogil:
        status = _run(&cf, wa, wb, pa, pb, length, tol, max_step, grid, out,
                      yfinal, &nsteps, &fail_x)
    if status != 0:
        return status, (fail_x, 0.0, 0.0, 0.0, 0.0), nsteps, samples
    state = (yfinal[0], yfinal[1], yfinal[2], yfinal[3], yfinal[4])
    return status, state, nsteps, samples
