"""Pure-Python Dormand-Prince 5(4) integrator, the fallback for ``_hill_ext``.

Same tableau, error norm and step controller as the compiled kernel, so both
backends take identical step sequences up to floating-point rounding.
"""

import math

import numpy as np

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0
A64, A65 = 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4 = 71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0
E5, E6, E7 = -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0

TWO_PI = 2.0 * math.pi


def _series(x, mean, ac, bs):
    c1 = math.cos(TWO_PI * x)
    s1 = math.sin(TWO_PI * x)
    ck, sk = 1.0, 0.0
    total = mean
    for a, b in zip(ac, bs):
        ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
        total += a * ck + b * sk
    return total


def _make_q(lam, wmean, wa, wb, pmean, pa, pb, potential):
    wa, wb = [float(v) for v in wa], [float(v) for v in wb]
    pa, pb = [float(v) for v in pa], [float(v) for v in pb]
    has_series = bool(pa) or pmean != 0.0

    def q(x):
        val = lam * _series(x, wmean, wa, wb)
        if has_series:
            val += _series(x, pmean, pa, pb)
        if potential is not None:
            val += potential(x)
        return val

    return q


def _rhs(x, y, q):
    qx = q(x)
    ct = math.cos(y[4])
    st = math.sin(y[4])
    return (y[1], -qx * y[0], y[3], -qx * y[2], ct * ct + qx * st * st)


def integrate(lam, wmean, wa, wb, pmean, pa, pb, length, tol, max_step,
              xs=None, potential=None):
    """Mirror of ``_hill_ext.integrate``; ``potential`` adds a callable term."""
    q = _make_q(lam, wmean, wa, wb, pmean, pa, pb, potential)
    grid = np.empty(0) if xs is None else np.ascontiguousarray(xs, dtype=float)
    nout = grid.shape[0]
    samples = np.zeros((nout, 4))
    y = (1.0, 0.0, 0.0, 1.0, 0.0)
    iout = 0
    while iout < nout and grid[iout] <= 0.0:
        samples[iout] = y[:4]
        iout += 1

    x = 0.0
    hprop = min(max_step, 1e-3)
    hmin = 1e-14 * max(length, 1.0)
    k1 = _rhs(x, y, q)
    rejected = False
    steps = 0
    rng = range(5)
    while x < length:
        target = length
        if iout < nout and grid[iout] < target:
            target = grid[iout]
        last = False
        h = hprop
        if x + h >= target:
            h = target - x
            last = True
        if hprop < hmin:
            return -1, (x, 0.0, 0.0, 0.0, 0.0), steps, samples

        k2 = _rhs(x + C2 * h, [y[i] + h * A21 * k1[i] for i in rng], q)
        k3 = _rhs(x + C3 * h, [y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in rng], q)
        k4 = _rhs(x + C4 * h, [y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                               for i in rng], q)
        k5 = _rhs(x + C5 * h, [y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                           + A54 * k4[i]) for i in rng], q)
        k6 = _rhs(x + h, [y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                      + A64 * k4[i] + A65 * k5[i]) for i in rng], q)
        yn = [y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
              for i in rng]
        k7 = _rhs(x + h, yn, q)

        err = 0.0
        for i in rng:
            e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                     + E6 * k6[i] + E7 * k7[i])
            sc = tol * (1.0 + max(abs(y[i]), abs(yn[i])))
            v = abs(e) / sc
            if v > err or v != v:   # a NaN forces rejection
                err = v

        if err <= 1.0:
            steps += 1
            x = target if last else x + h
            y = yn
            k1 = k7
            while iout < nout and grid[iout] <= x:
                samples[iout] = y[:4]
                iout += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if rejected:
                fac = min(fac, 1.0)
            rejected = False
            hprop = max(hprop, h * fac) if last else h * fac
            hprop = min(hprop, max_step)
        else:
            rejected = True
            hprop = h * max(0.2, 0.9 * err ** -0.2)

    return 0, tuple(y), steps, samples
