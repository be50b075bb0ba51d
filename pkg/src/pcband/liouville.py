"""Liouville normal form of ``E'' + lam*u*E = 0`` and the comparison bounds it gives.

``xi(x) = int_0^x sqrt(u)`` maps one period onto ``[0, A]``; with
``F = u(z)^{1/4} E(z)`` (``z`` the inverse of ``xi``) the equation becomes
``F'' + lam*F + theta(z(y))*F = 0`` where
``theta = 5 u'^2 / (16 u^3) - u'' / (4 u^2)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from pcband.profiles import CERT_SAMPLES, TrigPolynomial1D, shift_profile

TWO_PI = 2.0 * math.pi


def theta_values(u: TrigPolynomial1D, x, c: float = 0.0):
    """``theta`` of the shifted profile ``u + c`` from exact derivatives."""
    v = u(x, 0) + c
    d1 = u(x, 1)
    d2 = u(x, 2)
    return 5.0 * d1**2 / (16.0 * v**3) - d2 / (4.0 * v**2)


def theta_derivative(u: TrigPolynomial1D, x, c: float = 0.0):
    v = u(x, 0) + c
    d1, d2, d3 = u(x, 1), u(x, 2), u.derivative(3)(x)
    return (10.0 * d1 * d2 / (16.0 * v**3) - 15.0 * d1**3 / (16.0 * v**4)
            - d3 / (4.0 * v**2) + d2 * d1 / (2.0 * v**3))


@lru_cache(maxsize=1024)
def theta_sup(u: TrigPolynomial1D, c: float = 0.0) -> float:
    """Bound on ``sup|theta|`` from 2**14 samples plus a curvature margin."""
    if u.is_constant:
        return 0.0
    n = CERT_SAMPLES
    h = 1.0 / n
    xs = np.arange(n) * h
    vals = np.abs(theta_values(u, xs, c))
    dtheta = theta_derivative(u, xs, c)
    curvature = np.max(np.abs(np.roll(dtheta, -1) - np.roll(dtheta, 1))) / (2 * h)
    return float(vals.max() + 2.0 * curvature * h * h / 8.0)


def _sqrt_modes(u: TrigPolynomial1D, c: float) -> np.ndarray:
    """Fourier coefficients of ``sqrt(u + c)``, refined until the tail is negligible."""
    n = 256
    while True:
        xs = np.arange(n) / n
        hat = np.fft.fft(np.sqrt(u(xs) + c)) / n
        tail = np.abs(hat[n // 4: 3 * n // 4]).max()
        if tail < 1e-15 * abs(hat[0]) or n >= 2**16:
            return hat
        n *= 2


@lru_cache(maxsize=1024)
def liouville_period(u: TrigPolynomial1D, c: float = 0.0) -> float:
    """``A = int_0^1 sqrt(u + c)`` (periodic trapezoid rule, spectrally accurate)."""
    if u.is_constant:
        return math.sqrt(u.mean + c)
    return float(_sqrt_modes(u, c)[0].real)


@dataclass(frozen=True, eq=False)
class LiouvilleData:
    profile: TrigPolynomial1D
    A: float
    theta_sup: float
    _modes: np.ndarray
    _freqs: np.ndarray

    def xi(self, x):
        """``int_0^x sqrt(u)``; extends past one period by ``xi(x+1) = xi(x) + A``."""
        x = np.asarray(x, dtype=float)
        if self._freqs.size == 0:
            return self.A * x
        # sqrt(u) is real, so the negative frequencies are conjugates of these.
        k = TWO_PI * 1j * self._freqs
        ph = np.exp(np.multiply.outer(x, k))
        periodic = 2.0 * ((ph - 1.0) @ (self._modes / k)).real
        return self.A * x + periodic

    def xi_prime(self, x):
        return np.sqrt(self.profile(np.asarray(x, dtype=float)))

    def z(self, y, xtol: float = 1e-15):
        """Inverse of ``xi`` by bracketed, safeguarded Newton iteration."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        wraps = np.floor(y / self.A)
        r = y - wraps * self.A
        lo = np.zeros_like(r)
        hi = np.ones_like(r)
        x = r / self.A
        for _ in range(100):
            f = self.xi(x) - r
            lo = np.where(f < 0, x, lo)
            hi = np.where(f > 0, x, hi)
            step = f / self.xi_prime(x)
            cand = x - step
            bad = (cand <= lo) | (cand >= hi)
            cand = np.where(bad, 0.5 * (lo + hi), cand)
            done = np.abs(cand - x) <= xtol
            x = cand
            if np.all(done):
                break
        x = x + wraps
        return float(x[0]) if scalar else x

    def theta(self, x):
        return theta_values(self.profile, np.asarray(x, dtype=float))

    def theta_y(self, y):
        """``theta(z(y))``, the potential of the normal form."""
        return self.theta(self.z(y))

    def write_csv(self, path, points: int = 1001) -> None:
        xs = np.linspace(0.0, 1.0, points)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "xi", "theta"])
            for x, s, t in zip(xs, self.xi(xs), self.theta(xs)):
                w.writerow([repr(float(x)), repr(float(s)), repr(float(t))])


def build_liouville(u: TrigPolynomial1D, c: float = 0.0) -> LiouvilleData:
    v = shift_profile(u, c) if c != 0.0 else u
    if v.is_constant:
        return LiouvilleData(v, math.sqrt(v.mean), 0.0, np.zeros(0), np.zeros(0))
    hat = _sqrt_modes(v, 0.0)
    n = hat.size
    freqs = np.fft.fftfreq(n, 1.0 / n)
    keep = (freqs > 0) & (np.abs(hat) > 1e-16 * abs(hat[0]))
    return LiouvilleData(v, float(hat[0].real), theta_sup(v), hat[keep], freqs[keep])


# -- checks -----------------------------------------------------------------


def _second_derivative_6(f: np.ndarray, h: float) -> np.ndarray:
    """Sixth-order central second difference on interior points ``f[3:-3]``."""
    c = (1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90)
    out = np.zeros(f.size - 6, dtype=f.dtype)
    for k, w in enumerate(c):
        out += w * f[k: k + f.size - 6]
    return out / h**2


def transform_residual(u: TrigPolynomial1D, lam: float, spacing: float = 1e-3) -> float:
    """Max of ``|F'' + lam*F + theta(z)*F|`` on a uniform grid in ``y``.

    ``E`` solves ``E'' + lam*u*E = 0`` with ``E(0) = 1, E'(0) = 0``; ``F`` is
    its Liouville image and ``F''`` is taken by sixth-order differences.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    data = build_liouville(u)
    n = int(round(data.A / spacing))
    ys = np.linspace(0.0, data.A, n + 1)
    h = ys[1] - ys[0]
    xs = data.z(ys)
    xs[0], xs[-1] = 0.0, 1.0
    sol = solve_ivp(lambda x, s: [s[1], -lam * float(u(x)) * s[0]], (0.0, 1.0),
                    [1.0, 0.0], method="DOP853", t_eval=xs, rtol=1e-13, atol=1e-13,
                    max_step=1e-2)
    e = sol.y[0]
    f = u(xs) ** 0.25 * e if not u.is_constant else u.mean**0.25 * e
    fpp = _second_derivative_6(f, h)
    inner = slice(3, f.size - 3)
    theta = data.theta(xs[inner]) if not u.is_constant else 0.0
    return float(np.max(np.abs(fpp + lam * f[inner] + theta * f[inner])))


def free_floquet_eigenvalues(A: float, alpha: float, n_max: int) -> np.ndarray:
    """Sorted ``((alpha + 2 pi k) / A)^2`` over integer k; the lowest ``n_max``."""
    ks = np.arange(-n_max - 1, n_max + 2)
    vals = np.sort(((alpha + TWO_PI * ks) / A) ** 2)
    return vals[:n_max]


@dataclass(frozen=True)
class ComparisonReport:
    rows: list[tuple[int, float, float, float, float]]  # n, alpha, lam, lam_star, |diff|
    theta_sup: float
    A: float

    @property
    def max_violation(self) -> float:
        return max(d for *_, d in self.rows) - self.theta_sup

    @property
    def max_difference(self) -> float:
        return max(d for *_, d in self.rows)


def comparison_check(u: TrigPolynomial1D, n_max: int, alpha_set, tol: float | None = None
                     ) -> ComparisonReport:
    """Compare Floquet eigenvalues of the weighted problem with the free ones on ``[0, A]``."""
    from pcband import hill1d

    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    tol = tol or hill1d.DEFAULT_TOL
    data = build_liouville(u)
    hp = hill1d.HillProblem(u)
    rows = []
    for alpha in alpha_set:
        star = free_floquet_eigenvalues(data.A, alpha, n_max)
        for n in range(1, n_max + 1):
            lam = hill1d.floquet_eigenvalue(hp, n, alpha, tol)
            rows.append((n, float(alpha), lam, float(star[n - 1]), abs(lam - star[n - 1])))
    return ComparisonReport(rows, data.theta_sup, data.A)


@dataclass(frozen=True)
class InclusionRow:
    n: int
    inner_lo: float
    inner_hi: float
    band_lo: float
    band_hi: float

    @property
    def applies(self) -> bool:
        return self.inner_lo < self.inner_hi

    def contained(self, tol: float = 1e-6) -> bool:
        return self.band_lo <= self.inner_lo + tol and self.inner_hi - tol <= self.band_hi


def inclusion_check(u: TrigPolynomial1D, n_max: int, tol: float | None = None
                    ) -> list[InclusionRow]:
    """Band-by-band test of ``[pi^2 (n-1)^2/A^2 + C, pi^2 n^2/A^2 - C] inside J_n``.

    For n = 1 the left end is 0 (the band always starts at ``lambda_1(0) = 0``).
    """
    from pcband import hill1d

    tol = tol or hill1d.DEFAULT_TOL
    data = build_liouville(u)
    hp = hill1d.HillProblem(u)
    b = math.pi**2 / data.A**2
    rows = []
    for n in range(1, n_max + 1):
        lo = 0.0 if n == 1 else b * (n - 1) ** 2 + data.theta_sup
        hi = b * n**2 - data.theta_sup
        bd = hill1d.band(hp, n, tol)
        rows.append(InclusionRow(n, lo, hi, bd.lo, bd.hi))
    return rows


def shifted_theta_check(u: TrigPolynomial1D, d0: float, shifts: int = 11) -> tuple[float, float]:
    """Largest sampled ``|theta(., c)|`` over ``|c| <= 1/(2 d0)`` versus ``5/2 d0^5 + d0^3``."""
    worst = 0.0
    for c in np.linspace(-1.0 / (2 * d0), 1.0 / (2 * d0), shifts):
        worst = max(worst, theta_sup(u, float(c)))
    return worst, 2.5 * d0**5 + d0**3
