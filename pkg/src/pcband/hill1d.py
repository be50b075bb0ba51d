"""Floquet spectra of the weighted Hill equation ``E'' + lam*u*E + rho*E = 0``.

Spectral membership is read off the discriminant (trace of the monodromy
matrix). The n-th Floquet eigenvalue is located between consecutive
Dirichlet eigenvalues, which are found by counting the Pruefer angle of the
(0, 1) solution; this pins the band index without relying on spacing.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from pcband import _kernels
from pcband.profiles import TrigPolynomial1D, TrigSeries1D

DEFAULT_TOL = 1e-11
MAX_STEP = 1e-2


class IntegrationError(RuntimeError):
    """Adaptive step size underflowed."""

    def __init__(self, x: float, lam: float):
        super().__init__(f"step-size underflow at x={x:.6g} (lambda={lam:.6g})")
        self.x = x
        self.lam = lam


class BracketError(RuntimeError):
    """A root could not be bracketed inside the scanned window."""


class Membership(enum.Enum):
    CERTIFIED_IN = "certified-in"
    CERTIFIED_OUT = "certified-out"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class HillProblem:
    """``E'' + lam*weight*E + potential*E = 0`` on one period.

    ``potential`` is ``None`` (zero), a :class:`TrigSeries1D`, or a callable.
    A non-constant weight fixes the period to 1.
    """

    weight: TrigPolynomial1D
    potential: TrigSeries1D | Callable[[float], float] | None = None
    period: float = 1.0
    potential_sup: float | None = None

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if not self.weight.is_constant and self.period != 1.0:
            raise ValueError("a non-constant weight requires period 1")
        if isinstance(self.potential, TrigSeries1D) and self.period != 1.0 \
                and not self.potential.is_constant:
            raise ValueError("a trigonometric potential requires period 1")

    @property
    def has_potential(self) -> bool:
        return self.potential is not None

    @property
    def rho_sup(self) -> float:
        if self.potential is None:
            return 0.0
        if self.potential_sup is not None:
            return self.potential_sup
        if isinstance(self.potential, TrigSeries1D):
            return self.potential.sup_abs(0)
        xs = np.linspace(0.0, self.period, 4097)
        return float(np.max(np.abs([self.potential(x) for x in xs])))

    def kernel_args(self):
        wmean, wa, wb = self.weight.arrays()
        if isinstance(self.potential, TrigSeries1D):
            pmean, pa, pb = self.potential.arrays()
            call = None
        else:
            pmean, pa, pb = 0.0, np.zeros(0), np.zeros(0)
            call = self.potential
        return wmean, wa, wb, pmean, pa, pb, call


@dataclass(frozen=True)
class MonodromyMatrix:
    m11: float
    m12: float
    m21: float
    m22: float

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


@dataclass(frozen=True)
class BandInterval:
    index: int
    lo: float
    hi: float
    lo_alpha: float
    hi_alpha: float


@dataclass(frozen=True)
class SpectrumReport1D:
    bands: list[BandInterval]
    gaps: list[tuple[float, float]]
    lambda_max: float


@dataclass(frozen=True)
class _Pass:
    matrix: MonodromyMatrix
    prufer: float
    steps: int


def _integrate(hp: HillProblem, lam: float, tol: float, xs=None, backend=None):
    wmean, wa, wb, pmean, pa, pb, call = hp.kernel_args()
    status, state, steps, samples = _kernels.integrate(
        float(lam), wmean, wa, wb, pmean, pa, pb, float(hp.period), float(tol),
        min(MAX_STEP, hp.period / 16), xs, call, backend)
    if status != 0:
        raise IntegrationError(state[0], lam)
    return state, steps, samples


def _pass(hp: HillProblem, lam: float, tol: float, backend=None) -> _Pass:
    (y1, d1, y2, d2, theta), steps, _ = _integrate(hp, lam, tol, backend=backend)
    # Snap the integrated Pruefer angle onto the branch fixed by (y2, y2').
    phi = math.atan2(y2, d2)
    theta = phi + 2.0 * math.pi * round((theta - phi) / (2.0 * math.pi))
    return _Pass(MonodromyMatrix(y1, y2, d1, d2), theta, steps)


def monodromy(hp: HillProblem, lam: float, tol: float = DEFAULT_TOL,
              backend: str | None = None) -> MonodromyMatrix:
    """Transfer matrix of ``(E, E')`` across one period."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _pass(hp, lam, tol, backend).matrix


def discriminant(hp: HillProblem, lam: float, tol: float = DEFAULT_TOL) -> float:
    return monodromy(hp, lam, tol).trace


def fundamental_solutions(hp: HillProblem, lam: float, xs, tol: float = 1e-12) -> np.ndarray:
    """``(y1, y1', y2, y2')`` at the sorted points ``xs`` in ``[0, period]``."""
    _, _, samples = _integrate(hp, lam, tol, xs=np.asarray(xs, dtype=float))
    return samples


def in_spectrum(hp: HillProblem, lam: float, margin: float = 1e-8,
                tol: float = DEFAULT_TOL) -> Membership:
    if margin <= 0:
        raise ValueError("margin must be positive")
    d = abs(discriminant(hp, lam, tol))
    if d <= 2.0 - margin:
        return Membership.CERTIFIED_IN
    if d >= 2.0 + margin:
        return Membership.CERTIFIED_OUT
    return Membership.INDETERMINATE


# -- eigenvalues ------------------------------------------------------------


def _lower_limit(hp: HillProblem) -> float:
    """A value strictly below the whole Floquet spectrum."""
    return -hp.rho_sup / hp.weight.min_value - 1.0


def _window(hp: HillProblem, m: int) -> tuple[float, float]:
    """Initial bracket for the m-th Dirichlet eigenvalue from the comparison bound."""
    from pcband.liouville import liouville_period, theta_sup

    a = liouville_period(hp.weight) * hp.period
    spread = 2.0 * (theta_sup(hp.weight) + hp.rho_sup / hp.weight.min_value) + 1.0
    centre = (math.pi * m / a) ** 2
    return centre - spread, centre + spread


@lru_cache(maxsize=4096)
def dirichlet_eigenvalue(hp: HillProblem, m: int, tol: float = DEFAULT_TOL) -> float:
    """The m-th eigenvalue with ``E(0) = E(l) = 0`` (m >= 1)."""
    if m < 1:
        raise ValueError("m must be >= 1")

    def g(lam):
        return _pass(hp, lam, tol).prufer - m * math.pi

    lo, hi = _window(hp, m)
    floor = _lower_limit(hp)
    lo = max(lo, floor)
    width = hi - lo
    for _ in range(200):
        if g(lo) < 0:
            break
        if lo <= floor:
            raise BracketError(f"Dirichlet eigenvalue {m}: no lower bracket above {floor}")
        lo = max(floor, lo - width)
        width *= 2
    width = hi - lo
    for _ in range(200):
        if g(hi) > 0:
            break
        hi += width
        width *= 2
    else:
        raise BracketError(f"Dirichlet eigenvalue {m}: window [{lo}, {hi}] exhausted")
    return brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def floquet_eigenvalue(hp: HillProblem, n: int, alpha: float,
                       tol: float = DEFAULT_TOL) -> float:
    """The n-th eigenvalue of the problem with ``E(l) = e^{i alpha} E(0)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lo = _lower_limit(hp) if n == 1 else dirichlet_eigenvalue(hp, n - 1, tol)
    hi = dirichlet_eigenvalue(hp, n, tol)
    target = 2.0 * math.cos(alpha)
    sign = 1.0 if n % 2 == 1 else -1.0
    noise = 1e2 * tol

    def g(lam):
        p = _pass(hp, lam, tol).matrix
        return sign * (p.trace - target), p.m21

    # On [mu_{n-1}, mu_n] g goes from >= 0 to <= 0 with one transversal
    # crossing. An endpoint where g vanishes is a periodic or antiperiodic
    # eigenvalue; there m12 = 0 and m11 = m22, so d(trace)/dlam has the sign
    # of m21 and tells whether the open gap continues into the interval.
    g_lo, m21_lo = g(lo)
    if g_lo <= noise:
        if sign * m21_lo <= 0:
            return lo
        lo, done = _step_off(g, lo, hi, +1, noise)
        if done:
            return lo
    g_hi, m21_hi = g(hi)
    if g_hi >= -noise:
        if sign * m21_hi <= 0:
            return hi
        hi, done = _step_off(g, hi, lo, -1, noise)
        if done:
            return hi
    return brentq(lambda lam: g(lam)[0], lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def _step_off(g, edge, other, direction, noise):
    """Move from a gap edge into the gap until ``g`` clears the noise floor.

    Returns ``(point, done)``; ``done`` means the crossing lies within the
    probed distance of ``edge`` and ``edge`` itself is returned.
    """
    delta = 1e-10 * (1.0 + abs(edge))
    while abs(delta) < abs(other - edge):
        probe = edge + direction * delta
        val = g(probe)[0]
        if direction * val > noise:
            return probe, False
        if direction * val < -noise:
            return edge, True
        delta *= 4.0
    return edge, True


def band(hp: HillProblem, n: int, tol: float = DEFAULT_TOL) -> BandInterval:
    at0 = floquet_eigenvalue(hp, n, 0.0, tol)
    atpi = floquet_eigenvalue(hp, n, math.pi, tol)
    if at0 <= atpi:
        return BandInterval(n, at0, atpi, 0.0, math.pi)
    return BandInterval(n, atpi, at0, math.pi, 0.0)


def gaps(hp: HillProblem, lambda_max: float, tol: float = DEFAULT_TOL,
         gap_tol: float = 1e-8) -> SpectrumReport1D:
    """Bands up to ``lambda_max`` and the open gaps between them.

    Edges closer than ``gap_tol * (1 + lambda)`` count as touching.
    """
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    bands: list[BandInterval] = []
    n = 1
    while True:
        b = band(hp, n, tol)
        bands.append(b)
        if b.lo > lambda_max:
            break
        n += 1
    found = []
    lo_clip = min(0.0, bands[0].lo)
    if bands[0].lo > lo_clip + gap_tol:
        found.append((lo_clip, bands[0].lo))
    reach = bands[0].hi
    for b in bands[1:]:
        if b.lo - reach > gap_tol * (1.0 + abs(reach)) and reach < lambda_max:
            found.append((reach, min(b.lo, lambda_max)))
        reach = max(reach, b.hi)
    return SpectrumReport1D(bands[:-1] if bands[-1].lo > lambda_max else bands,
                            found, lambda_max)


# -- independent oracle -----------------------------------------------------


def fd_floquet_eigs(hp: HillProblem, alpha: float, n_max: int,
                    grid_points: int = 4096) -> np.ndarray:
    """Lowest Floquet eigenvalues from a second-difference discretisation.

    Nodes ``x_j = j*h``; the stencil wraps with phase ``e^{+-i alpha}``.
    The generalised problem ``K f = lam U f`` is symmetrised with ``U^{-1/2}``.
    """
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")
    n = grid_points
    h = hp.period / n
    xs = np.arange(n) * h
    u = hp.weight(xs) if not hp.weight.is_constant else np.full(n, hp.weight.mean)
    if hp.potential is None:
        rho = np.zeros(n)
    elif isinstance(hp.potential, TrigSeries1D):
        rho = hp.potential(xs) if not hp.potential.is_constant else np.full(n, hp.potential.mean)
    else:
        rho = np.array([hp.potential(x) for x in xs])

    phase = np.exp(1j * alpha)
    main = 2.0 / h**2 - rho
    off = -np.ones(n - 1) / h**2
    k = sp.diags([off, main, off], [-1, 0, 1], shape=(n, n), dtype=complex).tolil()
    k[n - 1, 0] += -phase / h**2
    k[0, n - 1] += -np.conj(phase) / h**2
    s = sp.diags(1.0 / np.sqrt(u))
    op = (s @ k.tocsc() @ s).tocsc()
    shift = _lower_limit(hp) - 1.0
    try:
        vals = spla.eigsh(op, k=n_max, sigma=shift, which="LM",
                          return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise RuntimeError(f"eigensolver did not converge: {exc}") from None
    return np.sort(vals.real)


# -- output -----------------------------------------------------------------


def write_bands_csv(path, bands: list[BandInterval]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "alpha_lo", "lambda_lo", "alpha_hi", "lambda_hi"])
        for b in bands:
            w.writerow([b.index, repr(b.lo_alpha), repr(b.lo), repr(b.hi_alpha), repr(b.hi)])


def write_gaps_csv(path, gap_list: list[tuple[float, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["gap_lo", "gap_hi", "width"])
        for lo, hi in gap_list:
            w.writerow([repr(lo), repr(hi), repr(hi - lo)])
