"""Plane-wave (Fourier-Galerkin) solver for ``-Laplace E = lam * eps * E`` on the
unit square with Bloch conditions ``E(x + e1) = e^{i alpha} E``,
``E(x + e2) = e^{i beta} E``.

With the basis ``exp(i (k + 2 pi G) . x)``, ``|G|_inf <= N``, the problem becomes
``K c = lam M c`` where ``K`` is diagonal with ``|k + 2 pi G|^2`` and
``M[G, G'] = eps_hat(G - G')``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from pcband.profiles import Profile2D

TWO_PI = 2.0 * math.pi
DEFAULT_CUTOFF = 8


class FactorizationError(np.linalg.LinAlgError):
    def __init__(self, minor: int, size: int):
        super().__init__(f"mass matrix not positive definite: leading minor {minor} of {size} "
                         "(cutoff too small or eps not positive)")
        self.minor = minor


@dataclass(frozen=True)
class BlochVector:
    alpha: float
    beta: float

    def canonical(self) -> BlochVector:
        return BlochVector(self.alpha % TWO_PI, self.beta % TWO_PI)

    def as_tuple(self) -> tuple[float, float]:
        return (self.alpha, self.beta)


@dataclass(frozen=True, eq=False)
class BlochEigenproblem:
    cutoff: int
    k: BlochVector
    basis: np.ndarray          # (n, 2) integer G vectors
    stiffness: np.ndarray      # diagonal entries
    mass: np.ndarray

    @property
    def size(self) -> int:
        return self.basis.shape[0]

    def stiffness_matrix(self) -> np.ndarray:
        return np.diag(self.stiffness).astype(complex)


@dataclass(frozen=True)
class BandInterval2D:
    index: int
    lo: float
    hi: float
    argmin: BlochVector
    argmax: BlochVector


@lru_cache(maxsize=64)
def _basis(cutoff: int) -> np.ndarray:
    r = np.arange(-cutoff, cutoff + 1)
    g1, g2 = np.meshgrid(r, r, indexing="ij")
    return np.column_stack([g1.ravel(), g2.ravel()])


def _mass(eps: Profile2D, cutoff: int) -> np.ndarray:
    basis = _basis(cutoff)
    diff = basis[:, None, :] - basis[None, :, :]
    m = np.zeros(diff.shape[:2], dtype=complex)
    for (g1, g2), v in eps.coeffs.items():
        m[(diff[..., 0] == g1) & (diff[..., 1] == g2)] = v
    return m


def assemble(eps: Profile2D, k: BlochVector, N: int) -> BlochEigenproblem:
    if N < 1:
        raise ValueError("cutoff N must be >= 1")
    if eps.bandwidth is not None and eps.bandwidth < 2 * N:
        raise ValueError(f"profile resolved only to |G| <= {eps.bandwidth}; "
                         f"cutoff {N} needs Fourier data up to {2 * N}")
    basis = _basis(N)
    kv = np.array([k.alpha, k.beta]) + TWO_PI * basis
    return BlochEigenproblem(N, k, basis, np.einsum("ij,ij->i", kv, kv), _mass(eps, N))


def solve(problem: BlochEigenproblem, n_max: int) -> np.ndarray:
    """Lowest ``n_max`` eigenvalues via ``M = L L^*`` and ``L^{-1} K L^{-*}``."""
    if not 1 <= n_max <= problem.size:
        raise ValueError(f"n_max must lie in [1, {problem.size}]")
    l, info = sla.lapack.zpotrf(problem.mass, lower=1)
    if info != 0:
        raise FactorizationError(info, problem.size)
    linv = sla.solve_triangular(l, np.eye(problem.size), lower=True)
    a = (linv * problem.stiffness[None, :]) @ linv.conj().T
    a = 0.5 * (a + a.conj().T)
    return sla.eigh(a, eigvals_only=True, subset_by_index=(0, n_max - 1))


def bloch_eigs(eps: Profile2D, k: BlochVector, N: int = DEFAULT_CUTOFF,
               n_max: int = 10) -> np.ndarray:
    return solve(assemble(eps, k, N), n_max)


# -- Brillouin-zone scans ---------------------------------------------------


def _threads() -> int:
    cap = os.environ.get("PCBAND_THREADS")
    n = os.cpu_count() or 1
    return max(1, min(n, int(cap))) if cap else n


def _bz_points(eps: Profile2D, bz_grid: int) -> list[BlochVector]:
    alphas = np.linspace(0.0, math.pi, bz_grid)
    if eps.mirror_symmetric():
        betas = alphas
    else:
        betas = np.linspace(-math.pi, math.pi, 2 * bz_grid - 1)
    return [BlochVector(float(a), float(b)) for a in alphas for b in betas]


def _scan(eps: Profile2D, points: list[BlochVector], N: int, n_max: int) -> np.ndarray:
    mass = _mass(eps, N)
    basis = _basis(N)

    def one(k):
        kv = np.array([k.alpha, k.beta]) + TWO_PI * basis
        return solve(BlochEigenproblem(N, k, basis, np.einsum("ij,ij->i", kv, kv), mass),
                     n_max)

    with ThreadPoolExecutor(_threads()) as pool:
        return np.array(list(pool.map(one, points)))


def band_intervals(eps: Profile2D, n_max: int, bz_grid: int = 17,
                   N: int = DEFAULT_CUTOFF, refine: bool = True) -> list[BandInterval2D]:
    """Grid extrema of ``lam_1 .. lam_{n_max}``, refined once around each extremum.

    Grid extrema lie inside the true range, so ``lo`` can only be too high and
    ``hi`` too low; the refinement halves the spacing near the extremal points.
    """
    if bz_grid < 3:
        raise ValueError("bz_grid must be >= 3")
    points = _bz_points(eps, bz_grid)
    vals = _scan(eps, points, N, n_max)
    h = math.pi / (bz_grid - 1)
    out = []
    for n in range(n_max):
        col = vals[:, n]
        i_lo, i_hi = int(np.argmin(col)), int(np.argmax(col))
        lo, hi = float(col[i_lo]), float(col[i_hi])
        k_lo, k_hi = points[i_lo], points[i_hi]
        if refine:
            for centre, want_min in ((points[i_lo], True), (points[i_hi], False)):
                extra = [BlochVector(min(max(centre.alpha + da, 0.0), math.pi), centre.beta + db)
                         for da in (-h / 2, 0.0, h / 2) for db in (-h / 2, 0.0, h / 2)
                         if da or db]
                sub = _scan(eps, extra, N, n + 1)[:, n]
                j = int(np.argmin(sub) if want_min else np.argmax(sub))
                if want_min and sub[j] < lo:
                    lo, k_lo = float(sub[j]), extra[j]
                if not want_min and sub[j] > hi:
                    hi, k_hi = float(sub[j]), extra[j]
        out.append(BandInterval2D(n + 1, lo, hi, k_lo, k_hi))
    return out


def band_interval(eps: Profile2D, n: int, bz_grid: int = 17,
                  N: int = DEFAULT_CUTOFF) -> BandInterval2D:
    return band_intervals(eps, n, bz_grid, N)[n - 1]


@dataclass(frozen=True)
class OverlapReport:
    bands: list[BandInterval2D]
    overlaps: list[float]      # signed; negative means a gap between I_n and I_{n+1}
    holes: list[tuple[float, float]]

    @property
    def all_overlap(self) -> bool:
        return all(o > 0 for o in self.overlaps)

    @property
    def covered(self) -> bool:
        return not self.holes


def overlap_check(eps: Profile2D, n_max: int = 10, bz_grid: int = 17,
                  N: int = DEFAULT_CUTOFF, hole_tol: float = 1e-9) -> OverlapReport:
    """Signed overlaps ``min(I_n.hi, I_{n+1}.hi) - I_{n+1}.lo`` and uncovered holes.

    Holes narrower than ``hole_tol * (1 + lam)`` are eigensolver noise and ignored.
    """
    bands = band_intervals(eps, n_max, bz_grid, N)
    overlaps = [min(a.hi, b.hi) - b.lo for a, b in zip(bands, bands[1:])]
    holes = []
    reach = 0.0
    for b in sorted(bands, key=lambda b: b.lo):
        if b.lo > reach + hole_tol * (1.0 + reach):
            holes.append((reach, b.lo))
        reach = max(reach, b.hi)
    return OverlapReport(bands, overlaps, holes)


@dataclass(frozen=True)
class MonotonicityReport:
    rows: list[tuple[int, BlochVector, float, float]]   # n, k, lam(eps_small), lam(eps_big)
    tol: float

    @property
    def worst(self) -> float:
        """Largest ``lam(eps_big) - lam(eps_small)``; should not exceed ``tol``."""
        return max(big - small for _, _, small, big in self.rows)

    @property
    def holds(self) -> bool:
        return self.worst <= self.tol


def monotonicity_check(eps_small: Profile2D, eps_big: Profile2D, n_max: int,
                       k_set, N: int = DEFAULT_CUTOFF, tol: float = 1e-8,
                       grid: int = 128) -> MonotonicityReport:
    """Larger ``eps`` must give smaller eigenvalues at every Bloch vector."""
    gap = eps_big.grid_values(grid) - eps_small.grid_values(grid)
    if gap.min() < -1e-12:
        raise ValueError(f"eps_small exceeds eps_big by {-gap.min():.3g} somewhere on the grid")
    rows = []
    for k in k_set:
        k = k if isinstance(k, BlochVector) else BlochVector(*k)
        small = bloch_eigs(eps_small, k, N, n_max)
        big = bloch_eigs(eps_big, k, N, n_max)
        rows.extend((n + 1, k, float(s), float(b)) for n, (s, b) in enumerate(zip(small, big)))
    return MonotonicityReport(rows, tol)


# -- output -----------------------------------------------------------------


def write_eigs_csv(path, eps: Profile2D, bz_grid: int, N: int, n_max: int) -> None:
    points = _bz_points(eps, bz_grid)
    vals = _scan(eps, points, N, n_max)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "beta", "n", "lambda"])
        for k, row in zip(points, vals):
            for n, lam in enumerate(row, start=1):
                w.writerow([repr(k.alpha), repr(k.beta), n, repr(float(lam))])


def band_report(report: OverlapReport) -> list[dict]:
    return [{"n": b.index, "lo": b.lo, "hi": b.hi, "argmin": list(b.argmin.as_tuple()),
             "argmax": list(b.argmax.as_tuple())} for b in report.bands]
