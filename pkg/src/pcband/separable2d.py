"""2D spectrum for ``eps(x1, x2) = eps1(x1) + eps2(x2)`` from 1D spectra.

If ``E1'' + lam (eps1 + c) E1 = 0`` and ``E2'' + lam (eps2 - c) E2 = 0`` both
have bounded solutions then ``E1(x1) E2(x2)`` is a bounded solution of
``-Laplace E = lam eps E``, so ``lam`` is in the 2D spectrum. Certification is
one-sided: a point that no shift certifies is a *candidate* gap, never a gap.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from pcband import hill1d
from pcband.constants import ConstantsLedger, ledger
from pcband.hill1d import HillProblem
from pcband.liouville import _second_derivative_6
from pcband.profiles import (ProfileError, RegularityBound, TrigPolynomial1D,
                             separable_bound, shift_profile)

CLAMP = 1e-9


@dataclass(frozen=True)
class SeparableProfile2D:
    eps1: TrigPolynomial1D
    eps2: TrigPolynomial1D
    d0: RegularityBound = None

    def __post_init__(self):
        joint = separable_bound(self.eps1, self.eps2)
        if self.d0 is None:
            object.__setattr__(self, "d0", joint)
        elif self.d0.d0 < joint.d0:
            raise ValueError(f"d0={self.d0.d0} does not dominate the profiles (need {joint.d0})")

    @property
    def max_value(self) -> float:
        return self.eps1.max_value + self.eps2.max_value

    def scaled(self, s: float) -> SeparableProfile2D:
        def sc(p):
            return TrigPolynomial1D(s * p.mean, tuple(s * a for a in p.cos_coeffs),
                                    tuple(s * b for b in p.sin_coeffs))
        return SeparableProfile2D(sc(self.eps1), sc(self.eps2))

    def to_profile2d(self):
        from pcband.profiles import Profile2D
        return Profile2D.from_separable(self.eps1, self.eps2)


@dataclass(frozen=True)
class Witness:
    source: str          # "triple" or "grid"
    j: int               # index into the shift list of that source
    c: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class MembershipResult:
    lam: float
    in_spectrum: bool
    witness: Witness | None
    triple: tuple[str, ...]   # per shift: certified / not-certified / inadmissible


def _problem(p: TrigPolynomial1D, c: float) -> HillProblem | None:
    try:
        return HillProblem(shift_profile(p, c) if c != 0.0 else p)
    except ProfileError:
        return None


def _quasi(delta: float) -> float:
    half = delta / 2.0
    if abs(half) > 1.0 + CLAMP:
        raise ValueError(f"discriminant {delta} outside [-2, 2]")
    return math.acos(min(1.0, max(-1.0, half)))


def _try_shift(sp: SeparableProfile2D, lam: float, c: float, margin: float, tol: float):
    """``(alpha, beta)`` if both shifted problems certify ``lam``, else a status string."""
    h1, h2 = _problem(sp.eps1, c), _problem(sp.eps2, -c)
    if h1 is None or h2 is None:
        return "inadmissible"
    d1 = hill1d.discriminant(h1, lam, tol)
    if abs(d1) > 2.0 - margin:
        return "not-certified"
    d2 = hill1d.discriminant(h2, lam, tol)
    if abs(d2) > 2.0 - margin:
        return "not-certified"
    return _quasi(d1), _quasi(d2)


def shift_triple(sp: SeparableProfile2D, lam: float) -> tuple[float, float, float]:
    d1 = ledger(sp.d0.d0).d1
    return (0.0, d1 / lam, -d1 / lam)


def ray_membership(sp: SeparableProfile2D, lam: float, margin: float = 1e-8,
                   tol: float = hill1d.DEFAULT_TOL) -> MembershipResult:
    """Try the shifts ``c in {0, d1/lam, -d1/lam}``; ``False`` only means "not certified".

    ``lam = 0`` is always certified by the constant solution.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if lam == 0.0:
        return MembershipResult(0.0, True, Witness("triple", 1, 0.0, 0.0, 0.0),
                                ("certified", "inadmissible", "inadmissible"))
    status, witness = [], None
    for j, c in enumerate(shift_triple(sp, lam), start=1):
        res = _try_shift(sp, lam, c, margin, tol)
        if isinstance(res, str):
            status.append(res)
            continue
        status.append("certified")
        if witness is None:
            witness = Witness("triple", j, c, *res)
    return MembershipResult(lam, witness is not None, witness, tuple(status))


def window_chain(sp: SeparableProfile2D, lam: float) -> bool:
    """``1/d0 <= eps_i + c_j <= d0`` for the triple at ``lam``, using the module's own d0."""
    d0 = sp.d0.d0
    for c in shift_triple(sp, lam):
        for p, s in ((sp.eps1, 1.0), (sp.eps2, -1.0)):
            if p.min_value + s * c < 1.0 / d0 or p.max_value + s * c > d0:
                return False
    return True


# -- residual check ---------------------------------------------------------


def _floquet_solution(p: TrigPolynomial1D, lam: float, xs: np.ndarray) -> np.ndarray:
    hp = HillProblem(p)
    m = hill1d.monodromy(hp, lam, 1e-12).as_array()
    vals, vecs = np.linalg.eig(m)
    v = vecs[:, int(np.argmin(np.abs(np.abs(vals) - 1.0)))]
    samples = hill1d.fundamental_solutions(hp, lam, xs)
    e = v[0] * samples[:, 0] + v[1] * samples[:, 2]
    return e / np.abs(e).max()


def product_residual(sp: SeparableProfile2D, c: float, lam: float,
                     spacing: float = 1e-3) -> float:
    """Normalised ``|Laplace E + lam eps E|`` for ``E = E1(x1) E2(x2)`` on a grid.

    The Laplacian is taken by sixth-order differences in each direction.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    p1 = shift_profile(sp.eps1, c) if c else sp.eps1
    p2 = shift_profile(sp.eps2, -c) if c else sp.eps2
    for p in (p1, p2):
        hp = HillProblem(p)
        if abs(hill1d.discriminant(hp, lam)) > 2.0 + 1e-9:
            raise ValueError(f"lambda={lam} is not in the spectrum of a shifted 1D problem")
    n = int(round(1.0 / spacing))
    xs = np.arange(n + 1) / n
    h = 1.0 / n
    e1 = _floquet_solution(p1, lam, xs)
    e2 = _floquet_solution(p2, lam, xs)
    inner = slice(3, n - 2)
    f1, f2 = e1[inner], e2[inner]
    lap = np.outer(_second_derivative_6(e1, h), f2) + np.outer(f1, _second_derivative_6(e2, h))
    eps = sp.eps1(xs[inner])[:, None] + sp.eps2(xs[inner])[None, :]
    res = np.abs(lap + lam * eps * np.outer(f1, f2))
    return float(res.max() / (1.0 + lam * sp.max_value))


# -- grid scan --------------------------------------------------------------


@dataclass(frozen=True)
class GridPoint:
    lam: float
    certified: bool
    witness: Witness | None
    triple: tuple[str, ...]


@dataclass(frozen=True)
class RayReport:
    lambda_max: float
    lambda_step: float
    points: list[GridPoint]
    candidate_gaps: list[tuple[float, float]]
    empirical_ray_onset: float | None
    ledger: ConstantsLedger
    c_grid: tuple[float, ...] = field(default=())

    @property
    def certified(self) -> list[float]:
        return [p.lam for p in self.points if p.certified]

    @property
    def triple_certified(self) -> int:
        return sum(1 for p in self.points if "certified" in p.triple)

    def as_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "step": self.lambda_step,
            "c_grid": list(self.c_grid),
            "grid_points": len(self.points),
            "certified": self.certified,
            "certified_by_triple": self.triple_certified,
            "candidate_gaps": [list(g) for g in self.candidate_gaps],
            "empirical_ray_onset": self.empirical_ray_onset,
            "ledger": self.ledger.as_dict(),
            "onset_kind": "observed on the grid",
            "Lambda0_kind": "analytic bound",
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "status", "source", "j", "c", "alpha", "beta"])
            for p in self.points:
                if p.witness is None:
                    w.writerow([repr(p.lam), "not-certified", "", "", "", "", ""])
                else:
                    x = p.witness
                    w.writerow([repr(p.lam), "in-spectrum", x.source, x.j, repr(x.c),
                                repr(x.alpha), repr(x.beta)])


def default_c_grid(sp: SeparableProfile2D, count: int = 33) -> tuple[float, ...]:
    """Symmetric shifts keeping both ``eps1 + c`` and ``eps2 - c`` at least half their minimum."""
    reach = 0.5 * min(sp.eps1.min_value, sp.eps2.min_value)
    return tuple(float(c) for c in np.linspace(-reach, reach, count) if c != 0.0)


def _threads() -> int:
    cap = os.environ.get("PCBAND_THREADS")
    n = os.cpu_count() or 1
    return max(1, min(n, int(cap))) if cap else n


def _classify(sp, lam, c_grid, margin, tol) -> GridPoint:
    mem = ray_membership(sp, lam, margin, tol)
    if mem.in_spectrum:
        return GridPoint(lam, True, mem.witness, mem.triple)
    for j, c in enumerate(c_grid, start=1):
        res = _try_shift(sp, lam, c, margin, tol)
        if not isinstance(res, str):
            return GridPoint(lam, True, Witness("grid", j, c, *res), mem.triple)
    return GridPoint(lam, False, None, mem.triple)


def gap_report(sp: SeparableProfile2D, lambda_max: float, lambda_step: float = 0.05,
               c_grid=None, margin: float = 1e-8, tol: float = hill1d.DEFAULT_TOL,
               threads: int | None = None) -> RayReport:
    """Certify each ``lam = k * lambda_step <= lambda_max``; runs of failures are candidate gaps.

    A candidate gap is reported as the open interval between its certified
    neighbours. The onset is the first point of the final all-certified run.
    """
    if lambda_step <= 0:
        raise ValueError("lambda_step must be positive")
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    count = int(math.floor(lambda_max / lambda_step + 1e-9))
    lams = [k * lambda_step for k in range(count + 1)]
    c_grid = tuple(float(c) for c in (c_grid or ()))
    with ThreadPoolExecutor(threads or _threads()) as pool:
        points = list(pool.map(lambda lam: _classify(sp, lam, c_grid, margin, tol), lams))

    gaps_found = []
    start = None
    for i, p in enumerate(points):
        if not p.certified and start is None:
            start = i
        if p.certified and start is not None:
            lo = points[start - 1].lam if start > 0 else points[start].lam
            gaps_found.append((lo, p.lam))
            start = None
    if start is not None:
        onset = None
        lo = points[start - 1].lam if start > 0 else points[start].lam
        gaps_found.append((lo, points[-1].lam))
    else:
        last = gaps_found[-1][1] if gaps_found else 0.0
        onset = last
    return RayReport(float(lambda_max), float(lambda_step), points, gaps_found, onset,
                     ledger(sp.d0.d0), c_grid)
