"""Explicit constants behind the large-lambda gap argument, and checks of the
two arithmetic lemmas it rests on.

The shift lemma says: if ``|lam - b n^2| < c`` then moving ``b`` to ``b_tilde``
inside the window ``4 b1 c / lam < |b - b_tilde| < b0^{3/2} / (12 sqrt(lam))``
pushes every ``b_tilde m^2`` at least ``c`` away from ``lam``.

The A-bounds lemma controls ``B(c) = pi^2 / A(c)^2`` with
``A(c) = int_0^1 sqrt(eps0 + c)``. Its stated Lipschitz constants are off by
a factor of four; :func:`check_A_bounds` reports the stated and the
corrected versions side by side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from pcband.profiles import TrigPolynomial1D

PI2 = math.pi**2


@dataclass(frozen=True)
class ConstantsLedger:
    d0: float
    a0: float
    a1: float
    Theta: float
    d1: float
    d2: float
    lambda0: float
    Lambda0: float

    def window(self, lam: float) -> tuple[float, float]:
        """The admissible shift magnitudes ``[d1/lam, d2/sqrt(lam)]``."""
        return self.d1 / lam, self.d2 / math.sqrt(lam)

    def window_nonempty(self, lam: float) -> bool:
        lo, hi = self.window(lam)
        return lo <= hi

    def as_dict(self) -> dict:
        return asdict(self)


def ledger(d0: float) -> ConstantsLedger:
    if not d0 >= 1.0:
        raise ValueError(f"d0 must be >= 1 (got {d0}); |eps| * |1/eps| >= 1 forces it")
    a0 = 2.0 * PI2 / (3.0 * d0)
    a1 = 2.0 * PI2 * d0
    theta = 2.5 * d0**5 + d0**3
    d1 = 24.0 / PI2 * a1 * d0**2 * theta
    d2 = a0**1.5 / (6.0 * PI2 * d0**2)
    lambda0 = max(2.0 * theta, 3600.0 * theta**2 / a0, (2.0 * d0 * d2) ** 2)
    big = max(lambda0, d0 * d1, 2.0 * d1 / d0, (2.0 * d1 / d2) ** 2)
    return ConstantsLedger(d0, a0, a1, theta, d1, d2, lambda0, big)


def margin_chain(led: ConstantsLedger, lam: float, rel: float = 1e-12) -> dict:
    """The inequalities that make the shifts ``{0, +-d1/lam}`` usable at ``lam``.

    At ``lam = Lambda0`` some of them hold with equality, hence the slack ``rel``.
    """
    c = led.d1 / lam
    slack = 1.0 + rel
    return {
        "shift_le_half_d0": c <= led.d0 / 2.0 * slack,
        "shift_le_inv_d0": c <= 1.0 / led.d0 * slack,
        "pair_gap_in_window": 2.0 * c <= led.d2 / math.sqrt(lam) * slack,
        "window_nonempty": c <= led.d2 / math.sqrt(lam) * slack,
    }


# -- shift lemma ------------------------------------------------------------


@dataclass(frozen=True)
class ShiftLemmaInstance:
    lam: float
    b: float
    b_tilde: float
    c: float
    b0: float
    b1: float
    n: int

    def window(self) -> tuple[float, float]:
        return 4.0 * self.b1 * self.c / self.lam, self.b0**1.5 / (12.0 * math.sqrt(self.lam))

    def hypothesis_failures(self) -> list[str]:
        out = []
        if not (self.b0 > 0 and self.b1 > 0 and self.c > 0):
            out.append("b0, b1 and c must be positive")
        if not self.b0 <= self.b <= self.b1:
            out.append(f"b={self.b} outside [b0, b1]=[{self.b0}, {self.b1}]")
        if self.n < 1:
            out.append("n must be >= 1")
        if not abs(self.lam - self.b * self.n**2) < self.c:
            out.append(f"|lam - b n^2| = {abs(self.lam - self.b * self.n**2):.6g} is not < c")
        floor = max(2.0 * self.c, 3600.0 * self.c**2 / self.b0) if self.b0 > 0 else math.inf
        if not self.lam >= floor:
            out.append(f"lam={self.lam} below max(2c, 3600 c^2/b0)={floor:.6g}")
        lo, hi = self.window()
        gap = abs(self.b - self.b_tilde)
        if lo >= hi:
            out.append(f"shift window ({lo:.6g}, {hi:.6g}) is empty")
        elif not lo < gap < hi:
            out.append(f"|b - b_tilde|={gap:.6g} outside window ({lo:.6g}, {hi:.6g})")
        return out


@dataclass(frozen=True)
class ShiftLemmaResult:
    hypotheses_hold: bool
    failures: tuple[str, ...]
    holds: bool | None
    violating_m: int | None
    nearest_m: int | None
    nearest_distance: float | None


def check_shift_lemma(inst: ShiftLemmaInstance) -> ShiftLemmaResult:
    """Exhaustively test ``|lam - b_tilde m^2| > c`` over every m that could fail.

    For ``m > sqrt((lam + c)/b_tilde)`` the distance already exceeds c, so the
    scan stops at ``ceil`` of that plus two.
    """
    failures = inst.hypothesis_failures()
    if failures:
        return ShiftLemmaResult(False, tuple(failures), None, None, None, None)
    top = math.ceil(math.sqrt((inst.lam + inst.c) / inst.b_tilde)) + 2
    ms = np.arange(1, top + 1)
    dist = np.abs(inst.lam - inst.b_tilde * ms.astype(float) ** 2)
    bad = np.nonzero(dist <= inst.c)[0]
    k = int(np.argmin(dist))
    violating = int(ms[bad[0]]) if bad.size else None
    return ShiftLemmaResult(True, (), violating is None, violating, int(ms[k]), float(dist[k]))


def random_shift_instance(rng: np.random.Generator) -> ShiftLemmaInstance:
    """Draw an instance satisfying every hypothesis of the shift lemma."""
    while True:
        b0 = rng.uniform(0.2, 5.0)
        b1 = b0 * rng.uniform(1.0, 3.0)
        b = rng.uniform(b0, b1)
        c = 10.0 ** rng.uniform(-3, 0.5)
        # The window is nonempty once sqrt(lam) > 48 b1 c / b0^{3/2}.
        need = max(2.0 * c, 3600.0 * c**2 / b0, (48.0 * b1 * c / b0**1.5) ** 2 * 1.05)
        n = math.ceil(math.sqrt(need / b)) + int(rng.integers(0, 200))
        lam = b * n * n + rng.uniform(-0.999, 0.999) * c
        if lam < need:
            continue
        lo = 4.0 * b1 * c / lam
        hi = b0**1.5 / (12.0 * math.sqrt(lam))
        gap = rng.uniform(lo, hi)
        if not lo < gap < hi:
            continue
        b_tilde = b + gap if rng.random() < 0.5 or b - gap <= 0 else b - gap
        inst = ShiftLemmaInstance(lam, b, b_tilde, c, b0, b1, n)
        if not inst.hypothesis_failures():
            return inst


# -- A-bounds lemma ---------------------------------------------------------


@dataclass(frozen=True)
class ABoundsReport:
    c: float
    lower: float
    upper: float
    B0: float
    Bc: float
    diff: float
    stated: dict
    corrected: dict

    @property
    def holds_stated(self) -> bool:
        return all(self.stated.values())

    @property
    def holds_corrected(self) -> bool:
        return all(self.corrected.values())

    @property
    def ratio_stated(self) -> float:
        """Measured ``|B(c) - B(0)|`` over the stated upper bound."""
        bound = PI2 * abs(self.c) / (2.0 * self.lower**2)
        return self.diff / bound if bound > 0 else 0.0

    def as_dict(self) -> dict:
        return {"c": self.c, "d1": self.lower, "d2": self.upper, "B0": self.B0, "Bc": self.Bc,
                "diff": self.diff, "stated": self.stated, "corrected": self.corrected,
                "ratio_stated_upper": self.ratio_stated}


def _le(a: float, b: float, rel: float) -> bool:
    return a <= b + rel * max(1.0, abs(a), abs(b))


def check_A_bounds(eps0: TrigPolynomial1D, c: float, d1_bound: float, d2_bound: float,
                   rel: float = 1e-12) -> ABoundsReport:
    """Compare ``B(c) = pi^2/A(c)^2`` against the stated and corrected bounds.

    ``d1_bound <= eps0 <= d2_bound`` and ``|c| <= d1_bound/2`` are required.
    With ``B' = -2 pi^2 A'/A^3`` the honest constants are ``2 pi^2 |c| / d1^2``
    (upper) and ``2 pi^2 |c| / (3 d2^2)`` (lower).
    """
    from pcband.liouville import liouville_period

    if not 0 < d1_bound <= d2_bound:
        raise ValueError("need 0 < d1_bound <= d2_bound")
    if eps0.min_value < d1_bound * (1 - 1e-12) or eps0.max_value > d2_bound * (1 + 1e-12):
        raise ValueError(f"eps0 range [{eps0.min_value:.6g}, {eps0.max_value:.6g}] "
                         f"not inside [{d1_bound}, {d2_bound}]")
    if abs(c) > d1_bound / 2 * (1 + 1e-15):
        raise ValueError(f"|c|={abs(c)} exceeds d1_bound/2={d1_bound / 2}")
    b0 = PI2 / liouville_period(eps0, 0.0) ** 2
    bc = PI2 / liouville_period(eps0, float(c)) ** 2
    diff = abs(bc - b0)
    ac = abs(c)
    stated = {
        "lipschitz_lower": _le(PI2 * ac / (6 * d2_bound**2), diff, rel),
        "lipschitz_upper": _le(diff, PI2 * ac / (2 * d1_bound**2), rel),
        "range_lower": _le(2 * PI2 / (3 * d2_bound), bc, rel),
        "range_upper": _le(bc, 2 * PI2 / d1_bound, rel),
    }
    corrected = {
        "lipschitz_lower": _le(2 * PI2 * ac / (3 * d2_bound**2), diff, rel),
        "lipschitz_upper": _le(diff, 2 * PI2 * ac / d1_bound**2, rel),
        "range_lower": stated["range_lower"],
        "range_upper": stated["range_upper"],
    }
    return ABoundsReport(float(c), d1_bound, d2_bound, b0, bc, diff, stated, corrected)
