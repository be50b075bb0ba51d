"""Periodic dielectric profiles with exact derivatives and certified bounds.

One-dimensional profiles are finite trigonometric series on the unit period,
so derivatives come from coefficient transforms rather than differencing.
Suprema are certified from 2**14 equispaced samples plus the curvature
margin ``h**2 / 8 * sup|f''|``, with ``sup|f''|`` bounded harmonic by harmonic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

TWO_PI = 2.0 * math.pi
CERT_SAMPLES = 2**14


class ProfileError(ValueError):
    """Raised for malformed or non-positive profiles."""


@dataclass(frozen=True)
class TrigSeries1D:
    """Real trigonometric series ``mean + sum a_m cos(2 pi m x) + b_m sin(2 pi m x)``.

    No sign constraint; used for derivatives and potentials.
    """

    mean: float
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    period: float = 1.0

    def __post_init__(self):
        if self.period != 1.0:
            raise ProfileError("period is fixed to 1")
        cos_c = tuple(float(v) for v in self.cos_coeffs)
        sin_c = tuple(float(v) for v in self.sin_coeffs)
        m = max(len(cos_c), len(sin_c))
        cos_c += (0.0,) * (m - len(cos_c))
        sin_c += (0.0,) * (m - len(sin_c))
        if not all(map(math.isfinite, (self.mean,) + cos_c + sin_c)):
            raise ProfileError("coefficients must be finite")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "cos_coeffs", cos_c)
        object.__setattr__(self, "sin_coeffs", sin_c)

    @property
    def order(self) -> int:
        return len(self.cos_coeffs)

    @property
    def is_constant(self) -> bool:
        return not any(self.cos_coeffs) and not any(self.sin_coeffs)

    def arrays(self, order: int = 0) -> tuple[float, np.ndarray, np.ndarray]:
        """Coefficients ``(mean, a, b)`` of the ``order``-th derivative."""
        a = np.asarray(self.cos_coeffs, dtype=float)
        b = np.asarray(self.sin_coeffs, dtype=float)
        w = TWO_PI * np.arange(1, self.order + 1)
        for _ in range(order):
            a, b = w * b, -w * a
        return (self.mean if order == 0 else 0.0), a, b

    def derivative(self, order: int = 1) -> TrigSeries1D:
        mean, a, b = self.arrays(order)
        return TrigSeries1D(mean, tuple(a), tuple(b))

    def __call__(self, x, order: int = 0):
        mean, a, b = self.arrays(order)
        x = np.asarray(x, dtype=float)
        if self.order == 0:
            return np.full_like(x, mean) if x.ndim else float(mean)
        phase = TWO_PI * np.multiply.outer(x, np.arange(1, self.order + 1))
        val = mean + np.cos(phase) @ a + np.sin(phase) @ b
        return val if x.ndim else float(val)

    def harmonic_bound(self, order: int) -> float:
        """Analytic bound on ``sup |f^(order)|`` summed over harmonics."""
        amp = np.hypot(self.cos_coeffs, self.sin_coeffs)
        w = TWO_PI * np.arange(1, self.order + 1)
        total = float(np.sum(amp * w**order))
        return total + (abs(self.mean) if order == 0 else 0.0)

    def sample_grid(self, n: int = CERT_SAMPLES) -> np.ndarray:
        return np.arange(n) / n

    def certified_extrema(self, order: int = 0) -> tuple[float, float]:
        """Certified ``(lower, upper)`` bounds on the ``order``-th derivative."""
        xs = self.sample_grid()
        vals = self(xs, order)
        h = 1.0 / xs.size
        margin = h * h / 8.0 * self.harmonic_bound(order + 2)
        return float(vals.min()) - margin, float(vals.max()) + margin

    def sup_abs(self, order: int = 0) -> float:
        lo, hi = self.certified_extrema(order)
        return max(abs(lo), abs(hi))


@dataclass(frozen=True)
class TrigPolynomial1D(TrigSeries1D):
    """Strictly positive 1-periodic profile given by a trigonometric polynomial."""

    def __post_init__(self):
        super().__post_init__()
        if self.min_value <= 0.0:
            raise ProfileError(
                f"profile is not strictly positive (certified min {self.min_value:.6g})"
            )

    @cached_property
    def min_value(self) -> float:
        """Certified lower bound on min eps."""
        if self.is_constant:
            return self.mean
        return self.certified_extrema(0)[0]

    @cached_property
    def max_value(self) -> float:
        if self.is_constant:
            return self.mean
        return self.certified_extrema(0)[1]

    @classmethod
    def constant(cls, value: float) -> TrigPolynomial1D:
        return cls(value)

    def to_json(self) -> dict:
        return {"period": self.period, "mean": self.mean,
                "cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)}

    @classmethod
    def from_json(cls, data: Mapping) -> TrigPolynomial1D:
        if not isinstance(data, Mapping):
            raise ProfileError("profile JSON must be an object")
        for key in ("mean",):
            if key not in data:
                raise ProfileError(f"missing field '{key}'")
        period = data.get("period", 1.0)
        try:
            period = float(period)
        except (TypeError, ValueError):
            raise ProfileError("field 'period' must be a number") from None
        if period != 1.0:
            raise ProfileError("field 'period' must equal 1.0")
        fields = {}
        for key in ("mean", "cos", "sin"):
            raw = data.get(key, [] if key != "mean" else None)
            try:
                fields[key] = float(raw) if key == "mean" else [float(v) for v in raw]
            except (TypeError, ValueError):
                raise ProfileError(f"field '{key}' must be numeric") from None
        return cls(fields["mean"], tuple(fields["cos"]), tuple(fields["sin"]))


@dataclass(frozen=True)
class RegularityBound:
    """``d0`` dominating ``|eps|``, ``|1/eps|``, ``|eps'|`` and ``|eps''|``."""

    d0: float

    def __post_init__(self):
        if not self.d0 >= 1.0:
            raise ProfileError("d0 must be at least 1")


def eval_profile(p: TrigSeries1D, x, order: int = 0):
    """Evaluate ``eps``, ``eps'`` or ``eps''`` exactly."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    return p(x, order)


def regularity_bound(p: TrigPolynomial1D) -> RegularityBound:
    if p.is_constant:
        return RegularityBound(max(1.0, p.mean, 1.0 / p.mean))
    d0 = max(1.0, p.max_value, 1.0 / p.min_value, p.sup_abs(1), p.sup_abs(2))
    return RegularityBound(d0)


def separable_bound(*profiles: TrigPolynomial1D) -> RegularityBound:
    """Joint ``d0`` with ``2/d0 <= eps_i <= d0/2`` and ``|eps_i'|, |eps_i''| <= d0``.

    This stricter form leaves room for the shifts ``|c| <= min(d0/2, 1/d0)``
    while keeping ``1/d0 <= eps_i + c <= d0``.
    """
    d0 = 2.0
    for p in profiles:
        d0 = max(d0, 2.0 * p.max_value, 2.0 / p.min_value)
        if not p.is_constant:
            d0 = max(d0, p.sup_abs(1), p.sup_abs(2))
    return RegularityBound(d0)


def shift_profile(p: TrigPolynomial1D, c: float) -> TrigPolynomial1D:
    """Return ``eps + c``; raises :class:`ProfileError` if positivity is lost."""
    if p.min_value + c <= 0.0:
        raise ProfileError(f"shift c={c} destroys positivity (min eps = {p.min_value:.6g})")
    return TrigPolynomial1D(p.mean + c, p.cos_coeffs, p.sin_coeffs)


def load_profile_1d(path) -> TrigPolynomial1D:
    return TrigPolynomial1D.from_json(_read_json(path))


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: invalid JSON ({exc})") from None


# -- 2D ---------------------------------------------------------------------


@dataclass(frozen=True)
class Profile2D:
    """Real positive profile on the unit torus stored by Fourier coefficients.

    ``coeffs`` maps ``(g1, g2)`` to the coefficient of ``exp(2 pi i (g1 x1 + g2 x2))``;
    absent entries are zero. ``bandwidth`` is ``None`` when the series is exact,
    otherwise the largest index the coefficients were resolved to.
    """

    coeffs: Mapping[tuple[int, int], complex]
    bandwidth: int | None = None
    _frozen: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for g, v in self.coeffs.items():
            key = (int(g[0]), int(g[1]))
            if v != 0:
                clean[key] = complex(v)
        for (g1, g2), v in clean.items():
            partner = clean.get((-g1, -g2), 0.0)
            if abs(partner - v.conjugate()) > 1e-12 * max(1.0, abs(v)):
                raise ProfileError(
                    f"coefficients are not Hermitian-symmetric at g=({g1},{g2})")
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "_frozen", tuple(sorted(
            (k, v.real, v.imag) for k, v in clean.items())))
        if self.min_sampled() <= 0.0:
            raise ProfileError("2D profile is not strictly positive on the sampling grid")

    def __hash__(self):
        return hash((self._frozen, self.bandwidth))

    @property
    def max_index(self) -> int:
        return max((max(abs(a), abs(b)) for a, b in self.coeffs), default=0)

    def coefficient(self, g1: int, g2: int) -> complex:
        return self.coeffs.get((g1, g2), 0.0j)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        val = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for (g1, g2), v in self.coeffs.items():
            val = val + v * np.exp(1j * TWO_PI * (g1 * x1 + g2 * x2))
        return val.real

    def grid_values(self, n: int) -> np.ndarray:
        xs = np.arange(n) / n
        return self(xs[:, None], xs[None, :])

    def min_sampled(self, n: int | None = None) -> float:
        n = n or max(64, 8 * self.max_index + 8)
        return float(self.grid_values(n).min())

    def max_sampled(self, n: int | None = None) -> float:
        n = n or max(64, 8 * self.max_index + 8)
        return float(self.grid_values(n).max())

    def mirror_symmetric(self) -> bool:
        """True if eps is even in x1 or in x2 (enables the [0, pi]^2 reduction)."""
        def even(flip):
            return all(abs(self.coefficient(*flip(g)) - v) <= 1e-14 * max(1.0, abs(v))
                       for g, v in self.coeffs.items())
        return even(lambda g: (-g[0], g[1])) or even(lambda g: (g[0], -g[1]))

    def scaled(self, s: float) -> Profile2D:
        return Profile2D({g: s * v for g, v in self.coeffs.items()}, self.bandwidth)

    @classmethod
    def constant(cls, value: float) -> Profile2D:
        return cls({(0, 0): value})

    @classmethod
    def from_separable(cls, eps1: TrigSeries1D, eps2: TrigSeries1D) -> Profile2D:
        """``eps1(x1) + eps2(x2)`` in exponential form."""
        coeffs: dict[tuple[int, int], complex] = {(0, 0): eps1.mean + eps2.mean}
        for axis, p in ((0, eps1), (1, eps2)):
            for m, (a, b) in enumerate(zip(p.cos_coeffs, p.sin_coeffs), start=1):
                plus = (m, 0) if axis == 0 else (0, m)
                minus = (-m, 0) if axis == 0 else (0, -m)
                coeffs[plus] = coeffs.get(plus, 0) + (a - 1j * b) / 2
                coeffs[minus] = coeffs.get(minus, 0) + (a + 1j * b) / 2
        return cls(coeffs)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int, complex]]) -> Profile2D:
        coeffs: dict[tuple[int, int], complex] = {}
        for g1, g2, v in terms:
            coeffs[(g1, g2)] = coeffs.get((g1, g2), 0) + v
        return cls(coeffs)

    @classmethod
    def from_samples(cls, values: np.ndarray) -> Profile2D:
        """Fourier data from an ``n x n`` grid sampled at ``(i/n, j/n)``."""
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        if values.shape != (n, n):
            raise ProfileError("samples must form a square grid")
        hat = np.fft.fft2(values) / (n * n)
        half = (n - 1) // 2
        coeffs = {}
        for g1 in range(-half, half + 1):
            for g2 in range(-half, half + 1):
                v = hat[g1 % n, g2 % n]
                if abs(v) > 1e-15 * abs(hat[0, 0]):
                    coeffs[(g1, g2)] = v
        return cls(coeffs, bandwidth=half)

    def to_json(self) -> dict:
        return {"coeffs": [{"g": [g1, g2], "re": v.real, "im": v.imag}
                           for (g1, g2), v in sorted(self.coeffs.items())]}

    @classmethod
    def from_json(cls, data: Mapping) -> Profile2D:
        if not isinstance(data, Mapping) or "coeffs" not in data:
            raise ProfileError("missing field 'coeffs'")
        coeffs = {}
        for i, entry in enumerate(data["coeffs"]):
            try:
                g = entry["g"]
                key = (int(g[0]), int(g[1]))
                coeffs[key] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
            except (KeyError, TypeError, ValueError, IndexError):
                raise ProfileError(f"malformed entry coeffs[{i}]") from None
        return cls(coeffs)


def load_profile_2d(path) -> Profile2D:
    return Profile2D.from_json(_read_json(path))
