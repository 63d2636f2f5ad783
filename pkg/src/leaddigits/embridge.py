"""Integral representations of block frequencies and profiles.

Block frequency:  rho(k) = integral of f(x) V(k, x) dx
Profile:          G(s)   = integral of f(x) M(s, x) dx
Decomposition:    rho(k) = J1 + J3 with J1 = log10((k+1)/k) (Benford part)

All integrals are taken decade by decade with adaptive quadrature. Decades
whose probability mass is below 1e-14 are skipped, and both the frequency
and the profile routes divide by the mass of the decades that were kept.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .densities import Density
from .digitcore import _as_block, indicator_V, kernel_V_frac
from .errors import ConvergenceError, DomainError, NormalizationError, TruncationError
from .profile import Profile

LN10 = math.log(10.0)
DEFAULT_TOL = 1e-10
DECADE_CUTOFF = 1e-14
NORMALIZATION_TOL = 1e-8
_SCAN = range(-320, 308)


def as_density(f, support: tuple[float, float] | None = None) -> Density:
    """Wrap a bare pdf callable as a :class:`Density`."""
    if isinstance(f, Density):
        return f
    if not callable(f):
        raise DomainError("density must be a Density or a callable pdf")
    return Density("custom", f, support or (0.0, math.inf))


def _quad(pdf, a, b, points=()):
    pts = [p for p in points if a < p < b]
    val, err = integrate.quad(
        lambda x: float(pdf(x)), a, b, epsabs=1e-15, epsrel=1e-13, limit=400, points=pts or None
    )
    return val, err


@dataclass(frozen=True)
class DecadePlan:
    """Decades that carry mass, the mass they hold, and what was dropped."""

    decades: tuple[int, ...]
    mass: float
    lost: float


_PLANS: dict[int, tuple[Density, DecadePlan]] = {}


def decade_plan(f: Density) -> DecadePlan:
    cached = _PLANS.get(id(f))
    if cached is not None and cached[0] is f:
        return cached[1]
    plan = _make_plan(f)
    _PLANS[id(f)] = (f, plan)
    return plan


def _decade_bounds(f: Density, j: int):
    lo, hi = f.support
    a, b = max(10.0**j, lo), min(10.0 ** (j + 1), hi)
    return (a, b) if a < b else None


def _make_plan(f: Density) -> DecadePlan:
    lo, hi = f.support
    j_lo = math.floor(math.log10(lo)) if lo > 0 else _SCAN.start
    j_hi = math.ceil(math.log10(hi)) - 1 if math.isfinite(hi) else _SCAN.stop - 1
    masses = {}
    for j in range(max(j_lo, _SCAN.start), min(j_hi, _SCAN.stop - 1) + 1):
        bounds = _decade_bounds(f, j)
        if bounds is None:
            continue
        if f.cdf is not None:
            m = float(np.asarray(f.cdf(bounds[1]))) - float(np.asarray(f.cdf(bounds[0])))
        else:
            m = _quad(f.pdf, *bounds, f.breakpoints)[0]
        if m < 0:
            raise DomainError(f"density {f.name!r} has negative mass on decade {j}")
        masses[j] = m
    total = math.fsum(masses.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"density {f.name!r} integrates to {total!r}, not 1", measured=total)
    kept = tuple(j for j, m in sorted(masses.items()) if m >= DECADE_CUTOFF)
    lost = math.fsum(m for j, m in masses.items() if j not in kept)
    if lost > NORMALIZATION_TOL:
        raise TruncationError(f"decade truncation lost mass {lost!r}", lost_mass=lost)
    mass = math.fsum(_quad(f.pdf, *_decade_bounds(f, j), f.breakpoints)[0] for j in kept)
    return DecadePlan(kept, mass, lost)


def rho_integral(f, k, tol: float = DEFAULT_TOL) -> float:
    """Frequency of block ``k``: the mass of the union of [k 10^i, (k+1) 10^i).

    Examples
    --------
    >>> from leaddigits.densities import uniform
    >>> round(rho_integral(uniform(), 2), 12)
    0.111111111111
    """
    f = as_density(f)
    k = _as_block(k)
    d = len(str(k)) - 1
    plan = decade_plan(f)
    lo, hi = f.support
    total, err = [], 0.0
    for j in plan.decades:
        a = max(k * 10.0 ** (j - d), lo)
        b = min((k + 1) * 10.0 ** (j - d), hi)
        if a >= b:
            continue
        v, e = _quad(f.pdf, a, b, f.breakpoints)
        total.append(v)
        err += e
    if err > tol:
        raise ConvergenceError(f"quadrature error {err:.3g} exceeds tol {tol:.3g}", state={"error": err})
    return math.fsum(total) / plan.mass


class DensityProfile(Profile):
    """G(s) = integral of f(x) M(s, x) dx, evaluated lazily by quadrature."""

    def __init__(self, f: Density, tol: float = DEFAULT_TOL):
        self.f, self.tol = f, tol
        self.plan = decade_plan(f)
        self.name = f"profile[{f.name}]"

    def _one(self, s: float) -> float:
        if s <= 0.0:
            return 0.0
        if s >= 1.0:
            return 1.0
        lo, hi = self.f.support
        parts, err = [], 0.0
        for j in self.plan.decades:
            a = max(10.0**j, lo)
            b = min(10.0 ** (j + s), hi)
            if a >= b:
                continue
            v, e = _quad(self.f.pdf, a, b, self.f.breakpoints)
            parts.append(v)
            err += e
        if err > self.tol:
            raise ConvergenceError(f"quadrature error {err:.3g} exceeds tol {self.tol:.3g}", state={"s": s})
        return math.fsum(parts) / self.plan.mass

    def _eval(self, s):
        return np.array([self._one(float(x)) for x in s])

    def _deriv(self, s):
        out = np.zeros_like(s, dtype=float)
        for j in self.plan.decades:
            x = 10.0 ** (j + s)
            out += np.asarray(self.f.pdf(x), dtype=float) * x * LN10
        return out / self.plan.mass


def profile_from_density(f, tol: float = DEFAULT_TOL) -> DensityProfile:
    """Phase profile of density ``f``. Call ``.tabulate()`` for a knot table."""
    return DensityProfile(as_density(f), tol)


@dataclass(frozen=True)
class EMReport:
    k: int
    J1: float
    J3: float
    rho: float
    benford_rho: float
    J1_y: float | None = None
    J3_y: float | None = None

    @property
    def deviation(self) -> float:
        return self.rho - self.benford_rho

    def to_dict(self) -> dict:
        out = asdict(self)
        out["deviation"] = self.deviation
        return out


def em_decompose(f, k, tol: float = DEFAULT_TOL) -> EMReport:
    """Split rho(k) into the Benford term J1 and the deviation J3.

    When ``f`` has a CDF, J1 and J3 are also computed independently in the
    log-scale variable y, from g(y) = F((k+1) 10^y) - F(k 10^y):
    J1 = integral of g, J3 = integral of ({y} - 1/2) g'(y).
    """
    f = as_density(f)
    k = _as_block(k)
    rho = rho_integral(f, k, tol)
    benford = math.log10((k + 1) / k)
    j1 = benford
    j1_y = j3_y = None
    if f.cdf is not None:
        j1_y, j3_y = _log_scale_terms(f, k)
    return EMReport(k, j1, rho - j1, rho, benford, j1_y, j3_y)


def _log_scale_terms(f: Density, k: int) -> tuple[float, float]:
    plan = decade_plan(f)
    d = len(str(k)) - 1
    y_lo = plan.decades[0] - d - 1
    y_hi = plan.decades[-1] - d + 1
    F, pdf = f.cdf, f.pdf

    def g(y):
        t = 10.0**y
        return float(np.asarray(F((k + 1) * t))) - float(np.asarray(F(k * t)))

    def dg(y):
        t = 10.0**y
        return LN10 * t * ((k + 1) * float(np.asarray(pdf((k + 1) * t))) - k * float(np.asarray(pdf(k * t))))

    # kinks of g where a block end meets a support end or density breakpoint
    edges = [p for p in (*f.support, *f.breakpoints) if 0 < p < math.inf]
    kinks = sorted({math.log10(p / c) for p in edges for c in (k, k + 1)})
    j1, j3 = [], []
    for y in range(y_lo, y_hi):
        pts = [z for z in kinks if y < z < y + 1]
        v1 = integrate.quad(g, y, y + 1, epsabs=1e-15, epsrel=1e-13, limit=400, points=pts or None)[0]
        v3 = integrate.quad(
            lambda u: (u - y - 0.5) * dg(u), y, y + 1, epsabs=1e-15, epsrel=1e-13, limit=400, points=pts or None
        )[0]
        j1.append(v1)
        j3.append(v3)
    return math.fsum(j1) / plan.mass, math.fsum(j3) / plan.mass


@dataclass(frozen=True)
class EulerMaclaurin:
    """Terms of the exact first-order Euler-Maclaurin formula on [a, b]."""

    direct: float
    integral: float
    boundary: float
    periodic: float

    @property
    def total(self) -> float:
        return self.integral + self.boundary + self.periodic

    @property
    def error(self) -> float:
        return abs(self.total - self.direct)


def euler_maclaurin_first_order(g: Callable[[float], float], dg: Callable[[float], float], a: int, b: int) -> EulerMaclaurin:
    """Check sum_{j=a}^{b} g(j) = int g + (g(a)+g(b))/2 + int ({y}-1/2) g'(y) dy.

    A validation routine for smooth test functions on integer intervals.
    """
    if int(a) != a or int(b) != b or a > b:
        raise DomainError("need integer bounds a <= b")
    a, b = int(a), int(b)
    direct = math.fsum(g(j) for j in range(a, b + 1))
    if a == b:
        return EulerMaclaurin(direct, 0.0, g(a), 0.0)
    # the comparison with the direct sum is the error report, so QUADPACK's
    # roundoff notices are not useful here
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        integral = math.fsum(
            integrate.quad(g, j, j + 1, epsabs=1e-14, epsrel=1e-13)[0] for j in range(a, b)
        )
        periodic = math.fsum(
            integrate.quad(lambda y, j=j: (y - j - 0.5) * dg(y), j, j + 1, epsabs=1e-14, epsrel=1e-13)[0]
            for j in range(a, b)
        )
    return EulerMaclaurin(direct, integral, 0.5 * (g(a) + g(b)), periodic)


def kernel_mismatches(k, xs) -> int:
    """Count points where the fractional-part form of V disagrees with the exact kernel."""
    k = _as_block(k)
    xs = np.asarray(xs, dtype=float)
    exact = np.array([indicator_V(k, float(x)) for x in xs])
    return int(np.sum(exact != kernel_V_frac(k, xs)))
