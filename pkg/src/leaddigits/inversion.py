"""Reconstruct a distribution from its windowed profile.

A profile of the window [10^m, 10^n) is the box sum of V(t) = F~(t) - c,
where F~ is the normalized CDF in the log variable t = log10 x:

    G(s) = sum_{i=m}^{n-1} V(s + i),   0 <= s <= 1.

For L = n - m > 1 the solution is not unique: adding any function that is
L-periodic with zero sum over the L shifts leaves G unchanged. The
canonical solution minimizes the energy of V' over the discretized problem,
which removes all of these kernel modes. Its derivative is 1-periodic,
V'(t) = G'({t}) / L.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .densities import Density
from .errors import DomainError, NonDifferentiableError, ResolutionError, ValidationError
from .profile import Profile
from .profiles import WindowSpec

LN10 = math.log(10.0)
DEFAULT_GRID = 2048
MIN_GRID = 8
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class TabulatedFunction:
    """Knots (t, v) of a function on [m, n], linearly interpolated."""

    t: np.ndarray
    v: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.t, self.v)


def box_sum_apply(V, window: WindowSpec) -> Callable:
    """Return s -> sum_{i=m}^{n-1} V(s + i)."""
    if isinstance(V, Reconstruction):
        V = V.V_function
    if isinstance(V, TabulatedFunction):
        lo, hi = float(V.t[0]), float(V.t[-1])
        if abs(lo - window.m) > 1e-12 or abs(hi - window.n) > 1e-12:
            raise DomainError(f"V is tabulated on [{lo}, {hi}], window is [{window.m}, {window.n}]")
    if not callable(V):
        raise DomainError("V must be callable or a TabulatedFunction")

    def S(s):
        s = np.asarray(s, dtype=float)
        acc = np.zeros_like(s)
        for i in range(window.m, window.n):
            acc = acc + np.asarray(V(s + i), dtype=float)
        return float(acc) if acc.ndim == 0 else acc

    return S


@dataclass(frozen=True)
class BoxSumProblem:
    window: WindowSpec
    target: Profile
    grid: int = DEFAULT_GRID

    def __post_init__(self):
        if int(self.grid) != self.grid or self.grid < MIN_GRID:
            raise ResolutionError(
                f"grid of {self.grid} points per unit interval is too coarse; use at least {MIN_GRID}"
            )

    def target_knots(self) -> tuple[np.ndarray, np.ndarray]:
        s = np.linspace(0.0, 1.0, self.grid + 1)
        g = np.asarray(self.target(s), dtype=float)
        g[0] = float(self.target.left(0.0))
        return s, g


@dataclass(frozen=True)
class Reconstruction:
    window: WindowSpec
    grid: int
    t: np.ndarray
    V: np.ndarray
    c: float
    kernel_energy: float
    residual: float
    target_s: np.ndarray
    target_g: np.ndarray
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def F_values(self) -> np.ndarray:
        """Normalized CDF F~(t) = V(t) + c on the knots."""
        return self.V + self.c

    @property
    def V_function(self) -> TabulatedFunction:
        return TabulatedFunction(self.t, self.V)

    def to_dict(self) -> dict:
        return {
            "window": {"m": self.window.m, "n": self.window.n},
            "grid": self.grid,
            "target": {"s": self.target_s.tolist(), "G": self.target_g.tolist()},
            "V": {"t": self.t.tolist(), "V": self.V.tolist()},
            "F": self.F_values.tolist(),
            "c": self.c,
            "kernel_energy": self.kernel_energy,
            "residual": self.residual,
            "diagnostics": list(self.diagnostics),
        }


def kernel_energy_of(V: np.ndarray, window: WindowSpec, grid: int) -> float:
    """Energy of the kernel component of V on the knot grid.

    Splits the increments of V by phase; the part whose sum over the L
    decades vanishes is invisible to the box sum. Returns the integral of
    the squared derivative of that part.
    """
    L = window.L
    V = np.asarray(V, dtype=float)
    if V.size != L * grid + 1:
        raise DomainError("V knots do not match the window and grid")
    delta = np.diff(V).reshape(L, grid)
    ker = delta - delta.mean(axis=0, keepdims=True)
    return float(grid * np.sum(ker * ker))


def invert_box_sum(problem: BoxSumProblem) -> Reconstruction:
    """Canonical minimum-energy solution of the box-sum equation.

    The differenced system has one equation per phase, each summing the L
    increments at that phase, so the minimum-norm increments split each
    profile increment equally. The level of V then follows from G(0).
    """
    window, P, L = problem.window, int(problem.grid), problem.window.L
    s, g = problem.target_knots()
    if not (np.all(np.isfinite(g))):
        raise ValidationError("target profile has non-finite values")
    if abs(g[0]) > 1e-9 or abs(g[-1] - 1.0) > 1e-9:
        raise ValidationError(f"target must satisfy G(0)=0, G(1)=1; got {g[0]!r}, {g[-1]!r}")
    dg = np.diff(g)
    if np.any(dg < -1e-12):
        bad = s[int(np.argmax(dg < -1e-12))]
        raise ValidationError(f"target profile decreases after s={bad:.6g}")
    # increments dg/L repeated in every decade, summed in closed form so that
    # no rounding accumulates along the L*P knots
    dec = np.repeat(np.arange(L), P)
    phase = np.tile(np.arange(P), L)
    rel = np.concatenate([(dec * (g[-1] - g[0]) + (g[phase] - g[0])) / L, [g[-1] - g[0]]])
    v_m = (g[0] - math.fsum(rel[i * P] for i in range(L))) / L
    V = v_m + rel
    t = window.m + np.arange(L * P + 1) / P
    t[-1] = float(window.n)
    applied = sum(V[i * P : i * P + P + 1] for i in range(L))
    residual = float(np.max(np.abs(applied - g)))
    diagnostics = []
    if np.any(np.diff(V) < -MONOTONE_TOL):
        msg = "reconstructed CDF is not monotone"
        diagnostics.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return Reconstruction(
        window, P, t, V, -v_m, kernel_energy_of(V, window, P), residual, s, g, tuple(diagnostics)
    )


def reconstruct_cdf(rec: Reconstruction, F_low: float, F_high: float) -> Callable:
    """CDF on [10^m, 10^n]: F(x) = F_low + (F_high - F_low) F~(log10 x)."""
    if not F_high > F_low:
        raise DomainError("need F_high > F_low")
    lo, hi = 10.0**rec.window.m, 10.0**rec.window.n
    F = rec.F_values

    def cdf(x):
        x = np.asarray(x, dtype=float)
        if np.any((x < lo) | (x > hi)) or np.any(~np.isfinite(x)):
            raise DomainError(f"x must lie in [{lo:g}, {hi:g}]")
        tt = np.clip(np.log10(x), rec.window.m, rec.window.n)
        out = F_low + (F_high - F_low) * np.interp(tt, rec.t, F)
        return float(out) if out.ndim == 0 else out

    return cdf


def density_from_profile(g: Profile, decade: int = 0, check_grid: int = 1025) -> Density:
    """Density on [10^d, 10^(d+1)] whose single-decade profile is ``g``:
    f(x) = G'(log10 x - d) / (x ln 10).

    The returned CDF integrates the pdf numerically, so re-profiling it is an
    independent check of the construction.
    """
    if int(decade) != decade:
        raise DomainError("decade must be an integer")
    d = int(decade)
    corners = getattr(g, "corners", ())
    if corners:
        raise NonDifferentiableError(
            f"profile has a corner at s={corners[0]:.12g}; the density would jump", location=corners[0]
        )
    probe = np.linspace(0.0, 1.0, check_grid)[1:-1]
    g.derivative(probe)
    lo, hi = 10.0**d, 10.0 ** (d + 1)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= lo) & (x <= hi)
        s = np.clip(np.log10(np.where(inside, x, lo)) - d, 0.0, 1.0)
        out = np.where(inside, np.asarray(g.derivative(s)) / (np.where(inside, x, lo) * LN10), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), lo, hi)
        flat = np.atleast_1d(x)
        vals = np.array(
            [integrate.quad(lambda u: float(pdf(u)), lo, v, epsabs=1e-15, epsrel=1e-13, limit=200)[0] for v in flat]
        )
        return float(vals[0]) if x.ndim == 0 else vals.reshape(x.shape)

    return Density(f"density[{g.name}]", pdf, (lo, hi), cdf=cdf)
