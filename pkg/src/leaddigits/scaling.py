"""Profiles under a change of scale x -> b x.

With beta = {log10 b} and base slice g1 (the profile at b = 1):

    g(s, b) = g1(1 - beta + s) - g1(1 - beta)        for 0 <= s <= beta
    g(s, b) = 1 + g1(s - beta) - g1(1 - beta)        for beta < s <= 1

Equivalently g(s, b) = R(beta - s) - R(beta) with
R(u) = g1(1 - {u}) - 1 - floor(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .densities import Density
from .digitcore import log_phase
from .embridge import as_density, profile_from_density
from .errors import DomainError, TruncationError
from .profile import AnalyticProfile, Profile

MAX_LOST_MASS = 1e-6


@dataclass(frozen=True)
class BaseSlice:
    """The profile g1 at scale b = 1 and a description of where it came from."""

    g1: Profile
    source: str = "profile"
    lost_mass: float = 0.0


def base_slice(f, truncation: tuple[int, int] | None = None) -> BaseSlice:
    """Base slice of density ``f`` by per-decade quadrature.

    ``truncation`` optionally restricts the decades considered, as a pair of
    exponents (lo, hi) meaning [10^lo, 10^hi]; the slice is then renormalized
    by the captured mass, and losing more than 1e-6 raises
    :class:`TruncationError`. Without it, decades holding less than 1e-14 of
    the mass are skipped.
    """
    f = as_density(f)
    if truncation is None:
        prof = profile_from_density(f)
        return BaseSlice(prof, f.name, prof.plan.lost)
    lo, hi = truncation
    if not lo < hi:
        raise DomainError("truncation needs lo < hi")
    s_lo, s_hi = f.support
    a, b = max(s_lo, 10.0**lo), min(s_hi, 10.0**hi)
    if not a < b:
        raise TruncationError("truncation range misses the support", lost_mass=1.0)
    edges = sorted({a, b, *(10.0**j for j in range(lo, hi + 1) if a < 10.0**j < b)})
    captured = math.fsum(
        integrate.quad(lambda x: float(f.pdf(x)), u, v, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
        for u, v in zip(edges[:-1], edges[1:])
    )
    lost = 1.0 - captured
    if lost > MAX_LOST_MASS:
        raise TruncationError(f"truncation to [1e{lo}, 1e{hi}] loses mass {lost:.3g}", lost_mass=lost)
    clipped = Density(
        f.name,
        lambda x: np.asarray(f.pdf(x), dtype=float) / captured,
        (a, b),
        breakpoints=f.breakpoints,
        params=f.params,
    )
    return BaseSlice(profile_from_density(clipped), f.name, max(lost, 0.0))


def slice_from_profile(g1: Profile) -> BaseSlice:
    return BaseSlice(g1, g1.name)


def _beta(b: float) -> float:
    if not (isinstance(b, (int, float, np.integer, np.floating)) and math.isfinite(b) and b > 0):
        raise DomainError(f"scale b must be a positive finite number, got {b!r}")
    return log_phase(b).s


def _g1(slice_: BaseSlice, u):
    return np.asarray(slice_.g1(np.clip(u, 0.0, 1.0)), dtype=float)


def shift_values(slice_: BaseSlice, s, b: float):
    """g(s, b) by the two-branch circular-shift formula."""
    beta = _beta(b)
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise DomainError("s must lie in [0, 1]")
    base = float(_g1(slice_, 1.0 - beta))
    low = _g1(slice_, 1.0 - beta + np.minimum(s, beta)) - base
    high = 1.0 + _g1(slice_, np.maximum(s - beta, 0.0)) - base
    out = np.where(s <= beta, low, high)
    return float(out) if out.ndim == 0 else out


def shift_profile(slice_: BaseSlice, b: float) -> AnalyticProfile:
    """Profile of the scaled variable b X."""
    beta = _beta(b)
    return AnalyticProfile(
        lambda s: shift_values(slice_, s, b),
        name=f"{slice_.g1.name}*b",
        params={"b": b, "beta": beta},
    )


@dataclass(frozen=True)
class RRep:
    """R(u) = g1(1 - {u}) - 1 - floor(u); satisfies R(u + 1) = R(u) - 1."""

    slice: BaseSlice

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        fl = np.floor(u)
        fr = u - fl
        out = _g1(self.slice, 1.0 - fr) - 1.0 - fl
        return float(out) if out.ndim == 0 else out

    def H(self, u):
        """R(u) + u, which is 1-periodic."""
        return np.asarray(self(u)) + np.asarray(u)


def build_R(slice_: BaseSlice) -> RRep:
    return RRep(slice_)


def eval_g_via_R(r: RRep, s, b: float):
    """g(s, b) = R(beta - s) - R(beta)."""
    beta = _beta(b)
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise DomainError("s must lie in [0, 1]")
    out = np.asarray(r(beta - s)) - r(beta)
    return float(out) if np.ndim(out) == 0 else out
