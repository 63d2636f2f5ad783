"""Block frequencies from a profile G, and the closed-form profile families.

The frequency of block ``k`` is

    rho(k) = a * (floor(log10(k+1)) - floor(log10 k)) + G({log10(k+1)}) - G({log10 k})

with G evaluated by its left limit, so that ``x = k * 10^j`` belongs to block
``k``. Phases of ``k`` come from :func:`integer_phases`, which matches the
phase of data values exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .densities import Density, decade_ratio
from .digitcore import DigitBlock, _as_block, canonicalize, integer_phases, log_phase
from .errors import DegenerateWindowError, DomainError, NormalizationError
from .profile import AnalyticProfile, EmpiricalProfile, Profile

LN10 = math.log(10.0)


# frequency formulas -----------------------------------------------------------


def _blocks(k):
    if isinstance(k, DigitBlock):
        return np.array(k.k)
    arr = np.asarray(k)
    if arr.ndim == 0:
        return np.array(_as_block(int(arr)) if float(arr) == int(arr) else _as_block(float(arr)))
    if arr.dtype.kind not in "iu" and not np.all(np.floor(arr) == arr):
        raise DomainError("digit blocks must be integers")
    if np.any(arr < 1):
        raise DomainError("digit blocks must be positive")
    return arr.astype(np.int64)


def _scalar_or_array(k, out):
    return float(out) if np.ndim(out) == 0 else out


def rho_from_profile(g: Profile, a: float, k):
    """Frequency of digit block ``k`` (scalar or array) from profile ``g``.

    Examples
    --------
    >>> round(rho_from_profile(benford_profile(), 1.0, 1), 6)
    0.30103
    """
    ks = _blocks(k)
    e0, s0 = integer_phases(ks)
    e1, s1 = integer_phases(ks + 1)
    out = a * (e1 - e0) + np.asarray(g.left(s1)) - np.asarray(g.left(s0))
    return _scalar_or_array(ks, out)


def _shifted(e, s, d):
    """Integer and fractional parts of ``e + s - d`` for 0 <= d < 1."""
    below = s < d
    return e - below, np.where(below, s - d + 1.0, s - d)


def rho_two_term(g: Profile, k, d: float = 0.0):
    """W(log10(k+1) - d) - W(log10 k - d) with W(x) = floor(x) + G({x})."""
    if not 0.0 <= d < 1.0:
        raise DomainError(f"shift d must lie in [0, 1), got {d}")
    ks = _blocks(k)
    e0, s0 = integer_phases(ks)
    e1, s1 = integer_phases(ks + 1)
    if d:
        e0, s0 = _shifted(e0, s0, d)
        e1, s1 = _shifted(e1, s1, d)
    out = 1.0 * (e1 - e0) + np.asarray(g.left(s1)) - np.asarray(g.left(s0))
    return _scalar_or_array(ks, out)


def rho_asymptotic(g: Profile, k):
    """Leading-order frequency G'({log10 k}) / (k ln 10)."""
    ks = _blocks(k)
    _, s = integer_phases(ks)
    out = np.asarray(g.derivative(s)) / (ks * LN10)
    return _scalar_or_array(ks, out)


def first_digit_vector(g: Profile) -> np.ndarray:
    """Induced frequencies of the leading digits 1..9."""
    return np.asarray(rho_from_profile(g, 1.0, np.arange(1, 10)))


def decade_sum(g: Profile, d: int, a: float = 1.0) -> float:
    ks = np.arange(10**d, 10 ** (d + 1))
    return math.fsum(np.asarray(rho_from_profile(g, a, ks)).tolist())


# simple families --------------------------------------------------------------


def benford_profile() -> AnalyticProfile:
    return AnalyticProfile(lambda s: s, lambda s: np.ones_like(s), name="benford")


def uniform_slice_profile() -> AnalyticProfile:
    """(10^s - 1)/9, the profile of U(0, 1) and of U(0, 10^n)."""
    return AnalyticProfile(
        lambda s: np.expm1(s * LN10) / 9.0,
        lambda s: LN10 * 10.0**s / 9.0,
        name="uniform-slice",
    )


def ratio_uniforms_profile() -> AnalyticProfile:
    """Profile of X/Y for independent uniforms: 1/2 + 10^s/18 - 5*10^-s/9."""

    def g(s):
        t = 10.0**s
        return np.where(s == 0.0, 0.0, 0.5 + t / 18.0 - 5.0 / (9.0 * t))

    return AnalyticProfile(
        g,
        lambda s: LN10 * (10.0**s / 18.0 + 5.0 * 10.0 ** (-s) / 9.0),
        name="ratio-uniforms",
    )


def ratio_uniforms_rho(k: int, n: int | None = None) -> float:
    """Closed-form block frequency for the ratio of uniforms; n = floor(log10 k)."""
    k = _as_block(k)
    if n is None:
        n = log_phase(k).exponent
    return 10.0 ** (-n) / 18.0 - (5.0 / 9.0) * 10.0**n * (1.0 / (k + 1) - 1.0 / k)


def equivalent_density_on_decade() -> Density:
    """1/18 + 5/(9 x^2) on [1, 10]; its decade profile is the ratio-of-uniforms profile."""
    return decade_ratio()


_A1 = -LN10 / 9.0
_B1 = 1.0 / 9.0 + 10.0 * LN10 / 81.0


def product_uniforms_profile(window: str = "decade") -> AnalyticProfile:
    """Closed-form profiles for the product of two uniforms.

    ``window="decade"`` gives 10^s (A s + B) - B with A = -ln10/9 and
    B = 1/9 + 10 ln10/81; ``window="cdf"`` gives the [0.1, 1] window
    (10^s [1 + (1-s) ln10] - (1 + ln10)) / (9 - ln10).
    """
    if window == "decade":
        return AnalyticProfile(
            lambda s: 10.0**s * (_A1 * s + _B1) - _B1,
            lambda s: 10.0**s * (LN10 * (_A1 * s + _B1) + _A1),
            name="product-uniforms",
            params={"window": window},
        )
    if window == "cdf":
        den = 9.0 - LN10
        return AnalyticProfile(
            lambda s: (10.0**s * (1.0 + (1.0 - s) * LN10) - (1.0 + LN10)) / den,
            lambda s: LN10 * LN10 * 10.0**s * (1.0 - s) / den,
            name="product-uniforms",
            params={"window": window},
        )
    raise DomainError(f"unknown product-uniforms window {window!r}; use 'decade' or 'cdf'")


def product_uniforms_limit_profile(N: int, samples: int = 1_000_000, seed: int = 0) -> EmpiricalProfile:
    """Empirical profile of the phase of a product of ``N`` uniforms.

    Works with summed logarithms, so large ``N`` does not underflow.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"factor count must be a positive integer, got {N}")
    if samples < 1:
        raise DomainError("samples must be positive")
    rng = np.random.default_rng(seed)
    total = np.zeros(samples)
    for _ in range(int(N)):
        total += np.log10(1.0 - rng.random(samples))
    ph = total - np.floor(total)
    return EmpiricalProfile(np.where(ph >= 1.0, 0.0, ph))


# power law --------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawParams:
    """Density p y^(p-1) / b^p on (a_low, b), renormalized when a_low > 0."""

    p: float
    b: float
    a_low: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= -1.0):
            raise DomainError(f"power-law exponent must be >= -1, got {self.p}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(f"power-law bound b must be positive, got {self.b}")
        if not (0.0 <= self.a_low < self.b):
            raise DomainError(f"need 0 <= a_low < b, got a_low={self.a_low}, b={self.b}")
        if self.a_low > 0 and self.p <= 0:
            raise DomainError("a finite window [a_low, b] needs p > 0")

    @property
    def q0(self) -> float:
        """Fractional part of log10 b."""
        return log_phase(self.b).s


def _powerlaw_eval(p: float, q0: float):
    if p == 0.0:
        return (lambda s: s), (lambda s: np.ones_like(s))
    den = math.expm1(p * LN10)
    scale = 10.0 ** (p * (1.0 - q0))

    def g(s):
        lo = scale * np.expm1(p * s * LN10) / den
        hi = 1.0 + scale * np.expm1(p * (s - 1.0) * LN10) / den
        return np.where(s <= q0, lo, hi)

    def dg(s):
        # the slope drops by a factor 10^p across s = q0
        return scale * p * LN10 / den * np.where(s <= q0, 10.0 ** (p * s), 10.0 ** (p * (s - 1.0)))

    return g, dg


def powerlaw_profile(params: PowerLawParams | float, b: float | None = None) -> AnalyticProfile:
    """Phase profile of the power-law density p y^(p-1)/b^p on (0, b).

    For b a power of ten this is (10^(ps) - 1)/(10^p - 1). Otherwise the
    profile has a corner at s = {log10 b}. p = 0 gives G(s) = s.
    """
    if not isinstance(params, PowerLawParams):
        params = PowerLawParams(float(params), float(b))
    if params.a_low > 0:
        return powerlaw_window_profile(params.a_low, params.b, params.p)
    q0 = params.q0
    g, dg = _powerlaw_eval(params.p, q0)
    corners = (q0,) if (q0 > 0 and params.p != 0) else ()
    return AnalyticProfile(
        g, dg, name="powerlaw", params={"p": params.p, "b": params.b}, corners=corners
    )


def powerlaw_general(s, p: float, b: float):
    """The single-expression form of the power-law profile, written with the
    abbreviations q = log10 b, r = q - s and their integer/fractional parts.
    Used to cross-check the two-branch evaluation."""
    s = np.asarray(s, dtype=float)
    lp = log_phase(b)
    q1, q0 = lp.exponent, lp.s
    r = q1 + q0 - s
    r1 = np.floor(r)
    r0 = r - r1
    c = 10.0**p / (10.0**p - 1.0)
    return -r1 + q1 - c * 10.0 ** (-p * q0) + c * 10.0 ** (-p * r0)


def powerlaw_rho(k, b: float, p: float):
    return rho_from_profile(powerlaw_profile(PowerLawParams(p, b)), 1.0, k)


def powerlaw_rho_extrema(k, p: float) -> tuple[float, float]:
    """(max, min) of the block frequency of ``k`` over all bounds b."""
    k = _as_block(k)
    if not p > 0:
        raise DomainError(f"extrema need p > 0, got {p}")
    den = 10.0**p - 1.0
    r = (k / (k + 1.0)) ** p
    return 10.0**p * (1.0 - r) / den, (1.0 / r - 1.0) / den


def powerlaw_window_profile(a_low: float, b: float, p: float) -> AnalyticProfile:
    """Profile of the power law restricted to [a_low, b]."""
    PowerLawParams(p, b, a_low)
    gb = powerlaw_profile(PowerLawParams(p, b))
    if a_low == 0.0:
        return gb
    if not p > 0:
        raise DomainError("a finite window needs p > 0")
    ga = powerlaw_profile(PowerLawParams(p, a_low))
    r = (a_low / b) ** p
    corners = tuple(sorted(set(gb.corners + ga.corners)))
    return AnalyticProfile(
        lambda s: (gb._eval(s) - r * ga._eval(s)) / (1.0 - r),
        lambda s: (gb._d(s) - r * ga._d(s)) / (1.0 - r),
        name="powerlaw",
        params={"p": p, "b": b, "a_low": a_low},
        corners=corners,
    )


def powerlaw_window(s, a_low: float, b: float, p: float):
    """G(s) for the power law on [a_low, b]."""
    if a_low >= b:
        raise DomainError(f"need a_low < b, got a_low={a_low}, b={b}")
    if not p > 0:
        raise DomainError(f"need p > 0, got {p}")
    return powerlaw_window_profile(a_low, b, p)(s)


# windows and integral profiles -------------------------------------------------


@dataclass(frozen=True)
class WindowSpec:
    """Decade window [10^m, 10^n)."""

    m: int
    n: int

    def __post_init__(self):
        for v in (self.m, self.n):
            if isinstance(v, bool) or int(v) != v:
                raise DomainError("window exponents must be integers")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        if self.m >= self.n:
            raise DomainError(f"window needs m < n, got m={self.m}, n={self.n}")

    @property
    def L(self) -> int:
        return self.n - self.m


class IntegralProfile(Profile):
    """G(s) = c * integral of ``psi`` over [0, s], evaluated by adaptive quadrature."""

    def __init__(self, psi: Callable[[float], float], scale: float, *, name: str = "integral"):
        self.psi, self.scale, self.name = psi, scale, name

    def _eval(self, s):
        order = np.argsort(s)
        out = np.empty_like(s, dtype=float)
        acc, prev = 0.0, 0.0
        for i in order:
            x = float(s[i])
            if x > prev:
                acc += integrate.quad(self.psi, prev, x, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
                prev = x
            out[i] = self.scale * acc
        return out

    def _deriv(self, s):
        return self.scale * np.array([self.psi(float(x)) for x in s])


def scale_invariant_profile(psi: Callable[[float], float], window: WindowSpec | int = 1, tol: float = 1e-8):
    """Profile (n - m) ln10 * integral_0^s psi for a 1-periodic generating density.

    Raises :class:`NormalizationError` unless (n - m) ln10 * integral_0^1 psi = 1.
    """
    L = window.L if isinstance(window, WindowSpec) else int(window)
    if L < 1:
        raise DomainError("window length must be at least 1")
    scale = L * LN10
    total = scale * integrate.quad(psi, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    if abs(total - 1.0) > tol:
        raise NormalizationError(f"generating density integrates to {total!r}, not 1", measured=total)
    grid = np.linspace(0.0, 1.0, 257)
    if np.any(np.array([psi(float(x)) for x in grid]) < 0):
        raise DomainError("generating density must be nonnegative")
    return IntegralProfile(psi, scale, name="scale-invariant")


class WindowedCDFProfile(Profile):
    """Multi-decade profile sum_i [F(10^(i+s)) - F(10^i)] / [F(10^n) - F(10^m)]."""

    def __init__(self, F: Callable, window: WindowSpec, pdf: Callable | None = None, name: str = "windowed"):
        self.F, self.window, self.pdf, self.name = F, window, pdf, name
        lo = float(np.asarray(F(10.0**window.m)))
        hi = float(np.asarray(F(10.0**window.n)))
        self.mass = hi - lo
        if not self.mass > 0:
            raise DegenerateWindowError(
                f"window [1e{window.m}, 1e{window.n}) carries no probability mass"
            )
        self._base = [float(np.asarray(F(10.0**i))) for i in range(window.m, window.n)]

    def _eval(self, s):
        acc = np.zeros_like(s, dtype=float)
        for i, base in zip(range(self.window.m, self.window.n), self._base):
            acc += np.asarray(self.F(10.0 ** (i + s)), dtype=float) - base
        return np.where(s >= 1.0, 1.0, acc / self.mass)

    def _deriv(self, s):
        if self.pdf is None:
            return super()._deriv(s)
        acc = np.zeros_like(s, dtype=float)
        for i in range(self.window.m, self.window.n):
            x = 10.0 ** (i + s)
            acc += np.asarray(self.pdf(x), dtype=float) * x * LN10
        return acc / self.mass


def windowed_profile_from_cdf(F: Callable, window: WindowSpec, pdf: Callable | None = None) -> WindowedCDFProfile:
    """Profile of the distribution with CDF ``F`` restricted to the decade window."""
    return WindowedCDFProfile(F, window, pdf)


# sequences --------------------------------------------------------------------


def arithmetic_sequence_profile(alpha: float, beta: float = 0.0, N: float = math.inf, log_b_frac: float | None = None):
    """Phase profile of alpha*i + beta, i = 1..N.

    Finite ``N`` gives the exact empirical profile. ``N = inf`` gives the
    limiting closed form, which depends on the limit taken through the
    fractional part ``log_b_frac`` of log10 of the sequence's upper end.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not beta >= 0:
        raise DomainError(f"beta must be nonnegative, got {beta}")
    if math.isinf(N):
        if log_b_frac is None or not 0.0 <= log_b_frac < 1.0:
            raise DomainError("the infinite-N limit needs log_b_frac in [0, 1)")
        q = float(log_b_frac)

        def J(s):
            u = q - s
            fl = np.floor(u)
            fr = u - fl
            return 10.0 * 10.0 ** (-fr) / 9.0 - 10.0 * 10.0 ** (-q) / 9.0 - fl

        return AnalyticProfile(J, name="arithmetic-limit", params={"log_b_frac": q}, corners=(q,) if q else ())
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer or inf, got {N}")
    i = np.arange(1, int(N) + 1)
    if alpha == int(alpha) and beta == int(beta):
        vals = int(alpha) * i + int(beta)
        _, ph = integer_phases(vals)
        return EmpiricalProfile(ph)
    return EmpiricalProfile(canonicalize(alpha * i.astype(float) + beta).phases)


def power_sequence_profile(alpha: float, N: int) -> EmpiricalProfile:
    """Exact empirical phase profile of i^alpha, i = 1..N."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    e, s = integer_phases(np.arange(1, int(N) + 1))
    # reduce the integer part first so alpha = 1 returns the phases unchanged
    ae = alpha * e
    y = (ae - np.floor(ae)) + alpha * s
    ph = y - np.floor(y)
    return EmpiricalProfile(np.where(ph >= 1.0, 0.0, ph))


def power_sequence_integral_profile(alpha: float, N: int) -> AnalyticProfile:
    """Continuous companion of :func:`power_sequence_profile`.

    Replaces the count of i in [1, N] by the measure of the continuous
    variable, normalized by N - 1 so that G(1) = 1.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N}")
    Y = alpha * math.log10(N)
    top = int(math.floor(Y))

    def g(s):
        acc = np.zeros_like(s, dtype=float)
        for j in range(top + 1):
            hi = np.minimum(j + s, Y)
            acc += np.where(hi > j, 10.0 ** (hi / alpha) - 10.0 ** (j / alpha), 0.0)
        return acc / (N - 1)

    return AnalyticProfile(g, name="power-sequence-integral", params={"alpha": alpha, "N": N})


# registry ---------------------------------------------------------------------


def _float(params, key, default=None):
    if key not in params:
        if default is None:
            raise DomainError(f"missing parameter {key!r}")
        return default
    try:
        return float(params[key])
    except (TypeError, ValueError):
        raise DomainError(f"parameter {key!r} must be numeric, got {params[key]!r}") from None


ANALYTIC_FAMILIES = ("benford", "uniform-slice", "ratio-uniforms", "product-uniforms", "powerlaw")


def make_profile(family: str, params: dict | None = None) -> AnalyticProfile:
    """Build a closed-form profile by family name."""
    params = dict(params or {})
    if family == "benford":
        return benford_profile()
    if family == "uniform-slice":
        return uniform_slice_profile()
    if family == "ratio-uniforms":
        return ratio_uniforms_profile()
    if family == "product-uniforms":
        return product_uniforms_profile(str(params.get("window", "decade")))
    if family == "powerlaw":
        return powerlaw_profile(
            PowerLawParams(_float(params, "p"), _float(params, "b", 10.0), _float(params, "a_low", 0.0))
        )
    raise DomainError(f"unknown profile family {family!r}; choose from {ANALYTIC_FAMILIES}")
