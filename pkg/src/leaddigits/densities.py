"""Built-in probability densities on (0, inf) with CDFs and samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError

LN10 = math.log(10.0)

Sampler = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class Density:
    """A density f on ``support`` with optional closed-form CDF and sampler.

    ``breakpoints`` lists interior points where f or f' is discontinuous;
    quadrature splits there.
    """

    name: str
    pdf: Callable
    support: tuple[float, float]
    cdf: Callable | None = None
    sampler: Sampler | None = None
    breakpoints: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.support
        if not (0.0 <= lo < hi):
            raise DomainError(f"density support must satisfy 0 <= lo < hi, got {self.support}")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.sampler is None:
            raise DomainError(f"density {self.name!r} has no sampler")
        return self.sampler(rng, n)


def _clip_support(x, lo, hi):
    return (x >= lo) & (x <= hi)


def benford() -> Density:
    """Log-uniform density 1/(x ln 10) on [1, 10]."""
    return Density(
        "benford",
        lambda x: np.where(_clip_support(x, 1.0, 10.0), 1.0 / (np.asarray(x) * LN10), 0.0),
        (1.0, 10.0),
        cdf=lambda x: np.log10(np.clip(x, 1.0, 10.0)),
        sampler=lambda rng, n: 10.0 ** rng.random(n),
    )


def uniform(b: float = 1.0) -> Density:
    if not b > 0:
        raise DomainError(f"uniform upper bound must be positive, got {b}")
    return Density(
        "uniform",
        lambda x: np.where(_clip_support(x, 0.0, b), 1.0 / b, 0.0),
        (0.0, b),
        cdf=lambda x: np.clip(np.asarray(x) / b, 0.0, 1.0),
        sampler=lambda rng, n: b * (1.0 - rng.random(n)),
        params={"b": b},
    )


def ratio_uniforms() -> Density:
    """Density of X/Y for independent X, Y ~ U(0, 1)."""

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 1.0, 0.5, 0.5 / np.maximum(x, 1.0) ** 2) * (x > 0)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 1.0, 0.5 * np.maximum(x, 0.0), 1.0 - 0.5 / np.maximum(x, 1.0))

    def sampler(rng, n):
        u = rng.random((2, n))
        return (1.0 - u[0]) / (1.0 - u[1])

    return Density("ratio-uniforms", pdf, (0.0, math.inf), cdf=cdf, sampler=sampler, breakpoints=(1.0,))


def decade_ratio() -> Density:
    """Density 1/18 + 5/(9 x^2) on [1, 10], sharing the ratio-of-uniforms profile."""

    def inv(u):
        c = 9.0 - 18.0 * u
        return (-c + np.sqrt(c * c + 40.0)) / 2.0

    return Density(
        "decade-ratio",
        lambda x: np.where(_clip_support(x, 1.0, 10.0), 1.0 / 18.0 + 5.0 / (9.0 * np.asarray(x) ** 2), 0.0),
        (1.0, 10.0),
        cdf=lambda x: (lambda y: (y - 1.0) / 18.0 + 5.0 / 9.0 * (1.0 - 1.0 / y))(np.clip(x, 1.0, 10.0)),
        sampler=lambda rng, n: inv(rng.random(n)),
    )


def product_uniforms(n_factors: int = 2) -> Density:
    """Density of a product of ``n_factors`` independent U(0, 1) variables."""
    if int(n_factors) != n_factors or n_factors < 1:
        raise DomainError(f"factor count must be a positive integer, got {n_factors}")
    n_factors = int(n_factors)
    fact = math.factorial(n_factors - 1)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = _clip_support(x, 0.0, 1.0) & (x > 0)
        lx = -np.log(np.where(inside, x, 1.0))
        return np.where(inside, lx ** (n_factors - 1) / fact, 0.0)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        pos = x > 0
        lx = -np.log(np.where(pos, x, 1.0))
        series = sum(lx**i / math.factorial(i) for i in range(n_factors))
        return np.where(pos, x * series, 0.0)

    def sampler(rng, n):
        return np.exp(-rng.standard_gamma(n_factors, n))

    return Density(
        "product-uniforms", pdf, (0.0, 1.0), cdf=cdf, sampler=sampler, params={"N": n_factors}
    )


def halfnormal(sigma: float = 1.0) -> Density:
    """Standard normal folded onto (0, inf), scaled by ``sigma``."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    c = math.sqrt(2.0 / math.pi) / sigma
    return Density(
        "halfnormal",
        lambda x: np.where(np.asarray(x) >= 0, c * np.exp(-0.5 * (np.asarray(x) / sigma) ** 2), 0.0),
        (0.0, math.inf),
        cdf=lambda x: special.erf(np.maximum(x, 0.0) / (sigma * math.sqrt(2.0))),
        sampler=lambda rng, n: np.abs(sigma * rng.standard_normal(n)),
        params={"sigma": sigma},
    )


def weibull(a: float = 1.0, b: float = 1.0) -> Density:
    """Weibull with shape ``a`` and scale ``b``: (a/b)(x/b)^(a-1) exp(-(x/b)^a)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"Weibull shape and scale must be positive, got a={a}, b={b}")

    def pdf(x):
        x = np.asarray(x, dtype=float)
        pos = x > 0
        z = np.where(pos, x, 1.0) / b
        with np.errstate(over="ignore", invalid="ignore"):
            out = (a / b) * z ** (a - 1.0) * np.exp(-(z**a))
        return np.where(pos & np.isfinite(out), out, 0.0)

    def cdf(x):
        # (x/b)^a may overflow far in the tail; the limit 1 is still exact
        with np.errstate(over="ignore"):
            return -np.expm1(-((np.maximum(x, 0.0) / b) ** a))

    return Density(
        "weibull",
        pdf,
        (0.0, math.inf),
        cdf=cdf,
        sampler=lambda rng, n: b * rng.weibull(a, n),
        params={"a": a, "b": b},
    )


def lognormal(mu: float = 0.0, sigma: float = 1.0) -> Density:
    """exp(N(mu, sigma^2))."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")

    def pdf(x):
        x = np.asarray(x, dtype=float)
        pos = x > 0
        y = np.where(pos, x, 1.0)
        z = (np.log(y) - mu) / sigma
        return np.where(pos, np.exp(-0.5 * z * z) / (y * sigma * math.sqrt(2.0 * math.pi)), 0.0)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        pos = x > 0
        return np.where(pos, special.ndtr((np.log(np.where(pos, x, 1.0)) - mu) / sigma), 0.0)

    return Density(
        "lognormal",
        pdf,
        (0.0, math.inf),
        cdf=cdf,
        sampler=lambda rng, n: rng.lognormal(mu, sigma, n),
        params={"mu": mu, "sigma": sigma},
    )


def powerlaw(p: float = 1.0, b: float = 1.0) -> Density:
    """p y^(p-1) / b^p on (0, b)."""
    if not (p > 0 and b > 0):
        raise DomainError(f"power-law density needs p > 0 and b > 0, got p={p}, b={b}")

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x <= b)
        return np.where(inside, p * np.where(inside, x, 1.0) ** (p - 1.0) / b**p, 0.0)

    return Density(
        "powerlaw",
        pdf,
        (0.0, b),
        cdf=lambda x: np.clip(np.asarray(x, dtype=float) / b, 0.0, 1.0) ** p,
        sampler=lambda rng, n: b * (1.0 - rng.random(n)) ** (1.0 / p),
        params={"p": p, "b": b},
    )


FAMILIES: dict[str, Callable[..., Density]] = {
    "benford": benford,
    "uniform": uniform,
    "ratio-uniforms": ratio_uniforms,
    "decade-ratio": decade_ratio,
    "product-uniforms": product_uniforms,
    "halfnormal": halfnormal,
    "weibull": weibull,
    "lognormal": lognormal,
    "powerlaw": powerlaw,
}


def builtin_densities() -> list[Density]:
    """Every built-in family at its default parameters."""
    return [factory() for factory in FAMILIES.values()]


def make_density(name: str, **params) -> Density:
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown density family {name!r}; choose from {sorted(FAMILIES)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {name!r}: {exc}") from None
