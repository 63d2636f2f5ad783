"""First-digit statistics, Weibull fitting and parametric bootstrap tests."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from .densities import make_density
from .digitcore import Dataset, canonicalize
from .errors import ConvergenceError, DomainError, EmptyInputError, ValidationError

BENFORD = np.log10(1.0 + 1.0 / np.arange(1, 10))
MIN_BOOT = 100
MAX_ITER = 200


@dataclass(frozen=True)
class FirstDigitTable:
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if len(self.counts) != 9 or any(c < 0 for c in self.counts):
            raise ValidationError("a first-digit table holds nine nonnegative counts")
        if sum(self.counts) != self.total:
            raise ValidationError("counts must sum to the total")

    @classmethod
    def from_counts(cls, counts) -> "FirstDigitTable":
        counts = tuple(int(c) for c in counts)
        return cls(counts, sum(counts))

    @property
    def shares(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.total

    def to_dict(self) -> dict:
        return {
            "counts": dict(zip(range(1, 10), self.counts)),
            "shares": dict(zip(range(1, 10), self.shares.tolist())),
            "total": self.total,
        }


def first_digit_table(data: Dataset) -> FirstDigitTable:
    if len(data) == 0:
        raise EmptyInputError("cannot tabulate first digits of an empty dataset")
    counts = np.bincount(data.blocks(1), minlength=10)[1:]
    return FirstDigitTable.from_counts(counts)


def chi_square_benford(t: FirstDigitTable) -> float:
    """Pearson statistic against the Benford first-digit vector."""
    if t.total <= 0:
        raise EmptyInputError("empty table")
    expected = t.total * BENFORD
    return float(np.sum((np.asarray(t.counts) - expected) ** 2 / expected))


def kl_benford(t: FirstDigitTable) -> float:
    """Kullback-Leibler divergence of the observed shares from Benford, in nats."""
    if t.total <= 0:
        raise EmptyInputError("empty table")
    p = t.shares
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / BENFORD[nz])))


# Weibull ------------------------------------------------------------------------


def _positive_values(data) -> np.ndarray:
    x = data.values if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if x.size == 0:
        raise EmptyInputError("no data")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("Weibull fitting needs finite positive values")
    return x


def weibull_loglik(x, a: float, b: float) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    lx = np.log(x)
    return float(n * math.log(a) - n * a * math.log(b) + (a - 1.0) * lx.sum() - np.sum((x / b) ** a))


def weibull_cdf(x, a: float, b: float):
    return -np.expm1(-((np.asarray(x, dtype=float) / b) ** a))


def weibull_quantile(u, a: float, b: float):
    return b * (-np.log1p(-np.asarray(u, dtype=float))) ** (1.0 / a)


def _shape_score(a: float, l: np.ndarray) -> float:
    # profile-likelihood equation in centered logs l = ln x - mean(ln x)
    z = a * l
    w = np.exp(z - z.max())
    return 1.0 / a - float(np.dot(w, l) / w.sum())


def weibull_mle(data) -> tuple[float, float, float]:
    """Maximum-likelihood (shape, scale, loglik) for the two-parameter Weibull."""
    x = _positive_values(data)
    if x.size < 3:
        raise ValidationError("Weibull fitting needs at least 3 values")
    lx = np.log(x)
    l = lx - lx.mean()
    if np.ptp(l) == 0.0:
        raise DomainError("all values are equal; the Weibull MLE does not exist")
    lo, hi = 0.5, 2.0
    it = 0
    while _shape_score(lo, l) <= 0:
        lo /= 2.0
        it += 1
        if it > MAX_ITER:
            raise ConvergenceError("could not bracket the shape root", state={"lo": lo, "hi": hi})
    while _shape_score(hi, l) >= 0:
        hi *= 2.0
        it += 1
        if it > MAX_ITER:
            raise ConvergenceError("could not bracket the shape root", state={"lo": lo, "hi": hi})
    try:
        a, res = optimize.brentq(
            _shape_score, lo, hi, args=(l,), xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER, full_output=True
        )
    except RuntimeError as exc:
        raise ConvergenceError(str(exc), state={"lo": lo, "hi": hi}) from None
    if not res.converged or abs(_shape_score(a, l)) > 1e-10 * max(1.0, 1.0 / a):
        raise ConvergenceError("shape equation not solved", state={"lo": lo, "hi": hi, "a": a})
    z = a * l
    zmax = z.max()
    b = math.exp(lx.mean() + (zmax + math.log(np.mean(np.exp(z - zmax)))) / a)
    return float(a), float(b), weibull_loglik(x, a, b)


def ks_statistic(x, a: float, b: float) -> float:
    """One-sample Kolmogorov-Smirnov distance to the Weibull(a, b) CDF."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    F = weibull_cdf(x, a, b)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def chi2_equiprob(x, a: float, b: float, bins: int) -> float:
    """Pearson statistic on ``bins`` cells with edges at fitted quantiles."""
    x = np.asarray(x, dtype=float)
    edges = weibull_quantile(np.arange(1, bins) / bins, a, b)
    counts = np.bincount(np.searchsorted(edges, x, side="right"), minlength=bins)
    expected = x.size / bins
    return float(np.sum((counts - expected) ** 2) / expected)


def _check_boot(B: int):
    if int(B) != B or B < MIN_BOOT:
        raise ValidationError(f"bootstrap needs at least {MIN_BOOT} replicates, got {B}")


def _replicate_rngs(seed, B: int, stream: int):
    root = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in root.spawn(2)[stream].spawn(int(B))]


def ks_bootstrap(data, fit: tuple[float, float], B: int = 300, seed: int = 0) -> tuple[float, float]:
    """KS distance and parametric-bootstrap p-value; each replicate is refitted."""
    _check_boot(B)
    x = _positive_values(data)
    a, b = fit[0], fit[1]
    d = ks_statistic(x, a, b)
    stats = np.empty(int(B))
    for i, rng in enumerate(_replicate_rngs(seed, B, 0)):
        xs = b * rng.weibull(a, x.size)
        ai, bi, _ = weibull_mle(xs)
        stats[i] = ks_statistic(xs, ai, bi)
    return d, float(np.mean(stats >= d))


def chi2_equiprob_bootstrap(data, fit: tuple[float, float], bins: int = 10, B: int = 400, seed: int = 0) -> tuple[float, float]:
    """Equiprobable-bin chi-square and parametric-bootstrap p-value."""
    if int(bins) != bins or bins < 2:
        raise ValidationError(f"need at least 2 bins, got {bins}")
    _check_boot(B)
    x = _positive_values(data)
    a, b = fit[0], fit[1]
    c = chi2_equiprob(x, a, b, int(bins))
    stats = np.empty(int(B))
    for i, rng in enumerate(_replicate_rngs(seed, B, 1)):
        xs = b * rng.weibull(a, x.size)
        ai, bi, _ = weibull_mle(xs)
        stats[i] = chi2_equiprob(xs, ai, bi, int(bins))
    return c, float(np.mean(stats >= c))


def info_criteria(loglik: float, n_params: int = 2, N: int = 1) -> tuple[float, float]:
    if N < 1:
        raise DomainError("N must be at least 1")
    return -2.0 * loglik + 2.0 * n_params, -2.0 * loglik + n_params * math.log(N)


@dataclass(frozen=True)
class FitReport:
    shape: float
    scale: float
    loglik: float
    aic: float
    bic: float
    ks_d: float
    ks_p: float
    chi2: float
    chi2_p: float
    bins: int
    boot_ks: int
    boot_chi2: int
    seed: int
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def fit_report(data, boot_ks: int = 300, boot_chi2: int = 400, bins: int = 10, seed: int = 0) -> FitReport:
    """Weibull fit with both bootstrap goodness-of-fit tests."""
    _check_boot(boot_ks)
    _check_boot(boot_chi2)
    x = _positive_values(data)
    a, b, ll = weibull_mle(x)
    aic, bic = info_criteria(ll, 2, x.size)
    d, p_ks = ks_bootstrap(x, (a, b), boot_ks, seed)
    c, p_c = chi2_equiprob_bootstrap(x, (a, b), bins, boot_chi2, seed)
    return FitReport(a, b, ll, aic, bic, d, p_ks, c, p_c, int(bins), int(boot_ks), int(boot_chi2), int(seed), x.size)


# sampling -------------------------------------------------------------------------

SAMPLE_FAMILIES = {
    "ratio-uniforms": "ratio-uniforms",
    "product-uniforms": "product-uniforms",
    "weibull": "weibull",
    "uniform": "uniform",
    "powerlaw": "powerlaw",
    "power-law": "powerlaw",
    "lognormal": "lognormal",
    "halfnormal": "halfnormal",
    "benford": "benford",
}


def sample(family: str, n: int, seed: int = 0, **params) -> Dataset:
    """Reproducible sample of ``n`` values from a named family.

    ratio-uniforms: U1/U2. product-uniforms (N factors): exp(-Gamma(N)).
    weibull (a, b): numpy's Weibull generator times b. uniform (b),
    powerlaw (p, b): inverse CDF b U^(1/p).
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    if family not in SAMPLE_FAMILIES:
        raise DomainError(f"unknown family {family!r}; choose from {sorted(SAMPLE_FAMILIES)}")
    if family == "product-uniforms" and "N" in params:
        params = {"n_factors": params.pop("N"), **params}
    dens = make_density(SAMPLE_FAMILIES[family], **params)
    rng = np.random.default_rng(seed)
    return canonicalize(dens.sample(int(n), rng))
