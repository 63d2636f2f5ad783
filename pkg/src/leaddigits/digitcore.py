"""Mantissa and phase arithmetic, indicator kernels, and direct counting.

Phases are computed from the decimal representation of a value rather than
from a raw floating-point logarithm, so that exact powers of ten have phase
exactly zero and values lying on a block boundary are never assigned to the
previous block.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import DomainError, EmptyInputError

if TYPE_CHECKING:
    from .profile import EmpiricalProfile

MAX_BLOCK_LEN = 15

_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


@dataclass(frozen=True)
class LogPhase:
    """Integer and fractional parts of ``log10(x)``."""

    exponent: int
    s: float

    def value(self) -> float:
        return 10.0 ** (self.exponent + self.s)


@dataclass(frozen=True, order=True)
class DigitBlock:
    """A leading digit block ``k`` together with its decade ``d``."""

    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise DomainError(f"digit block must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def d(self) -> int:
        return len(str(self.k)) - 1

    @property
    def length(self) -> int:
        return self.d + 1

    @property
    def decade_size(self) -> int:
        """Number of integers in the block's decade, ``10^(d+1) - 10^d``."""
        return 10 ** (self.d + 1) - 10**self.d

    @property
    def phase(self) -> float:
        return log_phase(self.k).s


def _as_block(k) -> int:
    if isinstance(k, DigitBlock):
        return k.k
    return DigitBlock(k).k


def _to_decimal(x) -> Decimal:
    if isinstance(x, bool):
        raise DomainError("booleans are not numeric data")
    if isinstance(x, Decimal):
        d = x
    elif isinstance(x, (int, np.integer)):
        d = Decimal(int(x))
    elif isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DomainError(f"value must be finite, got {x!r}")
        d = Decimal(repr(float(x)))
    elif isinstance(x, str):
        text = x.strip()
        if not _NUMBER_RE.match(text):
            raise DomainError(f"not a decimal number: {x!r}")
        d = Decimal(text)
    else:
        raise DomainError(f"unsupported value type {type(x).__name__}")
    if not d.is_finite():
        raise DomainError(f"value must be finite, got {x!r}")
    if d <= 0:
        raise DomainError(f"value must be strictly positive, got {x!r}")
    return d


def significant_digits(x) -> tuple[str, int]:
    """Return the significant-digit string of ``x`` and its decimal exponent.

    ``0.0025`` gives ``("25", -3)``; ``314`` gives ``("314", 2)``.
    Trailing zeros are stripped.
    """
    d = _to_decimal(x)
    _, digits, _ = d.as_tuple()
    text = "".join(map(str, digits)).lstrip("0").rstrip("0") or "0"
    return text, d.adjusted()


def _phase_from_mantissa(mant: float, lead: int) -> float:
    if mant == 1.0:
        return 0.0
    # float rounding of a long mantissa may reach the next digit boundary
    if mant >= lead + 1:
        mant = math.nextafter(lead + 1.0, 0.0)
    s = math.log10(mant)
    upper = math.log10(lead + 1.0)
    if s >= upper:
        s = math.nextafter(upper, 0.0)
    return max(s, math.log10(lead))


def _phase_from_digits(digits: str) -> float:
    return _phase_from_mantissa(float(Decimal(digits[0] + "." + digits[1:])), int(digits[0]))


def integer_phases(ks) -> tuple[np.ndarray, np.ndarray]:
    """Exponents and phases of positive integers below 10^15, vectorized.

    ``k / 10^e`` is a correctly rounded quotient of exact operands, so the
    result is identical to :func:`log_phase` element by element.
    """
    k = np.asarray(ks)
    shape = k.shape
    k = k.reshape(-1)
    if k.dtype.kind not in "iu":
        if not np.all(np.floor(k) == k):
            raise DomainError("integer_phases needs integer input")
        k = k.astype(np.int64)
    k = k.astype(np.int64)
    if k.size and (k.min() < 1 or k.max() >= 10**MAX_BLOCK_LEN):
        raise DomainError(f"integers must lie in [1, 10^{MAX_BLOCK_LEN})")
    e = np.floor(np.log10(np.maximum(k, 1).astype(float))).astype(np.int64)
    pow10 = 10**e
    e = e - (k < pow10) + (k >= 10 * pow10)
    pow10 = 10**e
    mant = k.astype(float) / pow10.astype(float)
    lead = (k // pow10).tolist()
    s = np.array([_phase_from_mantissa(m, d) for m, d in zip(mant.tolist(), lead)], dtype=float)
    return e.reshape(shape), s.reshape(shape)


def log_phase(x) -> LogPhase:
    """Split ``log10(x)`` into exponent and phase ``s`` in [0, 1).

    Examples
    --------
    >>> log_phase(100)
    LogPhase(exponent=2, s=0.0)
    >>> log_phase(0.0025).exponent
    -3
    """
    digits, exponent = significant_digits(x)
    return LogPhase(exponent, _phase_from_digits(digits))


def _check_block_len(m: int) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"block length must be a positive integer, got {m!r}")
    if m > MAX_BLOCK_LEN:
        raise DomainError(f"block length {m} exceeds the supported maximum {MAX_BLOCK_LEN}")
    return int(m)


def leading_block(x, m: int = 1) -> int:
    """First ``m`` significant digits of ``x`` read as an integer."""
    m = _check_block_len(m)
    digits, _ = significant_digits(x)
    return int(digits[:m].ljust(m, "0"))


def indicator_V(k, x) -> int:
    """1 if the leading block of ``x`` with as many digits as ``k`` equals ``k``."""
    k = _as_block(k)
    m = len(str(k))
    return int(leading_block(x, m) == k)


def window_M(s: float, x) -> int:
    """1 if the phase of ``x`` is strictly below ``s``."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"window parameter s must lie in [0, 1], got {s!r}")
    return int(log_phase(x).s < s)


def kernel_V_floor(k, x):
    """The floor-difference form of V evaluated with floating logarithms.

    Vectorized over ``x``. Agrees with :func:`indicator_V` away from block
    boundaries; kept for cross-checking the exact path.
    """
    x = np.asarray(x, dtype=float)
    return (np.floor(np.log10(x / k)) - np.floor(np.log10(x / (k + 1)))).astype(int)


def kernel_V_frac(k, x):
    """Fractional-part form of V, vectorized over ``x``."""
    x = np.asarray(x, dtype=float)
    lx = np.log10(x)
    sx = lx - np.floor(lx)
    lk, lk1 = math.log10(k), math.log10(k + 1)
    sk, sk1 = lk - math.floor(lk), lk1 - math.floor(lk1)
    out = (
        np.floor(sx - sk)
        - np.floor(sx - sk1)
        + math.floor(lk1)
        - math.floor(lk)
    )
    return out.astype(int)


# vectorized paths ---------------------------------------------------------

_SHORT_SCALE = 1e11
_SHORT_TOL = 1e-3


def _split(x: np.ndarray):
    """Float-path exponent and mantissa plus a mask of values needing the exact path.

    Values whose mantissa is (close to) a decimal with at most 12 significant
    digits, or whose exponent is too large for exact powers of ten, are
    flagged; every other value sits far enough from any block boundary that
    one ulp of rounding cannot move it across.
    """
    # flagged elements get junk (even inf) mantissas; they are recomputed exactly
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = np.floor(np.log10(x)).astype(np.int64)
        exact = np.abs(e) > 22
        e_safe = np.where(exact, 0, e)
        pos = 10.0 ** np.abs(e_safe)
        mant = np.where(e_safe >= 0, x / pos, x * pos)
        bump = mant >= 10.0
        drop = mant < 1.0
        e_safe = e_safe + bump - drop
        e = np.where(exact, e, e_safe)
        pos = 10.0 ** np.abs(e_safe)
        mant = np.where(e_safe >= 0, x / pos, x * pos)
        t = mant * _SHORT_SCALE
        exact |= np.abs(t - np.rint(t)) < _SHORT_TOL
        exact |= (mant < 1.0) | (mant >= 10.0)
    return e, mant, exact


def phases(values) -> np.ndarray:
    """Vectorized phases ``{log10 x}`` consistent with :func:`log_phase`."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return np.empty(0)
    _, mant, exact = _split(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.log10(mant)
    s = np.minimum(s, np.nextafter(1.0, 0.0))
    for i in np.flatnonzero(exact):
        s[i] = log_phase(float(x[i])).s
    return s


def leading_blocks(values, m: int = 1) -> np.ndarray:
    """Vectorized :func:`leading_block`."""
    m = _check_block_len(m)
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return np.empty(0, dtype=np.int64)
    _, mant, exact = _split(x)
    if m > 12:
        exact = np.ones_like(exact)
    k = np.floor(np.where(exact, 1.0, mant) * 10.0 ** (m - 1)).astype(np.int64)
    for i in np.flatnonzero(exact):
        k[i] = leading_block(float(x[i]), m)
    return k


# datasets -----------------------------------------------------------------


@dataclass(frozen=True)
class Dataset:
    """Strictly positive, finite values plus a count of rejected inputs."""

    values: np.ndarray
    n_dropped: int = 0
    n_seen: int = field(default=-1)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size and not (np.all(np.isfinite(v)) and np.all(v > 0)):
            raise DomainError("dataset values must be finite and strictly positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.n_seen < 0:
            object.__setattr__(self, "n_seen", v.size + self.n_dropped)

    def __len__(self) -> int:
        return self.values.size

    @property
    def n_kept(self) -> int:
        return self.values.size

    @cached_property
    def phases(self) -> np.ndarray:
        p = phases(self.values)
        p.flags.writeable = False
        return p

    def blocks(self, m: int = 1) -> np.ndarray:
        return leading_blocks(self.values, m)


def _accept(entry):
    """Return a positive finite float for ``entry`` or None if it must be dropped."""
    if entry is None or isinstance(entry, bool):
        return None
    if isinstance(entry, str):
        text = entry.strip()
        if not _NUMBER_RE.match(text):
            return None
        try:
            value = float(Decimal(text))
        except (InvalidOperation, OverflowError):
            return None
    elif isinstance(entry, (int, float, Decimal, np.integer, np.floating)):
        try:
            value = float(entry)
        except OverflowError:
            return None
    else:
        return None
    if not math.isfinite(value) or value <= 0.0:
        return None
    return value


def canonicalize(raw: Iterable) -> Dataset:
    """Keep strictly positive finite entries; count everything else as dropped.

    Text entries may use decimal or scientific notation. Thousands
    separators, locale decimal commas and non-numeric tokens are dropped.
    """
    if isinstance(raw, np.ndarray) and raw.dtype.kind in "fiu":
        flat = raw.astype(float).reshape(-1)
        keep = np.isfinite(flat) & (flat > 0)
        return Dataset(flat[keep], int(flat.size - keep.sum()))
    kept = []
    dropped = 0
    for entry in raw:
        value = _accept(entry)
        if value is None:
            dropped += 1
        else:
            kept.append(value)
    return Dataset(np.array(kept, dtype=float), dropped)


@dataclass(frozen=True)
class BlockFrequencyTable:
    """Observed frequencies of leading ``order``-digit blocks.

    Only blocks that occur are stored; :meth:`freq` returns 0 for the rest.
    """

    order: int
    counts: dict
    total: int

    @property
    def entries(self) -> dict:
        return {k: c / self.total for k, c in sorted(self.counts.items())}

    def freq(self, k: int) -> float:
        if self.total == 0:
            return 0.0
        return self.counts.get(int(k), 0) / self.total

    def vector(self) -> np.ndarray:
        """Dense frequency vector over all blocks ``10^(m-1) .. 10^m - 1``."""
        lo = 10 ** (self.order - 1)
        out = np.zeros(9 * lo)
        for k, c in self.counts.items():
            out[k - lo] = c / self.total
        return out


def empirical_block_freq(data: Dataset, m: int = 1) -> BlockFrequencyTable:
    """Frequencies of leading ``m``-digit blocks by direct counting.

    Equivalent to averaging ``indicator_V(k, x)`` over the sample for every
    block ``k`` of length ``m``.
    """
    m = _check_block_len(m)
    if len(data) == 0:
        raise EmptyInputError("cannot compute block frequencies of an empty dataset")
    counts = Counter(data.blocks(m).tolist())
    return BlockFrequencyTable(m, dict(counts), len(data))


def empirical_profile(data: Dataset) -> "EmpiricalProfile":
    """Right-continuous step profile of the phases of ``data``."""
    from .profile import EmpiricalProfile

    if len(data) == 0:
        raise EmptyInputError("cannot build an empirical profile of an empty dataset")
    return EmpiricalProfile(data.phases)
