"""Profile types: evaluable nondecreasing maps G on [0, 1] with G(0)=0, G(1)=1."""

from __future__ import annotations

import csv
import io
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonDifferentiableError, ValidationError

NORMALIZATION_TOL = 1e-10
DEFAULT_GRID = 1001
DEFAULT_KNOTS = 4096
JUMP_RATIO = 50.0


def _as_phase_array(s):
    arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("profile argument must lie in [0, 1]")
    return arr


def _finish(arr, out):
    out = np.asarray(out, dtype=float)
    return float(out) if np.ndim(arr) == 0 else out


class Profile(ABC):
    """Nondecreasing map G: [0, 1] -> [0, 1] with G(0)=0 and G(1)=1.

    Profiles are right-continuous. ``left(s)`` gives the left limit, which
    the frequency formulas use so that blocks are left-closed intervals.
    """

    name: str = "profile"

    @abstractmethod
    def _eval(self, s: np.ndarray) -> np.ndarray: ...

    def _eval_left(self, s: np.ndarray) -> np.ndarray:
        return self._eval(s)

    def _deriv(self, s: np.ndarray) -> np.ndarray:
        return central_difference(self, s)

    def __call__(self, s):
        arr = _as_phase_array(s)
        return _finish(arr, self._eval(np.atleast_1d(arr)).reshape(arr.shape))

    def left(self, s):
        """Left limit G(s-); G(0-) is taken to be 0."""
        arr = _as_phase_array(s)
        flat = np.atleast_1d(arr)
        out = np.where(flat == 0.0, 0.0, self._eval_left(flat))
        return _finish(arr, out.reshape(arr.shape))

    def derivative(self, s):
        """G'(s); raises :class:`NonDifferentiableError` at jumps and kinks."""
        arr = _as_phase_array(s)
        return _finish(arr, self._deriv(np.atleast_1d(arr)).reshape(arr.shape))

    def curve(self, grid: int = DEFAULT_GRID) -> tuple[np.ndarray, np.ndarray]:
        if grid < 2:
            raise DomainError("curve grid needs at least two points")
        s = np.linspace(0.0, 1.0, grid)
        return s, np.asarray(self(s))

    def tabulate(self, knots: int = DEFAULT_KNOTS) -> "TabulatedProfile":
        s, g = self.curve(knots)
        g = np.maximum.accumulate(np.clip(g, 0.0, 1.0))
        g[0], g[-1] = 0.0, 1.0
        return TabulatedProfile(s, g, name=self.name)

    def check(self, grid: int = 10_001, tol: float = NORMALIZATION_TOL) -> None:
        """Raise :class:`ValidationError` unless G is normalized and nondecreasing."""
        s, g = self.curve(grid)
        if abs(self.left(0.0)) > tol or abs(g[-1] - 1.0) > tol:
            raise ValidationError(f"profile not normalized: G(0)={g[0]}, G(1)={g[-1]}")
        if np.any(np.diff(g) < -tol):
            raise ValidationError("profile is not nondecreasing")


def central_difference(profile: Profile, s: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Richardson-refined central differences with one-sided fallback at the ends.

    A point where the left and right one-sided slopes differ by more than a
    factor of 50 is treated as a jump and rejected.
    """
    out = np.empty_like(s, dtype=float)
    for i, x in enumerate(s):
        if h <= x <= 1.0 - 2 * h and x >= 2 * h:
            d1 = (profile._eval(np.array([x + h])) - profile._eval(np.array([x - h])))[0] / (2 * h)
            d2 = (
                profile._eval(np.array([x + 2 * h])) - profile._eval(np.array([x - 2 * h]))
            )[0] / (4 * h)
            right = (profile._eval(np.array([x + h])) - profile._eval(np.array([x])))[0] / h
            lft = (profile._eval(np.array([x])) - profile._eval_left(np.array([x - h])))[0] / h
            _check_jump(lft, right, x)
            out[i] = (4 * d1 - d2) / 3
        elif x < 2 * h:
            pts = profile._eval(np.array([x, x + h, x + 2 * h]))
            out[i] = (-3 * pts[0] + 4 * pts[1] - pts[2]) / (2 * h)
        else:
            pts = profile._eval(np.array([x - 2 * h, x - h, x]))
            out[i] = (3 * pts[2] - 4 * pts[1] + pts[0]) / (2 * h)
    return out


def _check_jump(left_slope, right_slope, x):
    lo, hi = sorted((abs(left_slope), abs(right_slope)))
    if hi > 1e-8 and (lo == 0.0 or hi / lo > JUMP_RATIO):
        raise NonDifferentiableError(f"profile has a jump or corner at s={x:.12g}", location=float(x))


class AnalyticProfile(Profile):
    """Closed-form profile defined by a vectorized function.

    ``corners`` lists points where G is continuous but G' jumps;
    ``derivative`` raises there.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        deriv: Callable[[np.ndarray], np.ndarray] | None = None,
        *,
        name: str = "analytic",
        params: dict | None = None,
        corners: Sequence[float] = (),
    ):
        self._func = func
        self._d = deriv
        self.name = name
        self.params = dict(params or {})
        self.corners = tuple(float(c) for c in corners)

    def _eval(self, s):
        return np.asarray(self._func(s), dtype=float) * np.ones_like(s)

    def _deriv(self, s):
        for c in self.corners:
            hit = np.isclose(s, c, rtol=0.0, atol=1e-12)
            if np.any(hit):
                raise NonDifferentiableError(f"profile has a corner at s={c:.12g}", location=c)
        if self._d is None:
            return central_difference(self, s)
        return np.asarray(self._d(s), dtype=float) * np.ones_like(s)

    def __repr__(self):
        return f"AnalyticProfile(name={self.name!r}, params={self.params!r})"


class TabulatedProfile(Profile):
    """Piecewise-linear profile through monotone knots.

    Knots must be strictly increasing in s, span [0, 1], and carry
    nondecreasing values with G(0)=0 and G(1)=1 within 1e-10.
    """

    def __init__(self, s: Sequence[float], g: Sequence[float], *, name: str = "tabulated"):
        s = np.array(s, dtype=float)
        g = np.array(g, dtype=float)
        if s.ndim != 1 or s.shape != g.shape or s.size < 2:
            raise ValidationError("knots must be two equal-length 1-D sequences with >= 2 points")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(g))):
            raise ValidationError("knots must be finite")
        if np.any(np.diff(s) <= 0):
            raise ValidationError("knot abscissae must be strictly increasing")
        if abs(s[0]) > 1e-12 or abs(s[-1] - 1.0) > 1e-12:
            raise ValidationError("knots must span [0, 1]")
        if abs(g[0]) > NORMALIZATION_TOL or abs(g[-1] - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(f"profile not normalized: G(0)={g[0]!r}, G(1)={g[-1]!r}")
        if np.any(np.diff(g) < 0):
            bad = int(np.argmax(np.diff(g) < 0))
            raise ValidationError(f"profile values decrease after s={s[bad]:.12g}")
        s[0], s[-1] = 0.0, 1.0
        s.flags.writeable = False
        g.flags.writeable = False
        self.s, self.g, self.name = s, g, name

    def _eval(self, s):
        return np.interp(s, self.s, self.g)

    def _deriv(self, s):
        h = float(np.min(np.diff(self.s)))
        return central_difference(self, s, h=h)

    def __repr__(self):
        return f"TabulatedProfile(name={self.name!r}, knots={self.s.size})"


class EmpiricalProfile(Profile):
    """Step profile: G(s) = fraction of phases <= s."""

    name = "empirical"

    def __init__(self, phases):
        ph = np.sort(np.asarray(phases, dtype=float).reshape(-1))
        if ph.size == 0:
            raise ValidationError("empirical profile needs at least one phase")
        if ph[0] < 0.0 or ph[-1] >= 1.0:
            raise ValidationError("phases must lie in [0, 1)")
        ph.flags.writeable = False
        self.phases = ph

    @property
    def n(self) -> int:
        return self.phases.size

    def _eval(self, s):
        out = np.searchsorted(self.phases, s, side="right") / self.n
        return np.where(s >= 1.0, 1.0, out)

    def _eval_left(self, s):
        return np.searchsorted(self.phases, s, side="left") / self.n

    def _deriv(self, s):
        raise NonDifferentiableError("empirical profiles are step functions", location=None)

    def sup_distance(self, other: Profile) -> float:
        """Kolmogorov distance to a continuous profile, checked at both sides of each step."""
        g = np.asarray(other(self.phases))
        hi = np.arange(1, self.n + 1) / self.n
        lo = np.arange(0, self.n) / self.n
        return float(max(np.max(np.abs(hi - g)), np.max(np.abs(g - lo))))

    def __repr__(self):
        return f"EmpiricalProfile(n={self.n})"


@dataclass(frozen=True)
class CDM:
    """Cumulative digit mapping W(x) = a*floor(x) + G({x})."""

    a: float
    g: Profile

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fl = np.floor(x)
        return self.a * fl + np.asarray(self.g(np.clip(x - fl, 0.0, 1.0)))

    def left(self, x):
        """Left limit W(x-), consistent with left-closed digit blocks."""
        x = np.asarray(x, dtype=float)
        fl = np.floor(x)
        fr = x - fl
        at_int = fr == 0.0
        inner = np.asarray(self.g.left(np.where(at_int, 1.0, fr)))
        return np.where(at_int, self.a * (fl - 1), self.a * fl) + inner


# curve files ----------------------------------------------------------------


def format_curve(s, g) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "G"])
    for a, b in zip(np.asarray(s, dtype=float), np.asarray(g, dtype=float)):
        writer.writerow([f"{a:.12g}", f"{b:.12g}"])
    return buf.getvalue()


def write_curve(path, profile: Profile, grid: int = DEFAULT_GRID) -> None:
    s, g = profile.curve(grid)
    Path(path).write_text(format_curve(s, g), encoding="utf-8")


def parse_curve(text: str, *, name: str = "curve") -> TabulatedProfile:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["s", "G"]:
        raise ValidationError("curve file must start with the header 's,G'")
    try:
        data = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed curve row: {exc}") from None
    if len(data) < 2:
        raise ValidationError("curve file needs at least two rows")
    s, g = map(np.array, zip(*data))
    return TabulatedProfile(s, g, name=name)


def read_curve(path) -> TabulatedProfile:
    return parse_curve(Path(path).read_text(encoding="utf-8"), name=Path(path).stem)


def max_abs_diff(p: Profile, q: Profile, grid: int = 10_001) -> float:
    s = np.linspace(0.0, 1.0, grid)
    return float(np.max(np.abs(np.asarray(p(s)) - np.asarray(q(s)))))


__all__ = [
    "Profile",
    "AnalyticProfile",
    "TabulatedProfile",
    "EmpiricalProfile",
    "CDM",
    "central_difference",
    "format_curve",
    "write_curve",
    "parse_curve",
    "read_curve",
    "max_abs_diff",
]
