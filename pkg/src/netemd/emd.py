"""Exact one-dimensional earth mover's distance and its shape-only variant EMD*.

Distributions are finite mixtures of point masses or of equal-width uniform
bins. Their CDFs are piecewise linear with jumps, so ``EMD = int |F - G|`` is
integrated exactly segment by segment. EMD* rescales both inputs to unit
variance and minimises EMD over relative translations with a bounded
Brent-Dekker search.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np

BRENT_XTOL = 1e-5
BRENT_MAXITER = 150
ZERO_CUTOFF = 1e-12


class AtomKind(enum.Enum):
    POINT = "point"
    UNIT_BIN = "bin"


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted atoms with positive masses summing to one.

    ``kind`` is ``POINT`` for Dirac atoms, ``UNIT_BIN`` for uniform bins of
    common ``width`` centred on ``locations`` (width 1 until rescaled).
    """

    locations: np.ndarray
    masses: np.ndarray
    kind: AtomKind = AtomKind.POINT
    width: float = 0.0

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=np.float64)
        mass = np.asarray(self.masses, dtype=np.float64)
        if loc.ndim != 1 or loc.shape != mass.shape or loc.size == 0:
            raise ValueError("locations and masses must be equal-length non-empty 1-D arrays")
        if np.any(np.diff(loc) <= 0):
            raise ValueError("locations must be strictly increasing")
        if np.any(mass <= 0):
            raise ValueError("masses must be positive")
        total = mass.sum()
        if abs(total - 1.0) > 1e-12:
            mass = mass / total
        width = float(self.width)
        if self.kind is AtomKind.UNIT_BIN:
            if width <= 0:
                width = 1.0
            if loc.size > 1 and np.min(np.diff(loc)) < width * (1 - 1e-9):
                raise ValueError("bins overlap")
        else:
            width = 0.0
        loc.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mass)
        object.__setattr__(self, "width", width)

    @classmethod
    def from_values(cls, values, kind: AtomKind = AtomKind.POINT) -> "EmpiricalDistribution":
        """Empirical distribution of a sample; ``UNIT_BIN`` requires integer values."""
        values = np.asarray(values)
        if values.size == 0:
            raise ValueError("cannot build a distribution from no values")
        if kind is AtomKind.UNIT_BIN and not np.all(np.equal(np.mod(values, 1), 0)):
            raise ValueError("unit bins need integer-valued features")
        loc, counts = np.unique(values.astype(np.float64), return_counts=True)
        return cls(loc, counts / counts.sum(), kind, 1.0 if kind is AtomKind.UNIT_BIN else 0.0)

    @classmethod
    def point(cls, x: float) -> "EmpiricalDistribution":
        return cls(np.array([float(x)]), np.array([1.0]))

    def __len__(self) -> int:
        return self.locations.size

    def __repr__(self) -> str:
        return f"EmpiricalDistribution(kind={self.kind.value}, atoms={len(self)}, width={self.width:g})"

    @property
    def mean(self) -> float:
        # anchored at the first atom so a single atom is its own mean exactly
        x0 = self.locations[0]
        return float(x0 + np.dot(self.masses, self.locations - x0))

    @cached_property
    def variance(self) -> float:
        centred = self.locations - self.mean
        v = float(np.dot(self.masses, centred * centred))
        if self.kind is AtomKind.UNIT_BIN:
            v += self.width ** 2 / 12.0
        return v

    def support(self) -> tuple[float, float]:
        half = self.width / 2
        return float(self.locations[0] - half), float(self.locations[-1] + half)

    def _mapped(self, loc: np.ndarray, width: float) -> "EmpiricalDistribution":
        # rounding can collapse neighbouring point atoms onto one float; merge them
        if self.kind is AtomKind.POINT and loc.size > 1 and np.any(np.diff(loc) <= 0):
            loc, inv = np.unique(loc, return_inverse=True)
            return EmpiricalDistribution(loc, np.bincount(inv, weights=self.masses), self.kind, width)
        return EmpiricalDistribution(loc, self.masses, self.kind, width)

    def translate(self, c: float) -> "EmpiricalDistribution":
        return self._mapped(self.locations + c, self.width)

    def scale(self, a: float) -> "EmpiricalDistribution":
        if a <= 0:
            raise ValueError("scale factor must be positive")
        return self._mapped(self.locations * a, self.width * a)

    def rescaled(self) -> "EmpiricalDistribution":
        """Unit-variance copy; zero-variance distributions are returned unchanged."""
        v = self.variance
        if v <= 0:
            return self
        return self.scale(1.0 / math.sqrt(v))

    def knots(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CDF as knots ``x`` with left/right limits; linear between consecutive knots."""
        cum = np.cumsum(self.masses)
        cum[-1] = 1.0
        before = np.concatenate([[0.0], cum[:-1]])
        if self.kind is AtomKind.POINT:
            return self.locations.copy(), before, cum
        half = self.width / 2
        x = np.empty(2 * len(self))
        x[0::2] = self.locations - half
        x[1::2] = self.locations + half
        np.maximum.accumulate(x, out=x)
        vals = np.empty_like(x)
        vals[0::2] = before
        vals[1::2] = cum
        return x, vals, vals.copy()

    @cached_property
    def _order_key(self) -> tuple:
        return (self.kind.value, self.width, len(self), self.locations.tobytes(), self.masses.tobytes())

    @cached_property
    def _aligned_knots(self):
        # rescaled and centred at mean zero, the form EMD* works on
        r = self.rescaled()
        x, lft, rgt = r.knots()
        return x - r.mean, lft, rgt


def variance(d: EmpiricalDistribution) -> float:
    return d.variance


def rescale_to_unit_variance(d: EmpiricalDistribution) -> EmpiricalDistribution:
    return d.rescaled()


@numba.njit(cache=True, nogil=True)
def _segment(d0, d1, length):
    # integral over a segment of |linear function| going from d0 to d1
    if (d0 >= 0.0 and d1 >= 0.0) or (d0 <= 0.0 and d1 <= 0.0):
        return 0.5 * (abs(d0) + abs(d1)) * length
    return 0.5 * (d0 * d0 + d1 * d1) / (abs(d0) + abs(d1)) * length


@numba.njit(cache=True, nogil=True)
def _value_before(x, lft, rgt, shift, k, z):
    # CDF just left of z; k is the first knot with x[k] + shift >= z
    n = x.shape[0]
    if k >= n:
        return 1.0
    xk = x[k] + shift
    if xk == z:
        return lft[k]
    if k == 0:
        return 0.0
    x0 = x[k - 1] + shift
    return rgt[k - 1] + (lft[k] - rgt[k - 1]) * (z - x0) / (xk - x0)


@numba.njit(cache=True, nogil=True)
def _value_after(x, lft, rgt, shift, k, z):
    # CDF just right of z; k is the last knot with x[k] + shift <= z
    if k < 0:
        return 0.0
    xk = x[k] + shift
    if k == x.shape[0] - 1 or xk == z:
        return rgt[k]
    x1 = x[k + 1] + shift
    return rgt[k] + (lft[k + 1] - rgt[k]) * (z - xk) / (x1 - xk)


@numba.njit(cache=True, nogil=True)
def _emd_knots(xp, lp, rp, shift, xq, lq, rq):
    """EMD between the CDF with knots (xp, lp, rp) moved by ``shift`` and the CDF (xq, lq, rq)."""
    n_p = xp.shape[0]
    n_q = xq.shape[0]
    total = 0.0
    i = 0
    j = 0
    prev = 0.0
    diff_prev = 0.0
    first = True
    while i < n_p or j < n_q:
        if j >= n_q or (i < n_p and xp[i] + shift <= xq[j]):
            z = xp[i] + shift
        else:
            z = xq[j]
        if not first and z > prev:
            d = _value_before(xp, lp, rp, shift, i, z) - _value_before(xq, lq, rq, 0.0, j, z)
            total += _segment(diff_prev, d, z - prev)
        while i < n_p and xp[i] + shift <= z:
            i += 1
        while j < n_q and xq[j] <= z:
            j += 1
        diff_prev = _value_after(xp, lp, rp, shift, i - 1, z) - _value_after(xq, lq, rq, 0.0, j - 1, z)
        prev = z
        first = False
    return total


@numba.njit(cache=True, nogil=True)
def _brent_shift(xp, lp, rp, xq, lq, rq, lo, hi, xtol, maxiter):
    """Bounded Brent-Dekker minimisation of the shift objective on [lo, hi].

    Returns ``(best_shift, best_value, evaluations)``.
    """
    if hi - lo <= 0.0:
        return lo, _emd_knots(xp, lp, rp, lo, xq, lq, rq), 1
    sqrt_eps = math.sqrt(2.2e-16)
    golden = 0.5 * (3.0 - math.sqrt(5.0))
    a = lo
    b = hi
    v = a + golden * (b - a)
    w = v
    x = v
    fx = _emd_knots(xp, lp, rp, x, xq, lq, rq)
    fv = fx
    fw = fx
    d = 0.0
    e = 0.0
    n_eval = 1
    xm = 0.5 * (a + b)
    tol1 = sqrt_eps * abs(x) + xtol / 3.0
    tol2 = 2.0 * tol1
    while abs(x - xm) > tol2 - 0.5 * (b - a):
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r = e
            e = d
            if abs(p) < abs(0.5 * q * r) and p > q * (a - x) and p < q * (b - x):
                d = p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if xm >= x else -tol1
                use_golden = False
        if use_golden:
            e = (a - x) if x >= xm else (b - x)
            d = golden * e
        step = max(abs(d), tol1)
        u = x + step if d >= 0.0 else x - step
        fu = _emd_knots(xp, lp, rp, u, xq, lq, rq)
        n_eval += 1
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v = w
            fv = fw
            w = x
            fw = fx
            x = u
            fx = fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v = w
                fv = fw
                w = u
                fw = fu
            elif fu <= fv or v == x or v == w:
                v = u
                fv = fu
        xm = 0.5 * (a + b)
        tol1 = sqrt_eps * abs(x) + xtol / 3.0
        tol2 = 2.0 * tol1
        if n_eval >= maxiter:
            break
    return x, fx, n_eval


@numba.njit(cache=True, nogil=True)
def _emd_star_knots(xp, lp, rp, xq, lq, rq, xtol, maxiter):
    # inputs already rescaled and centred; shift 0 aligns the means
    lo = xq[0] - xp[xp.shape[0] - 1]
    hi = xq[xq.shape[0] - 1] - xp[0]
    c, val, _ = _brent_shift(xp, lp, rp, xq, lq, rq, lo, hi, xtol, maxiter)
    at_means = _emd_knots(xp, lp, rp, 0.0, xq, lq, rq)
    if at_means < val:
        return 0.0, at_means
    return c, val


def emd(p: EmpiricalDistribution, q: EmpiricalDistribution) -> float:
    """Exact ``int |F_p - F_q| dx``."""
    return float(_emd_knots(*p.knots(), 0.0, *q.knots()))


def emd_star(p: EmpiricalDistribution, q: EmpiricalDistribution, *, xtol: float = BRENT_XTOL,
             maxiter: int = BRENT_MAXITER, return_shift: bool = False):
    """EMD between unit-variance rescalings of ``p`` and ``q``, minimised over translation.

    Zero-variance inputs are left unscaled, so two point masses are at distance 0.
    With ``return_shift`` also returns ``c`` such that ``p_hat + c`` best matches
    ``q_hat`` (both in their rescaled, uncentred coordinates).
    """
    # evaluate in a canonical order so the result is exactly symmetric
    swap = p._order_key > q._order_key
    a, b = (q, p) if swap else (p, q)
    c, val = _emd_star_knots(*a._aligned_knots, *b._aligned_knots, xtol, maxiter)
    c = -c if swap else c
    val = float(val)
    if val < ZERO_CUTOFF:
        val = 0.0
    if return_shift:
        ph, qh = p.rescaled(), q.rescaled()
        return val, float(c) - ph.mean + qh.mean
    return val
