"""Closed-form-integrable densities on (0, 1) and their reflective extension to R.

Every weight and test function used by the constructions is assembled from the
leaves below.  Integration is exact (antiderivative differences) wherever a
leaf admits one, and certified shell-wise quadrature otherwise; quadrature is
never attempted across the singular point 0.

Conventions:

* all densities except :class:`PeriodicReflect` are supported in [0, 1);
* ``primitive(t)`` is the mass of [0, t), vectorized over numpy arrays;
* ``spine_averages(n_max)`` returns the averages over I_k = [0, 2^-k) and over
  the shells J_n = [2^-n, 2^-(n-1)) as extended-precision arrays, which is the
  workhorse for all deep spine computations;
* pointwise evaluation at exactly 0 returns the convention value 1 (it is
  irrelevant to every integral and exists for plotting only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .dyadic import DyadicInterval

LN2 = math.log(2.0)

#: Number of shells kept when folding a geometric suffix sum; 2^-64 is far
#: below extended-precision resolution.
_SUFFIX_TAPS = 70

_LD = np.longdouble


class NonIntegrableError(ValueError):
    """The requested integral diverges (e.g. x^gamma with gamma <= -1 down to 0)."""


def _as_longdouble(x):
    return np.asarray(x, dtype=_LD)


class Density:
    """Immutable expression tree; every operation is pure."""

    def value(self, x):
        raise NotImplementedError

    def primitive(self, t):
        """Mass of [0, t) for t in [0, 1], vectorized."""
        raise NotImplementedError

    def integrate(self, a: float, b: float) -> float:
        """Exact or certified integral over [a, b), 0 <= a < b <= 1."""
        if not 0.0 <= a < b <= 1.0 + 1e-15:
            raise ValueError(f"bad interval [{a}, {b}) for a [0,1)-supported density")
        return float(self.primitive(min(b, 1.0)) - self.primitive(a))

    def spine_averages(self, n_max: int):
        """Averages (I_avg[0..n_max], J_avg[0..n_max]); J_avg[0] is nan.

        Generic fallback goes through ``primitive`` and is limited to depths
        where 2^-k is representable; leaves override with stable closed forms.
        """
        if n_max > 1000:
            raise NonIntegrableError(
                f"{type(self).__name__}: generic spine averages limited to depth 1000"
            )
        k = np.arange(n_max + 1)
        masses = _as_longdouble([self.primitive(0.5 ** int(j)) for j in k])
        two_k = np.exp2(_as_longdouble(k))
        i_avg = masses * two_k
        j_avg = np.empty(n_max + 1, dtype=_LD)
        j_avg[0] = np.nan
        j_avg[1:] = 2.0 * i_avg[:-1] - i_avg[1:]
        return i_avg, j_avg

    def log_shell_masses(self, n_max: int):
        """log of the shell masses |J_n|*<g>_{J_n}, n = 0..n_max (entry 0 is nan)."""
        _, j_avg = self.spine_averages(n_max)
        with np.errstate(divide="ignore"):
            out = np.log(j_avg).astype(np.float64)
        out -= np.arange(n_max + 1) * LN2
        return out

    def spine_mass(self, k: int) -> float:
        """Mass of I_k = [0, 2^-k); overridden where 2^-k would underflow."""
        if k > 1070:
            raise NonIntegrableError(
                f"{type(self).__name__}: spine mass not available at depth {k}"
            )
        return float(self.primitive(0.5 ** k))


# ---------------------------------------------------------------------------
# leaves


@dataclass(frozen=True)
class Constant(Density):
    c: float = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x < 1), self.c, 0.0)

    def primitive(self, t):
        return self.c * np.asarray(t, dtype=float)

    def spine_averages(self, n_max: int):
        i_avg = np.full(n_max + 1, _LD(self.c))
        j_avg = np.full(n_max + 1, _LD(self.c))
        j_avg[0] = np.nan
        return i_avg, j_avg

    def spine_mass(self, k: int) -> float:
        return self.c * 0.5 ** k if k <= 1070 else 0.0


@dataclass(frozen=True)
class Power(Density):
    """c * x^gamma on (0, 1); integrable near 0 iff gamma > -1."""

    c: float
    gamma: float

    def __post_init__(self):
        if self.gamma <= -1.0:
            raise NonIntegrableError(f"x^{self.gamma} is not integrable near 0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(inside, self.c * np.power(np.where(inside, x, 1.0), self.gamma), 0.0)
        return np.where(x == 0, 1.0, v)

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        g1 = self.gamma + 1.0
        return self.c * np.power(t, g1) / g1

    def spine_averages(self, n_max: int):
        k = _as_longdouble(np.arange(n_max + 1))
        g = _LD(self.gamma)
        scale = np.exp2(-g * k)  # 2^(-gamma*k)
        i_avg = _LD(self.c) / (g + 1) * scale
        j_avg = _LD(self.c) * (np.exp2(g + 1) - 1) / (g + 1) * scale
        j_avg[0] = np.nan
        return i_avg, j_avg

    def log_shell_masses(self, n_max: int):
        n = np.arange(n_max + 1, dtype=float)
        g1 = self.gamma + 1.0
        out = math.log(self.c * (2.0 ** g1 - 1.0) / g1) - n * g1 * LN2
        out[0] = np.nan
        return out

    def spine_mass(self, k: int) -> float:
        g1 = self.gamma + 1.0
        return self.c / g1 * 2.0 ** (-k * g1) if k * g1 < 1070 else 0.0


def _u(x):
    """1 - log2(x), the slowly varying factor of the log-power leaves."""
    return 1.0 - np.log2(x)


@dataclass(frozen=True)
class LogPowerOverX(Density):
    """c / (x * (1 - log2 x)^s) on (0, 1).

    Antiderivative of the mass from 0: (c*ln2/(s-1)) * (1 - log2 t)^(1-s),
    finite at 0 exactly when s > 1.
    """

    c: float
    s: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xs = np.where(inside, x, 0.5)
        v = np.where(inside, self.c / (xs * _u(xs) ** self.s), 0.0)
        return np.where(x == 0, 1.0, v)

    def primitive(self, t):
        if self.s <= 1.0:
            raise NonIntegrableError(f"1/(x (1-log2 x)^{self.s}) is not integrable near 0")
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out = np.where(pos, self.c * LN2 / (self.s - 1.0) * np.where(pos, _u(np.where(pos, t, 0.5)), 1.0) ** (1.0 - self.s), 0.0)
        return out

    def integrate(self, a: float, b: float) -> float:
        # valid for every s as long as a > 0
        if a == 0.0:
            return float(self.primitive(b))
        alpha = 1.0 - self.s
        if alpha == 0.0:
            return self.c * LN2 * math.log(_u(a) / _u(b))
        f = lambda t: -self.c * LN2 / alpha * _u(t) ** alpha
        return f(min(b, 1.0)) - f(a)

    def spine_averages(self, n_max: int):
        k = np.arange(n_max + 1)
        masses = _as_longdouble(self.c * LN2 / (self.s - 1.0) * (1.0 + k) ** (1.0 - self.s))
        i_avg = masses * np.exp2(_as_longdouble(k))
        j_avg = np.empty(n_max + 1, dtype=_LD)
        j_avg[0] = np.nan
        j_avg[1:] = 2.0 * i_avg[:-1] - i_avg[1:]
        return i_avg, j_avg

    def log_shell_masses(self, n_max: int):
        n = np.arange(n_max + 1, dtype=float)
        alpha = 1.0 - self.s
        with np.errstate(divide="ignore"):
            if alpha == 0.0:
                masses = self.c * LN2 * np.log((1.0 + n) / n)
            else:
                # u = 1 - log2 x equals n at the right end of J_n, n+1 at the left
                masses = -self.c * LN2 / alpha * (n ** alpha - (1.0 + n) ** alpha)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(masses)
        out[0] = np.nan
        return out

    def spine_mass(self, k: int) -> float:
        if self.s <= 1.0:
            raise NonIntegrableError("divergent spine mass")
        return self.c * LN2 / (self.s - 1.0) * (1.0 + k) ** (1.0 - self.s)


# 16-point Gauss-Legendre nodes/weights on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = (_GL_X + 1.0) / 2.0
_GL_W = _GL_W / 2.0


@dataclass(frozen=True)
class LogPowerPlain(Density):
    """(1 - log2 x)^(-s) on (0, 1); no elementary antiderivative.

    Shell masses are computed by fixed-order Gauss-Legendre on the substituted
    integrand ln2 * 2^(1-tau) (n + tau)^(-s), tau in [0, 1], which is smooth;
    partial shells use adaptive quadrature.
    """

    s: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xs = np.where(inside, x, 0.5)
        v = np.where(inside, _u(xs) ** (-self.s), 0.0)
        return np.where(x == 0, 1.0, v)

    def shell_avgs_vec(self, n_lo: int, n_hi: int):
        """Averages over J_n for n in [n_lo, n_hi], vectorized (chunked).

        <g>_{J_n} = ln2 * int_0^1 2^(1-tau) (n + tau)^(-s) dtau, a smooth
        integrand handled to machine precision by fixed-order Gauss-Legendre.
        """
        kernel = LN2 * np.exp2(1.0 - _GL_X) * _GL_W
        out = np.empty(n_hi - n_lo + 1)
        step = 1 << 17
        for start in range(n_lo, n_hi + 1, step):
            stop = min(start + step - 1, n_hi)
            n = np.arange(start, stop + 1, dtype=float)[:, None]
            out[start - n_lo : stop - n_lo + 1] = ((n + _GL_X) ** (-self.s)) @ kernel
        return out

    def shell_masses_vec(self, n_lo: int, n_hi: int):
        """Masses of J_n = 2^-n * <g>_{J_n}; underflows to 0 for n > 1074."""
        n = np.arange(n_lo, n_hi + 1, dtype=float)
        return self.shell_avgs_vec(n_lo, n_hi) * np.exp2(-n)

    def primitive(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            out[i] = self._primitive_scalar(float(ti))
        return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out

    def _primitive_scalar(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        t = min(t, 1.0)
        n = max(1, math.ceil(-math.log2(t)) if t < 1.0 else 1)
        # whole shells J_m, m > n, then the partial piece [2^-n, t)
        total = self._suffix_mass(n)
        lo = 0.5 ** n
        if t > lo:
            total += quad(lambda x: _u(x) ** (-self.s), lo, t, epsabs=0.0, epsrel=1e-12)[0]
        return total

    def _suffix_mass(self, n: int) -> float:
        # sum of shell masses below 2^-n; terms decay faster than 2^-m
        masses = self.shell_masses_vec(n + 1, n + _SUFFIX_TAPS)
        return float(masses.sum())

    def integrate(self, a: float, b: float) -> float:
        if not 0.0 <= a < b <= 1.0 + 1e-15:
            raise ValueError(f"bad interval [{a}, {b})")
        if a == 0.0:
            return self._primitive_scalar(b)
        return quad(lambda x: _u(x) ** (-self.s), a, min(b, 1.0),
                    epsabs=0.0, epsrel=1e-12, limit=200)[0]

    def spine_averages(self, n_max: int):
        avgs = self.shell_avgs_vec(1, n_max + _SUFFIX_TAPS)
        j_avg = np.empty(n_max + 1, dtype=_LD)
        j_avg[0] = np.nan
        j_avg[1:] = avgs[:n_max]
        # <g>_{I_k} = sum_{m>=1} 2^-m <g>_{J_{k+m}}; fold a geometric kernel
        i_avg = np.zeros(n_max + 1, dtype=_LD)
        for m in range(1, _SUFFIX_TAPS + 1):
            i_avg += _as_longdouble(avgs[m - 1 : m + n_max]) * _LD(0.5) ** m
        return i_avg, j_avg


# ---------------------------------------------------------------------------
# combinators


@dataclass(frozen=True)
class Scale(Density):
    c: float
    inner: Density

    def value(self, x):
        return self.c * self.inner.value(x)

    def primitive(self, t):
        return self.c * self.inner.primitive(t)

    def integrate(self, a, b):
        return self.c * self.inner.integrate(a, b)

    def spine_averages(self, n_max):
        i_avg, j_avg = self.inner.spine_averages(n_max)
        return self.c * i_avg, self.c * j_avg

    def log_shell_masses(self, n_max):
        return math.log(self.c) + self.inner.log_shell_masses(n_max)

    def spine_mass(self, k):
        return self.c * self.inner.spine_mass(k)


@dataclass(frozen=True)
class Sum(Density):
    parts: tuple[Density, ...]

    def value(self, x):
        return sum(p.value(x) for p in self.parts)

    def primitive(self, t):
        return sum(p.primitive(t) for p in self.parts)

    def integrate(self, a, b):
        return sum(p.integrate(a, b) for p in self.parts)

    def spine_averages(self, n_max):
        acc_i = np.zeros(n_max + 1, dtype=_LD)
        acc_j = np.zeros(n_max + 1, dtype=_LD)
        for p in self.parts:
            i_avg, j_avg = p.spine_averages(n_max)
            acc_i += i_avg
            acc_j += j_avg
        return acc_i, acc_j

    def spine_mass(self, k):
        return sum(p.spine_mass(k) for p in self.parts)


@dataclass(frozen=True)
class SignModulate(Density):
    """Multiply by (-1)^floor(-log2 x): sign (-1)^(n-1) on the shell J_n."""

    inner: Density

    def value(self, x):
        x = np.asarray(x, dtype=float)
        pos = x > 0
        n = np.where(pos, np.floor(-np.log2(np.where(pos, x, 0.5))), 0.0)
        sign = np.where(pos, (-1.0) ** n, 1.0)
        return sign * self.inner.value(x)

    def spine_averages(self, n_max):
        inner_i, inner_j = self.inner.spine_averages(n_max + _SUFFIX_TAPS)
        n = np.arange(n_max + 1)
        j_avg = np.empty(n_max + 1, dtype=_LD)
        j_avg[0] = np.nan
        j_avg[1:] = ((-1.0) ** (n[1:] - 1)) * inner_j[1 : n_max + 1]
        # <g>_{I_k} = (-1)^k * sum_{m>=1} (-1)^(m-1) 2^-m <inner>_{J_{k+m}}
        folded = np.zeros(n_max + 1, dtype=_LD)
        for m in range(1, _SUFFIX_TAPS + 1):
            folded += ((-1.0) ** (m - 1) * _LD(0.5) ** m) * inner_j[m : m + n_max + 1]
        i_avg = ((-1.0) ** n) * folded
        return i_avg, j_avg

    def primitive(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            out[i] = self._primitive_scalar(float(ti))
        return out[0] if np.ndim(t) == 0 else out

    def _primitive_scalar(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        t = min(t, 1.0)
        if t == 1.0:
            n = 1
        else:
            n = math.floor(-math.log2(t)) + 1  # t lies in J_n = [2^-n, 2^(1-n))
        lo = 0.5 ** n
        i_avg, _ = self.spine_averages(min(n, 1000))
        total = float(i_avg[n]) * lo  # mass of [0, 2^-n)
        if t > lo:
            sign = (-1.0) ** (n - 1)
            total += sign * self.inner.integrate(lo, t)
        return total

    def integrate(self, a, b):
        return float(self._primitive_scalar(b) - self._primitive_scalar(a))


@dataclass(frozen=True)
class Restrict(Density):
    inner: Density
    lo: float
    hi: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x < self.hi), self.inner.value(x), 0.0)

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, self.lo, self.hi)
        return self.inner.primitive(tc) - self.inner.primitive(self.lo)

    def integrate(self, a, b):
        a2, b2 = max(a, self.lo), min(b, self.hi)
        if a2 >= b2:
            return 0.0
        return self.inner.integrate(a2, b2)


@dataclass(frozen=True)
class AffinePullback(Density):
    """x -> inner((x - offset)/scale), or inner((offset - x)/scale) if reflected.

    The image of the inner support (0, 1) is [offset, offset + scale) in the
    forward case and (offset - scale, offset] reflected; masses over the image
    are exactly scale times the inner masses (no Jacobian compensation).
    """

    inner: Density
    offset: float
    scale: float
    reflected: bool = False

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("degenerate pullback scale")

    @property
    def support(self) -> tuple[float, float]:
        if self.reflected:
            return self.offset - self.scale, self.offset
        return self.offset, self.offset + self.scale

    def value(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x >= lo) & (x < hi)
        if self.reflected:
            u = (self.offset - x) / self.scale
        else:
            u = (x - self.offset) / self.scale
        u = np.clip(u, 0.0, 1.0)
        return np.where(inside, self.inner.value(u), 0.0)

    def integrate(self, a, b):
        lo, hi = self.support
        a2, b2 = max(a, lo), min(b, hi)
        if a2 >= b2:
            return 0.0
        if self.reflected:
            ua, ub = (self.offset - b2) / self.scale, (self.offset - a2) / self.scale
        else:
            ua, ub = (a2 - self.offset) / self.scale, (b2 - self.offset) / self.scale
        ua, ub = max(ua, 0.0), min(ub, 1.0)
        if ua >= ub:
            return 0.0
        return self.scale * self.inner.integrate(ua, ub)

    def primitive(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([self.integrate(0.0, ti) if ti > 0 else 0.0 for ti in t_arr])
        return out[0] if np.ndim(t) == 0 else out


class PiecewiseDyadic(Density):
    """A density glued shell by shell: piece(n) is supported on J_n, n >= 1."""

    def __init__(self, piece_fn, name: str = "piecewise"):
        self._piece_fn = piece_fn
        self._name = name
        self._pieces: dict[int, Density] = {}
        self._masses: dict[int, float] = {}

    def piece(self, n: int) -> Density:
        if n not in self._pieces:
            self._pieces[n] = self._piece_fn(n)
        return self._pieces[n]

    def piece_mass(self, n: int) -> float:
        if n not in self._masses:
            p = self.piece(n)
            self._masses[n] = 0.0 if p is None else p.integrate(0.5 ** n, 0.5 ** (n - 1))
        return self._masses[n]

    def value(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x_arr)
        for i, xi in enumerate(x_arr):
            if xi == 0.0:
                out[i] = 1.0
            elif 0.0 < xi < 1.0:
                n = math.floor(-math.log2(xi)) + 1
                if xi >= 0.5 ** (n - 1):  # xi exactly a power of two boundary
                    n -= 1
                p = self.piece(n)
                out[i] = 0.0 if p is None else float(np.asarray(p.value(xi)))
        return out[0] if np.ndim(x) == 0 else out

    def suffix_mass(self, k: int) -> float:
        """Mass of I_k, by shell summation with a geometric stopping rule.

        Gluings may leave whole shells empty, so stop only after several
        consecutive negligible terms.
        """
        total = 0.0
        small_run = 0
        for n in range(k + 1, k + 4 * _SUFFIX_TAPS):
            m = self.piece_mass(n)
            total += m
            if total != 0.0 and abs(m) < 1e-18 * abs(total) and n > k + 4:
                small_run += 1
                if small_run >= 4:
                    break
            else:
                small_run = 0
        return total

    def primitive(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            out[i] = self._primitive_scalar(float(ti))
        return out[0] if np.ndim(t) == 0 else out

    def _primitive_scalar(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        t = min(t, 1.0)
        n = 1 if t == 1.0 else math.floor(-math.log2(t)) + 1
        lo = 0.5 ** n
        total = self.suffix_mass(n)
        if t > lo:
            p = self.piece(n)
            if p is not None:
                total += p.integrate(lo, t)
        return total

    def integrate(self, a, b):
        return float(self._primitive_scalar(b) - self._primitive_scalar(a))

    def spine_averages(self, n_max):
        if n_max > 900:
            raise NonIntegrableError("glued densities support spine depth <= 900")
        masses = np.array([self.piece_mass(n) for n in range(1, n_max + _SUFFIX_TAPS + 1)])
        j_avg = np.empty(n_max + 1, dtype=_LD)
        j_avg[0] = np.nan
        scale = np.exp2(np.arange(1, n_max + _SUFFIX_TAPS + 1, dtype=float))
        norm = _as_longdouble(masses) * _as_longdouble(scale)
        j_avg[1:] = norm[:n_max]
        i_avg = np.zeros(n_max + 1, dtype=_LD)
        for m in range(1, _SUFFIX_TAPS + 1):
            i_avg += norm[m - 1 : m + n_max] * _LD(0.5) ** m
        return i_avg, j_avg

    def __repr__(self):
        return f"PiecewiseDyadic({self._name})"


class PeriodicReflect(Density):
    """Reflective periodization of a [0,1)-supported density to all of R.

    Agrees with the inner density on [0, 1), is reflected on [1, 2), and has
    period 2; consequently it is symmetric about every integer.  Integer
    points take the convention value 1.
    """

    def __init__(self, inner: Density):
        self.inner = inner

    def value(self, x):
        x = np.asarray(x, dtype=float)
        m = np.floor(x)
        frac = x - m
        fwd = np.mod(m, 2) == 0
        u = np.where(fwd, frac, 1.0 - frac)
        at_int = frac == 0.0
        u = np.where(at_int, 0.5, u)  # placeholder, overwritten below
        v = self.inner.value(u)
        return np.where(at_int, 1.0, v)

    @cached_property
    def unit_mass(self) -> float:
        return float(self.inner.primitive(1.0))

    def cumulative(self, xs, x0: float):
        """Vectorized mass of [x0, x) for an integer anchor x0 <= min(xs)."""
        if x0 != math.floor(x0):
            raise ValueError("anchor must be an integer")
        xs = np.asarray(xs, dtype=float)
        m = np.floor(xs)
        frac = xs - m
        fwd = np.mod(m, 2) == 0
        f01 = self.inner.primitive(np.where(fwd, frac, 1.0 - frac))
        partial = np.where(fwd, f01, self.unit_mass - f01)
        return (m - x0) * self.unit_mass + partial

    def integrate(self, a, b):
        if a >= b:
            raise ValueError("empty interval")
        anchor = math.floor(a)
        lo, hi = self.cumulative(np.array([a, b]), anchor)
        return float(hi - lo)


# ---------------------------------------------------------------------------
# module-level operations


def integrate(g: Density, a: float, b: float) -> float:
    return g.integrate(a, b)


def average(g: Density, q: DyadicInterval) -> float:
    return g.integrate(float(q.left), float(q.right)) * 2.0 ** q.level


def shell_mass(g: Density, n: int) -> float:
    if n < 1:
        raise ValueError("shell index must be >= 1")
    return g.integrate(0.5 ** n, 0.5 ** (n - 1))


def affine_pullback(g: Density, offset: float, scale: float, reflected: bool = False) -> Density:
    return AffinePullback(g, offset, scale, reflected)


def dual_power(g: Density, p: float) -> Density:
    """The dual weight g^(-1/(p-1)); closed form for pure powers only."""
    if p <= 1.0:
        raise ValueError("dual weight requires p > 1")
    if isinstance(g, Constant):
        return Constant(g.c ** (-1.0 / (p - 1.0)))
    if isinstance(g, Power):
        return Power(g.c ** (-1.0 / (p - 1.0)), -g.gamma / (p - 1.0))
    raise TypeError(f"dual weight has no closed form for {type(g).__name__}")


def quadrature_integrate(g: Density, a: float, b: float, rel: float = 1e-11) -> float:
    """Adaptive-quadrature oracle for integrals with 0 < a; independent of the
    antiderivative path and used for cross-validation."""
    if a <= 0.0:
        raise ValueError("quadrature oracle requires a > 0 (singularity at 0)")
    val, _ = quad(lambda x: float(np.asarray(g.value(x))), a, b,
                  epsabs=0.0, epsrel=rel, limit=400)
    return val
