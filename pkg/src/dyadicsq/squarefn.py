"""Martingale differences and the dyadic square function.

The spine path (averages over I_k and the shells J_n) is the primary
computational route: every lower bound used by the constructions involves only
differences along the chain toward 0, and it scales to millions of shells.
The full-tree path exists for cross-validation at moderate depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import LN2, Density
from .dyadic import DyadicInterval, children

_LD = np.longdouble


class TailNotCertifiedError(RuntimeError):
    """A series tail could not be bounded by a geometric majorant."""


@dataclass(frozen=True)
class SpineProfile:
    """Spine data for a fixed density g = sigma*f.

    d_left[k]  = value of Delta_{I_k} g on I_{k+1}  (k = 0..n_max-1)
    d_right[k] = value of Delta_{I_k} g on J_{k+1}
    s[n]       = square-function lower bound on the shell J_n (n = 1..n_max),
                 using the ancestors I_0..I_{n-1} only.
    """

    n_max: int
    i_avg: np.ndarray
    j_avg: np.ndarray
    d_left: np.ndarray
    d_right: np.ndarray
    s: np.ndarray

    def cumulative_left_squares(self) -> np.ndarray:
        """prefix sums of d_left^2; entry k is sum over j < k."""
        out = np.zeros(self.n_max + 1, dtype=_LD)
        np.cumsum(self.d_left * self.d_left, out=out[1:])
        return out


@dataclass(frozen=True)
class PiecewiseLeafFunction:
    """One value per level-N leaf of the truncated square function."""

    depth: int
    values: np.ndarray

    def __post_init__(self):
        assert self.values.size == 2 ** self.depth


def martingale_difference(g: Density, q: DyadicInterval) -> tuple[float, float]:
    """(value on left child, value on right child) of Delta_Q g."""
    left, right = children(q)
    parent = g.integrate(float(q.left), float(q.right)) * 2.0 ** q.level
    lv = g.integrate(float(left.left), float(left.right)) * 2.0 ** left.level
    rv = g.integrate(float(right.left), float(right.right)) * 2.0 ** right.level
    return lv - parent, rv - parent


def spine_profile(g: Density, n_max: int) -> SpineProfile:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    i_avg, j_avg = g.spine_averages(n_max)
    d_left = i_avg[1:] - i_avg[:-1]
    d_right = j_avg[1:] - i_avg[:-1]
    cum = np.zeros(n_max + 1, dtype=_LD)
    np.cumsum(d_left * d_left, out=cum[1:])
    s = np.empty(n_max + 1, dtype=_LD)
    s[0] = np.nan
    # on J_n the ancestors I_0..I_{n-2} act through d_left, I_{n-1} through d_right
    s[1:] = np.sqrt(cum[:-1] + d_right * d_right)
    return SpineProfile(n_max, i_avg, j_avg, d_left, d_right, s)


def level_averages(g: Density, depth: int) -> list[np.ndarray]:
    """Averages of g over every dyadic interval of level 0..depth."""
    if depth > 24:
        raise ValueError("full-tree depth capped at 24")
    edges = np.arange(2 ** depth + 1, dtype=float) / 2 ** depth
    prim = np.asarray(g.primitive(edges), dtype=float)
    masses = np.diff(prim)
    out = []
    for lev in range(depth, -1, -1):
        out.append(masses * 2.0 ** lev)
        if lev > 0:
            masses = masses[0::2] + masses[1::2]
    out.reverse()
    return out


def full_square_function(g: Density, depth: int) -> PiecewiseLeafFunction:
    """Leaf values of (sum of squared Delta_Q over ancestors with level < depth)^(1/2)."""
    if depth > 20:
        raise ValueError("full-tree depth capped at 20")
    avgs = level_averages(g, depth)
    acc = np.zeros(2 ** depth)
    for lev in range(1, depth + 1):
        d = avgs[lev] - np.repeat(avgs[lev - 1], 2)
        acc += np.repeat(d * d, 2 ** (depth - lev))
    return PiecewiseLeafFunction(depth, np.sqrt(acc))


def _certify_geometric_tail(log_terms: np.ndarray, log_total: float,
                            rel_tol: float = 1e-12) -> None:
    """Require the term sequence to end in a geometric decay regime whose
    extrapolated tail is below rel_tol of the accumulated sum."""
    n = log_terms.size
    if n < 4:
        raise TailNotCertifiedError("too few terms to certify a tail")
    window = max(8, n // 8)
    diffs = np.diff(log_terms[-window:])
    rho = math.exp(float(diffs.max()))
    if not rho < 1.0:
        raise TailNotCertifiedError(f"no geometric decay at n_max (ratio {rho:.4f})")
    log_tail = float(log_terms[-1]) + math.log(rho / (1.0 - rho))
    if log_tail > math.log(rel_tol) + log_total:
        raise TailNotCertifiedError(
            f"tail bound exp({log_tail:.2f}) above {rel_tol} of the sum"
        )


def weighted_snorm(fsigma: Density, w: Density, p: float, mode: str = "spine",
                   n_max: int | None = None, depth: int | None = None,
                   tail_rel_tol: float = 1e-12) -> float:
    """Lower bound for ||S(f sigma)||_{L^p(w)}.

    Spine mode sums s_n^p * w(J_n) over shells with a certified geometric tail
    below tail_rel_tol of the sum; full mode sums leaf values at the given
    depth (cross-validation only).
    """
    if p <= 1.0:
        raise ValueError("p must be > 1")
    if mode == "full":
        if depth is None:
            raise ValueError("full mode requires a depth")
        leaf = full_square_function(fsigma, depth)
        edges = np.arange(2 ** depth + 1, dtype=float) / 2 ** depth
        w_masses = np.diff(np.asarray(w.primitive(edges), dtype=float))
        return float(np.sum(leaf.values ** p * w_masses) ** (1.0 / p))
    if mode != "spine":
        raise ValueError(f"unknown mode {mode!r}")
    if n_max is None:
        raise ValueError("spine mode requires n_max")
    prof = spine_profile(fsigma, n_max)
    s = prof.s[1:]
    if not np.any(s > 0):
        return 0.0
    logw = w.log_shell_masses(n_max)[1:]
    with np.errstate(divide="ignore"):
        log_s = np.asarray(np.log(s.astype(_LD)), dtype=np.float64)
    log_terms = p * log_s + logw
    finite = np.isfinite(log_terms)
    log_terms = log_terms[finite]
    if log_terms.size == 0:
        return 0.0
    shift = log_terms.max()
    total = float(np.sum(np.exp(log_terms - shift)))
    log_total = shift + math.log(total)
    _certify_geometric_tail(log_terms, log_total, tail_rel_tol)
    return math.exp(log_total / p)


def partial_mass_profile(prof: SpineProfile, w: Density, p: float, ks) -> np.ndarray:
    """Certified lower bounds of int_{I_k} S(f sigma)^p w dx for each k.

    On I_k the first k spine differences are constant in magnitude, so
    (sum_{j<k} d_j^2)^(p/2) * w(I_k) is a valid lower bound; it is the
    shell-sum over J_n, n > k, of that constant against the shell masses of w.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=int))
    if ks.max() > prof.n_max:
        raise ValueError("k beyond the computed spine depth")
    cum = prof.cumulative_left_squares()
    out = np.empty(ks.size)
    for i, k in enumerate(ks):
        if k == 0:
            out[i] = 0.0
            continue
        out[i] = float(cum[k] ** (p / 2.0)) * w.spine_mass(int(k))
    return out


def partial_mass(fsigma: Density, w: Density, p: float, k: int,
                 n_max: int | None = None) -> float:
    if p <= 1.0:
        raise ValueError("p must be > 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    prof = spine_profile(fsigma, n_max if n_max is not None else k)
    return float(partial_mass_profile(prof, w, p, [k])[0])
