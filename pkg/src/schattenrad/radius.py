"""Certified one-dimensional maximization and the sup-over-angle functionals.

Every functional here has the form ``theta -> N(cos(theta) X + sin(theta) Y)``
for a norm ``N`` and fixed matrices ``X, Y``. Such a function is periodic
with period ``pi`` and is the restriction of a convex, positively
homogeneous function of ``(cos theta, sin theta)`` to the unit circle. The
optimizer uses two sound upper bounds on each sub-arc ``[a, b]`` between
evaluated points:

* Lipschitz: ``(f(a) + f(b))/2 + L (b - a)/2``.
* Convexity: any unit vector between ``u(a)`` and ``u(b)`` is a nonnegative
  combination of them, so ``f`` on the arc is bounded by the largest value of
  ``(f(a) sin(b - t) + f(b) sin(t - a)) / sin(b - a)``.

Arcs are refined best-bound-first in fixed-size batches. The refinement order
never depends on the target tolerance, only the stopping test does, so a
tighter tolerance evaluates a superset of the points of a looser one.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matrix import adjoint, as_matrix, im_part, re_part
from .spectral import as_pnorm, schatten, schatten_batch

# relative inflation of every upper bound, covering rounding in norm evaluations
_ROUNDING = 1e-12
_INITIAL_GRID = 32
_BATCH = 16


@dataclass(frozen=True)
class CertifiedValue:
    """``value <= sup f <= value + eps``; ``value`` is attained at ``arg``."""

    value: float
    arg: float
    eps: float
    evals: int = 0

    @property
    def upper(self) -> float:
        return self.value + self.eps


@dataclass(frozen=True)
class OptimizerConfig:
    eps: float = 1e-6
    max_evals: int = 200_000

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_evals < 3:
            raise ValueError(f"max_evals must be >= 3, got {self.max_evals}")


class UncertifiedError(RuntimeError):
    """The evaluation budget ran out before the error bound reached the target."""

    def __init__(self, value: float, arg: float, bound: float, evals: int):
        self.value, self.arg, self.bound, self.evals = value, arg, bound, evals
        super().__init__(f"budget of {evals} evaluations exhausted: best value {value!r} "
                         f"at {arg!r}, achieved error bound {bound!r}")


def _convex_arc_bound(fa, fb, width):
    # max over t in [0, width] of (fa sin(width - t) + fb sin t) / sin(width)
    # written without 1 - cos(width), which cancels catastrophically on short arcs
    s = np.sin(width)
    half = 2 * np.sin(width / 2) ** 2  # 1 - cos(width)
    chord = np.sqrt((fa - fb) ** 2 + 2 * fa * fb * half)
    t_star = np.arctan2(fb - fa + fa * half, fa * s)
    inside = (t_star >= 0) & (t_star <= width) & (s > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = chord / s
    return np.where(inside, interior, np.maximum(fa, fb))


def _maximize(fvec: Callable[[np.ndarray], np.ndarray], period: float, lipschitz: float,
              cfg: OptimizerConfig, convex: bool) -> CertifiedValue:
    if lipschitz < 0 or not math.isfinite(lipschitz):
        raise ValueError(f"Lipschitz bound must be finite and >= 0, got {lipschitz}")
    if lipschitz == 0:
        return CertifiedValue(float(fvec(np.zeros(1))[0]), 0.0, 0.0, 1)
    if convex and not math.isclose(period, math.pi):
        raise ValueError("the convexity bound needs period pi")

    def bound(a, b, fa, fb):
        w = b - a
        ub = (fa + fb) / 2 + lipschitz * w / 2
        if convex:
            ub = min(ub, float(_convex_arc_bound(fa, fb, w)))
        return ub * (1 + _ROUNDING)

    n0 = min(_INITIAL_GRID, max(cfg.max_evals - 1, 2))
    thetas = period * np.arange(n0) / n0
    vals = np.asarray(fvec(thetas), dtype=float)
    evals = n0
    best_i = int(np.argmax(vals))  # first maximal index = smallest angle
    best, arg = float(vals[best_i]), float(thetas[best_i])

    heap = []
    ends = np.append(thetas, period)
    fends = np.append(vals, vals[0])  # f(period) = f(0)
    for k in range(n0):
        a, b, fa, fb = float(ends[k]), float(ends[k + 1]), float(fends[k]), float(fends[k + 1])
        heapq.heappush(heap, (-bound(a, b, fa, fb), a, b, fa, fb))

    while True:
        top = -heap[0][0]
        if top <= best + cfg.eps:
            return CertifiedValue(best, arg, max(top - best, 0.0), evals)
        if evals >= cfg.max_evals:
            raise UncertifiedError(best, arg, top - best, evals)
        take = [heapq.heappop(heap) for _ in range(min(_BATCH, len(heap), cfg.max_evals - evals))]
        mids = np.array([(it[1] + it[2]) / 2 for it in take])
        fm = np.asarray(fvec(mids), dtype=float)
        evals += len(take)
        for (_, a, b, fa, fb), m, v in zip(take, mids, fm):
            m, v = float(m), float(v)
            if v > best or (v == best and m < arg):
                best, arg = v, m
            heapq.heappush(heap, (-bound(a, m, fa, v), a, m, fa, v))
            heapq.heappush(heap, (-bound(m, b, v, fb), m, b, v, fb))


def certified_sup(f: Callable[[float], float], period: float, lipschitz: float,
                  cfg: OptimizerConfig | None = None, *, vectorized: bool = False,
                  convex_circle: bool = False) -> CertifiedValue:
    """Certified supremum of an ``L``-Lipschitz, ``period``-periodic function.

    Set ``vectorized`` when ``f`` maps an array of angles to an array of
    values. ``convex_circle`` enables the sharper arc bound; it is only valid
    for ``f(t) = phi(cos t, sin t)`` with ``phi`` convex, positively homogeneous
    and even, on period ``pi``.

    Raises :class:`UncertifiedError` when ``cfg.max_evals`` runs out.
    """
    cfg = cfg or OptimizerConfig()
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    if vectorized:
        fvec = f
    else:
        def fvec(ts):
            return np.array([float(f(float(t))) for t in ts])
    return _maximize(fvec, float(period), float(lipschitz), cfg, convex_circle)


def circle_norm_sup(x, y, p, cfg: OptimizerConfig | None = None, *,
                    hermitian: bool = False, lipschitz: float | None = None) -> CertifiedValue:
    """Certified ``sup_t ||cos(t) X + sin(t) Y||_p`` over ``t`` in ``[0, pi)``."""
    p = as_pnorm(p)
    x = as_matrix(x, square=True, name="X")
    y = as_matrix(y, square=True, name="Y")
    if lipschitz is None:
        lipschitz = schatten(x, p) + schatten(y, p)

    def fvec(ts):
        ts = np.asarray(ts, dtype=float)
        stack = np.cos(ts)[:, None, None] * x + np.sin(ts)[:, None, None] * y
        return schatten_batch(stack, p, hermitian=hermitian)

    return certified_sup(fvec, math.pi, lipschitz, cfg, vectorized=True, convex_circle=True)


def omega(a, p, cfg: OptimizerConfig | None = None) -> CertifiedValue:
    """Schatten p-numerical radius ``sup_t ||Re(e^{it} A)||_p``.

    ``Re(e^{it} A) = cos(t) Re A - sin(t) Im A``; the Lipschitz bound is ``||A||_p``.
    """
    a = as_matrix(a, square=True, name="A")
    return circle_norm_sup(re_part(a), -im_part(a), p, cfg, hermitian=True,
                           lipschitz=schatten(a, p))


def omega_im(a, p, cfg: OptimizerConfig | None = None) -> CertifiedValue:
    """``sup_t ||Im(e^{it} A)||_p``, evaluated directly from ``Im(e^{it} A) = sin(t) Re A + cos(t) Im A``."""
    a = as_matrix(a, square=True, name="A")
    return circle_norm_sup(im_part(a), re_part(a), p, cfg, hermitian=True,
                           lipschitz=schatten(a, p))


def rotating_sum_sup(a, b, p, cfg: OptimizerConfig | None = None) -> CertifiedValue:
    """``sup_t ||e^{it} A + e^{-it} B*||_p`` with Lipschitz bound ``||A||_p + ||B||_p``."""
    a = as_matrix(a, square=True, name="A")
    b = as_matrix(b, square=True, name="B")
    if a.shape != b.shape:
        raise ValueError(f"A and B differ in size: {a.shape} vs {b.shape}")
    bs = adjoint(b)
    # e^{it} A + e^{-it} B* = cos(t) (A + B*) + sin(t) i (A - B*)
    return circle_norm_sup(a + bs, 1j * (a - bs), p, cfg,
                           lipschitz=schatten(a, p) + schatten(b, p))


def circle_sup(t, p, cfg: OptimizerConfig | None = None) -> CertifiedValue:
    """``sup ||alpha Re T + beta Im T||_p`` over ``alpha**2 + beta**2 = 1``."""
    t = as_matrix(t, square=True, name="T")
    return circle_norm_sup(re_part(t), im_part(t), p, cfg, hermitian=True)
