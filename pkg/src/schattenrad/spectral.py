"""Singular values and Schatten p-norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix import as_matrix


@dataclass(frozen=True, order=True)
class PNorm:
    """Schatten exponent ``p`` in ``[1, inf]``; ``math.inf`` is the operator norm."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise ValueError(f"Schatten exponent must satisfy p >= 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text) -> "PNorm":
        if isinstance(text, PNorm):
            return text
        if isinstance(text, str):
            t = text.strip().lower()
            if t in ("inf", "infinity", "∞"):
                return cls(math.inf)
            try:
                return cls(float(t))
            except ValueError:
                raise ValueError(f"cannot parse Schatten exponent {text!r}") from None
        return cls(float(text))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    @property
    def inv(self) -> float:
        """``1/p`` (0 for ``p = inf``)."""
        return 0.0 if self.is_inf else 1.0 / self.p

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        return str(int(self.p)) if self.p.is_integer() else repr(self.p)


INF = PNorm(math.inf)


def as_pnorm(p) -> PNorm:
    return PNorm.parse(p)


def singular_values(a) -> np.ndarray:
    """Singular values in descending order, clamped at 0."""
    m = as_matrix(a)
    s = np.linalg.svd(m, compute_uv=False)
    return np.maximum(s, 0.0)


def gauge(s, p) -> np.ndarray | float:
    """Schatten gauge of singular values along the last axis.

    Works on a single spectrum or a stack of them. Large finite ``p`` is
    evaluated as ``s_max * (sum (s/s_max)**p)**(1/p)`` so nothing overflows.
    """
    p = as_pnorm(p)
    s = np.abs(np.asarray(s, dtype=float))
    top = s.max(axis=-1) if s.shape[-1] else np.zeros(s.shape[:-1])
    if p.is_inf:
        return top
    if p.p == 1.0:
        return s.sum(axis=-1)
    safe = np.where(top > 0, top, 1.0)
    ratio = s / safe[..., None] if s.ndim > 1 else s / safe
    return np.where(top > 0, top * np.sum(ratio ** p.p, axis=-1) ** (1.0 / p.p), 0.0)


def _frobenius(x: np.ndarray, axis) -> np.ndarray:
    # scaled by the largest entry so tiny or huge matrices neither underflow nor overflow
    mag = np.abs(x)
    top = np.max(mag, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return np.squeeze(top, axis=axis) * np.sqrt(np.sum((mag / safe) ** 2, axis=axis))


def schatten(a, p) -> float:
    """``(sum sigma_k**p)**(1/p)``; the largest singular value when ``p = inf``."""
    p = as_pnorm(p)
    m = as_matrix(a)
    if p.p == 2.0:
        return float(_frobenius(m, (0, 1)))
    return float(gauge(singular_values(m), p))


def schatten_batch(stack: np.ndarray, p, *, hermitian: bool = False) -> np.ndarray:
    """Schatten norms of a stack of matrices with shape ``(k, n, n)``.

    With ``hermitian=True`` the singular values are taken as ``|eigenvalues|``.
    """
    p = as_pnorm(p)
    stack = np.asarray(stack)
    if p.p == 2.0:
        return _frobenius(stack, (-2, -1))
    if hermitian:
        s = np.abs(np.linalg.eigvalsh(stack))
    else:
        s = np.linalg.svd(stack, compute_uv=False)
    return np.asarray(gauge(s, p), dtype=float)
