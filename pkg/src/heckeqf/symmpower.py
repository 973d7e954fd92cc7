"""Satake parameters and local coefficients of symmetric-power L-functions.

At a prime p with lambda_f(p) = 2 cos(theta), the Satake pair is
(e^{i theta}, e^{-i theta}). The local Euler factor of sym^m f is
prod_{i=0}^{m} (1 - alpha^{m-i} beta^i T)^{-1}; the Rankin-Selberg product
sym^M f x sym^N f runs over all (M+1)(N+1) products of those roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

DELIGNE_TOL = 1e-9
IMAG_TOL = 1e-9


class DeligneViolation(ValueError):
    pass


@dataclass(frozen=True)
class SatakeParams:
    p: int
    theta: float

    @property
    def alpha(self) -> complex:
        return cmath.exp(1j * self.theta)

    @property
    def beta(self) -> complex:
        return cmath.exp(-1j * self.theta)


def satake(lambda_p: float, p: int = 0) -> SatakeParams:
    if abs(lambda_p) > 2 + DELIGNE_TOL:
        raise DeligneViolation(f"|lambda(p)| = {abs(lambda_p)} exceeds 2 at p = {p}")
    return SatakeParams(p, math.acos(min(1.0, max(-1.0, lambda_p / 2))))


def chebyshev_U(r: int, x: float) -> float:
    """Chebyshev polynomial of the second kind by its three-term recurrence."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    prev, cur = 1.0, 2.0 * x
    if r == 0:
        return prev
    for _ in range(r - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def sym_roots(m: int, theta: float) -> np.ndarray:
    """The m+1 local roots alpha^{m-i} beta^i = e^{i (m - 2i) theta}."""
    k = m - 2 * np.arange(m + 1)
    return np.exp(1j * k * theta)


def rankin_selberg_roots(M: int, N: int, theta: float) -> np.ndarray:
    return np.outer(sym_roots(M, theta), sym_roots(N, theta)).ravel()


def euler_factor_series(roots: Iterable[complex], jmax: int) -> np.ndarray:
    """Coefficients of T^0..T^jmax in prod (1 - g T)^{-1} over the roots.

    Complex arithmetic; callers take the real part.
    """
    c = np.zeros(jmax + 1, dtype=np.complex128)
    c[0] = 1.0
    for g in roots:
        # multiply by the geometric series 1 + g T + g^2 T^2 + ...
        for j in range(1, jmax + 1):
            c[j] += g * c[j - 1]
    return c


def _real(z: complex) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise ArithmeticError(f"local coefficient has imaginary part {z.imag}")
    return float(z.real)


def lambda_sym(m: int, params: SatakeParams, j: int) -> float:
    """lambda_{sym^m f}(p^j)."""
    if m < 0 or j < 0:
        raise ValueError("m and j must be nonnegative")
    return _real(euler_factor_series(sym_roots(m, params.theta), j)[j])


def lambda_rankin_selberg(M: int, N: int, params: SatakeParams, j: int) -> float:
    """lambda_{sym^M f x sym^N f}(p^j)."""
    if not 0 <= N <= M:
        raise ValueError("need 0 <= N <= M")
    return _real(euler_factor_series(rankin_selberg_roots(M, N, params.theta), j)[j])


def prime_value_identity_check(params: SatakeParams, mmax: int = 4, tol: float = 1e-9) -> bool:
    """Series coefficient at p equals sum_j alpha^j beta^{m-j} for m <= mmax."""
    a, b = params.alpha, params.beta
    for m in range(mmax + 1):
        direct = sum(a**j * b ** (m - j) for j in range(m + 1)).real
        if abs(lambda_sym(m, params, 1) - direct) > tol:
            return False
    return True
