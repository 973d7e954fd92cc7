"""Truncated Dirichlet series and the coefficient-level R_r = L_r * U_r split.

R_r has coefficients lambda_f(n)^r r_Q(n). L_r is a product of zeta, L(chi_D),
symmetric-power and Rankin-Selberg L-functions (some twisted by chi_D), built
from local Euler factors. U_r = R_r / L_r is recovered by convolution
inversion; its coefficients vanish on squarefree n > 1 exactly when the factor
list of L_r matches lambda_f(p)^r r_Q(p) at every prime.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from heckeqf.arith import FactorTable, kronecker_table
from heckeqf.eigenform import Eigenform
from heckeqf.qform import r_formula_table
from heckeqf.symmpower import euler_factor_series, rankin_selberg_roots, satake


# convolution and inversion lose roughly log10(max|L| * max|U|) digits to
# cancellation at high r; extended precision keeps r = 8 well inside 1e-8
DTYPE = np.longdouble


@dataclass(frozen=True)
class DirichletCoeffs:
    """Coefficients c(1..limit) of sum c(n) n^{-s}; ``c[0]`` is padding."""

    limit: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.c.shape != (self.limit + 1,):
            raise ValueError(f"expected {self.limit + 1} entries, got {self.c.shape}")
        if not np.all(np.isfinite(self.c[1:])):
            raise ValueError("coefficients must be finite")

    def __getitem__(self, n):
        return self.c[n]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "c_n"])
            for n in range(1, self.limit + 1):
                w.writerow([n, format(float(self.c[n]), ".17g")])


def _coeffs(values: np.ndarray) -> DirichletCoeffs:
    values = np.array(values, dtype=DTYPE)
    values[0] = 0
    return DirichletCoeffs(len(values) - 1, values)


def identity(X: int) -> DirichletCoeffs:
    c = np.zeros(X + 1, dtype=DTYPE)
    c[1] = 1.0
    return _coeffs(c)


def zeta_coeffs(X: int) -> DirichletCoeffs:
    return _coeffs(np.ones(X + 1))


def convolve(A: DirichletCoeffs, B: DirichletCoeffs) -> DirichletCoeffs:
    """Dirichlet convolution (A*B)(n) = sum_{d | n} A(d) B(n/d)."""
    if A.limit != B.limit:
        raise IndexError(f"limit mismatch: {A.limit} vs {B.limit}")
    X = A.limit
    out = np.zeros(X + 1, dtype=DTYPE)
    a, b = A.c, B.c
    for d in range(1, X + 1):
        if a[d] != 0.0:
            out[d::d] += a[d] * b[1 : X // d + 1]
    return _coeffs(out)


def invert(A: DirichletCoeffs) -> DirichletCoeffs:
    """Dirichlet inverse of A, solved recursively in n."""
    a1 = A.c[1] if A.limit >= 1 else 0.0
    if abs(a1) <= 1e-12:
        raise ZeroDivisionError("series with A(1) = 0 is not invertible")
    X = A.limit
    a = A.c
    out = np.zeros(X + 1, dtype=DTYPE)
    # acc[n] collects sum_{d | n, d > 1} A(d) B(n/d) as B(n/d) becomes known
    acc = np.zeros(X + 1, dtype=DTYPE)
    for m in range(1, X + 1):
        out[m] = ((1.0 if m == 1 else 0.0) - acc[m]) / a1
        if out[m] != 0.0 and 2 * m <= X:
            acc[2 * m :: m] += a[2 : X // m + 1] * out[m]
    return _coeffs(out)


def twist(A: DirichletCoeffs, chi: np.ndarray) -> DirichletCoeffs:
    return _coeffs(A.c * chi[: A.limit + 1])


def from_local_factors(
    factor: Callable[[int, int], float], X: int, table: FactorTable
) -> DirichletCoeffs:
    """Multiplicative series with c(p^j) = factor(p, j)."""
    if table.limit < X:
        raise IndexError("factor table too small")
    spf = table.spf
    # split each n >= 2 as p^e * rest with p = spf(n), gcd(rest, p) = 1
    prime = np.zeros(X + 1, dtype=np.int64)
    expo = np.zeros(X + 1, dtype=np.int64)
    rest = np.ones(X + 1, dtype=np.int64)
    for n in range(2, X + 1):
        p = int(spf[n])
        m = n // p
        prime[n] = p
        if m % p == 0:
            expo[n] = expo[m] + 1
            rest[n] = rest[m]
        else:
            expo[n] = 1
            rest[n] = m
    local: dict[tuple[int, int], float] = {}
    for n in range(2, X + 1):
        key = (int(prime[n]), int(expo[n]))
        if key not in local:
            local[key] = float(factor(*key))

    out = np.zeros(X + 1, dtype=DTYPE)
    out[1] = 1
    # rest[n] < n, so ascending order sees every dependency
    for n in range(2, X + 1):
        out[n] = local[(int(prime[n]), int(expo[n]))] * out[rest[n]]
    return _coeffs(out)


# --- the factor ledgers of L_r ---


@dataclass(frozen=True)
class Factor:
    """L(s, sym^M f x sym^N f), optionally twisted by chi_D, to a power.

    (0, 0) is zeta (or L(chi_D) when twisted), (m, 0) is L(sym^m f).
    """

    M: int
    N: int = 0
    twisted: bool = False
    exponent: int = 1

    @property
    def kind(self) -> str:
        if self.M == 0:
            return "dirichlet-char" if self.twisted else "zeta"
        if self.N == 0:
            return "sym-power"
        return "rankin-selberg"

    @property
    def degree(self) -> int:
        return (self.M + 1) * (self.N + 1)


@dataclass(frozen=True)
class DecompositionSpec:
    r: int
    factors: tuple[Factor, ...]

    @property
    def degree(self) -> int:
        return sum(fac.exponent * fac.degree for fac in self.factors)

    def to_json(self) -> str:
        payload = {
            "r": self.r,
            "degree": self.degree,
            "factors": [dict(asdict(fac), kind=fac.kind) for fac in self.factors],
        }
        return json.dumps(payload, indent=2)


def _pair(M: int, N: int = 0, exponent: int = 1) -> tuple[Factor, Factor]:
    return Factor(M, N, False, exponent), Factor(M, N, True, exponent)


# each entry: (M, N, exponent); every factor appears untwisted and twisted
_LEDGER_ROWS = {
    1: [(1, 0, 1)],
    2: [(0, 0, 1), (2, 0, 1)],
    3: [(1, 0, 2), (3, 0, 1)],
    4: [(0, 0, 2), (2, 0, 3), (4, 0, 1)],
    5: [(1, 0, 5), (3, 0, 3), (4, 1, 1)],
    6: [(0, 0, 5), (2, 0, 8), (4, 0, 4), (4, 2, 1)],
    7: [(1, 0, 13), (3, 0, 8), (4, 1, 5), (4, 3, 1)],
    8: [(0, 0, 13), (2, 0, 21), (4, 0, 13), (4, 2, 6), (4, 4, 1)],
}

LEDGERS: dict[int, DecompositionSpec] = {
    r: DecompositionSpec(r, tuple(fac for row in rows for fac in _pair(*row)))
    for r, rows in _LEDGER_ROWS.items()
}


def ledger(r: int) -> DecompositionSpec:
    if r not in LEDGERS:
        raise ValueError(f"r must be in 1..8, got {r}")
    return LEDGERS[r]


# --- building R_r, L_r, U_r ---


def _check_limit(f: Eigenform, X: int, table: FactorTable) -> None:
    if X > f.limit:
        raise IndexError(f"X = {X} exceeds eigenform limit {f.limit}")
    if X > table.limit:
        raise IndexError(f"X = {X} exceeds factor table limit {table.limit}")


def build_R(r: int, f: Eigenform, D: int, X: int, table: FactorTable) -> DirichletCoeffs:
    """Coefficients lambda_f(n)^r * r(n; D)."""
    _check_limit(f, X, table)
    rq = r_formula_table(D, X, table).astype(DTYPE)
    lam = np.asarray(f.lam[: X + 1], dtype=DTYPE)
    out = np.zeros(X + 1, dtype=DTYPE)
    out[1:] = lam[1:] ** r * rq[1:]
    return _coeffs(out)


def _prime_angles(f: Eigenform, X: int, table: FactorTable) -> dict[int, float]:
    return {int(p): satake(float(f.lam[p]), int(p)).theta for p in table.primes() if p <= X}


def factor_series(
    fac: Factor, f: Eigenform, X: int, table: FactorTable, chi: np.ndarray | None = None,
    angles: dict[int, float] | None = None,
) -> DirichletCoeffs:
    """One ledger factor, exponent included, as a Dirichlet series."""
    if angles is None:
        angles = _prime_angles(f, X, table)
    cache: dict[int, np.ndarray] = {}

    def local(p: int, j: int) -> float:
        series = cache.get(p)
        if series is None:
            jmax = int(math.log(X) / math.log(p)) + 1
            roots = np.tile(rankin_selberg_roots(fac.M, fac.N, angles[p]), fac.exponent)
            series = cache[p] = euler_factor_series(roots, jmax).real
        return series[j]

    base = from_local_factors(local, X, table)
    if fac.twisted:
        if chi is None:
            raise ValueError("twisted factor needs chi")
        base = twist(base, chi)
    return base


def build_L(spec: DecompositionSpec, f: Eigenform, D: int, X: int, table: FactorTable) -> DirichletCoeffs:
    _check_limit(f, X, table)
    chi = kronecker_table(D, X, table).astype(DTYPE)
    angles = _prime_angles(f, X, table)
    out = identity(X)
    for fac in spec.factors:
        out = convolve(out, factor_series(fac, f, X, table, chi, angles))
    return out


def compute_U(r: int, f: Eigenform, D: int, X: int, table: FactorTable) -> DirichletCoeffs:
    R = build_R(r, f, D, X, table)
    L = build_L(ledger(r), f, D, X, table)
    return convolve(R, invert(L))


@dataclass
class DecompositionReport:
    r: int
    D: int
    limit: int
    u1: float
    w_D: int
    max_squarefree_u: float
    worst_squarefree_n: int
    max_reconstruction_error: float
    worst_reconstruction_n: int
    degree: int
    R: DirichletCoeffs = field(repr=False)
    L: DirichletCoeffs = field(repr=False)
    U: DirichletCoeffs = field(repr=False)
    reconstruction: DirichletCoeffs = field(repr=False)

    TOL = 1e-8

    @property
    def unit_ok(self) -> bool:
        return abs(self.u1 - self.w_D) <= self.TOL

    @property
    def squarefree_ok(self) -> bool:
        return self.max_squarefree_u < self.TOL

    @property
    def reconstruction_ok(self) -> bool:
        return self.max_reconstruction_error <= self.TOL

    @property
    def passed(self) -> bool:
        return self.unit_ok and self.squarefree_ok and self.reconstruction_ok


def squarefree_mask(X: int) -> np.ndarray:
    mask = np.ones(X + 1, dtype=bool)
    mask[0] = False
    for d in range(2, math.isqrt(X) + 1):
        mask[d * d :: d * d] = False
    return mask


def reconstruction_error(R: DirichletCoeffs, recon: DirichletCoeffs) -> np.ndarray:
    """Per-n error: relative where |R(n)| > 1e-2, absolute otherwise.

    Below the switch point the absolute error is divided by 100 so the two
    regimes share the 1e-8 threshold with the absolute 1e-10 floor.
    """
    diff = np.abs(recon.c - R.c)
    scale = np.abs(R.c)
    err = np.where(scale > 1e-2, diff / np.where(scale > 1e-2, scale, 1.0), diff * 100.0)
    err[0] = 0.0
    return err


def verify_decomposition(r: int, f: Eigenform, D: int, X: int, table: FactorTable) -> DecompositionReport:
    from heckeqf.qform import units_count

    spec = ledger(r)
    R = build_R(r, f, D, X, table)
    L = build_L(spec, f, D, X, table)
    U = convolve(R, invert(L))
    recon = convolve(L, U)
    sq = squarefree_mask(X)
    sq[1] = False
    usq = np.where(sq, np.abs(U.c), 0.0)
    err = reconstruction_error(R, recon)
    return DecompositionReport(
        r=r, D=D, limit=X, u1=float(U.c[1]), w_D=units_count(D),
        max_squarefree_u=float(usq.max()), worst_squarefree_n=int(usq.argmax()),
        max_reconstruction_error=float(err.max()), worst_reconstruction_n=int(err.argmax()),
        degree=spec.degree, R=R, L=L, U=U, reconstruction=recon,
    )
