"""Exact q-expansions of the level-1 normalized Hecke eigenforms.

The cusp space S_k(SL2(Z)) is one-dimensional for k in {12, 16, 18, 20, 22, 26},
so its eigenform is Delta for k = 12 and Delta * E_{k-12} otherwise. Series are
multiplied exactly through Kronecker substitution: each series is packed into
one big integer, GMP does the multiplication, and the slots are read back.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import gmpy2
import numpy as np

from heckeqf.arith import FactorTable, divisor_count_table, factorize, sigma_table

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

# E_k = 1 + EISENSTEIN_CONSTANTS[k] * sum sigma_{k-1}(n) q^n, i.e. -2k/B_k
EISENSTEIN_CONSTANTS = {4: 240, 6: -504, 8: 480, 10: -264, 14: -24}


# --- exact series arithmetic ---


def _pack(coeffs: Sequence[int], slot_bits: int) -> gmpy2.mpz:
    nbytes = slot_bits // 8
    buf = b"".join(int(c).to_bytes(nbytes, "little") for c in coeffs)
    return gmpy2.mpz.from_bytes(buf, "little")


def _unpack(value: gmpy2.mpz, slot_bits: int, length: int) -> list[int]:
    nbytes = slot_bits // 8
    raw = value.to_bytes(max(length * nbytes, (value.bit_length() + 7) // 8), "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(length)]


def _split_signs(coeffs: Sequence[int]) -> tuple[list[int], list[int]]:
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return pos, neg


def power_series_multiply(A: Sequence[int], B: Sequence[int]) -> list[int]:
    """Truncated exact product of two integer series given on q^0..q^X.

    Both inputs must have the same length; the result has that length too.
    """
    if len(A) != len(B):
        raise IndexError(f"series length mismatch: {len(A)} vs {len(B)}")
    length = len(A)
    if length == 0:
        return []
    bound_a = max((abs(int(c)) for c in A), default=0)
    bound_b = max((abs(int(c)) for c in B), default=0)
    if bound_a == 0 or bound_b == 0:
        return [0] * length
    # every product coefficient is a sum of at most `length` terms
    bits = bound_a.bit_length() + bound_b.bit_length() + length.bit_length() + 1
    slot_bits = -(-bits // 8) * 8

    a_pos, a_neg = _split_signs(A)
    b_pos, b_neg = _split_signs(B)
    packed = {}
    for name, part in (("ap", a_pos), ("an", a_neg), ("bp", b_pos), ("bn", b_neg)):
        packed[name] = _pack(part, slot_bits) if any(part) else gmpy2.mpz(0)

    plus = packed["ap"] * packed["bp"] + packed["an"] * packed["bn"]
    minus = packed["ap"] * packed["bn"] + packed["an"] * packed["bp"]
    # the two sums can be added slotwise without overflow: each slot of
    # `plus` and `minus` is bounded by the same estimate as above
    p = _unpack(plus, slot_bits, length)
    m = _unpack(minus, slot_bits, length)
    return [x - y for x, y in zip(p, m)]


def _euler_product(X: int) -> list[int]:
    """prod_{n>=1} (1 - q^n) on q^0..q^X via the pentagonal number theorem."""
    coeffs = [0] * (X + 1)
    coeffs[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > X:
            break
        sign = -1 if k % 2 else 1
        coeffs[g1] += sign
        g2 = k * (3 * k + 1) // 2
        if g2 <= X:
            coeffs[g2] += sign
        k += 1
    return coeffs


def expand_delta(X: int) -> list[int]:
    """Ramanujan tau(0..X) with tau(0) = 0, from q * prod (1 - q^n)^24."""
    if X < 1:
        raise ValueError("X must be >= 1")
    # only q^0..q^{X-1} of the product are needed after the shift by q
    eta = _euler_product(X - 1)
    p2 = power_series_multiply(eta, eta)
    p4 = power_series_multiply(p2, p2)
    p8 = power_series_multiply(p4, p4)
    p16 = power_series_multiply(p8, p8)
    p24 = power_series_multiply(p16, p8)
    return [0] + p24


def eisenstein(k: int, X: int) -> list[int]:
    """Integer-normalized Eisenstein series E_k on q^0..q^X."""
    if k not in EISENSTEIN_CONSTANTS:
        raise ValueError(f"unsupported Eisenstein weight {k}; expected one of {sorted(EISENSTEIN_CONSTANTS)}")
    const = EISENSTEIN_CONSTANTS[k]
    sig = sigma_table(k - 1, X)
    return [1] + [const * s for s in sig[1:]]


# --- the eigenform record ---


@dataclass(frozen=True)
class Eigenform:
    """Normalized Hecke eigenform of level 1 truncated at ``limit``.

    ``a[n]`` holds the exact Fourier coefficient (Python int) and ``lam[n]``
    the normalized coefficient a(n) / n^((k-1)/2). Index 0 is unused
    (a[0] = 0, lam[0] = nan).
    """

    weight: int
    limit: int
    a: list[int] = field(repr=False)
    lam: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.lam.setflags(write=False)


def normalize(a: Sequence[int], k: int) -> np.ndarray:
    n = np.arange(len(a), dtype=np.float64)
    with np.errstate(divide="ignore"):
        scale = np.exp((k - 1) / 2 * np.log(n))
    lam = np.array([float(c) for c in a], dtype=np.float64) / np.where(n > 0, scale, 1.0)
    lam[0] = np.nan
    return lam


def make_eigenform(k: int, X: int, table: FactorTable | None = None) -> Eigenform:
    """Unique normalized eigenform of weight k with coefficients up to X.

    ``table`` is accepted for interface symmetry with the other builders; the
    series route does not need factorizations.
    """
    if k not in SUPPORTED_WEIGHTS:
        raise ValueError(f"unsupported weight {k}; dim S_k = 1 only for {SUPPORTED_WEIGHTS}")
    if X < 1:
        raise ValueError("X must be >= 1")
    delta = expand_delta(X)
    if k == 12:
        a = delta
    else:
        a = power_series_multiply(delta, eisenstein(k - 12, X))
    a[0] = 0
    return Eigenform(k, X, a, normalize(a, k))


# --- verification ---


def verify_hecke(f: Eigenform, m: int, n: int) -> bool:
    """Exact check of a(m)a(n) = sum_{d | (m,n)} d^(k-1) a(mn/d^2)."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be positive")
    if m * n > f.limit:
        raise IndexError(f"m*n = {m * n} exceeds coefficient limit {f.limit}")
    g = gcd(m, n)
    rhs = 0
    for d in range(1, g + 1):
        if g % d == 0:
            rhs += d ** (f.weight - 1) * f.a[m * n // (d * d)]
    return f.a[m] * f.a[n] == rhs


def verify_hecke_normalized(f: Eigenform, m: int, n: int, tol: float = 1e-9) -> bool:
    """Float check of lam(m)lam(n) = sum_{d | (m,n)} lam(mn/d^2)."""
    if m * n > f.limit:
        raise IndexError(f"m*n = {m * n} exceeds coefficient limit {f.limit}")
    g = gcd(m, n)
    rhs = sum(f.lam[m * n // (d * d)] for d in range(1, g + 1) if g % d == 0)
    return abs(f.lam[m] * f.lam[n] - rhs) <= tol * max(1.0, abs(rhs))


def verify_deligne(f: Eigenform, tol: float = 1e-9) -> int | None:
    """First n with |lam(n)| > d(n) + tol, or None."""
    d = divisor_count_table(f.limit)
    bad = np.nonzero(np.abs(f.lam[1:]) > d[1:] + tol)[0]
    return int(bad[0]) + 1 if bad.size else None


def coefficients_from_primes(f: Eigenform, table: FactorTable) -> list[int]:
    """Rebuild a(1..X) from the prime values a(p) alone.

    Prime powers follow a(p^{j+1}) = a(p) a(p^j) - p^(k-1) a(p^{j-1}) and
    composite n are assembled multiplicatively. Returns a list indexed 0..X.
    """
    X = min(f.limit, table.limit)
    k1 = f.weight - 1
    prime_powers: dict[int, list[int]] = {}
    out = [0] * (X + 1)
    out[1] = 1
    for n in range(2, X + 1):
        value = 1
        for p, e in factorize(n, table):
            seq = prime_powers.get(p)
            if seq is None:
                seq = prime_powers[p] = [1, f.a[p]]
            while len(seq) <= e:
                seq.append(f.a[p] * seq[-1] - p**k1 * seq[-2])
            value *= seq[e]
        out[n] = value
    return out


def write_csv(f: Eigenform, path, schema: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if schema:
            fh.write(f"# {schema}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "a_n", "lambda_n"])
        for n in range(1, f.limit + 1):
            w.writerow([n, str(f.a[n]), format(float(f.lam[n]), ".17g")])

