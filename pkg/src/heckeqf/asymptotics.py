"""Partial sums of lambda_f(Q(x))^r, main-term fits and sign changes.

Two independent routes to S_r(x): summing over lattice points of the
ellipse Q <= x, or over integers n <= x weighted by the divisor-sum
representation count. The origin is excluded from both.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from heckeqf.arith import FactorTable
from heckeqf.eigenform import Eigenform
from heckeqf.qform import QuadForm, lattice_rows, r_formula_table

BLOCK = 4096  # fixed reduction topology, independent of the worker count


def _lam(f) -> np.ndarray:
    return f.lam if isinstance(f, Eigenform) else np.asarray(f, dtype=np.float64)


def _limit(f) -> int:
    return len(_lam(f)) - 1


# --- partial sums ---


def partial_sum_lattice(f, Q: QuadForm, r: int, x: int) -> float:
    """Sum of lambda(Q(v))^r over lattice points v with 1 <= Q(v) <= x."""
    lam = _lam(f)
    if x > _limit(f):
        raise IndexError(f"x = {x} exceeds coefficient limit {_limit(f)}")
    if x < 1:
        return 0.0
    total = 0.0
    for _, vals in lattice_rows(Q, x):
        vals = vals[vals > 0]
        total += float(np.sum(lam[vals] ** r))
    return total


def _table_for(X: int, table: FactorTable | None) -> FactorTable:
    return table if table is not None and table.limit >= X else FactorTable.build(max(X, 1))


def partial_sum_arith(f, D: int, r: int, x: int, table: FactorTable | None = None) -> float:
    """Sum over n <= x of lambda(n)^r * r(n; D)."""
    lam = _lam(f)
    if x > _limit(f):
        raise IndexError(f"x = {x} exceeds coefficient limit {_limit(f)}")
    if x < 1:
        r_formula_table(D, 1, _table_for(1, table))  # domain check only
        return 0.0
    rq = r_formula_table(D, x, _table_for(x, table))
    return float(np.sum(lam[1 : x + 1] ** r * rq[1:]))


def checkpoint_grid(X: int, start: int = 1000, ratio: float = 1.5) -> list[int]:
    """Geometric checkpoints ceil(start * ratio^i) up to X, plus X itself."""
    if start < 1 or ratio <= 1:
        raise ValueError("need start >= 1 and ratio > 1")
    grid = []
    i = 0
    while True:
        x = math.ceil(start * ratio**i)
        if x > X:
            break
        if not grid or x > grid[-1]:
            grid.append(x)
        i += 1
    if not grid or grid[-1] != X:
        grid.append(X)
    return grid


@dataclass
class PartialSumSeries:
    r: int
    checkpoints: list[tuple[int, float]]

    @property
    def x(self) -> np.ndarray:
        return np.array([c[0] for c in self.checkpoints], dtype=np.float64)

    @property
    def S(self) -> np.ndarray:
        return np.array([c[1] for c in self.checkpoints], dtype=np.float64)


def _tree_sum(values: list[float]) -> float:
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0] if values else 0.0


def partial_sum_series(
    f, D: int, r: int, grid: list[int], table: FactorTable | None = None, workers: int = 1
) -> PartialSumSeries:
    """S_r at each checkpoint by the arithmetic route.

    Terms are summed in fixed blocks of ``BLOCK`` integers and block totals are
    combined by a pairwise tree, so the result is bit-identical at any
    worker count.
    """
    X = max(grid)
    lam = _lam(f)
    if X > _limit(f):
        raise IndexError(f"checkpoint {X} exceeds coefficient limit {_limit(f)}")
    rq = r_formula_table(D, X, _table_for(X, table))
    terms = np.zeros(X + 1)
    terms[1:] = lam[1 : X + 1] ** r * rq[1:]

    starts = list(range(0, X + 1, BLOCK))

    def block_sum(start: int) -> float:
        return float(np.sum(terms[start : start + BLOCK]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(block_sum, starts))
    else:
        sums = [block_sum(s) for s in starts]

    out = []
    for x in grid:
        b = (x + 1) // BLOCK  # blocks entirely inside 0..x
        head = _tree_sum(sums[:b])
        tail = float(np.sum(terms[b * BLOCK : x + 1]))
        out.append((x, head + tail))
    return PartialSumSeries(r, out)


# --- main term and remainder ---


@dataclass(frozen=True)
class TheoremTargets:
    gamma: dict[int, Fraction]
    main_term_degree: dict[int, int | None]


THEOREM_TARGETS = TheoremTargets(
    gamma={
        1: Fraction(7, 10), 2: Fraction(8, 11), 3: Fraction(17, 20), 4: Fraction(43, 46),
        5: Fraction(83, 86), 6: Fraction(184, 187), 7: Fraction(355, 358), 8: Fraction(752, 755),
    },
    main_term_degree={1: None, 2: 0, 3: None, 4: 1, 5: None, 6: 4, 7: None, 8: 13},
)


@dataclass
class MainTermFit:
    degree: int
    coefficients: list[float]  # ascending powers of log x
    max_rel_residual: float

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x * np.polynomial.polynomial.polyval(np.log(x), self.coefficients)


def _degree(series: PartialSumSeries, targets: TheoremTargets) -> int:
    d = targets.main_term_degree.get(series.r)
    if d is None:
        raise ValueError(f"r = {series.r} has no main term (P_r = 0 for odd r)")
    return d


def fit_main_term(series: PartialSumSeries, targets: TheoremTargets = THEOREM_TARGETS) -> MainTermFit:
    """Least squares of S(x)/x against a polynomial in log x."""
    d = _degree(series, targets)
    x, S = series.x, series.S
    if len(x) < d + 1:
        raise ValueError(f"need at least {d + 1} checkpoints")
    # fit on a scaled domain, then map back to plain powers of log x
    poly = np.polynomial.Polynomial.fit(np.log(x), S / x, d).convert()
    coeffs = np.zeros(d + 1)
    coeffs[: len(poly.coef)] = poly.coef
    fit = MainTermFit(d, [float(c) for c in coeffs], 0.0)
    resid = np.abs(S - fit(x)) / np.maximum(np.abs(S), 1e-300)
    fit.max_rel_residual = float(resid.max())
    return fit


@dataclass
class RemainderEstimate:
    slope: float
    stderr: float
    power: float | None = None  # power picked by the joint fit, even r only
    gamma: float | None = None


def _joint_fit(x: np.ndarray, S: np.ndarray, d: int) -> tuple[np.ndarray, float]:
    """Fit S/x = P_d(log x) + A x^(g-1), scanning g; returns (P coeffs, g)."""
    logx = np.log(x)
    base = np.vander(logx, d + 1, increasing=True)
    y = S / x
    best = None
    for g in np.linspace(0.05, 0.95, 181):
        design = np.column_stack([base, x ** (g - 1)])
        scale = np.abs(design).max(axis=0)
        sol, *_ = np.linalg.lstsq(design / scale, y, rcond=None)
        sol = sol / scale
        rss = float(np.sum((design @ sol - y) ** 2))
        if best is None or rss < best[0]:
            best = (rss, sol[: d + 1], float(g))
    return best[1], best[2]


def remainder_exponent(series: PartialSumSeries, targets: TheoremTargets = THEOREM_TARGETS) -> RemainderEstimate:
    """Log-log slope of |S(x) - x P(log x)| over the checkpoints.

    Odd r regress log|S| directly. For even r a plain polynomial fit that
    leaves nothing behind returns the -inf sentinel; otherwise the main term is
    refitted jointly with one power x^g so that the remainder is not swamped by
    the fitting error of P, and the slope of what remains is reported.
    """
    x, S = series.x, series.S
    gamma = targets.gamma.get(series.r)
    gamma = float(gamma) if gamma is not None else None
    d = targets.main_term_degree.get(series.r)
    power = None
    if d is None:
        resid = S
    else:
        plain = fit_main_term(series, targets)
        if np.all(np.abs(S - plain(x)) <= 1e-9 * np.maximum(np.abs(S), 1.0)):
            return RemainderEstimate(-math.inf, 0.0, None, gamma)
        coeffs, power = _joint_fit(x, S, d)
        resid = S - x * np.polynomial.polynomial.polyval(np.log(x), coeffs)
    keep = np.abs(resid) > 0
    if np.count_nonzero(keep) < 3:
        return RemainderEstimate(-math.inf, 0.0, power, gamma)
    fit = stats.linregress(np.log(x[keep]), np.log(np.abs(resid[keep])))
    return RemainderEstimate(float(fit.slope), float(fit.stderr), power, gamma)


# --- sign changes ---


def sign_sequence(f, D: int, X: int, table: FactorTable | None = None) -> list[tuple[int, int]]:
    """(n, sign lambda(n)) for the represented n <= X, in increasing order."""
    lam = _lam(f)
    if X > _limit(f):
        raise IndexError(f"X = {X} exceeds coefficient limit {_limit(f)}")
    rq = r_formula_table(D, X, _table_for(X, table))
    ns = np.nonzero(rq[1:] > 0)[0] + 1
    signs = np.sign(lam[ns]).astype(int)
    return list(zip(ns.tolist(), signs.tolist()))


def sign_change_locations(seq: list[tuple[int, int]]) -> list[int]:
    """n at which the sign differs from the previous nonzero sign."""
    out = []
    last = 0
    for n, s in seq:
        if s == 0:
            continue
        if last and s != last:
            out.append(n)
        last = s
    return out


SIGN_EPS = 0.02


@dataclass
class SignChangeReport:
    x: int
    interval: tuple[int, int]
    count: int
    locations: list[int] = field(repr=False)
    bound: float
    threshold: float
    represented: int

    @property
    def passed(self) -> bool:
        return self.count >= self.threshold

    def to_dict(self) -> dict:
        out = asdict(self)
        out["interval"] = list(self.interval)
        out["passed"] = self.passed
        return out


def count_sign_changes(
    f, D: int, x: int, table: FactorTable | None = None, eps: float = SIGN_EPS
) -> SignChangeReport:
    """Sign changes among represented n in (x, 2x]; zeros are skipped."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if 2 * x > _limit(f):
        raise IndexError(f"2x = {2 * x} exceeds coefficient limit {_limit(f)}")
    seq = [(n, s) for n, s in sign_sequence(f, D, 2 * x, table) if n > x]
    locations = sign_change_locations(seq)
    return SignChangeReport(
        x=x, interval=(x, 2 * x), count=len(locations), locations=locations,
        bound=x ** (8 / 33), threshold=x ** (8 / 33 - eps), represented=len(seq),
    )


@dataclass
class LemmaVerdict:
    valid: bool
    exponent: float | None
    violations: list[str]


def lemma_hypothesis_check(alpha: float, beta: float, gamma: float, delta: float) -> LemmaVerdict:
    """Check the inequalities of the sign-change lemma.

    With a(n) = O(n^alpha), partial sums O(x^beta) and squared sums
    Cx + O(x^gamma), every delta with max(alpha + beta, gamma) < delta < 1
    yields at least x^(1 - delta) sign changes in (x, 2x].
    """
    violations = []
    for name, value in (("alpha > 0", alpha), ("beta > 0", beta), ("gamma > 0", gamma)):
        if not value > 0:
            violations.append(name)
    if not alpha + beta < 1:
        violations.append("alpha + beta < 1")
    if not max(alpha + beta, gamma) < delta:
        violations.append("max(alpha + beta, gamma) < delta")
    if not delta < 1:
        violations.append("delta < 1")
    valid = not violations
    return LemmaVerdict(valid, 1 - delta if valid else None, violations)
