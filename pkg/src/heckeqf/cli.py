"""Command-line frontend.

Exit codes: 0 when every configured check passes, 1 when a check fails,
2 for invalid usage (unsupported weight, bad discriminant, bad limits).

    heckeqf eigenform --weight 12 --limit 100
    heckeqf qform --disc -4 --limit 50
    heckeqf sums --weight 12 --disc -4 --r 2 --limit 100000
    heckeqf decomp --weight 12 --disc -4 --r 2 --limit 5000
    heckeqf signs --weight 12 --disc -4 --x 10000
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from heckeqf import SCHEMA_VERSION
from heckeqf.arith import FactorTable
from heckeqf.asymptotics import (
    THEOREM_TARGETS,
    checkpoint_grid,
    count_sign_changes,
    fit_main_term,
    partial_sum_lattice,
    partial_sum_series,
    remainder_exponent,
    sign_sequence,
)
from heckeqf.dirichlet import ledger, squarefree_mask, verify_decomposition
from heckeqf.eigenform import SUPPORTED_WEIGHTS, make_eigenform
from heckeqf.qform import (
    CLASS_NUMBER_ONE,
    principal_form,
    reduced_forms,
    theta_coefficients,
    units_count,
)

ROUTE_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    weight: int = 12
    disc: int = -4
    limit: int | None = None
    r: int = 2
    x: int | None = None
    out: str = "-"
    format: str = "csv"
    workers: int = 1
    grid_start: int = 1000
    grid_ratio: float = 1.5

    def validate(self) -> None:
        if self.command in ("eigenform", "sums", "decomp", "signs") and self.weight not in SUPPORTED_WEIGHTS:
            raise UsageError(f"--weight must be one of {SUPPORTED_WEIGHTS}, got {self.weight}")
        if self.limit is not None and self.limit < 1:
            raise UsageError("--limit must be >= 1")
        if self.disc >= 0 or self.disc % 4 not in (0, 1):
            raise UsageError(f"--disc {self.disc} is not a negative discriminant (D = 0 or 1 mod 4)")
        if self.command in ("sums", "decomp", "signs") and self.disc not in CLASS_NUMBER_ONE:
            raise UsageError(f"--disc must have class number 1: one of {CLASS_NUMBER_ONE}")
        if self.command in ("sums", "decomp") and not 1 <= self.r <= 8:
            raise UsageError("--r must be in 1..8")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.grid_start < 1 or self.grid_ratio <= 1:
            raise UsageError("need --grid-start >= 1 and --grid-ratio > 1")
        if self.command == "signs" and (self.x is None or self.x < 1):
            raise UsageError("--x must be >= 1")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _schema(command: str) -> str:
    return f"heckeqf/{command}/v{SCHEMA_VERSION}"


@contextmanager
def _open_out(path: str):
    if path == "-":
        buf = io.StringIO()
        yield buf
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(cfg: RunConfig, header: list[str], rows, footer: list[str] = ()) -> None:
    with _open_out(cfg.out) as fh:
        fh.write(f"# schema: {_schema(cfg.command)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        for line in footer:
            fh.write(f"# {line}\n")


def _write_json(cfg: RunConfig, payload: dict) -> None:
    with _open_out(cfg.out) as fh:
        json.dump({"schema": _schema(cfg.command), **payload}, fh, indent=2)
        fh.write("\n")


# --- commands ---


def cmd_eigenform(cfg: RunConfig) -> int:
    X = cfg.limit or 100
    f = make_eigenform(cfg.weight, X)
    if cfg.format == "json":
        _write_json(cfg, {
            "weight": cfg.weight, "limit": X,
            "a_n": [str(v) for v in f.a[1:]],
            "lambda_n": [float(v) for v in f.lam[1:]],
        })
    else:
        rows = ([n, str(f.a[n]), _fmt(f.lam[n])] for n in range(1, X + 1))
        _write_csv(cfg, ["n", "a_n", "lambda_n"], rows)
    return 0


def cmd_qform(cfg: RunConfig) -> int:
    D = cfg.disc
    forms = reduced_forms(D)
    X = cfg.limit or 100
    theta = theta_coefficients(principal_form(D), X, workers=cfg.workers)
    if cfg.format == "json":
        _write_json(cfg, {
            "D": D, "h": len(forms), "w_D": units_count(D),
            "forms": [{"a": Q.a, "b": Q.b, "c": Q.c} for Q in forms],
            "principal_r_Q": [int(v) for v in theta],
        })
    else:
        rows = ([n, int(theta[n])] for n in range(X + 1))
        footer = [f"h={len(forms)} forms=" + ";".join(f"({Q.a},{Q.b},{Q.c})" for Q in forms)]
        _write_csv(cfg, ["n", "r_Q"], rows, footer)
    return 0


def cmd_sums(cfg: RunConfig) -> int:
    X = cfg.limit or 100000
    f = make_eigenform(cfg.weight, X)
    table = FactorTable.build(X)
    grid = checkpoint_grid(X, cfg.grid_start, cfg.grid_ratio)
    series = partial_sum_series(f, cfg.disc, cfg.r, grid, table, workers=cfg.workers)
    Q = principal_form(cfg.disc)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            lattice = list(pool.map(lambda x: partial_sum_lattice(f, Q, cfg.r, x), grid))
    else:
        lattice = [partial_sum_lattice(f, Q, cfg.r, x) for x in grid]
    rel = [abs(a - s) / max(abs(s), 1e-300) if a != s else 0.0 for (_, s), a in zip(series.checkpoints, lattice)]
    routes_ok = all(v <= ROUTE_TOL for v in rel)

    summary: dict = {"routes_agree": routes_ok, "max_route_rel_diff": max(rel)}
    if THEOREM_TARGETS.main_term_degree[cfg.r] is not None and len(grid) > THEOREM_TARGETS.main_term_degree[cfg.r]:
        fit = fit_main_term(series)
        summary["main_term_coefficients"] = fit.coefficients
        summary["main_term_max_rel_residual"] = fit.max_rel_residual
    if len(grid) >= 3:
        est = remainder_exponent(series)
        summary["remainder_slope"] = est.slope
        summary["remainder_slope_stderr"] = est.stderr
        summary["gamma_r"] = est.gamma

    if cfg.format == "json":
        _write_json(cfg, {
            "weight": cfg.weight, "D": cfg.disc, "r": cfg.r, "limit": X,
            "checkpoints": [
                {"x": x, "S_arith": s, "S_lattice": a, "rel_diff": d}
                for (x, s), a, d in zip(series.checkpoints, lattice, rel)
            ],
            "summary": summary, "verdict": "PASS" if routes_ok else "FAIL",
        })
    else:
        rows = ([x, _fmt(s), _fmt(a), _fmt(d)] for (x, s), a, d in zip(series.checkpoints, lattice, rel))
        _write_csv(cfg, ["x", "S_arith", "S_lattice", "rel_diff"], rows,
                   [f"verdict={'PASS' if routes_ok else 'FAIL'}"])
    return 0 if routes_ok else 1


def cmd_decomp(cfg: RunConfig) -> int:
    X = cfg.limit or (5000 if cfg.r <= 4 else 2000)
    f = make_eigenform(cfg.weight, X)
    table = FactorTable.build(X)
    rep = verify_decomposition(cfg.r, f, cfg.disc, X, table)
    sq = squarefree_mask(X)
    err = np.abs(rep.reconstruction.c - rep.R.c)
    summary = {
        "u1": float(rep.u1), "w_D": rep.w_D, "unit_ok": rep.unit_ok,
        "max_squarefree_u": rep.max_squarefree_u, "worst_squarefree_n": rep.worst_squarefree_n,
        "squarefree_ok": rep.squarefree_ok,
        "max_reconstruction_error": rep.max_reconstruction_error,
        "reconstruction_ok": rep.reconstruction_ok,
        "ledger_degree": ledger(cfg.r).degree,
    }
    verdict = "PASS" if rep.passed else "FAIL"
    if cfg.format == "json":
        _write_json(cfg, {
            "weight": cfg.weight, "D": cfg.disc, "r": cfg.r, "limit": X,
            "rows": [
                {"n": n, "R": float(rep.R.c[n]), "L": float(rep.L.c[n]), "U": float(rep.U.c[n]),
                 "recon_abs_err": float(err[n]), "squarefree": bool(sq[n])}
                for n in range(1, X + 1)
            ],
            "summary": summary, "verdict": verdict,
        })
    else:
        rows = (
            [n, _fmt(rep.R.c[n]), _fmt(rep.L.c[n]), _fmt(rep.U.c[n]), _fmt(err[n]), int(sq[n])]
            for n in range(1, X + 1)
        )
        footer = [f"{k}={v}" for k, v in summary.items()] + [f"verdict={verdict}"]
        _write_csv(cfg, ["n", "R_n", "L_n", "U_n", "recon_abs_err", "squarefree"], rows, footer)
    return 0 if rep.passed else 1


def cmd_signs(cfg: RunConfig) -> int:
    x = cfg.x
    X = max(cfg.limit or 0, 2 * x)
    f = make_eigenform(cfg.weight, X)
    table = FactorTable.build(X)
    rep = count_sign_changes(f, cfg.disc, x, table)
    if cfg.format == "json":
        _write_json(cfg, {"weight": cfg.weight, "D": cfg.disc, **rep.to_dict()})
    else:
        changes = set(rep.locations)
        seq = [(n, s) for n, s in sign_sequence(f, cfg.disc, 2 * x, table) if n > x]
        rows = ([n, s, int(n in changes)] for n, s in seq)
        footer = [f"count={rep.count}", f"threshold={_fmt(rep.threshold)}",
                  f"verdict={'PASS' if rep.passed else 'FAIL'}"]
        _write_csv(cfg, ["n", "sign", "change"], rows, footer)
    return 0 if rep.passed else 1


COMMANDS = {
    "eigenform": cmd_eigenform,
    "qform": cmd_qform,
    "sums": cmd_sums,
    "decomp": cmd_decomp,
    "signs": cmd_signs,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heckeqf", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output file (default: stdout)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--limit", type=int, default=None)

    p = sub.add_parser("eigenform", parents=[common], help="coefficient table n, a_n, lambda_n")
    p.add_argument("--weight", type=int, required=True)

    p = sub.add_parser("qform", parents=[common], help="reduced forms and theta coefficients")
    p.add_argument("--disc", type=int, required=True)

    for name, text in (("sums", "partial sums S_r by both routes"),
                       ("decomp", "verify R_r = L_r * U_r")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--weight", type=int, default=12)
        p.add_argument("--disc", type=int, required=True)
        p.add_argument("--r", type=int, required=True)
        if name == "sums":
            p.add_argument("--grid-start", type=int, default=1000)
            p.add_argument("--grid-ratio", type=float, default=1.5)

    p = sub.add_parser("signs", parents=[common], help="sign changes in (x, 2x]")
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
    except UsageError as exc:
        print(f"heckeqf {cfg.command}: error: {exc}", file=sys.stderr)
        return 2
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
