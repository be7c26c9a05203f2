"""Batch driver for convergence sweeps.

Usage::

    python -m dlngl --example 1 --theta 0.25 --degree 1 --mode spatial \\
        --n-list 5,10,15,20 --tau 1e-3 --out table1.csv

A flat ``key=value`` config file can be given with ``--config``; explicit
flags override its entries. Exit codes: 0 when every row completed, 1 on a
solver failure, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from .analysis import RateTable, build_rate_table, error_report
from .errors import ConfigurationError, DlnGlError, InvalidArgument, SolverFailure, SweepAborted
from .problems import make_example
from .scheme import DlnConfig, run_simulation

__all__ = ["RunConfig", "run_convergence_study", "emit_table", "format_table", "read_table",
           "load_config_file", "main"]

log = logging.getLogger(__name__)

MODES = ("spatial", "temporal", "single", "plateau")
FORMATS = ("csv", "markdown")
CSV_HEADER = ("param", "E1_u", "order1_u", "E0_u", "order0_u", "E1_v", "order1_v", "E0_v", "order0_v")


def default_tau(degree: int) -> float:
    """Fixed step for spatial sweeps: small enough that O(tau^2) sits below h^(k+1)."""
    return 2e-4 if degree >= 3 else 1e-3


@dataclass(frozen=True)
class RunConfig:
    """One sweep.

    ``n_list`` holds mesh sizes ``n`` (h = 1/n). In temporal mode the step
    follows the mesh (tau = 1/n). ``tau=None`` selects :func:`default_tau`
    for spatial and single runs.
    """

    example: int = 1
    theta: float = 0.5
    degree: int = 1
    mode: str = "spatial"
    n_list: tuple = (5, 10, 15, 20)
    tau: Optional[float] = None
    T: float = 1.0
    tol: float = 1e-10
    format: str = "csv"
    out: Optional[str] = None

    def __post_init__(self):
        if self.example not in (1, 2, 3):
            raise ConfigurationError(f"example must be 1, 2 or 3, got {self.example!r}")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigurationError(f"theta must lie in [0, 1], got {self.theta}")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}, got {self.format!r}")
        ns = tuple(int(n) for n in self.n_list)
        if not ns or any(n < 1 for n in ns):
            raise ConfigurationError("n_list must hold positive integers")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigurationError(f"n_list must be strictly increasing, got {ns}")
        if self.mode == "single" and len(ns) != 1:
            raise ConfigurationError("single mode takes exactly one mesh size")
        if self.mode == "plateau" and self.tau is None:
            raise ConfigurationError("plateau mode needs a fixed tau")
        if self.tau is not None and not self.tau > 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if not self.T > 0 or not self.tol > 0:
            raise ConfigurationError("T and tol must be positive")
        object.__setattr__(self, "n_list", ns)

    @property
    def label(self) -> str:
        return "tau" if self.mode == "temporal" else "h"

    def runs(self):
        """``(param, n, DlnConfig)`` per row, in sweep order."""
        out = []
        for n in self.n_list:
            if self.mode == "temporal":
                tau = 1.0 / n
            else:
                tau = self.tau if self.tau is not None else default_tau(self.degree)
            try:
                dln = DlnConfig(theta=self.theta, tau=tau, T=self.T, tol=self.tol)
            except InvalidArgument as exc:
                raise ConfigurationError(str(exc)) from exc
            param = tau if self.mode == "temporal" else 1.0 / n
            out.append((param, n, dln))
        return out


def run_convergence_study(config: RunConfig) -> RateTable:
    """Run every row of the sweep and tabulate errors and observed orders.

    The table is written to ``config.out`` when set.

    Raises
    ------
    SweepAborted
        A run failed; ``exc.table`` holds the rows completed before it.
    """
    problem = make_example(config.example)
    runs = config.runs()
    params, reports = [], []
    for param, n, dln in runs:
        try:
            result = run_simulation(problem, dln, n, config.degree)
        except SolverFailure as exc:
            partial = build_rate_table(params, reports, config.label) if reports else None
            raise SweepAborted(f"run n={n}, tau={dln.tau:g} failed: {exc}", partial,
                               exc.residual, exc.step) from exc
        reports.append(error_report(result))
        params.append(param)
        log.info("n=%d tau=%g: %s", n, dln.tau, reports[-1])
    table = build_rate_table(params, reports, config.label)
    if config.out is not None:
        emit_table(table, config.format, config.out)
    return table


def _fmt_err(x: float) -> str:
    return f"{x:.4e}"


def _fmt_order(x) -> str:
    return "--" if x is None else f"{x:.4f}"


def _fmt_param(x: float) -> str:
    return repr(float(x))


def format_table(table: RateTable, fmt: str = "csv") -> str:
    if not table.rows:
        raise InvalidArgument("cannot emit an empty table")
    if fmt == "csv":
        lines = [",".join(CSV_HEADER)]
        for row in table.rows:
            cells = [_fmt_param(row.param)]
            for col in RateTable.COLUMNS:
                cells += [_fmt_err(getattr(row.report, col)), _fmt_order(row.orders.get(col))]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        head = [table.label, "E1_u", "order", "E0_u", "order", "E1_v", "order", "E0_v", "order"]
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for row in table.rows:
            p = row.param
            shown = f"1/{round(1 / p)}" if p > 0 and math.isclose(1 / p, round(1 / p)) else f"{p:g}"
            cells = [shown]
            for col in RateTable.COLUMNS:
                cells += [_fmt_err(getattr(row.report, col)), _fmt_order(row.orders.get(col))]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise InvalidArgument(f"unknown format {fmt!r}")


def emit_table(table: RateTable, format: str, path) -> None:
    """Write ``table`` as CSV or markdown. Unwritable paths raise ``OSError``."""
    text = format_table(table, format)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_table(path) -> list:
    """Parse an emitted CSV back into dicts of floats (``None`` for ``--``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidArgument(f"unexpected header {reader.fieldnames}")
        return [{k: (None if v == "--" else float(v)) for k, v in rec.items()} for rec in reader]


_CASTS = {
    "example": int, "theta": float, "degree": int, "mode": str, "tau": float,
    "T": float, "tol": float, "format": str, "out": str,
}


def _parse_n_list(text: str) -> tuple:
    try:
        return tuple(int(s) for s in text.replace(" ", "").split(",") if s)
    except ValueError as exc:
        raise ConfigurationError(f"bad mesh list {text!r}") from exc


def load_config_file(path) -> dict:
    """Read ``key=value`` lines; ``#`` starts a comment. Keys may use dashes."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _convert(key, value)
    return out


def _convert(key, value):
    if key == "n_list":
        return _parse_n_list(value)
    if key not in _CASTS:
        raise ConfigurationError(f"unknown config key {key!r}")
    try:
        return _CASTS[key](value)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dlngl", description="DLN Ginzburg-Landau convergence sweeps")
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--example", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n-list", dest="n_list", help="comma-separated mesh sizes, e.g. 5,10,15,20")
    p.add_argument("--tau", type=float)
    p.add_argument("--T", dest="T", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(argv: Optional[Sequence[str]] = None) -> tuple:
    args = build_parser().parse_args(argv)
    values = load_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        given = getattr(args, f.name, None)
        if given is not None:
            values[f.name] = _parse_n_list(given) if f.name == "n_list" else given
    try:
        return RunConfig(**values), args.verbose
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config, verbose = config_from_args(argv)
    except SystemExit as exc:               # argparse usage errors
        return 2 if exc.code else 0
    except (ConfigurationError, InvalidArgument) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    to_stdout = config.out is None
    try:
        table = run_convergence_study(config)
    except SweepAborted as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        if exc.table is not None:
            print("completed rows:", file=sys.stderr)
            sys.stderr.write(format_table(exc.table, config.format))
        return 1
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 2
    except DlnGlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if to_stdout:
        sys.stdout.write(format_table(table, config.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
