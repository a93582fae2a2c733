"""Command-line entry point: experiment grids over (kind, alpha, delta),
reference-table regression, verification checks, and plot-data emission.

Exit codes: 0 success, 1 usage or solver error, 2 reference-table mismatch.
Flags override config-file entries, which override the defaults; the
defaults reproduce the bundled reference tables exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import analytic1d, checks, metrics, report, schwarz
from .model import (
    ALPHA_ELLIPTIC,
    CONVENTIONS,
    ELLIPTIC,
    EXTEND_BOTH,
    INIT_ONES,
    INIT_POLICIES,
    KINDS,
    OCP,
    ModelError,
    standard_spec,
)
from .saddle import SaddleSolverError

SUBCOMMANDS = ("table1", "table2", "figure3", "figure4", "single", "verify")

DEFAULT_ALPHAS = (1e-2, 1e-4, 1e-6)
DEFAULT_DELTAS = (1, 2, 3, 4)
OUT_ENV_VAR = "SCHWARZ_OCP_OUT"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None  # None = subcommand default (64, or {4,8,16} for verify)
    alphas: tuple = DEFAULT_ALPHAS
    deltas: tuple = DEFAULT_DELTAS
    convention: str = EXTEND_BOTH
    init: str = INIT_ONES
    seed: int = 0
    # 0 disables the early-convergence stop: the reference tables list every
    # sweep up to max_sweeps even when the merit falls below solver accuracy
    tol: float = 0.0
    max_sweeps: int = 5
    jobs: int = 1
    out_dir: str = "results"
    kind: str = OCP
    alpha_elliptic_alpha: float = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(
        prog="schwarz-ocp",
        description="Alternating two-subdomain sweep experiments for the "
                    "distributed-control optimality system and reference "
                    "elliptic equations on the unit square.",
    )
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--N", type=int, default=None, help="cells per side (even)")
    p.add_argument("--alpha", action="append", type=float, default=None,
                   help="regularization weight; repeatable")
    p.add_argument("--delta", action="append", type=int, default=None,
                   help="overlap parameter; repeatable")
    p.add_argument("--convention", choices=CONVENTIONS, default=None)
    p.add_argument("--init", choices=INIT_POLICIES, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--config", type=str, default=None, help="key=value config file")
    p.add_argument("--kind", choices=KINDS, default=None,
                   help="problem kind for the single subcommand")
    return p


_CONFIG_KEYS = {
    "N": ("n", int),
    "alpha": ("alphas", lambda v: tuple(float(x) for x in v.split(","))),
    "delta": ("deltas", lambda v: tuple(int(x) for x in v.split(","))),
    "convention": ("convention", str),
    "init": ("init", str),
    "seed": ("seed", int),
    "tol": ("tol", float),
    "max-sweeps": ("max_sweeps", int),
    "jobs": ("jobs", int),
    "out": ("out_dir", str),
    "kind": ("kind", str),
}


def _read_config_file(path: str) -> dict:
    """Flat key=value lines; # starts a comment; unknown keys are rejected."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        attr, conv = _CONFIG_KEYS[key]
        try:
            out[attr] = conv(value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return out


def parse_config(argv) -> RunConfig:
    """Flags override config-file entries override defaults."""
    ns = _build_parser().parse_args(argv)
    cfg = RunConfig(subcommand=ns.subcommand)
    file_cfg = _read_config_file(ns.config) if ns.config else {}
    for attr, value in file_cfg.items():
        setattr(cfg, attr, value)
    flag_map = {
        "n": ns.N,
        "alphas": tuple(ns.alpha) if ns.alpha else None,
        "deltas": tuple(ns.delta) if ns.delta else None,
        "convention": ns.convention,
        "init": ns.init,
        "seed": ns.seed,
        "tol": ns.tol,
        "max_sweeps": ns.max_sweeps,
        "jobs": ns.jobs,
        "out_dir": ns.out,
        "kind": ns.kind,
    }
    for attr, value in flag_map.items():
        if value is not None:
            setattr(cfg, attr, value)
    if ns.out is None and "out_dir" not in file_cfg:
        env_out = os.environ.get(OUT_ENV_VAR)
        if env_out:
            cfg.out_dir = env_out
    if cfg.n is not None:
        if cfg.n % 2 != 0:
            raise UsageError(f"--N must be even (midline split), got {cfg.n}")
        if cfg.n < 4:
            raise UsageError(f"--N must be at least 4, got {cfg.n}")
    if cfg.init not in INIT_POLICIES:
        raise UsageError(f"unknown init policy {cfg.init!r}")
    if cfg.convention not in CONVENTIONS:
        raise UsageError(f"unknown convention {cfg.convention!r}")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return cfg


def _spec_for_cell(config: RunConfig, kind: str, alpha: float, delta: int):
    return standard_spec(
        kind,
        n=config.n,
        alpha=alpha,
        delta=delta,
        convention=config.convention,
        init=config.init,
        seed=config.seed,
        tol=config.tol,
        max_sweeps=config.max_sweeps,
    )


def _run_cells(config: RunConfig, cells) -> list:
    """Run independent (kind, alpha, delta) cells, optionally in parallel."""
    def one(cell):
        kind, alpha, delta = cell
        spec = _spec_for_cell(config, kind, alpha, delta)
        history = schwarz.run(spec, mode=schwarz.ERROR_MODE)
        return metrics.extract_rates(history)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(one, cells))
    else:
        records = [one(c) for c in cells]
    order = {OCP: 1, ELLIPTIC: 0, ALPHA_ELLIPTIC: 2}
    return sorted(records, key=lambda r: (order[r.kind], r.alpha or 0.0, r.delta))


def _table1_cells(config: RunConfig) -> list:
    cells = [(ELLIPTIC, 1.0, d) for d in config.deltas]
    cells += [(OCP, a, d) for a in config.alphas for d in config.deltas]
    return cells


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _metadata(config: RunConfig) -> dict:
    return {
        "subcommand": config.subcommand,
        "n": config.n,
        "alphas": list(config.alphas),
        "deltas": list(config.deltas),
        "convention": config.convention,
        "init": config.init,
        "seed": config.seed,
        "tol": config.tol,
        "max_sweeps": config.max_sweeps,
    }


def run_suite(config: RunConfig) -> tuple:
    """Execute the requested experiments; returns (result, exit_code)."""
    out = Path(config.out_dir)
    if config.subcommand != "verify" and config.n is None:
        config.n = 64
    result = report.ExperimentSuiteResult(metadata=_metadata(config))
    code = 0
    if config.subcommand == "table1":
        result.records = _run_cells(config, _table1_cells(config))
        table = report.emit_table1(result.records)
        _write(out / "table1.txt", table.text)
        _write(out / "table1.md", table.markdown)
        _write(out / "table1.csv", table.csv)
        _write(out / "records_table1.csv", report.records_to_csv(result.records))
        result.mismatches = report.compare_to_reference(result.records)
        _write(out / "regression_table1.txt", _regression_text(result.mismatches))
        code = 2 if result.mismatches else 0
        print(table.text)
    elif config.subcommand == "table2":
        cells = [(ALPHA_ELLIPTIC, config.alpha_elliptic_alpha, d) for d in config.deltas]
        result.records = _run_cells(config, cells)
        table = report.emit_table2(result.records)
        _write(out / "table2.txt", table.text)
        _write(out / "table2.md", table.markdown)
        _write(out / "table2.csv", table.csv)
        _write(out / "records_table2.csv", report.records_to_csv(result.records))
        result.mismatches = report.compare_to_reference(result.records)
        _write(out / "regression_table2.txt", _regression_text(result.mismatches))
        code = 2 if result.mismatches else 0
        print(table.text)
    elif config.subcommand == "figure3":
        result.records = _run_cells(config, _table1_cells(config))
        for delta in config.deltas:
            series = [r for r in result.records if r.delta == delta]
            _write(out / f"figure3_delta{delta}.dat", report.emit_plot_data(series))
        _write(out / "records_figure3.csv", report.records_to_csv(result.records))
    elif config.subcommand == "figure4":
        scan = analytic1d.rate_vs_gamma_scan(0.4, 0.6, 1e-2, 1e2, 121)
        result.scans["gamma"] = scan
        _write(out / "figure4.dat", report.emit_gamma_scan(scan))
    elif config.subcommand == "single":
        alpha = config.alphas[0] if config.alphas else 1e-2
        delta = config.deltas[0] if config.deltas else 1
        result.records = _run_cells(config, [(config.kind, alpha, delta)])
        _write(out / "record_single.csv", report.records_to_csv(result.records))
        rec = result.records[0]
        for e in rec.entries:
            rate = report.fmt_sci(e.rate) if e.rate is not None else "-"
            print(f"k={e.k} merit={report.fmt_sci(e.merit_max)} rate={rate}")
    elif config.subcommand == "verify":
        ns = (config.n,) if config.n is not None else (4, 8, 16)
        summaries = checks.run_verification(ns=ns, base_seed=config.seed)
        lines = [str(s) for s in summaries]
        _write(out / "verify.txt", "\n".join(lines) + "\n")
        print("\n".join(lines))
        code = 0 if all(s.ok for s in summaries) else 1
    _write(out / "run_metadata.json",
           json.dumps(result.metadata, indent=2, sort_keys=True) + "\n")
    return result, code


def _regression_text(mismatches) -> str:
    if not mismatches:
        return "all cells within tolerance\n"
    return "\n".join(str(m) for m in mismatches) + "\n"


def main(argv=None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        _, code = run_suite(config)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ModelError, SaddleSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
