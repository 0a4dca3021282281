"""Command-line surface: validate a CSV, simulate scenario data, run power studies.

Exit codes: 0 success, 2 input or validation error, 3 configuration error,
4 internal numeric failure.  A rejected null hypothesis is still exit 0; the
codes describe tool failures, not statistical verdicts.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from ._svg import calibration_svg, power_svg, roc_svg
from .core import RngStream, ValidationSample, make_sample
from .errors import (
    ConfigError,
    CsvParseError,
    InvalidScenarioError,
    MissingColumnError,
    NonBinaryOutcomeError,
    NumericError,
    OutOfRangeRiskError,
    ValidationError,
)
from .report import build_report, dump_json, format_float, power_table_dict
from .simstudy import (
    ScenarioFamily,
    generate_with_truth,
    make_scenario,
    run_power_study,
)


def load_csv(path, y_column: str = "y", p_column: str = "p") -> ValidationSample:
    """Read outcomes and risks from a CSV with a header row.

    Outcomes must parse as the integers 0 or 1, risks as decimals in [0, 1].
    Error messages carry 1-based data-row numbers.  Row order is preserved.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvParseError(f"{path}: empty file")
        names = [h.strip() for h in header]
        for needed in (y_column, p_column):
            if needed not in names:
                raise MissingColumnError(
                    f"{path}: column {needed!r} not in header {names}")
        y_idx = names.index(y_column)
        p_idx = names.index(p_column)
        outcomes = []
        risks = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) <= max(y_idx, p_idx):
                raise CsvParseError(f"row {row_num}: expected {len(names)} fields, "
                                    f"got {len(row)}")
            y_raw = row[y_idx].strip()
            p_raw = row[p_idx].strip()
            try:
                y = int(y_raw)
            except ValueError:
                raise CsvParseError(
                    f"row {row_num}: outcome {y_raw!r} is not an integer") from None
            if y not in (0, 1):
                raise NonBinaryOutcomeError(
                    f"row {row_num}: outcome must be 0 or 1, got {y}")
            try:
                p = float(p_raw)
            except ValueError:
                raise CsvParseError(
                    f"row {row_num}: risk {p_raw!r} is not a number") from None
            if not 0.0 <= p <= 1.0:
                raise OutOfRangeRiskError(f"row {row_num}: risk {p!r} outside [0, 1]")
            outcomes.append(y)
            risks.append(p)
        return make_sample(outcomes, risks)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _cmd_validate(args) -> int:
    sample = load_csv(args.input, args.y_col, args.p_col)
    report = build_report(sample, n_sims=args.sims, rng=RngStream(seed=args.seed),
                          bins=args.bins, source_path=str(args.input),
                          source_sha256=_sha256(args.input))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(out_dir / "report.json", dump_json(report.to_dict()))
    _write_text(out_dir / "roc.svg", roc_svg(report.empirical_curve, report.model_curve))
    _write_text(out_dir / "calibration.svg", calibration_svg(report.bins))
    t = report.test
    print(f"n={report.n} events={report.event_count} "
          f"auc={report.empirical_curve.auc:.4f} mroc_auc={report.model_curve.auc:.4f}")
    print(f"mean-calibration stat={t.stat_a:.6g} p={t.p_a:.6g}")
    print(f"roc-equality    stat={t.stat_b:.6g} p={t.p_b:.6g}")
    print(f"unified         stat={t.stat_u:.6g} p={t.p_unified:.6g}")
    print(f"wrote {out_dir / 'report.json'}, roc.svg, calibration.svg")
    return 0


def _cmd_simulate(args) -> int:
    scenario = make_scenario(args.family, a=args.a, b=args.b, n=args.n,
                             predictor_mean=args.predictor_mean,
                             predictor_sd=args.predictor_sd, panel=args.panel)
    sample, true_risk = generate_with_truth(scenario, RngStream(seed=args.seed))
    lines = []
    if args.with_true_risk:
        lines.append("y,p,true_p")
        for y, p, tp in zip(sample.outcomes, sample.risks, true_risk):
            lines.append(f"{int(y)},{format_float(float(p))},{format_float(float(tp))}")
    else:
        lines.append("y,p")
        for y, p in zip(sample.outcomes, sample.risks):
            lines.append(f"{int(y)},{format_float(float(p))}")
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote {out} ({sample.n} rows, {sample.case_count} events)")
    return 0


def _scalar_or_list(value) -> list:
    return list(value) if isinstance(value, list) else [value]


def _load_power_config(path):
    try:
        with open(path, "rb") as fh:
            config = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    outer_reps = config.get("outer_reps", 500)
    inner_sims = config.get("inner_sims", 5000)
    seed = config.get("seed", 0)
    for name, value, low in (("outer_reps", outer_reps, 50),
                             ("inner_sims", inner_sims, 100)):
        if not isinstance(value, int) or value < low:
            raise ConfigError(f"{path}: {name} must be an integer >= {low}")
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{path}: seed must be a non-negative integer")
    blocks = config.get("scenario", [])
    if not isinstance(blocks, list) or not blocks:
        raise ConfigError(f"{path}: at least one [[scenario]] block required")
    grid = []
    for idx, block in enumerate(blocks, start=1):
        where = f"{path}: scenario block {idx}"
        if not isinstance(block, dict):
            raise ConfigError(f"{where}: must be a table")
        unknown = set(block) - {"family", "a", "b", "n", "predictor_mean",
                                "predictor_sd", "panel"}
        if unknown:
            raise ConfigError(f"{where}: unknown fields {sorted(unknown)}")
        if "family" not in block:
            raise ConfigError(f"{where}: 'family' is required")
        if "n" not in block:
            raise ConfigError(f"{where}: 'n' is required")
        combos = itertools.product(
            _scalar_or_list(block.get("a", 0.0)),
            _scalar_or_list(block.get("b", 1.0)),
            _scalar_or_list(block["n"]),
            _scalar_or_list(block.get("panel", None)),
        )
        for a, b, n, panel in combos:
            try:
                grid.append(make_scenario(
                    block["family"], a=float(a), b=float(b), n=int(n),
                    predictor_mean=block.get("predictor_mean"),
                    predictor_sd=block.get("predictor_sd"), panel=panel))
            except (InvalidScenarioError, TypeError, ValueError) as exc:
                raise ConfigError(f"{where}: {exc}") from None
    return grid, outer_reps, inner_sims, seed


def _cmd_power(args) -> int:
    grid, outer_reps, inner_sims, seed = _load_power_config(args.config)
    table = run_power_study(grid, outer_reps, inner_sims, RngStream(seed=seed))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(out_dir / "power.json", dump_json(power_table_dict(table)))
    _write_text(out_dir / "power.svg", power_svg(table))
    for row in table.rows:
        sc = row.scenario
        label = (f"panel {sc.panel}" if sc.panel
                 else f"a={sc.a:g} b={sc.b:g}")
        lrt = "n/a" if row.reject_lrt is None else f"{row.reject_lrt:.3f}"
        print(f"{sc.family.value} {label} n={sc.n}: "
              f"mean-cal={row.reject_mean_cal:.3f} roc-eq={row.reject_roc_eq:.3f} "
              f"unified={row.reject_unified:.3f} lrt={lrt}")
    print(f"wrote {out_dir / 'power.json'}, power.svg")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rocval",
        description="Validate risk prediction models with model-based ROC curves.")
    parser.add_argument("--version", action="version", version=f"rocval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="run the calibration test on a CSV")
    p_val.add_argument("--input", required=True, help="CSV with outcome and risk columns")
    p_val.add_argument("--y-col", default="y", help="outcome column name (default y)")
    p_val.add_argument("--p-col", default="p", help="risk column name (default p)")
    p_val.add_argument("--sims", type=int, default=10_000,
                       help="Monte Carlo replicates for the null (default 10000)")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--bins", type=int, default=10,
                       help="calibration plot bins (default 10)")
    p_val.add_argument("--out-dir", default=".")
    p_val.set_defaults(func=_cmd_validate)

    p_sim = sub.add_parser("simulate", help="write a synthetic validation CSV")
    p_sim.add_argument("--family", required=True,
                       choices=[f.value for f in ScenarioFamily])
    p_sim.add_argument("--a", type=float, default=0.0)
    p_sim.add_argument("--b", type=float, default=1.0)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--predictor-mean", type=float, default=None)
    p_sim.add_argument("--predictor-sd", type=float, default=None)
    p_sim.add_argument("--panel", default=None, choices=["A", "B", "C", "D"],
                       help="case-mix panel (case-mix-preset family only)")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--with-true-risk", action="store_true",
                       help="include the generating true risk as a true_p column")
    p_sim.set_defaults(func=_cmd_simulate)

    p_pow = sub.add_parser("power", help="run a power study from a TOML config")
    p_pow.add_argument("--config", required=True)
    p_pow.add_argument("--out-dir", default=".")
    p_pow.set_defaults(func=_cmd_power)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, FileNotFoundError, IsADirectoryError, PermissionError,
            UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
