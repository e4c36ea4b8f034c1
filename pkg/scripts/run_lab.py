#!/usr/bin/env python3
"""Analyze discrete Green's operators, sweep potentials and check against exact kernels."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from greenslab.config import DEFAULT_SEED
from greenslab.core.errors import GreensLabError, TheoremViolation
from greenslab.core.models import Family, StageEvent, Verdict
from greenslab.lab import (
    AnalysisPipeline,
    RunConfig,
    analysis_report,
    convergence_report,
    emit_heatmap_csv,
    problem_from_config,
    run_oracle_check,
    run_sweep,
    save_report,
    sweep_report,
)

logger = logging.getLogger("greenslab.runner")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INADMISSIBLE = 2
EXIT_THEOREM = 3

FAMILIES = [family.value for family in Family]


class ConfigError(Exception):
    """Bad flags or config file; reported with exit code 1."""


def configure_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--family", choices=FAMILIES, default=None, help="演算子ファミリー")
    parser.add_argument("--bounds", default=None, help="領域 a,b (1D) または a,b,c,d (2D)。既定は単位区間/単位正方形")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="乱数シード (default: %(default)s)")
    parser.add_argument("--workers", type=int, default=1, help="並列ワーカー数")
    parser.add_argument("--eps-rel", type=float, default=None, help="非負判定の相対許容誤差 (default: 1e-8)")
    parser.add_argument("--tol-sing", type=float, default=None, help="特異判定のピボット閾値 (default: 1e-8)")
    parser.add_argument("--out", default=None, help="JSONレポートの保存先。未指定の場合は保存しない。")
    parser.add_argument(
        "--config",
        default=None,
        help="JSONファイルからオプションを読み込む。CLI引数が優先される。",
    )
    parser.add_argument("--verbose", action="store_true", help="DEBUGログを表示する")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Discrete Green's operator positivity lab")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="単一の演算子を解析する")
    _add_common(analyze)
    analyze.add_argument("--n", default="199", help="内部格子点数 N または NX,NY")
    analyze.add_argument("--c", type=float, default=None, help="定数ポテンシャル c (--potential より優先)")
    analyze.add_argument(
        "--potential",
        default=None,
        help='ポテンシャル指定 (JSON)。例: {"kind": "gaussian-bump", "amplitude": 50, "center": [0.5], "width": 0.1}',
    )
    analyze.add_argument("--heatmap", default=None, help="核行列 K を書き出す CSV パス")
    analyze.add_argument(
        "--heatmap-dir",
        default=None,
        help="kernel.csv / row_mass.csv / unit_load.csv を書き出すディレクトリ",
    )
    analyze.add_argument(
        "--record-timings",
        action="store_true",
        help="レポートに各ステージの所要時間を含める (出力はバイト一致しなくなる)",
    )

    sweep = commands.add_parser("sweep", help="定数ポテンシャル c を掃引して閾値を探す")
    _add_common(sweep)
    sweep.add_argument("--n", default="199", help="内部格子点数 N または NX,NY")
    sweep.add_argument("--param", choices=["c"], default="c", help="掃引するパラメータ")
    sweep.add_argument("--range", default=None, help="掃引範囲 lo,hi")
    sweep.add_argument("--steps", type=int, default=40, help="掃引点数 (>= 2)")
    sweep.add_argument(
        "--log",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="対数間隔で掃引する (default: 有効)",
    )
    sweep.add_argument("--bisect-precision", type=float, default=1e-3, help="二分法の相対精度")

    oracle = commands.add_parser("oracle-check", help="厳密解との収束を確認する")
    _add_common(oracle)
    oracle.add_argument("--ladder", default="49,99,199,399", help="格子点数の列 (狭義単調増加)")
    return parser


def parse_args(argv: List[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = parser.parse_args([args.command])
    if args.config:
        config_data = load_config_file(Path(args.config))
        apply_config_overrides(args, defaults, config_data)
    return args


def load_config_file(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def apply_config_overrides(args: argparse.Namespace, defaults: argparse.Namespace, config_data: Dict[str, Any]):
    for key, value in config_data.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            logger.warning("unknown config key ignored: %s", key)
            continue
        if getattr(args, key) == getattr(defaults, key):
            setattr(args, key, value)


def _numbers(value: Any, cast=float) -> Optional[List[Any]]:
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [cast(item) for item in value]
    if isinstance(value, (int, float)):
        return [cast(value)]
    try:
        return [cast(item) for item in str(value).split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {value!r}: {exc}") from exc


def _potential(args: argparse.Namespace) -> Optional[Dict[str, Any]]:
    c = getattr(args, "c", None)
    if c is not None:
        return {"kind": "constant", "value": float(c)}
    raw = getattr(args, "potential", None)
    if raw is None:
        return None
    if isinstance(raw, dict):
        return raw
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--potential: column {exc.colno}: {exc.msg}") from exc


def build_run_config(args: argparse.Namespace) -> RunConfig:
    if not args.family:
        raise ConfigError("--family is required")
    data: Dict[str, Any] = {
        "family": args.family,
        "bounds": _numbers(args.bounds),
        "seed": args.seed,
        "workers": args.workers,
        "tolerances": {"eps_rel": args.eps_rel, "sing": args.tol_sing},
        "out": args.out,
    }
    if hasattr(args, "n"):
        data["counts"] = _numbers(args.n, int)
    potential = _potential(args)
    if potential is not None:
        data["potential"] = potential
    if args.command == "analyze":
        data["heatmap"] = args.heatmap
        data["heatmap_dir"] = args.heatmap_dir
        data["record_timings"] = bool(args.record_timings)
    if args.command == "sweep":
        if args.range is None:
            raise ConfigError("--range is required for sweep")
        data["sweep"] = {
            "param": args.param,
            "range": _numbers(args.range),
            "steps": args.steps,
            "log": bool(args.log),
            "bisect_precision": args.bisect_precision,
        }
    if args.command == "oracle-check":
        data["ladder"] = _numbers(args.ladder, int)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in exc.errors()
        )
        raise ConfigError(problems) from exc


def log_stage(event: StageEvent):
    logger.info("%-13s %.3fs %s", event.stage.value, event.elapsed, event.payload)


def _summary_table(title: str, rows: List[tuple]) -> Table:
    table = Table(title=title)
    table.add_column("property")
    table.add_column("verdict")
    table.add_column("value", justify="right")
    for name, verdict, value in rows:
        table.add_row(name, verdict, "" if value is None else f"{value:.6g}")
    return table


def run_analyze(config: RunConfig, console: Console) -> int:
    pipeline = AnalysisPipeline(problem=problem_from_config(config), config=config.lab_config)
    pipeline.attach_handler(log_stage)
    result = pipeline.run()
    report = analysis_report(result, config.summary(), config.record_timings)
    if config.out:
        save_report(config.out, report)
        logger.info("report saved to %s", config.out)

    if not result.admissible:
        logger.error("operator is not admissible: %s", result.admissibility.message)
        return EXIT_INADMISSIBLE

    grid = result.operator.grid
    if config.heatmap:
        emit_heatmap_csv(result.kernel.K, grid, config.heatmap)
    if config.heatmap_dir:
        emit_heatmap_csv(result.kernel.K, grid, config.heatmap_dir / "kernel.csv")
        emit_heatmap_csv(result.row_mass.values, grid, config.heatmap_dir / "row_mass.csv")
        emit_heatmap_csv(result.unit_load.values, grid, config.heatmap_dir / "unit_load.csv")

    rows = [(name, record.verdict.value, record.value) for name, record in result.report.verdicts().items()]
    console.print(_summary_table(f"{config.family.value} M={grid.size}", rows))
    names = [check.name for check in result.report.violations]
    if names:
        raise TheoremViolation(", ".join(names), checks=names)
    return EXIT_OK


def run_sweep_command(config: RunConfig, console: Console) -> int:
    report = run_sweep(config, config.lab_config, progress=lambda point: logger.debug("c=%g done", point.value))
    if config.out:
        save_report(config.out, sweep_report(report, config.summary()))
        logger.info("sweep report saved to %s", config.out)

    table = Table(title=f"sweep {report.param} ({len(report.values)} points)")
    table.add_column("threshold")
    table.add_column("direction")
    table.add_column("lower", justify="right")
    table.add_column("upper", justify="right")
    table.add_column("lambda_min", justify="right")
    for name, threshold in report.thresholds.items():
        if threshold is None:
            table.add_row(name, "-", "-", "-", "-")
        else:
            lam = "-" if threshold.lambda_min is None else f"{threshold.lambda_min:.6g}"
            table.add_row(name, threshold.direction, f"{threshold.lower:.6g}", f"{threshold.upper:.6g}", lam)
    console.print(table)

    if not report.equivalence_consistent or report.violations:
        raise TheoremViolation(", ".join(report.violations) or "inconsistent verdicts", checks=report.violations)
    if not report.all_positive:
        failing = [
            f"{point.value:g}"
            for point in report.points
            if point.verdicts.get("positive_operator") != Verdict.HOLDS.value
        ]
        raise TheoremViolation(f"operator is not positive at c={', '.join(failing)}", checks=["positive_operator"])
    return EXIT_OK


def run_oracle_command(config: RunConfig, console: Console) -> int:
    ladder = config.ladder or [49, 99, 199, 399]
    report = run_oracle_check(config.family, ladder, config.lab_config)
    if config.out:
        save_report(config.out, convergence_report(report, config.summary()))

    table = Table(title=f"oracle-check {report.family.value}")
    for column in ("N", "max error", "ratio", "u(0.5)"):
        table.add_column(column, justify="right")
    for level in report.levels:
        ratio = "exact" if level.nodally_exact else ("-" if level.ratio is None else f"{level.ratio:.3f}")
        table.add_row(str(level.count), f"{level.max_error:.3e}", ratio, f"{level.unit_load_center:.8g}")
    console.print(table)
    return EXIT_OK


COMMANDS = {
    "analyze": run_analyze,
    "sweep": run_sweep_command,
    "oracle-check": run_oracle_command,
}


def main(argv: List[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        configure_logging(args.verbose)
        config = build_run_config(args)
    except SystemExit as exc:
        if exc.code in (0, None):
            raise
        return EXIT_CONFIG
    except ConfigError as exc:
        configure_logging()
        logger.error("config error: %s", exc)
        return EXIT_CONFIG

    console = Console(stderr=True)
    try:
        return COMMANDS[args.command](config, console)
    except TheoremViolation as exc:
        logger.error("theorem check failed: %s", exc)
        return EXIT_THEOREM
    except (GreensLabError, ValueError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
