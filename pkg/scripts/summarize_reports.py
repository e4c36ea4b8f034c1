#!/usr/bin/env python3
"""Summarise greens-lab JSON reports produced by run_lab.py."""

from __future__ import annotations

import argparse
import json
from collections import Counter, defaultdict
from pathlib import Path
from typing import Any, Dict, Iterable, List


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Summarise greens-lab reports")
    parser.add_argument(
        "path",
        nargs="+",
        help="JSON ファイルまたはディレクトリ (複数指定可)。ディレクトリの場合は *.json を再帰的に読み込む。",
    )
    return parser.parse_args()


def collect_files(paths: List[str]) -> List[Path]:
    files: List[Path] = []
    for item in paths:
        path = Path(item)
        if not path.exists():
            raise FileNotFoundError(f"入力パスが存在しません: {item}")
        if path.is_file():
            files.append(path)
        else:
            files.extend(sorted(path.rglob("*.json")))
    return files


def _count_point(verdict_counts: Dict[str, Counter], verdicts: Dict[str, Any]):
    for name, entry in verdicts.items():
        verdict = entry.get("verdict") if isinstance(entry, dict) else entry
        verdict_counts[name].update([verdict])


def analyse_reports(files: Iterable[Path]) -> Dict[str, Any]:
    reports = 0
    skipped = 0
    commands = Counter()
    verdict_counts: Dict[str, Counter] = defaultdict(Counter)
    violations = Counter()
    inconsistent = 0
    thresholds: List[Dict[str, Any]] = []

    for file_path in files:
        with file_path.open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not str(data.get("schema", "")).startswith("greens-lab/"):
            skipped += 1
            continue
        reports += 1
        command = data.get("command", "analyze")
        commands.update([command])
        family = data.get("config", {}).get("family")

        if command == "analyze":
            _count_point(verdict_counts, data.get("verdicts", {}))
            for check in data.get("theorem_checks", []):
                if check.get("applicable") and not check.get("passed"):
                    violations.update([check["name"]])
            if data.get("equivalence_consistent") is False:
                inconsistent += 1
        elif command == "sweep":
            for point in data.get("points", []):
                _count_point(verdict_counts, point.get("verdicts", {}))
                violations.update(point.get("violations", []))
                if point.get("admissible") and not point.get("equivalence_consistent", True):
                    inconsistent += 1
            for name, threshold in (data.get("thresholds") or {}).items():
                if threshold:
                    thresholds.append(
                        {
                            "file": file_path.name,
                            "family": family,
                            "verdict": name,
                            "direction": threshold.get("direction", "holds->fails"),
                            "value": threshold.get("value"),
                        }
                    )

    return {
        "reports": reports,
        "skipped": skipped,
        "commands": dict(commands),
        "verdicts": {name: dict(counter) for name, counter in sorted(verdict_counts.items())},
        "theorem_violations": sum(violations.values()),
        "violated_checks": violations.most_common(),
        "inconsistent_points": inconsistent,
        "thresholds": thresholds,
    }


def main():
    args = parse_args()
    files = collect_files(args.path)
    if not files:
        print("対象となるJSONファイルが見つかりませんでした。")
        return
    report = analyse_reports(files)
    print(json.dumps(report, ensure_ascii=False, indent=2))


if __name__ == "__main__":
    main()
