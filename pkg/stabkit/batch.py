"""
Batch weight-enumerator extraction over the fixture list.

Each fixture is run through the oracle pipeline and, unless disabled,
checked against brute-force enumeration. The report is written as
{"updated_at": ..., "data": [...]}.
"""

from __future__ import annotations

import datetime
import logging
from pathlib import Path
from typing import Any

from stabkit.errors import StabkitError
from stabkit.loader import load_classical_code, load_fixture_list
from stabkit.reduction import brute_force_we, run_reduction
from stabkit.report import write_json

logger = logging.getLogger(__name__)


def run_fixture(path: Path, verify: bool = True) -> dict[str, Any]:
    code = load_classical_code(path)
    row: dict[str, Any] = {"name": path.stem, "n": code.n, "k": code.k}

    try:
        result = run_reduction(code)
    except StabkitError as exc:
        logger.error("%s: %s", path.name, exc)
        row.update(we=None, brute=None, match=False, queries=None, error=str(exc))
        return row

    row["we"] = list(result.we)
    row["queries"] = result.transcript.total_queries
    row["refinement_rounds"] = result.transcript.refinement_rounds

    if verify:
        expected = list(brute_force_we(code))
        row["brute"] = expected
        row["match"] = row["we"] == expected
    else:
        row["brute"] = None
        row["match"] = True
    return row


def run_fixtures(list_path: str | Path, output_file: str | Path, verify: bool = True) -> list[dict[str, Any]]:
    print("🚀 weight-enumerator extraction over the fixture list...")

    paths = load_fixture_list(list_path)
    if not paths:
        print(f"⚠️ no fixtures listed in {list_path}")

    results = []
    for path in paths:
        row = run_fixture(path, verify=verify)
        if row["match"]:
            print(f"✅ {row['name']} [{row['n']},{row['k']}] WE={row['we']} ({row['queries']} queries)")
        else:
            print(f"❌ {row['name']} [{row['n']},{row['k']}] WE={row['we']} brute={row['brute']}")
        results.append(row)

    output = {
        "updated_at": datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
        "data": results,
    }
    write_json(output_file, output)

    failed = sum(1 for r in results if not r["match"])
    if failed:
        print(f"⚠️ {failed} of {len(results)} fixtures failed, report at {output_file}")
    else:
        print(f"🎉 {len(results)} fixtures done, report at {output_file}")
    return results
