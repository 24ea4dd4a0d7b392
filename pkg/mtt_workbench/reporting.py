"""
Tabular summaries of check and acceptance verdicts
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

PASS = "pass"
FAIL = "fail"

COLUMNS = ["item", "verdict", "detail"]


@dataclass
class Verdict:
    item: str
    passed: bool
    detail: str = ""

    @property
    def verdict(self) -> str:
        return PASS if self.passed else FAIL


def verdict_frame(records: Iterable[Verdict]) -> pd.DataFrame:
    """
    Build a DataFrame with one row per verdict.

    Args:
        records: Verdicts in report order

    Returns:
        DataFrame with columns item, verdict, detail
    """
    rows = [{"item": r.item, "verdict": r.verdict, "detail": r.detail} for r in records]
    return pd.DataFrame(rows, columns=COLUMNS)


def calculate_percentage(value: float, total: float) -> float:
    """
    Calculate percentage safely.

    Args:
        value: Part value
        total: Total value

    Returns:
        Percentage (0-100) rounded to one decimal
    """
    if total == 0 or pd.isna(total) or pd.isna(value):
        return 0.0
    return round((value / total) * 100, 1)


def pass_rate(df: pd.DataFrame) -> float:
    if df.empty:
        return 0.0
    return calculate_percentage(int((df["verdict"] == PASS).sum()), len(df))


def summarize(records: Iterable[Verdict]) -> str:
    """Fixed-width table of the verdicts followed by the pass rate line."""
    df = verdict_frame(records)
    if df.empty:
        return "no checks run"
    table = df.to_string(index=False, max_colwidth=70)
    passed = int((df["verdict"] == PASS).sum())
    return f"{table}\n\n{passed}/{len(df)} passed ({pass_rate(df)}%)"


def frame_rows(df: pd.DataFrame, columns: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
    """DataFrame rows as plain dictionaries for JSON output."""
    columns = list(columns) if columns is not None else list(df.columns)
    return df[[col for col in columns if col in df.columns]].to_dict(orient="records")


def growth_frame(rows: Iterable[Any]) -> pd.DataFrame:
    """Rows of subtree_growth as a DataFrame (input rendered as text)."""
    return pd.DataFrame(
        [
            {
                "input": str(r.source),
                "size": r.size,
                "output_size": r.output_size,
                "distinct_subtrees": r.distinct_subtrees,
                "max_distinct_arguments": r.max_distinct_arguments,
            }
            for r in rows
        ],
        columns=["input", "size", "output_size", "distinct_subtrees", "max_distinct_arguments"],
    )
