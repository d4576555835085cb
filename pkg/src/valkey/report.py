"""Structured run reports.

Every CLI command emits one JSON document with the fields ``operation``,
``inputs`` (canonical strings), ``result``, ``certificates``,
``grid-parameters``, ``budget`` and ``seed``.  Exact values are serialised as
strings such as ``"3/2"`` and ``"inf"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .grid import Grid
from .poly import Poly
from .values import Infinity, format_value

__all__ = ["make_report", "to_jsonable", "dumps", "render_text"]


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, (Fraction, Infinity)):
        return format_value(obj)
    if isinstance(obj, Poly):
        return str(obj)
    if isinstance(obj, Grid):
        return obj.describe()
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, Poly) else str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def make_report(
    operation: str,
    inputs: dict,
    result: Any,
    certificates: Any = None,
    grid: Grid | None = None,
    budget: int | None = None,
    seed: int | None = None,
) -> dict:
    return {
        "operation": operation,
        "inputs": to_jsonable(inputs),
        "result": to_jsonable(result),
        "certificates": to_jsonable(certificates) if certificates is not None else {},
        "grid-parameters": grid.describe() if grid is not None else None,
        "budget": budget,
        "seed": seed,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)


def _flatten(prefix: str, obj: Any, out: list[str]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        shown = ", ".join(map(str, obj)) if isinstance(obj, list) else obj
        out.append(f"{prefix}: {shown}")


def render_text(report: dict) -> str:
    """Human summary: operation, inputs and result as ``key: value`` lines."""
    lines = [f"operation: {report['operation']}"]
    _flatten("input", report.get("inputs", {}), lines)
    _flatten("result", report.get("result"), lines)
    if report.get("seed") is not None:
        lines.append(f"seed: {report['seed']}")
    return "\n".join(lines)
