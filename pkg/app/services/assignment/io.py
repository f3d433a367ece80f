"""
Plain-text cost-matrix format.

First line ``P M``, then ``P`` lines of ``M+2`` space-separated positive
decimals ordered ``j = -1, 0, 1, ..., M``. Blank lines and ``#`` comments are
ignored.
"""

from pathlib import Path
from typing import Union

import numpy as np

from app.core.exceptions import DomainError, ReportWriteError
from app.services.assignment.core import CostMatrix


def parse_cost_matrix(text: str) -> CostMatrix:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise DomainError("empty cost-matrix text")
    try:
        P, M = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise DomainError(f"header must be 'P M', got {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != P:
        raise DomainError(f"expected {P} rows, found {len(rows)}")
    try:
        values = np.array([[float(tok) for tok in row.split()] for row in rows], dtype=float)
    except ValueError as exc:
        raise DomainError(f"non-numeric cost-matrix entry: {exc}") from exc
    if values.shape != (P, M + 2):
        raise DomainError(f"expected {P} rows of {M + 2} entries, got shape {values.shape}")
    return CostMatrix(values)


def format_cost_matrix(eta: CostMatrix) -> str:
    out = [f"{eta.P} {eta.M}"]
    out.extend(" ".join(repr(float(v)) for v in row) for row in eta.values)
    return "\n".join(out) + "\n"


def read_cost_matrix(path: Union[str, Path]) -> CostMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read cost matrix {path}: {exc}") from exc
    return parse_cost_matrix(text)


def write_cost_matrix(eta: CostMatrix, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(format_cost_matrix(eta), encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(f"cannot write cost matrix to {target}: {exc}") from exc
    return target
