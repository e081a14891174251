"""Table emission with per-column precision policies.

Rows are dicts of raw values. A policy maps column names to format kinds and
is applied at emission time only, so computations never see rounded values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DomainError

__all__ = [
    "FORMATTERS",
    "format_value",
    "emit_table",
    "parse_table",
    "sig",
    "pct",
    "odds_1dp",
]

THRESHOLD_VALUES = (4.75, 16.0)


def _trim(s: str) -> str:
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def sig(x: float, digits: int = 3) -> str:
    """``digits`` significant figures with trailing zeros removed, half away from zero."""
    if x == 0:
        return "0"
    mag = math.floor(math.log10(abs(x)))
    dec = max(digits - 1 - mag, 0)
    return fixed(x, dec)


def fixed(x: float, decimals: int) -> str:
    """Half-away-from-zero rounding to ``decimals`` places, trailing zeros removed.

    A relative nudge keeps values like ``2.375`` from rounding down because of
    their binary representation.
    """
    scale = 10.0 ** decimals
    v = abs(x) * scale
    v = math.floor(v * (1.0 + 1e-12) + 0.5)
    s = f"{math.copysign(v / scale, x):.{decimals}f}"
    return _trim(s)


def pct(p: float, decimals: int = 1) -> str:
    return fixed(100.0 * p, decimals)


def odds_1dp(x: float, keep: Sequence[float] = THRESHOLD_VALUES) -> str:
    """One decimal, except values equal to an evidence threshold print as that threshold."""
    for k in keep:
        if math.isclose(x, k, rel_tol=1e-9):
            return _trim(repr(float(k)))
    return fixed(x, 1)


FORMATTERS: dict[str, Callable[[float], str]] = {
    "int": lambda x: str(int(x)),
    "ceil": lambda x: str(int(math.ceil(x - 1e-9))),
    "pct0": lambda x: pct(x, 0),
    "pct1": lambda x: pct(x, 1),
    "sig3": lambda x: sig(x, 3),
    "odds1": odds_1dp,
    "dec3": lambda x: fixed(x, 3),
    "dec4": lambda x: fixed(x, 4),
    "dec6": lambda x: fixed(x, 6),
    "raw": lambda x: repr(x) if isinstance(x, float) else str(x),
}


def format_value(value, kind: str | None) -> str:
    """Format one cell. Strings and None pass through unchanged."""
    if value is None:
        return ""
    if isinstance(value, str) or kind is None:
        return value if isinstance(value, str) else FORMATTERS["raw"](value)
    try:
        return FORMATTERS[kind](value)
    except KeyError:
        raise DomainError(f"unknown format kind {kind!r}") from None


def _columns(rows: Sequence[Mapping], columns: Sequence[str] | None) -> list[str]:
    if columns is not None:
        return list(columns)
    if not rows:
        return []
    cols = list(rows[0].keys())
    for r in rows[1:]:
        if list(r.keys()) != cols:
            raise DomainError("rows must share the same columns in the same order")
    return cols


def emit_table(
    rows: Iterable[Mapping],
    fmt: str = "csv",
    policy: Mapping[str, str] | None = None,
    columns: Sequence[str] | None = None,
) -> bytes:
    """Serialize rows as CSV or JSON.

    Args:
        rows: Homogeneous dict rows.
        fmt: ``"csv"`` or ``"json"``.
        policy: Column to format-kind map. Without a policy CSV cells use
            ``repr`` for floats and JSON keeps native values, so JSON output
            parses back to the input rows.
        columns: Column order; required for a header when ``rows`` is empty.

    Returns:
        UTF-8 bytes with ``\\n`` line endings.
    """
    rows = list(rows)
    cols = _columns(rows, columns)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if cols:
            w.writerow(cols)
        for r in rows:
            w.writerow([format_value(r.get(c), (policy or {}).get(c)) for c in cols])
        return buf.getvalue().encode()
    if fmt == "json":
        out = []
        for r in rows:
            rec = {}
            for c in cols:
                v = r.get(c)
                if policy and c in policy and isinstance(v, (int, float)) and not isinstance(v, bool):
                    s = format_value(v, policy[c])
                    v = int(s) if s.lstrip("-").isdigit() else float(s)
                rec[c] = v
            out.append(rec)
        return (json.dumps(out, indent=2) + "\n").encode()
    raise DomainError(f"unknown output format {fmt!r}; expected csv or json")


def parse_table(data: bytes, fmt: str = "json") -> list[dict]:
    """Inverse of :func:`emit_table` for JSON; CSV cells come back as strings."""
    text = data.decode()
    if fmt == "json":
        return json.loads(text)
    if fmt == "csv":
        return [dict(r) for r in csv.DictReader(io.StringIO(text))]
    raise DomainError(f"unknown output format {fmt!r}; expected csv or json")
