from __future__ import annotations

import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import pandas as pd

from .exact_arith import RationalPolynomial, format_polynomial, format_rational
from .root_analysis import ComplexRoot

logger = logging.getLogger(__name__)

ROOTLOCUS_COLUMNS = ["source", "d", "k", "re", "im", "is_real", "on_critical_line"]


def to_jsonable(obj: Any) -> Any:
    """Rationals become "p/q" strings, polynomials their text form, tuples lists."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, RationalPolynomial):
        return format_polynomial(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    return obj


def dumps_report(report: Dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, fixed indentation, shortest round-trip doubles."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False)


def dumps_line(record: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(record), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def write_text(text: str, out: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Write to the --out path when given, else to the stream (stdout)."""
    if out:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
            if not text.endswith("\n"):
                f.write("\n")
        logger.info("wrote %s", out)
    else:
        print(text, file=stream)


# -- tables ---------------------------------------------------------------------

def roots_frame(roots: Sequence[ComplexRoot]) -> pd.DataFrame:
    return pd.DataFrame([{"re": r.re, "im": r.im} for r in roots], columns=["re", "im"])


def key_value_table(pairs: Dict[str, Any]) -> str:
    df = pd.DataFrame(
        [{"field": k, "value": _cell(v)} for k, v in pairs.items()],
        columns=["field", "value"],
    )
    return df.to_string(index=False)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, RationalPolynomial):
        return format_polynomial(v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def render_text(title: str, summary: Dict[str, Any], roots: Optional[Sequence[ComplexRoot]] = None) -> str:
    parts = [title, "", key_value_table(summary)]
    if roots:
        parts += ["", "roots:", roots_frame(roots).to_string(index=False, float_format=lambda x: f"{x:.12g}")]
    return "\n".join(parts)


def scan_table(records: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """One row per graph record (as produced by GraphRecord.as_dict)."""
    rows = []
    for r in records:
        cert = r.get("certificate") or {}
        rows.append({
            "n": r["graph"]["n_vertices"],
            "edges": " ".join(f"{i}-{j}" for i, j in r["graph"]["edges"]),
            "delta": _cell(r.get("delta")),
            "gorenstein": _cell(r.get("gorenstein")),
            "critical_line": _cell(r.get("critical_line")),
            "certificate": cert.get("verdict", ""),
            "error": r.get("error") or "",
        })
    return pd.DataFrame(rows, columns=["n", "edges", "delta", "gorenstein", "critical_line", "certificate", "error"])


# -- root locus ------------------------------------------------------------------

def rootlocus_rows(
    source: str,
    d: int,
    k: Optional[int],
    roots: Iterable[ComplexRoot],
    tol: float,
) -> List[Dict[str, Any]]:
    out = []
    for r in roots:
        out.append({
            "source": source,
            "d": d,
            "k": "" if k is None else k,
            "re": r.re,
            "im": r.im,
            "is_real": abs(r.im) <= tol,
            "on_critical_line": abs(r.re + 0.5) <= tol,
        })
    return out


def rootlocus_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=ROOTLOCUS_COLUMNS)


def write_rootlocus_csv(rows: List[Dict[str, Any]], out: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Header `source,d,k,re,im,is_real,on_critical_line`; an empty row list gives the header only."""
    df = rootlocus_frame(rows)
    if out:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
        df.to_csv(out, index=False, float_format="%.17g")
        logger.info("wrote %d root-locus rows to %s", len(df), out)
    else:
        print(df.to_csv(index=False, float_format="%.17g"), end="", file=stream)


# -- scan -------------------------------------------------------------------------

def scan_summary(records: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    total = len(records)
    errors = sum(1 for r in records if r.get("error"))
    on_line = sum(1 for r in records if r.get("critical_line") is True)
    off_line = [r["graph"]["edges"] for r in records if r.get("critical_line") is False]
    return {
        "records": total,
        "errors": errors,
        "critical_line": on_line,
        "off_critical_line": len(off_line),
        "off_critical_line_graphs": off_line,
    }
