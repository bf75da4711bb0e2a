"""Report serialization: JSON lines with a header, one record per character and a summary.

Format (one JSON object per line, keys sorted, no whitespace):

    {"format": "cmtheta-report", "format_version": 1, "kind": ..., "instance": {...}, "provenance": {...}}
    {"row": {"n": ..., "char_index": ..., "eps": ..., "v_ell": ..., ...}}   (sorted by n, char_index)
    {"summary": {...}}

Floats are written with repr, so dump(load(text)) == text.
"""

from __future__ import annotations

import json

from .cache import canonical_json

FORMAT = "cmtheta-report"
FORMAT_VERSION = 1


class ReportFormatError(ValueError):
    pass


def dump_report(rep) -> str:
    lines = [canonical_json({
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "kind": rep.kind,
        "instance": rep.instance,
        "provenance": rep.provenance,
    })]
    for r in rep.sorted_rows():
        lines.append(canonical_json({"row": r.to_dict()}))
    lines.append(canonical_json({"summary": rep.summary}))
    return "\n".join(lines) + "\n"


def load_report(text: str):
    from .theta import SweepReport, SweepRow
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ReportFormatError("empty report")
    head = json.loads(lines[0])
    if head.get("format") != FORMAT or head.get("format_version") != FORMAT_VERSION:
        raise ReportFormatError("not a cmtheta report")
    rows, summary = [], None
    for ln in lines[1:]:
        rec = json.loads(ln)
        if "row" in rec:
            rows.append(SweepRow.from_dict(rec["row"]))
        elif "summary" in rec:
            summary = rec["summary"]
        else:
            raise ReportFormatError(f"unknown record {ln[:40]}")
    if summary is None:
        raise ReportFormatError("missing summary")
    return SweepReport(head["kind"], head["instance"], rows, summary, head["provenance"])


def format_table(rep) -> str:
    """Human summary: one line per row, then the summary keys."""
    inst = rep.instance
    title = f"{rep.kind} D={inst.get('D')} p={inst.get('p')} ell={inst.get('ell')} c={inst.get('c')} chi0={inst.get('chi0')}"
    out = [title, f"{'n':>3} {'idx':>5} {'ord':>5} {'eps':>4} {'pred':>4} {'v_ell':>8} {'ratio':>22}"]
    for r in rep.sorted_rows():
        ratio = f"{r.ratio:.15g}" if r.ratio is not None else "-"
        out.append(f"{r.n:>3} {r.char_index:>5} {r.order:>5} {r.eps:>4} {r.predicted:>4} {r.v_ell:>8} {ratio:>22}")
    for k in sorted(rep.summary):
        out.append(f"{k}: {rep.summary[k]}")
    return "\n".join(out) + "\n"
