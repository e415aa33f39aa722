"""Text PDA format, JSON reports, sweep CSV and atomic file output.

PDA text format::

    # any comment
    # blocks K1 K2 F1 F2
    * * 1
    * 1 *
    1 * *

One row per line, whitespace-separated tokens, ``*`` or a positive
decimal integer.  The optional ``# blocks`` directive records the block
structure of an extended PDA.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .construct import decompose_extended
from .loads import LoadPoint
from .pda import STAR, ExtendedPdaMeta, Grid, Pda, validate_pda

Blocks = tuple[int, int, int, int]


class ParseError(ValueError):
    def __init__(self, line: int, column: int, msg: str):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {msg}")


class RaggedRows(ParseError):
    pass


def parse_pda(text: str) -> tuple[Grid, Blocks | None]:
    rows: list[tuple] = []
    blocks = None
    width = None
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            words = stripped[1:].split()
            if words and words[0] == "blocks":
                try:
                    vals = tuple(int(w) for w in words[1:])
                except ValueError:
                    vals = ()
                if len(vals) != 4 or min(vals) < 1:
                    raise ParseError(ln, 1, "expected '# blocks K1 K2 F1 F2' with positive integers")
                blocks = vals
            continue
        row = []
        col = 0
        for tok in line.split():
            col = line.index(tok, col) + 1
            if tok == STAR:
                row.append(STAR)
            elif tok.isdigit() and int(tok) > 0:
                row.append(int(tok))
            else:
                raise ParseError(ln, col, f"bad token {tok!r}")
            col += len(tok) - 1
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRows(ln, 1, f"row has {len(row)} entries, expected {width}")
        rows.append(tuple(row))
    if not rows:
        raise ParseError(1, 1, "no grid rows")
    return tuple(rows), blocks


def serialize_pda(pda: Pda | Grid, meta: ExtendedPdaMeta | Blocks | None = None) -> str:
    grid = pda.grid if isinstance(pda, Pda) else pda
    lines = []
    if meta is not None:
        k1, k2, f1, f2 = (meta.k1, meta.k2, meta.f1, meta.f2) if isinstance(meta, ExtendedPdaMeta) else meta
        lines.append(f"# blocks {k1} {k2} {f1} {f2}")
    lines += [" ".join(str(e) for e in row) for row in grid]
    return "\n".join(lines) + "\n"


def load_extended(text: str) -> tuple[Pda, ExtendedPdaMeta]:
    """Parse and validate an extended PDA file; the blocks directive is required."""
    grid, blocks = parse_pda(text)
    pda = validate_pda(grid)
    if blocks is None:
        raise ValueError("PDA file has no '# blocks K1 K2 F1 F2' directive")
    _, _, meta = decompose_extended(pda, *blocks)
    return pda, meta


# ----------------------------------------------------------------------------
# rationals and reports


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_field(x) -> dict:
    x = Fraction(x)
    return {"value": fmt_rational(x), "decimal": float(x)}


def load_point_doc(p: LoadPoint) -> dict:
    return {"source": p.source.value, "r": rational_field(p.r), "L": rational_field(p.l)}


def simulation_report_doc(rep, seed: int) -> dict:
    return {
        "config": {
            "params": list(rep.params),
            "blocks": [rep.meta.k1, rep.meta.k2, rep.meta.f1, rep.meta.f2],
            "demands": list(rep.demands),
            "eta": rep.eta,
            "alpha": rep.alpha,
            "n_files": rep.n_files,
            "seed": seed,
        },
        "a": list(rep.a),
        "queries": [list(y) for y in rep.queries],
        "stored_batches": {str(k): list(v) for k, v in rep.stored_batches.items()},
        "measured": {
            "r": rational_field(rep.computation_load),
            "L": rational_field(rep.communication_load),
            "L_per_function": rational_field(rep.communication_load_per_function),
        },
        "predicted": load_point_doc(rep.predicted),
        "loads_match": rep.loads_match,
        "decode_success": {str(k): v for k, v in rep.decode_success.items()},
        "all_decoded": rep.all_decoded,
        "symbol_count": rep.symbol_count,
        "total_bits": rep.total_bits,
        "transcript_sha256": rep.transcript_digest(),
        "symbols": [
            {"sender": x.sender, "t": x.t, "bits": x.bits, "payload": format(x.payload, "x"),
             "xor": x.describe(rep.eta)}
            for x in rep.symbols
        ],
    }


def audit_report_doc(rep) -> dict:
    doc = {
        "kind": rep.kind,
        "trials": rep.trials,
        "significance": rep.significance,
        "skipped": rep.skipped,
        "passed": rep.passed,
    }
    if rep.kind == "uniformity":
        doc["nodes"] = {
            str(j): {
                "chi2": rep.chi2.get(j),
                "p_value": rep.p_values.get(j),
                "histogram": {" ".join(map(str, p)): c for p, c in rep.histograms[j].items()},
            }
            for j in rep.histograms
        }
    else:
        doc["observer"] = rep.observer
        doc["observer_storage"] = list(rep.observer_storage) if rep.observer_storage else None
        doc["tv"] = {str(j): v for j, v in rep.tv.items()}
        doc["max_tv"] = rep.max_tv
        doc["mi_bits"] = rep.mi_bits
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


SWEEP_COLUMNS = ["family", "r1", "r2", "r_num", "r_den", "L_num", "L_den", "F_required", "r_decimal", "L_decimal"]


def sweep_csv(points: Iterable[LoadPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for p in points:
        w.writerow([
            p.source.value, p.r1 if p.r1 is not None else "", p.r2 if p.r2 is not None else "",
            p.r.numerator, p.r.denominator, p.l.numerator, p.l.denominator,
            p.f_required if p.f_required is not None else "",
            repr(float(p.r)), repr(float(p.l)),
        ])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({
            "family": row["family"],
            "r1": int(row["r1"]) if row["r1"] else None,
            "r2": int(row["r2"]) if row["r2"] else None,
            "r": Fraction(int(row["r_num"]), int(row["r_den"])),
            "L": Fraction(int(row["L_num"]), int(row["L_den"])),
            "F_required": int(row["F_required"]) if row["F_required"] else None,
        })
    return rows


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
