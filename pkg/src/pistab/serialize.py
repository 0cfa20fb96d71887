"""Deterministic JSON, CSV and SVG emission and the matching readers.

Floats are written with ``repr`` (shortest round-trip form) and every
container is emitted in a fixed order, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .grading_flow import Flag, FlowTrace, Violation
from .stability import Status, Verdict
from .walls import SpectrumEntry, WallScan


def format_complex(z: complex) -> str:
    return f"{z.real!r},{z.imag!r}"


def format_charge(q: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in q)


def parse_charge(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",")) if text else ()


def to_jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return format_complex(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_json(path: Path, obj: Any) -> Path:
    return write_text(path, dumps(obj))


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


WALL_HEADER = ("s", "charge", "subcharge", "residual")
FLOW_HEADER = ("s", "phi_E", "phi_F", "degree")


def walls_csv(scan: WallScan) -> str:
    return csv_text(WALL_HEADER, ((s, format_charge(q), format_charge(sub), r)
                                  for s, q, sub, r in scan.rows()))


def read_walls_csv(text: str) -> list[tuple[float, tuple[int, ...], tuple[int, ...], float]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != WALL_HEADER:
        raise ValueError("not a wall table")
    return [(float(s), parse_charge(q), parse_charge(sub), float(r)) for s, q, sub, r in rows[1:]]


def flow_csv(trace: FlowTrace) -> str:
    return csv_text(FLOW_HEADER, zip(trace.s, trace.phase_source, trace.phase_target, trace.degree))


def read_flow_csv(text: str) -> FlowTrace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != FLOW_HEADER:
        raise ValueError("not a flow trace")
    cols = list(zip(*[[float(x) for x in r] for r in rows[1:]])) or [(), (), (), ()]
    return FlowTrace(*(list(c) for c in cols))


def verdict_from_json(data: dict) -> Verdict:
    phases = {k: _read_number(v) for k, v in data.get("phases", {}).items()}
    witness = data.get("witness")
    if witness is not None:
        witness = tuple(_read_number(v) for v in witness)
    return Verdict(Status(data["verdict"]), witness, phases)


def _read_number(v):
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return v


def spectrum_from_json(data: list[dict]) -> list[SpectrumEntry]:
    out = []
    for e in data:
        failed = e["verdict"] == "Failed"
        out.append(SpectrumEntry(
            charge=tuple(e["charge"]), dims=tuple(e["dims"]),
            verdict=None if failed else Status(e["verdict"]),
            phase=e.get("phase"),
            witness=tuple(e["witness"]) if e.get("witness") is not None else None,
            error=e.get("error"), message=e.get("message"), seed=e.get("seed")))
    return out


def flag_to_json(f: Flag) -> dict:
    return {"index": f.index, "flag": f.kind.value, "start": f.start, "end": f.end}


def flag_from_json(d: dict) -> Flag:
    return Flag(d["index"], Violation(d["flag"]), d["start"], d["end"])
