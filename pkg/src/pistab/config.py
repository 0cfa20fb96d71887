"""Run configuration: JSON documents, bundled presets and validation.

Every error raised here is a :class:`ConfigError` carrying a JSON-pointer
style path to the offending key, so the CLI can report where a config went
wrong before any computation starts.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .central_charge import ModuliPath, PeriodModel, PolynomialPeriods, TabulatedPeriods
from .errors import ConfigError, PistabError
from .orbifold import OrbifoldSpec, Quiver, build_mckay_quiver

PRESETS: dict[str, dict] = {
    "flat": {
        "orbifold": {"order": 1, "weights": [0, 0, 0]},
        "periods": {"rank": 1, "components": [["1,0"]]},
        "charge_map": [[1]],
        "point": "0,1",
        "cap": [3],
    },
    "c3z3": {
        "orbifold": {"order": 3, "weights": [1, 1, 1]},
        "periods": {"rank": 3, "components": [["1,0"], ["0,0", "1,0"], ["0,0", "0,0", "0.5,0"]]},
        "charge_map": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        "point": "0,10",
        "cap": [1, 1, 1],
    },
    "two-charge": {
        "periods": {"rank": 2, "components": [["1,0"], ["0,0", "1,0"]]},
        "point": "0,1",
        "charge": [1, 1],
        "subcharges": [[1, 0]],
        "path": {"kind": "arc", "center": "0,0", "radius": 1, "start_angle": "pi/2", "end_angle": "0"},
        "flow_path": {"kind": "circle", "center": "0,0", "radius": 1, "turns": 1},
        "source": [1, 0],
        "target": [0, 1],
        "degree": 0,
        "grid": {"rect": [-2, 2, -2, 2], "resolution": [32, 32]},
    },
}

KNOWN_KEYS = {
    "preset", "orbifold", "quiver", "periods", "charge_map", "point", "path", "flow_path", "grid",
    "charge", "subcharges", "source", "target", "degree", "theta", "rep", "chern", "subobjects",
    "mmms", "cap", "tol", "seed", "threads", "retries", "samples", "mode",
}


@dataclass
class RunConfig:
    raw: dict
    orbifold: OrbifoldSpec | None = None
    quiver: Quiver | None = None
    periods: PeriodModel | None = None
    charge_map: list[list[int]] | None = None
    point: complex | None = None
    path: ModuliPath | None = None
    flow_path: ModuliPath | None = None
    grid: dict | None = None
    charge: tuple[int, ...] | None = None
    subcharges: list[tuple[int, ...]] | None = None
    source: tuple[int, ...] | None = None
    target: tuple[int, ...] | None = None
    degree: float = 0.0
    theta: list[Fraction] | None = None
    rep: dict | None = None
    chern: list[Fraction] | None = None
    subobjects: list[list[Fraction]] = field(default_factory=list)
    mmms: dict | None = None
    cap: tuple[int, ...] | None = None
    tol: float = 1e-9
    seed: int = 0
    threads: int = 1
    retries: int = 8
    samples: int = 256

    @property
    def basis_rank(self) -> int | None:
        return self.periods.rank if self.periods is not None else None


# ---------------------------------------------------------------------------
# Scalar parsers
# ---------------------------------------------------------------------------

_ANGLE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_complex(value: Any, path: str) -> complex:
    """``"re,im"``, ``[re, im]`` or a real number."""
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, (int, float)):
            return complex(float(value), 0.0)
        if isinstance(value, str):
            parts = value.split(",")
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        if isinstance(value, list) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"expected a complex number as 're,im', got {value!r}", path, "E_CONFIG_COMPLEX")


def parse_angle(value: Any, path: str) -> float:
    """A real number or a multiple of pi such as ``"pi/2"`` or ``"-3*pi/4"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if m:
            coef = m.group(1)
            c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
            den = float(m.group(2)) if m.group(2) else 1.0
            return c * math.pi / den
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"expected an angle, got {value!r}", path, "E_CONFIG_ANGLE")


def parse_int_vector(value: Any, path: str, length: int | None = None) -> tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, list):
        raise ConfigError(f"expected a list of integers, got {value!r}", path, "E_CONFIG_TYPE")
    out = []
    for i, v in enumerate(value):
        try:
            if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                raise ValueError
            out.append(int(v))
        except (TypeError, ValueError):
            raise ConfigError(f"expected an integer, got {v!r}", f"{path}/{i}", "E_CONFIG_TYPE") from None
    if length is not None and len(out) != length:
        raise ConfigError(f"expected {length} entries, got {len(out)}", path, "E_CONFIG_LENGTH")
    return tuple(out)


def parse_rational(value: Any, path: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, float):
            return Fraction(value)
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rational number, got {value!r}", path, "E_CONFIG_TYPE") from None


def _number(value: Any, path: str, kind=float, minimum=None):
    try:
        if isinstance(value, bool):
            raise TypeError
        x = kind(value)
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(f"expected a {kind.__name__}, got {value!r}", path, "E_CONFIG_TYPE") from None
    if minimum is not None and x < minimum:
        raise ConfigError(f"must be at least {minimum}, got {x}", path, "E_CONFIG_RANGE")
    return x


# ---------------------------------------------------------------------------
# Structured pieces
# ---------------------------------------------------------------------------

def parse_periods(data: Any, path: str = "/periods") -> PeriodModel:
    if not isinstance(data, dict):
        raise ConfigError("period model must be an object", path, "E_CONFIG_TYPE")
    if "components" in data:
        comps = data["components"]
        if not isinstance(comps, list) or not comps:
            raise ConfigError("components must be a non-empty list", f"{path}/components", "E_CONFIG_TYPE")
        parsed = []
        for i, comp in enumerate(comps):
            if not isinstance(comp, list):
                raise ConfigError("each component is a coefficient list", f"{path}/components/{i}",
                                  "E_CONFIG_TYPE")
            parsed.append([parse_complex(c, f"{path}/components/{i}/{j}") for j, c in enumerate(comp)])
        if "rank" in data and _number(data["rank"], f"{path}/rank", int) != len(parsed):
            raise ConfigError(f"rank {data['rank']} but {len(parsed)} components", f"{path}/rank",
                              "E_CONFIG_RANK")
        return PolynomialPeriods(parsed, data.get("description", ""))
    if "samples" in data:
        samples = data["samples"]
        if not isinstance(samples, list):
            raise ConfigError("samples must be a list of [s, [periods]]", f"{path}/samples", "E_CONFIG_TYPE")
        pts = []
        for i, row in enumerate(samples):
            if not (isinstance(row, list) and len(row) == 2 and isinstance(row[1], list)):
                raise ConfigError("each sample is [s, [periods]]", f"{path}/samples/{i}", "E_CONFIG_TYPE")
            pts.append((_number(row[0], f"{path}/samples/{i}/0"),
                        [parse_complex(v, f"{path}/samples/{i}/1/{j}") for j, v in enumerate(row[1])]))
        try:
            model = TabulatedPeriods(pts, data.get("description", ""))
        except PistabError as exc:
            raise ConfigError(str(exc), f"{path}/samples", "E_CONFIG_PERIODS") from None
        if "rank" in data and _number(data["rank"], f"{path}/rank", int) != model.rank:
            raise ConfigError("rank does not match the sample vectors", f"{path}/rank", "E_CONFIG_RANK")
        return model
    raise ConfigError("period model needs 'components' or 'samples'", path, "E_CONFIG_PERIODS")


def parse_path(data: Any, path: str) -> ModuliPath:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("a path is an object with a 'kind'", path, "E_CONFIG_PATH")
    kind = data["kind"]

    def need(key):
        if key not in data:
            raise ConfigError(f"{kind} path needs '{key}'", f"{path}/{key}", "E_CONFIG_MISSING")
        return data[key]

    if kind == "segment":
        return ModuliPath.segment(parse_complex(need("start"), f"{path}/start"),
                                  parse_complex(need("end"), f"{path}/end"))
    if kind == "arc":
        return ModuliPath.arc(parse_complex(need("center"), f"{path}/center"),
                              _number(need("radius"), f"{path}/radius", float, 0.0),
                              parse_angle(need("start_angle"), f"{path}/start_angle"),
                              parse_angle(need("end_angle"), f"{path}/end_angle"))
    if kind == "circle":
        return ModuliPath.circle(parse_complex(need("center"), f"{path}/center"),
                                 _number(need("radius"), f"{path}/radius", float, 0.0),
                                 _number(data.get("turns", 1), f"{path}/turns", int))
    if kind == "polyline":
        pts = need("points")
        if not isinstance(pts, list) or len(pts) < 2:
            raise ConfigError("polyline needs at least two points", f"{path}/points", "E_CONFIG_PATH")
        return ModuliPath.polyline([parse_complex(p, f"{path}/points/{i}") for i, p in enumerate(pts)])
    if kind == "parameter":
        return ModuliPath.parameter()
    raise ConfigError(f"unknown path kind {kind!r}", f"{path}/kind", "E_CONFIG_PATH")


def parse_grid(data: Any, path: str = "/grid") -> dict:
    if not isinstance(data, dict):
        raise ConfigError("grid must be an object", path, "E_CONFIG_TYPE")
    rect = data.get("rect")
    if not isinstance(rect, list) or len(rect) != 4:
        raise ConfigError("rect is [x0, x1, y0, y1]", f"{path}/rect", "E_CONFIG_GRID")
    rect = [_number(v, f"{path}/rect/{i}") for i, v in enumerate(rect)]
    if not (rect[0] < rect[1] and rect[2] < rect[3]):
        raise ConfigError("rect must have x0 < x1 and y0 < y1", f"{path}/rect", "E_CONFIG_GRID")
    res = data.get("resolution", 32)
    if isinstance(res, list):
        if len(res) != 2:
            raise ConfigError("resolution is n or [nx, ny]", f"{path}/resolution", "E_CONFIG_GRID")
        res = tuple(_number(v, f"{path}/resolution/{i}", int, 1) for i, v in enumerate(res))
    else:
        n = _number(res, f"{path}/resolution", int, 1)
        res = (n, n)
    return {"rect": tuple(rect), "resolution": res}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        out[k] = copy.deepcopy(v)
    return out


def load_document(path: str | Path | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", "/", "E_CONFIG_IO") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "/",
                          "E_CONFIG_SYNTAX") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", "/", "E_CONFIG_TYPE")
    return data


def build_config(doc: dict) -> RunConfig:
    """Resolve the preset, parse every key and check mutual consistency."""
    unknown = sorted(set(doc) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", f"/{unknown[0]}", "E_CONFIG_UNKNOWN_KEY")
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}", "/preset",
                              "E_CONFIG_PRESET")
        doc = _merge(PRESETS[name], doc)
    cfg = RunConfig(raw=doc)

    if "orbifold" in doc:
        o = doc["orbifold"]
        if not isinstance(o, dict):
            raise ConfigError("orbifold is {order, weights}", "/orbifold", "E_CONFIG_TYPE")
        order = _number(o.get("order"), "/orbifold/order", int)
        weights = parse_int_vector(o.get("weights"), "/orbifold/weights", 3)
        try:
            cfg.orbifold = OrbifoldSpec(order, weights)
        except PistabError as exc:
            raise ConfigError(str(exc), "/orbifold", exc.code) from None
        cfg.quiver = build_mckay_quiver(cfg.orbifold)
    if "quiver" in doc:
        if cfg.quiver is not None:
            raise ConfigError("give either an orbifold or an explicit quiver", "/quiver", "E_CONFIG_CONFLICT")
        try:
            cfg.quiver = Quiver.from_json(doc["quiver"])
        except (PistabError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid quiver: {exc}", "/quiver", "E_CONFIG_QUIVER") from None

    if "periods" in doc:
        cfg.periods = parse_periods(doc["periods"])
    m = cfg.basis_rank
    nodes = cfg.quiver.node_count if cfg.quiver is not None else None

    if "charge_map" in doc:
        cm = doc["charge_map"]
        if not isinstance(cm, list) or not cm:
            raise ConfigError("charge_map is a non-empty integer matrix", "/charge_map", "E_CONFIG_TYPE")
        rows = [list(parse_int_vector(r, f"/charge_map/{i}")) for i, r in enumerate(cm)]
        if len({len(r) for r in rows}) != 1:
            raise ConfigError("charge_map rows differ in length", "/charge_map", "E_CONFIG_SHAPE")
        if nodes is not None and len(rows) != nodes:
            raise ConfigError(f"charge_map has {len(rows)} rows, quiver has {nodes} nodes", "/charge_map",
                              "E_CONFIG_SHAPE")
        if m is not None and len(rows[0]) != m:
            raise ConfigError(f"charge_map has {len(rows[0])} columns, period rank is {m}", "/charge_map",
                              "E_CONFIG_SHAPE")
        cfg.charge_map = rows

    if "point" in doc:
        cfg.point = parse_complex(doc["point"], "/point")
    for key in ("path", "flow_path"):
        if key in doc:
            setattr(cfg, key, parse_path(doc[key], f"/{key}"))
    if "grid" in doc:
        cfg.grid = parse_grid(doc["grid"])

    for key in ("charge", "source", "target"):
        if key in doc:
            setattr(cfg, key, parse_int_vector(doc[key], f"/{key}", m))
    if "subcharges" in doc:
        subs = doc["subcharges"]
        if not isinstance(subs, list):
            raise ConfigError("subcharges is a list of charges", "/subcharges", "E_CONFIG_TYPE")
        cfg.subcharges = [parse_int_vector(s, f"/subcharges/{i}", m) for i, s in enumerate(subs)]
    if "degree" in doc:
        cfg.degree = _number(doc["degree"], "/degree")

    if "theta" in doc:
        th = doc["theta"]
        if not isinstance(th, list):
            raise ConfigError("theta is a list of rationals", "/theta", "E_CONFIG_TYPE")
        if nodes is not None and len(th) != nodes:
            raise ConfigError(f"theta has {len(th)} entries, quiver has {nodes} nodes", "/theta",
                              "E_CONFIG_LENGTH")
        cfg.theta = [parse_rational(x, f"/theta/{i}") for i, x in enumerate(th)]
    if "rep" in doc:
        if not isinstance(doc["rep"], dict):
            raise ConfigError("rep is {dims, maps}", "/rep", "E_CONFIG_TYPE")
        cfg.rep = doc["rep"]
    if "chern" in doc:
        cfg.chern = _chern(doc["chern"], "/chern")
    if "subobjects" in doc:
        subs = doc["subobjects"]
        if not isinstance(subs, list):
            raise ConfigError("subobjects is a list of Chern vectors", "/subobjects", "E_CONFIG_TYPE")
        cfg.subobjects = [_chern(s, f"/subobjects/{i}") for i, s in enumerate(subs)]
    if "mmms" in doc:
        cfg.mmms = _mmms(doc["mmms"])

    if "cap" in doc:
        cfg.cap = parse_int_vector(doc["cap"], "/cap", nodes)
        if any(c < 0 for c in cfg.cap):
            raise ConfigError("cap entries must be non-negative", "/cap", "E_CONFIG_RANGE")
    if "tol" in doc:
        cfg.tol = _number(doc["tol"], "/tol", float, 0.0)
    if "seed" in doc:
        cfg.seed = _number(doc["seed"], "/seed", int)
    if "threads" in doc:
        cfg.threads = _number(doc["threads"], "/threads", int, 1)
    if "retries" in doc:
        cfg.retries = _number(doc["retries"], "/retries", int, 1)
    if "samples" in doc:
        cfg.samples = _number(doc["samples"], "/samples", int, 2)
    return cfg


def _chern(value: Any, path: str) -> list[Fraction]:
    if not isinstance(value, list) or not 1 <= len(value) <= 4:
        raise ConfigError("Chern data is [ch0, ..., ch3] (1 to 4 entries)", path, "E_CONFIG_CHERN")
    return [parse_rational(x, f"{path}/{i}") for i, x in enumerate(value)]


def _mmms(value: Any) -> dict:
    if not isinstance(value, dict):
        raise ConfigError("mmms is {omega, theta, d, ls}", "/mmms", "E_CONFIG_TYPE")
    out = {}
    for key in ("omega", "ls"):
        if key not in value:
            raise ConfigError(f"mmms needs '{key}'", f"/mmms/{key}", "E_CONFIG_MISSING")
        out[key] = parse_rational(value[key], f"/mmms/{key}")
        if out[key] <= 0:
            raise ConfigError(f"{key} must be positive", f"/mmms/{key}", "E_CONFIG_RANGE")
    d = _number(value.get("d", 1), "/mmms/d", int)
    if d not in (1, 2, 3):
        raise ConfigError("d must be 1, 2 or 3", "/mmms/d", "E_CONFIG_RANGE")
    out["d"] = d
    th = value.get("theta", 0)
    if isinstance(th, dict):
        # exact rotation given by its cosine and sine
        out["rotation"] = (parse_rational(th.get("cos"), "/mmms/theta/cos"),
                           parse_rational(th.get("sin"), "/mmms/theta/sin"))
        if out["rotation"][0] ** 2 + out["rotation"][1] ** 2 != 1:
            raise ConfigError("cos^2 + sin^2 must equal 1", "/mmms/theta", "E_CONFIG_RANGE")
    else:
        angle = parse_angle(th, "/mmms/theta")
        quarter = angle / (math.pi / 2)
        if quarter == round(quarter):
            # multiples of pi/2 have exact cosine and sine
            k = int(round(quarter)) % 4
            out["rotation"] = (Fraction((1, 0, -1, 0)[k]), Fraction((0, 1, 0, -1)[k]))
        else:
            out["theta"] = angle
    return out


def require(cfg: RunConfig, *keys: str) -> None:
    for key in keys:
        if getattr(cfg, key) is None:
            raise ConfigError(f"this command needs '{key}'", f"/{key}", "E_CONFIG_MISSING")
