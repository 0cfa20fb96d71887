"""Command-line interface.

    pistab [--config FILE] [--out DIR] [--seed N] [--threads N] [--tol X] COMMAND ...

Commands: build-quiver, check-stability, scan-walls, flow-gradings, spectrum.
Results go to ``--out`` (default ``./out``); a short summary goes to stdout.
Errors are printed to stderr as JSON ``{"error": {code, message, path}}``;
exit status is 2 for configuration errors and 1 for failed computations.
"""

from __future__ import annotations

import argparse
import contextlib
import itertools
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import PRESETS, RunConfig, build_config, load_document, require
from .errors import ConfigError, PistabError, QuiverMismatch
from .grading_flow import MorphismRecord, abelian_violation_check, flow_along_path, monodromy_shift
from .rep import QuiverRep
from .serialize import (dumps, flag_to_json, flow_csv, format_charge, walls_csv, write_json,
                        write_text)
from .stability import (ChernData, Rotation, apply_charge_map, is_mu_stable, is_pi_stable,
                        is_theta_stable, mmms_slope, mu_slope)
from .walls import find_walls_on_path, stable_spectrum, wall_grid_2d, wall_grid_svg


@contextlib.contextmanager
def _at(path: str):
    """Attach a config pointer to computational errors raised inside the block."""
    try:
        yield
    except PistabError as exc:
        if not hasattr(exc, "path"):
            exc.path = path
        raise


def _plural(k: int, word: str) -> str:
    return f"{k} {word}" + ("" if k == 1 else "s")


def _summary(n_nodes: int, n_arrows: int, n_rel: int) -> str:
    return f"{_plural(n_nodes, 'node')}, {_plural(n_arrows, 'arrow')}, {_plural(n_rel, 'relation')}"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_build_quiver(cfg: RunConfig, out: Path) -> int:
    require(cfg, "quiver")
    q = cfg.quiver
    doc = {"orbifold": None, "summary": _summary(q.node_count, len(q.arrows), len(q.relations))}
    if cfg.orbifold is not None:
        doc["orbifold"] = {"order": cfg.orbifold.order, "weights": list(cfg.orbifold.weights)}
    doc["quiver"] = q.to_json()
    write_json(out / "quiver.json", doc)
    print(doc["summary"])
    return 0


def _box_subcharges(dims: Sequence[int], charge_map) -> list[tuple[int, ...]]:
    """Images of every dimension vector strictly between 0 and ``dims``."""
    out = []
    for d in itertools.product(*(range(x + 1) for x in dims)):
        if any(d) and tuple(d) != tuple(dims):
            q = apply_charge_map(d, charge_map)
            if q not in out:
                out.append(q)
    return out


def _charge_and_subs(cfg: RunConfig) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    require(cfg, "charge")
    if cfg.subcharges is not None:
        return cfg.charge, cfg.subcharges
    if cfg.quiver is None:
        raise ConfigError("no subcharges given and no quiver to derive them from", "/subcharges",
                          "E_CONFIG_MISSING")
    if len(cfg.charge) != cfg.quiver.node_count:
        raise ConfigError("with a quiver attached the charge is read as a dimension vector",
                          "/charge", "E_CONFIG_LENGTH")
    return apply_charge_map(cfg.charge, cfg.charge_map), _box_subcharges(cfg.charge, cfg.charge_map)


def _identity_ok(cfg: RunConfig) -> None:
    if cfg.charge_map is None and cfg.quiver is not None and cfg.periods is not None \
            and cfg.quiver.node_count != cfg.periods.rank:
        raise ConfigError(f"no charge_map and {cfg.quiver.node_count} nodes vs period rank "
                          f"{cfg.periods.rank}", "/charge_map", "E_CONFIG_SHAPE")


def cmd_check_stability(cfg: RunConfig, out: Path, mode: str | None, along_path: bool = False) -> int:
    mode = mode or cfg.raw.get("mode")
    if mode not in ("mu", "theta", "pi", "mmms"):
        raise ConfigError(f"mode must be one of mu, theta, pi, mmms (got {mode!r})", "/mode", "E_CONFIG_MODE")
    result: dict = {"mode": mode}
    if mode == "mu":
        require(cfg, "chern")
        with _at("/chern"):
            c = ChernData(tuple(cfg.chern))
            mu_slope(c)
        with _at("/subobjects"):
            v = is_mu_stable(c, [ChernData(tuple(s)) for s in cfg.subobjects])
        result.update(v.to_json())
    elif mode == "theta":
        require(cfg, "quiver", "rep", "theta")
        rep = _rep(cfg)
        with _at("/theta"):
            v = is_theta_stable(rep, cfg.theta, seed=cfg.seed)
        result.update(v.to_json())
    elif mode == "pi":
        require(cfg, "periods")
        path = cfg.path if along_path else None
        if along_path:
            require(cfg, "path")
        else:
            require(cfg, "point")
        if cfg.rep is not None:
            require(cfg, "quiver")
            _identity_ok(cfg)
            rep = _rep(cfg)
            v = is_pi_stable(rep, cfg.subcharges, cfg.point, cfg.periods, cfg.charge_map,
                             path=path, tol=cfg.tol, seed=cfg.seed)
            result["charge"] = list(apply_charge_map(rep.dims, cfg.charge_map))
        else:
            q, subs = _charge_and_subs(cfg)
            v = is_pi_stable(q, subs, cfg.point, cfg.periods, path=path, tol=cfg.tol)
            result["charge"] = list(q)
        if path is None:
            result["point"] = cfg.point
        else:
            result["path"] = cfg.raw["path"]
        result.update(v.to_json())
    else:
        require(cfg, "chern", "mmms")
        c = ChernData(tuple(cfg.chern))
        m = cfg.mmms
        theta = Rotation(*m["rotation"]) if "rotation" in m else m["theta"]
        result["value"] = mmms_slope(c, m["omega"], theta, m["d"], m["ls"])
        result["d"] = m["d"]
    write_json(out / "verdict.json", result)
    sys.stdout.write(dumps(result))
    return 0


def _rep(cfg: RunConfig) -> QuiverRep:
    try:
        return QuiverRep.from_json(cfg.quiver, cfg.rep)
    except (PistabError, KeyError, TypeError, ValueError) as exc:
        code = exc.code if isinstance(exc, PistabError) else "E_CONFIG_REP"
        raise ConfigError(f"invalid rep: {exc}", "/rep", code) from None


def cmd_scan_walls(cfg: RunConfig, out: Path) -> int:
    require(cfg, "periods")
    if cfg.path is None and cfg.grid is None:
        raise ConfigError("scan-walls needs a 'path' or a 'grid'", "/path", "E_CONFIG_MISSING")
    q, subs = _charge_and_subs(cfg)
    summary: dict = {"charge": list(q), "subcharges": [list(s) for s in subs]}
    if cfg.path is not None:
        scan = find_walls_on_path(q, subs, cfg.path, cfg.periods, cfg.tol, samples=cfg.samples)
        write_text(out / "walls.csv", walls_csv(scan))
        summary["path"] = cfg.raw["path"]
        summary["walls"] = [{"subcharge": list(w.witness), "loci": w.loci, "residuals": w.residuals}
                            for w in scan.walls]
        summary["degenerate"] = [list(s) for s in scan.degenerate]
        summary["massless"] = [{"s": s, "charge": list(c)} for s, c in scan.massless]
        print(f"{_plural(len(scan.rows()), 'wall crossing')} for charge {format_charge(q)}")
    if cfg.grid is not None:
        grid = wall_grid_2d(q, subs, cfg.grid["rect"], cfg.periods, cfg.grid["resolution"])
        write_json(out / "grid.json", grid.to_json())
        write_text(out / "walls.svg", wall_grid_svg(grid))
        summary["grid_boundaries"] = [len(grid.boundaries(k)) for k in range(len(subs))]
    write_json(out / "walls.json", summary)
    return 0


def cmd_flow_gradings(cfg: RunConfig, out: Path) -> int:
    require(cfg, "periods", "source", "target")
    path = cfg.flow_path or cfg.path
    key = "flow_path" if cfg.flow_path is not None else "path"
    if path is None:
        raise ConfigError("flow-gradings needs 'flow_path' or 'path'", "/flow_path", "E_CONFIG_MISSING")
    rec = MorphismRecord.at(cfg.source, cfg.target, cfg.degree, path.start, cfg.periods)
    trace = flow_along_path(rec, path, cfg.periods)
    flags = abelian_violation_check([(trace.start_degree, trace.end_degree)])
    summary: dict = {
        "source": list(cfg.source), "target": list(cfg.target), "path": cfg.raw[key],
        "degree_start": trace.start_degree, "degree_end": trace.end_degree,
        "shift": trace.end_degree - trace.start_degree,
        "flags": [flag_to_json(f) for f in flags],
    }
    if path.is_closed():
        summary["monodromy"] = monodromy_shift(cfg.source, cfg.target, path, cfg.periods)
    write_text(out / "flow.csv", flow_csv(trace))
    write_json(out / "flow.json", summary)
    print(f"degree {trace.start_degree!r} -> {trace.end_degree!r}"
          + "".join(f" [{f.kind.value}]" for f in flags))
    return 0


def cmd_spectrum(cfg: RunConfig, out: Path) -> int:
    require(cfg, "quiver", "periods", "point", "cap")
    _identity_ok(cfg)
    entries = stable_spectrum(cfg.cap, cfg.point, cfg.periods, cfg.charge_map, cfg.quiver,
                              retries=cfg.retries, seed=cfg.seed, threads=cfg.threads, tol=cfg.tol)
    data = [e.to_json() for e in entries]
    write_json(out / "spectrum.json", data)
    ok = sum(e.verdict is not None for e in entries)
    print(f"{len(entries)} charges, {ok} classified, {len(entries) - ok} failed")
    return 0 if ok or not entries else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="JSON run configuration")
    common.add_argument("--preset", choices=sorted(PRESETS), default=argparse.SUPPRESS, help="bundled model (config keys override it)")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="pistab", description="BPS brane spectra on abelian orbifolds.",
                                parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-quiver", parents=[common], help="McKay quiver with superpotential relations")
    b.add_argument("--order", type=int)
    b.add_argument("--weights", help="three comma-separated integers")

    c = sub.add_parser("check-stability", parents=[common], help="mu / theta / Pi / MMMS checks")
    c.add_argument("--mode", choices=["mu", "theta", "pi", "mmms"])
    c.add_argument("--charge", help="comma-separated integers")
    c.add_argument("--point", help="moduli point as 're,im'")
    c.add_argument("--along-path", action="store_true",
                   help="pi mode: compare phases lifted along 'path', at its endpoint")

    w = sub.add_parser("scan-walls", parents=[common], help="marginal-stability walls")
    w.add_argument("--charge")

    f = sub.add_parser("flow-gradings", parents=[common], help="flow of a morphism degree along a path")
    f.add_argument("--source")
    f.add_argument("--target")
    f.add_argument("--degree", type=float)

    s = sub.add_parser("spectrum", parents=[common], help="Pi-stable spectrum at a point")
    s.add_argument("--cap")
    s.add_argument("--point")
    return p


def _document(args: argparse.Namespace) -> dict:
    doc = load_document(getattr(args, "config", None))
    if getattr(args, "preset", None):
        doc["preset"] = args.preset
    if getattr(args, "order", None) is not None or getattr(args, "weights", None) is not None:
        o = dict(doc.get("orbifold") or {})
        if args.order is not None:
            o["order"] = args.order
        if args.weights is not None:
            o["weights"] = args.weights
        doc["orbifold"] = o
    for key in ("charge", "point", "source", "target", "degree", "cap", "seed", "threads", "tol"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    return doc


def _error(exc: Exception, code: str, path: str = "/") -> None:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": str(exc), "path": path}},
                                sort_keys=True) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    out = Path(getattr(args, "out", "out"))
    try:
        cfg = build_config(_document(args))
        if args.command == "build-quiver":
            return cmd_build_quiver(cfg, out)
        if args.command == "check-stability":
            return cmd_check_stability(cfg, out, args.mode, args.along_path)
        if args.command == "scan-walls":
            return cmd_scan_walls(cfg, out)
        if args.command == "flow-gradings":
            return cmd_flow_gradings(cfg, out)
        return cmd_spectrum(cfg, out)
    except ConfigError as exc:
        _error(exc, exc.code, exc.path)
        return 2
    except QuiverMismatch as exc:
        _error(exc, exc.code)
        return 2
    except PistabError as exc:
        _error(exc, exc.code, getattr(exc, "path", "/"))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
