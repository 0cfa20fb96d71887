"""Marginal-stability walls, the decay constraint and Pi-stable spectra.

Walls are zeros of the smooth alignment function ``Im(Z(Q') conj Z(Q))``
with ``Re(Z(Q') conj Z(Q)) > 0``; the real-part mask throws away
anti-aligned zeros, which are not phase coincidences.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .central_charge import (MASSLESS_TOL, ModuliPath, PeriodModel, central_charge,
                             phase_of, phase_principal)
from .errors import ChargeMismatch, MasslessCharge, PistabError, ProjectionFailed
from .orbifold import Quiver
from .rep import generic_rep
from .stability import PHASE_TOL, Status, apply_charge_map, is_pi_stable

ZERO_REL = 1e-12
DEFAULT_PATH_SAMPLES = 256
DEFAULT_RETRIES = 8


def alignment_function(q1: Sequence[int], q2: Sequence[int], t: complex, model: PeriodModel) -> float:
    return (central_charge(q1, t, model) * central_charge(q2, t, model).conjugate()).imag


def _product(z1: complex, z2: complex) -> complex:
    return z1 * z2.conjugate()


@dataclass
class Wall:
    parent: tuple[int, ...]
    witness: tuple[int, ...]
    loci: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)


@dataclass
class WallScan:
    walls: list[Wall]
    degenerate: list[tuple[int, ...]] = field(default_factory=list)
    massless: list[tuple[float, tuple[int, ...]]] = field(default_factory=list)

    def rows(self) -> list[tuple[float, tuple[int, ...], tuple[int, ...], float]]:
        out = [(s, w.parent, w.witness, r) for w in self.walls for s, r in zip(w.loci, w.residuals)]
        return sorted(out, key=lambda row: (row[0], row[2]))


def find_walls_on_path(q: Sequence[int], subcharges: Sequence[Sequence[int]], path: ModuliPath,
                       model: PeriodModel, tol: float = 1e-9, *, samples: int = DEFAULT_PATH_SAMPLES,
                       massless_tol: float = MASSLESS_TOL) -> WallScan:
    """Walls of ``q`` against each subcharge along ``path``.

    The path is sampled uniformly; samples where the alignment vanishes (to
    a relative 1e-12) are roots as they stand, and every sign change between
    neighbouring samples is bisected until the bracket is narrower than
    ``tol``. Roots with anti-aligned charges are dropped.
    """
    q = tuple(int(x) for x in q)
    grid = [k / (samples - 1) for k in range(samples)]
    zq: dict[float, complex | None] = {}
    scan = WallScan([])
    for s in grid:
        z = central_charge(q, path(s), model)
        if abs(z) < massless_tol:
            zq[s] = None
            scan.massless.append((s, q))
        else:
            zq[s] = z
    for sub in subcharges:
        sub = tuple(int(x) for x in sub)
        if sub == q:
            scan.degenerate.append(sub)
            continue
        vals: list[tuple[float, float, complex]] = []
        for s in grid:
            if zq[s] is None:
                continue
            zs = central_charge(sub, path(s), model)
            if abs(zs) < massless_tol:
                scan.massless.append((s, sub))
                continue
            vals.append((s, *_signed(zs, zq[s])))
        if vals and all(v[1] == 0 for v in vals):
            # identical phases everywhere, e.g. a multiple of q
            scan.degenerate.append(sub)
            continue
        wall = Wall(q, sub)
        roots = [(s, p) for s, sign, p in vals if sign == 0]
        for (sa, ga, _), (sb, gb, _) in zip(vals, vals[1:]):
            if ga and gb and ga != gb:
                roots.append(_bisect(q, sub, path, model, sa, sb, ga, tol))
        for s, p in sorted(roots, key=lambda r: r[0]):
            if p.real > 0:
                wall.loci.append(s)
                wall.residuals.append(abs(p.imag))
        if wall.loci:
            scan.walls.append(wall)
    scan.massless.sort()
    return scan


def _signed(z_sub: complex, z_q: complex) -> tuple[int, complex]:
    p = _product(z_sub, z_q)
    if abs(p.imag) <= ZERO_REL * abs(z_sub) * abs(z_q):
        return 0, p
    return (1 if p.imag > 0 else -1), p


def _bisect(q, sub, path, model, sa: float, sb: float, ga: int, tol: float) -> tuple[float, complex]:
    p = 0j
    while sb - sa >= tol:
        mid = 0.5 * (sa + sb)
        if not sa < mid < sb:
            break
        t = path(mid)
        g, p = _signed(central_charge(sub, t, model), central_charge(q, t, model))
        if g == 0:
            return mid, p
        if g == ga:
            sa = mid
        else:
            sb = mid
    s = 0.5 * (sa + sb)
    t = path(s)
    return s, _product(central_charge(sub, t, model), central_charge(q, t, model))


# ---------------------------------------------------------------------------
# Decay constraint
# ---------------------------------------------------------------------------

def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % 2.0
    return min(d, 2.0 - d)


def decay_allowed(q: Sequence[int], parts: Sequence[Sequence[int]], t: complex, model: PeriodModel,
                  tol: float = PHASE_TOL, massless_tol: float = MASSLESS_TOL) -> bool:
    """True iff all parts share one phase (within ``tol``).

    Also checks the mass budget: ``|Z(Q)| <= sum |Z(Q_i)|`` always, with
    equality whenever the decay is allowed.
    """
    q = tuple(int(x) for x in q)
    total = tuple(sum(p[i] for p in parts) for i in range(len(q))) if parts else None
    if not parts or any(len(p) != len(q) for p in parts) or total != q:
        raise ChargeMismatch(f"parts sum to {total}, expected {q}")
    zs = [central_charge(p, t, model) for p in parts]
    phis = [phase_of(z, massless_tol) for z in zs]
    allowed = all(_circular_gap(phis[0], x) <= tol for x in phis[1:])
    mass = abs(central_charge(q, t, model))
    budget = sum(abs(z) for z in zs)
    scale = max(1.0, budget)
    if mass > budget + 1e-12 * scale:
        raise AssertionError(f"triangle inequality violated: {mass} > {budget}")
    if allowed:
        # collinear parts within tol: deficit is at most budget * (1 - cos(pi tol))
        slack = budget * (1 - math.cos(math.pi * tol)) + 1e-12 * scale
        if budget - mass > slack:
            raise AssertionError(f"aligned parts lose mass: {budget - mass}")
    return allowed


# ---------------------------------------------------------------------------
# Spectrum at a point
# ---------------------------------------------------------------------------

@dataclass
class SpectrumEntry:
    charge: tuple[int, ...]
    dims: tuple[int, ...]
    verdict: Status | None
    phase: float | None
    witness: tuple[int, ...] | None = None
    error: str | None = None
    message: str | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        out: dict = {"charge": list(self.charge), "dims": list(self.dims)}
        if self.verdict is None:
            out.update({"verdict": "Failed", "error": self.error, "message": self.message})
            return out
        out.update({"verdict": self.verdict.value, "phase": self.phase, "seed": self.seed})
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


def _sort_key(e: SpectrumEntry):
    return (e.phase is None, e.phase if e.phase is not None else 0.0, e.charge, e.dims)


def spectrum_entry(dims: tuple[int, ...], t: complex, model: PeriodModel, charge_map, quiver: Quiver, *,
                   retries: int = DEFAULT_RETRIES, seed: int = 0, tol: float = PHASE_TOL,
                   **search) -> SpectrumEntry:
    charge = apply_charge_map(dims, charge_map)
    rep = None
    last: PistabError | None = None
    base = seed * 1_000_003 + sum(d * 31 ** i for i, d in enumerate(dims))
    for k in range(retries):
        try:
            rep = generic_rep(quiver, dims, seed=base + k)
            used = base + k
            break
        except ProjectionFailed as exc:
            last = exc
    if rep is None:
        return SpectrumEntry(charge, dims, None, None, error=ProjectionFailed.code,
                             message=f"no generic rep after {retries} seeds: {last}")
    try:
        verdict = is_pi_stable(rep, None, t, model, charge_map, tol=tol, seed=used, **search)
        phase = phase_principal(charge, t, model)
    except PistabError as exc:
        return SpectrumEntry(charge, dims, None, None, error=exc.code, message=str(exc))
    witness = tuple(verdict.witness) if verdict.witness is not None else None
    return SpectrumEntry(charge, dims, verdict.status, phase, witness, seed=used)


def stable_spectrum(cap: Sequence[int], t: complex, model: PeriodModel, charge_map, quiver: Quiver, *,
                    retries: int = DEFAULT_RETRIES, seed: int = 0, threads: int = 1,
                    tol: float = PHASE_TOL, **search) -> list[SpectrumEntry]:
    """Pi-stability verdicts for every nonzero dimension vector ``d <= cap``.

    Failures (no generic rep, a massless charge) become entries with a
    ``Failed`` verdict; the sweep never aborts. Sorted by phase, then charge.
    """
    if len(cap) != quiver.node_count:
        raise ChargeMismatch(f"cap has {len(cap)} entries, quiver has {quiver.node_count} nodes")
    dims = [d for d in itertools.product(*(range(c + 1) for c in cap)) if any(d)]

    def one(d):
        return spectrum_entry(d, t, model, charge_map, quiver, retries=retries, seed=seed, tol=tol, **search)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(one, dims))
    else:
        entries = [one(d) for d in dims]
    return sorted(entries, key=_sort_key)


# ---------------------------------------------------------------------------
# 2-D slices
# ---------------------------------------------------------------------------

@dataclass
class WallGrid:
    """Cell-centre classification of a rectangle ``[x0, x1] x [y0, y1]`` in the t-plane.

    ``signs[k][j][i]`` is the sign of the alignment of subcharge ``k`` at
    cell ``(i, j)`` (0 where anti-aligned or singular); ``singular[j][i]``
    marks cells where a charge is massless or the model fails.
    """

    charge: tuple[int, ...]
    subcharges: list[tuple[int, ...]]
    rect: tuple[float, float, float, float]
    nx: int
    ny: int
    signs: list[list[list[int]]]
    aligned: list[list[list[bool]]]
    singular: list[list[bool]]

    def centre(self, i: int, j: int) -> complex:
        x0, x1, y0, y1 = self.rect
        return complex(x0 + (i + 0.5) * (x1 - x0) / self.nx, y0 + (j + 0.5) * (y1 - y0) / self.ny)

    def boundaries(self, k: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Adjacent cell pairs across which subcharge ``k``'s alignment changes sign."""
        out = []
        s = self.signs[k]
        for j in range(self.ny):
            for i in range(self.nx):
                for di, dj in ((1, 0), (0, 1)):
                    i2, j2 = i + di, j + dj
                    if i2 >= self.nx or j2 >= self.ny:
                        continue
                    if s[j][i] * s[j2][i2] < 0 and self.aligned[k][j][i] and self.aligned[k][j2][i2]:
                        out.append(((i, j), (i2, j2)))
        return out

    def to_json(self) -> dict:
        return {"charge": list(self.charge), "subcharges": [list(s) for s in self.subcharges],
                "rect": list(self.rect), "resolution": [self.nx, self.ny],
                "signs": self.signs, "aligned": self.aligned, "singular": self.singular}


def wall_grid_2d(q: Sequence[int], subcharges: Sequence[Sequence[int]],
                 rect: tuple[float, float, float, float], model: PeriodModel,
                 resolution: int | tuple[int, int] = 32, *, massless_tol: float = MASSLESS_TOL) -> WallGrid:
    nx, ny = (resolution, resolution) if isinstance(resolution, int) else resolution
    q = tuple(int(x) for x in q)
    subs = [tuple(int(x) for x in s) for s in subcharges]
    grid = WallGrid(q, subs, tuple(float(x) for x in rect), nx, ny,
                    [[[0] * nx for _ in range(ny)] for _ in subs],
                    [[[False] * nx for _ in range(ny)] for _ in subs],
                    [[False] * nx for _ in range(ny)])
    for j in range(ny):
        for i in range(nx):
            t = grid.centre(i, j)
            try:
                zq = central_charge(q, t, model)
                zs = [central_charge(s, t, model) for s in subs]
            except PistabError:
                grid.singular[j][i] = True
                continue
            if not all(math.isfinite(abs(z)) for z in [zq, *zs]) or abs(zq) < massless_tol \
                    or any(abs(z) < massless_tol for z in zs):
                grid.singular[j][i] = True
                continue
            for k, z in enumerate(zs):
                sign, p = _signed(z, zq)
                grid.signs[k][j][i] = sign
                grid.aligned[k][j][i] = p.real > 0
    return grid


_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def wall_grid_svg(grid: WallGrid, size: int = 480) -> str:
    """Plain SVG: shaded cells for the first subcharge's sign, wall segments per subcharge."""
    w = h = size
    cw, ch = w / grid.nx, h / grid.ny
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
             f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>']

    def y(j: float) -> float:
        return h - j * ch  # Im t grows upwards

    if grid.subcharges:
        for j in range(grid.ny):
            for i in range(grid.nx):
                if grid.singular[j][i]:
                    fill = "#000000"
                else:
                    fill = {1: "#eeeeff", -1: "#ffeeee", 0: "#f6f6f6"}[grid.signs[0][j][i]]
                parts.append(f'<rect x="{i * cw:.3f}" y="{y(j + 1):.3f}" width="{cw:.3f}" '
                             f'height="{ch:.3f}" fill="{fill}"/>')
    for k in range(len(grid.subcharges)):
        color = _PALETTE[k % len(_PALETTE)]
        for (i, j), (i2, j2) in grid.boundaries(k):
            if i2 != i:  # vertical edge between horizontal neighbours
                x = i2 * cw
                seg = (x, y(j), x, y(j + 1))
            else:
                yy = y(j2)
                seg = (i * cw, yy, (i + 1) * cw, yy)
            parts.append('<line x1="{:.3f}" y1="{:.3f}" x2="{:.3f}" y2="{:.3f}" '.format(*seg)
                         + f'stroke="{color}" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
