"""Quiver representations over Q."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import ProjectionFailed, QuiverMismatch, StructureError
from ..linalg import QMatrix, block_diag, format_fraction, nullspace
from ..orbifold import Quiver, Relation


@dataclass(frozen=True, eq=False)
class QuiverRep:
    """A dimension vector plus one matrix ``dims[dst] x dims[src]`` per arrow."""

    quiver: Quiver
    dims: tuple[int, ...]
    maps: tuple[QMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "maps", tuple(self.maps))
        _check_shapes(self.quiver, self.dims, self.maps)

    @classmethod
    def zero_maps(cls, quiver: Quiver, dims: Sequence[int]) -> QuiverRep:
        dims = tuple(dims)
        return cls(quiver, dims, tuple(QMatrix.zeros(dims[a.dst], dims[a.src]) for a in quiver.arrows))

    @classmethod
    def simple(cls, quiver: Quiver, node: int) -> QuiverRep:
        return cls.zero_maps(quiver, [1 if i == node else 0 for i in range(quiver.node_count)])

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def path_matrix(self, path: Sequence[int]) -> QMatrix:
        src, _ = self.quiver.path_endpoints(path)
        m = QMatrix.identity(self.dims[src])
        for a in path:
            m = self.maps[a] @ m
        return m

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuiverRep):
            return NotImplemented
        return self.quiver == other.quiver and self.dims == other.dims and self.maps == other.maps

    def __hash__(self):
        return hash((self.dims, self.maps))

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "maps": {str(k): [[format_fraction(x) for x in row] for row in m.rows]
                     for k, m in enumerate(self.maps)},
        }

    @classmethod
    def from_json(cls, quiver: Quiver, data: dict) -> QuiverRep:
        dims = tuple(int(d) for d in data["dims"])
        if len(dims) != quiver.node_count:
            raise StructureError("dimension vector length does not match the quiver")
        given = data.get("maps", {})
        maps = []
        for k, a in enumerate(quiver.arrows):
            rows = given.get(str(k))
            if rows is None:
                maps.append(QMatrix.zeros(dims[a.dst], dims[a.src]))
            else:
                maps.append(QMatrix(len(rows), dims[a.src], rows))
        return cls(quiver, dims, tuple(maps))


def _check_shapes(quiver: Quiver, dims: tuple[int, ...], maps: tuple[QMatrix, ...]) -> None:
    if len(dims) != quiver.node_count:
        raise StructureError(f"dimension vector has {len(dims)} entries, quiver has {quiver.node_count} nodes")
    if any(d < 0 for d in dims):
        raise StructureError("negative dimension")
    if len(maps) != len(quiver.arrows):
        raise StructureError(f"{len(maps)} matrices for {len(quiver.arrows)} arrows")
    for k, (a, m) in enumerate(zip(quiver.arrows, maps)):
        if m.shape != (dims[a.dst], dims[a.src]):
            raise StructureError(f"arrow {k}: matrix shape {m.shape}, expected {(dims[a.dst], dims[a.src])}")


def paths_up_to(quiver: Quiver, max_len: int) -> list[tuple[int, ...]]:
    """All nonempty paths of length <= max_len, shortest first."""
    paths = [(k,) for k in range(len(quiver.arrows))]
    frontier = list(paths)
    for _ in range(max_len - 1):
        frontier = [p + (k,) for p in frontier for k in quiver.out_arrows(quiver.arrows[p[-1]].dst)]
        paths.extend(frontier)
    return paths


def square_pencils(rep: QuiverRep, max_len: int = 3) -> list[tuple[int, QMatrix, QMatrix]]:
    """Pairs of path matrices with equal endpoints and square shape, as (source, A, B).

    A closed path is paired with the identity. Eigen-type subreps (invariant
    lines of a cycle, common lines of two parallel maps) sit over the rational
    roots of ``det(A - x B)``.
    """
    q = rep.quiver
    by_ends: dict[tuple[int, int], list[QMatrix]] = {}
    for p in paths_up_to(q, max_len):
        s, t = q.path_endpoints(p)
        if rep.dims[s] and rep.dims[s] == rep.dims[t]:
            mats = by_ends.setdefault((s, t), [])
            m = rep.path_matrix(p)
            if m not in mats:
                mats.append(m)
    out = []
    for (s, t), mats in by_ends.items():
        if s == t:
            mats = mats + [QMatrix.identity(rep.dims[s])]
        for i, a in enumerate(mats):
            for b in mats[i + 1:]:
                out.append((s, a, b))
    return out


def check_relations(rep: QuiverRep) -> list[Relation]:
    """Relations not satisfied by ``rep``; empty means the rep is on the relation variety."""
    _check_shapes(rep.quiver, rep.dims, rep.maps)
    return [r for r in rep.quiver.relations if rep.path_matrix(r.plus) != rep.path_matrix(r.minus)]


def direct_sum(e: QuiverRep, f: QuiverRep) -> QuiverRep:
    if e.quiver != f.quiver:
        raise QuiverMismatch("direct sum of representations of different quivers")
    dims = tuple(a + b for a, b in zip(e.dims, f.dims))
    return QuiverRep(e.quiver, dims, tuple(block_diag(x, y) for x, y in zip(e.maps, f.maps)))


def change_basis(rep: QuiverRep, g: Sequence[QMatrix], g_inv: Sequence[QMatrix]) -> QuiverRep:
    """The isomorphic rep ``X_a -> g[dst] X_a g[src]^-1``."""
    maps = tuple(g[a.dst] @ m @ g_inv[a.src] for a, m in zip(rep.quiver.arrows, rep.maps))
    return QuiverRep(rep.quiver, rep.dims, maps)


def hom_space(e: QuiverRep, f: QuiverRep) -> int:
    """dim Hom(E, F): node-wise maps ``phi_i`` with ``phi_dst X_a(E) = X_a(F) phi_src``."""
    if e.quiver != f.quiver:
        raise QuiverMismatch("Hom between representations of different quivers")
    q = e.quiver
    # unknown phi_i is dims_F[i] x dims_E[i], flattened row-major
    offsets, n = [], 0
    for i in range(q.node_count):
        offsets.append(n)
        n += f.dims[i] * e.dims[i]
    if n == 0:
        return 0

    def var(node: int, r: int, c: int) -> int:
        return offsets[node] + r * e.dims[node] + c

    eqs: list[list[Fraction]] = []
    for a, xe, xf in zip(q.arrows, e.maps, f.maps):
        s, t = a.src, a.dst
        # entry (r, c) of phi_t @ xe - xf @ phi_s, r < dims_F[t], c < dims_E[s]
        for r in range(f.dims[t]):
            for c in range(e.dims[s]):
                row = [Fraction(0)] * n
                for k in range(e.dims[t]):
                    if xe[k, c]:
                        row[var(t, r, k)] += xe[k, c]
                for k in range(f.dims[s]):
                    if xf[r, k]:
                        row[var(s, k, c)] -= xf[r, k]
                if any(row):
                    eqs.append(row)
    return len(nullspace(eqs, n)) if eqs else n


# ---------------------------------------------------------------------------
# Sampling points of the relation variety
# ---------------------------------------------------------------------------

def _random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 4))


def generic_rep(quiver: Quiver, dims: Sequence[int], seed: int) -> QuiverRep:
    """Pseudo-random point on the relation variety with dimension vector ``dims``.

    Arrows are filled label by label. Arrows of the lowest label are random;
    each later label is drawn at random from the solution space of the
    relations that are linear in it once the lower labels are fixed (for the
    McKay relations, every relation has exactly one arrow of its top label).
    Relations that are not linear in their top label are only checked at the end.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != quiver.node_count or any(d < 0 for d in dims):
        raise StructureError("dimension vector does not fit the quiver")
    rng = random.Random(seed)
    arrows = quiver.arrows
    maps: list[QMatrix | None] = [None] * len(arrows)
    labels = sorted({a.label for a in arrows})
    for lab in labels:
        group = [k for k, a in enumerate(arrows) if a.label == lab]
        linear = [r for r in quiver.relations if _linear_in(r, arrows, lab)]
        if not linear or lab == labels[0]:
            for k in group:
                a = arrows[k]
                maps[k] = QMatrix(dims[a.dst], dims[a.src],
                                  [[_random_fraction(rng) for _ in range(dims[a.src])]
                                   for _ in range(dims[a.dst])])
            continue
        maps_group = _solve_label(quiver, dims, maps, group, linear, rng)
        for k, m in zip(group, maps_group):
            maps[k] = m
    rep = QuiverRep(quiver, dims, tuple(maps))
    bad = check_relations(rep)
    if bad:
        raise ProjectionFailed(f"sampled point violates {len(bad)} relation(s); retry with another seed")
    return rep


def _linear_in(r: Relation, arrows, lab: int) -> bool:
    """Each side has exactly one arrow of label ``lab`` and nothing higher."""
    for path in (r.plus, r.minus):
        labs = [arrows[k].label for k in path]
        if labs.count(lab) != 1 or max(labs) != lab:
            return False
    return True


def _solve_label(quiver, dims, maps, group, relations, rng) -> list[QMatrix]:
    arrows = quiver.arrows
    offsets, n = {}, 0
    for k in group:
        a = arrows[k]
        offsets[k] = n
        n += dims[a.dst] * dims[a.src]
    if n == 0:
        return [QMatrix.zeros(dims[arrows[k].dst], dims[arrows[k].src]) for k in group]

    eqs: list[list[Fraction]] = []
    for r in relations:
        src, dst = quiver.path_endpoints(r.plus)
        lin = _linearize(r.plus, quiver, dims, maps, offsets, n, group)
        lin_m = _linearize(r.minus, quiver, dims, maps, offsets, n, group)
        for i in range(dims[dst]):
            for j in range(dims[src]):
                row = [p - m for p, m in zip(lin[i][j], lin_m[i][j])]
                if any(row):
                    eqs.append(row)
    basis = nullspace(eqs, n) if eqs else [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    x = [Fraction(0)] * n
    for v in basis:
        c = Fraction(rng.randint(-9, 9))
        x = [xi + c * vi for xi, vi in zip(x, v)]
    out = []
    for k in group:
        a = arrows[k]
        o, cols = offsets[k], dims[a.src]
        out.append(QMatrix(dims[a.dst], cols,
                           [[x[o + i * cols + j] for j in range(cols)] for i in range(dims[a.dst])]))
    return out


def _linearize(path, quiver, dims, maps, offsets, n, group):
    """Entries of the path matrix as linear forms in the unknown arrow entries.

    Exactly one arrow on ``path`` is unknown; the path reads ``L @ X @ R``.
    """
    arrows = quiver.arrows
    pos = next(p for p, k in enumerate(path) if k in offsets)
    before, unknown, after = path[:pos], path[pos], path[pos + 1:]
    a = arrows[unknown]
    src, _ = quiver.path_endpoints(path)
    right = QMatrix.identity(dims[src])
    for k in before:
        right = maps[k] @ right
    left = QMatrix.identity(dims[a.dst])
    for k in after:
        left = maps[k] @ left
    o, cols = offsets[unknown], dims[a.src]
    rows_out = []
    for i in range(left.nrows):
        row_forms = []
        for j in range(right.ncols):
            form = [Fraction(0)] * n
            # (L X R)_{ij} = sum_{p,q} L_ip X_pq R_qj
            for p in range(left.ncols):
                lip = left[i, p]
                if not lip:
                    continue
                for qq in range(right.nrows):
                    rqj = right[qq, j]
                    if rqj:
                        form[o + p * cols + qq] += lip * rqj
            row_forms.append(form)
        rows_out.append(row_forms)
    return rows_out

