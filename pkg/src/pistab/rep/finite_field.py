"""Exhaustive subrepresentation search over a finite field.

Independent of :mod:`pistab.rep.subreps`: a rational rep is reduced mod ``p``
and every tuple of node-wise subspaces of ``F_p^{d_i}`` is tested for arrow
stability. Exponential, meant for total dimension up to about 6.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from ..linalg import QMatrix, hstack, pencil_polynomial, rational_roots, vstack
from .core import QuiverRep, paths_up_to, square_pencils


class DegenerateReduction(ValueError):
    """The reduction mod p loses information (a denominator or a minor vanishes)."""


def reduce_mod_p(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise DegenerateReduction(f"denominator of {x} divisible by {p}")
    return (x.numerator * pow(x.denominator, -1, p)) % p


def rank_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    m = [[v % p for v in r] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


@lru_cache(maxsize=None)
def subspaces(dim: int, p: int) -> tuple[tuple[int, frozenset], ...]:
    """All subspaces of F_p^dim as (dimension, set of member vectors)."""
    out = []
    for k in range(dim + 1):
        for pivots in itertools.combinations(range(dim), k):
            free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, dim) if c not in pivots]
            for vals in itertools.product(range(p), repeat=len(free)):
                rows = [[0] * dim for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), v in zip(free, vals):
                    rows[r][c] = v
                members = set()
                for coeffs in itertools.product(range(p), repeat=k):
                    members.add(tuple(sum(a * row[j] for a, row in zip(coeffs, rows)) % p
                                      for j in range(dim)))
                out.append((k, frozenset(members)))
    return tuple(out)


def _probe_matrices(rep: QuiverRep, max_len: int) -> list[QMatrix]:
    """Path matrices and their stacks whose ranks control the subrep lattice."""
    q = rep.quiver
    mats = {p: rep.path_matrix(p) for p in paths_up_to(q, max_len)}
    probes = list(mats.values())
    for node in range(q.node_count):
        outgoing = [m for p, m in mats.items() if q.arrows[p[0]].src == node]
        incoming = [m for p, m in mats.items() if q.arrows[p[-1]].dst == node]
        if outgoing:
            probes.append(vstack(outgoing, rep.dims[node]))
        if incoming:
            probes.append(hstack(incoming, rep.dims[node]))
        for a, b in itertools.combinations(outgoing, 2):
            probes.append(vstack([a, b], rep.dims[node]))
        for a, b in itertools.combinations(incoming, 2):
            probes.append(hstack([a, b], rep.dims[node]))
    return probes


def _check_pencils(rep: QuiverRep, p: int, max_path_len: int) -> list[QMatrix]:
    """Eigenvalue data must survive reduction; returns the eigen-probe matrices."""
    probes = []
    for _, a, b in square_pencils(rep, max_path_len):
        poly = pencil_polynomial(a, b)
        if not any(poly):
            continue
        red = [reduce_mod_p(c, p) for c in poly]
        if red[-1] == 0:
            raise DegenerateReduction(f"pencil polynomial drops degree mod {p}")
        roots_q = rational_roots(poly)
        roots_p = {x for x in range(p) if sum(c * x ** k for k, c in enumerate(red)) % p == 0}
        if {reduce_mod_p(r, p) for r in roots_q} != roots_p or len(roots_q) != len(roots_p):
            raise DegenerateReduction(f"pencil eigenvalues {roots_q} do not match F_{p} roots {sorted(roots_p)}")
        for lam in roots_q:
            m = a - b.scale(lam)
            probes.extend([m, m @ m] if a.nrows else [])
    return probes


def check_reduction(rep: QuiverRep, p: int, max_path_len: int = 3) -> None:
    """Raise :class:`DegenerateReduction` if the reduction mod p can change the answer.

    That is: a denominator vanishes, a probe matrix drops rank, or a square
    path pencil acquires or loses eigenvalues.
    """
    for m in rep.maps:
        for row in m.rows:
            for x in row:
                reduce_mod_p(x, p)
    for m in _probe_matrices(rep, max_path_len) + _check_pencils(rep, p, max_path_len):
        if not m.nrows or not m.ncols:
            continue
        red = [[reduce_mod_p(x, p) for x in row] for row in m.rows]
        if rank_mod_p(red, m.ncols, p) != m.rank():
            raise DegenerateReduction(f"a {m.nrows}x{m.ncols} minor vanishes mod {p}")


def subrep_dimvectors_mod_p(rep: QuiverRep, p: int = 5, *, check: bool = True) -> set[tuple[int, ...]]:
    """Dimension vectors of all subreps of ``rep mod p``, by exhaustive search."""
    if check:
        check_reduction(rep, p)
    q = rep.quiver
    n = q.node_count
    mats = [tuple(tuple(reduce_mod_p(x, p) for x in row) for row in m.rows) for m in rep.maps]
    spaces = [subspaces(d, p) for d in rep.dims]
    # arrows checked once both endpoints are chosen
    ready: list[list[int]] = [[] for _ in range(n)]
    for k, a in enumerate(q.arrows):
        ready[max(a.src, a.dst)].append(k)

    def image(k: int, v: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, v)) % p for row in mats[k])

    found: set[tuple[int, ...]] = set()
    chosen: list[frozenset] = []
    dimv: list[int] = []

    def ok(node: int) -> bool:
        for k in ready[node]:
            a = q.arrows[k]
            src, dst = chosen[a.src], chosen[a.dst]
            if any(image(k, v) not in dst for v in src):
                return False
        return True

    def rec(node: int) -> None:
        if node == n:
            found.add(tuple(dimv))
            return
        for dim, members in spaces[node]:
            chosen.append(members)
            dimv.append(dim)
            if ok(node):
                rec(node + 1)
            chosen.pop()
            dimv.pop()

    rec(0)
    return found
