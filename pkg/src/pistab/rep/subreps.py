"""Dimension vectors of subrepresentations.

Subrepresentations are node-wise subspaces ``U_i`` with ``X_a(U_src) ⊆ U_dst``
for every arrow (arrows act source to target). The search builds a finite
family of genuine subreps and reads off their dimension vectors:

* arrow closures of search vectors: coordinate vectors, seeded random
  rational vectors, kernel vectors of path maps, and (generalized) eigenvectors
  of square path pencils at their rational eigenvalues;
* interiors (largest subrep inside a node-wise subspace) of support patterns
  and of coordinate/random hyperplanes at each node;
* sums and intersections of the family members, iterated to a fixed point.

Every reported vector is realized by an explicit subrep; completeness is not
guaranteed over Q, which is what the finite-field oracle in
:mod:`pistab.rep.finite_field` checks for small dimensions.
"""

from __future__ import annotations

import itertools
import logging
import random
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import BoundExceeded
from ..linalg import QMatrix, intersect_spans, nullspace, pencil_polynomial, rational_roots, span_basis
from .core import QuiverRep, paths_up_to, square_pencils

log = logging.getLogger(__name__)

DEFAULT_MAX_TOTAL = 12
DEFAULT_SEARCH_VECTORS = 64
# representatives kept per dimension vector during the lattice closure
_KEEP_PER_DIMVECTOR = 4

Subspace = tuple[tuple[Fraction, ...], ...]
Subrep = tuple[Subspace, ...]


def _dimvec(u: Subrep) -> tuple[int, ...]:
    return tuple(len(b) for b in u)


def arrow_closure(rep: QuiverRep, generators: Sequence[Iterable[Sequence[Fraction]]]) -> Subrep:
    """Smallest subrep containing ``generators[i]`` at each node ``i``."""
    spans = [span_basis(g, d) for g, d in zip(generators, rep.dims)]
    changed = True
    while changed:
        changed = False
        for a, x in zip(rep.quiver.arrows, rep.maps):
            if not spans[a.src] or not rep.dims[a.dst]:
                continue
            images = [x.apply(v) for v in spans[a.src]]
            new = span_basis(list(spans[a.dst]) + images, rep.dims[a.dst])
            if len(new) != len(spans[a.dst]):
                spans[a.dst] = new
                changed = True
    return tuple(spans)


def interior(rep: QuiverRep, bound: Sequence[Subspace]) -> Subrep:
    """Largest subrep contained in the node-wise subspaces ``bound``."""
    spans = [span_basis(b, d) for b, d in zip(bound, rep.dims)]
    changed = True
    while changed:
        changed = False
        for a, x in zip(rep.quiver.arrows, rep.maps):
            s, t = a.src, a.dst
            if not spans[s] or len(spans[t]) == rep.dims[t]:
                continue
            # annihilator rows of U_t; u in U_s survives iff ann @ x @ u = 0
            ann = nullspace([list(r) for r in spans[t]], rep.dims[t]) if spans[t] else \
                [tuple(Fraction(int(i == j)) for j in range(rep.dims[t])) for i in range(rep.dims[t])]
            imgs = [x.apply(u) for u in spans[s]]
            system = [[sum((h[k] * img[k] for k in range(len(h))), Fraction(0)) for img in imgs]
                      for h in ann]
            coeffs = nullspace(system, len(imgs))
            new_vecs = [[sum((c[j] * spans[s][j][i] for j in range(len(c))), Fraction(0))
                         for i in range(rep.dims[s])] for c in coeffs]
            new = span_basis(new_vecs, rep.dims[s])
            if len(new) != len(spans[s]):
                spans[s] = new
                changed = True
    return tuple(spans)


def is_subrep(rep: QuiverRep, u: Subrep) -> bool:
    for a, x in zip(rep.quiver.arrows, rep.maps):
        for v in u[a.src]:
            img = x.apply(v)
            if len(span_basis(list(u[a.dst]) + [img], rep.dims[a.dst])) != len(u[a.dst]):
                return False
    return True


def _search_vectors(dim: int, count: int, rng: random.Random) -> list[tuple[Fraction, ...]]:
    vecs = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    for _ in range(count if dim else 0):
        vecs.append(tuple(Fraction(rng.randint(-7, 7), rng.randint(1, 3)) for _ in range(dim)))
    return vecs


def special_vectors(rep: QuiverRep, max_len: int = 3) -> tuple[list[list[tuple[Fraction, ...]]],
                                                                 list[list[tuple[Fraction, ...]]]]:
    """Kernel/eigen vectors and cokernel/left-eigen covectors per node.

    Vectors seed arrow closures (small subreps); covectors cut hyperplanes
    whose interiors give large subreps (e.g. the complement of a rational
    eigenline when the rest of the spectrum is irrational).
    """
    vecs: list[list[tuple[Fraction, ...]]] = [[] for _ in rep.dims]
    covecs: list[list[tuple[Fraction, ...]]] = [[] for _ in rep.dims]
    q = rep.quiver
    for p in paths_up_to(q, max_len):
        s, t = q.path_endpoints(p)
        m = rep.path_matrix(p)
        vecs[s].extend(m.nullspace())
        covecs[t].extend(m.transpose().nullspace())
    for s, a, b in square_pencils(rep, max_len):
        poly = pencil_polynomial(a, b)
        lams = rational_roots(poly) if any(poly) else [Fraction(0), Fraction(1), Fraction(-1)]
        closed = b == QMatrix.identity(b.nrows)
        for lam in lams:
            m = a - b.scale(lam)
            power = m
            for _ in range(rep.dims[s] if closed else 1):
                vecs[s].extend(power.nullspace())
                if closed:
                    covecs[s].extend(power.transpose().nullspace())
                power = power @ m
    return vecs, covecs


def _hyperplane(dim: int, normal: Sequence[Fraction]) -> Subspace:
    return tuple(tuple(v) for v in nullspace([list(normal)], dim))


def subrep_family(rep: QuiverRep, *, search_vectors: int = DEFAULT_SEARCH_VECTORS,
                  seed: int = 0, max_total: int = DEFAULT_MAX_TOTAL) -> dict[tuple[int, ...], list[Subrep]]:
    """Explicit subreps grouped by dimension vector."""
    if rep.total_dim > max_total:
        raise BoundExceeded(f"total dimension {rep.total_dim} exceeds the cap {max_total}")
    dims = rep.dims
    n = len(dims)
    rng = random.Random(seed)
    full: list[Subspace] = [span_basis(_search_vectors(d, 0, rng), d) for d in dims]
    empty: list[Subspace] = [() for _ in dims]

    family: dict[tuple[int, ...], list[Subrep]] = {}
    seen: set[Subrep] = set()

    def add(u: Subrep) -> bool:
        if u in seen:
            return False
        bucket = family.setdefault(_dimvec(u), [])
        if len(bucket) >= _KEEP_PER_DIMVECTOR:
            return False
        seen.add(u)
        bucket.append(u)
        return True

    add(tuple(empty))
    add(tuple(full))

    support = [i for i in range(n) if dims[i]]
    for r in range(1, len(support)):
        if r > 3 and r < len(support) - 3:
            continue  # middle-sized supports are reached by sums/intersections
        for sub in itertools.combinations(support, r):
            add(interior(rep, [full[i] if i in sub else () for i in range(n)]))

    vecs, covecs = special_vectors(rep)
    for i in support:
        randoms = _search_vectors(dims[i], search_vectors, rng)
        for v in vecs[i] + randoms:
            gens = [[] for _ in dims]
            gens[i] = [v]
            add(arrow_closure(rep, gens))
        for h in covecs[i] + randoms:
            bound = list(full)
            bound[i] = _hyperplane(dims[i], h)
            add(interior(rep, bound))

    while True:
        members = [u for bucket in family.values() for u in bucket]
        grew = False
        for u, w in itertools.combinations(members, 2):
            s = tuple(span_basis(list(a) + list(b), d) for a, b, d in zip(u, w, dims))
            x = tuple(intersect_spans(a, b, d) for a, b, d in zip(u, w, dims))
            for cand in (s, x):
                if _dimvec(cand) not in family:
                    grew |= add(cand)
        if not grew:
            break
    return family


def enumerate_subrep_dimvectors(rep: QuiverRep, *, search_vectors: int = DEFAULT_SEARCH_VECTORS,
                                seed: int = 0, max_total: int = DEFAULT_MAX_TOTAL,
                                verify: bool = False, prime: int = 5) -> set[tuple[int, ...]]:
    """Dimension vectors of subrepresentations, including 0 and ``rep.dims``.

    With ``verify=True`` the result is also compared with the exhaustive
    search over ``F_prime`` and any disagreement is logged.
    """
    found = set(subrep_family(rep, search_vectors=search_vectors, seed=seed, max_total=max_total))
    if verify:
        from .finite_field import DegenerateReduction, subrep_dimvectors_mod_p

        try:
            oracle = subrep_dimvectors_mod_p(rep, prime)
        except DegenerateReduction as exc:
            log.info("finite-field check skipped: %s", exc)
        else:
            if oracle != found:
                log.warning("subrep search disagrees with F_%d oracle: missing %s, extra %s",
                            prime, sorted(oracle - found), sorted(found - oracle))
    return found
