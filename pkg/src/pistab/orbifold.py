"""McKay quivers for abelian orbifolds of C^3 and linear sigma model phases.

Node ``i`` of the McKay quiver of ``C^3/Z_n`` is the character
``g -> zeta**i`` with ``zeta = exp(2 pi i / n)``. The coordinate ``z_k`` carries
charge ``a_k``, so tensoring node ``i`` with the defining representation gives
one arrow ``i -> i + a_k`` for each ``k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidSpec, StructureError


@dataclass(frozen=True)
class OrbifoldSpec:
    order: int
    weights: tuple[int, int, int]

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise InvalidSpec(f"group order must be a positive integer, got {self.order!r}")
        if len(self.weights) != 3:
            raise InvalidSpec("an orbifold of C^3 needs exactly three weights")
        n = int(self.order)
        w = tuple(int(a) % n for a in self.weights)
        if sum(w) % n:
            raise InvalidSpec(f"weights {tuple(self.weights)} do not sum to 0 mod {n} (not in SU(3))")
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class LinearSigmaSpec:
    weights: tuple[int, ...]
    fi_parameter: float

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        if len(w) != 6:
            raise InvalidSpec("linear sigma model needs six weights")
        if any(x < 0 for x in w[:5]):
            raise InvalidSpec("weights w1..w5 must be nonnegative")
        if sum(w) != 0:
            raise InvalidSpec(f"weights must sum to zero, got sum {sum(w)}")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class Arrow:
    src: int
    dst: int
    label: int = 1


@dataclass(frozen=True)
class Relation:
    """``path(plus) - path(minus) = 0``.

    Paths are tuples of arrow indices in traversal order, so ``(a, b)`` means
    "first ``a``, then ``b``" and acts on a representation as ``X_b @ X_a``.
    """

    plus: tuple[int, ...]
    minus: tuple[int, ...]


@dataclass(frozen=True)
class Quiver:
    node_count: int
    arrows: tuple[Arrow, ...]
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "relations", tuple(self.relations))
        if self.node_count < 1:
            raise StructureError("a quiver needs at least one node")
        for a in self.arrows:
            if not (0 <= a.src < self.node_count and 0 <= a.dst < self.node_count):
                raise StructureError(f"arrow {a} leaves the node range")
        for r in self.relations:
            self.check_relation(r)

    def path_endpoints(self, path: Sequence[int]) -> tuple[int, int]:
        if not path:
            raise StructureError("empty path")
        for a, b in zip(path, path[1:]):
            if self.arrows[a].dst != self.arrows[b].src:
                raise StructureError(f"path {tuple(path)} is not composable")
        return self.arrows[path[0]].src, self.arrows[path[-1]].dst

    def check_relation(self, r: Relation) -> None:
        if self.path_endpoints(r.plus) != self.path_endpoints(r.minus):
            raise StructureError(f"relation {r} joins paths with different endpoints")

    def out_arrows(self, node: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.src == node]

    def in_arrows(self, node: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.dst == node]

    def to_json(self) -> dict:
        return {
            "nodes": self.node_count,
            "arrows": [{"src": a.src, "dst": a.dst, "label": a.label} for a in self.arrows],
            "relations": [[list(r.plus), list(r.minus)] for r in self.relations],
        }

    @classmethod
    def from_json(cls, data: dict) -> Quiver:
        arrows = tuple(Arrow(int(a["src"]), int(a["dst"]), int(a.get("label", 1)))
                       for a in data["arrows"])
        rels = tuple(Relation(tuple(p), tuple(m)) for p, m in data.get("relations", []))
        return cls(int(data["nodes"]), arrows, rels)


@dataclass(frozen=True)
class McKayQuiver(Quiver):
    spec: OrbifoldSpec | None = field(default=None, compare=False)

    def arrow_index(self, node: int, label: int) -> int:
        return 3 * node + (label - 1)


def build_mckay_quiver(spec: OrbifoldSpec) -> McKayQuiver:
    """McKay quiver of C^3/Z_n with its superpotential relations attached."""
    n = spec.order
    arrows = tuple(Arrow(i, (i + spec.weights[k - 1]) % n, k) for i in range(n) for k in (1, 2, 3))
    q = McKayQuiver(n, arrows, (), spec)
    return replace(q, relations=superpotential_relations(q))


def superpotential_relations(q: McKayQuiver) -> tuple[Relation, ...]:
    """Derivatives of W = Tr(x1 x2 x3 - x1 x3 x2) with one arrow stripped.

    For node ``i`` and labels ``a < b``: ``x^b x^a - x^a x^b`` on paths leaving ``i``.
    """
    if q.spec is None:
        raise StructureError("superpotential relations need the orbifold weights")
    n, w = q.node_count, q.spec.weights
    rels = []
    for i in range(n):
        for a, b in ((1, 2), (1, 3), (2, 3)):
            first_a = (q.arrow_index(i, a), q.arrow_index((i + w[a - 1]) % n, b))
            first_b = (q.arrow_index(i, b), q.arrow_index((i + w[b - 1]) % n, a))
            rels.append(Relation(first_a, first_b))
    return tuple(rels)


def translate_quiver(q: Quiver, shift: int) -> Quiver:
    """Relabel node ``i`` as ``i + shift (mod n)``, keeping arrow order by (node, label)."""
    n = q.node_count
    moved = [(Arrow((a.src + shift) % n, (a.dst + shift) % n, a.label), idx)
             for idx, a in enumerate(q.arrows)]
    order = sorted(range(len(moved)), key=lambda k: (moved[k][0].src, moved[k][0].label, k))
    new_index = {moved[k][1]: pos for pos, k in enumerate(order)}
    arrows = tuple(moved[k][0] for k in order)
    rels = tuple(Relation(tuple(new_index[x] for x in r.plus), tuple(new_index[x] for x in r.minus))
                 for r in q.relations)
    return Quiver(n, arrows, rels)


# ---------------------------------------------------------------------------
# Linear sigma model
# ---------------------------------------------------------------------------

class Phase(enum.Enum):
    GEOMETRIC = "Geometric"
    LANDAU_GINZBURG = "LandauGinzburg"
    BOUNDARY = "Boundary"


def moment_map_value(z: Sequence[complex], spec: LinearSigmaSpec) -> float:
    if len(z) != 6:
        raise InvalidSpec("moment map takes a point of C^6")
    return -spec.fi_parameter + sum(w * abs(zi) ** 2 for w, zi in zip(spec.weights, z))


def classify_phase(spec: LinearSigmaSpec) -> Phase:
    if spec.fi_parameter > 0:
        return Phase.GEOMETRIC
    if spec.fi_parameter < 0:
        return Phase.LANDAU_GINZBURG
    return Phase.BOUNDARY


Monomial = tuple[Fraction | int, Sequence[int]]


def _eval_poly(f: Iterable[Monomial], z: Sequence) -> complex | Fraction:
    total = 0
    for coeff, exps in f:
        term = coeff
        for zi, e in zip(z, exps):
            term = term * zi ** e
        total = total + term
    return total


def _partial(f: Iterable[Monomial], var: int) -> list[Monomial]:
    out = []
    for coeff, exps in f:
        e = list(exps)
        if e[var] == 0:
            continue
        c = coeff * e[var]
        e[var] -= 1
        out.append((c, tuple(e)))
    return out


def critical_locus_check(z: Sequence, f: Sequence[Monomial], tol: float = 1e-12) -> bool:
    """Whether ``grad(z6 * f(z1..z5))`` vanishes at ``z``.

    ``f`` is a list of ``(coefficient, (e1, .., e5))`` monomials. With exact
    inputs (ints/Fractions) the test is exact; otherwise ``|d_i W| <= tol``.
    """
    if len(z) != 6:
        raise InvalidSpec("critical locus check takes a point of C^6")
    for _, exps in f:
        if len(exps) != 5 or any(e < 0 for e in exps):
            raise InvalidSpec(f"bad exponent vector {exps!r}")
    z5, z6 = list(z[:5]), z[5]
    grads = [z6 * _eval_poly(_partial(f, i), z5) for i in range(5)]
    grads.append(_eval_poly(f, z5))
    exact = all(isinstance(x, (int, Fraction)) for x in z) and all(
        isinstance(c, (int, Fraction)) for c, _ in f)
    if exact:
        return all(g == 0 for g in grads)
    return all(abs(g) <= tol for g in grads)
