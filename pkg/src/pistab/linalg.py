"""Exact rational matrices.

Small dense matrices over :class:`fractions.Fraction`. Shapes are carried
explicitly so that ``0 x n`` and ``n x 0`` matrices (maps into or out of a
zero vector space) behave like any other matrix.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Number = int | Fraction


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact matrices; use Fraction or 'p/q'")
    return Fraction(x)


class QMatrix:
    """Immutable ``nrows x ncols`` matrix of Fractions."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[Sequence] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix dimension")
        if rows is None:
            data = tuple(tuple(Fraction(0) for _ in range(ncols)) for _ in range(nrows))
        else:
            data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
            if len(data) != nrows or any(len(r) != ncols for r in data):
                raise ValueError(f"entries do not form a {nrows}x{ncols} matrix")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> QMatrix:
        rows = list(rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> QMatrix:
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"QMatrix({self.nrows}x{self.ncols}: [{body}])"

    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows)) if other.nrows else [() for _ in range(other.ncols)]
        out = [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows]
        return QMatrix(self.nrows, other.ncols, out)

    def __add__(self, other: QMatrix) -> QMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return QMatrix(self.nrows, self.ncols,
                       [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> QMatrix:
        return QMatrix(self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def __sub__(self, other: QMatrix) -> QMatrix:
        return self + (-other)

    def scale(self, c: Number) -> QMatrix:
        c = to_fraction(c)
        return QMatrix(self.nrows, self.ncols, [[c * a for a in r] for r in self.rows])

    def transpose(self) -> QMatrix:
        return QMatrix(self.ncols, self.nrows, [list(c) for c in zip(*self.rows)] if self.nrows
                       else [[] for _ in range(self.ncols)])

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def rank(self) -> int:
        return len(rref(self.rows, self.ncols)[1])

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        return nullspace(self.rows, self.ncols)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        if p != 1:
            m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : A x = 0}, one vector per free column."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def span_basis(vectors: Iterable[Sequence[Fraction]], dim: int) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical basis (RREF rows) of the span of ``vectors`` in Q^dim."""
    red, _ = rref([list(v) for v in vectors], dim)
    return tuple(tuple(r) for r in red)


def intersect_spans(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]],
                    dim: int) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical basis of span(a) ∩ span(b)."""
    if not a or not b:
        return ()
    # x = sum alpha_i a_i = sum beta_j b_j  <=>  [A^T | -B^T] (alpha, beta) = 0
    cols = [list(v) for v in a] + [[-x for x in v] for v in b]
    system = [[cols[k][i] for k in range(len(cols))] for i in range(dim)]
    vecs = []
    for sol in nullspace(system, len(cols)):
        vecs.append([sum((sol[k] * a[k][i] for k in range(len(a))), Fraction(0)) for i in range(dim)])
    return span_basis(vecs, dim)


def block_diag(a: QMatrix, b: QMatrix) -> QMatrix:
    rows = [list(r) + [Fraction(0)] * b.ncols for r in a.rows]
    rows += [[Fraction(0)] * a.ncols + list(r) for r in b.rows]
    return QMatrix(a.nrows + b.nrows, a.ncols + b.ncols, rows)


def hstack(mats: Sequence[QMatrix], nrows: int) -> QMatrix:
    ncols = sum(m.ncols for m in mats)
    rows = [[x for m in mats for x in m.rows[i]] for i in range(nrows)]
    return QMatrix(nrows, ncols, rows)


def vstack(mats: Sequence[QMatrix], ncols: int) -> QMatrix:
    rows = [r for m in mats for r in m.rows]
    return QMatrix(len(rows), ncols, rows)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def det(m: QMatrix) -> Fraction:
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in m.rows]
    n, sign, out = m.nrows, 1, Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * out


def pencil_polynomial(a: QMatrix, b: QMatrix) -> list[Fraction]:
    """Coefficients (constant term first) of det(a - x b), by exact interpolation."""
    n = a.nrows
    xs = [Fraction(k) for k in range(n + 1)]
    ys = [det(a - b.scale(x)) for x in xs]
    coeffs = [Fraction(0)] * (n + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        # yi * prod_{j != i} (x - xj) / (xi - xj)
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, c in enumerate(basis):
            coeffs[k] += yi * c / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Distinct rational roots of a polynomial given constant term first.

    Candidates come from numerical roots snapped to denominators dividing the
    leading coefficient (rational root theorem); each is confirmed exactly.
    """
    coeffs = [to_fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    lcm = 1
    for c in coeffs:
        lcm = math.lcm(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    lead = abs(ints[-1])
    roots: set[Fraction] = set()
    if ints[0] == 0:
        roots.add(Fraction(0))
    for r in np.roots([float(c) for c in reversed(ints)]):
        if abs(r.imag) > 1e-3 * max(1.0, abs(r.real)):
            continue
        for k in (0, -1, 1):
            cand = Fraction(int(round(r.real * lead)) + k, lead)
            if cand not in roots and _horner(ints, cand) == 0:
                roots.add(cand)
    return sorted(roots)


def _horner(coeffs: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
