"""Central charges, phases and their continuous lifts along moduli paths.

A period model maps a moduli point ``t`` to a complex vector ``Pi(t)``; the
central charge of an integer charge vector ``Q`` is ``Z = sum_i Q_i Pi_i(t)``
and its phase is ``arg(Z) / pi``, taken in ``[0, 2)`` or lifted to R by
continuity along a path.
"""

from __future__ import annotations

import cmath
import math
from abc import ABC, abstractmethod
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import DomainError, MasslessCharge, RefinementExhausted, StructureError

MASSLESS_TOL = 1e-12
MAX_STEP = 0.25
MAX_DEPTH = 40
DEFAULT_SAMPLES = 64

Charge = Sequence[int]


# ---------------------------------------------------------------------------
# Period models
# ---------------------------------------------------------------------------

class PeriodModel(ABC):
    rank: int
    description: str = ""

    @abstractmethod
    def __call__(self, t: complex) -> list[complex]:
        ...


class PolynomialPeriods(PeriodModel):
    """Each component is a polynomial in one complex modulus (constant term first)."""

    def __init__(self, components: Sequence[Sequence[complex]], description: str = ""):
        if not components:
            raise StructureError("a period model needs at least one component")
        self.components = tuple(tuple(complex(c) for c in comp) or (0j,) for comp in components)
        self.rank = len(self.components)
        self.description = description or f"polynomial periods, rank {self.rank}"

    def __call__(self, t: complex) -> list[complex]:
        t = complex(t)
        out = []
        for comp in self.components:
            acc = 0j
            for c in reversed(comp):
                acc = acc * t + c
            out.append(acc)
        return out

    def __repr__(self) -> str:
        return f"PolynomialPeriods({[list(c) for c in self.components]!r})"


class TabulatedPeriods(PeriodModel):
    """Periods sampled at real path parameters, linearly interpolated.

    The moduli point passed in is the path parameter ``s`` itself, so these
    models pair with :meth:`ModuliPath.parameter` paths.
    """

    def __init__(self, samples: Sequence[tuple[float, Sequence[complex]]], description: str = ""):
        pts = sorted((float(s), tuple(complex(v) for v in vec)) for s, vec in samples)
        if len(pts) < 2:
            raise StructureError("tabulated periods need at least two samples")
        ranks = {len(v) for _, v in pts}
        if len(ranks) != 1:
            raise StructureError("tabulated period vectors have inconsistent lengths")
        self.s = [p[0] for p in pts]
        if any(b <= a for a, b in zip(self.s, self.s[1:])):
            raise StructureError("tabulated sample parameters must be distinct")
        self.values = [p[1] for p in pts]
        self.rank = ranks.pop()
        self.description = description or f"tabulated periods, {len(pts)} samples"

    def __call__(self, t: complex) -> list[complex]:
        t = complex(t)
        if abs(t.imag) > 1e-12 or not (self.s[0] - 1e-12 <= t.real <= self.s[-1] + 1e-12):
            raise DomainError(f"{t} outside the tabulated range [{self.s[0]}, {self.s[-1]}]")
        s = min(max(t.real, self.s[0]), self.s[-1])
        k = min(max(bisect_right(self.s, s) - 1, 0), len(self.s) - 2)
        w = (s - self.s[k]) / (self.s[k + 1] - self.s[k])
        return [(1 - w) * a + w * b for a, b in zip(self.values[k], self.values[k + 1])]


class FunctionPeriods(PeriodModel):
    """User-supplied evaluator; must be a pure function of ``t``."""

    def __init__(self, fn: Callable[[complex], Sequence[complex]], rank: int, description: str = ""):
        self.fn = fn
        self.rank = rank
        self.description = description or "user periods"

    def __call__(self, t: complex) -> list[complex]:
        vals = [complex(v) for v in self.fn(t)]
        if len(vals) != self.rank:
            raise StructureError(f"evaluator returned {len(vals)} periods, expected {self.rank}")
        return vals


def large_volume_periods() -> PolynomialPeriods:
    """``Pi(t) = (1, t, t^2/2)``."""
    return PolynomialPeriods([[1], [0, 1], [0, 0, 0.5]], "large-volume preset (1, t, t^2/2)")


# ---------------------------------------------------------------------------
# Paths in moduli space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModuliPath:
    """A map ``s -> t(s)`` on ``[0, 1]``; ``params`` round-trip through config."""

    kind: str
    params: dict = field(hash=False)
    fn: Callable[[float], complex] = field(repr=False, compare=False, hash=False)

    def __call__(self, s: float) -> complex:
        return self.fn(s)

    @property
    def start(self) -> complex:
        return self.fn(0.0)

    @property
    def end(self) -> complex:
        return self.fn(1.0)

    def is_closed(self, tol: float = 1e-12) -> bool:
        return abs(self.start - self.end) <= tol * max(1.0, abs(self.start))

    @classmethod
    def segment(cls, a: complex, b: complex) -> ModuliPath:
        a, b = complex(a), complex(b)
        return cls("segment", {"start": a, "end": b}, lambda s: a + (b - a) * s)

    @classmethod
    def arc(cls, center: complex, radius: float, start_angle: float, end_angle: float) -> ModuliPath:
        c = complex(center)

        def fn(s: float) -> complex:
            if s == 0.0:
                theta = start_angle
            elif s == 1.0:
                theta = end_angle
            else:
                theta = start_angle + (end_angle - start_angle) * s
            return c + radius * _unit(theta)

        return cls("arc", {"center": c, "radius": radius, "start_angle": start_angle,
                           "end_angle": end_angle}, fn)

    @classmethod
    def circle(cls, center: complex, radius: float, turns: int = 1) -> ModuliPath:
        return cls.arc(center, radius, 0.0, 2 * math.pi * turns)

    @classmethod
    def polyline(cls, points: Sequence[complex]) -> ModuliPath:
        pts = [complex(p) for p in points]
        if len(pts) < 2:
            raise StructureError("a polyline needs at least two points")
        m = len(pts) - 1

        def fn(s: float) -> complex:
            if s >= 1.0:
                return pts[-1]
            k = min(int(s * m), m - 1)
            w = s * m - k
            return pts[k] + (pts[k + 1] - pts[k]) * w

        return cls("polyline", {"points": pts}, fn)

    @classmethod
    def parameter(cls) -> ModuliPath:
        """``t(s) = s``: walks a tabulated model along its own parameter."""
        return cls("parameter", {}, lambda s: complex(s))

    def reversed(self) -> ModuliPath:
        f = self.fn
        return ModuliPath("reversed", {"path": self}, lambda s: f(1.0 - s))

    def then(self, other: ModuliPath) -> ModuliPath:
        """Concatenation; the first path runs over ``s in [0, 1/2]``."""
        f, g = self.fn, other.fn
        return ModuliPath("concat", {"paths": [self, other]},
                          lambda s: f(2 * s) if s <= 0.5 else g(2 * s - 1))


def _unit(theta: float) -> complex:
    """``exp(i theta)`` with exact values on the axes."""
    q = theta / (math.pi / 2)
    if q == round(q):
        return (1, 1j, -1, -1j)[int(round(q)) % 4]
    return cmath.exp(1j * theta)


# ---------------------------------------------------------------------------
# Central charge and phases
# ---------------------------------------------------------------------------

def _periods(t: complex, model: PeriodModel, rank: int) -> list[complex]:
    if rank != model.rank:
        raise StructureError(f"charge has length {rank}, period model has rank {model.rank}")
    return model(t)


def central_charge(q: Charge, t: complex, model: PeriodModel) -> complex:
    pi = _periods(t, model, len(q))
    return sum((qi * p for qi, p in zip(q, pi)), 0j)


def phase_of(z: complex, tol: float = MASSLESS_TOL) -> float:
    """``arg(z) / pi`` in ``[0, 2)``."""
    if abs(z) < tol:
        raise MasslessCharge(f"|Z| = {abs(z):.3g} below {tol:g}")
    phi = cmath.phase(z) / math.pi
    if phi < 0:
        phi += 2.0
    return 0.0 if phi >= 2.0 else phi


def phase_principal(q: Charge, t: complex, model: PeriodModel, tol: float = MASSLESS_TOL) -> float:
    return phase_of(central_charge(q, t, model), tol)


def bps_mass_bound(q: Charge, t: complex, model: PeriodModel) -> float:
    return abs(central_charge(q, t, model))


def nearest_branch(principal: float, previous: float) -> float:
    """The representative of ``principal (mod 2)`` closest to ``previous``."""
    return principal + 2.0 * round((previous - principal) / 2.0)


@dataclass
class LiftedPhases:
    """Samples of a path with continuously lifted phases, one row per charge."""

    s: list[float]
    t: list[complex]
    phases: list[list[float]]

    def delta(self, k: int = 0) -> float:
        return self.phases[k][-1] - self.phases[k][0]


def lift_phases(charges: Sequence[Charge], path: ModuliPath, model: PeriodModel, *,
                start: Sequence[float] | None = None, samples: int = DEFAULT_SAMPLES,
                max_step: float = MAX_STEP, max_depth: int = MAX_DEPTH,
                tol: float = MASSLESS_TOL) -> LiftedPhases:
    """Lift the phases of several charges on one shared, adaptively refined grid.

    Samples start on a uniform grid; an interval is bisected until every
    charge moves by less than ``max_step`` across it. ``start`` overrides the
    initial values (each must agree with the principal phase mod 2).
    """
    if samples < 2:
        raise ValueError("need at least two samples")

    def principal_at(s: float) -> tuple[complex, list[float]]:
        t = path(s)
        try:
            return t, [phase_principal(q, t, model, tol) for q in charges]
        except MasslessCharge as exc:
            raise MasslessCharge(f"at s={s!r}, t={t}: {exc}") from None

    t0, phi0 = principal_at(0.0)
    if start is not None:
        if len(start) != len(charges):
            raise ValueError("one start value per charge")
        for p, st in zip(phi0, start):
            if abs(nearest_branch(p, st) - st) > 1e-9:
                raise ValueError(f"start phase {st} is not a lift of the principal phase {p}")
        phi0 = list(start)
    out_s, out_t, out_phi = [0.0], [t0], [list(phi0)]
    grid = [k / (samples - 1) for k in range(samples)]

    def advance(sa: float, sb: float, depth: int) -> None:
        tb, pb = principal_at(sb)
        prev = out_phi[-1]
        lifted = [nearest_branch(p, q) for p, q in zip(pb, prev)]
        if all(abs(a - b) < max_step for a, b in zip(lifted, prev)):
            out_s.append(sb)
            out_t.append(tb)
            out_phi.append(lifted)
            return
        if depth >= max_depth:
            raise RefinementExhausted(f"phase still jumps by >= {max_step} on [{sa}, {sb}]")
        mid = 0.5 * (sa + sb)
        if not (sa < mid < sb):
            raise RefinementExhausted(f"cannot bisect [{sa}, {sb}] further")
        advance(sa, mid, depth + 1)
        advance(mid, sb, depth + 1)

    for sa, sb in zip(grid, grid[1:]):
        advance(sa, sb, 0)
    return LiftedPhases(out_s, out_t, [list(col) for col in zip(*out_phi)])


def lift_phase(q: Charge, path: ModuliPath, model: PeriodModel, *, start: float | None = None,
               **kwargs) -> LiftedPhases:
    return lift_phases([q], path, model, start=None if start is None else [start], **kwargs)


def winding_number(values: Sequence[complex]) -> int:
    """Winding of a closed polygon around 0, by signed crossings of the positive real axis."""
    w = 0
    pts = list(values)
    if pts[0] != pts[-1]:
        pts.append(pts[0])
    for a, b in zip(pts, pts[1:]):
        if a.imag < 0 <= b.imag or b.imag < 0 <= a.imag:
            # real part of the segment where it meets the real axis
            x = a.real + (b.real - a.real) * (-a.imag) / (b.imag - a.imag)
            if x > 0:
                w += 1 if b.imag >= 0 > a.imag else -1
    return w
