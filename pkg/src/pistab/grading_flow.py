"""Flow of morphism degrees under motion in moduli space.

A morphism ``E -> F`` of degree ``n`` at ``K`` has degree
``n + [phi_L(F) - phi_K(F)] - [phi_L(E) - phi_K(E)]`` at ``L``, with phases
lifted continuously along the path from ``K`` to ``L``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .central_charge import (MASSLESS_TOL, ModuliPath, PeriodModel, lift_phases,
                             phase_principal)
from .errors import NotClosed, NumericalFailure

PARITY_TOL = 1e-6
NEGATIVE_TOL = 1e-9
EVEN_TOL = 1e-9


def flow_degree(n, phi_k_e, phi_k_f, phi_l_e, phi_l_f) -> Fraction:
    """Degree at ``L`` of a degree-``n`` morphism at ``K``.

    Evaluated exactly on the binary values of the inputs, so flowing
    ``K -> L -> K`` returns ``n`` with no rounding at all.
    """
    n, ke, kf, le, lf = (Fraction(x) for x in (n, phi_k_e, phi_k_f, phi_l_e, phi_l_f))
    return n + (lf - kf) - (le - ke)


@dataclass(frozen=True)
class MorphismRecord:
    source: tuple[int, ...]
    target: tuple[int, ...]
    degree: float
    reference: complex
    phase_source: float
    phase_target: float

    @classmethod
    def at(cls, source: Sequence[int], target: Sequence[int], degree: float, point: complex,
           model: PeriodModel, tol: float = MASSLESS_TOL) -> MorphismRecord:
        """Record with principal reference phases at ``point``."""
        return cls(tuple(source), tuple(target), degree, complex(point),
                   phase_principal(source, point, model, tol), phase_principal(target, point, model, tol))


@dataclass
class FlowTrace:
    s: list[float]
    phase_source: list[float]
    phase_target: list[float]
    degree: list[float]
    record: MorphismRecord | None = field(default=None, repr=False)

    @property
    def start_degree(self) -> float:
        return self.degree[0]

    @property
    def end_degree(self) -> float:
        return self.degree[-1]


def flow_along_path(m: MorphismRecord, path: ModuliPath, model: PeriodModel, **lift) -> FlowTrace:
    """Degree of ``m`` along ``path``; the path must start at ``m.reference``."""
    if abs(path.start - m.reference) > 1e-9 * max(1.0, abs(m.reference)):
        raise ValueError(f"path starts at {path.start}, record refers to {m.reference}")
    lifted = lift_phases([m.source, m.target], path, model,
                         start=[m.phase_source, m.phase_target], **lift)
    pe, pf = lifted.phases
    degrees = [float(flow_degree(m.degree, m.phase_source, m.phase_target, e, f)) for e, f in zip(pe, pf)]
    return FlowTrace(lifted.s, pe, pf, degrees, m)


def monodromy_shift(q_e: Sequence[int], q_f: Sequence[int], closed_path: ModuliPath,
                    model: PeriodModel, **lift) -> int:
    """Degree change of any ``E -> F`` morphism around a loop: ``2 (w_F - w_E)``."""
    if not closed_path.is_closed():
        raise NotClosed(f"path runs from {closed_path.start} to {closed_path.end}")
    lifted = lift_phases([q_e, q_f], closed_path, model, **lift)
    shift = lifted.delta(1) - lifted.delta(0)
    k = round(shift / 2)
    if abs(shift - 2 * k) > EVEN_TOL:
        raise NumericalFailure(f"monodromy shift {shift!r} is not an even integer; "
                               "the loop probably passes too close to a massless point")
    return 2 * k


class Violation(enum.Enum):
    NEGATIVE_DEGREE = "NegativeDegree"
    PARITY_FLIP = "ParityFlip"


@dataclass(frozen=True)
class Flag:
    index: int
    kind: Violation
    start: float
    end: float


def abelian_violation_check(endpoints: Sequence[tuple[float, float]], *,
                            negative_tol: float = NEGATIVE_TOL,
                            parity_tol: float = PARITY_TOL) -> list[Flag]:
    """Flags for ``(start_degree, end_degree)`` pairs that break a fixed abelian category.

    NegativeDegree: the degree ends below ``-negative_tol``. ParityFlip: the
    degree moved by an odd integer (within ``parity_tol``); non-integral
    shifts carry no parity.
    """
    flags = []
    for i, (start, end) in enumerate(endpoints):
        if end < -negative_tol:
            flags.append(Flag(i, Violation.NEGATIVE_DEGREE, start, end))
        shift = end - start
        k = round(shift)
        if abs(shift - k) <= parity_tol and k % 2:
            flags.append(Flag(i, Violation.PARITY_FLIP, start, end))
    return flags
