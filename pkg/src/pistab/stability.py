"""Slope, King (theta), Pi and deformed-slope stability.

All four tests share one verdict type. Subobjects are always supplied from
outside: as explicit Chern data, as subrepresentation dimension vectors, or
as subcharges obtained by pushing those through a charge map.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .central_charge import (MASSLESS_TOL, ModuliPath, PeriodModel, lift_phases,
                             phase_principal)
from .errors import NormalizationError, StructureError, ZeroRank
from .linalg import to_fraction
from .rep import QuiverRep, enumerate_subrep_dimvectors

PHASE_TOL = 1e-9


class Status(enum.Enum):
    STABLE = "Stable"
    SEMISTABLE = "Semistable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"


@dataclass
class Verdict:
    status: Status
    witness: tuple | None = None
    phases: dict = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.status is Status.STABLE

    def to_json(self) -> dict:
        out: dict = {"verdict": self.status.value}
        if self.witness is not None:
            out["witness"] = [_jsonable(x) for x in self.witness]
        if self.phases:
            out["phases"] = {k: _jsonable(v) for k, v in self.phases.items()}
        return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


# ---------------------------------------------------------------------------
# Slope stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChernData:
    """Integrated degree-k trace pairings ``ch[k]``; ``ch[0]`` is the rank, ``ch[1]`` the degree."""

    ch: tuple[Fraction, ...]

    def __post_init__(self):
        ch = tuple(to_fraction(x) for x in self.ch)
        if not 1 <= len(ch) <= 4:
            raise StructureError("Chern data runs from ch_0 up to at most ch_3")
        object.__setattr__(self, "ch", ch)

    @classmethod
    def of(cls, *values) -> ChernData:
        return cls(tuple(values))

    @property
    def rank(self) -> Fraction:
        return self.ch[0]

    @property
    def c1(self) -> Fraction:
        return self.ch[1] if len(self.ch) > 1 else Fraction(0)

    def pairing(self, k: int) -> Fraction:
        return self.ch[k] if k < len(self.ch) else Fraction(0)

    def __add__(self, other: ChernData) -> ChernData:
        n = max(len(self.ch), len(other.ch))
        return ChernData(tuple(self.pairing(k) + other.pairing(k) for k in range(n)))


def mu_slope(c: ChernData) -> Fraction:
    if c.rank == 0:
        raise ZeroRank("slope of a rank-zero object")
    return c.c1 / c.rank


def _compare(values: Sequence, target, exact: bool, tol: float = 0.0):
    """Status from ``values[i] - target``: all < 0 stable, max == 0 semistable."""
    if not values:
        return Status.STABLE, None
    best = max(range(len(values)), key=lambda i: values[i])
    gap = values[best] - target
    if exact:
        if gap < 0:
            return Status.STABLE, None
        return (Status.SEMISTABLE, best) if gap == 0 else (Status.UNSTABLE, best)
    if gap < -tol:
        return Status.STABLE, None
    return (Status.MARGINAL, best) if gap <= tol else (Status.UNSTABLE, best)


def is_mu_stable(c: ChernData, subobjects: Sequence[ChernData]) -> Verdict:
    mu = mu_slope(c)
    slopes = [mu_slope(s) for s in subobjects]
    status, k = _compare(slopes, mu, exact=True)
    phases = {"object": mu}
    if k is None:
        return Verdict(status, None, phases)
    phases["witness"] = slopes[k]
    return Verdict(status, subobjects[k].ch, phases)


# ---------------------------------------------------------------------------
# King stability
# ---------------------------------------------------------------------------

def theta_pairing(theta: Sequence, d: Sequence[int]) -> Fraction:
    if len(theta) != len(d):
        raise StructureError(f"theta has {len(theta)} entries, dimension vector {len(d)}")
    return sum((to_fraction(a) * b for a, b in zip(theta, d)), Fraction(0))


def is_theta_stable(rep: QuiverRep, theta: Sequence, *, subreps: set | None = None,
                    **search) -> Verdict:
    """Stable iff ``theta . d' < 0`` for every proper nonzero subrep dimension vector."""
    theta = [to_fraction(x) for x in theta]
    if theta_pairing(theta, rep.dims) != 0:
        raise NormalizationError(f"theta . dims = {theta_pairing(theta, rep.dims)}, expected 0")
    if subreps is None:
        subreps = enumerate_subrep_dimvectors(rep, **search)
    proper = sorted(d for d in subreps if any(d) and d != rep.dims)
    values = [theta_pairing(theta, d) for d in proper]
    status, k = _compare(values, Fraction(0), exact=True)
    if k is None:
        return Verdict(status, None, {"object": Fraction(0)})
    return Verdict(status, proper[k], {"object": Fraction(0), "witness": values[k]})


# ---------------------------------------------------------------------------
# Pi stability
# ---------------------------------------------------------------------------

def apply_charge_map(d: Sequence[int], charge_map: Sequence[Sequence[int]] | None) -> tuple[int, ...]:
    """Row vector ``d`` times the (nodes x basis) integer matrix; identity when None."""
    if charge_map is None:
        return tuple(int(x) for x in d)
    if len(charge_map) != len(d):
        raise StructureError(f"charge map has {len(charge_map)} rows, quiver has {len(d)} nodes")
    width = len(charge_map[0])
    return tuple(sum(int(d[i]) * int(charge_map[i][j]) for i in range(len(d))) for j in range(width))


def rep_subcharges(rep: QuiverRep, charge_map=None, **search) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """Charge of ``rep`` and of its proper nonzero subreps (deduplicated, sorted)."""
    subs = enumerate_subrep_dimvectors(rep, **search)
    proper = sorted(d for d in subs if any(d) and d != rep.dims)
    charges = []
    for d in proper:
        q = apply_charge_map(d, charge_map)
        if q not in charges:
            charges.append(q)
    return apply_charge_map(rep.dims, charge_map), charges


def is_pi_stable(obj, subcharges: Sequence[Sequence[int]] | None, t: complex | None,
                 model: PeriodModel, charge_map=None, *, path: ModuliPath | None = None,
                 tol: float = PHASE_TOL, massless_tol: float = MASSLESS_TOL, **search) -> Verdict:
    """Phase comparison of an object with its subobjects at ``t``.

    ``obj`` is a charge vector (with explicit ``subcharges``) or a
    :class:`QuiverRep`, whose subcharges come from its subreps through
    ``charge_map``. With ``path``, phases are lifted along it and compared at
    its endpoint (``t`` is then ignored).
    """
    if isinstance(obj, QuiverRep):
        q, subs = rep_subcharges(obj, charge_map, **search)
        if subcharges is not None:
            subs = [tuple(s) for s in subcharges]
    else:
        q = tuple(int(x) for x in obj)
        subs = [tuple(int(x) for x in s) for s in (subcharges or [])]
    subs = [s for s in subs if any(s) and s != q]
    if path is None:
        phi = phase_principal(q, t, model, massless_tol)
        sub_phis = [phase_principal(s, t, model, massless_tol) for s in subs]
        # principal phases near 0 and near 2 describe the same ray
        sub_phis = [phi if abs(abs(x - phi) - 2.0) <= tol else x for x in sub_phis]
    else:
        lifted = lift_phases([q] + subs, path, model, tol=massless_tol)
        phi = lifted.phases[0][-1]
        sub_phis = [row[-1] for row in lifted.phases[1:]]
    status, k = _compare(sub_phis, phi, exact=False, tol=tol)
    if k is None:
        return Verdict(status, None, {"object": phi})
    return Verdict(status, subs[k], {"object": phi, "witness": sub_phis[k]})


# ---------------------------------------------------------------------------
# Deformed slope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussQ:
    """Gaussian rational ``re + i im``; exact when the parts are Fractions."""

    re: Fraction
    im: Fraction

    def __add__(self, o: GaussQ) -> GaussQ:
        return GaussQ(self.re + o.re, self.im + o.im)

    def __mul__(self, o: GaussQ) -> GaussQ:
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def scale(self, c) -> GaussQ:
        return GaussQ(self.re * c, self.im * c)

    def __pow__(self, k: int) -> GaussQ:
        out = GaussQ(Fraction(1), Fraction(0))
        for _ in range(k):
            out = out * self
        return out


@dataclass(frozen=True)
class Rotation:
    """``exp(i theta)`` given by its exact cosine and sine."""

    cos: Fraction
    sin: Fraction

    @classmethod
    def from_angle(cls, theta: float) -> Rotation:
        return cls(Fraction(math.cos(theta)), Fraction(math.sin(theta)))


def mmms_trace(c: ChernData, omega, d: int, ls) -> GaussQ:
    """``Tr (omega + i ls^2 F)^d`` integrated: ``sum_k C(d,k) omega^(d-k) (i ls^2)^k p_k``."""
    if d not in (1, 2, 3):
        raise StructureError("MMMS slope is defined for d = 1, 2, 3")
    omega, ls2 = to_fraction(_exact(omega)), to_fraction(_exact(ls)) ** 2
    i_ls2 = GaussQ(Fraction(0), ls2)
    total = GaussQ(Fraction(0), Fraction(0))
    for k in range(d + 1):
        term = (i_ls2 ** k).scale(comb(d, k) * omega ** (d - k) * c.pairing(k))
        total = total + term
    return total


def mmms_slope(c: ChernData, omega, theta, d: int, ls) -> Fraction | float:
    """``Im exp(i theta) Tr (omega + i ls^2 F)^d``.

    Exact (a Fraction) when ``omega`` and ``ls`` are rational and ``theta`` is a
    :class:`Rotation`; a float for a real angle.
    """
    x = mmms_trace(c, omega, d, ls)
    if isinstance(theta, Rotation):
        return theta.cos * x.im + theta.sin * x.re
    return math.cos(theta) * float(x.im) + math.sin(theta) * float(x.re)


def _exact(x):
    return Fraction(x) if isinstance(x, float) else x
