"""Mertens sums over number fields: partial sums, the constant B, error terms,
the prime-square tail, the x-threshold conditions and prime-ideal audits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.special import polygamma

from .exactmath import euler_gamma, li
from .quadfield import PlaceTable, QuadField, place_table, residue_kappa


class TailWarning(UserWarning):
    """The analytic remainder dominates an enumerated tail."""


# ---------------------------------------------------------------------------
# partial sums
# ---------------------------------------------------------------------------

def mertens_sum(table: PlaceTable) -> float:
    """sum_{q<=x} Phi_q log(q / (q - 1))."""
    if len(table) == 0:
        return 0.0
    q = table.q.astype(np.float64)
    return math.fsum(-table.phi * np.log1p(-1.0 / q))


def mertens_product(table: PlaceTable) -> Fraction:
    """prod_{NP<=x} (1 - 1/NP), exactly."""
    num, den = 1, 1
    for q, phi in zip(table.q.tolist(), table.phi.tolist()):
        num *= (q - 1) ** phi
        den *= q**phi
    return Fraction(num, den)


def prime_reciprocal_sum(table: PlaceTable) -> float:
    """C(x) = sum_{NP<=x} 1/NP."""
    if len(table) == 0:
        return 0.0
    return math.fsum(table.phi / table.q.astype(np.float64))


def log_kappa(field: QuadField) -> float:
    return math.log(residue_kappa(field))


# ---------------------------------------------------------------------------
# the constant B
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantB:
    x: int
    B_estimate: float
    tail_bound: float


def mertens_constant_B(field: QuadField, x: int, table: PlaceTable | None = None) -> ConstantB:
    """B = sum_P (log(1 - 1/NP) + 1/NP) + gamma + log kappa, truncated at x.

    Each omitted summand lies in (-1/NP^2, 0), and there are at most n places
    above each rational prime, so the tail is at most n sum_{m>x} 1/m^2.
    """
    if x < 100:
        raise ValueError("mertens_constant_B needs x >= 100")
    table = place_table(field, x) if table is None else table.restrict(x)
    inv = 1.0 / table.q.astype(np.float64)
    body = math.fsum(table.phi * (np.log1p(-inv) + inv))
    tail = field.degree * float(polygamma(1, x + 1))
    return ConstantB(x, body + euler_gamma() + log_kappa(field), tail)


# ---------------------------------------------------------------------------
# error terms
# ---------------------------------------------------------------------------

def grh_epsilon_shape(field: QuadField, x: float) -> float:
    """6g + 3n log x + 4n, the x-dependent factor of the GRH bound on eps(x)."""
    n = field.degree
    return 6 * field.genus + 3 * n * math.log(x) + 4 * n


def grh_epsilon_bound(field: QuadField, x: float, c: float = 1.0) -> float:
    return c * grh_epsilon_shape(field, x) / math.sqrt(x)


def rho_epsilon_bound(rho: float, x: float, *, c1: float = 1.0, c4: float = 1.0) -> float:
    """Bound on eps(x) when zeta_K has an exceptional zero 1 - rho (supplied,
    never located here)."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    lx = math.log(x)
    return c4 / (rho * lx) * (1 + 1 / (1 - rho)) + 2 * c1 / lx


@dataclass(frozen=True)
class MertensReport:
    field: str
    x: int
    sum_log: float
    sum_recip: float
    main_term: float
    error: float
    grh_bound_shape: float
    normalized_error: float


def mertens_error(field: QuadField, x: int, table: PlaceTable | None = None) -> MertensReport:
    table = place_table(field, x) if table is None else table.restrict(x)
    n, g = field.degree, field.genus
    s = mertens_sum(table)
    main = math.log(math.log(x)) + euler_gamma() + log_kappa(field)
    err = s - main
    return MertensReport(
        field.label,
        x,
        s,
        prime_reciprocal_sum(table),
        main,
        err,
        (n * math.log(x) + g) / math.sqrt(x),
        abs(err) * math.sqrt(x) / grh_epsilon_shape(field, x),
    )


def mertens_sweep(fields: Iterable[QuadField], xs: Sequence[int]) -> list[MertensReport]:
    """Reports for every (field, x), sharing one place table per field."""
    xs = sorted(set(xs))
    rows = []
    for field in sorted(set(fields), key=lambda f: f.disc):
        table = place_table(field, xs[-1])
        rows.extend(mertens_error(field, x, table) for x in xs)
    return rows


# ---------------------------------------------------------------------------
# prime-square tail D(x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SquareTail:
    x: int
    cutoff: int
    partial: float
    remainder: float
    bound: float

    @property
    def value(self) -> float:
        return self.partial + self.remainder


def d_tail_bound(field: QuadField, x: float) -> float:
    """1/(x log x) + (10g + 3n log x)/(3 x sqrt x) + 2n/x."""
    n, g = field.degree, field.genus
    lx = math.log(x)
    return 1 / (x * lx) + (10 * g + 3 * n * lx) / (3 * x * math.sqrt(x)) + 2 * n / x


def prime_square_tail(field: QuadField, x: int, cutoff: int, table: PlaceTable | None = None) -> SquareTail:
    """sum_{x<NP<=X} Phi/NP^2 enumerated, plus n/(X log X) for NP > X."""
    if x > cutoff:
        raise ValueError("need x <= cutoff")
    table = place_table(field, cutoff) if table is None else table.restrict(cutoff)
    sel = table.q > x
    q = table.q[sel].astype(np.float64)
    partial = math.fsum(table.phi[sel] / (q * q)) if q.size else 0.0
    remainder = field.degree / (cutoff * math.log(cutoff))
    if remainder > 0.1 * partial:
        warnings.warn(
            f"remainder estimate {remainder:.3g} beyond X = {cutoff} exceeds 10% of the enumerated tail {partial:.3g}",
            TailWarning,
            stacklevel=2,
        )
    return SquareTail(x, cutoff, partial, remainder, d_tail_bound(field, x))


# ---------------------------------------------------------------------------
# conditions on x
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionGate:
    n: int
    g: float
    c2: float = 1.0
    c3: float = 1.0
    c5: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("degree n must be >= 1")
        if self.g < 0:
            raise ValueError("genus must be >= 0")
        if min(self.c2, self.c3, self.c5) <= 0:
            raise ValueError("constants c2, c3, c5 must be positive")

    @classmethod
    def for_field(cls, field: QuadField, **constants: float) -> "ConditionGate":
        return cls(field.degree, field.genus, **constants)

    def c1_threshold(self) -> float:
        return self.c3 * self.n * self.g**2

    def c2_threshold(self) -> float:
        """Printed form 32^2 c2^-2 n log^2(n^(1/2)/c2)."""
        return 32**2 / self.c2**2 * self.n * math.log(math.sqrt(self.n) / self.c2) ** 2

    def c2_proof_threshold(self) -> float:
        """log x above which the lemma's proof applies: y = sqrt(log x) at least
        16c (c <= e) or 32c log c (c > e), c = n^(1/2)/c2."""
        c = math.sqrt(self.n) / self.c2
        y = 16 * c if c <= math.e else 32 * c * math.log(c)
        return y * y

    def c3_threshold(self) -> float:
        if self.g <= 0:
            raise ValueError("condition C3 needs g > 0")
        g = self.g
        return self.c5 * g * math.log(2 * g) * math.log(math.log(12 * g))


@dataclass(frozen=True)
class GateResult:
    x: float
    C1: bool
    C2: bool
    C2_proof: bool
    C3: bool | None


def condition_gate(gate: ConditionGate, x: float, *, strict_c3: bool = True) -> GateResult:
    """Evaluate (C1), (C2), (C3) at x. With ``strict_c3=False`` a field of
    genus 0 reports C3 as None instead of raising."""
    if x < 3:
        raise ValueError("condition_gate needs x >= 3")
    lx = math.log(x)
    if gate.g > 0 or strict_c3:
        c3: bool | None = lx >= gate.c3_threshold()
    else:
        c3 = None
    return GateResult(x, lx >= gate.c1_threshold(), lx >= gate.c2_threshold(), lx >= gate.c2_proof_threshold(), c3)


@dataclass(frozen=True)
class LemmaC2:
    lhs: float
    rhs: float
    holds: bool
    y: float
    c: float
    f: float


def lemma_c2_check(n: int, c2: float, x: float) -> LemmaC2:
    """exp(-c2 n^(-1/2) sqrt(log x)) <= log^-2 x, equivalently f(y) = y^4 e^(-y/c) <= 1."""
    if x <= 1:
        raise ValueError("lemma_c2_check needs x > 1")
    if n < 1 or c2 <= 0:
        raise ValueError("need n >= 1 and c2 > 0")
    lx = math.log(x)
    y = math.sqrt(lx)
    c = math.sqrt(n) / c2
    lhs = math.exp(-y / c)
    rhs = lx**-2
    return LemmaC2(lhs, rhs, lhs <= rhs, y, c, y**4 * lhs)


# ---------------------------------------------------------------------------
# prime ideal theorem audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiAudit:
    x: int
    pi_x: int
    li_x: float
    delta: float
    grh_bound_shape: float

    @property
    def normalized_delta(self) -> float:
        return abs(self.delta) / self.grh_bound_shape


def pi_audit(field: QuadField, x: int, table: PlaceTable | None = None) -> PiAudit:
    if x < 2:
        raise ValueError("pi_audit needs x >= 2")
    table = place_table(field, x) if table is None else table.restrict(x)
    pi_x = table.place_count()
    L = li(x)
    return PiAudit(x, pi_x, L, pi_x - L, math.sqrt(x) * (2 * field.genus + field.degree * math.log(x)))
