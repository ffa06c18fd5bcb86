"""The rationals and quadratic fields: places, residues, class numbers, units."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .exactmath import cached_spf, is_squarefree, kronecker, primes_upto

#: |D| above which residue_kappa refuses to run unless told otherwise
DEFAULT_DISC_CAP = 10**6


class FieldError(ValueError):
    pass


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    """Fundamental discriminants D with lo <= D <= hi, in increasing order."""
    return [D for D in range(lo, hi + 1) if is_fundamental(D)]


@dataclass(frozen=True)
class QuadField:
    """Q (degree 1, ``disc`` = 1) or the quadratic field of fundamental discriminant D."""

    disc: int

    def __post_init__(self) -> None:
        if self.disc != 1 and not is_fundamental(self.disc):
            raise FieldError(f"{self.disc} is not a fundamental discriminant")

    @classmethod
    def rationals(cls) -> "QuadField":
        return cls(1)

    @classmethod
    def parse(cls, token: str | int) -> "QuadField":
        if isinstance(token, str) and token.strip().upper() in ("Q", "QQ"):
            return cls.rationals()
        try:
            D = int(token)
        except (TypeError, ValueError):
            raise FieldError(f"field token {token!r} is neither 'Q' nor an integer discriminant") from None
        return cls(D)

    @property
    def is_rational(self) -> bool:
        return self.disc == 1

    @property
    def degree(self) -> int:
        return 1 if self.is_rational else 2

    @property
    def genus(self) -> float:
        return 0.5 * math.log(abs(self.disc))

    @property
    def signature(self) -> tuple[int, int]:
        if self.is_rational:
            return (1, 0)
        return (2, 0) if self.disc > 0 else (0, 1)

    @property
    def root_count(self) -> int:
        return {-4: 4, -3: 6}.get(self.disc, 2)

    @property
    def label(self) -> str:
        return "Q" if self.is_rational else str(self.disc)

    def __str__(self) -> str:
        return self.label


class Splitting(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def splitting_type(field: QuadField, p: int) -> Splitting:
    if field.is_rational:
        raise FieldError("splitting types are defined here for quadratic fields only")
    return {1: Splitting.SPLIT, -1: Splitting.INERT, 0: Splitting.RAMIFIED}[kronecker(field.disc, p)]


@dataclass(frozen=True, eq=False)
class PlaceTable:
    """Phi_q (number of finite places of norm q) for prime powers q <= bound.

    Stored as parallel sorted arrays; only q with Phi_q > 0 appear.
    """

    field: QuadField
    bound: int
    q: np.ndarray
    phi: np.ndarray

    @cached_property
    def counts(self) -> dict[int, int]:
        return {int(a): int(b) for a, b in zip(self.q, self.phi)}

    def __getitem__(self, q: int) -> int:
        return self.counts.get(q, 0)

    def __len__(self) -> int:
        return len(self.q)

    def restrict(self, x: int) -> "PlaceTable":
        if x > self.bound:
            raise ValueError("cannot extend a place table by restriction")
        k = int(np.searchsorted(self.q, x, side="right"))
        return PlaceTable(self.field, x, self.q[:k], self.phi[:k])

    def place_count(self) -> int:
        return int(self.phi.sum())


def place_table(field: QuadField, x: int) -> PlaceTable:
    if x < 2:
        raise ValueError("place_table needs x >= 2")
    primes = primes_upto(x)
    if field.is_rational:
        return PlaceTable(field, x, primes, np.ones(primes.shape, dtype=np.int64))
    chi = kernels.kronecker_primes(field.disc, primes)
    # split -> two places of norm p, ramified -> one, inert -> one of norm p^2
    at_p = (chi == 1) * 2 + (chi == 0) * 1
    keep = at_p > 0
    q1, phi1 = primes[keep], at_p[keep].astype(np.int64)
    inert = primes[(chi == -1) & (primes <= math.isqrt(x))]
    q2 = inert * inert
    q = np.concatenate([q1, q2])
    phi = np.concatenate([phi1, np.ones(q2.shape, dtype=np.int64)])
    order = np.argsort(q, kind="stable")
    return PlaceTable(field, x, q[order], phi[order])


def _check_cap(D: int, cap: int | None) -> None:
    cap = DEFAULT_DISC_CAP if cap is None else cap
    if abs(D) > cap:
        raise FieldError(f"|D| = {abs(D)} exceeds the configured cap {cap}")


def residue_kappa(field: QuadField, *, cap: int | None = None) -> float:
    """Residue at s = 1 of the Dedekind zeta function, i.e. L(1, chi_D)."""
    if field.is_rational:
        return 1.0
    D = field.disc
    _check_cap(D, cap)
    spf = cached_spf(max(abs(D), 2) if abs(D) > 1 << 17 else 1 << 17)
    if D < 0:
        moment = kernels.imag_char_moment(D, spf)
        return -math.pi * abs(D) ** -1.5 * moment
    return -kernels.real_char_logsin(D, spf) / math.sqrt(D)


def class_number_imag(D: int) -> int:
    """Number of reduced primitive forms (a, b, c) with b^2 - 4ac = D < 0."""
    if D >= 0:
        raise FieldError("class_number_imag needs D < 0")
    if not is_fundamental(D):
        raise FieldError(f"{D} is not a fundamental discriminant")
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            h += 1
        a += 1
    return h


@dataclass(frozen=True)
class UnitData:
    """Fundamental unit (a + b sqrt(D)) / 2 of the order of discriminant D > 0."""

    disc: int
    a: int
    b: int
    norm: int

    @property
    def fundamental_unit(self) -> float:
        return (self.a + self.b * math.sqrt(self.disc)) / 2

    @property
    def regulator(self) -> float:
        # log((a + b sqrt D) / 2) without cancellation
        return math.log(self.a / 2 + self.b * math.sqrt(self.disc) / 2)


def fundamental_unit(D: int, *, max_steps: int = 10**6) -> UnitData:
    """Smallest unit > 1 via the continued fraction of (delta + sqrt D) / 2."""
    if D <= 0 or not is_fundamental(D):
        raise FieldError(f"{D} is not a positive fundamental discriminant")
    delta = D % 2
    s = math.isqrt(D)
    P, Q = delta, 2
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    for _ in range(max_steps):
        if Q > 0:
            a = (P + s) // Q
        else:
            a = -((P + s) // -Q) - 1
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        # norm of p - q*omega, omega = (delta + sqrt D)/2
        norm = p_cur * p_cur - delta * p_cur * q_cur + q_cur * q_cur * (delta - D) // 4
        if norm in (1, -1):
            return UnitData(D, 2 * p_cur - delta * q_cur, q_cur, norm)
        P = a * Q - P
        Q = (D - P * P) // Q
    raise FieldError(f"continued fraction for D = {D} exceeded {max_steps} steps")


@dataclass(frozen=True)
class ClassNumberCheck:
    disc: int
    h: int
    regulator: float
    kappa_analytic: float
    kappa_class_formula: float
    abs_diff: float


def class_number_formula_check(field: QuadField, h: int | None = None, *, round_tol: float = 1e-6) -> ClassNumberCheck:
    """Both sides of kappa = 2^{r1} (2 pi)^{r2} h R / (w sqrt|D|)."""
    if field.is_rational:
        raise FieldError("class number check needs a quadratic field")
    D = field.disc
    kappa = residue_kappa(field)
    r1, r2 = field.signature
    w = field.root_count
    if D < 0:
        R = 1.0
        h = class_number_imag(D) if h is None else h
    else:
        R = fundamental_unit(D).regulator
        if h is None:
            h_real = kappa * w * math.sqrt(D) / (2**r1 * R)
            h = round(h_real)
            if abs(h_real - h) > round_tol:
                raise FieldError(f"class number for D = {D} is ambiguous: {h_real!r}")
    other = 2**r1 * (2 * math.pi) ** r2 * h * R / (w * math.sqrt(abs(D)))
    return ClassNumberCheck(D, h, R, kappa, other, abs(kappa - other))
