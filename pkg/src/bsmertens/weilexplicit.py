"""Explicit formula at the truncation v_n = 1/n (n <= N), exactly.

Given Weil data (dimension d, base size r, Betti numbers, point counts
N_1..N_M) this module computes the four sums

    S0(N) = sum_{f<=N} Phi_{r^f} sum_{m<=N/f} 1 / (m r^{dfm})
    S1(N) = sum_{n<=N} 1/n
    S2(N) = sum_{n<=N} 1 / (n r^{dn})
    S3(N) = sum_{n<=N} (N_n - 1 - r^{dn}) / (n r^{dn})

as exact rationals, checks S0 = S1 + S2 + S3, and evaluates the sandwich
bounds relating each of them to its limit. The Frobenius eigenvalues never
appear individually: S3 only needs the alternating trace N_n - 1 - r^{dn}.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .curvezeta import (
    CurveError,
    ZetaNumerator,
    betti_numbers,
    closed_points_from_counts,
    counts_from_closed_points,
)
from .exactmath import euler_gamma

#: absolute slack added to float-valued upper bounds
SLACK = 1e-12


class WeilDataError(ValueError):
    pass


class InsufficientCounts(ValueError):
    """The available counts do not reach the requested truncation/precision."""


@dataclass(frozen=True)
class WeilData:
    d: int
    r: int
    betti: tuple[int, ...]
    counts: tuple[int, ...]
    name: str = ""

    def __post_init__(self) -> None:
        d, b = self.d, self.betti
        if d < 1:
            raise WeilDataError("dimension must be >= 1")
        if len(b) != 2 * d + 1:
            raise WeilDataError(f"need {2 * d + 1} Betti numbers for d = {d}, got {len(b)}")
        if b[0] != 1 or b[-1] != 1:
            raise WeilDataError("b_0 = b_2d = 1 is required")
        if any(b[i] != b[2 * d - i] for i in range(2 * d + 1)):
            raise WeilDataError("Betti numbers violate Poincare duality b_i = b_{2d-i}")
        if any(x < 0 for x in b):
            raise WeilDataError("Betti numbers must be non-negative")
        for n, N in enumerate(self.counts, start=1):
            if not self._deligne_ok(n, N):
                raise WeilDataError(f"N_{n} = {N} violates the Deligne bound")

    def _deligne_ok(self, n: int, N: int) -> bool:
        # |N - r^{dn}| <= 1 + sum_{i=1}^{2d-1} b_i r^{in/2}, split by parity of i
        r, d = self.r, self.d
        even = sum(self.betti[i] * r ** (i * n // 2) for i in range(2, 2 * d, 2))
        odd = sum(self.betti[i] * r ** ((i - 1) * n // 2) for i in range(1, 2 * d, 2))
        excess = abs(N - r ** (d * n)) - 1 - even
        return excess <= 0 or excess * excess <= r**n * odd * odd

    @property
    def M(self) -> int:
        return len(self.counts)

    @property
    def b_x(self) -> int:
        return max(self.betti)

    @property
    def betti_sum(self) -> int:
        return sum(self.betti)

    def count(self, n: int) -> int:
        if not 1 <= n <= self.M:
            raise InsufficientCounts(f"N_{n} not available (have n <= {self.M})")
        return self.counts[n - 1]

    def middle_trace(self, n: int) -> int:
        """sum_{i=1}^{2d-1} (-1)^i tr(Frob^n | H^i) = N_n - 1 - r^{dn}."""
        return self.count(n) - 1 - self.r ** (self.d * n)

    def closed_points(self, *, strict: bool = False) -> dict[int, int]:
        return closed_points_from_counts(self.counts, strict=strict)

    def truncated(self, M: int) -> "WeilData":
        if M > self.M:
            raise InsufficientCounts(f"only {self.M} counts available")
        return WeilData(self.d, self.r, self.betti, self.counts[:M], self.name)

    # constructors -----------------------------------------------------------
    @classmethod
    def from_zeta(cls, P1: ZetaNumerator, M: int, name: str = "") -> "WeilData":
        return cls(1, P1.r, betti_numbers(P1.genus), P1.predicted_counts(M), name)

    @classmethod
    def from_angles(cls, d: int, r: int, angles: Sequence[Sequence[int]], M: int, name: str = "") -> "WeilData":
        """Eigenvalues r^{i/2} exp(i pi a/b) given as [i, a, b]; H^0 and H^{2d}
        are implicit. The multiset must be closed under conjugation and the
        traces of each conjugate pair must be rational integers."""
        traces = _weight_traces(d, r, angles)
        counts = []
        for n in range(1, M + 1):
            middle = 0
            for i, eig in traces.items():
                middle += (-1) ** i * sum(t(n) for t in eig)
            counts.append(1 + r ** (d * n) + middle)
        # each pair contributes two Betti dimensions
        betti = [1] + [sum(t.dim for t in traces.get(i, [])) for i in range(1, 2 * d)] + [1]
        return cls(d, r, tuple(betti), tuple(counts), name)

    @classmethod
    def from_document(cls, doc: Mapping, M: int | None = None) -> "WeilData":
        try:
            d, r = int(doc["d"]), int(doc["r"])
        except KeyError as exc:
            raise WeilDataError(f"Weil data document missing field {exc.args[0]!r}") from None
        name = str(doc.get("name", ""))
        if "eigen_angles" in doc:
            return cls.from_angles(d, r, doc["eigen_angles"], int(M or doc.get("M", 24)), name)
        if "counts" not in doc or "betti" not in doc:
            raise WeilDataError("Weil data document needs 'betti' and 'counts' or 'eigen_angles'")
        return cls(d, r, tuple(int(b) for b in doc["betti"]), tuple(int(c) for c in doc["counts"]), name)

    def to_document(self) -> dict:
        doc = {"d": self.d, "r": self.r, "betti": list(self.betti), "counts": list(self.counts)}
        if self.name:
            doc["name"] = self.name
        return doc


# ---------------------------------------------------------------------------
# synthetic eigenvalue data
# ---------------------------------------------------------------------------

# 2cos(pi x) for the x (mod 2) where it is rational, x = a/b reduced
_TWO_COS = {
    Fraction(0): 2,
    Fraction(1): -2,
    Fraction(1, 2): 0,
    Fraction(3, 2): 0,
    Fraction(1, 3): 1,
    Fraction(5, 3): 1,
    Fraction(2, 3): -1,
    Fraction(4, 3): -1,
}


@dataclass(frozen=True)
class _Trace:
    """Power sums of either a real eigenvalue lam (dim 1) or a conjugate
    pair with trace a and norm nrm (dim 2), by integer recurrence."""

    dim: int
    a: int
    nrm: int = 0

    def __call__(self, n: int) -> int:
        if self.dim == 1:
            return self.a**n
        prev, cur = 2, self.a
        for _ in range(n - 1):
            prev, cur = cur, self.a * cur - self.nrm * prev
        return cur


def _reduce_angle(a: int, b: int) -> Fraction:
    if b <= 0:
        raise WeilDataError("angle denominator must be positive")
    return Fraction(a, b) % 2


def _pair_trace(r: int, i: int, x: Fraction) -> int:
    """2 r^{i/2} cos(pi x) as an exact integer, or an error."""
    c2 = _TWO_COS.get((2 * x) % 2)
    if c2 is None:
        raise WeilDataError(f"angle {x}*pi gives an irrational trace")
    sq = r**i * (2 + c2)  # a^2 = r^i (2 + 2 cos 2 theta)
    a = math.isqrt(sq)
    if a * a != sq:
        raise WeilDataError(f"angle {x}*pi at weight {i} gives an irrational trace over r = {r}")
    cos = math.cos(math.pi * float(x))
    return 0 if abs(cos) < 1e-12 else (a if cos > 0 else -a)


def _weight_traces(d: int, r: int, angles: Sequence[Sequence[int]]) -> dict[int, list[_Trace]]:
    by_weight: dict[int, list[Fraction]] = {}
    for item in angles:
        if len(item) != 3:
            raise WeilDataError(f"eigen angle entry {item!r} must be [i, numerator, denominator]")
        i, a, b = (int(v) for v in item)
        if not 1 <= i <= 2 * d - 1:
            raise WeilDataError(f"weight {i} outside 1..{2 * d - 1}")
        by_weight.setdefault(i, []).append(_reduce_angle(a, b))
    out: dict[int, list[_Trace]] = {}
    for i, xs in sorted(by_weight.items()):
        pool = sorted(xs)
        traces = []
        while pool:
            x = pool.pop(0)
            if x in (0, 1):
                lam2 = r**i
                lam = math.isqrt(lam2)
                if lam * lam != lam2:
                    raise WeilDataError(f"real eigenvalue at weight {i} is irrational for r = {r}")
                traces.append(_Trace(1, lam if x == 0 else -lam))
                continue
            conj = (-x) % 2
            if conj not in pool:
                raise WeilDataError(f"eigen angle {x}*pi at weight {i} has no conjugate")
            pool.remove(conj)
            traces.append(_Trace(2, _pair_trace(r, i, x), r**i))
        out[i] = traces
    for i in out:
        mirror = sorted(by_weight.get(2 * d - i, []))
        if sorted(by_weight[i]) != sorted((-x) % 2 for x in mirror):
            raise WeilDataError(f"weights {i} and {2 * d - i} are not Poincare dual")
    return out


def allowed_angles(r: int, i: int) -> list[Fraction]:
    """Angles x (theta = pi x) usable at weight i over F_r with integral traces."""
    out = []
    for x in sorted(set(_TWO_COS) | {Fraction(1, 4), Fraction(3, 4), Fraction(5, 4), Fraction(7, 4),
                                      Fraction(1, 6), Fraction(5, 6), Fraction(7, 6), Fraction(11, 6)}):
        try:
            if x in (0, 1):
                lam2 = r**i
                if math.isqrt(lam2) ** 2 != lam2:
                    continue
            else:
                _pair_trace(r, i, x)
        except WeilDataError:
            continue
        out.append(x)
    return out


def random_weil_data(d: int, r: int, rng: random.Random, *, max_pairs: int = 3, M: int = 12) -> WeilData:
    """Random conjugate-closed, Poincare-dual eigenvalue data with integral traces."""
    angles: list[list[int]] = []

    def emit(i: int, x: Fraction) -> None:
        angles.append([i, x.numerator, x.denominator])

    for i in range(1, d + 1):
        choices = allowed_angles(r, i)
        picked: list[Fraction] = []
        for _ in range(rng.randint(0 if i < d else 1, max_pairs)):
            x = rng.choice(choices)
            picked.append(x)
            if x not in (0, 1):
                picked.append((-x) % 2)
        for x in picked:
            emit(i, x)
            if i != d:
                emit(2 * d - i, (-x) % 2)
    return WeilData.from_angles(d, r, angles, M, name="synthetic")


# ---------------------------------------------------------------------------
# the four sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitFormulaSplit:
    N: int
    S0: Fraction
    S1: Fraction
    S2: Fraction
    S3: Fraction

    @property
    def identity_exact(self) -> bool:
        return self.S0 == self.S1 + self.S2 + self.S3


class IdentityViolation(ArithmeticError):
    pass


def _check_phi(w: WeilData, N: int, phi: Mapping[int, int]) -> None:
    missing = [f for f in range(1, N + 1) if f not in phi]
    if missing:
        raise InsufficientCounts(f"Phi_{{r^{missing[0]}}} missing")
    if counts_from_closed_points(phi, N) != w.counts[:N]:
        raise WeilDataError("closed-point counts do not re-sum to the point counts")


def s_terms(w: WeilData, N: int, phi: Mapping[int, int] | None = None) -> ExplicitFormulaSplit:
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > w.M:
        raise InsufficientCounts(f"N = {N} exceeds the {w.M} available counts")
    phi = w.closed_points() if phi is None else phi
    _check_phi(w, N, phi)
    r, d = w.r, w.d
    S0 = Fraction(0)
    for f in range(1, N + 1):
        if phi[f]:
            rf = r ** (d * f)
            S0 += phi[f] * sum(Fraction(1, m * rf**m) for m in range(1, N // f + 1))
    S1 = sum((Fraction(1, n) for n in range(1, N + 1)), Fraction(0))
    S2 = sum((Fraction(1, n * r ** (d * n)) for n in range(1, N + 1)), Fraction(0))
    S3 = sum((Fraction(w.middle_trace(n), n * r ** (d * n)) for n in range(1, N + 1)), Fraction(0))
    split = ExplicitFormulaSplit(N, S0, S1, S2, S3)
    if not split.identity_exact:
        raise IdentityViolation(f"S0 != S1 + S2 + S3 at N = {N} (difference {S0 - S1 - S2 - S3})")
    return split


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------

def middle_tail_bound(w: WeilData, M: int) -> float:
    """Upper bound for sum_{n>M} |N_n - 1 - r^{dn}| / (n r^{dn})."""
    total = 0.0
    for i in range(1, 2 * w.d):
        if w.betti[i]:
            q = w.r ** (i / 2 - w.d)
            total += w.betti[i] * q ** (M + 1) / (1 - q)
    return total / (M + 1)


def trivial_tail_bound(w: WeilData, M: int) -> float:
    q = w.r ** (-w.d)
    return q ** (M + 1) / ((1 - q) * (M + 1))


# ---------------------------------------------------------------------------
# lemma bounds
# ---------------------------------------------------------------------------

def _neg_log1m(x: float) -> float:
    return -math.log1p(-x)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    N: int
    value: float
    lower: float
    upper: float
    holds: bool
    in_gate: bool = True
    extra: dict = field(default_factory=dict)


def phi_log_sum(w: WeilData, N: int, phi: Mapping[int, int]) -> float:
    """sum_{f<=N} Phi_{r^f} log(r^{df} / (r^{df} - 1))."""
    return math.fsum(phi[f] * _neg_log1m(float(w.r) ** (-w.d * f)) for f in range(1, N + 1))


def lemma_s0_bound(w: WeilData, N: int, phi: Mapping[int, int] | None = None) -> BoundCheck:
    phi = w.closed_points() if phi is None else phi
    split = s_terms(w, N, phi)
    gap = phi_log_sum(w, N, phi) - float(split.S0)
    r, d, b = w.r, w.d, w.b_x
    upper = 8 / (N * r ** (d * N / 2)) + 6 * b / (N * r ** ((d + 0.5) * N / 2))
    holds = -SLACK <= gap <= upper + SLACK
    return BoundCheck("S0", N, gap, 0.0, upper, holds)


def lemma_s1_bound(N: int) -> BoundCheck:
    S1 = math.fsum(1 / n for n in range(1, N + 1))
    dev = S1 - math.log(N) - euler_gamma()
    lower, upper = 1 / (N * (N + 1)), 1 / N
    holds = lower - SLACK <= dev <= upper + SLACK
    return BoundCheck("S1", N, dev, lower, upper, holds, in_gate=N >= 2)


def lemma_s2_bound(w: WeilData, N: int) -> BoundCheck:
    r, d = w.r, w.d
    S2 = math.fsum(1 / (n * float(r) ** (d * n)) for n in range(1, N + 1))
    gap = _neg_log1m(float(r) ** (-d)) - S2
    upper = 1 / (float(r) ** (d * N) * (N + 1) * (r**d - 1))
    holds = -SLACK <= gap <= upper + SLACK
    return BoundCheck("S2", N, gap, 0.0, upper, holds)


def lemma_s3_bound(w: WeilData, N: int, *, rel_tol: float = 1e-3) -> BoundCheck:
    """|S3(N) - L| against b / ((r^{1/2} - 1)(N + 1)(r^{N/2} - 1)), where the
    limit L = sum_i (-1)^{i+1} sum_j log(1 - r^{i/2-d} w_ij) = S3(infinity) is
    taken as S3(M) with a rigorous bound on the remaining tail."""
    r, b = w.r, w.b_x
    upper = b / ((math.sqrt(r) - 1) * (N + 1) * (r ** (N / 2) - 1))
    M = w.M
    if M <= N:
        raise InsufficientCounts(f"need counts beyond N = {N} to evaluate the limit")
    tail = middle_tail_bound(w, M)
    if tail > rel_tol * upper:
        raise InsufficientCounts(f"tail bound {tail:.3g} after M = {M} is too large against {upper:.3g}; need more counts")
    diff = sum((Fraction(w.middle_trace(n), n * r ** (w.d * n)) for n in range(N + 1, M + 1)), Fraction(0))
    dev = abs(float(diff))
    holds = dev + tail <= upper + SLACK
    return BoundCheck("S3", N, dev, 0.0, upper, holds, extra={"tail": tail, "M": M})


def phi_upper_bound(w: WeilData, f: int) -> float:
    """(r^{df} + 1 + 2 b r^{df - f/2}) / f."""
    r, d = w.r, w.d
    return (r ** (d * f) + 1 + 2 * w.b_x * r ** (d * f - f / 2)) / f


# ---------------------------------------------------------------------------
# residue and Mertens report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueEstimate:
    M: int
    log_kappa_log_r: float
    log_tail: float
    kappa_log_r: float
    kappa_log_r_tail: float
    kappa: float
    kappa_tail: float


def residue_from_counts(w: WeilData, M: int | None = None, *, tol: float = 1e-2) -> ResidueEstimate:
    """log(kappa_X log r) = sum_{n>=1} (N_n - r^{dn}) / (n r^{dn}), truncated at M
    with the Deligne-bound remainder."""
    M = w.M if M is None else M
    if M > w.M:
        raise InsufficientCounts(f"M = {M} exceeds the {w.M} available counts")
    r, d = w.r, w.d
    s = sum((Fraction(w.count(n) - r ** (d * n), n * r ** (d * n)) for n in range(1, M + 1)), Fraction(0))
    log_tail = middle_tail_bound(w, M) + trivial_tail_bound(w, M)
    if log_tail > tol:
        raise InsufficientCounts(f"residue tail bound {log_tail:.3g} exceeds tolerance {tol:.3g}")
    value = math.exp(float(s))
    spread = value * math.expm1(log_tail)
    logr = math.log(r)
    return ResidueEstimate(M, float(s), log_tail, value, spread, value / logr, spread / logr)


@dataclass(frozen=True)
class VarietyMertensReport:
    N: int
    sum_log: float
    main_term: float
    error: float
    shape_inv_n: float
    shape_betti: float
    b_x: int

    @property
    def error_times_n(self) -> float:
        return self.error * self.N


def variety_mertens(
    w: WeilData,
    N: int,
    phi: Mapping[int, int] | None = None,
    kappa_log_r: float | None = None,
) -> VarietyMertensReport:
    """sum_{m<=N} Phi_{r^m} log(r^{dm}/(r^{dm}-1)) against log N + gamma + log(kappa_X log r)."""
    phi = w.closed_points() if phi is None else phi
    if N > w.M:
        raise InsufficientCounts(f"N = {N} exceeds the {w.M} available counts")
    if kappa_log_r is None:
        kappa_log_r = residue_from_counts(w).kappa_log_r
    total = phi_log_sum(w, N, phi)
    main = math.log(N) + euler_gamma() + math.log(kappa_log_r)
    return VarietyMertensReport(
        N,
        total,
        main,
        total - main,
        1 / N,
        w.b_x * w.r ** (-N / 2) / N,
        w.b_x,
    )


def audit(w: WeilData, N: int, phi: Mapping[int, int] | None = None) -> list[BoundCheck]:
    """All four sandwich checks at truncation N."""
    phi = w.closed_points() if phi is None else phi
    return [lemma_s0_bound(w, N, phi), lemma_s1_bound(N), lemma_s2_bound(w, N), lemma_s3_bound(w, N)]


def curve_weil_data(P1: ZetaNumerator, M: int = 64, name: str = "") -> WeilData:
    try:
        return WeilData.from_zeta(P1, M, name)
    except WeilDataError as exc:
        raise CurveError(str(exc)) from exc
