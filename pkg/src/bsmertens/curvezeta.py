"""Curves over finite fields: point counts, closed points, zeta numerators.

Two model types are supported: plane projective curves F(X, Y, Z) = 0 and
hyperelliptic curves y^2 = f(x) in odd characteristic. Counting is brute
force over F_{r^n}; everything after the counts is exact integer arithmetic.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .exactmath import FqElem, divisors, mobius, qpoly_is_squarefree
from .ffield import extension_field

#: largest field size r^n enumerated by default, per model type
DEFAULT_BUDGET = {"plane": 10**4, "hyperelliptic": 10**7}


class CurveError(ValueError):
    """Invalid curve model or inconsistent curve data."""


class SingularModelError(CurveError):
    pass


class WeilBoundError(CurveError):
    pass


class BudgetExceeded(RuntimeError):
    """A requested enumeration exceeds the configured field-size budget."""


Monomial = tuple[int, int, int]


@dataclass(frozen=True)
class CurveModel:
    """A smooth projective curve over F_r, r = p^k.

    ``plane``: ``terms`` maps exponents (i, j, l) of X^i Y^j Z^l to coefficients.
    ``hyperelliptic``: ``coeffs`` are f_0, ..., f_deg of y^2 = f(x).
    """

    kind: str
    p: int
    k: int
    genus: int
    terms: tuple[tuple[Monomial, FqElem], ...] = ()
    coeffs: tuple[FqElem, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind == "plane":
            self._check_plane()
        elif self.kind == "hyperelliptic":
            self._check_hyperelliptic()
        else:
            raise CurveError(f"unknown curve type {self.kind!r}")

    @property
    def r(self) -> int:
        return self.p**self.k

    @property
    def degree(self) -> int:
        if self.kind == "plane":
            return sum(self.terms[0][0])
        return len(self.coeffs) - 1

    def _check_plane(self) -> None:
        terms = [(m, c) for m, c in self.terms if not c.is_zero()]
        if not terms:
            raise CurveError("plane curve has no nonzero terms")
        degs = {sum(m) for m, _ in terms}
        if len(degs) != 1:
            raise CurveError(f"plane curve is not homogeneous (total degrees {sorted(degs)})")
        m = degs.pop()
        expected = (m - 1) * (m - 2) // 2
        if self.genus != expected:
            raise CurveError(f"declared genus {self.genus} but a smooth plane curve of degree {m} has genus {expected}")
        object.__setattr__(self, "terms", tuple(sorted(terms)))

    def _check_hyperelliptic(self) -> None:
        if self.p == 2:
            raise CurveError("hyperelliptic models y^2 = f(x) need odd characteristic")
        f = list(self.coeffs)
        while f and f[-1].is_zero():
            f.pop()
        deg = len(f) - 1
        if deg < 1:
            raise CurveError("f must be nonconstant")
        if self.genus != (deg - 1) // 2:
            raise CurveError(f"declared genus {self.genus} but deg f = {deg} gives genus {(deg - 1) // 2}")
        if not qpoly_is_squarefree(f):
            raise SingularModelError("f is not squarefree; the model y^2 = f(x) is singular")
        object.__setattr__(self, "coeffs", tuple(f))

    # documents --------------------------------------------------------------
    @classmethod
    def from_document(cls, doc: Mapping) -> "CurveModel":
        try:
            kind = doc["type"]
            p, k, genus = int(doc["p"]), int(doc.get("k", 1)), int(doc["genus"])
            raw = doc["coeffs"]
        except KeyError as exc:
            raise CurveError(f"curve document missing field {exc.args[0]!r}") from None
        name = str(doc.get("name", ""))
        if kind == "plane":
            terms = []
            for t in raw:
                if isinstance(t, Mapping):
                    mono, c = t["mono"], t["c"]
                else:
                    *mono, c = t
                if len(mono) != 3:
                    raise CurveError(f"plane term {t!r} needs three exponents")
                terms.append((tuple(int(e) for e in mono), FqElem.of(p, k, c)))
            return cls("plane", p, k, genus, terms=tuple(terms), name=name)
        if kind == "hyperelliptic":
            return cls("hyperelliptic", p, k, genus, coeffs=tuple(FqElem.of(p, k, c) for c in raw), name=name)
        raise CurveError(f"unknown curve type {kind!r}")

    def to_document(self) -> dict:
        doc: dict = {"type": self.kind, "p": self.p, "k": self.k, "genus": self.genus}
        if self.name:
            doc["name"] = self.name
        if self.kind == "plane":
            doc["coeffs"] = [[*m, list(c.coeffs)] for m, c in self.terms]
        else:
            doc["coeffs"] = [list(c.coeffs) for c in self.coeffs]
        return doc

    def canonical_hash(self) -> str:
        doc = self.to_document()
        doc.pop("name", None)
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _univariate(terms: Mapping[int, FqElem], F) -> list[int]:
    """Logs of the coefficients of sum c_e x^e, high degree first."""
    if not terms:
        return [-1]
    top = max(terms)
    return [F.embed(terms[e]) if e in terms else -1 for e in range(top, -1, -1)]


def _dense(terms: Mapping[tuple[int, int], FqElem], F) -> np.ndarray:
    dx = max((i for i, _ in terms), default=0) + 1
    dy = max((j for _, j in terms), default=0) + 1
    out = np.full((dx, dy), -1, dtype=np.int64)
    for (i, j), c in terms.items():
        out[i, j] = F.embed(c)
    return out


def _add_term(d: dict, key, c: FqElem) -> None:
    if c.is_zero():
        return
    d[key] = d[key] + c if key in d else c
    if d[key].is_zero():
        del d[key]


def _count_plane(curve: CurveModel, F) -> int:
    q = F.q
    aff: dict = {}
    dfx: dict = {}
    dfy: dict = {}
    inf_g: dict = {}  # F(x, 1, 0)
    inf_gx: dict = {}  # d/dx F(x, 1, z) at z = 0
    inf_gz: dict = {}  # d/dz F(x, 1, z) at z = 0
    h = {"val": [], "dy": [], "dz": []}  # F(1, y, z) at (0, 0) and its partials
    for (i, j, l), c in curve.terms:
        _add_term(aff, (i, j), c)
        if i:
            _add_term(dfx, (i - 1, j), c * i)
        if j:
            _add_term(dfy, (i, j - 1), c * j)
        if l == 0:
            _add_term(inf_g, i, c)
            if i:
                _add_term(inf_gx, i - 1, c * i)
            if j == 0:
                h["val"].append(c)
            if j == 1:
                h["dy"].append(c)
        if l == 1:
            _add_term(inf_gz, i, c)
            if j == 0:
                h["dz"].append(c)

    def dense(d):
        return _dense(d, F) if d else np.full((1, 1), -1, dtype=np.int64)

    count, singular = kernels.plane_affine_count(dense(aff), dense(dfx), dense(dfy), F.zech, q)

    xs = F.all_logs()
    g_vals = F.eval_logs(_univariate(inf_g, F), xs)
    on = g_vals < 0
    count += int(np.count_nonzero(on))
    if np.any(on):
        gx = F.eval_logs(_univariate(inf_gx, F), xs[on])
        gz = F.eval_logs(_univariate(inf_gz, F), xs[on])
        singular += int(np.count_nonzero((gx < 0) & (gz < 0)))

    def total(cs):
        acc = FqElem.zero(curve.p, curve.k)
        for c in cs:
            acc = acc + c
        return acc

    if total(h["val"]).is_zero():
        count += 1
        if total(h["dy"]).is_zero() and total(h["dz"]).is_zero():
            singular += 1
    if singular:
        raise SingularModelError(f"plane model is singular at {singular} point(s) over F_{q}")
    return count


def _count_hyperelliptic(curve: CurveModel, F) -> int:
    q = F.q
    logs = [F.embed(c) for c in reversed(curve.coeffs)]
    affine = kernels.hyperelliptic_affine_count(np.asarray(logs, dtype=np.int64), F.zech, q)
    deg = len(curve.coeffs) - 1
    if deg % 2:
        return affine + 1
    lead = logs[0]
    return affine + (2 if lead % 2 == 0 else 0)


def count_points(curve: CurveModel, n: int, budget: Mapping[str, int] | None = None) -> int:
    """#X(F_{r^n}) for the smooth projective model of ``curve``."""
    if n < 1:
        raise ValueError("extension degree n must be >= 1")
    limit = (budget or DEFAULT_BUDGET).get(curve.kind, DEFAULT_BUDGET[curve.kind])
    q = curve.r**n
    if q > limit:
        raise BudgetExceeded(f"F_{q} exceeds the {curve.kind} enumeration budget {limit}")
    F = extension_field(curve.p, curve.k * n)
    if curve.kind == "plane":
        return _count_plane(curve, F)
    return _count_hyperelliptic(curve, F)


# ---------------------------------------------------------------------------
# counts, closed points, zeta numerator
# ---------------------------------------------------------------------------

def weil_defect_ok(N: int, r: int, n: int, genus: int) -> bool:
    # |N - r^n - 1| <= 2 g r^{n/2}, squared to stay in integers
    d = N - r**n - 1
    return N >= 0 and d * d <= 4 * genus * genus * r**n


@dataclass(frozen=True)
class PointCounts:
    r: int
    genus: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        for n, N in enumerate(self.counts, start=1):
            if not weil_defect_ok(N, self.r, n, self.genus):
                raise WeilBoundError(
                    f"N_{n} = {N} violates the Weil bound |N - {self.r}^{n} - 1| <= 2*{self.genus}*{self.r}^({n}/2)"
                )

    @property
    def M(self) -> int:
        return len(self.counts)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.M:
            raise IndexError(f"N_{n} not available (have n <= {self.M})")
        return self.counts[n - 1]


def compute_point_counts(
    curve: CurveModel,
    M: int,
    budget: Mapping[str, int] | None = None,
    counter: Callable[[CurveModel, int], int] | None = None,
) -> PointCounts:
    counter = counter or (lambda c, n: count_points(c, n, budget))
    return PointCounts(curve.r, curve.genus, tuple(counter(curve, n) for n in range(1, M + 1)))


def closed_points_from_counts(counts: PointCounts | Sequence[int], *, strict: bool = True) -> dict[int, int]:
    """Phi_{r^m} (number of closed points of degree m) by Moebius inversion of
    N_n = sum_{m | n} m Phi_{r^m}."""
    seq = counts.counts if isinstance(counts, PointCounts) else tuple(counts)
    phi: dict[int, int] = {}
    for n in range(1, len(seq) + 1):
        s = sum(mobius(n // d) * seq[d - 1] for d in divisors(n))
        if s % n:
            raise CurveError(f"Phi_{n} = {s}/{n} is not an integer; counts are inconsistent")
        if strict and s < 0:
            raise CurveError(f"Phi_{n} = {s // n} is negative; counts are inconsistent")
        phi[n] = s // n
    return phi


def counts_from_closed_points(phi: Mapping[int, int], M: int) -> tuple[int, ...]:
    return tuple(sum(d * phi[d] for d in divisors(n)) for n in range(1, M + 1))


def betti_normalizer(genus: int) -> int:
    """b_X = max(g, 1), the genus stand-in used to normalise curve families."""
    return max(genus, 1)


def betti_numbers(genus: int) -> tuple[int, int, int]:
    return (1, 2 * genus, 1)


@dataclass(frozen=True)
class ZetaNumerator:
    """P_1(t) = sum a_k t^k, a_0 = 1, degree 2g; ``coeffs`` = (a_0, ..., a_2g)."""

    r: int
    genus: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        g, r, a = self.genus, self.r, self.coeffs
        if len(a) != 2 * g + 1 or a[0] != 1:
            raise CurveError("P_1 must have degree 2g and constant term 1")
        for k in range(g + 1):
            if a[2 * g - k] != r ** (g - k) * a[k]:
                raise CurveError(f"functional equation fails at t^{2 * g - k}")

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def elementary(self) -> list[int]:
        """e_0..e_2g of the inverse roots."""
        return [(-1) ** k * c for k, c in enumerate(self.coeffs)]

    def power_sums(self, n_max: int) -> list[int]:
        """s_n = sum of n-th powers of the inverse roots, n = 1..n_max."""
        e = self.elementary()
        deg = 2 * self.genus
        s: list[int] = []
        for n in range(1, n_max + 1):
            acc = (-1) ** (n - 1) * n * e[n] if n <= deg else 0
            for i in range(1, min(n - 1, deg) + 1):
                acc += (-1) ** (i - 1) * e[i] * s[n - i - 1]
            s.append(acc)
        return s

    def predicted_counts(self, n_max: int) -> tuple[int, ...]:
        return tuple(self.r**n + 1 - s for n, s in enumerate(self.power_sums(n_max), start=1))

    def inverse_root_moduli(self) -> np.ndarray:
        if self.genus == 0:
            return np.zeros(0)
        roots = np.roots(list(reversed(self.coeffs)))
        return 1.0 / np.abs(roots)

    def kappa_log_r(self) -> Fraction:
        """kappa_X * log r = P_1(1/r) / (1 - 1/r), exactly."""
        return self(Fraction(1, self.r)) / (1 - Fraction(1, self.r))


def zeta_numerator(counts: PointCounts, genus: int | None = None, *, root_tol: float = 1e-6) -> ZetaNumerator:
    """Recover P_1 from N_1..N_g by Newton's identities and the functional
    equation, then check it against every further count supplied."""
    g = counts.genus if genus is None else genus
    r = counts.r
    if counts.M < g:
        raise CurveError(f"need N_1..N_{g} to recover P_1, have {counts.M}")
    s = [r**n + 1 - counts[n] for n in range(1, g + 1)]
    e = [1]
    for k in range(1, g + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * s[i - 1] for i in range(1, k + 1))
        if acc % k:
            raise CurveError(f"Newton identity gives non-integral e_{k}; wrong genus or bad counts")
        e.append(acc // k)
    full = e + [r ** (g - k) * e[k] for k in range(g - 1, -1, -1)]
    P = ZetaNumerator(r, g, tuple((-1) ** k * c for k, c in enumerate(full)))
    predicted = P.predicted_counts(counts.M)
    for n in range(g + 1, counts.M + 1):
        if predicted[n - 1] != counts[n]:
            raise CurveError(f"P_1 predicts N_{n} = {predicted[n - 1]} but the count is {counts[n]}")
    moduli = P.inverse_root_moduli()
    if moduli.size and np.max(np.abs(moduli - math.sqrt(r))) > root_tol * math.sqrt(r):
        raise CurveError("inverse roots of P_1 do not all have absolute value sqrt(r)")
    return P


def curve_residue(P1: ZetaNumerator, r: int | None = None) -> float:
    """kappa_X = Res_{s=1} Z(X, r^-s) = P_1(1/r) / ((1 - 1/r) log r)."""
    r = P1.r if r is None else r
    return float(P1.kappa_log_r()) / math.log(r)


@dataclass
class CurveZetaResult:
    curve: CurveModel
    counts: PointCounts
    brute_force_n: int
    zeta: ZetaNumerator
    phi: dict[int, int] = field(default_factory=dict)


def analyse_curve(
    curve: CurveModel,
    n_max: int,
    budget: Mapping[str, int] | None = None,
    counter: Callable[[CurveModel, int], int] | None = None,
    brute_max: int | None = None,
) -> CurveZetaResult:
    """Brute-force counts while the budget allows (at least up to n = g,
    at most ``brute_max``), P_1 from them, and counts for the remaining
    n <= n_max from P_1."""
    limit = (budget or DEFAULT_BUDGET).get(curve.kind, DEFAULT_BUDGET[curve.kind])
    cap = n_max if brute_max is None else min(n_max, max(brute_max, curve.genus, 1))
    brute = 0
    while brute < cap and curve.r ** (brute + 1) <= limit:
        brute += 1
    if brute < max(curve.genus, 1):
        raise BudgetExceeded(f"cannot count N_1..N_{max(curve.genus, 1)} within the {curve.kind} budget {limit}")
    counts = compute_point_counts(curve, brute, budget, counter)
    P = zeta_numerator(counts)
    full = PointCounts(curve.r, curve.genus, P.predicted_counts(n_max)) if n_max > brute else counts
    if full.counts[:brute] != counts.counts[: min(brute, n_max)]:
        raise CurveError("predicted counts disagree with brute force")
    return CurveZetaResult(curve, full, brute, P, closed_points_from_counts(full))
