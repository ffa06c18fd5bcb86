"""Family scans: per-member Brauer-Siegel quantities at finite truncation.

This layer does no arithmetic of its own beyond normalising by the genus;
every number comes from quadfield, nfmertens, curvezeta or weilexplicit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence, Union

from .curvezeta import (
    BudgetExceeded,
    CurveError,
    CurveModel,
    analyse_curve,
    betti_normalizer,
)
from .quadfield import FieldError, QuadField, fundamental_discriminants, place_table, residue_kappa
from .nfmertens import mertens_error
from .weilexplicit import (
    InsufficientCounts,
    WeilData,
    WeilDataError,
    curve_weil_data,
    phi_log_sum,
    residue_from_counts,
)

DEFAULT_NF_X = 10**6
DEFAULT_SIEVE_LIMIT = 10**7
DEFAULT_CURVE_N = 12
#: counts generated from P_1 for curve members; far more than the residue tail needs
CURVE_COUNT_DEPTH = 64


class FamilyError(ValueError):
    pass


Member = Union[QuadField, CurveModel, WeilData]


@dataclass(frozen=True)
class FamilySpec:
    """An ordered list of members and a truncation per member.

    ``kind`` is "nf" (members are QuadField) or "curve" (CurveModel or
    WeilData). ``truncation`` holds x(i) for number fields and N(i) for
    curves; None selects the default schedule.
    """

    kind: str
    members: tuple[Member, ...]
    truncation: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("nf", "curve"):
            raise FamilyError(f"unknown family kind {self.kind!r}")
        if not self.members:
            raise FamilyError("a family needs at least one member")
        if self.truncation is not None and len(self.truncation) != len(self.members):
            raise FamilyError("truncation schedule length does not match the member count")
        if self.kind == "nf":
            if not all(isinstance(m, QuadField) for m in self.members):
                raise FamilyError("number-field families take QuadField members")
            gs = [m.genus for m in self.members]
        else:
            if not all(isinstance(m, (CurveModel, WeilData)) for m in self.members):
                raise FamilyError("curve families take CurveModel or WeilData members")
            dims = {1 if isinstance(m, CurveModel) else m.d for m in self.members}
            if len(dims) > 1:
                raise FamilyError(f"members mix dimensions {sorted(dims)}")
            gs = [_b_x(m) for m in self.members]
        if any(b > a for a, b in zip(gs[1:], gs)):
            raise FamilyError("genus / b_X must be nondecreasing along the family")

    def truncation_for(self, i: int) -> int:
        if self.truncation is not None:
            return self.truncation[i]
        if self.kind == "nf":
            return DEFAULT_NF_X
        m = self.members[i]
        return DEFAULT_CURVE_N if isinstance(m, CurveModel) else min(m.M, DEFAULT_CURVE_N)

    @classmethod
    def imaginary_quadratic(cls, lo: int, hi: int, x: int | None = None) -> "FamilySpec":
        """Fundamental D in [lo, hi] (negative), ordered by |D|."""
        if hi >= 0:
            raise FamilyError("imaginary quadratic discriminants are negative")
        ds = sorted(fundamental_discriminants(lo, hi), key=abs)
        return cls._from_discs(ds, x)

    @classmethod
    def real_quadratic(cls, lo: int, hi: int, x: int | None = None) -> "FamilySpec":
        if lo <= 1:
            raise FamilyError("real quadratic discriminants are > 1")
        return cls._from_discs(fundamental_discriminants(lo, hi), x)

    @classmethod
    def _from_discs(cls, discs: Sequence[int], x: int | None) -> "FamilySpec":
        members = tuple(QuadField(D) for D in discs)
        trunc = None if x is None else (int(x),) * len(members)
        return cls("nf", members, trunc)

    @classmethod
    def from_document(cls, doc: Mapping, base: Path | None = None) -> "FamilySpec":
        kind = doc.get("kind")
        name = str(doc.get("name", ""))
        trunc_key = "x" if kind == "nf" else "N"
        raw_trunc = doc.get(trunc_key)
        if kind == "nf":
            if "generator" in doc:
                g = doc["generator"]
                try:
                    kind_g, lo, hi = g["type"], int(g["lo"]), int(g["hi"])
                except KeyError as exc:
                    raise FamilyError(f"generator missing field {exc.args[0]!r}") from None
                if kind_g == "imaginary_quadratic":
                    ds = sorted(fundamental_discriminants(lo, min(hi, -3)), key=abs)
                elif kind_g == "real_quadratic":
                    ds = fundamental_discriminants(max(lo, 5), hi)
                else:
                    raise FamilyError(f"unknown generator {kind_g!r}")
                members: tuple[Member, ...] = tuple(QuadField(D) for D in ds)
            elif "members" in doc:
                try:
                    members = tuple(QuadField.parse(t) for t in doc["members"])
                except FieldError as exc:
                    raise FamilyError(f"member list: {exc}") from None
            else:
                raise FamilyError("number-field family needs 'members' or 'generator'")
        elif kind == "curve":
            members = tuple(_load_curve_member(m, base, i) for i, m in enumerate(doc.get("members", [])))
        else:
            raise FamilyError(f"family document has unknown kind {kind!r}")
        if raw_trunc is None:
            trunc = None
        elif isinstance(raw_trunc, list):
            trunc = tuple(int(t) for t in raw_trunc)
        else:
            trunc = (int(raw_trunc),) * len(members)
        return cls(kind, members, trunc, name)


def _load_curve_member(entry, base: Path | None, i: int) -> CurveModel | WeilData:
    from .corpus import corpus_document

    where = f"member {i}"
    try:
        if isinstance(entry, str):
            entry = {"corpus": entry}
        if "corpus" in entry:
            doc = corpus_document(entry["corpus"])
        elif "path" in entry:
            path = Path(entry["path"])
            if base is not None and not path.is_absolute():
                path = base / path
            doc = json.loads(path.read_text())
        else:
            doc = entry
        if "d" in doc or "eigen_angles" in doc or "betti" in doc:
            return WeilData.from_document(doc)
        return CurveModel.from_document(doc)
    except (KeyError, CurveError, WeilDataError, json.JSONDecodeError, OSError) as exc:
        raise FamilyError(f"{where}: {exc}") from None


def _b_x(m: CurveModel | WeilData) -> int:
    return betti_normalizer(m.genus) if isinstance(m, CurveModel) else m.b_x


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

COLUMNS = (
    "index",
    "member",
    "g",
    "n",
    "truncation",
    "log_kappa_over_g",
    "truncated_sum",
    "gap",
    "residual",
    "shape",
    "normalized_residual",
    "status",
)


@dataclass(frozen=True)
class FamilyRow:
    """One member. ``gap`` = truncated_sum - log_kappa_over_g. ``residual``
    subtracts the whole finite-level main term, so for a number field it is
    the Mertens error over g and for a curve it is
    (sum - H_N - log(kappa log r)) / b_X; ``shape`` is the matching error
    shape and ``normalized_residual`` = residual / shape."""

    index: int
    member: str
    g: float
    n: int
    truncation: int
    log_kappa_over_g: float
    truncated_sum: float
    gap: float
    residual: float
    shape: float
    normalized_residual: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in COLUMNS)


def _failed(index: int, member: str, g: float, n: int, trunc: int, status: str) -> FamilyRow:
    nan = float("nan")
    return FamilyRow(index, member, g, n, trunc, nan, nan, nan, nan, nan, nan, status)


@dataclass(frozen=True)
class FamilyReport:
    kind: str
    rows: tuple[FamilyRow, ...]
    name: str = ""

    def ok_rows(self) -> list[FamilyRow]:
        return [r for r in self.rows if r.ok]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def ibs_sanity(self) -> list[bool]:
        """Per member: log kappa / g is at most the truncated sum plus the
        member's own |residual| (failed members pass vacuously)."""
        return [not r.ok or r.log_kappa_over_g <= r.truncated_sum + abs(r.residual) + 1e-12 for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r.values()])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str, name: str = "") -> "FamilyReport":
        rows = []
        reader = csv.DictReader(io.StringIO(text))
        for rec in reader:
            rows.append(
                FamilyRow(
                    int(rec["index"]),
                    rec["member"],
                    float(rec["g"]),
                    int(rec["n"]),
                    int(rec["truncation"]),
                    *(float(rec[c]) for c in COLUMNS[5:11]),
                    rec["status"],
                )
            )
        return cls(kind, tuple(rows), name)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


# ---------------------------------------------------------------------------
# number-field scan
# ---------------------------------------------------------------------------

def _nf_row(args: tuple[int, QuadField, int, int, int | None]) -> FamilyRow:
    i, K, x, sieve_limit, cap = args
    g, n = K.genus, K.degree
    if g <= 0:
        return _failed(i, K.label, g, n, x, "genus-zero")
    if x > sieve_limit:
        return _failed(i, K.label, g, n, x, "budget")
    try:
        lk = math.log(residue_kappa(K, cap=cap)) / g
    except FieldError:
        return _failed(i, K.label, g, n, x, "budget")
    rep = mertens_error(K, x)
    trunc = rep.sum_log / g
    residual = rep.error / g
    shape = rep.grh_bound_shape / g
    return FamilyRow(i, K.label, g, n, x, lk, trunc, trunc - lk, residual, shape, residual / shape)


def _pool_map(fn: Callable, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))


def scan_nf_family(
    spec: FamilySpec,
    *,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
    disc_cap: int | None = None,
    jobs: int = 1,
) -> FamilyReport:
    if spec.kind != "nf":
        raise FamilyError("scan_nf_family needs a number-field family")
    tasks = [(i, K, spec.truncation_for(i), sieve_limit, disc_cap) for i, K in enumerate(spec.members)]
    return FamilyReport("nf", tuple(_pool_map(_nf_row, tasks, jobs)), spec.name)


# ---------------------------------------------------------------------------
# curve scan
# ---------------------------------------------------------------------------

@dataclass
class _CurveMember:
    name: str
    weil: WeilData
    b_x: int
    kappa_log_r: float | None = None
    extra: dict = field(default_factory=dict)


def _resolve_curve(
    m: CurveModel | WeilData,
    i: int,
    budget: Mapping[str, int] | None,
    counter: Callable[[CurveModel, int], int] | None,
    brute_max: int,
) -> _CurveMember:
    if isinstance(m, WeilData):
        return _CurveMember(m.name or f"member{i}", m, m.b_x)
    res = analyse_curve(m, CURVE_COUNT_DEPTH, budget, counter, brute_max=brute_max)
    w = curve_weil_data(res.zeta, CURVE_COUNT_DEPTH, m.name)
    return _CurveMember(m.name or f"member{i}", w, betti_normalizer(m.genus), float(res.zeta.kappa_log_r()))


def scan_curve_family(
    spec: FamilySpec,
    *,
    budget: Mapping[str, int] | None = None,
    counter: Callable[[CurveModel, int], int] | None = None,
    brute_max: int = 8,
) -> FamilyReport:
    if spec.kind != "curve":
        raise FamilyError("scan_curve_family needs a curve family")
    rows = []
    for i, m in enumerate(spec.members):
        N = spec.truncation_for(i)
        label = m.name or f"member{i}"
        b = _b_x(m)
        try:
            cm = _resolve_curve(m, i, budget, counter, brute_max)
            w = cm.weil
            if N > w.M:
                raise InsufficientCounts(f"N = {N} exceeds the {w.M} available counts")
            est = residue_from_counts(w)
        except BudgetExceeded:
            rows.append(_failed(i, label, b, 0, N, "budget"))
            continue
        except InsufficientCounts:
            rows.append(_failed(i, label, b, 0, N, "insufficient-counts"))
            continue
        r = w.r
        log_kappa = math.log(est.kappa_log_r) - math.log(math.log(r))
        total = phi_log_sum(w, N, w.closed_points())
        trunc = total / b
        harmonic = math.fsum(1 / k for k in range(1, N + 1))
        residual = (total - harmonic - math.log(est.kappa_log_r)) / b
        shape = r ** (-N / 2) / N
        rows.append(
            FamilyRow(i, label, float(b), 0, N, log_kappa / b, trunc, trunc - log_kappa / b, residual, shape, residual / shape)
        )
    return FamilyReport("curve", tuple(rows), spec.name)


# ---------------------------------------------------------------------------
# phi_q sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiSequence:
    q: int
    values: tuple[float, ...]

    @property
    def tail_spread(self) -> float:
        """max - min over the last quartile (at least one value)."""
        if not self.values:
            return float("nan")
        tail = self.values[-max(1, len(self.values) // 4) :]
        return max(tail) - min(tail)


def _power_index(q: int, r: int) -> int | None:
    m, v = 0, 1
    while v < q:
        v *= r
        m += 1
    return m if v == q and m > 0 else None


def phi_limit_estimate(
    spec: FamilySpec,
    q: int,
    *,
    budget: Mapping[str, int] | None = None,
    counter: Callable[[CurveModel, int], int] | None = None,
) -> PhiSequence:
    """Phi_q / g for each member (no limit is asserted)."""
    vals = []
    if spec.kind == "nf":
        for K in spec.members:
            vals.append(place_table(K, q)[q] / K.genus if K.genus > 0 else float("nan"))
    else:
        for i, m in enumerate(spec.members):
            cm = _resolve_curve(m, i, budget, counter, brute_max=8)
            # closed points of degree k have label r^k
            k = _power_index(q, cm.weil.r)
            if k is None:
                vals.append(0.0)
                continue
            vals.append(cm.weil.closed_points()[k] / cm.b_x)
    return PhiSequence(q, tuple(vals))
