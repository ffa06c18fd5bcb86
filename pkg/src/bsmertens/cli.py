"""Command-line front end.

Every command writes one CSV report (``--output``, default stdout) and a
one-line summary per dataset on stderr. Exit status: 0 success, 1 validation
failure, 2 budget exhaustion.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import fcntl
import io
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping, Sequence

from . import __version__
from .corpus import CORPUS, corpus_document
from .curvezeta import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CurveError,
    CurveModel,
    analyse_curve,
    count_points,
)
from .families import DEFAULT_SIEVE_LIMIT, FamilyError, FamilySpec, scan_curve_family, scan_nf_family
from .families import _pool_map
from .nfmertens import (
    ConditionGate,
    condition_gate,
    lemma_c2_check,
    mertens_error,
    pi_audit,
    prime_square_tail,
    rho_epsilon_bound,
)
from .quadfield import FieldError, QuadField, class_number_formula_check, place_table, residue_kappa
from .weilexplicit import (
    IdentityViolation,
    InsufficientCounts,
    WeilData,
    WeilDataError,
    audit,
    curve_weil_data,
    residue_from_counts,
    s_terms,
)

CACHE_ENV = "BSMERTENS_CACHE_DIR"
COMMANDS = ("nf-mertens", "nf-family", "curve-zeta", "explicit-formula", "bounds-audit", "curve-family", "residue")

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2


class DocumentError(ValueError):
    """An input document could not be read or parsed."""


# ---------------------------------------------------------------------------
# tabular reports
# ---------------------------------------------------------------------------

def format_cell(v: Any) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def parse_cell(text: str, kind: type) -> Any:
    if text == "n/a":
        return None
    if kind is bool:
        if text not in ("true", "false"):
            raise ValueError(f"not a boolean: {text!r}")
        return text == "true"
    return kind(text)


@dataclass
class Report:
    """Rows of typed cells with a fixed column order."""

    columns: tuple[tuple[str, type], ...]
    rows: list[tuple] = field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return [c for c, _ in self.columns]

    def add(self, *cells: Any) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"row has {len(cells)} cells, expected {len(self.columns)}")
        self.rows.append(tuple(cells))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.names)
        for row in self.rows:
            w.writerow([format_cell(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            return None if isinstance(v, float) and not math.isfinite(v) else v

        doc = {"columns": self.names, "rows": [dict(zip(self.names, map(clean, r))) for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_csv(cls, text: str, columns: Sequence[tuple[str, type]]) -> "Report":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != [c for c, _ in columns]:
            raise DocumentError(f"CSV header {header} does not match {[c for c, _ in columns]}")
        rep = cls(tuple(columns))
        for lineno, rec in enumerate(reader, start=2):
            try:
                rep.add(*(parse_cell(t, k) for t, (_, k) in zip(rec, columns)))
            except ValueError as exc:
                raise DocumentError(f"line {lineno}: {exc}") from None
        return rep


def read_csv(text: str, columns: Sequence[tuple[str, type]]) -> Report:
    return Report.from_csv(text, columns)


MERTENS_COLUMNS = (
    ("field", str),
    ("x", int),
    ("sum_log", float),
    ("sum_recip", float),
    ("main_term", float),
    ("error", float),
    ("normalized_error", float),
    ("C1", bool),
    ("C2", bool),
    ("C3", bool),
)
FAMILY_COLUMNS = (
    ("index", int),
    ("member", str),
    ("g", float),
    ("n", int),
    ("truncation", int),
    ("log_kappa_over_g", float),
    ("truncated_sum", float),
    ("gap", float),
    ("residual", float),
    ("shape", float),
    ("normalized_residual", float),
    ("status", str),
)
ZETA_COLUMNS = (("n", int), ("N_n", int), ("Phi_n", int), ("source", str))
FORMULA_COLUMNS = (("N", int), ("S0", float), ("S1", float), ("S2", float), ("S3", float), ("identity", str))
AUDIT_COLUMNS = (
    ("check", str),
    ("N", int),
    ("value", float),
    ("lower", float),
    ("upper", float),
    ("holds", bool),
    ("in_gate", bool),
)
NF_AUDIT_COLUMNS = (("check", str), ("x", int), ("value", float), ("bound", float), ("ratio", float), ("holds", bool))
CURVE_RESIDUE_COLUMNS = (
    ("M", int),
    ("kappa_log_r", float),
    ("tail", float),
    ("exact", float),
    ("abs_diff", float),
    ("within_tail", bool),
)
FIELD_RESIDUE_COLUMNS = (
    ("field", str),
    ("kappa", float),
    ("h", int),
    ("regulator", float),
    ("kappa_class_formula", float),
    ("abs_diff", float),
)


# ---------------------------------------------------------------------------
# point-count cache
# ---------------------------------------------------------------------------

@contextlib.contextmanager
def _locked(path: Path) -> Iterator[None]:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path.with_suffix(".lock"), "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def cache_path(cache_dir: Path, curve: CurveModel, n: int) -> Path:
    return cache_dir / curve.canonical_hash() / f"{n}.json"


def cache_counts(
    curve: CurveModel,
    n: int,
    cache_dir: str | Path | None = None,
    budget: Mapping[str, int] | None = None,
) -> int:
    """N_n from the cache keyed by (curve hash, n), counting on a miss.

    Entries written by another code version count as misses; unreadable
    entries are recomputed and overwritten with a warning.
    """
    root = cache_dir or os.environ.get(CACHE_ENV)
    if not root:
        return count_points(curve, n, budget)
    path = cache_path(Path(root), curve, n)
    with _locked(path):
        if path.exists():
            try:
                entry = json.loads(path.read_text())
                if entry["version"] == __version__:
                    if entry["hash"] != curve.canonical_hash() or entry["n"] != n:
                        raise ValueError("key mismatch")
                    return int(entry["count"])
            except (ValueError, KeyError, TypeError) as exc:
                warnings.warn(f"corrupt cache entry {path} ({exc}); recomputing", RuntimeWarning, stacklevel=2)
        value = count_points(curve, n, budget)
        entry = {"version": __version__, "hash": curve.canonical_hash(), "n": n, "count": value}
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh)
        os.replace(tmp, path)
        return value


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------

def load_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise DocumentError(f"{p}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_curve_arg(token: str) -> CurveModel:
    if token in CORPUS and not Path(token).exists():
        doc = corpus_document(token)
        where = f"corpus:{token}"
    else:
        doc = load_json(token)
        where = token
    try:
        return CurveModel.from_document(doc)
    except CurveError as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def load_weil_arg(token: str, M: int | None = None) -> WeilData:
    try:
        return WeilData.from_document(load_json(token), M)
    except WeilDataError as exc:
        raise DocumentError(f"{token}: {exc}") from exc


@dataclass
class Context:
    args: argparse.Namespace

    @property
    def budget(self) -> dict[str, int]:
        return {"plane": self.args.budget_plane, "hyperelliptic": self.args.budget_hyperelliptic}

    def counter(self) -> Callable[[CurveModel, int], int]:
        cache = self.args.cache_dir or os.environ.get(CACHE_ENV)
        budget = self.budget
        return lambda c, n: cache_counts(c, n, cache, budget)

    def gate(self, K: QuadField) -> ConditionGate:
        a = self.args
        return ConditionGate.for_field(K, c2=a.c2, c3=a.c3, c5=a.c5)

    def summary(self, text: str) -> None:
        print(f"{self.args.command}: {text}", file=sys.stderr)


def _weil_for(ctx: Context, n_max: int, *, depth: int = 64) -> tuple[WeilData, float | None]:
    """Weil data for --curve (counts extended through P_1) or --weil."""
    a = ctx.args
    if a.weil:
        return load_weil_arg(a.weil), None
    curve = load_curve_arg(a.curve)
    res = analyse_curve(curve, max(n_max, depth), ctx.budget, ctx.counter(), brute_max=a.brute_max)
    w = curve_weil_data(res.zeta, max(n_max, depth), curve.name or Path(a.curve).stem)
    return w, float(res.zeta.kappa_log_r())


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _mertens_rows(task: tuple[int, tuple[int, ...], float, float, float]) -> list[tuple]:
    disc, xs, c2, c3, c5 = task
    K = QuadField(disc)
    table = place_table(K, max(xs))
    gate = ConditionGate.for_field(K, c2=c2, c3=c3, c5=c5)
    rows = []
    for x in xs:
        rep = mertens_error(K, x, table)
        g = condition_gate(gate, x, strict_c3=False)
        rows.append((rep.field, x, rep.sum_log, rep.sum_recip, rep.main_term, rep.error, rep.normalized_error, g.C1, g.C2, g.C3))
    return rows


def cmd_nf_mertens(ctx: Context) -> Report:
    a = ctx.args
    fields = sorted({QuadField.parse(f) for f in a.field}, key=lambda K: K.disc)
    xs = tuple(sorted(set(a.x)))
    if max(xs) > a.sieve_limit:
        raise BudgetExceeded(f"x = {max(xs)} exceeds the sieve limit {a.sieve_limit}")
    if min(xs) < 3:
        raise ValueError("x must be >= 3")
    for K in fields:
        residue_kappa(K, cap=a.disc_cap)
    rep = Report(MERTENS_COLUMNS)
    tasks = [(K.disc, xs, a.c2, a.c3, a.c5) for K in fields]
    for K, rows in zip(fields, _pool_map(_mertens_rows, tasks, a.jobs)):
        for row in rows:
            rep.add(*row)
        last = rows[-1]
        extra = f", rho bound {rho_epsilon_bound(a.rho, last[1]):.6g}" if a.rho is not None else ""
        ctx.summary(f"field {K.label}: {len(rows)} row(s), error at x = {last[1]} is {last[5]:.6g}{extra}")
    return rep


def _family_report(fr) -> Report:
    rep = Report(FAMILY_COLUMNS)
    for r in fr.rows:
        rep.add(*r.values())
    return rep


def _family_summary(ctx: Context, fr) -> None:
    ok = fr.ok_rows()
    bad = len(fr.rows) - len(ok)
    ibs = sum(not v for v in fr.ibs_sanity())
    ctx.summary(f"{len(fr.rows)} member(s), {bad} not computed, {ibs} basic-inequality violation(s)")


def cmd_nf_family(ctx: Context) -> Report:
    a = ctx.args
    if a.family:
        try:
            spec = FamilySpec.from_document(load_json(a.family), Path(a.family).parent)
        except FamilyError as exc:
            raise DocumentError(f"{a.family}: {exc}") from exc
        if a.x is not None:
            spec = FamilySpec(spec.kind, spec.members, (a.x,) * len(spec.members), spec.name)
    elif a.imaginary:
        spec = FamilySpec.imaginary_quadratic(a.imaginary[0], a.imaginary[1], a.x)
    elif a.real:
        spec = FamilySpec.real_quadratic(a.real[0], a.real[1], a.x)
    else:
        raise DocumentError("nf-family needs --family, --imaginary or --real")
    if spec.kind != "nf":
        raise DocumentError("nf-family needs a number-field family document")
    fr = scan_nf_family(spec, sieve_limit=a.sieve_limit, disc_cap=a.disc_cap, jobs=a.jobs)
    _family_summary(ctx, fr)
    if fr.rows and not fr.ok_rows():
        raise BudgetExceeded("no family member could be computed within the budgets")
    return _family_report(fr)


def cmd_curve_family(ctx: Context) -> Report:
    a = ctx.args
    try:
        spec = FamilySpec.from_document(load_json(a.family), Path(a.family).parent)
    except FamilyError as exc:
        raise DocumentError(f"{a.family}: {exc}") from exc
    if spec.kind != "curve":
        raise DocumentError("curve-family needs a curve family document")
    if a.n is not None:
        spec = FamilySpec(spec.kind, spec.members, (a.n,) * len(spec.members), spec.name)
    fr = scan_curve_family(spec, budget=ctx.budget, counter=ctx.counter(), brute_max=a.brute_max)
    _family_summary(ctx, fr)
    if fr.rows and not fr.ok_rows():
        raise BudgetExceeded("no family member could be computed within the budgets")
    return _family_report(fr)


def cmd_curve_zeta(ctx: Context) -> Report:
    a = ctx.args
    curve = load_curve_arg(a.curve)
    res = analyse_curve(curve, a.n_max, ctx.budget, ctx.counter(), brute_max=a.brute_max)
    rep = Report(ZETA_COLUMNS)
    for n in range(1, a.n_max + 1):
        rep.add(n, res.counts[n], res.phi[n], "count" if n <= res.brute_force_n else "zeta")
    coeffs = " ".join(str(c) for c in res.zeta.coeffs)
    ctx.summary(f"{curve.name or a.curve}: P_1 = [{coeffs}], {res.brute_force_n} brute-force count(s)")
    return rep


def cmd_explicit_formula(ctx: Context) -> Report:
    a = ctx.args
    w, _ = _weil_for(ctx, a.n_max, depth=a.n_max)
    phi = w.closed_points()
    rep = Report(FORMULA_COLUMNS)
    for N in range(1, a.n_max + 1):
        s = s_terms(w, N, phi)
        rep.add(N, float(s.S0), float(s.S1), float(s.S2), float(s.S3), "exact" if s.identity_exact else "violated")
    ctx.summary(f"{w.name or 'dataset'}: S0 = S1 + S2 + S3 exactly for N = 1..{a.n_max}")
    return rep


def _nf_audit(ctx: Context) -> Report:
    a = ctx.args
    K = QuadField.parse(a.field)
    xs = sorted(set(a.x))
    if max(xs) > a.sieve_limit:
        raise BudgetExceeded(f"x = {max(xs)} exceeds the sieve limit {a.sieve_limit}")
    cutoff = a.cutoff or min(a.sieve_limit, 100 * max(xs))
    table = place_table(K, max(cutoff, max(xs)))
    gate = ctx.gate(K)
    rep = Report(NF_AUDIT_COLUMNS)
    for x in xs:
        p = pi_audit(K, x, table)
        rep.add("pi_grh_shape", x, abs(p.delta), p.grh_bound_shape, p.normalized_delta, None)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            t = prime_square_tail(K, x, cutoff, table)
        rep.add("prime_square_tail", x, t.value, t.bound, t.value / t.bound, t.value <= t.bound)
        lem = lemma_c2_check(K.degree, a.c2, x)
        rep.add("lemma_c2", x, lem.lhs, lem.rhs, lem.lhs / lem.rhs, lem.holds)
        g = condition_gate(gate, x, strict_c3=False)
        lx = math.log(x)
        rep.add("C1", x, lx, gate.c1_threshold(), None, g.C1)
        rep.add("C2", x, lx, gate.c2_threshold(), None, g.C2)
        rep.add("C2_proof", x, lx, gate.c2_proof_threshold(), None, g.C2_proof)
        rep.add("C3", x, lx, gate.c3_threshold() if K.genus > 0 else None, None, g.C3)
    ctx.summary(f"field {K.label}: {len(xs)} x value(s) audited")
    return rep


def _curve_audit(ctx: Context) -> tuple[Report, int]:
    a = ctx.args
    w, _ = _weil_for(ctx, a.n_max)
    phi = w.closed_points()
    rep = Report(AUDIT_COLUMNS)
    failed = missing = 0
    for N in range(a.n_min, a.n_max + 1):
        try:
            checks = audit(w, N, phi)
        except InsufficientCounts:
            missing += 1
            rep.add("S3", N, None, None, None, None, True)
            continue
        for c in checks:
            rep.add(c.name, N, c.value, c.lower, c.upper, c.holds, c.in_gate)
            failed += c.in_gate and not c.holds
    ctx.summary(f"{w.name or 'dataset'}: N = {a.n_min}..{a.n_max}, {failed} in-gate failure(s), {missing} short of counts")
    if failed:
        return rep, EXIT_INVALID
    return rep, EXIT_BUDGET if missing else EXIT_OK


def cmd_bounds_audit(ctx: Context) -> Report | tuple[Report, int]:
    if ctx.args.field is not None:
        return _nf_audit(ctx)
    if not (ctx.args.curve or ctx.args.weil):
        raise DocumentError("bounds-audit needs --field, --curve or --weil")
    return _curve_audit(ctx)


def cmd_residue(ctx: Context) -> Report:
    a = ctx.args
    if a.field is not None:
        rep = Report(FIELD_RESIDUE_COLUMNS)
        for tok in a.field:
            K = QuadField.parse(tok)
            if K.is_rational:
                rep.add(K.label, 1.0, 1, None, None, None)
                continue
            residue_kappa(K, cap=a.disc_cap)
            chk = class_number_formula_check(K)
            rep.add(K.label, chk.kappa_analytic, chk.h, chk.regulator, chk.kappa_class_formula, chk.abs_diff)
            ctx.summary(f"field {K.label}: kappa = {chk.kappa_analytic:.12g}, h = {chk.h}")
        return rep
    if not (a.curve or a.weil):
        raise DocumentError("residue needs --field, --curve or --weil")
    w, exact = _weil_for(ctx, a.M, depth=a.M)
    est = residue_from_counts(w.truncated(a.M), tol=math.inf)
    diff = None if exact is None else abs(est.kappa_log_r - exact)
    within = None if diff is None else diff <= est.kappa_log_r_tail
    rep = Report(CURVE_RESIDUE_COLUMNS)
    rep.add(a.M, est.kappa_log_r, est.kappa_log_r_tail, exact, diff, within)
    ctx.summary(f"{w.name or 'dataset'}: kappa log r = {est.kappa_log_r:.12g} +- {est.kappa_log_r_tail:.3g} at M = {a.M}")
    return rep


HANDLERS: dict[str, Callable[[Context], Any]] = {
    "nf-mertens": cmd_nf_mertens,
    "nf-family": cmd_nf_family,
    "curve-zeta": cmd_curve_zeta,
    "explicit-formula": cmd_explicit_formula,
    "bounds-audit": cmd_bounds_audit,
    "curve-family": cmd_curve_family,
    "residue": cmd_residue,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output and resources")
    g.add_argument("-o", "--output", help="CSV destination (default: stdout)")
    g.add_argument("--json", action="store_true", help="also write a JSON mirror (OUTPUT.json, or stdout instead of CSV)")
    g.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (default: 1)")
    g.add_argument("--cache-dir", help=f"point-count cache directory (default: ${CACHE_ENV}, else no cache)")
    g.add_argument("--sieve-limit", type=_positive_int, default=DEFAULT_SIEVE_LIMIT, help="largest x sieved (default: 10^7)")
    g.add_argument("--disc-cap", type=_positive_int, default=10**6, help="largest |D| for character sums (default: 10^6)")
    g.add_argument(
        "--budget-plane", type=_positive_int, default=DEFAULT_BUDGET["plane"], help="largest field size for plane-curve counts (default: 10^4)"
    )
    g.add_argument(
        "--budget-hyperelliptic",
        type=_positive_int,
        default=DEFAULT_BUDGET["hyperelliptic"],
        help="largest field size for hyperelliptic counts (default: 10^7)",
    )
    g.add_argument("--brute-max", type=_positive_int, default=None, help="cap on brute-force extension degrees (default: budget only)")
    c = p.add_argument_group("constants")
    c.add_argument("--c2", type=_positive_float, default=1.0, help="constant c2 in (C2) and the C2 lemma (default: 1)")
    c.add_argument("--c3", type=_positive_float, default=1.0, help="constant c3 in (C1) (default: 1)")
    c.add_argument("--c5", type=_positive_float, default=1.0, help="constant c5 in (C3) (default: 1)")


def _curve_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--curve", help=f"curve document path or corpus name ({', '.join(CORPUS)})")
    g.add_argument("--weil", help="Weil data document (d, r, betti, counts or eigen_angles)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bsmertens", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("nf-mertens", help="Mertens sum, error and conditions for Q or a quadratic field")
    p.add_argument("--field", action="append", required=True, help="'Q' or a fundamental discriminant; repeatable")
    p.add_argument("--x", type=_positive_int, action="append", required=True, help="truncation; repeatable")
    p.add_argument("--rho", type=float, default=None, help="exceptional-zero distance for the non-GRH epsilon bound")
    _common(p)

    p = sub.add_parser("nf-family", help="scan a family of quadratic fields")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", help="family document")
    src.add_argument("--imaginary", type=int, nargs=2, metavar=("LO", "HI"), help="fundamental D in [LO, HI], D < 0")
    src.add_argument("--real", type=int, nargs=2, metavar=("LO", "HI"), help="fundamental D in [LO, HI], D > 1")
    p.add_argument("--x", type=_positive_int, default=None, help="truncation for every member (default: 10^6)")
    _common(p)

    p = sub.add_parser("curve-zeta", help="point counts, closed points and P_1 of a curve")
    p.add_argument("--curve", required=True, help=f"curve document path or corpus name ({', '.join(CORPUS)})")
    p.add_argument("--n-max", type=_positive_int, default=8)
    _common(p)

    p = sub.add_parser("explicit-formula", help="exact S0 = S1 + S2 + S3 split for N = 1..n-max")
    _curve_source(p)
    p.add_argument("--n-max", type=_positive_int, default=12)
    _common(p)

    p = sub.add_parser("bounds-audit", help="sandwich lemmas for a curve, or the number-field inequalities")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", help="curve document path or corpus name")
    src.add_argument("--weil", help="Weil data document")
    src.add_argument("--field", help="'Q' or a fundamental discriminant")
    p.add_argument("--n-min", type=_positive_int, default=1)
    p.add_argument("--n-max", type=_positive_int, default=12)
    p.add_argument("--x", type=_positive_int, action="append", default=None, help="number-field truncations; repeatable")
    p.add_argument("--cutoff", type=_positive_int, default=None, help="enumeration ceiling for the prime-square tail")
    _common(p)

    p = sub.add_parser("curve-family", help="scan a family of curves or Weil data")
    p.add_argument("--family", required=True, help="family document")
    p.add_argument("--n", type=_positive_int, default=None, help="truncation N for every member (default: min(M, 12))")
    _common(p)

    p = sub.add_parser("residue", help="residue kappa from counts (curves) or class number check (fields)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", help="curve document path or corpus name")
    src.add_argument("--weil", help="Weil data document")
    src.add_argument("--field", action="append", help="'Q' or a fundamental discriminant; repeatable")
    p.add_argument("--M", type=_positive_int, default=12, help="number of counts used (default: 12)")
    _common(p)
    return parser


def _write(ctx: Context, rep: Report) -> None:
    a = ctx.args
    if a.output:
        Path(a.output).write_text(rep.to_csv())
        if a.json:
            Path(a.output + ".json").write_text(rep.to_json())
    else:
        sys.stdout.write(rep.to_json() if a.json else rep.to_csv())


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "x", None) is None and args.command == "bounds-audit" and args.field is not None:
        args.x = [10**4]
    ctx = Context(args)
    try:
        out = HANDLERS[args.command](ctx)
        rep, code = out if isinstance(out, tuple) else (out, EXIT_OK)
        _write(ctx, rep)
        return code
    except BudgetExceeded as exc:
        print(f"{args.command}: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (
        DocumentError,
        CurveError,
        WeilDataError,
        FieldError,
        FamilyError,
        IdentityViolation,
        InsufficientCounts,
        ValueError,
    ) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
