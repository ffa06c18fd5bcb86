"""Exact arithmetic substrate.

Exact rationals (``fractions.Fraction``), finite fields F_{p^k} in a fixed
polynomial basis, prime sieving, the Kronecker symbol, and the two analytic
scalars the rest of the package consumes (Euler's constant and the offset
logarithmic integral).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy import integrate

BigRational = Fraction

EULER_GAMMA = 0.57721566490153286060651209008240243


def euler_gamma() -> float:
    return EULER_GAMMA


# ---------------------------------------------------------------------------
# integers
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    """Trial division; meant for small n and as a sieve oracle."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(abs(n)).values())


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a discriminant D (D = 0 or 1 mod 4) and n >= 1."""
    if D % 4 not in (0, 1):
        raise ValueError(f"kronecker: D={D} is not 0 or 1 mod 4")
    if n < 1:
        raise ValueError("kronecker: n must be positive")
    return _kronecker(D, n)


def _kronecker(a: int, n: int) -> int:
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n), n odd
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# sieving
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeSieve:
    """Primality table up to ``limit``; read-only once built."""

    limit: int
    flags: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "PrimeSieve":
        if limit < 1:
            raise ValueError("sieve limit must be positive")
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if flags[p]:
                flags[p * p :: p] = False
        flags.setflags(write=False)
        return cls(limit, flags)

    def __contains__(self, n: int) -> bool:
        if not 0 <= n <= self.limit:
            raise ValueError(f"{n} outside sieve range [0, {self.limit}]")
        return bool(self.flags[n])

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(upto, self.limit)
        return np.flatnonzero(self.flags[: upto + 1]).astype(np.int64)


@lru_cache(maxsize=8)
def _cached_sieve(limit: int) -> PrimeSieve:
    return PrimeSieve.build(limit)


def primes_upto(x: int, *, segment: int = 1 << 20, dense_limit: int = 10**6) -> np.ndarray:
    """All primes p <= x as an int64 array.

    Dense sieve below ``dense_limit``, segmented above it.
    """
    if x < 2:
        return np.zeros(0, dtype=np.int64)
    if x <= dense_limit:
        return _cached_sieve(dense_limit).primes(x)
    return np.concatenate(list(iter_prime_segments(2, x, segment=segment)))


def iter_prime_segments(lo: int, hi: int, *, segment: int = 1 << 20) -> Iterator[np.ndarray]:
    """Yield arrays of the primes in [lo, hi], one sieve segment at a time."""
    lo = max(lo, 2)
    if hi < lo:
        return
    base = PrimeSieve.build(max(math.isqrt(hi), 2)).primes()
    start = lo
    while start <= hi:
        stop = min(start + segment - 1, hi)
        flags = np.ones(stop - start + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start :: p] = False
        if start <= 1:
            flags[: 2 - start] = False
        yield np.flatnonzero(flags).astype(np.int64) + start
        start = stop + 1


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] = least prime dividing n for 2 <= n <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            block = spf[p::p]
            block[block == 0] = p
    return spf


@lru_cache(maxsize=4)
def cached_spf(limit: int) -> np.ndarray:
    spf = smallest_prime_factors(limit)
    spf.setflags(write=False)
    return spf


# ---------------------------------------------------------------------------
# analytic scalars
# ---------------------------------------------------------------------------

def li(x: float) -> float:
    """Offset logarithmic integral, the integral of 1/log t from 2 to x."""
    if x < 2:
        raise ValueError("li is defined here for x >= 2")
    if x == 2:
        return 0.0
    # t = e^u makes the integrand e^u/u, smooth on [log 2, log x]
    a, b = math.log(2.0), math.log(x)
    val, _ = integrate.quad(lambda u: math.exp(u) / u, a, b, epsabs=0.0, epsrel=1e-13, limit=500)
    return val


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, low degree first, no trailing zeros)
# ---------------------------------------------------------------------------

Poly = list


def ptrim(a: Sequence[int], p: int) -> Poly:
    out = [c % p for c in a]
    while out and out[-1] == 0:
        out.pop()
    return out


def psub(a: Sequence[int], b: Sequence[int], p: int) -> Poly:
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], p)


def pmul(a: Sequence[int], b: Sequence[int], p: int) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return ptrim(out, p)


def pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[Poly, Poly]:
    b = ptrim(b, p)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = ptrim(a, p)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(r) - len(b) + 1, 0)
    while len(r) >= len(b):
        c = r[-1] * inv % p
        s = len(r) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            r[s + i] = (r[s + i] - c * bi) % p
        r = ptrim(r, p)
    return ptrim(q, p), r


def pmod(a: Sequence[int], b: Sequence[int], p: int) -> Poly:
    return pdivmod(a, b, p)[1]


def pgcd(a: Sequence[int], b: Sequence[int], p: int) -> Poly:
    a, b = ptrim(a, p), ptrim(b, p)
    while b:
        a, b = b, pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def ppowmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> Poly:
    result: Poly = [1]
    base = pmod(a, m, p)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, p), m, p)
        base = pmod(pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a polynomial over F_p."""
    f = ptrim(f, p)
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if ppowmod(x, p**k, f, p) != pmod(x, f, p):
        return False
    for ell in factorize(k):
        h = psub(ppowmod(x, p ** (k // ell), f, p), x, p)
        if len(pgcd(h, f, p)) != 1:
            return False
    return True


def _monic_polys(p: int, k: int) -> Iterator[Poly]:
    # lexicographic in (c_{k-1}, ..., c_0)
    for idx in range(p**k):
        coeffs = []
        v = idx
        for _ in range(k):
            coeffs.append(v % p)
            v //= p
        yield coeffs + [1]


@lru_cache(maxsize=None)
def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    for f in _monic_polys(p, k):
        if is_irreducible(f, p):
            return tuple(f)
    raise RuntimeError("unreachable: irreducible polynomials exist in every degree")


@lru_cache(maxsize=None)
def first_primitive(p: int, k: int) -> tuple[int, ...]:
    """First monic irreducible f of degree k for which x generates F_p[x]/(f)^*."""
    order = p**k - 1
    ells = list(factorize(order))
    for f in _monic_polys(p, k):
        if f[0] == 0 or not is_irreducible(f, p):
            continue
        if all(ppowmod([0, 1], order // ell, f, p) != [1] for ell in ells):
            return tuple(f)
    raise RuntimeError("unreachable: primitive polynomials exist in every degree")


# ---------------------------------------------------------------------------
# F_{p^k}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FqElem:
    """Element of F_{p^k}: coordinates w.r.t. the basis 1, x, ..., x^{k-1} of F_p[x]/(m)
    with m = first_irreducible(p, k)."""

    p: int
    k: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.k:
            raise ValueError(f"expected {self.k} coordinates, got {len(self.coeffs)}")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coordinates must be reduced mod p")

    # construction ---------------------------------------------------------
    @classmethod
    def of(cls, p: int, k: int, value) -> "FqElem":
        """From an int (prime-field element) or a coordinate sequence."""
        if isinstance(value, FqElem):
            if (value.p, value.k) != (p, k):
                raise ValueError("element belongs to another field")
            return value
        if isinstance(value, int):
            return cls(p, k, (value % p,) + (0,) * (k - 1))
        vals = [int(v) % p for v in value]
        if len(vals) > k:
            raise ValueError(f"coordinate vector longer than k={k}")
        return cls(p, k, tuple(vals + [0] * (k - len(vals))))

    @classmethod
    def zero(cls, p: int, k: int) -> "FqElem":
        return cls(p, k, (0,) * k)

    @classmethod
    def one(cls, p: int, k: int) -> "FqElem":
        return cls.of(p, k, 1)

    @property
    def modulus(self) -> tuple[int, ...]:
        return first_irreducible(self.p, self.k)

    def __int__(self) -> int:
        """Integer code sum c_i p^i; a bijection onto range(p^k)."""
        return sum(c * self.p**i for i, c in enumerate(self.coeffs))

    @classmethod
    def from_int(cls, p: int, k: int, v: int) -> "FqElem":
        coeffs = []
        for _ in range(k):
            coeffs.append(v % p)
            v //= p
        return cls(p, k, tuple(coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _wrap(self, poly: Sequence[int]) -> "FqElem":
        poly = pmod(poly, self.modulus, self.p)
        return FqElem(self.p, self.k, tuple(list(poly) + [0] * (self.k - len(poly))))

    def _coerce(self, other) -> "FqElem":
        return FqElem.of(self.p, self.k, other)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "FqElem":
        o = self._coerce(other)
        return FqElem(self.p, self.k, tuple((a + b) % self.p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "FqElem":
        return FqElem(self.p, self.k, tuple(-a % self.p for a in self.coeffs))

    def __sub__(self, other) -> "FqElem":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "FqElem":
        return self._coerce(other) - self

    def __mul__(self, other) -> "FqElem":
        o = self._coerce(other)
        return self._wrap(pmul(self.coeffs, o.coeffs, self.p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FqElem":
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(ppowmod(ptrim(self.coeffs, self.p), e, self.modulus, self.p))

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in F_q")
        return self ** (self.p**self.k - 2)

    def __truediv__(self, other) -> "FqElem":
        return self * self._coerce(other).inverse()

    def frobenius(self) -> "FqElem":
        return self**self.p

    def is_square(self) -> bool:
        if self.is_zero() or self.p == 2:
            return True
        return (self ** ((self.p**self.k - 1) // 2)) == FqElem.one(self.p, self.k)

    def __repr__(self) -> str:
        return f"FqElem(p={self.p}, k={self.k}, {list(self.coeffs)})"


def field_elements(p: int, k: int) -> Iterator[FqElem]:
    for v in range(p**k):
        yield FqElem.from_int(p, k, v)


# polynomials with F_q coefficients, used for squarefreeness checks --------

def qpoly_trim(a: Sequence[FqElem]) -> list[FqElem]:
    out = list(a)
    while out and out[-1].is_zero():
        out.pop()
    return out


def qpoly_derivative(a: Sequence[FqElem]) -> list[FqElem]:
    return qpoly_trim([a[i] * i for i in range(1, len(a))])


def qpoly_mod(a: Sequence[FqElem], b: Sequence[FqElem]) -> list[FqElem]:
    r, b = qpoly_trim(a), qpoly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = b[-1].inverse()
    while len(r) >= len(b):
        c = r[-1] * inv
        s = len(r) - len(b)
        for i, bi in enumerate(b):
            r[s + i] = r[s + i] - c * bi
        r = qpoly_trim(r)
    return r


def qpoly_gcd_degree(a: Sequence[FqElem], b: Sequence[FqElem]) -> int:
    a, b = qpoly_trim(a), qpoly_trim(b)
    while b:
        a, b = b, qpoly_mod(a, b)
    return len(a) - 1


def qpoly_is_squarefree(f: Sequence[FqElem]) -> bool:
    f = qpoly_trim(f)
    df = qpoly_derivative(f)
    if not df:
        # f' = 0 means f is a p-th power
        return len(f) <= 1
    return qpoly_gcd_degree(f, df) == 0
