"""Pure-Python (numpy) versions of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; selected
automatically when the extension is not built.

Finite-field kernels work in the log domain of F_Q with a fixed generator g:
an element is stored as its discrete log e in [0, Q-1) or -1 for zero.
Addition goes through the Zech table ``zech[e] = log(1 + g^e)``.
"""

from __future__ import annotations

import math

import numpy as np

_CHUNK = 1 << 20


def _powmod_vec(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    # operands stay below 2^31, so products fit in int64
    result = np.ones_like(base)
    base = base % mod
    exp = exp.copy()
    while np.any(exp):
        odd = (exp & 1).astype(bool)
        result[odd] = (result[odd] * base[odd]) % mod[odd]
        base = (base * base) % mod
        exp >>= 1
    return result


def kronecker_primes(D: int, primes: np.ndarray) -> np.ndarray:
    """chi_D(p) = (D/p) for every prime in ``primes``."""
    primes = np.asarray(primes, dtype=np.int64)
    out = np.zeros(primes.shape, dtype=np.int8)
    two = primes == 2
    if np.any(two):
        r = D % 8
        out[two] = 0 if D % 2 == 0 else (1 if r in (1, 7) else -1)
    odd = ~two
    if np.any(odd):
        p = primes[odd]
        a = np.mod(D, p)
        e = _powmod_vec(a, (p - 1) // 2, p)
        vals = np.where(e == 1, 1, np.where(e == 0, 0, -1)).astype(np.int8)
        out[odd] = vals
    return out


def quad_char_table(D: int, spf: np.ndarray) -> np.ndarray:
    """chi_D(a) for 0 <= a < |D| via complete multiplicativity."""
    m = abs(D)
    chi = np.zeros(m, dtype=np.int8)
    if m == 1:
        chi[0] = 1
        return chi
    chi[1] = 1
    a = np.arange(2, m, dtype=np.int64)
    s = np.asarray(spf[2:m], dtype=np.int64)
    prime_mask = s == a
    primes = a[prime_mask]
    chi_p = np.zeros(m, dtype=np.int8)
    chi_p[primes] = kronecker_primes(D, primes)
    vals = np.ones(a.shape, dtype=np.int8)
    rem = a.copy()
    while True:
        active = rem > 1
        if not np.any(active):
            break
        p = np.asarray(spf, dtype=np.int64)[rem[active]]
        vals[active] *= chi_p[p]
        rem[active] //= p
    chi[2:] = vals
    return chi


def imag_char_moment(D: int, spf: np.ndarray) -> int:
    """sum_{a < |D|} chi_D(a) * a."""
    chi = quad_char_table(D, spf).astype(np.int64)
    return int(np.dot(chi, np.arange(abs(D), dtype=np.int64)))


def real_char_logsin(D: int, spf: np.ndarray) -> float:
    """sum_{a < D} chi_D(a) * log sin(pi a / D), correctly rounded summation."""
    chi = quad_char_table(D, spf)
    a = np.flatnonzero(chi)
    terms = chi[a] * np.log(np.sin(np.pi * a / D))
    return math.fsum(terms.tolist())


# ---------------------------------------------------------------------------
# finite field tables
# ---------------------------------------------------------------------------

def build_exp_table(p: int, m: int, modulus: np.ndarray) -> np.ndarray:
    """exp[e] = integer code of x^e in F_p[x]/(modulus), 0 <= e < p^m - 1.

    ``modulus`` holds the low coefficients f_0..f_{m-1} of a monic primitive
    polynomial; codes are sum c_i p^i.
    """
    q = p**m
    f = [int(c) for c in modulus[:m]]
    out = np.empty(q - 1, dtype=np.int32)
    digits = [0] * m
    digits[0] = 1
    for e in range(q - 1):
        code = 0
        w = 1
        for d in digits:
            code += d * w
            w *= p
        out[e] = code
        top = digits[-1]
        digits = [0] + digits[:-1]
        if top:
            for i in range(m):
                digits[i] = (digits[i] - top * f[i]) % p
    return out


def _add_logs(a: np.ndarray, b: np.ndarray, zech: np.ndarray, qm1: int) -> np.ndarray:
    out = np.where(a < 0, b, a)
    both = (a >= 0) & (b >= 0)
    if np.any(both):
        aa = a[both]
        d = (b[both] - aa) % qm1
        z = zech[d].astype(np.int64)
        out[both] = np.where(z < 0, -1, (aa + z) % qm1)
    return out


def _mul_logs(a: np.ndarray, b, qm1: int) -> np.ndarray:
    return np.where((a < 0) | (np.asarray(b) < 0), -1, (a + b) % qm1)


def horner_logs(coef_logs: np.ndarray, x_logs: np.ndarray, zech: np.ndarray, qm1: int) -> np.ndarray:
    """Evaluate sum c_i x^i (coefficients given high degree first) at each x."""
    x = np.asarray(x_logs, dtype=np.int64)
    acc = np.full(x.shape, -1, dtype=np.int64)
    for c in coef_logs:
        acc = _mul_logs(acc, x, qm1)
        acc = _add_logs(acc, np.full(x.shape, int(c), dtype=np.int64), zech, qm1)
    return acc


def hyperelliptic_affine_count(coef_logs: np.ndarray, zech: np.ndarray, q: int) -> int:
    """sum over x in F_q of (1 + chi(f(x))), q odd, chi the quadratic character."""
    qm1 = q - 1
    total = 0
    for start in range(-1, qm1, _CHUNK):
        xs = np.arange(start, min(start + _CHUNK, qm1), dtype=np.int64)
        v = horner_logs(coef_logs, xs, zech, qm1)
        zero = v < 0
        total += int(np.count_nonzero(zero))
        total += 2 * int(np.count_nonzero(~zero & (v % 2 == 0)))
    return total


def _bivariate_rows(F: np.ndarray, xl: int, zech: np.ndarray, qm1: int) -> np.ndarray:
    """Coefficients (in y, high degree first) of F(x, y) at a fixed x."""
    # F[i, j] is the log of the coefficient of x^i y^j
    dx, dy = F.shape
    x = np.array([xl], dtype=np.int64)
    cols = []
    for j in range(dy - 1, -1, -1):
        cols.append(int(horner_logs(F[::-1, j], x, zech, qm1)[0]))
    return np.array(cols, dtype=np.int64)


def plane_affine_count(F: np.ndarray, Fx: np.ndarray, Fy: np.ndarray, zech: np.ndarray, q: int) -> tuple[int, int]:
    """Affine zeros of F(x, y) over F_q and how many of them are singular."""
    qm1 = q - 1
    ys = np.arange(-1, qm1, dtype=np.int64)
    count = 0
    singular = 0
    for xl in range(-1, qm1):
        v = horner_logs(_bivariate_rows(F, xl, zech, qm1), ys, zech, qm1)
        on = v < 0
        n_on = int(np.count_nonzero(on))
        if not n_on:
            continue
        count += n_on
        yon = ys[on]
        gx = horner_logs(_bivariate_rows(Fx, xl, zech, qm1), yon, zech, qm1)
        gy = horner_logs(_bivariate_rows(Fy, xl, zech, qm1), yon, zech, qm1)
        singular += int(np.count_nonzero((gx < 0) & (gy < 0)))
    return count, singular
