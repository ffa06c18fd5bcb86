"""Log/Zech tables for F_Q, used by the point-counting kernels.

Elements are integer codes sum c_i p^i in the basis of a primitive modulus,
so the class of x generates F_Q^*. Kernels work on discrete logs
(-1 encodes zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .exactmath import FqElem, first_irreducible, first_primitive


@dataclass(frozen=True, eq=False)
class ExtensionField:
    p: int
    m: int
    modulus: tuple[int, ...]
    exp: np.ndarray
    log: np.ndarray
    zech: np.ndarray

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def order(self) -> int:
        return self.q - 1

    def code_log(self, code: int) -> int:
        return int(self.log[code])

    def add(self, a: int, b: int) -> int:
        if a < 0:
            return b
        if b < 0:
            return a
        z = int(self.zech[(b - a) % self.order])
        return -1 if z < 0 else (a + z) % self.order

    def mul(self, a: int, b: int) -> int:
        if a < 0 or b < 0:
            return -1
        return (a + b) % self.order

    def pow(self, a: int, e: int) -> int:
        if a < 0:
            return 0 if e == 0 else -1
        return (a * e) % self.order

    def eval_logs(self, coef_logs: Sequence[int], x_logs: Iterable[int]) -> np.ndarray:
        """Horner evaluation; coefficients high degree first."""
        return kernels.horner_logs(
            np.asarray(list(coef_logs), dtype=np.int64),
            np.asarray(list(x_logs), dtype=np.int64),
            self.zech,
            self.order,
        )

    def all_logs(self) -> np.ndarray:
        return np.arange(-1, self.order, dtype=np.int64)

    @lru_cache(maxsize=None)
    def subfield_generator(self, k: int) -> int:
        """Log of a root of first_irreducible(p, k), i.e. the image of the
        standard generator of F_{p^k} under an embedding into F_Q."""
        if self.m % k:
            raise ValueError(f"F_{{{self.p}^{k}}} is not a subfield of F_{{{self.p}^{self.m}}}")
        if k == 1:
            # the modulus is x itself for k = 1; its root is 0
            return -1
        mod = first_irreducible(self.p, k)
        mod_logs = [self.code_log(c) for c in reversed(mod)]
        step = self.order // (self.p**k - 1)
        cands = [j * step for j in range(self.p**k - 1)]
        vals = self.eval_logs(mod_logs, cands)
        for c, v in zip(cands, vals):
            if v < 0:
                return c
        raise RuntimeError("no root of the base modulus in the extension")

    def embed(self, a: FqElem) -> int:
        """Discrete log of the image of ``a`` (from F_{p^k}, k | m)."""
        if a.p != self.p:
            raise ValueError("characteristic mismatch")
        theta = self.subfield_generator(a.k)
        acc = -1
        for c in reversed(a.coeffs):
            acc = self.add(self.mul(acc, theta), self.code_log(c))
        return acc


@lru_cache(maxsize=6)
def extension_field(p: int, m: int) -> ExtensionField:
    modulus = first_primitive(p, m)
    q = p**m
    exp = kernels.build_exp_table(p, m, np.asarray(modulus[:m], dtype=np.int64))
    log = np.full(q, -1, dtype=np.int32)
    log[exp] = np.arange(q - 1, dtype=np.int32)
    codes = exp.astype(np.int64)
    d0 = codes % p
    plus_one = codes - d0 + (d0 + 1) % p
    zech = log[plus_one].astype(np.int32)
    for arr in (exp, log, zech):
        arr.setflags(write=False)
    return ExtensionField(p, m, modulus, exp, log, zech)
