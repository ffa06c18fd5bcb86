"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it is importable; otherwise
the numpy implementations in ``_kernels_py`` are used. Setting
``BSMERTENS_PURE=1`` forces the Python backend.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("BSMERTENS_PURE", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py, "python"
    return _ckernels, "compiled"


backend, BACKEND = _load()

BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = backend
else:
    try:
        from . import _ckernels as _c  # type: ignore[attr-defined]

        BACKENDS["compiled"] = _c
    except ImportError:
        pass

kronecker_primes = backend.kronecker_primes
quad_char_table = backend.quad_char_table
imag_char_moment = backend.imag_char_moment
real_char_logsin = backend.real_char_logsin
build_exp_table = backend.build_exp_table
horner_logs = backend.horner_logs
hyperelliptic_affine_count = backend.hyperelliptic_affine_count
plane_affine_count = backend.plane_affine_count
