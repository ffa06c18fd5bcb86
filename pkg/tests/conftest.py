from __future__ import annotations

import pytest

from bsmertens import kernels
from bsmertens.ffield import extension_field

KERNEL_NAMES = (
    "kronecker_primes",
    "quad_char_table",
    "imag_char_moment",
    "real_char_logsin",
    "build_exp_table",
    "horner_logs",
    "hyperelliptic_affine_count",
    "plane_affine_count",
)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = kernels.BACKENDS[request.param]
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    extension_field.cache_clear()
    yield request.param
    extension_field.cache_clear()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
