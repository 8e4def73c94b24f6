"""Shared reference oracles.

These are deliberately naive (bit-serial multiplication, dict histograms,
root scans) so they share no code path with the library under test.
"""

from collections import Counter

import pytest


def ref_mul(a, b, modulus, n):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> n & 1:
            a ^= modulus
    return r


def ref_pow(a, e, modulus, n):
    r = 1
    for _ in range(e):
        r = ref_mul(r, a, modulus, n)
    return r


def ref_trace(a, modulus, n, step=1):
    t, x = 0, a
    for _ in range(n // step):
        t ^= x
        for _ in range(step):
            x = ref_mul(x, x, modulus, n)
    return t


def ref_is_two_to_one(values):
    """Definition check on a list of outputs (one per domain point)."""
    hist = Counter(Counter(values).values())
    if len(values) % 2 == 0:
        return set(hist) <= {2}
    return hist == Counter({2: (len(values) - 1) // 2, 1: 1})


@pytest.fixture
def oracle():
    class O:
        mul = staticmethod(ref_mul)
        pow = staticmethod(ref_pow)
        trace = staticmethod(ref_trace)
        two_to_one = staticmethod(ref_is_two_to_one)

    return O


def ref_pow_fast(a, e, modulus, n):
    r = 1
    while e:
        if e & 1:
            r = ref_mul(r, a, modulus, n)
        a = ref_mul(a, a, modulus, n)
        e >>= 1
    return r


# -- acceptance reporting -------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    num, title = mark.args
    prev = _CRITERIA.get(num, (title, True, 0.0))
    _CRITERIA[num] = (title, prev[1] and rep.passed, prev[2] + rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, secs = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num} {title}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s)")
