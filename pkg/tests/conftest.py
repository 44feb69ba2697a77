from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tridinv.core import TridiagSpec, is_invertible

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=150,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("repo")


def exact_inverse(n, b, c, d):
    """Gauss-Jordan over Fractions; an exact oracle for small hand examples."""
    c, d = Fraction(c), Fraction(d)
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = d if i in (0, n - 1) else c
        if i + 1 < n:
            a[i][i + 1] = a[i + 1][i] = Fraction(-b)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def beta_recurrence(c, d, count):
    out = [1.0, d][:count]
    while len(out) < count:
        out.append(c * out[-1] - out[-2])
    return np.array(out)


def well_posed(spec, rel=1e-6):
    """Invertible with ``|denom| >= rel * scale``."""
    inv = is_invertible(spec)
    if not inv:
        return False
    scale = inv.tolerance / 1e-12
    return abs(inv.denom) >= rel * scale


def random_specs(rng, count, n_max=300, c_range=(0.0, 10.0), d_range=(-5.0, 5.0)):
    specs = []
    while len(specs) < count:
        spec = TridiagSpec(
            int(rng.integers(1, n_max + 1)),
            int(rng.choice([-1, 1])),
            float(rng.uniform(*c_range)),
            float(rng.uniform(*d_range)),
        )
        if well_posed(spec):
            specs.append(spec)
    return specs


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, detail)``."""
    key = request.node.name

    def record(ok, detail):
        ACCEPTANCE[key] = (bool(ok), detail)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line("%s %s: %s" % ("PASS" if ok else "FAIL", key, detail))
