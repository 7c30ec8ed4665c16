"""Shared oracles: literal-formula evaluators in extended precision."""

import mpmath as mp
import numpy as np
import pytest

mp.mp.dps = 40


def naive_term(alpha, x, y, power):
    """``(alpha y/x)^power exp(-alpha y/x) / Gamma(alpha)`` in mpmath."""
    a, x, y = mp.mpf(alpha), mp.mpf(x), mp.mpf(y)
    return (a * y / x) ** power * mp.exp(-a * y / x) / mp.gamma(a)


def naive_basic(values, inv_w, W, alpha, x):
    a = mp.mpf(alpha)
    total = mp.mpf(0)
    for y, iw in zip(values, inv_w):
        total += mp.mpf(iw) * (a - 1) / mp.mpf(x) * naive_term(alpha, x, y, a - 1)
    return mp.mpf(W) * total / len(values)


def naive_star(values, W, alpha, x):
    total = sum(mp.mpf(W) / mp.mpf(y) ** 2 * naive_term(alpha, x, y, alpha) for y in values)
    return total / len(values)


def naive_survival(values, W, alpha, x):
    total = sum(mp.mpf(W) / mp.mpf(y) * naive_term(alpha, x, y, alpha) for y in values)
    return total / len(values)


def naive_direct(values, alpha, y):
    a, yy = mp.mpf(alpha), mp.mpf(y)
    total = sum((a - 1) / yy * naive_term(alpha, y, v, a - 1) for v in values)
    return total / len(values)


def rel(a, b):
    a, b = mp.mpf(a), mp.mpf(b)
    return float(abs(a - b) / abs(b))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_instances(count=100, seed=12345):
    """Small random problems: n <= 10, 1 <= alpha <= 20, moderate x and Y."""
    gen = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(gen.integers(1, 11))
        values = gen.gamma(2.0, 0.5, size=n) + 0.01
        alpha = float(gen.uniform(2.0, 20.0))
        x = float(gen.uniform(0.2, 3.0))
        W = float(gen.uniform(0.2, 5.0))
        out.append((values, alpha, x, W))
    return out


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""

    def emit(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
