"""Shared fixtures and independent reference implementations."""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# Fock-space oracle: bitmask states over all degrees at once
# ---------------------------------------------------------------------------


def fock_operators(n):
    """Full 2^n creation/annihilation matrices on bitmask states.

    State s has bit i set when e_{i+1} is present; the sign of adding or
    removing index i is (-1)^(number of set bits below i).
    """
    dim = 1 << n
    create = np.zeros((n, dim, dim))
    for i in range(n):
        for s in range(dim):
            if not s >> i & 1:
                sign = (-1) ** bin(s & ((1 << i) - 1)).count("1")
                create[i, s | 1 << i, s] = sign
    annihilate = create.transpose(0, 2, 1)
    return create, annihilate


def degree_block(n, p):
    """Bitmask states of degree p, in lexicographic multi-index order."""
    return [sum(1 << (i - 1) for i in I) for I in combinations(range(1, n + 1), p)]


def fock_weitzenbock(T, p):
    """Reference ℛ^p built from dense 2^n operators and restricted to degree p."""
    n = T.shape[0]
    c, a = fock_operators(n)
    full = np.zeros((1 << n, 1 << n))
    for i, j, k, l in zip(*np.nonzero(T)):
        full += T[i, j, k, l] * c[i] @ a[j] @ c[k] @ a[l]
    idx = degree_block(n, p)
    return full[np.ix_(idx, idx)]


def brute_sigma(T, Q, p):
    """Sum of sectional curvatures K(q_i, q_j) over i <= p < j, straight from entries."""
    n = T.shape[0]
    total = 0.0
    for i in range(p):
        for j in range(p, n):
            u, v = Q[i], Q[j]
            total -= np.einsum("abcd,a,b,c,d->", T, u, v, u, v)
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
