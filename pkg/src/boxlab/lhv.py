"""Local deterministic strategies and exact classical maxima of Bell functionals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .boxes import BellFunctional, Box, evaluate

MAX_STRATEGIES = 10**8


@dataclass(frozen=True)
class DeterministicStrategy:
    f_a: tuple[int, ...]  # x -> a
    g_b: tuple[int, ...]  # y -> b
    d_a: int
    d_b: int

    def __post_init__(self):
        object.__setattr__(self, "f_a", tuple(int(a) for a in self.f_a))
        object.__setattr__(self, "g_b", tuple(int(b) for b in self.g_b))
        if any(not 0 <= a < self.d_a for a in self.f_a) or any(not 0 <= b < self.d_b for b in self.g_b):
            raise ValueError("strategy outcome out of range")


@dataclass(frozen=True)
class ClassicalMax:
    value: float
    witness: DeterministicStrategy


def strategy_count(d_x: int, d_a: int, d_y: int, d_b: int) -> int:
    if min(d_x, d_a, d_y, d_b) < 1:
        raise ValueError("all dimensions must be >= 1")
    return d_a**d_x * d_b**d_y


def _check_count(n: int):
    if n > MAX_STRATEGIES:
        raise OverflowError(f"{n} deterministic strategies exceeds the limit of {MAX_STRATEGIES}")


def enumerate_strategies(d_x: int, d_a: int, d_y: int, d_b: int) -> Iterator[DeterministicStrategy]:
    """Yield every deterministic strategy once, lexicographic in (f_a, g_b)."""
    _check_count(strategy_count(d_x, d_a, d_y, d_b))
    for f in itertools.product(range(d_a), repeat=d_x):
        for g in itertools.product(range(d_b), repeat=d_y):
            yield DeterministicStrategy(f, g, d_a, d_b)


def strategy_box(s: DeterministicStrategy) -> Box:
    d_x, d_y = len(s.f_a), len(s.g_b)
    p = np.zeros((s.d_a, s.d_b, d_x, d_y))
    for x, a in enumerate(s.f_a):
        for y, b in enumerate(s.g_b):
            p[a, b, x, y] = 1.0
    return Box(p)


def classical_max(f: BellFunctional) -> ClassicalMax:
    """Exact maximum of ``f`` over deterministic strategies.

    Ties go to the first maximizer in enumeration order. Values are sums of
    weights divided once by the denominator, so a functional with integer
    weights gives exactly ``count / denominator``.
    """
    d_a, d_b, d_x, d_y = f.shape
    _check_count(strategy_count(d_x, d_a, d_y, d_b))
    w = f.weights
    bob_table = np.array(list(itertools.product(range(d_b), repeat=d_y)), dtype=int).reshape(-1, d_y)
    ys = np.arange(d_y)
    best_val, best = -np.inf, None
    for fa in itertools.product(range(d_a), repeat=d_x):
        # t[b, y] = sum_x w[f(x), b, x, y]
        t = sum(w[a, :, x, :] for x, a in enumerate(fa))
        vals = t[bob_table, ys].sum(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best = vals[j], (fa, tuple(bob_table[j]))
    witness = DeterministicStrategy(best[0], best[1], d_a, d_b)
    return ClassicalMax(float(best_val / f.denominator), witness)


def classical_max_bruteforce(f: BellFunctional) -> ClassicalMax:
    """Reference path: evaluate every strategy box explicitly."""
    d_a, d_b, d_x, d_y = f.shape
    best = None
    for s in enumerate_strategies(d_x, d_a, d_y, d_b):
        v = evaluate(f, strategy_box(s))
        if best is None or v > best.value:
            best = ClassicalMax(v, s)
    return best
