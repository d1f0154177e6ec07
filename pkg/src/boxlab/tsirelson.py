"""Causal upper bounds on B^d from the reveal protocol, and critical visibilities.

c1_lhs is the left side of the bound obtained by requiring the reveal chain
not to signal:  sum_x | (1/d) sum_y sum_k exp(2 pi i k/d) w_k(x,y) | <= sqrt(d).
c2_lhs replaces |z| by Re z.  At d = 2 this is the CHSH bound 2 sqrt 2, at
d = 3 it bounds B^3 by 1/3 + 2/(3 sqrt 3).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .boxes import Box, bell_bd, branch_weights, evaluate, noisy_pr_box
from .lhv import classical_max

VIOLATION_TOL = 1e-10

CHSH_QUANTUM = 2.0 * math.sqrt(2.0)
B2_QUANTUM = 0.5 + 0.5 / math.sqrt(2.0)  # CHSH_QUANTUM / 8 + 1/2
B3_QUANTUM = 1.0 / 3.0 + 2.0 / (3.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class BoundCheck:
    value: float
    bound: float
    violated: bool


@dataclass(frozen=True)
class BoundReport:
    d: int
    c1_lhs: float
    c1_rhs: float
    c2_lhs: float
    bell_value: float
    quantum_upper: float | None  # in B^d units; None where no bound is claimed (d >= 4)
    lhv_max: float
    violates_c1: bool
    violated: bool  # bell_value above quantum_upper
    exploratory: bool = False

    def to_json(self) -> dict:
        return asdict(self)


def _phases(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def c1_lhs(b: Box) -> float:
    bw = branch_weights(b)
    d = bw.d
    inner = np.einsum("k,kxy->x", _phases(d), bw.w) / d
    return float(np.sum(np.abs(inner)))


def c2_lhs(b: Box) -> float:
    bw = branch_weights(b)
    d = bw.d
    inner = np.einsum("k,kxy->x", _phases(d).real, bw.w) / d
    return float(np.sum(inner))


def chsh_bound_check(b: Box) -> BoundCheck:
    """Sum over (x,y) of w_0 - w_1, against 2 sqrt 2."""
    if b.shape != (2, 2, 2, 2):
        raise ValueError("CHSH check needs d = 2")
    w = branch_weights(b).w
    value = float(np.sum(w[0] - w[1]))
    return BoundCheck(value, CHSH_QUANTUM, value > CHSH_QUANTUM + VIOLATION_TOL)


def b3_bound() -> float:
    return B3_QUANTUM


def b3_check(b: Box) -> BoundCheck:
    if b.shape != (3, 3, 3, 3):
        raise ValueError("B^3 check needs d = 3")
    value = evaluate(bell_bd(3), b)
    return BoundCheck(value, B3_QUANTUM, value > B3_QUANTUM + VIOLATION_TOL)


def quantum_upper(d: int) -> float | None:
    """Upper bound on B^d for local quantum boxes, where one is established."""
    return {2: B2_QUANTUM, 3: B3_QUANTUM}.get(d)


def bound_check(b: Box) -> BoundCheck:
    """The applicable Tsirelson-type check: CHSH at d = 2, B^3 at d = 3 (B^d units)."""
    d = b.square_dim()
    if d == 2:
        value = evaluate(bell_bd(2), b)
        return BoundCheck(value, B2_QUANTUM, chsh_bound_check(b).violated)
    if d == 3:
        return b3_check(b)
    raise ValueError(f"no Tsirelson bound available for d = {d}")


@lru_cache(maxsize=None)
def _lhv_max(d: int) -> float:
    return classical_max(bell_bd(d)).value


def bound_report(b: Box) -> BoundReport:
    d = b.square_dim()
    c1 = c1_lhs(b)
    rhs = math.sqrt(d)
    bell = evaluate(bell_bd(d), b)
    q = quantum_upper(d)
    return BoundReport(
        d=d,
        c1_lhs=c1,
        c1_rhs=rhs,
        c2_lhs=c2_lhs(b),
        bell_value=bell,
        quantum_upper=q,
        lhv_max=_lhv_max(d) if d <= 4 else float("nan"),
        violates_c1=c1 > rhs + VIOLATION_TOL,
        violated=bool(q is not None and bound_check(b).violated),
        exploratory=q is None,
    )


def critical_visibility_closed_form(d: int) -> float:
    """Solve (1 + (d - 1) v) / d = quantum_upper(d) for v; gives 1/sqrt(d) at d = 2, 3."""
    q = quantum_upper(d)
    if q is None:
        raise ValueError(f"unsupported d = {d}")
    return (d * q - 1.0) / (d - 1.0)


def critical_visibility(d: int, tol: float = 1e-12) -> float:
    """Largest v with the noisy PR^d box not violating the applicable bound, by bisection."""
    if d not in (2, 3):
        raise ValueError(f"critical visibility is only defined for d in (2, 3), got {d}")
    lo, hi = 0.0, 1.0
    if bound_check(noisy_pr_box(d, lo)).violated or not bound_check(noisy_pr_box(d, hi)).violated:
        raise RuntimeError("bound does not bracket a threshold on [0, 1]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bound_check(noisy_pr_box(d, mid)).violated:
            hi = mid
        else:
            lo = mid
    v = lo
    if abs(v - critical_visibility_closed_form(d)) > 1e-9:
        raise ArithmeticError(f"bisection {v} disagrees with the closed form")
    return v


def sweep(d: int, vs) -> list[BoundReport]:
    return [bound_report(noisy_pr_box(d, float(v))) for v in vs]
