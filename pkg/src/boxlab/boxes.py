"""Conditional-probability boxes P(a,b|x,y) and Bell functionals on them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Box:
    """Box with probabilities stored as ``probs[a, b, x, y]``."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 4 or min(p.shape) < 1:
            raise ValueError(f"probs must be a non-empty 4-tensor (a,b,x,y), got shape {p.shape}")
        if p.min() < 0:
            if p.min() < -NORM_TOL:
                raise ValueError(f"negative probability {p.min()!r}")
            p = np.clip(p, 0.0, None)
        sums = p.sum(axis=(0, 1))
        if np.abs(sums - 1.0).max() > NORM_TOL:
            raise ValueError(f"P(.,.|x,y) not normalized (max error {np.abs(sums - 1).max():.3e})")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def d_a(self) -> int:
        return self.probs.shape[0]

    @property
    def d_b(self) -> int:
        return self.probs.shape[1]

    @property
    def d_x(self) -> int:
        return self.probs.shape[2]

    @property
    def d_y(self) -> int:
        return self.probs.shape[3]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.probs.shape

    def square_dim(self) -> int:
        """The common dimension d when d_x = d_y = d_a = d_b, else ValueError."""
        if len(set(self.shape)) != 1:
            raise ValueError(f"box is not square (shape a,b,x,y = {self.shape})")
        return self.d_a

    def to_json(self) -> dict:
        return {
            "d_x": self.d_x,
            "d_y": self.d_y,
            "d_a": self.d_a,
            "d_b": self.d_b,
            "probs": self.probs.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Box":
        box = cls(np.asarray(data["probs"], dtype=float))
        declared = tuple(int(data[k]) for k in ("d_a", "d_b", "d_x", "d_y"))
        if declared != box.shape:
            raise ValueError(f"declared dims {declared} do not match probs shape {box.shape}")
        return box


@dataclass(frozen=True)
class NSReport:
    is_ns: bool
    max_violation: float


@dataclass(frozen=True)
class BellFunctional:
    """Coefficients ``weights / denominator`` indexed like ``Box.probs``.

    Keeping an integer-valued weight tensor and a separate denominator lets
    values on deterministic boxes come out as exact ratios.
    """

    weights: np.ndarray = field(repr=False)
    denominator: float = 1.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 4:
            raise ValueError("coefficients must be a 4-tensor (a,b,x,y)")
        if not self.denominator > 0:
            raise ValueError("denominator must be positive")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def coefficients(self) -> np.ndarray:
        return self.weights / self.denominator

    @property
    def shape(self):
        return self.weights.shape


@dataclass(frozen=True)
class PhaseBranchWeights:
    """``w[k, x, y]``: probability that a - b - x*y = k (mod d)."""

    d: int
    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.shape != (self.d,) * 3:
            raise ValueError(f"expected shape {(self.d,) * 3}, got {w.shape}")
        if w.min() < -NORM_TOL or np.abs(w.sum(axis=0) - 1).max() > NORM_TOL:
            raise ValueError("branch weights must be a distribution over k for each (x,y)")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)


def _branch_index(d: int) -> np.ndarray:
    """k[a, b, x, y] = (a - b - x*y) mod d."""
    a, b, x, y = np.ogrid[:d, :d, :d, :d]
    return (a - b - x * y) % d


def pr_box(d: int) -> Box:
    """Generalized PR box: P = 1/d when a - b = xy (mod d)."""
    if d < 2:
        raise ValueError("pr_box needs d >= 2")
    return Box((_branch_index(d) == 0) / d)


def uniform_box(d: int) -> Box:
    if d < 2:
        raise ValueError("uniform_box needs d >= 2")
    return Box(np.full((d, d, d, d), 1.0 / d**2))


def mix(p: Box, q: Box, v: float) -> Box:
    """v * p + (1 - v) * q."""
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing weight {v} outside [0, 1]")
    return Box(v * p.probs + (1.0 - v) * q.probs)


def noisy_pr_box(d: int, v: float) -> Box:
    return mix(pr_box(d), uniform_box(d), v)


def no_signalling_report(b: Box, tol: float = 1e-12) -> NSReport:
    bob = b.probs.sum(axis=0)  # P(b|x,y) indexed (b, x, y)
    alice = b.probs.sum(axis=1)  # P(a|x,y) indexed (a, x, y)
    bob_dev = np.ptp(bob, axis=1).max()  # spread over x
    alice_dev = np.ptp(alice, axis=2).max()  # spread over y
    worst = float(max(bob_dev, alice_dev))
    return NSReport(worst <= tol, worst)


def bell_bd(d: int) -> BellFunctional:
    """b^d: weight 1/d^2 on every (a,b,x,y) with a - b = xy (mod d)."""
    if d < 2:
        raise ValueError("bell_bd needs d >= 2")
    return BellFunctional((_branch_index(d) == 0).astype(float), float(d * d))


def evaluate(f: BellFunctional, b: Box) -> float:
    if f.shape != b.shape:
        raise ValueError(f"functional shape {f.shape} does not match box shape {b.shape}")
    return float(np.sum(f.weights * b.probs) / f.denominator)


def chsh_value(b: Box) -> float:
    """CHSH expression via B^2 = CHSH/8 + 1/2."""
    if b.shape != (2, 2, 2, 2):
        raise ValueError("chsh_value needs a box with two settings and two outcomes")
    return 8.0 * (evaluate(bell_bd(2), b) - 0.5)


def branch_weights(b: Box) -> PhaseBranchWeights:
    d = b.square_dim()
    k = _branch_index(d)
    w = np.zeros((d, d, d))
    for kk in range(d):
        w[kk] = np.where(k == kk, b.probs, 0.0).sum(axis=(0, 1))
    return PhaseBranchWeights(d, w)


def random_box(shape: tuple[int, int, int, int], rng: np.random.Generator) -> Box:
    """A generic (usually signalling) box with Dirichlet(1) slices."""
    d_a, d_b, d_x, d_y = shape
    p = rng.dirichlet(np.ones(d_a * d_b), size=(d_x, d_y))
    return Box(np.moveaxis(p.reshape(d_x, d_y, d_a, d_b), (2, 3), (0, 1)))
