"""See-saw lower bounds on the quantum value of a Bell functional.

Each round maximizes over one block with the others fixed: the shared state
(top eigenvector of the Bell operator), then Alice's projective
measurements, then Bob's. Every block update is an ascent step, so the
value never decreases within a run.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import tensorcore as tc
from .boxes import BellFunctional, Box, evaluate
from .dilation import SA, SB, DilationResult, dilate_local, measurement_unitary
from .tensorcore import ALICE, BOB, RegisterLayout, StateVector

PVM_TOL = 1e-9


@dataclass(frozen=True)
class QuantumStrategy:
    """Shared pure state plus projective measurements.

    ``alice_pvms[x, a]`` is the projector for outcome ``a`` of setting ``x``;
    likewise ``bob_pvms[y, b]``.
    """

    local_dim: int
    state: StateVector = field(repr=False)
    alice_pvms: np.ndarray = field(repr=False)
    bob_pvms: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = self.local_dim
        if self.state.layout.dims != (k, k):
            raise ValueError("state must live on two registers of dimension local_dim")
        for name in ("alice_pvms", "bob_pvms"):
            p = np.array(getattr(self, name), dtype=complex)
            if p.ndim != 4 or p.shape[2:] != (k, k):
                raise ValueError(f"{name} must have shape (settings, outcomes, {k}, {k})")
            if np.abs(np.einsum("xaij,xajk->xaik", p, p) - p).max() > PVM_TOL:
                raise ValueError(f"{name} are not idempotent")
            if np.abs(p.sum(axis=1) - np.eye(k)).max() > PVM_TOL:
                raise ValueError(f"{name} do not sum to the identity")
            p.flags.writeable = False
            object.__setattr__(self, name, p)

    @property
    def psi(self) -> np.ndarray:
        return self.state.amplitudes.reshape(self.local_dim, self.local_dim)

    def to_json(self) -> dict:
        def cplx(a):
            a = np.asarray(a)
            return np.stack([a.real, a.imag], axis=-1).tolist()

        return {
            "local_dim": self.local_dim,
            "state": cplx(self.state.amplitudes),
            "alice_pvms": cplx(self.alice_pvms),
            "bob_pvms": cplx(self.bob_pvms),
        }


@dataclass(frozen=True)
class OptResult:
    best_value: float
    strategy: QuantumStrategy
    iterations: int
    restarts_used: int
    converged: bool
    history: tuple[float, ...] = field(default=(), repr=False)  # per-round values of the winning run

    def to_json(self) -> dict:
        return {
            "best_value": self.best_value,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "strategy": self.strategy.to_json(),
        }


def strategy_box(qs: QuantumStrategy) -> Box:
    """P(a,b|x,y) = <psi| Pa^x (x) Pb^y |psi>."""
    psi = qs.psi
    p = np.einsum("ij,xaik,kl,ybjl->abxy", psi.conj(), qs.alice_pvms, psi, qs.bob_pvms)
    return Box(np.clip(p.real, 0.0, None))


def _projectors(basis: np.ndarray, labels: np.ndarray, n_out: int) -> np.ndarray:
    """Projectors sum_{s: labels[s] = a} |u_s><u_s| for a in range(n_out)."""
    k = basis.shape[0]
    out = np.zeros((n_out, k, k), dtype=complex)
    for s in range(k):
        out[labels[s]] += np.outer(basis[:, s], basis[:, s].conj())
    return out


def _bell_operator(c: np.ndarray, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    k = pa.shape[-1]
    w = np.einsum("abxy,xaij,ybkl->ikjl", c, pa, pb)
    return w.reshape(k * k, k * k)


def _rewards(c: np.ndarray, psi: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """R[x, a] = sum_{b,y} c[a,b,x,y] Tr_B[(I (x) Pb^y) |psi><psi|], each PSD."""
    reduced = np.einsum("ij,ybkj,lk->ybil", psi, pb, psi.conj())  # Psi Pb^T Psi^dag
    return np.einsum("abxy,ybil->xail", c, reduced)


def _ascend_basis(rewards: np.ndarray, basis: np.ndarray, labels: np.ndarray, inner_iters: int = 200):
    """Maximize sum_s <u_s|R_{label(s)}|u_s> over bases and labels, warm-started.

    Alternates a greedy label choice per basis vector with the polar-factor
    update U <- polar([R_{label(s)} u_s]_s); both steps are non-decreasing
    because the objective is convex in U.
    """

    def objective(u, lab):
        return float(np.real(np.einsum("is,sij,js->", u.conj(), rewards[lab], u)))

    val = objective(basis, labels)
    for _ in range(inner_iters):
        scores = np.real(np.einsum("is,aij,js->sa", basis.conj(), rewards, basis))
        labels = np.argmax(scores, axis=1)
        g = np.einsum("sij,js->is", rewards[labels], basis)
        w, _, vh = np.linalg.svd(g)
        new_basis = w @ vh
        new_val = objective(new_basis, labels)
        if new_val < val:
            break
        basis, improved, val = new_basis, new_val - val, new_val
        if improved < 1e-14:
            break
    return basis, labels, val


def _single_run(c, d_out, local_dim, rng, max_iters, tol):
    n_a, n_b, n_x, n_y = c.shape
    k = local_dim
    a_basis = [tc.random_unitary(k, rng) for _ in range(n_x)]
    b_basis = [tc.random_unitary(k, rng) for _ in range(n_y)]
    a_lab = [np.arange(k) % n_a for _ in range(n_x)]
    b_lab = [np.arange(k) % n_b for _ in range(n_y)]
    c_t = np.transpose(c, (1, 0, 3, 2))  # Bob's view: roles of (a,x) and (b,y) swapped

    def pvms(bases, labs, n):
        return np.stack([_projectors(u, lab, n) for u, lab in zip(bases, labs)])

    pa, pb = pvms(a_basis, a_lab, n_a), pvms(b_basis, b_lab, n_b)
    history = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        evals, evecs = np.linalg.eigh(_bell_operator(c, pa, pb))
        psi = evecs[:, -1].reshape(k, k)

        ra = _rewards(c, psi, pb)
        for x in range(n_x):
            a_basis[x], a_lab[x], _ = _ascend_basis(ra[x], a_basis[x], a_lab[x])
        pa = pvms(a_basis, a_lab, n_a)

        rb = _rewards(c_t, psi.T, pa)
        for y in range(n_y):
            b_basis[y], b_lab[y], _ = _ascend_basis(rb[y], b_basis[y], b_lab[y])
        pb = pvms(b_basis, b_lab, n_b)

        value = float(np.real(np.vdot(psi.reshape(-1), _bell_operator(c, pa, pb) @ psi.reshape(-1))))
        history.append(value)
        if len(history) > 1 and history[-1] - history[-2] < tol:
            converged = True
            break

    # one last state update for the final measurements
    evals, evecs = np.linalg.eigh(_bell_operator(c, pa, pb))
    psi = evecs[:, -1]
    layout = RegisterLayout.of((SA, k, ALICE), (SB, k, BOB))
    qs = QuantumStrategy(k, StateVector.normalized(layout, psi), pa, pb)
    return qs, it, converged, history


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BOXLAB_THREADS", "1")))
    except ValueError:
        return 1


def seesaw_optimize(
    f: BellFunctional,
    d: int | None = None,
    local_dim: int | None = None,
    restarts: int | None = None,
    max_iters: int = 2000,
    seed: int = 0,
    tol: float = 1e-10,
) -> OptResult:
    """Best see-saw value over seeded random restarts (a lower bound on the quantum value)."""
    c = f.coefficients
    n_a = c.shape[0]
    d = n_a if d is None else d
    local_dim = d if local_dim is None else local_dim
    if local_dim < 2:
        raise ValueError("local_dim must be >= 2")
    if restarts is None:
        restarts = 20 if d <= 2 else 50
    seeds = np.random.SeedSequence(seed).spawn(restarts)

    def job(ss):
        return _single_run(c, d, local_dim, np.random.default_rng(ss), max_iters, tol)

    workers = min(_threads(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(job, seeds))
    else:
        runs = [job(ss) for ss in seeds]

    best, best_val = None, -np.inf
    for run in runs:
        val = evaluate(f, strategy_box(run[0]))
        if val > best_val:
            best, best_val = run, val
    qs, it, conv, hist = best
    return OptResult(best_val, qs, it, restarts, conv, tuple(hist))


def strategy_to_dilation(qs: QuantumStrategy) -> DilationResult:
    """Express a quantum strategy as a product dilation of coherent local measurements."""
    def ops(pvms, party):
        out = []
        n_out = pvms.shape[1]
        for proj in pvms:
            vecs, labels = [], []
            for a, p in enumerate(proj):
                w, v = np.linalg.eigh(p)
                for j in np.nonzero(w > 0.5)[0]:
                    vecs.append(v[:, j])
                    labels.append(a)
            basis = np.stack(vecs, axis=1)
            # orthonormalize away the eigen-solver's rounding
            q, r = np.linalg.qr(basis)
            basis = q * (np.diag(r) / np.abs(np.diag(r)))
            out.append(measurement_unitary(basis.conj().T, n_out, labels, party=party))
        return out

    return dilate_local(qs.state, ops(qs.alice_pvms, ALICE), ops(qs.bob_pvms, BOB))
