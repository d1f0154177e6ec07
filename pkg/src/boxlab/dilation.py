"""Unitary realizations of boxes and extraction of boxes from them.

Every dilation uses the register names below. Inputs X and Y are kept
local: X belongs to Alice, Y to Bob.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tensorcore as tc
from .boxes import Box
from .tensorcore import ALICE, BOB, RegisterLayout, StateVector, UnitaryOp

X, Y, A, B = "X", "Y", "A", "B"
SA, SB = "S_A", "S_B"


@dataclass(frozen=True)
class DilationResult:
    layout: RegisterLayout
    u: UnitaryOp = field(repr=False)
    initial_ancilla: StateVector = field(repr=False)
    roles: dict = field(default_factory=dict)
    kind: str = "custom"

    def __post_init__(self):
        if self.u.layout != self.layout:
            raise ValueError("unitary layout differs from the dilation layout")
        for n in (X, Y, A, B):
            self.layout.index(n)
        if self.layout.register(X).party != ALICE or self.layout.register(Y).party != BOB:
            raise ValueError("input X must belong to Alice and Y to Bob")
        expected = tuple(n for n in self.layout.names if n not in (X, Y))
        if self.initial_ancilla.layout.names != expected:
            raise ValueError(f"initial_ancilla must cover {expected}")
        if not self.roles:
            object.__setattr__(self, "roles", {
                "inputs": (X, Y),
                "outputs": (A, B),
                "ancilla": tuple(n for n in expected if n not in (A, B)),
            })

    @property
    def dims(self) -> tuple[int, int, int, int]:
        """(d_a, d_b, d_x, d_y), matching Box.shape."""
        reg = self.layout.register
        return reg(A).dim, reg(B).dim, reg(X).dim, reg(Y).dim

    def square_dim(self) -> int:
        if len(set(self.dims)) != 1:
            raise ValueError(f"dilation is not square (dims a,b,x,y = {self.dims})")
        return self.dims[0]

    def to_json(self) -> dict:
        m = self.u.matrix
        return {
            "kind": self.kind,
            "layout": self.layout.to_json(),
            "matrix": np.stack([m.real, m.imag], axis=-1).tolist(),
            "initial_ancilla": np.stack(
                [self.initial_ancilla.amplitudes.real, self.initial_ancilla.amplitudes.imag], axis=-1
            ).tolist(),
            "roles": {k: list(v) for k, v in self.roles.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "DilationResult":
        layout = RegisterLayout.from_json(data["layout"])
        m = np.asarray(data["matrix"], dtype=float)
        anc = np.asarray(data["initial_ancilla"], dtype=float)
        anc_layout = layout.sub(n for n in layout.names if n not in (X, Y))
        return cls(
            layout,
            UnitaryOp(layout, m[..., 0] + 1j * m[..., 1]),
            StateVector(anc_layout, anc[..., 0] + 1j * anc[..., 1]),
            {k: tuple(v) for k, v in data.get("roles", {}).items()},
            data.get("kind", "custom"),
        )


def _input_columns(dr: DilationResult) -> np.ndarray:
    """Matrix whose columns are |x>|y> (x) ancilla for every (x, y), in layout order.

    Shape ``(D, d_x * d_y)`` with column index ``x * d_y + y``.
    """
    _, _, d_x, d_y = dr.dims
    dims = dr.layout.dims
    ix, iy = dr.layout.index(X), dr.layout.index(Y)
    anc = dr.initial_ancilla.tensor_view()
    out = np.zeros(dims + (d_x, d_y), dtype=complex)
    for x in range(d_x):
        for y in range(d_y):
            idx = [slice(None)] * len(dims)
            idx[ix], idx[iy] = x, y
            # ancilla axes are in layout order, matching the remaining axes
            out[tuple(idx) + (x, y)] = anc
    return out.reshape(dr.layout.total_dim, d_x * d_y)


def output_blocks(dr: DilationResult) -> np.ndarray:
    """phi[a, b, x, y, r]: the residual-register components of U|Psi0_xy>.

    ``r`` runs over every register other than A and B, in layout order.
    """
    d_a, d_b, d_x, d_y = dr.dims
    cols = dr.u.matrix @ _input_columns(dr)
    t = cols.reshape(dr.layout.dims + (d_x, d_y))
    ia, ib = dr.layout.index(A), dr.layout.index(B)
    n = len(dr.layout)
    others = [i for i in range(n) if i not in (ia, ib)]
    t = np.transpose(t, [ia, ib, n, n + 1] + others)
    return t.reshape(d_a, d_b, d_x, d_y, -1)


def orthogonality_gram(dr: DilationResult) -> np.ndarray:
    """G[(x,y),(x',y')] = sum_ab <phi^ab_xy|phi^ab_x'y'>; the identity for any unitary U."""
    phi = output_blocks(dr)
    d_a, d_b, d_x, d_y, r = phi.shape
    flat = np.transpose(phi, (2, 3, 0, 1, 4)).reshape(d_x * d_y, -1)
    return flat.conj() @ flat.T


def extract_box(dr: DilationResult) -> Box:
    phi = output_blocks(dr)
    probs = np.sum(np.abs(phi) ** 2, axis=-1)
    # renormalize away rounding only; Box validates the 1e-12 budget first
    sums = probs.sum(axis=(0, 1))
    if np.abs(sums - 1).max() > 1e-12:
        raise ValueError("extracted probabilities are not normalized")
    return Box(probs / sums)


def dilate_generic(b: Box) -> DilationResult:
    """V|x,y,0,0> = sum_ab sqrt(P(a,b|x,y)) |x,y,a,b>, completed to a unitary.

    The input registers double as the residual space, which makes the
    branches for different inputs orthogonal.
    """
    d_a, d_b, d_x, d_y = b.shape
    layout = RegisterLayout.of((X, d_x, ALICE), (Y, d_y, BOB), (A, d_a, ALICE), (B, d_b, BOB))
    amp = np.sqrt(b.probs)
    v = np.zeros((d_x, d_y, d_a, d_b, d_x, d_y), dtype=complex)
    for x in range(d_x):
        for y in range(d_y):
            v[x, y, :, :, x, y] = amp[:, :, x, y]
    v = v.reshape(layout.total_dim, d_x * d_y)
    columns = [layout.basis_index((x, y, 0, 0)) for x in range(d_x) for y in range(d_y)]
    u = tc.complete_isometry(v, layout, columns)
    anc = StateVector.basis(layout.sub((A, B)))
    return DilationResult(layout, u, anc, kind="generic")


def maximally_entangled(d: int, names=(SA, SB)) -> StateVector:
    layout = RegisterLayout.of((names[0], d, ALICE), (names[1], d, BOB))
    return StateVector(layout, np.eye(d).reshape(-1) / np.sqrt(d))


def dilate_pr(d: int) -> DilationResult:
    """Permutation dilation of the PR^d box from a shared maximally entangled pair.

    |x,y,a,b,s,t> -> |x, y, a+s, b+t-xy, s, t> (mod d).
    """
    if d < 2:
        raise ValueError("dilate_pr needs d >= 2")
    layout = RegisterLayout.of(
        (X, d, ALICE), (Y, d, BOB), (A, d, ALICE), (B, d, BOB), (SA, d, ALICE), (SB, d, BOB)
    )
    x, y, a, b, s, t = np.indices((d,) * 6).reshape(6, -1)
    src = np.ravel_multi_index((x, y, a, b, s, t), (d,) * 6)
    dst = np.ravel_multi_index((x, y, (a + s) % d, (b + t - x * y) % d, s, t), (d,) * 6)
    m = np.zeros((d**6, d**6))
    m[dst, src] = 1.0
    anc = tc.tensor(StateVector.basis(layout.sub((A, B))), maximally_entangled(d))
    return DilationResult(layout, UnitaryOp(layout, m), anc, kind="pr")


def measurement_unitary(
    rotation: np.ndarray,
    d_out: int,
    labels: Sequence[int] | None = None,
    party: str = ALICE,
) -> UnitaryOp:
    """Coherent local measurement on (output, shared) registers.

    Rotates the shared register by ``rotation`` and then adds the outcome
    label of its computational-basis value into the output register
    (modular addition). Labels default to ``s mod d_out``.
    """
    rotation = np.asarray(rotation, dtype=complex)
    k = rotation.shape[0]
    labels = np.arange(k) % d_out if labels is None else np.asarray(labels, dtype=int)
    if labels.shape != (k,) or labels.min() < 0 or labels.max() >= d_out:
        raise ValueError("labels must map every shared basis state to an outcome")
    out_name, sh_name = (A, SA) if party == ALICE else (B, SB)
    layout = RegisterLayout.of((out_name, d_out, party), (sh_name, k, party))
    copy = np.zeros((d_out * k, d_out * k))
    for a in range(d_out):
        for s in range(k):
            copy[((a + labels[s]) % d_out) * k + s, a * k + s] = 1.0
    return UnitaryOp(layout, copy @ np.kron(np.eye(d_out), rotation))


def _controlled(ctrl: tc.Register, ops: Sequence[UnitaryOp]) -> UnitaryOp:
    layout = RegisterLayout((ctrl,)).concat(ops[0].layout)
    n = ops[0].layout.total_dim
    m = np.zeros((ctrl.dim * n, ctrl.dim * n), dtype=complex)
    for c, op in enumerate(ops):
        if op.layout != ops[0].layout:
            raise ValueError("all controlled operators need the same layout")
        m[c * n:(c + 1) * n, c * n:(c + 1) * n] = op.matrix
    return UnitaryOp(layout, m, check=False)


def dilate_local(
    shared: StateVector,
    alice_ops: Sequence[UnitaryOp],
    bob_ops: Sequence[UnitaryOp],
) -> DilationResult:
    """Product dilation U = (sum_x |x><x| (x) W_x) (x) (sum_y |y><y| (x) V_y).

    ``alice_ops[x]`` acts on registers (A, S_A), ``bob_ops[y]`` on (B, S_B);
    ``shared`` lives on (S_A, S_B).
    """
    if shared.layout.names != (SA, SB):
        raise ValueError(f"shared state must be on ({SA}, {SB})")
    if not alice_ops or not bob_ops:
        raise ValueError("need at least one setting per party")
    if any(op.layout.names != (A, SA) for op in alice_ops):
        raise ValueError(f"alice_ops must act on ({A}, {SA})")
    if any(op.layout.names != (B, SB) for op in bob_ops):
        raise ValueError(f"bob_ops must act on ({B}, {SB})")
    if alice_ops[0].layout.register(SA).dim != shared.layout.register(SA).dim:
        raise ValueError("Alice's shared register dimension mismatch")
    if bob_ops[0].layout.register(SB).dim != shared.layout.register(SB).dim:
        raise ValueError("Bob's shared register dimension mismatch")
    u_a = _controlled(tc.Register(X, len(alice_ops), ALICE), alice_ops)
    u_b = _controlled(tc.Register(Y, len(bob_ops), BOB), bob_ops)
    u = tc.permute_operator(tc.tensor(u_a, u_b), (X, Y, A, B, SA, SB))
    u = UnitaryOp(u.layout, u.matrix)
    outputs = StateVector.basis(u.layout.sub((A, B)))
    return DilationResult(u.layout, u, tc.tensor(outputs, shared), kind="local")


def random_local_dilation(d: int, rng: np.random.Generator, local_dim: int | None = None) -> DilationResult:
    """Random shared state and Haar-random measurement rotations for every setting."""
    k = d if local_dim is None else local_dim
    layout = RegisterLayout.of((SA, k, ALICE), (SB, k, BOB))
    z = rng.standard_normal(k * k) + 1j * rng.standard_normal(k * k)
    shared = StateVector.normalized(layout, z)
    alice = [measurement_unitary(tc.random_unitary(k, rng), d, party=ALICE) for _ in range(d)]
    bob = [measurement_unitary(tc.random_unitary(k, rng), d, party=BOB) for _ in range(d)]
    return dilate_local(shared, alice, bob)
