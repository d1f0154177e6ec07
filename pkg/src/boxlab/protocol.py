"""The coherent reveal protocol and the Choi-state product test.

The chain run on a dilation is

    copy^dag  U^dag  exp(2 pi i (a - b) / d)  U  copy

with Bob's input in uniform superposition and Bob's input register read
out in the Fourier basis afterwards. Measurements are computed exactly
from projector norms; nothing is sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensorcore as tc
from .dilation import A, B, X, Y, DilationResult
from .tensorcore import ALICE, BOB, RegisterLayout, StateVector, UnitaryOp

XC, YC = "X_c", "Y_c"
PRODUCT_TOL = 1e-9


@dataclass(frozen=True)
class ProtocolTranscript:
    d: int
    p_z_given_x: np.ndarray = field(repr=False)  # indexed [z, x]
    capacity_bits: float
    entanglement_before_ebits: float
    entanglement_after_ebits: float
    with_copy: bool

    def __post_init__(self):
        p = np.array(self.p_z_given_x, dtype=float)
        if p.min() < -1e-10 or np.abs(p.sum(axis=0) - 1).max() > 1e-10:
            raise ValueError("columns of P(z|x) must be probability distributions")
        p.flags.writeable = False
        object.__setattr__(self, "p_z_given_x", p)

    @property
    def entanglement_gain_ebits(self) -> float:
        return self.entanglement_after_ebits - self.entanglement_before_ebits

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "with_copy": self.with_copy,
            "p_z_given_x": self.p_z_given_x.tolist(),
            "capacity_bits": self.capacity_bits,
            "ent_before": self.entanglement_before_ebits,
            "ent_after": self.entanglement_after_ebits,
        }


@dataclass(frozen=True)
class FourierMeasurement:
    d: int

    @property
    def basis(self) -> np.ndarray:
        return tc.fourier_matrix(self.d).matrix

    def projectors(self) -> np.ndarray:
        f = self.basis
        return np.einsum("iz,jz->zij", f, f.conj())

    def probabilities(self, s: StateVector, register: str = Y) -> np.ndarray:
        """Outcome distribution of measuring ``register`` of ``s`` in the Fourier basis."""
        reg = s.layout.register(register)
        f_dag = UnitaryOp(RegisterLayout((reg,)), self.basis.conj().T, check=False)
        t = np.abs(tc.apply(f_dag, s).tensor_view()) ** 2
        axis = s.layout.index(register)
        return np.moveaxis(t, axis, 0).reshape(self.d, -1).sum(axis=1)


def phase_op(dr: DilationResult) -> UnitaryOp:
    """diag(exp(2 pi i a / d)) on A times diag(exp(-2 pi i b / d)) on B."""
    d_a, d_b = dr.dims[:2]
    if d_a != d_b:
        raise ValueError("phase operation needs equal outcome counts")
    d = d_a
    layout = RegisterLayout((dr.layout.register(A), dr.layout.register(B)))
    pa = np.exp(2j * np.pi * np.arange(d) / d)
    return UnitaryOp(layout, np.diag(np.kron(pa, pa.conj())), check=False)


def _copy_matrix(d: int) -> np.ndarray:
    # |c>|x> -> |c + x mod d>|x>
    m = np.zeros((d * d, d * d))
    for c in range(d):
        for x in range(d):
            m[((c + x) % d) * d + x, c * d + x] = 1.0
    return m


def copy_op(dr: DilationResult) -> UnitaryOp:
    """Modular-addition copy of X into X_c (Alice) and of Y into Y_c (Bob)."""
    reg = dr.layout.register
    d_x, d_y = reg(X).dim, reg(Y).dim
    alice = UnitaryOp(RegisterLayout.of((XC, d_x, ALICE), (X, d_x, ALICE)), _copy_matrix(d_x), check=False)
    bob = UnitaryOp(RegisterLayout.of((YC, d_y, BOB), (Y, d_y, BOB)), _copy_matrix(d_y), check=False)
    return tc.tensor(alice, bob)


def protocol_layout(dr: DilationResult, with_copy: bool = True) -> RegisterLayout:
    if not with_copy:
        return dr.layout
    reg = dr.layout.register
    return dr.layout.concat(RegisterLayout.of((XC, reg(X).dim, ALICE), (YC, reg(Y).dim, BOB)))


def initial_state(dr: DilationResult, x_amps, y_amps, with_copy: bool = True) -> StateVector:
    """|x_amps>_X |y_amps>_Y (x) ancilla (x) |0>_copies, in protocol-layout order."""
    reg = dr.layout.register
    sx = StateVector.normalized(RegisterLayout((reg(X),)), x_amps)
    sy = StateVector.normalized(RegisterLayout((reg(Y),)), y_amps)
    s = tc.tensor(tc.tensor(sx, sy), dr.initial_ancilla)
    s = tc.permute_registers(s, dr.layout.names)
    if with_copy:
        copies = protocol_layout(dr, True).sub((XC, YC))
        s = tc.tensor(s, StateVector.basis(copies))
    return s


def run_chain(dr: DilationResult, s: StateVector, with_copy: bool = True) -> StateVector:
    phase = phase_op(dr)
    if with_copy:
        cp = copy_op(dr)
        s = tc.apply(cp, s)
    s = tc.apply(dr.u, s)
    s = tc.apply(phase, s)
    s = tc.apply(dr.u.dagger, s)
    if with_copy:
        s = tc.apply(cp.dagger, s)
    return s


def mutual_information_bits(p_z_given_x: np.ndarray) -> float:
    """I(X;Z) in bits for a uniform prior on x; ``p_z_given_x`` indexed [z, x]."""
    p = np.asarray(p_z_given_x, dtype=float)
    n_x = p.shape[1]
    joint = p / n_x
    pz = joint.sum(axis=1, keepdims=True)
    px = np.full((1, n_x), 1.0 / n_x)
    mask = joint > 0
    mi = np.sum(joint[mask] * np.log2(joint[mask] / (pz @ px)[mask]))
    return float(min(max(mi, 0.0), np.log2(min(p.shape))))


def signalling_distribution(dr: DilationResult, with_copy: bool = True) -> np.ndarray:
    """P(z|x) indexed [z, x]: Alice inputs |x>, Bob inputs the uniform superposition."""
    d = dr.square_dim()
    meas = FourierMeasurement(d)
    cols = []
    for x in range(d):
        ex = np.zeros(d)
        ex[x] = 1.0
        s = run_chain(dr, initial_state(dr, ex, np.ones(d), with_copy), with_copy)
        cols.append(meas.probabilities(s, Y))
    return np.stack(cols, axis=1)


def entanglement_generated(dr: DilationResult, with_copy: bool = True) -> tuple[float, float]:
    """(before, after) entanglement in ebits across the Alice|Bob cut, both inputs superposed."""
    d = dr.square_dim()
    s0 = initial_state(dr, np.ones(d), np.ones(d), with_copy)
    s1 = run_chain(dr, s0, with_copy)
    return tc.cut_entropy_bits(s0), tc.cut_entropy_bits(s1)


def reveal_protocol(dr: DilationResult, with_copy: bool = True) -> ProtocolTranscript:
    d = dr.square_dim()
    p = signalling_distribution(dr, with_copy)
    before, after = entanglement_generated(dr, with_copy)
    return ProtocolTranscript(d, p, mutual_information_bits(p), before, after, with_copy)


def choi_state(u: UnitaryOp) -> StateVector:
    """(I (x) U (x) I) applied to maximally entangled probe pairs, one per register.

    Each register R gets a primed partner R_p owned by the same party.
    """
    primed = RegisterLayout(tuple(tc.Register(r.name + "_p", r.dim, r.party) for r in u.layout.registers))
    layout = u.layout.concat(primed)
    return StateVector(layout, u.matrix.reshape(-1) / np.sqrt(u.layout.total_dim))


@dataclass(frozen=True)
class ProductTest:
    is_product: bool
    choi_entanglement_ebits: float


def product_test(u: UnitaryOp) -> ProductTest:
    if not u.layout.party_names(ALICE) or not u.layout.party_names(BOB):
        raise ValueError("product test needs at least one register per party")
    e = tc.cut_entropy_bits(choi_state(u))
    return ProductTest(e <= PRODUCT_TOL, e)


def random_product_unitary(layout: RegisterLayout, rng: np.random.Generator) -> UnitaryOp:
    """U_A (x) U_B with Haar-random factors, expressed on ``layout``."""
    alice = layout.sub(layout.party_names(ALICE))
    bob = layout.sub(layout.party_names(BOB))
    ua = UnitaryOp(alice, tc.random_unitary(alice.total_dim, rng), check=False)
    ub = UnitaryOp(bob, tc.random_unitary(bob.total_dim, rng), check=False)
    return tc.permute_operator(tc.tensor(ua, ub), layout.names)


def swap_op(d: int = 2) -> UnitaryOp:
    layout = RegisterLayout.of(("L", d, ALICE), ("R", d, BOB))
    m = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            m[j * d + i, i * d + j] = 1.0
    return UnitaryOp(layout, m)
