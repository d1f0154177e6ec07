"""Dense complex linear algebra over named, party-tagged registers.

Basis ordering is mixed-radix with the leftmost register most significant,
so a state on layout (R0, R1, ...) reshapes to a tensor with one axis per
register in layout order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ALICE = "A"
BOB = "B"
PARTIES = (ALICE, BOB)

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
PSD_TOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Register:
    name: str
    dim: int
    party: str

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValueError(f"register name {self.name!r} is not an identifier")
        if int(self.dim) < 1:
            raise ValueError(f"register {self.name} needs a positive dimension")
        if self.party not in PARTIES:
            raise ValueError(f"register {self.name} has unknown party {self.party!r}")


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[Register, ...]

    def __post_init__(self):
        regs = tuple(r if isinstance(r, Register) else Register(*r) for r in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [r.name for r in regs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")

    @classmethod
    def of(cls, *specs: tuple[str, int, str]) -> "RegisterLayout":
        return cls(tuple(Register(n, d, p) for n, d, p in specs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registers)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.registers else 1

    def __len__(self):
        return len(self.registers)

    def __contains__(self, name) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown register {name!r}") from None

    def register(self, name: str) -> Register:
        return self.registers[self.index(name)]

    def party_names(self, party: str) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers if r.party == party)

    def sub(self, names: Iterable[str]) -> "RegisterLayout":
        """Sub-layout on ``names``, kept in this layout's order."""
        wanted = set(names)
        for n in wanted:
            self.index(n)
        return RegisterLayout(tuple(r for r in self.registers if r.name in wanted))

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        clash = set(self.names) & set(other.names)
        if clash:
            raise ValueError(f"register name collision: {sorted(clash)}")
        return RegisterLayout(self.registers + other.registers)

    def basis_index(self, values: dict[str, int] | Sequence[int]) -> int:
        if isinstance(values, dict):
            values = [values.get(n, 0) for n in self.names]
        return int(np.ravel_multi_index(tuple(values), self.dims)) if self.registers else 0

    def to_json(self) -> list[dict]:
        return [{"name": r.name, "dim": r.dim, "party": r.party} for r in self.registers]

    @classmethod
    def from_json(cls, data) -> "RegisterLayout":
        return cls(tuple(Register(r["name"], int(r["dim"]), r["party"]) for r in data))


@dataclass(frozen=True)
class StateVector:
    layout: RegisterLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.layout.total_dim:
            raise ValueError(f"expected {self.layout.total_dim} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, layout: RegisterLayout, values: dict[str, int] | Sequence[int] = ()) -> "StateVector":
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[layout.basis_index(values if values else {})] = 1.0
        return cls(layout, amps)

    @classmethod
    def normalized(cls, layout: RegisterLayout, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(layout, amps / np.linalg.norm(amps))

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        if other.layout != self.layout:
            raise ValueError("layout mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class UnitaryOp:
    layout: RegisterLayout
    matrix: np.ndarray = field(repr=False)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {m.shape}")
        if self.check:
            err = unitarity_error(m)
            if err > UNITARY_TOL:
                raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def identity(cls, layout: RegisterLayout) -> "UnitaryOp":
        return cls(layout, np.eye(layout.total_dim, dtype=complex), check=False)

    @property
    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.layout, self.matrix.conj().T, check=False)

    def __matmul__(self, other: "UnitaryOp") -> "UnitaryOp":
        if other.layout != self.layout:
            raise ValueError("layout mismatch")
        return UnitaryOp(self.layout, self.matrix @ other.matrix, check=False)

    def tensor_view(self) -> np.ndarray:
        """Axes: output registers then input registers."""
        return self.matrix.reshape(self.layout.dims * 2)


@dataclass(frozen=True)
class DensityMatrix:
    layout: RegisterLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {m.shape}")
        if np.abs(m - m.conj().T).max(initial=0.0) > PSD_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > PSD_TOL:
            raise ValueError(f"density matrix trace is {np.trace(m).real!r}, not 1")
        # PSD is checked where the spectrum is computed anyway (entropy_bits)
        object.__setattr__(self, "matrix", _frozen(m))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def unitarity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[1])).max(initial=0.0))


def tensor(a, b):
    """Kronecker product of two states or two operators; ``a``'s registers come first."""
    layout = a.layout.concat(b.layout)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, UnitaryOp) and isinstance(b, UnitaryOp):
        return UnitaryOp(layout, np.kron(a.matrix, b.matrix), check=False)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(layout, np.kron(a.matrix, b.matrix))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def _apply_on_axes(op_tensor: np.ndarray, n_op: int, state_tensor: np.ndarray, axes: list[int]) -> np.ndarray:
    # contract op input axes with the state's axes, then move op outputs back in place
    out = np.tensordot(op_tensor, state_tensor, axes=(list(range(n_op, 2 * n_op)), axes))
    return np.moveaxis(out, list(range(n_op)), axes)


def apply(u: UnitaryOp, s: StateVector) -> StateVector:
    """Apply ``u`` to ``s``.

    ``u`` may live on a subset of the state's registers; it then acts as the
    identity on the rest.
    """
    if u.layout == s.layout:
        return StateVector(s.layout, u.matrix @ s.amplitudes)
    missing = [n for n in u.layout.names if n not in s.layout]
    if missing:
        raise ValueError(f"operator registers {missing} are not in the state layout")
    for r in u.layout.registers:
        if s.layout.register(r.name).dim != r.dim:
            raise ValueError(f"dimension mismatch on register {r.name}")
    axes = [s.layout.index(n) for n in u.layout.names]
    out = _apply_on_axes(u.tensor_view(), len(u.layout), s.tensor_view(), axes)
    return StateVector(s.layout, out.reshape(-1))


def permute_registers(s: StateVector, order: Sequence[str]) -> StateVector:
    if sorted(order) != sorted(s.layout.names):
        raise ValueError("order must be a permutation of the layout's register names")
    axes = [s.layout.index(n) for n in order]
    layout = RegisterLayout(tuple(s.layout.register(n) for n in order))
    return StateVector(layout, np.transpose(s.tensor_view(), axes).reshape(-1))


def permute_operator(u: UnitaryOp, order: Sequence[str]) -> UnitaryOp:
    if sorted(order) != sorted(u.layout.names):
        raise ValueError("order must be a permutation of the layout's register names")
    n = len(u.layout)
    axes = [u.layout.index(name) for name in order]
    layout = RegisterLayout(tuple(u.layout.register(name) for name in order))
    t = np.transpose(u.tensor_view(), axes + [n + i for i in axes])
    return UnitaryOp(layout, t.reshape(layout.total_dim, layout.total_dim), check=False)


def _split(layout: RegisterLayout, keep: Iterable[str]):
    keep = set(keep)
    for n in keep:
        layout.index(n)
    kept = [i for i, n in enumerate(layout.names) if n in keep]
    traced = [i for i, n in enumerate(layout.names) if n not in keep]
    return kept, traced


def partial_trace(s: StateVector | DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix on the registers in ``keep`` (kept in layout order)."""
    layout = s.layout
    kept, traced = _split(layout, keep)
    sub = RegisterLayout(tuple(layout.registers[i] for i in kept))
    dk = sub.total_dim
    if isinstance(s, StateVector):
        psi = np.transpose(s.tensor_view(), kept + traced).reshape(dk, -1)
        return DensityMatrix(sub, psi @ psi.conj().T)
    n = len(layout)
    rho = s.matrix.reshape(layout.dims * 2)
    rho = np.transpose(rho, kept + traced + [n + i for i in kept] + [n + i for i in traced])
    dt = layout.total_dim // dk
    rho = rho.reshape(dk, dt, dk, dt)
    return DensityMatrix(sub, np.einsum("itjt->ij", rho))


def entropy_bits(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits, with 0 log 0 = 0."""
    evals = np.linalg.eigvalsh(rho.matrix)
    if evals.size and evals[0] < -PSD_TOL:
        raise ValueError(f"density matrix is not PSD (min eigenvalue {evals[0]:.3e})")
    evals = np.clip(evals, 0.0, 1.0)
    nz = evals[evals > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def cut_entropy_bits(s: StateVector) -> float:
    """Entanglement entropy across the Alice|Bob partition given by the party tags."""
    alice = s.layout.party_names(ALICE)
    if not alice or len(alice) == len(s.layout):
        return 0.0
    return entropy_bits(partial_trace(s, alice))


def fourier_matrix(d: int, name: str = "F", party: str = BOB) -> UnitaryOp:
    """Column z is (1/sqrt d) sum_y exp(2 pi i z y / d) |y>."""
    if d < 1:
        raise ValueError("d must be positive")
    y = np.arange(d)
    m = np.exp(2j * np.pi * np.outer(y, y) / d) / np.sqrt(d)
    return UnitaryOp(RegisterLayout.of((name, d, party)), m)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def complete_isometry(
    v: np.ndarray,
    layout: RegisterLayout,
    columns: Sequence[int] | None = None,
) -> UnitaryOp:
    """Extend an isometry to a unitary on ``layout``.

    ``v`` (shape ``D x k``, orthonormal columns) is placed verbatim at the
    matrix columns ``columns`` (default ``0..k-1``). The remaining columns are
    filled by Gram-Schmidt on the canonical basis vectors in index order, so
    the completion is deterministic.
    """
    v = np.asarray(v, dtype=complex)
    n = layout.total_dim
    if v.ndim != 2 or v.shape[0] != n or v.shape[1] > n:
        raise ValueError(f"isometry must have shape ({n}, k<= {n}), got {v.shape}")
    k = v.shape[1]
    if unitarity_error(v) > UNITARY_TOL:
        raise ValueError("columns of v are not orthonormal")
    columns = list(range(k)) if columns is None else [int(c) for c in columns]
    if len(columns) != k or len(set(columns)) != k or not all(0 <= c < n for c in columns):
        raise ValueError("columns must be k distinct indices in range")

    basis = np.zeros((n, n), dtype=complex)
    basis[:, :k] = v
    filled = k
    for i in range(n):
        if filled == n:
            break
        w = np.zeros(n, dtype=complex)
        w[i] = 1.0
        # classical Gram-Schmidt with one reorthogonalization pass
        q = basis[:, :filled]
        for _ in range(2):
            w -= q @ (q.conj().T @ w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis[:, filled] = w / nrm
            filled += 1
    if filled != n:
        raise RuntimeError("failed to complete the isometry")

    free = [c for c in range(n) if c not in set(columns)]
    u = np.empty((n, n), dtype=complex)
    u[:, columns] = basis[:, :k]
    u[:, free] = basis[:, k:]
    return UnitaryOp(layout, u)
