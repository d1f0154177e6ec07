import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxlab import tensorcore as tc
from boxlab.tensorcore import ALICE, BOB, RegisterLayout, StateVector, UnitaryOp


def qubits(*names, party=ALICE, d=2):
    return RegisterLayout.of(*[(n, d, party) for n in names])


def test_layout_rejects_duplicates_and_bad_parties():
    with pytest.raises(ValueError):
        RegisterLayout.of(("a", 2, ALICE), ("a", 3, BOB))
    with pytest.raises(ValueError):
        RegisterLayout.of(("a", 2, "C"))
    lay = RegisterLayout.of(("a", 2, ALICE), ("b", 3, BOB), ("c", 5, ALICE))
    assert lay.total_dim == 30
    assert lay.party_names(ALICE) == ("a", "c")


def test_tensor_identities():
    i2 = UnitaryOp.identity(qubits("p"))
    i3 = UnitaryOp.identity(RegisterLayout.of(("q", 3, BOB)))
    assert np.array_equal(tc.tensor(i2, i3).matrix, np.eye(6))


def test_tensor_basis_states():
    s = tc.tensor(StateVector.basis(qubits("p"), [0]), StateVector.basis(qubits("q"), [1]))
    assert np.array_equal(s.amplitudes, np.eye(4)[1])
    assert s.layout.names == ("p", "q")


def test_tensor_name_collision():
    with pytest.raises(ValueError):
        tc.tensor(StateVector.basis(qubits("p")), StateVector.basis(qubits("p")))


def test_tensor_of_normalized_states_is_normalized(rng):
    a = StateVector.normalized(qubits("p"), rng.standard_normal(2) + 1j * rng.standard_normal(2))
    b = StateVector.normalized(RegisterLayout.of(("q", 3, BOB)), rng.standard_normal(3))
    assert abs(tc.tensor(a, b).norm() - 1) < 1e-12


def test_state_must_be_normalized():
    with pytest.raises(ValueError):
        StateVector(qubits("p"), [1.0, 1.0])


def test_unitary_check():
    with pytest.raises(ValueError):
        UnitaryOp(qubits("p"), [[1, 1], [0, 1]])


def test_apply_identity_fourier_and_inverse(rng):
    lay = RegisterLayout.of(("y", 3, BOB))
    s = StateVector.normalized(lay, rng.standard_normal(3) + 1j * rng.standard_normal(3))
    assert np.allclose(tc.apply(UnitaryOp.identity(lay), s).amplitudes, s.amplitudes)
    f = tc.fourier_matrix(3, "y")
    out = tc.apply(f, StateVector.basis(lay, [0]))
    assert np.allclose(out.amplitudes, np.ones(3) / np.sqrt(3), atol=1e-15)
    u = UnitaryOp(lay, tc.random_unitary(3, rng))
    back = tc.apply(u.dagger, tc.apply(u, s))
    assert np.abs(back.amplitudes - s.amplitudes).max() < 1e-10


def test_apply_on_subset_matches_kron(rng):
    lay = RegisterLayout.of(("p", 2, ALICE), ("q", 3, BOB), ("r", 2, BOB))
    s = StateVector.normalized(lay, rng.standard_normal(12) + 1j * rng.standard_normal(12))
    u = UnitaryOp(RegisterLayout.of(("r", 2, BOB), ("p", 2, ALICE)), tc.random_unitary(4, rng))
    # dense reference on the full space in (p, q, r) order
    t = u.matrix.reshape(2, 2, 2, 2)  # r_out, p_out, r_in, p_in
    full = np.einsum("RPrp,Qq->PQRpqr", t, np.eye(3)).reshape(12, 12)
    assert np.allclose(tc.apply(u, s).amplitudes, full @ s.amplitudes, atol=1e-14)


def test_apply_layout_mismatch():
    with pytest.raises(ValueError):
        tc.apply(UnitaryOp.identity(qubits("z")), StateVector.basis(qubits("p")))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_apply_preserves_norm(n, d, seed):
    rng = np.random.default_rng(seed)
    lay = RegisterLayout.of(*[(f"r{i}", d, ALICE if i % 2 else BOB) for i in range(n)])
    s = StateVector.normalized(lay, rng.standard_normal(lay.total_dim) + 1j * rng.standard_normal(lay.total_dim))
    u = UnitaryOp(lay, tc.random_unitary(lay.total_dim, rng))
    assert abs(tc.apply(u, s).norm() - 1) < 1e-12


def test_partial_trace_examples():
    lay = RegisterLayout.of(("p", 2, ALICE), ("q", 3, BOB))
    prod = tc.tensor(
        StateVector.normalized(qubits("p"), [1, 1j]),
        StateVector.normalized(RegisterLayout.of(("q", 3, BOB)), [1, 2, 3]),
    )
    assert abs(tc.partial_trace(prod, ["p"]).purity() - 1) < 1e-10
    s = StateVector.normalized(lay, np.arange(6) + 1.0)
    rho = tc.partial_trace(s, lay.names)
    assert np.allclose(rho.matrix, np.outer(s.amplitudes, s.amplitudes.conj()))
    with pytest.raises(KeyError):
        tc.partial_trace(s, ["nope"])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_maximally_entangled_halves(d):
    lay = RegisterLayout.of(("l", d, ALICE), ("r", d, BOB))
    s = StateVector(lay, np.eye(d).reshape(-1) / np.sqrt(d))
    for keep in ("l", "r"):
        rho = tc.partial_trace(s, [keep])
        assert np.allclose(rho.matrix, np.eye(d) / d)
        assert abs(tc.entropy_bits(rho) - np.log2(d)) < 1e-10


def test_partial_trace_of_density_matches_state(rng):
    lay = RegisterLayout.of(("p", 2, ALICE), ("q", 3, BOB), ("r", 2, ALICE))
    s = StateVector.normalized(lay, rng.standard_normal(12) + 1j * rng.standard_normal(12))
    for keep in (["p"], ["q", "r"], ["p", "r"]):
        a = tc.partial_trace(s, keep).matrix
        b = tc.partial_trace(s.density(), keep).matrix
        assert np.allclose(a, b, atol=1e-14)


def test_entropy_examples():
    lay2 = qubits("p")
    assert tc.entropy_bits(StateVector.basis(lay2).density()) == pytest.approx(0, abs=1e-12)
    assert tc.entropy_bits(tc.DensityMatrix(lay2, np.eye(2) / 2)) == pytest.approx(1.0, abs=1e-12)
    lay3 = RegisterLayout.of(("q", 3, BOB))
    assert tc.entropy_bits(tc.DensityMatrix(lay3, np.eye(3) / 3)) == pytest.approx(1.584963, abs=1e-6)


def test_entropy_rejects_non_psd():
    rho = tc.DensityMatrix(qubits("p"), np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        tc.entropy_bits(rho)


def test_fourier_small_cases():
    assert np.allclose(tc.fourier_matrix(1).matrix, [[1]])
    h = tc.fourier_matrix(2).matrix
    assert np.allclose(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    f3 = tc.fourier_matrix(3).matrix
    gram = f3.conj().T @ f3
    assert np.abs(gram - np.eye(3)).max() < 1e-12


@pytest.mark.parametrize("d", range(1, 17))
def test_fourier_unitary(d):
    f = tc.fourier_matrix(d).matrix
    assert np.abs(f.conj().T @ f - np.eye(d)).max() < 1e-12


def test_complete_isometry_square_input(rng):
    lay = RegisterLayout.of(("p", 2, ALICE), ("q", 2, BOB))
    u = tc.random_unitary(4, rng)
    assert np.array_equal(tc.complete_isometry(u, lay).matrix, u)


def test_complete_isometry_single_column():
    lay = RegisterLayout.of(("p", 2, ALICE), ("q", 2, BOB))
    u = tc.complete_isometry(np.eye(4)[:, :1], lay).matrix
    assert np.array_equal(u[:, 0], np.eye(4)[:, 0])
    assert tc.unitarity_error(u) < 1e-12


def test_complete_isometry_random_six_columns(rng):
    lay = RegisterLayout.of(("p", 3, ALICE), ("q", 4, BOB))
    z = rng.standard_normal((12, 6)) + 1j * rng.standard_normal((12, 6))
    v, _ = np.linalg.qr(z)
    cols = [11, 0, 5, 7, 2, 9]
    u = tc.complete_isometry(v, lay, cols).matrix
    assert tc.unitarity_error(u) < 1e-10
    assert np.array_equal(u[:, cols], v)


def test_complete_isometry_is_deterministic(rng):
    lay = RegisterLayout.of(("p", 3, ALICE), ("q", 3, BOB))
    v, _ = np.linalg.qr(rng.standard_normal((9, 4)))
    a = tc.complete_isometry(v, lay).matrix
    b = tc.complete_isometry(v.copy(), lay).matrix
    assert np.array_equal(a, b)


def test_complete_isometry_rejects_non_orthonormal():
    lay = qubits("p", "q")
    with pytest.raises(ValueError):
        tc.complete_isometry(np.ones((4, 2)), lay)


def test_values_are_immutable():
    s = StateVector.basis(qubits("p"))
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0
