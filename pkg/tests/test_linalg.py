import numpy as np
import pytest

from reductionlab import linalg
from reductionlab.linalg import (
    DensityMatrix,
    LinalgError,
    Operator,
    StateVector,
    eig_hermitian,
    hermitize,
    load_array,
    partial_trace,
    partial_trace_matrix,
    random_density_matrix,
    random_hermitian,
    random_pure_state,
    save_array,
    tensor_product,
)


def test_tensor_identity_case():
    out = tensor_product(np.eye(2), np.eye(3))
    assert np.array_equal(out, np.eye(6))


def test_tensor_kron_structure():
    out = tensor_product(np.diag([1.0, 2.0]), np.eye(2))
    assert np.allclose(out, np.diag([1.0, 1.0, 2.0, 2.0]))


def test_tensor_eigenvalues_are_products(rng):
    a = random_hermitian(2, rng)
    b = random_hermitian(2, rng)
    # independent oracle: brute-force eigensolve of the 4x4 product
    big = np.sort(np.linalg.eigvalsh(tensor_product(a, b)))
    la = np.linalg.eigvalsh(a)
    lb = np.linalg.eigvalsh(b)
    products = np.sort(np.array([x * y for x in la for y in lb]))
    assert np.allclose(big, products, atol=1e-10)


def test_tensor_hermitian_tag_and_overflow(rng):
    a = Operator(random_hermitian(2, rng), hermitian=True)
    b = Operator(random_hermitian(3, rng), hermitian=True)
    out = tensor_product(a, b)
    assert out.hermitian
    with pytest.raises(LinalgError):
        tensor_product(np.eye(70), np.eye(70), max_dim=4096)


def test_partial_trace_product_state(rng):
    r1 = random_density_matrix(3, rng)
    r2 = random_density_matrix(2, rng)
    red = partial_trace(np.kron(r1, r2), (3, 2), keep="first")
    assert np.allclose(red.matrix, r1, atol=1e-12)
    red2 = partial_trace(np.kron(r1, r2), (3, 2), keep="second")
    assert np.allclose(red2.matrix, r2, atol=1e-12)


def test_partial_trace_maximally_entangled():
    bell = np.zeros(4, complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    rho = np.outer(bell, bell.conj())
    red = partial_trace(rho, (2, 2), keep="second")
    assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_index_loop_oracle(rng):
    rho = random_density_matrix(4, rng)
    red = partial_trace_matrix(rho, (2, 2), keep="first")
    oracle = np.zeros((2, 2), complex)
    r4 = rho.reshape(2, 2, 2, 2)
    for i in range(2):
        for j in range(2):
            oracle[i, j] = sum(r4[i, k, j, k] for k in range(2))
    assert np.allclose(red, oracle, atol=1e-14)


def test_partial_trace_linear_and_trace_preserving(rng):
    a = random_density_matrix(6, rng)
    b = random_density_matrix(6, rng)
    lam = 0.37
    mix = lam * a + (1 - lam) * b
    red_mix = partial_trace_matrix(mix, (2, 3))
    red_split = lam * partial_trace_matrix(a, (2, 3)) + (1 - lam) * partial_trace_matrix(b, (2, 3))
    assert np.allclose(red_mix, red_split, atol=1e-13)
    assert abs(np.trace(red_mix) - 1.0) < 1e-12


def test_partial_trace_bad_factorization():
    with pytest.raises(LinalgError):
        partial_trace(np.eye(6) / 6, (4, 2))


def test_eig_sorted_and_degenerate():
    spec = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])
    spec2 = eig_hermitian(np.diag([0.0, 1.0, 1.0, 2.0]))
    assert spec2.degeneracy_groups == ((0,), (1, 2), (3,))


def test_eig_reconstruction(rng):
    h = random_hermitian(6, rng)
    spec = eig_hermitian(h)
    u, w = spec.eigenvectors, spec.eigenvalues
    assert np.linalg.norm((u * w) @ u.conj().T - h) <= 1e-10 * np.linalg.norm(h)
    assert np.linalg.norm(u.conj().T @ u - np.eye(6)) < 1e-10
    # U†HU = Λ
    assert np.linalg.norm(u.conj().T @ h @ u - np.diag(w)) <= 1e-10 * np.linalg.norm(h)


def test_eig_rejects_non_hermitian(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    with pytest.raises(LinalgError):
        eig_hermitian(m)


def test_state_vector_norm_enforced():
    StateVector(np.array([1.0, 0.0]))
    with pytest.raises(LinalgError):
        StateVector(np.array([1.0, 0.5]))


def test_state_vector_density_projector(rng):
    sv = StateVector(random_pure_state(3, rng))
    rho = sv.density()
    assert rho.purity_tag == "pure"
    assert abs(np.trace(rho.matrix) - 1.0) < 1e-12
    assert np.allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-12)


def test_density_matrix_invariants(rng):
    DensityMatrix(random_density_matrix(3, rng))
    with pytest.raises(LinalgError):
        DensityMatrix(np.array([[0.5, 0.3], [0.1, 0.5]]))  # not Hermitian
    with pytest.raises(LinalgError):
        DensityMatrix(np.eye(2))  # trace 2
    with pytest.raises(LinalgError):
        DensityMatrix(np.diag([1.2, -0.2]))  # negative eigenvalue
    v = random_pure_state(3, rng)
    DensityMatrix(np.outer(v, v.conj()), purity_tag="pure")
    with pytest.raises(LinalgError):
        DensityMatrix(np.eye(3) / 3, purity_tag="pure")


def test_operator_hermitian_tag(rng):
    with pytest.raises(LinalgError):
        Operator(rng.standard_normal((3, 3)) + 1j * np.eye(3), hermitian=True)


def test_hermitize_defect(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert linalg.hermiticity_defect(hermitize(m)) < 1e-15


def test_serialization_roundtrip(tmp_path, rng):
    m = random_hermitian(3, rng)
    save_array(tmp_path / "op.txt", m)
    back = load_array(tmp_path / "op.txt")
    assert np.array_equal(back, m)
    first = (tmp_path / "op.txt").read_text().splitlines()[0]
    assert first == "3"

    v = random_pure_state(5, rng)
    save_array(tmp_path / "vec.txt", v)
    vb = load_array(tmp_path / "vec.txt")
    assert vb.ndim == 1 and np.array_equal(vb, v)
