import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsynth.boson import (BosonRegister, centered_qft_circuit, expand_monomial, kinetic_operator,
                          momentum_operator, position_operator, raw_monomial_terms)
from qsynth.circuit import depth
from qsynth.jw import CompiledHamiltonian
from qsynth.oracle import (boson_fourier_matrix, centered_dft, circuit_matrix, hamiltonian_matrix,
                           pauli_sum_matrix)
from qsynth.pauli import PauliString


def spectrum(s, n):
    return np.sort(np.diag(pauli_sum_matrix(s, n)).real)


def test_single_qubit_position():
    reg = BosonRegister(1, 1, 1.0)
    x = position_operator(0, reg)
    assert x.terms == ((-0.5, PauliString.from_label("Z0")),)
    assert np.allclose(spectrum(x, 1), [-0.5, 0.5])


def test_two_qubit_position():
    reg = BosonRegister(1, 2, 2.0)
    x = position_operator(0, reg)
    assert x.terms == ((-0.5, PauliString.from_label("Z0")), (-1.0, PauliString.from_label("Z1")))
    assert np.allclose(spectrum(x, 2), [-1.5, -0.5, 0.5, 1.5])


def test_three_qubit_position_coefficients():
    reg = BosonRegister(1, 3, 4.0)
    assert [c for c, _ in position_operator(0, reg).terms] == [-0.5, -1.0, -2.0]
    ev = spectrum(position_operator(0, reg), 3)
    assert np.allclose(ev, -ev[::-1])


@pytest.mark.parametrize("Q, R, coeffs", [
    (1, math.pi, [-0.5]),
    (2, math.pi / 2, [-1.0, -2.0]),
])
def test_momentum_operator(Q, R, coeffs):
    p = momentum_operator(0, BosonRegister(1, Q, R))
    assert np.allclose([c for c, _ in p.terms], coeffs)


@given(st.integers(1, 6), st.floats(0.5, 8.0))
def test_position_spectrum_is_grid(Q, R):
    reg = BosonRegister(1, Q, R)
    x = position_operator(0, reg)
    assert len(x) == Q
    # the integer n sits in bits ordered LSB first from the lowest qubit
    diag = np.diag(pauli_sum_matrix(x, Q)).real
    for idx in range(1 << Q):
        n = int(format(idx, f"0{Q}b")[::-1], 2)
        assert diag[idx] == pytest.approx(reg.coordinate_grid()[n], abs=1e-12)


def _reordered_dft(reg):
    q = reg.qubits_per_boson
    f = centered_dft(q, reg.dx, reg.dp)
    rev = [int(format(i, f"0{q}b")[::-1], 2) for i in range(1 << q)]
    return f[np.ix_(rev, rev)]


def test_one_qubit_fourier_explicit():
    reg = BosonRegister(1, 1, 1.0)
    grid_x = np.array([-0.5, 0.5]) * reg.dx
    grid_p = np.array([-0.5, 0.5]) * reg.dp
    explicit = np.exp(-1j * np.outer(grid_p, grid_x)) / np.sqrt(2)
    assert np.abs(circuit_matrix(centered_qft_circuit(reg)) - explicit).max() < 1e-12


@pytest.mark.parametrize("Q", [2, 3, 4])
def test_fourier_circuit_matches_dft(Q):
    reg = BosonRegister(1, Q, 1.7)
    u = circuit_matrix(centered_qft_circuit(reg))
    assert np.abs(u - _reordered_dft(reg)).max() < 1e-12


def test_fourier_circuit_inverse():
    reg = BosonRegister(2, 2, 1.0)
    f = circuit_matrix(centered_qft_circuit(reg))
    fi = circuit_matrix(centered_qft_circuit(reg, inverse=True))
    assert np.abs(fi @ f - np.eye(16)).max() < 1e-12
    assert np.abs(f - boson_fourier_matrix(reg, 4)).max() < 1e-12


def test_parallel_fourier_depth_independent_of_boson_count():
    one = depth(centered_qft_circuit(BosonRegister(1, 2, 1.0)))
    three = depth(centered_qft_circuit(BosonRegister(3, 2, 1.0)))
    assert one == three


def test_fourier_gate_set():
    kinds = {g.kind for g in centered_qft_circuit(BosonRegister(2, 3, 1.0))}
    assert kinds <= {"h", "cp", "swap", "rz"}


def test_fourier_conjugates_position_into_momentum():
    reg = BosonRegister(1, 3, 2.0)
    f = circuit_matrix(centered_qft_circuit(reg))
    x = pauli_sum_matrix(position_operator(0, reg), 3)
    p = pauli_sum_matrix(momentum_operator(0, reg), 3)
    # F^dag p F is the momentum operator in the coordinate basis; its
    # eigenvalues are the momentum grid and it does not commute with x
    pc = f.conj().T @ p @ f
    assert np.allclose(np.linalg.eigvalsh(pc), sorted(reg.momentum_grid()))
    assert np.abs(pc @ x - x @ pc).max() > 0.1


def test_monomial_degree_one_is_position():
    reg = BosonRegister(2, 2, 2.0)
    assert expand_monomial(0.7, (1,), reg) == (position_operator(1, reg) * 0.7).canonical()


def test_square_same_boson():
    reg = BosonRegister(1, 2, 2.0)
    assert raw_monomial_terms((0, 0), reg) == 4
    sq = expand_monomial(1.0, (0, 0), reg)
    assert [p for _, p in sq.terms] == [PauliString(), PauliString.from_label("Z0 Z1")]
    x = pauli_sum_matrix(position_operator(0, reg), 2)
    assert np.allclose(pauli_sum_matrix(sq, 2), x @ x)


def test_product_distinct_bosons():
    reg = BosonRegister(2, 2, 2.0)
    s = expand_monomial(1.0, (0, 1), reg)
    assert len(s) == 4
    for _, p in s.terms:
        assert p.weight == 2
        assert p.support[0] in (0, 1) and p.support[1] in (2, 3)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=3), st.floats(-2, 2, allow_nan=False))
@settings(max_examples=30)
def test_monomial_matches_dense_product(bosons, coeff):
    reg = BosonRegister(2, 2, 1.5)
    dense = coeff * np.eye(16)
    for b in bosons:
        dense = dense @ pauli_sum_matrix(position_operator(b, reg), 4)
    assert np.abs(pauli_sum_matrix(expand_monomial(coeff, bosons, reg), 4) - dense).max() < 1e-10


def test_kinetic_has_identity_offset():
    kin = kinetic_operator(BosonRegister(1, 2, 2.0))
    assert PauliString() in [p for _, p in kin.terms]


def test_harmonic_oscillator_ground_energy():
    reg = BosonRegister(1, 6, 5.0)
    pot = expand_monomial(0.5, (0, 0), reg)
    h = CompiledHamiltonian.from_pauli_sum(pot, kinetic=kinetic_operator(reg), boson=reg)
    ev = np.linalg.eigvalsh(hamiltonian_matrix(h))
    assert abs(ev[0] - 0.5) < 1e-2
    assert abs(ev[1] - 1.5) < 1e-2


def test_register_validation():
    with pytest.raises(ValueError):
        BosonRegister(1, 2, 0.0)
    with pytest.raises(ValueError):
        BosonRegister(1, 0, 1.0)
    with pytest.raises(IndexError):
        BosonRegister(1, 2, 1.0).boson_qubits(1)
