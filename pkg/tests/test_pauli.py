import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsynth.oracle import pauli_string_matrix, pauli_sum_matrix
from qsynth.pauli import PauliPolynomial, PauliString, PauliSum, canonicalize, commutes, mul

N = 3


@st.composite
def strings(draw, n=N, hermitian=False):
    letters = draw(st.lists(st.sampled_from("IXYZ"), min_size=n, max_size=n))
    power = draw(st.sampled_from([0, 2] if hermitian else [0, 1, 2, 3]))
    return PauliString(tuple((q, p) for q, p in enumerate(letters) if p != "I"), power)


def M(p, n=N):
    return pauli_string_matrix(p, n)


def test_involution_gives_identity():
    x0 = PauliString.from_label("X0")
    prod = mul(x0, x0)
    assert prod.letters == () and prod.phase == 1


def test_xy_is_iz():
    prod = mul(PauliString.from_label("X0"), PauliString.from_label("Y0"))
    assert prod == PauliString.from_label("Z0", 1j)


def test_two_qubit_product_phase():
    prod = mul(PauliString.from_label("Z0 X1"), PauliString.from_label("Z1"))
    assert prod == PauliString.from_label("Z0 Y1", -1j)
    assert np.allclose(M(prod, 2), M(PauliString.from_label("Z0 X1"), 2) @ M(PauliString.from_label("Z1"), 2))


@pytest.mark.parametrize("a, b, expected", [
    ("Z0", "Z0 Z1", True),
    ("X0", "Z0", False),
    ("X0 Y1", "Z0 Z1", True),
])
def test_commutes_examples(a, b, expected):
    assert commutes(PauliString.from_label(a), PauliString.from_label(b)) is expected


def test_canonicalize_folds_sign():
    s = PauliSum(((1.0, -PauliString.from_label("Z0")), (0.5, PauliString.from_label("Z0"))))
    out = canonicalize(s)
    assert out.terms == ((-0.5, PauliString.from_label("Z0")),)


def test_canonicalize_exact_cancellation():
    s = PauliSum.from_labels([(1.0, "Z0"), (-1.0, "Z0")])
    assert len(canonicalize(s)) == 0


def test_canonicalize_key_order_independent():
    a = PauliString.from_map({0: "Z", 1: "Z"})
    b = PauliString.from_map({1: "Z", 0: "Z"})
    out = canonicalize(PauliSum(((0.25, a), (0.25, b))))
    assert out.terms == ((0.5, PauliString.from_label("Z0 Z1")),)


def test_canonicalize_rejects_imaginary_phase():
    with pytest.raises(ValueError):
        canonicalize(PauliSum(((1.0, PauliString.from_label("X0", 1j)),)))


def test_invalid_strings_rejected():
    with pytest.raises(ValueError):
        PauliString(((0, "Q"),))
    with pytest.raises(ValueError):
        PauliString(((0, "X"), (0, "Z")))
    with pytest.raises(ValueError):
        PauliString.from_label("X0", 2)


@given(strings(), strings())
def test_mul_matches_dense(a, b):
    assert np.allclose(M(mul(a, b)), M(a) @ M(b), atol=1e-12)


@given(strings(), strings(), strings())
def test_mul_associative(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@given(strings(), strings())
def test_commutes_matches_dense(a, b):
    ma, mb = M(a), M(b)
    dense = np.allclose(ma @ mb, mb @ ma, atol=1e-12)
    assert commutes(a, b) is dense
    assert commutes(a, b) is commutes(b, a)


@given(st.lists(st.tuples(st.floats(-2, 2, allow_nan=False), strings(hermitian=True)), max_size=8))
def test_canonical_form_preserves_matrix_and_is_idempotent(terms):
    s = PauliSum(tuple(terms))
    c = canonicalize(s)
    assert canonicalize(c) == c
    assert all(p.power == 0 for _, p in c.terms)
    assert len({p.letters for _, p in c.terms}) == len(c)
    assert np.allclose(pauli_sum_matrix(c, N), pauli_sum_matrix(s, N), atol=1e-12)


@given(strings(), strings())
def test_polynomial_product_matches_dense(a, b):
    pa = PauliPolynomial.from_string(a, 0.5 + 0.25j)
    pb = PauliPolynomial.from_string(b, -1.5)
    prod = pa * pb
    dense = sum(c * M(PauliString(k)) for k, c in prod.coeffs.items())
    assert np.allclose(dense, (0.5 + 0.25j) * -1.5 * M(a) @ M(b), atol=1e-12)


def test_polynomial_hermitian_conversion():
    x = PauliPolynomial.from_string(PauliString.from_label("X0"))
    y = PauliPolynomial.from_string(PauliString.from_label("Y0"))
    herm = x * 2.0 + y * y
    assert herm.to_pauli_sum().terms == ((1.0, PauliString()), (2.0, PauliString.from_label("X0")))
    with pytest.raises(ValueError):
        (x * 1j).to_pauli_sum()
