"""Dense matrix oracle for Pauli sums, circuits and time evolution.

Basis ordering is big-endian: qubit 0 is the most significant bit of the
matrix index. Everything here is exponential in the qubit count and is meant
for desk-scale verification only.
"""
from __future__ import annotations

import os

import numpy as np

from .circuit import Circuit, Gate
from .pauli import PauliString, PauliSum

DEFAULT_ORACLE_LIMIT = 14

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class OracleLimitError(ValueError):
    """Raised when a dense computation would exceed the configured qubit cap."""


def oracle_limit() -> int:
    return int(os.environ.get("QSYNTH_ORACLE_LIMIT", DEFAULT_ORACLE_LIMIT))


def check_size(n: int, limit: int | None = None) -> None:
    limit = oracle_limit() if limit is None else limit
    if n > limit:
        raise OracleLimitError(f"{n} qubits exceeds the dense oracle limit of {limit}")


def _masks(p: PauliString, n: int) -> tuple[int, int, int]:
    flip = phase_mask = 0
    ny = 0
    for q, letter in p.letters:
        if q >= n:
            raise ValueError(f"string {p} acts outside {n} qubits")
        bit = 1 << (n - 1 - q)
        if letter in ("X", "Y"):
            flip |= bit
        if letter in ("Y", "Z"):
            phase_mask |= bit
        ny += letter == "Y"
    return flip, phase_mask, ny


def pauli_string_matrix(p: PauliString, n: int) -> np.ndarray:
    """Dense ``2**n`` matrix of ``p`` (phase included)."""
    check_size(n)
    dim = 1 << n
    flip, zmask, ny = _masks(p, n)
    cols = np.arange(dim)
    rows = cols ^ flip
    signs = 1 - 2 * (np.bitwise_count(cols & zmask).astype(np.int64) & 1)
    vals = signs * (1j ** ny) * p.phase
    out = np.zeros((dim, dim), dtype=complex)
    out[rows, cols] = vals
    return out


def apply_pauli_string(p: PauliString, n: int, mat: np.ndarray) -> np.ndarray:
    """``P @ mat`` without forming ``P`` (a signed permutation of rows)."""
    dim = 1 << n
    flip, zmask, ny = _masks(p, n)
    rows = np.arange(dim)
    # (P mat)[r] = val(r ^ flip) * mat[r ^ flip]
    src = rows ^ flip
    vals = (1 - 2 * (np.bitwise_count(src & zmask).astype(np.int64) & 1)) * (1j ** ny) * p.phase
    return vals.reshape((dim,) + (1,) * (mat.ndim - 1)) * mat[src]


def pauli_sum_matrix(s: PauliSum, n: int | None = None) -> np.ndarray:
    n = s.num_qubits if n is None else n
    check_size(n)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for c, p in s.terms:
        flip, zmask, ny = _masks(p, n)
        signs = 1 - 2 * (np.bitwise_count(cols & zmask).astype(np.int64) & 1)
        out[cols ^ flip, cols] += c * signs * (1j ** ny) * p.phase
    return out


def _index(n: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * (n + 1)
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def _apply_gate(psi: np.ndarray, g: Gate, n: int) -> np.ndarray:
    k = g.kind
    if k == "h":
        q = g.qubits[0]
        return np.moveaxis(np.tensordot(_H, psi, axes=([1], [q])), 0, q)
    if k in ("s", "sdg", "rz"):
        q = g.qubits[0]
        if k == "rz":
            d0, d1 = np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)
        else:
            d0, d1 = 1.0, (1j if k == "s" else -1j)
        if d0 != 1.0:
            psi[_index(n, {q: 0})] *= d0
        psi[_index(n, {q: 1})] *= d1
        return psi
    if k == "cx":
        c, t = g.qubits
        i0, i1 = _index(n, {c: 1, t: 0}), _index(n, {c: 1, t: 1})
        tmp = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = tmp
        return psi
    if k == "cp":
        a, b = g.qubits
        psi[_index(n, {a: 1, b: 1})] *= np.exp(1j * g.angle)
        return psi
    if k == "swap":
        a, b = g.qubits
        return np.ascontiguousarray(np.swapaxes(psi, a, b))
    raise ValueError(f"unsupported gate {k}")


_MONOMIAL = {"cx", "rz", "s", "sdg", "cp", "swap"}


def _monomial_run(gates: list[Gate], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Destination index and phase of every basis state under a run of monomial gates."""
    idx = np.arange(1 << n)
    ph = np.ones(1 << n, dtype=complex)

    def bit(q):
        return (idx >> (n - 1 - q)) & 1

    for g in gates:
        k = g.kind
        if k == "cx":
            c, t = g.qubits
            idx = idx ^ (bit(c) << (n - 1 - t))
        elif k == "rz":
            ph *= np.where(bit(g.qubits[0]), np.exp(0.5j * g.angle), np.exp(-0.5j * g.angle))
        elif k in ("s", "sdg"):
            ph *= np.where(bit(g.qubits[0]), 1j if k == "s" else -1j, 1.0)
        elif k == "cp":
            a, b = g.qubits
            ph *= np.where(bit(a) & bit(b), np.exp(1j * g.angle), 1.0)
        else:
            a, b = g.qubits
            diff = bit(a) ^ bit(b)
            idx = idx ^ (diff << (n - 1 - a)) ^ (diff << (n - 1 - b))
    return idx, ph


def apply_circuit(circuit: Circuit, states: np.ndarray) -> np.ndarray:
    """Apply ``circuit`` to a vector or to the columns of a ``2**n x m`` array.

    Maximal runs of permutation and phase gates are collapsed into one
    signed permutation, so only Hadamards cost a pass over the data each.
    """
    n = circuit.num_qubits
    vector = states.ndim == 1
    batch = 1 if vector else states.shape[1]
    psi = np.array(states, dtype=complex).reshape((2,) * n + (batch,))
    run: list[Gate] = []

    def flush(psi):
        if not run:
            return psi
        idx, ph = _monomial_run(run, n)
        run.clear()
        flat = psi.reshape(1 << n, batch)
        out = np.empty_like(flat)
        out[idx] = ph[:, None] * flat
        return out.reshape((2,) * n + (batch,))

    for g in circuit.gates:
        if g.kind in _MONOMIAL:
            run.append(g)
            continue
        psi = flush(psi)
        psi = _apply_gate(psi, g, n)
    psi = flush(psi)
    out = psi.reshape(1 << n, batch) * np.exp(1j * circuit.global_phase)
    return out[:, 0] if vector else out


def circuit_matrix(circuit: Circuit, limit: int | None = None) -> np.ndarray:
    check_size(circuit.num_qubits, limit)
    return apply_circuit(circuit, np.eye(1 << circuit.num_qubits, dtype=complex))


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    return np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() < tol


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return np.abs(a - a.conj().T).max() < tol


def expm_hermitian(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(-i t A)`` for Hermitian ``A`` via its eigendecomposition."""
    if not is_hermitian(a, 1e-10):
        raise ValueError("expm_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh(a)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def centered_dft(num_qubits: int, dx: float, dp: float) -> np.ndarray:
    """``F[k, n] = exp(-i p_k x_n) / sqrt(L)`` on the symmetric grids, grid-integer order."""
    lam = 1 << num_qubits
    c = (lam - 1) / 2
    grid = np.arange(lam) - c
    return np.exp(-1j * np.outer(grid * dp, grid * dx)) / np.sqrt(lam)


def _bit_reverse(values: np.ndarray, bits: int) -> np.ndarray:
    out = np.zeros_like(values)
    for b in range(bits):
        out |= ((values >> b) & 1) << (bits - 1 - b)
    return out


def _fourier_block(register) -> np.ndarray:
    q = register.qubits_per_boson
    f = centered_dft(q, register.dx, register.dp)
    # block qubit 0 (lowest global index) holds the least significant grid bit
    rev = _bit_reverse(np.arange(1 << q), q)
    return f[np.ix_(rev, rev)]


def boson_fourier_matrix(register, n_total: int) -> np.ndarray:
    """Dense per-boson centered DFT on all bosons of ``register``, identity elsewhere."""
    check_size(n_total)
    return apply_boson_fourier(register, n_total, np.eye(1 << n_total, dtype=complex))


def apply_boson_fourier(register, n_total: int, mat: np.ndarray, adjoint: bool = False) -> np.ndarray:
    """``F @ mat`` (or ``F^dag @ mat``) by contracting each boson's qubits in place."""
    q = register.qubits_per_boson
    block = _fourier_block(register)
    if adjoint:
        block = block.conj().T
    cols = mat.shape[1]
    psi = np.asarray(mat, dtype=complex).reshape((2,) * n_total + (cols,))
    for b in range(register.num_bosons):
        start = register.boson_qubits(b)[0]
        axes = list(range(start, start + q))
        t = np.tensordot(block.reshape((2,) * (2 * q)), psi, axes=(list(range(q, 2 * q)), axes))
        psi = np.moveaxis(t, list(range(q)), axes)
    return psi.reshape(1 << n_total, cols)


def hamiltonian_matrix(h) -> np.ndarray:
    """Dense Hamiltonian: coordinate-basis potential plus Fourier-conjugated kinetic part."""
    n = h.num_qubits
    check_size(n)
    mat = pauli_sum_matrix(h.potential, n)
    if len(h.kinetic):
        # kinetic is diagonal: F^dag diag(k) F
        k = _diagonal(h.kinetic, n)
        f = apply_boson_fourier(h.boson, n, np.eye(1 << n, dtype=complex))
        mat = mat + apply_boson_fourier(h.boson, n, k[:, None] * f, adjoint=True)
    return mat


def _diagonal(s: PauliSum, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    out = np.zeros(1 << n)
    for c, p in s.terms:
        flip, zmask, _ = _masks(p, n)
        if flip:
            raise ValueError("expected a diagonal (Z-only) sum")
        out += c * p.phase.real * (1 - 2 * (np.bitwise_count(idx & zmask).astype(np.int64) & 1))
    return out


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def trotter_error(h, epsilon: float, policy: str = "fused") -> float:
    """Spectral-norm distance between one Trotter step and ``exp(-i epsilon H)``."""
    from .synthesis import trotter_step

    check_size(h.num_qubits)
    u_trot = circuit_matrix(trotter_step(h, epsilon, policy))
    u_exact = expm_hermitian(hamiltonian_matrix(h), epsilon)
    return spectral_norm(u_trot - u_exact)
