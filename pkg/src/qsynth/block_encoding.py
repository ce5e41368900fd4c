"""LCU block encoding: positive weights, prepare vector, select circuit, dense check.

Ancilla qubits sit after the system register; ancilla qubit ``k`` holds bit
``w-1-k`` of the term index (most significant first). Potential terms take
the first indices and kinetic terms the rest, so one register serves both.
A controlled ``Pi`` on index ``i`` equals ``exp(i pi |i><i| (I - Pi)/2)``
for Hermitian unitary ``Pi``; expanding ``|i><i|`` in ancilla Z strings
turns it into commuting Pauli rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circuit import Circuit
from .jw import CompiledHamiltonian
from .oracle import apply_circuit, check_size, hamiltonian_matrix
from .pauli import PauliString
from .boson import centered_qft_circuit
from .synthesis import basis_in, basis_out, emit_rotations, rotation_gates


@dataclass(frozen=True)
class LcuTerm:
    alpha: float
    unitary: PauliString
    kinetic: bool = False


@dataclass
class LcuForm:
    terms: list[LcuTerm]
    source: CompiledHamiltonian | None = None

    def __post_init__(self):
        if not self.terms:
            raise ValueError("cannot block-encode an empty Hamiltonian")
        if any(t.alpha <= 0 for t in self.terms):
            raise ValueError("LCU weights must be strictly positive")

    @property
    def lam(self) -> float:
        return float(sum(t.alpha for t in self.terms))

    @property
    def ancilla_width(self) -> int:
        return math.ceil(math.log2(len(self.terms))) if len(self.terms) > 1 else 0

    @property
    def max_pauli_weight(self) -> int:
        return max(t.unitary.weight for t in self.terms)

    @property
    def potential_terms(self) -> list[LcuTerm]:
        return [t for t in self.terms if not t.kinetic]

    @property
    def kinetic_terms(self) -> list[LcuTerm]:
        return [t for t in self.terms if t.kinetic]


def normalize_lcu(h: CompiledHamiltonian) -> LcuForm:
    """Fold coefficient signs into a ``-1`` phase on each unitary."""
    terms = []
    for kinetic, s in ((False, h.potential), (True, h.kinetic.canonical())):
        for c, p in s.terms:
            u = p if c > 0 else -p
            terms.append(LcuTerm(abs(c), u, kinetic))
    return LcuForm(terms, h)


def prepare_vector(lcu: LcuForm) -> np.ndarray:
    g = np.zeros(1 << lcu.ancilla_width)
    g[:len(lcu.terms)] = np.sqrt([t.alpha / lcu.lam for t in lcu.terms])
    return g


def _projector_walsh(index: int, width: int) -> list[tuple[tuple[int, ...], float]]:
    """``|index><index| = sum_T c_T Z_T`` over ancilla-bit subsets ``T``, in Gray-code order."""
    bits = [(index >> (width - 1 - k)) & 1 for k in range(width)]
    out = []
    for g in range(1 << width):
        gray = g ^ (g >> 1)
        subset = tuple(k for k in range(width) if (gray >> k) & 1)
        sign = (-1) ** sum(bits[k] for k in subset)
        out.append((subset, sign / 2 ** width))
    return out


def _controlled_pauli(out: Circuit, u: PauliString, index: int, anc: list[int],
                      ancilla_phase: dict[tuple[int, ...], float]) -> None:
    """Append ``|index><index| (x) u + (I - |index><index|) (x) I``.

    The ancilla-only factor ``exp(i pi/2 |index><index|)`` is diagonal on the
    index register and commutes with every select gate, so its angles are
    accumulated in ``ancilla_phase`` and emitted once by the caller.
    """
    if not anc:
        # single term: apply u unconditionally, as exp(-i pi/2 u) = -i u
        gates, phase = rotation_gates(u.unsigned(), math.pi / 2)
        out.extend(gates)
        out.global_phase += phase + math.pi / 2 + (math.pi if u.power == 2 else 0.0)
        return
    sign = -1.0 if u.power == 2 else 1.0
    bare = u.unsigned()
    walsh = _projector_walsh(index, len(anc))
    for subset, c in walsh:
        # exp(i pi c/2 Z_T)
        ancilla_phase[subset] = ancilla_phase.get(subset, 0.0) - math.pi * c / 2
    if bare.weight == 0:
        for subset, c in walsh:
            ancilla_phase[subset] += math.pi * c * sign / 2
        return
    # exp(-i pi c s/2 Z_T (x) P) for all T share P's basis change
    zs = tuple((q, "Z") for q in bare.support)
    terms = [(math.pi * c * sign / 2, PauliString(tuple((anc[k], "Z") for k in subset) + zs))
             for subset, c in walsh]
    out.extend(g for q, letter in bare.letters for g in basis_in(q, letter))
    emit_rotations(out, terms, 1.0, "fused")
    out.extend(g for q, letter in bare.letters for g in basis_out(q, letter))


def _emit_ancilla_phase(out: Circuit, ancilla_phase: dict, anc: list[int]) -> None:
    terms = []
    for subset in sorted(ancilla_phase, key=lambda t: (len(t), t)):
        theta = ancilla_phase[subset]
        if not subset:
            out.global_phase -= theta
        elif abs(theta) > 1e-15:
            terms.append((theta, PauliString(tuple((anc[k], "Z") for k in subset))))
    emit_rotations(out, terms, 1.0, "fused")


def prepare_circuit(vector: np.ndarray, anc: list[int], partition: dict[str, int]) -> Circuit:
    """Binary-tree amplitude loading of a real nonnegative vector onto ``anc``.

    Level ``k`` is a uniformly controlled ``ry`` on ``anc[k]``, written as
    commuting ``Z_T (x) Y`` rotations over the already-loaded prefix bits.
    """
    width = len(anc)
    probs = np.asarray(vector, dtype=float) ** 2
    out = Circuit(dict(partition))
    for k in range(width):
        angles = []
        for prefix in range(1 << k):
            block = probs.reshape((1 << k, 2, -1))[prefix]
            a0, a1 = math.sqrt(block[0].sum()), math.sqrt(block[1].sum())
            angles.append(2 * math.atan2(a1, a0))
        for r in range(k + 1):
            for subset in combinations(range(k), r):
                w = sum(phi * (-1) ** sum((pre >> (k - 1 - j)) & 1 for j in subset)
                        for pre, phi in enumerate(angles)) / (1 << k)
                if abs(w) < 1e-15:
                    continue
                p = PauliString(tuple((anc[j], "Z") for j in subset) + ((anc[k], "Y"),))
                gates, _ = rotation_gates(p, w / 2)
                out.extend(gates)
    return out


@dataclass
class BlockEncoding:
    lcu: LcuForm
    prepare: np.ndarray
    select: Circuit
    prepare_circ: Circuit | None = None
    system_qubits: int = 0
    ancilla: list[int] = field(default_factory=list)

    @property
    def num_qubits(self) -> int:
        return self.select.num_qubits


def assemble(lcu: LcuForm, h: CompiledHamiltonian | None = None) -> BlockEncoding:
    """Select circuit ``U_pot``, then ``F``, ``U_kin``, ``F^dag``; plus the prepare data."""
    h = h if h is not None else lcu.source
    if h is None:
        raise ValueError("assemble needs the compiled Hamiltonian the LCU came from")
    n = h.num_qubits
    w = lcu.ancilla_width
    partition = dict(h.partition, ancilla=w)
    anc = list(range(n, n + w))
    select = Circuit(dict(partition))
    phases: dict[tuple[int, ...], float] = {}
    for i, t in enumerate(lcu.terms):
        if not t.kinetic:
            _controlled_pauli(select, t.unitary, i, anc, phases)
    kin = [(i, t) for i, t in enumerate(lcu.terms) if t.kinetic]
    if kin:
        f = centered_qft_circuit(h.boson, partition)
        select = select.compose(f)
        for i, t in kin:
            _controlled_pauli(select, t.unitary, i, anc, phases)
        select = select.compose(f.inverse())
    _emit_ancilla_phase(select, phases, anc)
    g = prepare_vector(lcu)
    return BlockEncoding(lcu, g, select, prepare_circuit(g, anc, partition), n, anc)


def block_matrix(be: BlockEncoding) -> np.ndarray:
    """``(I (x) <G|) U (I (x) |G>)`` via the select circuit applied to every system basis state."""
    n, w = be.system_qubits, len(be.ancilla)
    check_size(n + w)
    dim = 1 << n
    states = np.kron(np.eye(dim), be.prepare.reshape(-1, 1))
    out = apply_circuit(be.select, states)
    return np.einsum("sak,a->sk", out.reshape(dim, 1 << w, dim), be.prepare.conj())


def verify_block(be: BlockEncoding) -> float:
    """Max-abs deviation of the encoded block from ``H / lambda``."""
    target = hamiltonian_matrix(be.lcu.source) / be.lcu.lam
    return float(np.abs(block_matrix(be) - target).max())


def report(be: BlockEncoding, deviation: float | None = None) -> dict:
    return {
        "lambda": be.lcu.lam,
        "term_count": len(be.lcu.terms),
        "ancilla_width": be.lcu.ancilla_width,
        "max_pauli_weight": be.lcu.max_pauli_weight,
        "verify_deviation": deviation,
    }
