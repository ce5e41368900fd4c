"""Truncated boson registers: x and p as weighted Z sums, centered QFT, monomials.

Each boson gets ``Q`` qubits; qubit ``j`` of a boson (lowest global index
first) carries bit ``j`` of the grid integer ``n``, so ``x = dx * (n - (L-1)/2)``
with ``L = 2**Q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .circuit import CP, H, RZ, SWAP, Circuit, Gate
from .pauli import PauliPolynomial, PauliString, PauliSum


@dataclass(frozen=True)
class BosonRegister:
    num_bosons: int
    qubits_per_boson: int
    box_radius: float
    qubit_offset: int = 0

    def __post_init__(self):
        if self.num_bosons < 0:
            raise ValueError("num_bosons must be >= 0")
        if self.num_bosons and self.qubits_per_boson < 1:
            raise ValueError("qubits_per_boson must be >= 1")
        if not self.box_radius > 0:
            raise ValueError("box_radius must be positive")

    @property
    def cutoff(self) -> int:
        return 1 << self.qubits_per_boson

    @property
    def dx(self) -> float:
        return 2 * self.box_radius / self.cutoff

    @property
    def dp(self) -> float:
        return math.pi / self.box_radius

    @property
    def num_qubits(self) -> int:
        return self.num_bosons * self.qubits_per_boson

    def boson_qubits(self, b: int) -> list[int]:
        if not 0 <= b < self.num_bosons:
            raise IndexError(f"boson index {b} out of range for {self.num_bosons} bosons")
        start = self.qubit_offset + b * self.qubits_per_boson
        return list(range(start, start + self.qubits_per_boson))

    def coordinate_grid(self) -> list[float]:
        c = (self.cutoff - 1) / 2
        return [(n - c) * self.dx for n in range(self.cutoff)]

    def momentum_grid(self) -> list[float]:
        c = (self.cutoff - 1) / 2
        return [(n - c) * self.dp for n in range(self.cutoff)]


def _z_sum(b: int, reg: BosonRegister, spacing: float) -> PauliSum:
    qubits = reg.boson_qubits(b)
    return PauliSum(tuple((-spacing * 2 ** j / 2, PauliString(((q, "Z"),)))
                          for j, q in enumerate(qubits)))


def position_operator(b: int, reg: BosonRegister) -> PauliSum:
    return _z_sum(b, reg, reg.dx)


def momentum_operator(b: int, reg: BosonRegister) -> PauliSum:
    """p of boson ``b`` as a Z sum; diagonal in the momentum basis."""
    return _z_sum(b, reg, reg.dp)


def _product(factors: Sequence[PauliSum], coeff: float) -> PauliSum:
    polys = [PauliPolynomial.from_sum(f) for f in factors]
    prod = reduce(lambda a, b: a * b, polys, PauliPolynomial.scalar(coeff))
    return prod.to_pauli_sum()


def raw_monomial_terms(bosons: Sequence[int], reg: BosonRegister) -> int:
    return reg.qubits_per_boson ** len(bosons)


def expand_monomial(coeff: float, bosons: Sequence[int], reg: BosonRegister) -> PauliSum:
    """Canonical Z-sum of ``coeff * x_{a1} ... x_{an}`` (repeats allowed)."""
    if len(bosons) < 1:
        raise ValueError("monomial needs at least one boson factor")
    return _product([position_operator(b, reg) for b in bosons], coeff)


def monomial_polynomial(powers: Sequence[tuple[int, int]], reg: BosonRegister) -> PauliPolynomial:
    """``prod_b x_b**power`` as a polynomial (identity for an empty list)."""
    out = PauliPolynomial.scalar(1.0)
    for b, power in powers:
        x = PauliPolynomial.from_sum(position_operator(b, reg))
        for _ in range(power):
            out = out * x
    return out


def kinetic_operator(reg: BosonRegister) -> PauliSum:
    """``sum_a p_a**2 / 2`` in the momentum basis."""
    total = PauliSum()
    for b in range(reg.num_bosons):
        p = momentum_operator(b, reg)
        total = total + _product([p, p], 0.5)
    return total.canonical()


def qft_gates(qubits: Sequence[int], inverse: bool = False) -> list[Gate]:
    """Textbook QFT on a register whose ``qubits[j]`` holds bit ``j`` (LSB first)."""
    msb_first = list(reversed(qubits))
    q = len(msb_first)
    gates: list[Gate] = []
    for i in range(q):
        gates.append(H(msb_first[i]))
        for j in range(i + 1, q):
            gates.append(CP(msb_first[j], msb_first[i], 2 * math.pi / 2 ** (j - i + 1)))
    for i in range(q // 2):
        gates.append(SWAP(msb_first[i], msb_first[q - 1 - i]))
    if inverse:
        gates = [g.inverse() for g in reversed(gates)]
    return gates


def centered_fourier_gates(reg: BosonRegister, inverse: bool = False) -> tuple[list[Gate], float]:
    """Gates and global phase of the centered DFT on every boson.

    ``F[k, n] = exp(-i p_k x_n) / sqrt(L)`` factors as a global phase times
    ``D . QFT^-1 . D`` with ``D`` a product of single-qubit phase rotations.
    Bosons are independent, so gate layers interleave across bosons and the
    depth does not grow with the boson count.
    """
    q, lam = reg.qubits_per_boson, reg.cutoff
    c = (lam - 1) / 2
    angles = [2 * math.pi * c * 2 ** j / lam for j in range(q)]
    # phase gate P(a) = exp(i a / 2) RZ(a); plus exp(-2 pi i c^2 / L) from the kernel
    phase_per_boson = -2 * math.pi * c * c / lam + sum(angles)
    layers: list[list[Gate]] = []
    for b in range(reg.num_bosons):
        qubits = reg.boson_qubits(b)
        seq = [RZ(qb, a) for qb, a in zip(qubits, angles)]
        seq += qft_gates(qubits, inverse=True)
        seq += [RZ(qb, a) for qb, a in zip(qubits, angles)]
        layers.append(seq)
    gates = [g for seq in zip(*layers) for g in seq] if layers else []
    phase = phase_per_boson * reg.num_bosons
    if inverse:
        return [g.inverse() for g in reversed(gates)], -phase
    return gates, phase


def centered_qft_circuit(reg: BosonRegister, partition: dict[str, int] | None = None,
                         inverse: bool = False) -> Circuit:
    if partition is None:
        partition = {"boson": reg.qubit_offset + reg.num_qubits}
    gates, phase = centered_fourier_gates(reg, inverse)
    return Circuit(partition, gates, phase)
