"""Pauli-rotation synthesis, Trotter-step emission and peephole CNOT cancellation.

``exp(-i theta P)`` is built as basis change, a CNOT parity ladder onto a
pivot, ``rz(2 theta)`` on the pivot, then the mirror image. X letters are
conjugated by H; Y letters by ``sdg, h`` before and ``h, s`` after.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .boson import centered_qft_circuit
from .circuit import CX, Circuit, Gate, H, RZ, S, Sdg
from .pauli import PauliString

STRATEGIES = ("pivot_ladder", "chain_ladder", "balanced_tree")
POLICIES = ("fused", "naive")


def parity_ladder(qubits: Sequence[int], strategy: str = "pivot_ladder") -> tuple[list[Gate], int]:
    """CNOTs accumulating the parity of ``qubits`` onto one of them; returns (gates, pivot)."""
    qs = list(qubits)
    if not qs:
        raise ValueError("parity ladder needs at least one qubit")
    if strategy == "pivot_ladder":
        pivot = qs[-1]
        return [CX(q, pivot) for q in qs[:-1]], pivot
    if strategy == "chain_ladder":
        return [CX(a, b) for a, b in zip(qs, qs[1:])], qs[-1]
    if strategy == "balanced_tree":
        gates = []
        layer = qs
        while len(layer) > 1:
            nxt = []
            for i in range(0, len(layer) - 1, 2):
                gates.append(CX(layer[i], layer[i + 1]))
                nxt.append(layer[i + 1])
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return gates, layer[0]
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def basis_in(q: int, letter: str) -> list[Gate]:
    if letter == "X":
        return [H(q)]
    if letter == "Y":
        return [Sdg(q), H(q)]
    return []


def basis_out(q: int, letter: str) -> list[Gate]:
    if letter == "X":
        return [H(q)]
    if letter == "Y":
        return [H(q), S(q)]
    return []


def _signed_angle(p: PauliString, theta: float) -> float:
    if not p.is_hermitian:
        raise ValueError(f"cannot exponentiate non-Hermitian string {p}")
    return -theta if p.power == 2 else theta


def rotation_gates(p: PauliString, theta: float, strategy: str = "pivot_ladder") -> tuple[list[Gate], float]:
    """Gates for ``exp(-i theta P)`` plus the global phase (nonzero only for the identity)."""
    theta = _signed_angle(p, theta)
    if p.weight == 0:
        return [], -theta
    pre = [g for q, letter in p.letters for g in basis_in(q, letter)]
    ladder, pivot = parity_ladder(p.support, strategy)
    post = [g for q, letter in p.letters for g in basis_out(q, letter)]
    gates = pre + ladder + [RZ(pivot, 2 * theta)] + ladder[::-1] + post
    return gates, 0.0


def pauli_rotation(p: PauliString, theta: float, strategy: str = "pivot_ladder",
                   num_qubits: int | None = None, partition: dict[str, int] | None = None) -> Circuit:
    gates, phase = rotation_gates(p, theta, strategy)
    if partition is None:
        n = num_qubits if num_qubits is not None else max(p.support, default=-1) + 1
        partition = {"fermion": n}
    return Circuit(dict(partition), gates, phase)


class _FusedEmitter:
    """Streams rotations that share a pivot and a pending set of CNOTs into it.

    CNOTs with a common target commute, so the set pending on the pivot can
    be moved from one term's Z letters to the next by emitting only the
    symmetric difference.
    """

    def __init__(self, out: Circuit):
        self.out = out
        self.pivot: int | None = None
        self.pending: set[int] = set()

    def close(self) -> None:
        if self.pivot is not None:
            for q in sorted(self.pending, reverse=True):
                self.out.append(CX(q, self.pivot))
        self.pivot = None
        self.pending = set()

    def _choose_pivot(self, zs: list[int], upcoming: list[PauliString]) -> int:
        best, best_run = zs[-1], -1
        for q in reversed(zs):
            run = 0
            for nxt in upcoming:
                if nxt.as_dict().get(q) != "Z":
                    break
                run += 1
            if run > best_run:
                best, best_run = q, run
        return best

    def emit(self, p: PauliString, theta: float, upcoming: list[PauliString]) -> None:
        theta = _signed_angle(p, theta)
        if p.weight == 0:
            self.out.global_phase -= theta
            return
        zs = [q for q, letter in p.letters if letter == "Z"]
        if not zs:
            self.close()
            self.out.extend(rotation_gates(p.unsigned(), theta)[0])
            return
        if self.pivot not in zs:
            self.close()
            self.pivot = self._choose_pivot(zs, upcoming)
        want = set(zs) - {self.pivot}
        for q in sorted(self.pending ^ want):
            self.out.append(CX(q, self.pivot))
        self.pending = want
        others = [(q, letter) for q, letter in p.letters if letter != "Z"]
        pre = [g for q, letter in others for g in basis_in(q, letter)]
        ladder = [CX(q, self.pivot) for q, _ in others]
        post = [g for q, letter in others for g in basis_out(q, letter)]
        self.out.extend(pre + ladder + [RZ(self.pivot, 2 * theta)] + ladder[::-1] + post)


def emit_rotations(out: Circuit, terms: Sequence[tuple[float, PauliString]], epsilon: float,
                   policy: str = "fused", strategy: str = "pivot_ladder") -> None:
    """Append ``prod_k exp(-i epsilon c_k P_k)`` in the given order."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; choose from {POLICIES}")
    if policy == "naive":
        for c, p in terms:
            gates, phase = rotation_gates(p, epsilon * c, strategy)
            out.extend(gates)
            out.global_phase += phase
        return
    em = _FusedEmitter(out)
    strings = [p for _, p in terms]
    lookahead = 64
    for k, (c, p) in enumerate(terms):
        em.emit(p, epsilon * c, strings[k + 1:k + 1 + lookahead])
    em.close()


def trotter_step(h, epsilon: float, policy: str = "fused", strategy: str = "pivot_ladder",
                 peephole: bool = False) -> Circuit:
    """One first-order step: potential and fermion terms, then ``F``, kinetic terms, ``F^dag``.

    ``h`` is a compiled Hamiltonian; coordinate-basis terms run in group order.
    """
    out = Circuit(dict(h.partition))
    emit_rotations(out, h.ordered_terms(), epsilon, policy, strategy)
    if len(h.kinetic):
        f = centered_qft_circuit(h.boson, h.partition)
        out = out.compose(f)
        emit_rotations(out, h.kinetic.terms, epsilon, policy, strategy)
        out = out.compose(f.inverse())
    return peephole_cancel(out) if peephole else out


# -- peephole -----------------------------------------------------------------

_DIAGONAL_1Q = {"rz", "s", "sdg"}
_INVERSE_1Q = {("h", "h"), ("s", "sdg"), ("sdg", "s")}
ZERO_ANGLE = 1e-15


def _commutes_with_cx(g: Gate, c: int, t: int) -> bool:
    """Sound sufficient rules for ``g`` commuting with ``cx c t``."""
    qs = g.qubits
    if c not in qs and t not in qs:
        return True
    if g.kind in _DIAGONAL_1Q:
        return qs[0] == c
    if g.kind == "cp":
        return t not in qs
    if g.kind == "cx":
        gc, gt = qs
        return (gc == c and gt != t) or (gt == t and gc != c)
    return False


@dataclass
class _Slot:
    gate: Gate
    alive: bool = True


def _cancel_pass(gates: list[Gate]) -> tuple[list[Gate], bool]:
    slots: list[_Slot] = []
    per_qubit: dict[int, list[int]] = {}
    changed = False

    def alive_on(q: int) -> list[int]:
        lst = per_qubit.get(q, [])
        while lst and not slots[lst[-1]].alive:
            lst.pop()
        return lst

    for g in gates:
        if g.kind in ("rz", "cp") and abs(g.angle) <= ZERO_ANGLE:
            changed = True
            continue
        if g.kind in ("h", "s", "sdg"):
            lst = alive_on(g.qubits[0])
            if lst and (slots[lst[-1]].gate.kind, g.kind) in _INVERSE_1Q:
                slots[lst[-1]].alive = False
                lst.pop()
                changed = True
                continue
        if g.kind == "cx":
            c, t = g.qubits
            hit = _find_partner(slots, per_qubit, g, c, t)
            if hit is not None:
                slots[hit].alive = False
                changed = True
                continue
        idx = len(slots)
        slots.append(_Slot(g))
        for q in g.qubits:
            per_qubit.setdefault(q, []).append(idx)
    return [s.gate for s in slots if s.alive], changed


def _find_partner(slots, per_qubit, g: Gate, c: int, t: int) -> int | None:
    """Walk back over live gates on ``c`` or ``t`` looking for an identical CNOT."""
    lc = per_qubit.get(c, [])
    lt = per_qubit.get(t, [])
    i, j = len(lc) - 1, len(lt) - 1
    while i >= 0 or j >= 0:
        a = lc[i] if i >= 0 else -1
        b = lt[j] if j >= 0 else -1
        idx = max(a, b)
        if a == idx:
            i -= 1
        if b == idx:
            j -= 1
        slot = slots[idx]
        if not slot.alive:
            continue
        if slot.gate == g:
            return idx
        if not _commutes_with_cx(slot.gate, c, t):
            return None
    return None


def peephole_cancel(circuit: Circuit) -> Circuit:
    """Delete CNOT pairs that meet through commuting gates, zero rotations and adjacent inverse pairs."""
    gates = list(circuit.gates)
    changed = True
    while changed:
        gates, changed = _cancel_pass(gates)
    return Circuit(dict(circuit.partition), gates, circuit.global_phase)

