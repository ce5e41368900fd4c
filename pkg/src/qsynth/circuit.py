"""Gate-list circuit IR and its text serialization.

Conventions: ``rz(theta) = exp(-i theta Z / 2)``; ``cp(theta)`` multiplies
``|11>`` by ``exp(i theta)``; ``cx c t`` flips ``t`` when ``c`` is 1. Gate
order is execution order. A circuit also carries an exact global phase so
that synthesized unitaries match their targets without a phase ambiguity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

GATE_ARITY = {"cx": 2, "h": 1, "s": 1, "sdg": 1, "rz": 1, "cp": 2, "swap": 2}
PARAMETRIC = {"rz", "cp"}
PARTITION_NAMES = ("boson", "fermion", "auxiliary", "ancilla")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {GATE_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} on repeated qubit {self.qubits}")
        if (self.angle is None) == (self.kind in PARAMETRIC):
            raise ValueError(f"angle mismatch for {self.kind}")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    def to_text(self) -> str:
        if self.kind == "rz":
            return f"rz {_fmt(self.angle)} {self.qubits[0]}"
        if self.kind == "cp":
            return f"cp {_fmt(self.angle)} {self.qubits[0]} {self.qubits[1]}"
        return " ".join([self.kind, *map(str, self.qubits)])

    def inverse(self) -> "Gate":
        if self.kind == "s":
            return Gate("sdg", self.qubits)
        if self.kind == "sdg":
            return Gate("s", self.qubits)
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.qubits, -self.angle)
        return self


def CX(c: int, t: int) -> Gate:
    return Gate("cx", (c, t))


def H(q: int) -> Gate:
    return Gate("h", (q,))


def S(q: int) -> Gate:
    return Gate("s", (q,))


def Sdg(q: int) -> Gate:
    return Gate("sdg", (q,))


def RZ(q: int, theta: float) -> Gate:
    return Gate("rz", (q,), theta)


def CP(a: int, b: int, theta: float) -> Gate:
    return Gate("cp", (a, b), theta)


def SWAP(a: int, b: int) -> Gate:
    return Gate("swap", (a, b))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class Circuit:
    """Ordered gate list over a partitioned register."""

    partition: dict[str, int] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)
    global_phase: float = 0.0

    def __post_init__(self):
        part = {name: int(self.partition.get(name, 0)) for name in PARTITION_NAMES}
        unknown = set(self.partition) - set(PARTITION_NAMES)
        if unknown:
            raise ValueError(f"unknown register partitions {sorted(unknown)}")
        self.partition = part
        for g in self.gates:
            self._check(g)

    @classmethod
    def empty(cls, num_qubits: int, **partition) -> "Circuit":
        if not partition:
            partition = {"fermion": num_qubits}
        c = cls(partition)
        if c.num_qubits != num_qubits:
            raise ValueError("partition sizes do not add up to num_qubits")
        return c

    @property
    def num_qubits(self) -> int:
        return sum(self.partition.values())

    def _check(self, g: Gate) -> None:
        n = self.num_qubits
        if any(q >= n for q in g.qubits):
            raise ValueError(f"gate {g.to_text()} outside {n}-qubit register")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def compose(self, other: "Circuit") -> "Circuit":
        """``other`` executed after ``self``."""
        if other.num_qubits != self.num_qubits:
            raise ValueError("register size mismatch")
        return Circuit(dict(self.partition), self.gates + other.gates,
                       self.global_phase + other.global_phase)

    def inverse(self) -> "Circuit":
        return Circuit(dict(self.partition), [g.inverse() for g in reversed(self.gates)],
                       -self.global_phase)

    def copy(self) -> "Circuit":
        return Circuit(dict(self.partition), list(self.gates), self.global_phase)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def to_text(self) -> str:
        head = " ".join(f"{k}={self.partition[k]}" for k in PARTITION_NAMES)
        lines = [f"qubits {self.num_qubits}",
                 f"# {head} global_phase={_fmt(self.global_phase)}"]
        lines += [g.to_text() for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("qubits "):
            raise ValueError("circuit text must start with 'qubits <N>'")
        n = int(lines[0].split()[1])
        partition = {"fermion": n}
        phase = 0.0
        body = lines[1:]
        if body and body[0].startswith("#"):
            fields = dict(tok.split("=", 1) for tok in body[0][1:].split() if "=" in tok)
            phase = float(fields.pop("global_phase", 0.0))
            partition = {k: int(v) for k, v in fields.items()}
            body = body[1:]
        circ = cls(partition, [], phase)
        if circ.num_qubits != n:
            raise ValueError(f"partition sums to {circ.num_qubits}, header says {n}")
        for ln in body:
            if ln.startswith("#"):
                continue
            tok = ln.split()
            kind = tok[0]
            if kind not in GATE_ARITY:
                raise ValueError(f"unknown gate line {ln!r}")
            if kind in PARAMETRIC:
                circ.append(Gate(kind, tuple(int(t) for t in tok[2:]), float(tok[1])))
            else:
                circ.append(Gate(kind, tuple(int(t) for t in tok[1:])))
        return circ


def depth(circuit: Circuit | Iterable[Gate]) -> int:
    """ASAP layer count: a gate lands one layer after the latest gate on its qubits."""
    level: dict[int, int] = {}
    d = 0
    for g in circuit:
        layer = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            level[q] = layer
        d = max(d, layer)
    return d

