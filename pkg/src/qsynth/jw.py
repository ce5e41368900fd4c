"""Jordan-Wigner mapping and compilation of lattice models to Pauli sums.

Majorana ``k`` (1-based) lives on complex mode ``j = ceil(k/2)``:
``psi_{2j-1} = Z..Z X_j`` and ``psi_{2j} = Z..Z Y_j``. Complex modes are
``Psi_j = psi_{2j-1} + i psi_{2j}``, so ``{Psi_j, Psi_j^dag} = 4``. Fermion
qubits follow the boson register in the global index space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .boson import BosonRegister, expand_monomial, kinetic_operator, monomial_polynomial
from .lattice import FermionLayout, HamiltonianModel, HoppingTerm, Link
from .pauli import PauliPolynomial, PauliString, PauliSum, canonicalize

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class JwMapping:
    layout: FermionLayout
    qubit_offset: int = 0

    @property
    def num_qubits(self) -> int:
        return self.layout.num_modes

    def mode_qubit(self, j: int) -> int:
        """Global qubit of complex mode ``j`` (1-based)."""
        if not 1 <= j <= self.layout.num_modes:
            raise IndexError(f"complex mode {j} outside 1..{self.layout.num_modes}")
        return self.qubit_offset + j - 1


def majorana_string(k: int, mapping: JwMapping) -> PauliString:
    if not 1 <= k <= mapping.layout.num_majoranas:
        raise IndexError(f"Majorana index {k} outside 1..{mapping.layout.num_majoranas}")
    j = (k + 1) // 2
    q = mapping.mode_qubit(j)
    letters = [(p, "Z") for p in range(mapping.qubit_offset, q)]
    letters.append((q, "X" if k % 2 else "Y"))
    return PauliString(tuple(letters))


def majorana_polynomial(k: int, mapping: JwMapping) -> PauliPolynomial:
    return PauliPolynomial.from_string(majorana_string(k, mapping))


def complex_mode(j: int, mapping: JwMapping) -> tuple[PauliPolynomial, PauliPolynomial]:
    """``(Psi_j, Psi_j^dag)`` as two-term polynomials."""
    odd = majorana_polynomial(2 * j - 1, mapping)
    even = majorana_polynomial(2 * j, mapping)
    return odd + even * 1j, odd + even * (-1j)


def _mode_operator(site: int, a: int, dagger: bool, mapping: JwMapping) -> PauliPolynomial:
    ann, cre = complex_mode(mapping.layout.complex_mode(site, a), mapping)
    return cre if dagger else ann


def hopping_polynomial(term: HoppingTerm, mapping: JwMapping, reg: BosonRegister) -> PauliPolynomial:
    """The term itself (without conjugate) as a complex polynomial."""
    first = _mode_operator(term.n, term.a, term.dagger[0], mapping)
    second = _mode_operator(term.nprime, term.b, term.dagger[1], mapping)
    poly = first * second * complex(term.coeff)
    if term.boson_monomial:
        poly = poly * monomial_polynomial(term.boson_monomial, reg)
    return poly.pruned()


def hermitian_part(poly: PauliPolynomial) -> PauliPolynomial:
    """``T`` if ``T`` is self-adjoint, else ``T + T^dag``."""
    adj = poly.adjoint()
    diff = poly + adj * -1
    if diff.is_zero(_HERMITIAN_TOL):
        return poly
    return (poly + adj).pruned()


def compile_hopping(term: HoppingTerm, mapping: JwMapping, reg: BosonRegister) -> PauliSum:
    return hermitian_part(hopping_polynomial(term, mapping, reg)).to_pauli_sum()


def _stable_merge(sums: list[PauliSum]) -> PauliSum:
    """Concatenate, merging repeated strings at their first occurrence."""
    order: list[tuple] = []
    acc: dict[tuple, float] = {}
    for s in sums:
        for c, p in canonicalize(s).terms:
            if p.letters not in acc:
                order.append(p.letters)
                acc[p.letters] = 0.0
            acc[p.letters] += c
    return PauliSum(tuple((acc[k], PauliString(k)) for k in order if abs(acc[k]) >= 1e-14))


@dataclass
class CompiledHamiltonian:
    """A compiled model ready for synthesis.

    ``groups`` holds coordinate-basis terms in Trotter order; ``kinetic``
    is diagonal in the momentum basis of every boson.
    """

    boson: BosonRegister
    partition: dict[str, int]
    groups: list[tuple[str, PauliSum]] = field(default_factory=list)
    kinetic: PauliSum = field(default_factory=PauliSum)
    encoding: str = "jw"
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def num_qubits(self) -> int:
        return sum(self.partition.values())

    @property
    def potential(self) -> PauliSum:
        """All coordinate-basis terms as one canonical sum."""
        total = PauliSum()
        for _, s in self.groups:
            total = total + s
        return canonicalize(total)

    def ordered_terms(self) -> list[tuple[float, PauliString]]:
        return [t for _, s in self.groups for t in s.terms]

    def group(self, label: str) -> PauliSum:
        for name, s in self.groups:
            if name == label:
                return s
        return PauliSum()

    @property
    def term_count(self) -> int:
        return len(self.potential) + len(self.kinetic)

    @classmethod
    def from_pauli_sum(cls, s: PauliSum, num_qubits: int | None = None,
                       kinetic: PauliSum | None = None,
                       boson: BosonRegister | None = None) -> "CompiledHamiltonian":
        """Wrap a bare sum; qubits not claimed by ``boson`` count as fermionic."""
        boson = boson or BosonRegister(0, 1, 1.0)
        kinetic = canonicalize(kinetic) if kinetic is not None else PauliSum()
        n = max(s.num_qubits, kinetic.num_qubits, boson.num_qubits,
                num_qubits if num_qubits is not None else 0)
        partition = {"boson": boson.num_qubits, "fermion": n - boson.num_qubits}
        return cls(boson, partition, [("terms", canonicalize(s))], kinetic, "raw")


def link_label(link: Link) -> str:
    return f"axis{link.axis + 1}-{'wrap' if link.wrap else 'interior'}"


def link_lookup(model: HamiltonianModel) -> dict[frozenset, Link]:
    return {frozenset((lk.a, lk.b)): lk for lk in model.geometry.links()}


def group_hopping_terms(model: HamiltonianModel):
    """On-site terms, then link classes in axis order (interior before wrap), lower site ascending.

    Yields ``(label, [(term, link_or_None), ...])``.
    """
    links = link_lookup(model)
    onsite = []
    buckets: dict[tuple[int, bool], list] = {}
    for i, t in enumerate(model.hopping_terms):
        if t.n == t.nprime:
            onsite.append((t, None))
            continue
        lk = links[frozenset((t.n, t.nprime))]
        buckets.setdefault((lk.axis, lk.wrap), []).append((lk.lower, lk.upper, i, t, lk))
    out = []
    if onsite:
        out.append(("onsite", onsite))
    for key in sorted(buckets):
        entries = sorted(buckets[key], key=lambda e: e[:3])
        out.append((link_label(entries[0][4]), [(e[3], e[4]) for e in entries]))
    return out


def potential_sum(model: HamiltonianModel) -> PauliSum:
    return _stable_merge([expand_monomial(t.coeff, t.bosons, model.boson)
                          for t in model.potential_terms])


def model_kinetic(model: HamiltonianModel) -> PauliSum:
    if model.kinetic and model.boson.num_bosons:
        return kinetic_operator(model.boson)
    return PauliSum()


def compile_model(model: HamiltonianModel) -> CompiledHamiltonian:
    """Plain Jordan-Wigner compilation under the model's own site ordering."""
    reg = model.boson
    mapping = JwMapping(model.layout, reg.num_qubits)
    groups = []
    pot = potential_sum(model)
    if len(pot):
        groups.append(("potential", pot))
    for label, entries in group_hopping_terms(model):
        s = _stable_merge([compile_hopping(t, mapping, reg) for t, _ in entries])
        if len(s):
            groups.append((label, s))
    partition = {"boson": reg.num_qubits, "fermion": model.layout.num_modes}
    return CompiledHamiltonian(reg, partition, groups, model_kinetic(model), "jw",
                               model_meta(model, "jw"))


def model_meta(model: HamiltonianModel, encoding: str) -> dict[str, Any]:
    reg = model.boson
    g = model.geometry
    return {"model": model.name, "model_hash": model.content_hash(), "encoding": encoding,
            "d": g.dims, "L": g.extent, "Q": reg.qubits_per_boson if reg.num_bosons else 0,
            "ordering": g.ordering, "boundary": g.boundary}
