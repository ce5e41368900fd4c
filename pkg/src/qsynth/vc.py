"""Auxiliary-fermion (Verstraete-Cirac) encoding with L-independent term weights.

Each site gets one auxiliary complex mode per transverse axis (one in 2D,
two in 3D), placed right after the site's matter modes. A link along axis
``k >= 2`` joining sites ``n < n'`` in snake order is dressed by
``S = i rho_n chi_n'``, where ``rho``/``chi`` are the odd/even Majoranas of
the axis-``k`` auxiliary mode. The JW strings of the matter bilinear and of
``S`` overlap on every site strictly between the two blocks and cancel there.
Physical states satisfy ``S = +1`` for every link.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jw import (CompiledHamiltonian, JwMapping, _stable_merge, compile_model, group_hopping_terms,
                 hermitian_part, hopping_polynomial, majorana_string, model_kinetic, model_meta,
                 potential_sum)
from .lattice import FermionLayout, HamiltonianModel, Link
from .oracle import apply_pauli_string, check_size
from .pauli import PauliPolynomial, PauliString, PauliSum, canonicalize, mul


class VcConfigError(ValueError):
    """The model cannot be encoded with auxiliary fermions as requested."""


@dataclass(frozen=True)
class VcAugmentation:
    base: FermionLayout
    layout: FermionLayout
    mapping: JwMapping
    paired_links: dict[Link, PauliString] = field(default_factory=dict)

    @property
    def aux_per_site(self) -> int:
        return self.layout.aux_per_site

    def rho(self, site: int, axis: int) -> int:
        """Majorana index of ``rho`` for transverse ``axis`` (1 or 2, 0-based axis numbering)."""
        return 2 * self.layout.aux_mode(site, axis) - 1

    def chi(self, site: int, axis: int) -> int:
        return 2 * self.layout.aux_mode(site, axis)

    def dressing(self, link: Link) -> PauliString:
        n, m = link.lower, link.upper
        return i_product(majorana_string(self.rho(n, link.axis), self.mapping),
                         majorana_string(self.chi(m, link.axis), self.mapping))


@dataclass
class StabilizerSet:
    full_set: list[PauliString]
    local_generators: list[PauliString]
    gauge_fixing: list[PauliString] = field(default_factory=list)
    num_qubits: int = 0

    def all_constraints(self) -> list[PauliString]:
        return self.full_set + self.gauge_fixing


def i_product(a: PauliString, b: PauliString) -> PauliString:
    """``i a b`` for anticommuting Hermitian strings; the result is Hermitian."""
    p = mul(a, b)
    return PauliString(p.letters, p.power + 1)


def validate_geometry(model: HamiltonianModel) -> None:
    g = model.geometry
    if g.boundary != "open":
        raise VcConfigError("auxiliary-fermion encoding requires open boundary conditions")
    if g.ordering != "snake":
        raise VcConfigError("auxiliary-fermion encoding requires snake site ordering")
    if g.dims > 3:
        raise VcConfigError("auxiliary-fermion encoding supports d <= 3")


def augment(model: HamiltonianModel) -> VcAugmentation:
    validate_geometry(model)
    aux = model.geometry.dims - 1
    layout = model.layout.with_aux(aux)
    mapping = JwMapping(layout, model.boson.num_qubits)
    aug = VcAugmentation(model.layout, layout, mapping)
    for lk in model.geometry.links():
        if lk.axis >= 1:
            aug.paired_links[lk] = aug.dressing(lk)
    return aug


def _generators(aug: VcAugmentation) -> list[PauliString]:
    """Central link of each snake turn, then products of neighbouring links moving outward."""
    turns: dict[tuple[int, int], list[Link]] = {}
    for lk in aug.paired_links:
        turns.setdefault((lk.axis, lk.lower + lk.upper), []).append(lk)
    gens = []
    for key in sorted(turns):
        links = sorted(turns[key], key=lambda lk: -lk.lower)
        strings = [aug.paired_links[lk] for lk in links]
        gens.append(strings[0])
        for a, b in zip(strings, strings[1:]):
            gens.append(mul(a, b))
    return gens


def _gauge_fixing(aug: VcAugmentation, model: HamiltonianModel) -> list[PauliString]:
    used = set()
    for lk in aug.paired_links:
        used.add(aug.rho(lk.lower, lk.axis))
        used.add(aug.chi(lk.upper, lk.axis))
    free = sorted(k for n in model.geometry.sites() for axis in range(1, aug.aux_per_site + 1)
                  for k in (aug.rho(n, axis), aug.chi(n, axis)) if k not in used)
    return [i_product(majorana_string(a, aug.mapping), majorana_string(b, aug.mapping))
            for a, b in zip(free[::2], free[1::2])]


def vc_transform(model: HamiltonianModel) -> tuple[CompiledHamiltonian, StabilizerSet, VcAugmentation]:
    aug = augment(model)
    reg = model.boson
    groups = []
    pot = potential_sum(model)
    if len(pot):
        groups.append(("potential", pot))
    for label, entries in group_hopping_terms(model):
        sums = []
        for term, lk in entries:
            poly = hermitian_part(hopping_polynomial(term, aug.mapping, reg))
            if lk is not None and lk.axis >= 1:
                poly = poly * PauliPolynomial.from_string(aug.paired_links[lk])
            sums.append(poly.to_pauli_sum())
        s = _stable_merge(sums)
        if len(s):
            groups.append((label, s))
    partition = {"boson": reg.num_qubits, "fermion": aug.layout.matter_qubits,
                 "auxiliary": aug.layout.aux_qubits}
    n = sum(partition.values())
    stab = StabilizerSet(list(aug.paired_links.values()), _generators(aug),
                         _gauge_fixing(aug, model), n)
    h = CompiledHamiltonian(reg, partition, groups, model_kinetic(model), "vc",
                            model_meta(model, "vc"))
    return h, stab, aug


def penalty_hamiltonian(stab: StabilizerSet, strength: float = 1.0) -> PauliSum:
    if not strength > 0:
        raise ValueError("penalty strength must be positive")
    return canonicalize(PauliSum(tuple((-strength, s) for s in stab.local_generators)))


def physical_projector(stab: StabilizerSet, include_gauge: bool = True) -> np.ndarray:
    """Dense ``prod_k (I + S_k)/2``; gauge fixing pins the free auxiliary pairs."""
    n = stab.num_qubits
    check_size(n)
    proj = np.eye(1 << n, dtype=complex)
    for s in (stab.all_constraints() if include_gauge else stab.full_set):
        proj = (proj + apply_pauli_string(s, n, proj)) / 2
    return proj


def sector_basis(constraints: list[PauliString], n: int) -> np.ndarray:
    """Orthonormal basis of the joint +1 eigenspace of commuting Pauli strings.

    Projected basis states are either parallel (same orbit under the
    strings' bit flips) or orthogonal, so one column per orbit suffices.
    """
    check_size(n)
    dim = 1 << n
    cols = []
    covered = np.zeros(dim, dtype=bool)
    for j in range(dim):
        if covered[j]:
            continue
        v = np.zeros((dim, 1), dtype=complex)
        v[j, 0] = 1.0
        for s in constraints:
            v = (v + apply_pauli_string(s, n, v)) / 2
        support = np.abs(v[:, 0]) > 1e-12
        covered |= support
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            cols.append(v[:, 0] / norm)
    return np.array(cols).T if cols else np.zeros((dim, 0), dtype=complex)


def restricted_spectrum(h_matrix: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``H`` on the span of the orthonormal columns of ``basis``."""
    return np.linalg.eigvalsh(basis.conj().T @ (h_matrix @ basis))


@dataclass
class VcCheckResult:
    commute_symbolic: bool
    commute_dense: float
    spectrum_deviation: float
    penalty_ground_ok: bool
    projector_rank: int
    max_weight: int

    def passed(self, tol: float = 1e-10) -> bool:
        return (self.commute_symbolic and self.commute_dense <= 1e-12
                and self.spectrum_deviation <= tol and self.penalty_ground_ok)


def vc_check(model: HamiltonianModel, strength: float = 1.0) -> VcCheckResult:
    """Stabilizer commutation, restricted-spectrum equivalence and penalty ground space."""
    from .oracle import hamiltonian_matrix
    from .pauli import commutes

    h, stab, _ = vc_transform(model)
    n = h.num_qubits
    check_size(n)
    cons = stab.all_constraints()
    strings = [p for _, p in h.ordered_terms()]
    sym = all(commutes(s, p) for s in cons for p in strings)
    sym &= all(commutes(a, b) for a in cons for b in cons)
    hmat = hamiltonian_matrix(h)
    dense = 0.0
    for s in cons:
        sh = apply_pauli_string(s, n, hmat)
        # S H S^dag = S H S for Hermitian S; compare with H
        shs = apply_pauli_string(s, n, sh.conj().T).conj().T
        dense = max(dense, float(np.abs(shs - hmat).max()))
    basis = sector_basis(cons, n)
    ev = np.sort(restricted_spectrum(hmat, basis))
    ref = np.linalg.eigvalsh(hamiltonian_matrix(compile_model(model)))
    dev = float(np.abs(ev - ref).max()) if ev.shape == ref.shape else float("inf")
    # the penalty's minimum -g*N is reached exactly where every generator is +1;
    # that space must coincide with the joint +1 space of the full link set
    gen_proj = physical_projector(StabilizerSet(stab.local_generators, [], [], n), False)
    link_proj = physical_projector(stab, include_gauge=False)
    pen = penalty_hamiltonian(stab, strength)
    floor = -strength * len(stab.local_generators)
    pen_on = sum(c * apply_pauli_string(p, n, gen_proj) for c, p in pen.terms)
    ground_ok = (np.abs(gen_proj - link_proj).max() < 1e-12
                 and np.trace(link_proj).real > 0.5
                 and np.abs(pen_on - floor * gen_proj).max() < 1e-9)
    return VcCheckResult(sym, dense, dev, bool(ground_ok), basis.shape[1],
                         max(p.weight for p in strings) if strings else 0)
