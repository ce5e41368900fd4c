"""Circuit synthesis and dense verification for boson+fermion lattice Hamiltonians."""

__version__ = "0.1.0"

from .pauli import PauliString, PauliSum, canonicalize, commutes, mul
from .boson import (BosonRegister, centered_qft_circuit, expand_monomial, momentum_operator,
                    position_operator)
from .lattice import (FermionLayout, HamiltonianModel, HoppingTerm, LatticeGeometry, PotentialTerm,
                      build_preset, classify_links, load_model, site_coords, site_index)
from .jw import CompiledHamiltonian, JwMapping, compile_hopping, compile_model, complex_mode, majorana_string
from .vc import StabilizerSet, VcAugmentation, penalty_hamiltonian, physical_projector, vc_transform
from .circuit import Circuit, Gate, depth
from .synthesis import pauli_rotation, peephole_cancel, trotter_step
from .block_encoding import BlockEncoding, LcuForm, assemble, normalize_lcu, verify_block
from .resources import ResourceReport, count, qcd_estimate, scaling_fit
from .oracle import circuit_matrix, expm_hermitian, pauli_sum_matrix, trotter_error

__all__ = [name for name in dir() if not name.startswith("_")]
