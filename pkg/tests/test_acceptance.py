"""Exit criteria, one test group per numbered criterion.

A pass/fail line per criterion is printed in the terminal summary (see conftest).
"""
import hashlib
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from qsynth.block_encoding import assemble, normalize_lcu, verify_block
from qsynth.boson import (BosonRegister, centered_qft_circuit, expand_monomial, kinetic_operator,
                          position_operator)
from qsynth.circuit import depth
from qsynth.jw import CompiledHamiltonian, JwMapping, compile_model, majorana_string
from qsynth.lattice import FermionLayout, LatticeGeometry, harmonic_chain, hopping_toy
from qsynth.oracle import (boson_fourier_matrix, centered_dft, circuit_matrix, expm_hermitian,
                           hamiltonian_matrix, is_unitary, pauli_string_matrix, pauli_sum_matrix,
                           trotter_error)
from qsynth.pauli import PauliString, PauliSum
from qsynth.resources import qcd_estimate, scaling_fit
from qsynth.synthesis import STRATEGIES, parity_ladder, pauli_rotation, trotter_step
from qsynth.vc import vc_check, vc_transform

from conftest import random_string

C1 = pytest.mark.acceptance(1, "Pauli-rotation soundness, 500 strings x 3 strategies, 1e-10")
C2 = pytest.mark.acceptance(2, "log-depth ladder: 7 CNOTs at depth 3; depth <= 2*ceil(log2 K)+3")
C3 = pytest.mark.acceptance(3, "fused == naive to 1e-10; d=2 slopes fused [1.7,2.3], naive [2.6,3.4]")
C4 = pytest.mark.acceptance(4, "Majorana anticommutation on 6 complex modes, 1e-12")
C5 = pytest.mark.acceptance(5, "auxiliary-fermion equivalence, commutation and constant weight")
C6 = pytest.mark.acceptance(6, "block encoding <= 1e-10, select unitary to 1e-12")
C7 = pytest.mark.acceptance(7, "boson grid, centered QFT 1e-12, oscillator ground 0.5 +- 1e-2")
C8 = pytest.mark.acceptance(8, "Trotter order E(0.2)/E(0.1) in [3.2, 4.8]")
C9 = pytest.mark.acceptance(9, "QCD accounting: 48 real modes/site, L^3 ratio 8x +- 1%")
C10 = pytest.mark.acceptance(10, "byte-identical circuit files and reports across runs")


# -- 1 ------------------------------------------------------------------------

@C1
@pytest.mark.parametrize("strategy", STRATEGIES)
def test_rotation_soundness(strategy):
    rng = np.random.default_rng(1)
    n = 6
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        p = random_string(rng, n, max_weight=6)
        theta = float(rng.uniform(-math.pi, math.pi))
        u = circuit_matrix(pauli_rotation(p, theta, strategy, num_qubits=n))
        ref = expm_hermitian(pauli_string_matrix(p, n), theta)
        worst = max(worst, np.linalg.norm(u - ref, 2))
    assert worst <= 1e-10
    assert time.perf_counter() - start <= 120 / 3


# -- 2 ------------------------------------------------------------------------

@C2
def test_weight_eight_tree():
    gates, _ = parity_ladder(range(8), "balanced_tree")
    assert len(gates) == 7
    assert depth(gates) == 3


@C2
@pytest.mark.parametrize("K", [4, 8, 16])
@pytest.mark.parametrize("letter", ["Z", "X"])
def test_tree_rotation_depth(K, letter):
    p = PauliString(tuple((q, letter) for q in range(K)))
    c = pauli_rotation(p, 0.3, "balanced_tree")
    assert depth(c) <= 2 * math.ceil(math.log2(K)) + 3
    if K <= 8:
        ref = expm_hermitian(pauli_string_matrix(p, K), 0.3)
        assert np.abs(circuit_matrix(c) - ref).max() <= 1e-10


# -- 3 ------------------------------------------------------------------------

FUSION_MATRIX = [
    dict(d=1, L=3, Q=0, boundary="open", mass=0.0),
    dict(d=1, L=4, Q=0, boundary="periodic"),
    dict(d=1, L=3, Q=1, boundary="periodic"),
    dict(d=1, L=4, Q=2, boundary="open"),
    dict(d=1, L=2, Q=1, boundary="open", modes=2),
    dict(d=2, L=2, Q=0, boundary="open"),
    dict(d=2, L=2, Q=1, boundary="open"),
    dict(d=2, L=2, Q=1, boundary="open", ordering="snake"),
    dict(d=2, L=3, Q=0, boundary="open"),
    dict(d=2, L=3, Q=0, boundary="periodic"),
]


@C3
@pytest.mark.parametrize("params", FUSION_MATRIX, ids=lambda p: "-".join(f"{k}{v}" for k, v in p.items()))
@pytest.mark.parametrize("strategy", ["pivot_ladder", "balanced_tree"])
def test_fused_equals_naive(params, strategy):
    h = compile_model(hopping_toy(**params))
    assert h.num_qubits <= 12
    fused = trotter_step(h, 0.1, "fused", strategy)
    naive = trotter_step(h, 0.1, "naive", strategy)
    assert fused.count("cx") <= naive.count("cx")
    assert np.abs(circuit_matrix(fused) - circuit_matrix(naive)).max() <= 1e-10


@C3
@pytest.mark.parametrize("policy, lo, hi", [("fused", 1.7, 2.3), ("naive", 2.6, 3.4)])
def test_two_dimensional_slopes(policy, lo, hi):
    start = time.perf_counter()
    res = scaling_fit(lambda L: hopping_toy(d=2, L=L, Q=1, boundary="periodic"), [3, 4, 5, 6], policy)
    print(f"d=2 {policy}: slope {res.exponent:.3f}, CNOTs {res.cnots}")
    assert lo <= res.exponent <= hi
    assert time.perf_counter() - start <= 300


# -- 4 ------------------------------------------------------------------------

@C4
def test_majorana_anticommutation():
    g = LatticeGeometry(1, 6, "open")
    m = JwMapping(FermionLayout(1, g))
    mats = [pauli_string_matrix(majorana_string(k, m), 6) for k in range(1, 13)]
    eye = np.eye(64)
    worst = 0.0
    for a in range(12):
        for b in range(12):
            anti = mats[a] @ mats[b] + mats[b] @ mats[a]
            worst = max(worst, np.abs(anti - 2 * (a == b) * eye).max())
    assert worst <= 1e-12


# -- 5 ------------------------------------------------------------------------

@C5
@pytest.mark.parametrize("Q", [0, 1])
def test_vc_equivalence(Q):
    res = vc_check(hopping_toy(d=2, L=2, Q=Q, boundary="open", ordering="snake"))
    print(f"Q={Q}: spectrum deviation {res.spectrum_deviation:.2e}, dense {res.commute_dense:.1e}")
    assert res.commute_symbolic
    assert res.commute_dense <= 1e-12
    assert res.spectrum_deviation <= 1e-10
    assert res.penalty_ground_ok


@C5
def test_vc_weight_constant_in_extent():
    weights = []
    for L in (2, 3, 4):
        h = vc_transform(hopping_toy(d=2, L=L, Q=1, boundary="open", ordering="snake"))[0]
        weights.append(max(p.weight for _, p in h.ordered_terms()))
    assert len(set(weights)) == 1


# -- 6 ------------------------------------------------------------------------

def _check_block(h):
    be = assemble(normalize_lcu(h))
    assert verify_block(be) <= 1e-10
    assert is_unitary(circuit_matrix(be.select), 1e-12)


@C6
def test_block_single_term():
    _check_block(CompiledHamiltonian.from_pauli_sum(PauliSum.from_labels([(-0.7, "Y0 Z1")])))


@C6
def test_block_two_term():
    h = CompiledHamiltonian.from_pauli_sum(PauliSum.from_labels([(0.5, "Z0"), (0.5, "Z0 Z1")]))
    be = assemble(normalize_lcu(h))
    assert np.allclose(be.prepare, [2 ** -0.5, 2 ** -0.5])
    _check_block(h)


@C6
def test_block_bosonic():
    _check_block(compile_model(harmonic_chain(L=2, Q=2)))


@C6
def test_block_jw():
    _check_block(compile_model(hopping_toy(d=1, L=2, Q=1)))


@C6
def test_block_vc():
    _check_block(vc_transform(hopping_toy(d=2, L=2, Q=0, boundary="open", ordering="snake"))[0])


# -- 7 ------------------------------------------------------------------------

@C7
@pytest.mark.parametrize("Q, R", [(1, 1.0), (2, 2.0), (3, 4.0), (4, 0.5), (5, 8.0)])
def test_position_spectrum_equals_grid(Q, R):
    reg = BosonRegister(1, Q, R)
    diag = np.diag(pauli_sum_matrix(position_operator(0, reg), Q)).real
    assert sorted(diag.tolist()) == reg.coordinate_grid()


@C7
@pytest.mark.parametrize("Q", [1, 2, 3, 4])
def test_centered_qft_matches_dft(Q):
    reg = BosonRegister(1, Q, 1.3)
    u = circuit_matrix(centered_qft_circuit(reg))
    f = centered_dft(Q, reg.dx, reg.dp)
    rev = [int(format(i, f"0{Q}b")[::-1], 2) for i in range(1 << Q)]
    assert np.abs(u - f[np.ix_(rev, rev)]).max() <= 1e-12
    two = BosonRegister(2, Q, 1.3) if Q <= 3 else None
    if two is not None:
        assert np.abs(circuit_matrix(centered_qft_circuit(two)) - boson_fourier_matrix(two, 2 * Q)).max() <= 1e-12


@C7
def test_oscillator_ground_energy():
    reg = BosonRegister(1, 6, 5.0)
    h = CompiledHamiltonian.from_pauli_sum(expand_monomial(0.5, (0, 0), reg),
                                           kinetic=kinetic_operator(reg), boson=reg)
    e0 = np.linalg.eigvalsh(hamiltonian_matrix(h))[0]
    print(f"ground energy {e0:.10f}")
    assert abs(e0 - 0.5) <= 1e-2


# -- 8 ------------------------------------------------------------------------

@C8
def test_trotter_order():
    h = compile_model(hopping_toy(d=1, L=2, Q=1))
    ratio = trotter_error(h, 0.2) / trotter_error(h, 0.1)
    print(f"E(0.2)/E(0.1) = {ratio:.4f}")
    assert 3.2 <= ratio <= 4.8


# -- 9 ------------------------------------------------------------------------

@C9
def test_qcd_modes_per_site():
    r = qcd_estimate(3, 2)
    assert r.meta["real_modes_per_site"] == 48
    assert r.meta["fermion_qubits_per_site"] == 24


@C9
def test_qcd_cubic_leading_term():
    cnots = [qcd_estimate(3, 2, d=3, L=L).cnot for L in (4, 8, 16)]
    print(f"CNOTs at L=4,8,16: {cnots}")
    for a, b in zip(cnots, cnots[1:]):
        assert abs(b / a - 8.0) <= 0.08


# -- 10 -----------------------------------------------------------------------

def _cli(args, cwd, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    res = subprocess.run([sys.executable, "-m", "qsynth", *args], cwd=cwd, env=env,
                         capture_output=True)
    assert res.returncode == 0, res.stderr.decode()
    return res.stdout


@C10
def test_repeated_runs_are_byte_identical(tmp_path):
    digests = []
    for seed in (0, 12345):
        run_dir = tmp_path / f"run{seed}"
        run_dir.mkdir()
        outputs = [
            _cli(["synth", "--preset", "hopping_toy", "--param", "d=2", "--param", "L=3",
                  "--out", "step.qc"], run_dir, seed),
            _cli(["synth", "--preset", "hopping_toy", "--param", "d=2", "--param", "Q=0",
                  "--encoding", "vc", "--policy", "naive", "--strategy", "balanced_tree"], run_dir, seed),
            _cli(["count", "--preset", "hopping_toy", "--param", "d=2", "--param", "L=3",
                  "--policy", "fused", "naive", "--figure", "counts.png"], run_dir, seed),
            _cli(["scaling", "--d", "2", "--sizes", "3", "4", "5", "--out", "scaling.jsonl",
                  "--figure", "scaling.png"], run_dir, seed),
            _cli(["block-encode", "--preset", "hopping_toy", "--param", "L=2"], run_dir, seed),
        ]
        files = [(run_dir / name).read_bytes()
                 for name in ("step.qc", "counts.png", "scaling.jsonl", "scaling.png")]
        digests.append([hashlib.sha256(b).hexdigest() for b in outputs + files])
    assert digests[0] == digests[1]
