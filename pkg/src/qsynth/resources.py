"""Gate tallies, T estimates, log-log scaling fits and per-site QCD accounting."""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .boson import BosonRegister, centered_qft_circuit, kinetic_operator
from .circuit import Circuit, depth
from .jw import compile_model
from .lattice import HamiltonianModel, qcd_layout
from .synthesis import emit_rotations, trotter_step
from .vc import vc_transform

T_FACTOR_DEFAULT = 25.0
T_FACTOR_RANGE = (10.0, 50.0)
COUNTED = {"cx": "cnot", "h": "h", "s": "s", "sdg": "sdg", "rz": "rz", "cp": "cphase", "swap": "swap"}


def clamp_t_factor(t_factor: float) -> float:
    lo, hi = T_FACTOR_RANGE
    if not lo <= t_factor <= hi:
        clamped = min(max(t_factor, lo), hi)
        warnings.warn(f"t_factor {t_factor} outside [{lo:g}, {hi:g}]; using {clamped:g}", stacklevel=3)
        return clamped
    return float(t_factor)


@dataclass
class ResourceReport:
    cnot: int = 0
    h: int = 0
    s: int = 0
    sdg: int = 0
    rz: int = 0
    cphase: int = 0
    swap: int = 0
    rotations: int = 0
    depth: int | None = 0
    t_estimate: float = 0.0
    meta: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(", ", ": "))

    @classmethod
    def from_json(cls, line: str) -> "ResourceReport":
        return cls(**json.loads(line))


def count(circuit: Circuit, meta: dict[str, Any] | None = None,
          t_factor: float = T_FACTOR_DEFAULT) -> ResourceReport:
    tally = {name: 0 for name in COUNTED.values()}
    for g in circuit.gates:
        tally[COUNTED[g.kind]] += 1
    rotations = tally["rz"] + tally["cphase"]
    tf = clamp_t_factor(t_factor)
    return ResourceReport(**tally, rotations=rotations, depth=depth(circuit),
                          t_estimate=rotations * tf, meta=dict(meta or {}, t_factor=tf))


def write_jsonl(reports: Sequence[ResourceReport], path) -> None:
    with open(path, "w") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")


def read_jsonl(path) -> list[ResourceReport]:
    with open(path) as fh:
        return [ResourceReport.from_json(ln) for ln in fh if ln.strip()]


def fit_exponent(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if len(xs) < 3 or len(set(xs.tolist())) < 3:
        raise ValueError("scaling fit needs at least three distinct sizes")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("scaling fit needs positive sizes and counts")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class ScalingResult:
    exponent: float
    sizes: list[int]
    reports: list[ResourceReport]

    @property
    def cnots(self) -> list[int]:
        return [r.cnot for r in self.reports]


def compile_for(model: HamiltonianModel, encoding: str = "jw"):
    if encoding == "jw":
        return compile_model(model)
    if encoding == "vc":
        return vc_transform(model)[0]
    raise ValueError(f"unknown encoding {encoding!r}")


def scaling_fit(template: Callable[[int], HamiltonianModel], sizes: Sequence[int],
                policy: str = "fused", epsilon: float = 0.1, encoding: str = "jw",
                t_factor: float = T_FACTOR_DEFAULT) -> ScalingResult:
    """Synthesize one Trotter step per lattice size and fit the CNOT exponent."""
    sizes = list(sizes)
    if len(set(sizes)) < 3:
        raise ValueError("scaling fit needs at least three distinct sizes")
    reports = []
    for L in sizes:
        h = compile_for(template(L), encoding)
        meta = dict(h.meta, policy=policy, epsilon=epsilon)
        reports.append(count(trotter_step(h, epsilon, policy), meta, t_factor))
    return ScalingResult(fit_exponent(sizes, [r.cnot for r in reports]), sizes, reports)


def _per_unit(circuit: Circuit, units: int) -> dict[str, float]:
    r = count(circuit)
    return {k: getattr(r, k) / units for k in ("cnot", "h", "s", "sdg", "rz", "cphase", "swap")}


def unit_cell_constants(N_c: int, N_f: int, d: int, Q: int, policy: str = "fused",
                        epsilon: float = 0.1) -> dict[str, dict[str, float]]:
    """Per-link and per-boson gate counts from a small open snake lattice.

    Under the auxiliary-fermion encoding every hopping term has an
    L-independent weight, so these constants fix the leading ``L**d`` term.
    """
    cell = qcd_layout(N_c, N_f, d, L=2, Q=Q, boundary="open", ordering="snake")
    h = vc_transform(cell)[0]
    hop = Circuit(dict(h.partition))
    terms = [t for label, s in h.groups if label.startswith("axis") for t in s.terms]
    emit_rotations(hop, terms, epsilon, policy)
    links = len(cell.geometry.links())
    reg = BosonRegister(1, Q, 1.0)
    bos = centered_qft_circuit(reg)
    emit_rotations(bos, kinetic_operator(reg).terms, epsilon, policy)
    bos = bos.compose(centered_qft_circuit(reg, inverse=True))
    return {"link": _per_unit(hop, links), "boson": _per_unit(bos, 1)}


def qcd_estimate(N_c: int, N_f: int, d: int = 3, L: int = 4, Q: int = 1,
                 t_factor: float = T_FACTOR_DEFAULT, encoding: str = "vc",
                 policy: str = "fused", constants: dict | None = None) -> ResourceReport:
    """Formula-level per-Trotter-step counts for the QCD fermion layout."""
    for name, v in (("N_c", N_c), ("N_f", N_f), ("d", d), ("L", L), ("Q", Q)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1")
    if encoding not in ("jw", "vc"):
        raise ValueError(f"unknown encoding {encoding!r}")
    consts = constants or unit_cell_constants(N_c, N_f, d, Q, policy)
    sites = L ** d
    links = d * sites
    bosons = d * sites
    totals = {k: round(consts["link"][k] * links + consts["boson"][k] * bosons)
              for k in consts["link"]}
    rotations = totals["rz"] + totals["cphase"]
    tf = clamp_t_factor(t_factor)
    aux = d - 1 if encoding == "vc" else 0
    meta = {
        "N_c": N_c, "N_f": N_f, "d": d, "L": L, "Q": Q, "encoding": encoding, "policy": policy,
        "real_modes_per_site": 8 * N_c * N_f,
        "fermion_qubits_per_site": 4 * N_c * N_f,
        "aux_qubits_per_site": aux,
        "boson_qubits_per_site": d * Q,
        "total_qubits": sites * (4 * N_c * N_f + aux + d * Q),
        "links": links,
        "cnot_per_link": consts["link"]["cnot"],
        "cnot_per_boson": consts["boson"]["cnot"],
        "leading_order": f"L^{d}",
        "t_factor": tf,
    }
    if encoding == "jw":
        meta["jw_cnot_exponent"] = 2 * d - 1
    return ResourceReport(cnot=totals["cnot"], h=totals["h"], s=totals["s"], sdg=totals["sdg"],
                          rz=totals["rz"], cphase=totals["cphase"], swap=totals["swap"],
                          rotations=rotations, depth=None, t_estimate=rotations * tf, meta=meta)
