"""Command-line front end: ``qsynth <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .block_encoding import assemble, normalize_lcu, report, verify_block
from .circuit import Circuit
from .lattice import PRESETS, build_preset, hopping_toy, load_model, replace_geometry
from .oracle import OracleLimitError, check_size, circuit_matrix, trotter_error
from .resources import count, scaling_fit
from .synthesis import POLICIES, STRATEGIES, peephole_cancel, trotter_step
from .vc import VcConfigError, vc_check, vc_transform
from .jw import compile_model


class ConfigError(Exception):
    pass


def _params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _load(args):
    if getattr(args, "model", None):
        model = load_model(args.model)
    elif getattr(args, "preset", None):
        model = build_preset(args.preset, _params(args.param))
    else:
        raise ConfigError("give --model <file.json> or --preset <name>")
    ordering = getattr(args, "ordering", None)
    if args.encoding == "vc":
        if model.geometry.boundary != "open":
            raise ConfigError("vc encoding requires an open boundary; the model is periodic")
        if ordering not in (None, "snake"):
            raise ConfigError("vc encoding requires snake ordering")
        ordering = "snake"
    if ordering and ordering != model.geometry.ordering:
        model = replace_geometry(model, ordering=ordering)
    return model


def _compile(model, encoding):
    if encoding == "vc":
        return vc_transform(model)[0]
    return compile_model(model)


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _circuit_text(circ: Circuit, meta: dict) -> str:
    lines = circ.to_text().splitlines()
    tag = "# " + " ".join(f"{k}={meta[k]}" for k in sorted(meta))
    return "\n".join(lines[:2] + [tag] + lines[2:]) + "\n"


def _step(args):
    model = _load(args)
    h = _compile(model, args.encoding)
    circ = trotter_step(h, args.epsilon, args.policy, args.strategy)
    if args.peephole:
        circ = peephole_cancel(circ)
    meta = dict(h.meta, policy=args.policy, strategy=args.strategy, epsilon=repr(args.epsilon),
                peephole=bool(args.peephole))
    return h, circ, meta


def cmd_synth(args) -> int:
    _, circ, meta = _step(args)
    _write(_circuit_text(circ, meta), args.out)
    return 0


def cmd_verify(args) -> int:
    model = _load(args)
    h = _compile(model, args.encoding)
    check_size(h.num_qubits)
    fused = circuit_matrix(trotter_step(h, args.epsilon, "fused", args.strategy))
    naive = circuit_matrix(trotter_step(h, args.epsilon, "naive", args.strategy))
    deviation = float(np.abs(fused - naive).max())
    accuracy = trotter_error(h, args.epsilon)
    print(f"construction_deviation={deviation:.3e} tol={args.tol:.1e}")
    print(f"trotter_error={accuracy:.6e} epsilon={args.epsilon!r}")
    ok = deviation <= args.tol
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_count(args) -> int:
    reports = []
    for policy in args.policies:
        args.policy = policy
        _, circ, meta = _step(args)
        reports.append(count(circ, meta, args.t_factor))
    _write("".join(r.to_json() + "\n" for r in reports), args.out)
    if args.figure:
        from .plotting import counts_figure
        counts_figure(reports, args.policies, args.figure)
    return 0


def cmd_scaling(args) -> int:
    base = _params(args.param)
    params = dict(base, d=args.d, Q=args.Q, boundary=args.boundary)
    if args.encoding == "vc":
        if args.boundary != "open":
            raise ConfigError("vc encoding requires an open boundary")
        params["ordering"] = "snake"
    if args.preset not in ("hopping_toy", "qcd_layout"):
        raise ConfigError("scaling supports the hopping_toy and qcd_layout presets")
    results = {}
    lines = []
    for policy in args.policies:
        res = scaling_fit(lambda L: build_preset(args.preset, dict(params, L=L)), args.sizes, policy,
                          args.epsilon, args.encoding, args.t_factor)
        results[policy] = res
        for r in res.reports:
            r.meta["fitted_exponent"] = round(res.exponent, 12)
            lines.append(r.to_json() + "\n")
    _write("".join(lines), args.out)
    for policy, res in results.items():
        print(f"# {policy}: exponent={res.exponent:.4f} cnots={res.cnots}", file=sys.stderr)
    if args.figure:
        from .plotting import scaling_figure
        scaling_figure(results, args.figure, f"d={args.d}, {args.encoding}")
    return 0


def cmd_block_encode(args) -> int:
    model = _load(args)
    h = _compile(model, args.encoding)
    lcu = normalize_lcu(h)
    check_size(h.num_qubits + lcu.ancilla_width)
    be = assemble(lcu)
    dev = verify_block(be)
    rep = report(be, dev)
    rep["model_hash"] = h.meta.get("model_hash")
    _write(json.dumps(rep, sort_keys=True) + "\n", args.out)
    return 0 if dev <= args.tol else 1


def cmd_vc_check(args) -> int:
    model = hopping_toy(d=args.d, L=args.L, Q=args.Q, boundary="open", ordering="snake",
                        modes=args.modes)
    res = vc_check(model, args.strength)
    print(f"stabilizers_commute={res.commute_symbolic} dense_commutator={res.commute_dense:.1e}")
    print(f"projector_rank={res.projector_rank} penalty_ground_space_ok={res.penalty_ground_ok}")
    print(f"spectrum_deviation={res.spectrum_deviation:.3e} max_term_weight={res.max_weight}")
    ok = res.passed(args.tol)
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_export(args) -> int:
    text = Path(args.input).read_text()
    circ = Circuit.from_text(text)
    again = circ.to_text()
    if Circuit.from_text(again).to_text() != again:
        print("round trip changed the circuit", file=sys.stderr)
        return 1
    _write(again, args.out)
    return 0


def _model_args(p, encoding=True):
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="build a preset model instead")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="preset parameter")
    if encoding:
        p.add_argument("--encoding", choices=("jw", "vc"), default="jw")
        p.add_argument("--ordering", choices=("row_major_lex", "snake"))


def _step_args(p):
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--strategy", choices=STRATEGIES, default="pivot_ladder")
    p.add_argument("--peephole", action="store_true", help="run the cancellation pass")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsynth", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--oracle-limit", type=int, help="dense oracle qubit cap")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write one Trotter step as a circuit file")
    _model_args(p)
    _step_args(p)
    p.add_argument("--policy", choices=POLICIES, default="fused")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="fused vs naive unitaries, plus the Trotter error")
    _model_args(p)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--strategy", choices=STRATEGIES, default="pivot_ladder")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="gate counts as JSON lines")
    _model_args(p)
    _step_args(p)
    p.add_argument("--policy", dest="policies", nargs="+", choices=POLICIES, default=["fused"])
    p.add_argument("--t-factor", type=float, default=25.0)
    p.add_argument("--out", default="-")
    p.add_argument("--figure", help="PNG bar chart of the counts")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("scaling", help="CNOT counts across lattice sizes with a log-log fit")
    p.add_argument("--preset", choices=("hopping_toy", "qcd_layout"), default="hopping_toy")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--Q", type=int, default=1)
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.add_argument("--encoding", choices=("jw", "vc"), default="jw")
    p.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 5, 6])
    p.add_argument("--policy", dest="policies", nargs="+", choices=POLICIES,
                   default=list(POLICIES))
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--t-factor", type=float, default=25.0)
    p.add_argument("--out", default="-")
    p.add_argument("--figure", help="PNG log-log plot")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("block-encode", help="assemble and verify the LCU block encoding")
    _model_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_block_encode)

    p = sub.add_parser("vc-check", help="stabilizer and spectrum checks of the auxiliary encoding")
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--Q", type=int, default=0)
    p.add_argument("--strength", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_vc_check)

    p = sub.add_parser("export", help="re-serialize a circuit file after a round-trip check")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.oracle_limit is not None:
        os.environ["QSYNTH_ORACLE_LIMIT"] = str(args.oracle_limit)
    if getattr(args, "tol", 1.0) <= 0:
        print("qsynth: error: tolerance must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, VcConfigError, OracleLimitError, ValueError, OSError,
            json.JSONDecodeError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"qsynth: error: {msg}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())

