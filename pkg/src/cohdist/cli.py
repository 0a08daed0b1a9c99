"""``cohdist`` command line.

Exit codes: 0 success, 1 usage or I/O/parse error, 2 validation failure.
Text output rounds to ``--precision`` significant digits; ``--json`` output
carries full double precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import fields

import numpy as np

from cohdist.distill import distill_mixed
from cohdist.errors import BlockNotPureWarning, CohDistError, DimMismatch, StateValidationError
from cohdist.io import StateFileError, encode_complex, read_state_file
from cohdist.oracle import OracleConfig, oracle_fmax
from cohdist.states import (
    DEFAULT_TOL,
    INCOHERENT,
    DensityMatrix,
    KrausSet,
    PureState,
    ToleranceConfig,
    apply_channel,
    apply_stochastic,
    fidelity_general,
    fidelity_pure_mixed,
    fidelity_pure_pure,
)
from cohdist.subspaces import comparison_matrix, pure_blocks

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2
ENV_TOL_UNIT_ENTRY = "COHDIST_TOL_UNIT_ENTRY"
ORACLE_AGREEMENT = 1e-3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _InvalidInput(Exception):
    def __init__(self, exc: Exception):
        self.exc = exc


def _common(defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so a flag
    # given before the subcommand is not overwritten
    def default(v):
        return v if defaults else argparse.SUPPRESS

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=default(False), help="emit a machine-readable report")
    p.add_argument("--precision", type=int, default=default(7), help="significant digits in text output")
    p.add_argument("--seed", type=int, default=default(0), help="seed for oracle runs")
    for f in fields(ToleranceConfig):
        p.add_argument(
            f"--tol-{f.name.replace('_', '-')}", type=float, default=default(None), dest=f"tol_{f.name}"
        )
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohdist", description=__doc__.splitlines()[0], parents=[_common(True)])
    common = _common(False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a state file")
    p.add_argument("path")

    p = sub.add_parser("subspaces", parents=[common], help="maximal pure coherent-state subspaces")
    p.add_argument("path")

    p = sub.add_parser("distill", parents=[common], help="maximal fidelity to a pure target")
    p.add_argument("initial")
    p.add_argument("target")
    p.add_argument("--f0", type=float, default=None, help="fidelity threshold")
    p.add_argument("--oracle", action="store_true", help="cross-check each block by brute force")

    p = sub.add_parser("apply", parents=[common], help="apply a Kraus channel")
    p.add_argument("state")
    p.add_argument("kraus")
    p.add_argument("--stochastic", action="store_true", help="allow a sub-normalized Kraus set")
    p.add_argument("--target", default=None, help="pure state to report the output fidelity against")

    p = sub.add_parser("fidelity", parents=[common], help="fidelity between two states")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def tolerances(args) -> ToleranceConfig:
    overrides = {f.name: getattr(args, f"tol_{f.name}", None) for f in fields(ToleranceConfig)}
    if overrides["unit_entry"] is None and os.environ.get(ENV_TOL_UNIT_ENTRY):
        overrides["unit_entry"] = float(os.environ[ENV_TOL_UNIT_ENTRY])
    return DEFAULT_TOL.replace(**overrides)


def _load(path, tol, allowed=None):
    sf = read_state_file(path)
    if allowed and sf.schema not in allowed:
        raise StateFileError(f"{path}: expected one of {sorted(allowed)}, got {sf.schema!r}")
    try:
        return sf.to_object(tol)
    except (StateValidationError, DimMismatch) as exc:
        raise _InvalidInput(exc) from None


def _as_density(obj) -> DensityMatrix:
    return obj.density() if isinstance(obj, PureState) else obj


class _Fmt:
    def __init__(self, precision: int):
        self.p = precision

    def num(self, x: float) -> str:
        return f"{x:.{self.p}g}"

    def cx(self, z: complex) -> str:
        if abs(z.imag) < 10.0 ** (-self.p - 3):
            return self.num(z.real)
        return f"{self.num(z.real)}{'+' if z.imag >= 0 else '-'}{self.num(abs(z.imag))}j"

    def vec(self, v) -> str:
        return "[" + ", ".join(self.cx(complex(z)) for z in v) + "]"

    def mat(self, m, indent="  ") -> str:
        m = np.asarray(m)
        cells = [[self.cx(complex(z)) if np.iscomplexobj(m) else self.num(float(z)) for z in row] for row in m]
        w = max(len(c) for row in cells for c in row)
        return "\n".join(indent + "  ".join(c.rjust(w) for c in row) for row in cells)


def cmd_validate(args, tol, fmt) -> tuple[dict, list[str], int]:
    sf = read_state_file(args.path)
    report = {"command": "validate", "schema": sf.schema, "valid": True, "violations": []}
    lines = []
    try:
        obj = sf.to_object(tol)
    except StateValidationError as exc:
        report["valid"] = False
        report["violations"] = [{"kind": v.kind, "magnitude": v.magnitude, "bound": v.bound} for v in exc.violations]
        lines.append(f"{args.path}: INVALID {sf.schema}")
        lines += [f"  {v}" for v in exc.violations]
        return report, lines, EXIT_INVALID
    if isinstance(obj, KrausSet):
        report["kraus"] = {
            "classifications": obj.classifications,
            "complete": obj.complete,
            "stochastic": obj.stochastic,
            "completeness_error": obj.completeness_error,
        }
        if not (obj.complete or obj.stochastic):
            report["valid"] = False
            report["violations"] = [{"kind": "NotStochastic", "magnitude": obj.completeness_error, "bound": tol.complete}]
    if report["valid"]:
        label = f" ({sf.label})" if sf.label else ""
        lines.append(f"{args.path}: valid {sf.schema}, dim {sf.dim}{label}")
    else:
        lines.append(f"{args.path}: INVALID {sf.schema}: sum K^dagger K exceeds the identity")
    return report, lines, EXIT_OK if report["valid"] else EXIT_INVALID


def _decomposition(rho, tol):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BlockNotPureWarning)
        dec = pure_blocks(rho, tol)
    return dec, [str(w.message) for w in caught if issubclass(w.category, BlockNotPureWarning)]


def cmd_subspaces(args, tol, fmt):
    rho = _as_density(_load(args.path, tol, {"density", "pure"}))
    cm = comparison_matrix(rho, tol)
    dec, msgs = _decomposition(rho, tol)
    blocks = [
        {"indices": list(b.indices), "probability": b.probability, "state": encode_complex(b.local_state.amplitudes)}
        for b in dec.blocks
    ]
    report = {
        "command": "subspaces",
        "comparison_matrix": cm.entries.tolist(),
        "support": list(cm.support),
        "blocks": blocks,
        "null_indices": list(dec.null_indices),
        "split": dec.split,
    }
    lines = [f"warning: {m}" for m in msgs]
    lines += ["comparison matrix:", fmt.mat(cm.entries), f"{len(dec.blocks)} maximal pure subspace(s):"]
    for mu, b in enumerate(dec.blocks):
        lines.append(f"  [{mu}] indices {list(b.indices)}  p = {fmt.num(b.probability)}  state {fmt.vec(b.local_state.amplitudes)}")
    if dec.null_indices:
        lines.append(f"  zero-population indices {list(dec.null_indices)}")
    return report, lines, EXIT_OK


def _staircase_doc(res) -> dict:
    return {
        "breakpoints": list(res.breakpoints),
        "ratios": list(res.ratios),
        "segment_masses": [list(m) for m in res.segment_masses],
        "f_max": res.f_max,
        "intermediate": encode_complex(res.intermediate.amplitudes),
        "canonical_intermediate": np.real(res.canonical_intermediate.amplitudes).tolist(),
        "target_order": list(res.target_order),
    }


def cmd_distill(args, tol, fmt):
    initial = _load(args.initial, tol, {"density", "pure"})
    target = _load(args.target, tol, {"pure"})
    rho = _as_density(initial)
    if rho.dim != target.dim:
        raise _InvalidInput(DimMismatch(f"initial dimension {rho.dim} != target dimension {target.dim}"))
    if args.f0 is not None and not 0.0 <= args.f0 <= 1.0:
        raise _InvalidInput(CohDistError(f"--f0 {args.f0} outside [0, 1]"))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BlockNotPureWarning)
        report_obj = distill_mixed(rho, target, tol)
    lines = [f"warning: {w.message}" for w in caught]
    cfg = OracleConfig(seed=args.seed)
    blocks = []
    for mu, ((p, res), blk) in enumerate(zip(report_obj.per_block, report_obj.decomposition.blocks)):
        entry = {"indices": list(blk.indices), "probability": p, "staircase": _staircase_doc(res)}
        lines.append(f"block [{mu}] indices {list(blk.indices)}  p = {fmt.num(p)}")
        lines.append("    j   s_j        q_j        A_j        B_j")
        for j, (q, (a, b)) in enumerate(zip(res.ratios, res.segment_masses), start=1):
            lines.append(f"  {j:3d} {res.breakpoints[j]:5d} {fmt.num(q):>10} {fmt.num(a):>10} {fmt.num(b):>10}")
        lines.append(f"  F_max = {fmt.num(res.f_max)}")
        lines.append(f"  intermediate {fmt.vec(res.intermediate.amplitudes)}")
        if args.oracle:
            if rho.dim <= 6:
                o = oracle_fmax(blk.state, target, cfg)
                agree = abs(o - res.f_max) <= ORACLE_AGREEMENT
                lines.append(f"  oracle F_max = {fmt.num(o)}  ({'agrees' if agree else 'DISAGREES'} within {ORACLE_AGREEMENT:g})")
            else:
                o, agree = None, None
                lines.append("  oracle skipped: dimension above 6")
            entry["oracle_fmax"], entry["oracle_agrees"] = o, agree
        blocks.append(entry)
    report = {
        "command": "distill",
        "f_max": report_obj.f_max,
        "limiting_block": report_obj.limiting_block,
        "blocks": blocks,
    }
    lines.append(f"F_max = {fmt.num(report_obj.f_max)} (limited by block [{report_obj.limiting_block}])")
    if args.f0 is not None:
        ok = [mu for mu, (_, r) in enumerate(report_obj.per_block) if r.f_max >= args.f0 - tol.fidelity]
        prob = float(sum(report_obj.per_block[mu][0] for mu in ok))
        reach = report_obj.f_max >= args.f0 - tol.fidelity
        report.update({"f0": args.f0, "can_reach": reach, "p_max": prob, "succeeding_blocks": ok})
        lines.append(f"can reach F0 = {fmt.num(args.f0)}: {'yes' if reach else 'no'}")
        lines.append(f"P_max = {fmt.num(prob)} (blocks {ok})")
    return report, lines, EXIT_OK


def _describe(cls: str) -> str:
    return "incoherent, not strictly incoherent" if cls == INCOHERENT else cls


def cmd_apply(args, tol, fmt):
    rho = _as_density(_load(args.state, tol, {"density", "pure"}))
    ks = _load(args.kraus, tol, {"kraus"})
    if ks.dim != rho.dim:
        raise _InvalidInput(DimMismatch(f"state dimension {rho.dim} != Kraus dimension {ks.dim}"))
    lines = [f"K_{n + 1}: {_describe(c)}" for n, c in enumerate(ks.classifications)]
    lines.append(f"completeness: max |sum K^dagger K - I| = {fmt.num(ks.completeness_error)}"
                 f" ({'complete' if ks.complete else 'incomplete'})")
    report = {
        "command": "apply",
        "classifications": ks.classifications,
        "classification": ks.classification,
        "complete": ks.complete,
        "completeness_error": ks.completeness_error,
        "stochastic": args.stochastic,
    }
    try:
        if args.stochastic:
            out, prob = apply_stochastic(rho, ks)
            report["probability"] = prob
            lines.append(f"success probability = {fmt.num(prob)}")
        else:
            out = apply_channel(rho, ks)
    except CohDistError as exc:
        raise _InvalidInput(exc) from None
    report["output"] = encode_complex(out.entries)
    lines += ["output state:", fmt.mat(out.entries)]
    if args.target:
        target = _load(args.target, tol, {"pure"})
        f = fidelity_pure_mixed(target, out)
        report["target_fidelity"] = f
        lines.append(f"fidelity <psi|out|psi> = {fmt.num(f)}")
    return report, lines, EXIT_OK


def cmd_fidelity(args, tol, fmt):
    a = _load(args.a, tol, {"density", "pure"})
    b = _load(args.b, tol, {"density", "pure"})
    if a.dim != b.dim:
        raise _InvalidInput(DimMismatch(f"dimension mismatch: {a.dim} vs {b.dim}"))
    kinds = ["pure" if isinstance(x, PureState) else "density" for x in (a, b)]
    if kinds == ["pure", "pure"]:
        root = fidelity_pure_pure(a, b)
        sq = root**2
    elif "pure" in kinds:
        pure, mixed = (a, b) if kinds[0] == "pure" else (b, a)
        sq = fidelity_pure_mixed(pure, mixed)
        root = fidelity_general(pure.density(), mixed)
    else:
        root = fidelity_general(a, b)
        sq = root**2
    report = {"command": "fidelity", "kinds": kinds, "root_fidelity": root, "squared_fidelity": sq}
    lines = [f"root fidelity    Tr sqrt(sqrt(a) b sqrt(a)) = {fmt.num(root)}",
             f"squared fidelity                           = {fmt.num(sq)}"]
    return report, lines, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "subspaces": cmd_subspaces,
    "distill": cmd_distill,
    "apply": cmd_apply,
    "fidelity": cmd_fidelity,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = _Fmt(args.precision)
    try:
        tol = tolerances(args)
        report, lines, code = COMMANDS[args.command](args, tol, fmt)
    except (StateFileError, ValueError) as exc:
        if isinstance(exc, CohDistError) and not isinstance(exc, StateFileError):
            code, err = EXIT_INVALID, exc
        else:
            code, err = EXIT_USAGE, exc
        report, lines = None, [f"error: {err}"]
    except _InvalidInput as wrapped:
        code, err = EXIT_INVALID, wrapped.exc
        report, lines = None, [f"error: {type(err).__name__}: {err}"]
    if report is None:
        report = {"command": args.command, "error": type(err).__name__, "message": str(err)}
    if args.json:
        print(json.dumps(report))
    else:
        stream = sys.stdout if code == EXIT_OK else sys.stderr
        print("\n".join(lines), file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
