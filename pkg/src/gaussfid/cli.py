"""Command-line interface.

Exit codes: 0 ok, 2 malformed input, 3 unphysical state, 4 unsupported
mode count, 5 numerical inconsistency or oracle mismatch, 6 cutoff too small.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .circuit import DEFAULT_LIMITS, GaussianCircuit
from .documents import LoadedState, load_state
from .errors import CutoffTooSmallError, GaussfidError, MalformedInputError
from .fidelity import fidelity
from .fock import oracle_compare
from .sweep import load_sweep, run_sweep
from .symplectic import is_pure, purity, symplectic_eigenvalues
from .tolerances import PROFILES, Tolerances

EXIT_ORACLE_FAIL = 5


def _g6(x) -> str:
    return f"{x:.6g}"


def _table(rows: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def cmd_fidelity(args, tol: Tolerances) -> int:
    a = load_state(args.state_a, tol).require_valid()
    b = load_state(args.state_b, tol).require_valid()
    rep = fidelity(a, b, tol)
    if args.format == "json":
        d = rep.as_dict()
        if "lambda_" in d:
            d["lambda"] = d.pop("lambda_")
        print(json.dumps(d, indent=2))
        return 0
    rows = [
        ("fidelity", _g6(rep.fidelity)),
        ("overlap", _g6(rep.overlap)),
        ("bures_distance", _g6(rep.bures_distance)),
        ("method", rep.method),
    ]
    if rep.invariants is not None:
        t = rep.invariants
        rows += [("delta", _g6(t.delta)), ("gamma", _g6(t.gamma)), ("lambda", _g6(t.lam))]
    print(_table(rows))
    return 0


def cmd_sweep(args, tol: Tolerances) -> int:
    spec = load_sweep(args.spec)
    result = run_sweep(spec, tol)
    text = result.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result.failed:
        print(f"{result.failed} of {result.failed + result.succeeded} grid points failed", file=sys.stderr)
    return 0 if result.succeeded else (result.first_error_code or 1)


def _circuit(loaded: LoadedState, path: str) -> GaussianCircuit:
    if loaded.kind != "circuit":
        raise MalformedInputError(f"{path}: oracle-check needs a circuit document (got kind {loaded.kind!r})")
    return loaded.source


def cmd_oracle_check(args, tol: Tolerances) -> int:
    c1 = _circuit(load_state(args.state_a, tol), args.state_a)
    c2 = _circuit(load_state(args.state_b, tol), args.state_b)
    res = oracle_compare(c1, c2, args.cutoff, tol=tol, limits=None if args.force else DEFAULT_LIMITS)
    print(_table([
        ("closed_form", f"{res.closed_form:.12g}"),
        ("oracle", f"{res.oracle:.12g}"),
        ("deviation", f"{res.deviation:.3e}"),
        ("tolerance", f"{res.tolerance:.0e}"),
        ("method", res.method),
        ("cutoff", str(res.cutoff)),
        ("result", "PASS" if res.passed else "FAIL"),
    ]))
    return 0 if res.passed else EXIT_ORACLE_FAIL


def _spectrum_rows(loaded: LoadedState, tol: Tolerances, extended: bool) -> list[tuple[str, str]]:
    v = loaded.validation
    rows = [("valid", "yes" if v.valid else f"no ({v.failing}: {v.detail})")]
    state = loaded.state
    if v.positive_definite:
        k = symplectic_eigenvalues(state.cov, tol)
        rows.append(("symplectic_eigenvalues", "[" + ", ".join(_g6(x) for x in k) + "]"))
        if extended:
            rows.append(("thermal_photons", "[" + ", ".join(_g6(x - 0.5) for x in k) + "]"))
        rows.append(("purity", _g6(purity(state))))
    else:
        rows.append(("symplectic_eigenvalues", "n/a (covariance matrix not positive definite)"))
    check = is_pure(state, tol)
    rows.append(("purity_residual", _g6(check.residual)))
    if extended:
        rows.append(("pure", "yes" if check.pure and v.valid else "no"))
    return rows


def _report_state(args, tol: Tolerances, extended: bool) -> int:
    loaded = load_state(args.state, tol)
    print(_table(_spectrum_rows(loaded, tol, extended)))
    return 0 if loaded.validation.valid else 3


def cmd_validate(args, tol: Tolerances) -> int:
    return _report_state(args, tol, extended=False)


def cmd_spectrum(args, tol: Tolerances) -> int:
    return _report_state(args, tol, extended=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance-profile", choices=sorted(PROFILES), default=argparse.SUPPRESS,
                        help="tolerance family: default, or strict (all tolerances x 0.1)")

    p = argparse.ArgumentParser(prog="gaussfid", description="Fidelity between Gaussian states.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fidelity", parents=[common], help="fidelity between two state documents")
    f.add_argument("state_a")
    f.add_argument("state_b")
    f.add_argument("--format", choices=("table", "json"), default="table")
    f.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("sweep", parents=[common], help="evaluate a parameter sweep to CSV")
    s.add_argument("spec")
    s.add_argument("--out", help="write CSV here instead of stdout")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle-check", parents=[common], help="compare with the truncated Fock oracle")
    o.add_argument("state_a")
    o.add_argument("state_b")
    o.add_argument("--cutoff", type=int, required=True, help="Fock cutoff per mode")
    o.add_argument("--force", action="store_true", help="skip the truncation-safe parameter bounds")
    o.set_defaults(func=cmd_oracle_check)

    for name, func, text in (("validate", cmd_validate, "physicality verdict of a state"),
                             ("spectrum", cmd_spectrum, "symplectic spectrum and purity of a state")):
        v = sub.add_parser(name, parents=[common], help=text)
        v.add_argument("state")
        v.set_defaults(func=func)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    tol = PROFILES[getattr(args, "tolerance_profile", "default")]
    try:
        with np.errstate(all="ignore"):
            return args.func(args, tol)
    except CutoffTooSmallError as exc:
        hint = f"; try --cutoff {exc.suggested_cutoff}" if exc.suggested_cutoff else ""
        print(f"error: {exc}{hint}", file=sys.stderr)
        return exc.exit_code
    except GaussfidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
