"""Command-line front end.

Every subcommand prints its results together with verification residuals.
Exit status: 0 when all residuals are within ``--tol``, 2 on malformed
input, 3 on algebra errors or failed verification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Callable

import numpy as np

from .algebra import DEFAULT_TOL, Multivector, Signature, algebra_for, exp_bivector, sandwich
from .decomposition import classify, invariant_decompose
from .errors import GAError, ParseError
from .points import factor_point
from .pointors import is_pointor
from .spinors import NullBasis, basis_spinors, chiral_operator, master_idempotent, weyl_project
from .textio import _fmt_real, format_multivector, to_json

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FAIL = 3


class _Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def record(self, line: str, /, **data: Any) -> None:
        if self.as_json:
            print(json.dumps(data, default=_jsonable), file=self.stream)
        else:
            print(line, file=self.stream)


def _jsonable(x):
    if isinstance(x, Multivector):
        return to_json(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _num(x: float) -> str:
    return _fmt_real(round(float(x), 12) + 0.0)


def _residual_text(res: dict[str, float]) -> str:
    return ", ".join(f"{k} {v:.2e}" for k, v in res.items())


def _parse(alg, text: str) -> Multivector:
    return alg.parse(text)


# --------------------------------------------------------------------------
# Commands; each returns the worst residual it verified


def cmd_eval(args, alg, out: _Output) -> float:
    value = _parse(alg, args.expr)
    out.record(format_multivector(value), command="eval", result=value, text=format_multivector(value))
    return 0.0


def cmd_decompose(args, alg, out: _Output) -> float:
    U = _parse(alg, args.versor)
    dec = invariant_decompose(U, args.tol)
    res = dec.residuals()
    for i, f in enumerate(dec.factors):
        b = f.grade(2)
        kind = classify(float((b * b).scalar), b.norm() ** 2, args.tol)
        out.record(f"factor {i + 1} ({kind}): {format_multivector(f)}",
                   command="decompose", part="factor", index=i + 1, kind=kind, value=f)
    if dec.residual_reflection is not None:
        out.record(f"residual reflection: {format_multivector(dec.residual_reflection)}",
                   command="decompose", part="residual_reflection", value=dec.residual_reflection)
    out.record(f"scale: {_num(dec.scale)}", command="decompose", part="scale", value=dec.scale)
    out.record(f"residuals: {_residual_text(res)}", command="decompose", part="residuals", residuals=res)
    return max(res.values())


def cmd_point(args, alg, out: _Output) -> float:
    O = _parse(alg, args.point)
    frame = factor_point(O, args.tol)
    for i, v in enumerate(frame.vectors):
        out.record(f"v{i + 1} = {format_multivector(v)}", command="point", part="vector", index=i + 1, value=v)
    for j, b in enumerate(frame.cartan):
        out.record(f"b{j + 1} = {format_multivector(b)}", command="point", part="cartan", index=j + 1, value=b)
    if frame.extra is not None:
        out.record(f"extra = {format_multivector(frame.extra)}", command="point", part="extra", value=frame.extra)
    res = frame.residuals()
    out.record(f"residuals: {_residual_text(res)}", command="point", part="residuals", residuals=res)
    return max(res.values())


def _label_text(s) -> str:
    return "(" + ",".join("+" if x > 0 else "-" for x in s) + ")"


def cmd_spinor(args, alg, out: _Output) -> float:
    O = _parse(alg, args.point) if args.point else alg.pseudoscalar(nondegenerate=True)
    nb = NullBasis.from_frame(factor_point(O, args.tol), args.tol)
    M = master_idempotent(nb)
    G = chiral_operator(nb)
    one = alg.scalar(1.0)
    res = {
        "idempotent": (M * M - M).norm(),
        "annihilation": max((p.w_plus * M).norm() for p in nb.pairs),
        "chiral_square": (G * G - one).norm(),
    }
    out.record(f"master idempotent = {format_multivector(M)}", command="spinor", part="idempotent", value=M)
    out.record(f"chiral operator = {format_multivector(G)}", command="spinor", part="chiral", value=G)
    eig = 0.0
    null = 0.0
    for st in basis_spinors(nb):
        eig = max(eig, max((beta * st.value - st.value * s).norm() for beta, s in zip(nb.betas, st.label)))
        null = max(null, (~st.value * st.value).norm())
        side = "L" if weyl_project(st.value, nb, "L").isclose(st.value, 1e-9) else "R"
        out.record(f"eta{_label_text(st.label)} [{side}] = {format_multivector(st.value)}",
                   command="spinor", part="state", label=list(st.label), chirality=side, value=st.value)
    res["eigenvalues"] = eig
    res["null_norm"] = null
    out.record(f"residuals: {_residual_text(res)}", command="spinor", part="residuals", residuals=res)
    return max(res.values())


def cmd_pointor_check(args, alg, out: _Output) -> float:
    psi = _parse(alg, args.psi)
    O = _parse(alg, args.point)
    check = is_pointor(psi, O, args.tol)
    if check.ok:
        out.record(f"ρ = {_num(check.rho)}", command="pointor-check", ok=True, rho=check.rho, residual=check.residual)
        return check.residual
    out.record(f"not a pointor (residual {check.residual:.3e})",
               command="pointor-check", ok=False, rho=check.rho, residual=check.residual)
    return math.inf


def cmd_double_cover(args, alg, out: _Output) -> float:
    b = _parse(alg, args.bivector)
    sq = b * b
    if (b - b.grade(2)).norm() > args.tol or not sq.isclose(alg.scalar(-1.0), 1e-9):
        raise GAError("double-cover needs a bivector with b*b == -1")
    if args.steps < 4:
        raise ValueError("steps must be at least 4")
    probe = _parse(alg, args.probe) if args.probe else alg.basis_vectors[alg.signature.r]
    worst = 0.0
    for i in range(args.steps + 1):
        theta = 2 * math.pi * i / args.steps
        R = exp_bivector(b * theta)
        moved = sandwich(R, probe)
        back = moved.isclose(probe, 1e-9)
        out.record(
            f"θ = {theta:.6f}  R = {format_multivector(_round(R))}  scalar {float(R.scalar) + 0.0:+.6f}  "
            f"probe -> {format_multivector(_round(moved))}{'  (back)' if back else ''}",
            command="double-cover", theta=theta, rotor=R, scalar=float(R.scalar), probe=moved, probe_back=back,
        )
    for theta, expect in ((math.pi, -1.0), (2 * math.pi, 1.0)):
        worst = max(worst, (exp_bivector(b * theta) - alg.scalar(expect)).norm())
    worst = max(worst, (sandwich(exp_bivector(b * math.pi), probe) - probe).norm())
    out.record(f"residuals: half turn and full turn {worst:.2e}", command="double-cover", part="residuals",
               residuals={"period": worst})
    return worst


def _round(x: Multivector, digits: int = 12) -> Multivector:
    c = np.round(x.coeffs, digits) + 0.0
    return Multivector(x.alg, c)


COMMANDS: dict[str, Callable] = {
    "eval": cmd_eval,
    "decompose": cmd_decompose,
    "point": cmd_point,
    "spinor": cmd_spinor,
    "pointor-check": cmd_pointor_check,
    "double-cover": cmd_double_cover,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgaspin", description="Clifford algebra, versors, points and pointors.")
    parser.add_argument("--sig", required=True, help="signature p,q,r (e.g. 3,0,1)")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="verification tolerance")
    parser.add_argument("--json", action="store_true", help="line-delimited JSON output")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression")
    p.add_argument("expr")
    p = sub.add_parser("decompose", help="invariant decomposition of a versor")
    p.add_argument("versor")
    p = sub.add_parser("point", help="orthogonal factorization of a point")
    p.add_argument("point")
    p = sub.add_parser("spinor", help="null basis, idempotent and basis spinors")
    p.add_argument("--point", default=None, help="point to build the frame from (default: pseudoscalar)")
    p = sub.add_parser("pointor-check", help="test psi O ~psi == rho O")
    p.add_argument("psi")
    p.add_argument("--point", required=True)
    p = sub.add_parser("double-cover", help="trace exp(theta b) over a full turn")
    p.add_argument("bivector", nargs="?", default="e12")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--probe", default=None, help="vector to transform (default: first non-null axis)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    out = _Output(args.json)
    try:
        alg = algebra_for(Signature.parse(args.sig))
    except (ValueError, TypeError) as exc:
        print(f"error: bad signature: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        worst = COMMANDS[args.command](args, alg, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GAError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if worst <= args.tol else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
