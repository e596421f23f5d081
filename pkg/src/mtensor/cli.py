"""Command-line front end.

Exit codes: 0 success, 2 unreadable or malformed input, 3 undecidable
classification (the rho bracket straddles s), 4 domain violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from mtensor.classify import classify_h, classify_m, is_z_tensor, semi_positive_certificate
from mtensor.errors import (
    CertificateConstructionError,
    NotSemiPositiveError,
    TensorError,
    TensorFormatError,
)
from mtensor.monotone import falsify_monotone, monotone_family, monotone_probes
from mtensor.spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, spectral_radius
from mtensor.tensor_core import SparseTensor, identity_tensor, kron_identity
from mtensor.textformat import format_tensor, read_tensor

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNDECIDABLE = 3
EXIT_DOMAIN = 4

B0_ENTRIES = {(1, 1, 1, 1): 2.0, (1, 1, 2, 2): 1.0, (2, 2, 2, 2): 1.0}


class DomainViolation(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _diag_summary(A: SparseTensor) -> str:
    d = A.diagonal()
    if np.all(d > 0):
        return "diag>0"
    if np.all(d >= 0):
        return "diag>=0"
    return "diag<0 somewhere"


def cmd_info(args) -> int:
    A = read_tensor(args.file)
    z = is_z_tensor(A)
    payload = {"order": A.order, "dim": A.dim, "nnz": A.nnz, "is_z": z,
               "nonnegative": A.is_nonnegative(), "diagonal": [float(v) for v in A.diagonal()]}
    text = f"m={A.order} n={A.dim} nnz={A.nnz} Z={'yes' if z else 'no'}"
    if z:
        text += " " + _diag_summary(A)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_classify(args) -> int:
    A = read_tensor(args.file)
    m_verdict = classify_m(A, tol=args.tol, max_iter=args.max_iter) if is_z_tensor(A) else None
    h_verdict = classify_h(A, tol=args.tol, max_iter=args.max_iter)
    payload = {
        "is_z": is_z_tensor(A),
        "M": None if m_verdict is None else m_verdict.to_dict(),
        "H": h_verdict.to_dict(),
    }
    lines = [f"Z-tensor: {'yes' if payload['is_z'] else 'no'}"]
    for name, v in (("M", m_verdict), ("H", h_verdict)):
        if v is None:
            continue
        lines.append(f"{name}: {v.category}  margin={v.margin!r}  "
                     f"rho in [{v.rho_bracket[0]!r}, {v.rho_bracket[1]!r}]")
        if v.diagnostic:
            lines.append(f"  note: {v.diagnostic}")
        if v.certificate is not None:
            lines.append(f"  certificate x={[float(a) for a in v.certificate.x]}")
    _emit(args, payload, "\n".join(lines))
    undecided = any(v is not None and not v.decided for v in (m_verdict, h_verdict))
    return EXIT_UNDECIDABLE if undecided else EXIT_OK


def cmd_rho(args) -> int:
    A = read_tensor(args.file)
    if not A.is_nonnegative():
        raise DomainViolation("rho needs a nonnegative tensor")
    res = spectral_radius(A, tol=args.tol, max_iter=args.max_iter)
    text = (f"rho={res.rho!r} bracket=[{res.lower!r}, {res.upper!r}] "
            f"iterations={res.iterations} converged={res.converged}")
    _emit(args, res.to_dict(), text)
    return EXIT_OK


def cmd_certificate(args) -> int:
    A = read_tensor(args.file)
    if not is_z_tensor(A):
        raise DomainViolation("certificate needs a Z-tensor")
    try:
        cert = semi_positive_certificate(A, tol=args.tol, max_iter=args.max_iter)
    except (NotSemiPositiveError, CertificateConstructionError) as exc:
        _emit(args, {"status": "not-semi-positive", "reason": str(exc)},
              f"no certificate: {exc}")
        return EXIT_OK
    payload = {"status": "semi-positive", **cert.to_dict()}
    text = (f"x={[float(a) for a in cert.x]}\nresidual={[float(a) for a in cert.residual]}\n"
            f"margin={cert.margin!r} method={cert.method}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_monotone(args) -> int:
    A = read_tensor(args.file)
    probes = None
    if A.order % 2 == 0 and is_z_tensor(A):
        probes = monotone_probes(A, tol=args.tol)
    witness = falsify_monotone(A, trials=args.trials, seed=args.seed)
    if witness is not None:
        status = "refuted"
    elif probes is not None and probes.status == "refuted":
        status = "refuted"
    else:
        status = "consistent"
    payload = {
        "status": status,
        "probes": None if probes is None else probes.to_dict(),
        "witness": None if witness is None else witness.to_dict(),
        "trials": args.trials,
        "seed": args.seed,
    }
    lines = [f"status: {status}"]
    if probes is not None:
        lines.append(f"probes: {probes.status} ({probes.reason})")
    if witness is not None:
        lines.append(f"witness x={[float(a) for a in witness.x]}")
        lines.append(f"residual={[float(a) for a in witness.residual]}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def build_example(args) -> tuple[SparseTensor, str]:
    """Construct the named example tensor and a comment describing it."""
    name = args.name
    if name == "counterexample":
        n = args.n if args.n is not None else 4
        s = args.s if args.s is not None else 5.0
        if not s > n:
            raise DomainViolation(f"counterexample needs s > n (got s={s}, n={n})")
        A = identity_tensor(4, n) * s - kron_identity(n)
        return A, f"counterexample: s I - (I_n kron I_n), n={n}, s={s!r}"
    if name == "monotone-family":
        a = _floats(args.a or "1,2")
        b = _floats(args.b or "1,1")
        k = args.k if args.k is not None else 2
        s = args.s if args.s is not None else 30.0
        A = monotone_family(a, b, k, s)
        return A, f"monotone family: a={a}, b={b}, k={k}, s={s!r}"
    if name == "kron-identity":
        n = args.n if args.n is not None else 4
        return kron_identity(n), f"kron identity I_n kron I_n, n={n}"
    if name == "b0":
        B0 = SparseTensor.from_entries(4, 2, B0_ENTRIES)
        if args.s is None:
            return B0, "b_1111=2, b_1122=1, b_2222=1"
        return identity_tensor(4, 2) * args.s - B0, f"s I - B0 with s={args.s!r}"
    raise DomainViolation(f"unknown example {name!r}")


def cmd_examples(args) -> int:
    try:
        A, comment = build_example(args)
    except TensorError as exc:
        raise DomainViolation(str(exc)) from exc
    text = format_tensor(A, comment)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.json:
            print(json.dumps({"path": args.out, "order": A.order, "dim": A.dim, "nnz": A.nnz}))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtensor", description="Z-, M- and H-tensor classification with certificates."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    common.add_argument("--max-iter", type=_positive_int, default=DEFAULT_MAX_ITER)

    for name, func, helptext in [
        ("info", cmd_info, "order, dimension, nnz and Z-tensor flag"),
        ("classify", cmd_classify, "M- and H-classification with margin"),
        ("rho", cmd_rho, "spectral radius of a nonnegative tensor"),
        ("certificate", cmd_certificate, "semi-positivity certificate"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")
        p.set_defaults(func=func)

    p = sub.add_parser("monotone", parents=[common], help="monotonicity probes and falsification")
    p.add_argument("file")
    p.add_argument("--trials", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("examples", parents=[common], help="write a generated example tensor")
    p.add_argument("name", choices=["counterexample", "monotone-family", "kron-identity", "b0"])
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--s", type=float)
    p.add_argument("--a", help="comma-separated vector")
    p.add_argument("--b", help="comma-separated vector")
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except TensorFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainViolation, TensorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
