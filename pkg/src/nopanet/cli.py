"""
Command-line front end.

Rates are given in units of ``--gamma-ref`` unless ``--hz`` is passed, so
``--gamma 1 --epsilon 0.4`` is the reference setting. Frequencies follow the
same rule (``--omega 0.5`` means ``0.5 * gamma_ref`` rad/s).

Exit codes: 0 success, 1 bad input, 2 ill-posed feedback, 3 unstable or
singular drift matrix, 4 optimizer stopped without converging.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matrix_io
from .errors import (
    IllPosedFeedback,
    InfeasiblePoint,
    InfeasibleStart,
    MatrixFormatError,
    NopaNetError,
    ResonantFrequency,
)
from .network import (
    BUILTIN_NETWORKS,
    GAMMA_REF_HZ,
    N_PORTS,
    N_QUAD,
    NopaParams,
    PassiveNetwork,
    build_state_space,
    complex_form,
    orthogonality_residual,
    quadrature_matrix,
    stability_check,
    symplectic_residual,
)
from .optimizer import OptimizerConfig, Status, optimize
from .spectra import sweep_spectrum, two_mode_squeezing
from .synthesis import PermutationVector, SynthesisReport, decompose, quantize_sensitivity, reconstruct

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ILL_POSED = 2
EXIT_UNSTABLE = 3
EXIT_NOT_CONVERGED = 4

log = logging.getLogger("nopanet")


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    network: str | None
    params: NopaParams
    omega: float = 0.0
    psi1: float = 0.0
    psi2: float = 0.0
    out: Path | None = None
    trace: Path | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        try:
            if args.hz:
                params = NopaParams(args.gamma, args.kappa, args.epsilon, args.gamma_ref)
            else:
                params = NopaParams.relative(args.gamma, args.kappa, args.epsilon, args.gamma_ref)
        except ValueError as exc:
            raise CommandError(EXIT_INPUT, str(exc)) from exc
        scale = 1.0 if args.hz else args.gamma_ref
        return cls(
            network=getattr(args, "network", None),
            params=params,
            omega=getattr(args, "omega", 0.0) * scale,
            psi1=getattr(args, "psi1", 0.0),
            psi2=getattr(args, "psi2", 0.0),
            out=Path(args.out) if getattr(args, "out", None) else None,
            trace=Path(args.trace) if getattr(args, "trace", None) else None,
        )


def load_network(source: str) -> PassiveNetwork:
    """A builtin name or a JSON matrix file (6x6 complex or 12x12 quadrature)."""
    if source in BUILTIN_NETWORKS:
        return BUILTIN_NETWORKS[source]()
    path = Path(source)
    if not path.is_file():
        raise CommandError(EXIT_INPUT, f"{source}: not a builtin ({', '.join(BUILTIN_NETWORKS)}) or a file")
    m, label = matrix_io.read_matrix(path)
    if m.shape == (N_QUAD, N_QUAD):
        return complex_form(m, label)
    if m.shape != (N_PORTS, N_PORTS):
        raise MatrixFormatError(f"{source}: expected a 6x6 or 12x12 matrix, got {list(m.shape)}")
    return PassiveNetwork(m, label=label or path.stem)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _state_space_checked(net: PassiveNetwork, params: NopaParams):
    ss = build_state_space(net, params)
    stab = stability_check(ss)
    if not (stab.hurwitz and stab.a_invertible):
        what = "singular" if not stab.a_invertible else "not Hurwitz"
        raise CommandError(EXIT_UNSTABLE, f"drift matrix A is {what}: max Re eig(A) = {stab.max_re_eig:.6e} gamma_ref")
    return ss


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    ss = _state_space_checked(load_network(cfg.network), cfg.params)
    rep = two_mode_squeezing(ss, cfg.omega, cfg.psi1, cfg.psi2)
    _emit(matrix_io.dumps(matrix_io.report_to_dict(rep)), cfg.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    ss = _state_space_checked(load_network(cfg.network), cfg.params)
    omega_max = args.omega_max * (1.0 if args.hz else args.gamma_ref)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reports = sweep_spectrum(ss, omega_max, args.points, cfg.psi1, cfg.psi2)
    for w in caught:
        log.warning("%s", w.message)
    _emit(matrix_io.sweep_csv(reports), cfg.out)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    init = load_network(args.init)
    try:
        res = optimize(init, cfg.params, OptimizerConfig(tol=args.tol, max_iters=args.max_iters))
    except InfeasibleStart as exc:
        raise CommandError(EXIT_UNSTABLE, str(exc)) from exc
    if cfg.trace is not None:
        cfg.trace.write_text(matrix_io.trace_csv(res.trace))
    if cfg.out is not None:
        matrix_io.write_matrix(cfg.out, res.network.entries, label="optimized")
    last = res.trace[-1]
    summary = {
        "status": res.status.value,
        "iterations": last.iter,
        "v0": matrix_io._num(last.v0),
        "db": round(last.db, 3),
        "z_norm": matrix_io._num(last.z_norm),
    }
    sys.stdout.write(matrix_io.dumps(summary))
    if res.status is not Status.CONVERGED:
        print(f"optimizer stopped with status {res.status.value}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _perm(args: argparse.Namespace) -> PermutationVector:
    try:
        return PermutationVector.parse(args.perm) if args.perm else PermutationVector()
    except ValueError as exc:
        raise CommandError(EXIT_INPUT, f"--perm: {exc}") from exc


def cmd_decompose(args: argparse.Namespace) -> int:
    rep = decompose(load_network(args.network), _perm(args))
    log.info("reconstruction error %.3e", rep.reconstruction_error)
    text = matrix_io.dumps(matrix_io.factors_to_dict(rep.factors, rep.product_order))
    _emit(text, Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_recompose(args: argparse.Namespace) -> int:
    factors, order = matrix_io.read_factors(Path(args.factors))
    net = reconstruct(factors, order)
    _emit(matrix_io.dumps(matrix_io.matrix_to_dict(net.entries, "recomposed")), Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_sensitivity(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    if args.factors:
        factors, order = matrix_io.read_factors(Path(args.factors))
        report = SynthesisReport(factors=factors, product_order=order)
    elif args.network:
        report = decompose(load_network(args.network), _perm(args))
    else:
        raise CommandError(EXIT_INPUT, "sensitivity needs --factors or --network")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = quantize_sensitivity(report, args.digits, cfg.params)
    for w in caught:
        log.warning("%s", w.message)
    _emit(matrix_io.dumps(matrix_io.report_to_dict(rep)), cfg.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    net = load_network(cfg.network)
    s = quadrature_matrix(net.entries)
    checks: list[tuple[str, bool, str]] = [
        ("unitarity", net.residual <= 1e-10, f"residual {net.residual:.3e}"),
        ("orthogonal", orthogonality_residual(s) <= 1e-10, f"residual {orthogonality_residual(s):.3e}"),
        ("symplectic", symplectic_residual(s) <= 1e-10, f"residual {symplectic_residual(s):.3e}"),
    ]
    code = EXIT_OK
    try:
        ss = build_state_space(net, cfg.params)
    except IllPosedFeedback as exc:
        checks.append(("well-posed", False, str(exc)))
        code = EXIT_ILL_POSED
    else:
        stab = stability_check(ss)
        checks.append(("well-posed", True, "I - S22 invertible"))
        checks.append(("A invertible", stab.a_invertible, ""))
        checks.append(("hurwitz", stab.hurwitz, f"max Re eig(A) = {stab.max_re_eig:.6e} gamma_ref"))
        if not (stab.hurwitz and stab.a_invertible):
            code = EXIT_UNSTABLE
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    if code == EXIT_OK and not all(ok for _, ok, _ in checks):
        code = EXIT_INPUT
    return code


def _add_rates(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("NOPA parameters")
    g.add_argument("--gamma", type=float, default=1.0, help="coupling rate (default 1 gamma_ref)")
    g.add_argument("--kappa", type=float, default=0.0, help="loss rate (default 0)")
    g.add_argument("--epsilon", type=float, default=0.4, help="pump amplitude (default 0.4 gamma_ref)")
    g.add_argument("--gamma-ref", type=float, default=GAMMA_REF_HZ, help="reference rate in Hz (default 7.2e7)")
    g.add_argument("--hz", action="store_true", help="read rates and frequencies as absolute Hz / rad/s")


def _add_angles(p: argparse.ArgumentParser) -> None:
    p.add_argument("--psi1", type=float, default=0.0, help="output 1 phase rotation (rad)")
    p.add_argument("--psi2", type=float, default=0.0, help="output 2 phase rotation (rad)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nopanet", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    net_help = f"builtin ({', '.join(BUILTIN_NETWORKS)}) or JSON matrix file"

    p = sub.add_parser("eval", help="two-mode squeezing at one frequency")
    p.add_argument("--network", required=True, help=net_help)
    p.add_argument("--omega", type=float, default=0.0)
    _add_angles(p)
    _add_rates(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="squeezing spectrum over [0, omega_max] as CSV")
    p.add_argument("--network", required=True, help=net_help)
    p.add_argument("--omega-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    _add_angles(p)
    _add_rates(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="local minimisation of V(0) over unitary networks")
    p.add_argument("--init", "--network", dest="init", required=True, help=net_help)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=10000)
    _add_rates(p)
    p.add_argument("--out", help="write the final network here")
    p.add_argument("--trace", help="write the iteration trace CSV here")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("decompose", help="factor a network into two-level unitaries")
    p.add_argument("--network", required=True, help=net_help)
    p.add_argument("--perm", help="comma-separated port order (default 6,5,4,3,2,1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("recompose", help="multiply a factor file back into a network")
    p.add_argument("--factors", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recompose)

    p = sub.add_parser("sensitivity", help="squeezing after rounding beamsplitter coefficients")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--factors")
    src.add_argument("--network", help=net_help)
    p.add_argument("--perm")
    p.add_argument("--digits", type=int, default=None, help="decimals kept in alpha (default: no rounding)")
    _add_rates(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("validate", help="unitarity, symplecticity and stability checks")
    p.add_argument("--network", required=True, help=net_help)
    _add_rates(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except IllPosedFeedback as exc:
        print(f"error: ill-posed feedback: {exc}", file=sys.stderr)
        return EXIT_ILL_POSED
    except (ResonantFrequency, InfeasiblePoint) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (NopaNetError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
