"""Command-line front end.

Subcommands: ``reach`` (reachability decisions), ``transport`` (explicit
transport map), ``exact-channel`` (finite Kraus channel construction),
``jordan``, ``ideal-norms``, ``maxmix``, ``convert-channel``, ``oracle``
(re-validate a saved decision report) and ``selftest`` (the acceptance
suites).

Exit codes: 0 yes/success, 1 no, 2 indeterminate, 3 input or usage error,
4 internal error (including oracle disagreement).  All randomness flows
from ``--seed``; with a fixed seed a report reproduces byte for byte apart
from its timestamp.
"""

import argparse
import sys

import numpy as np

from . import serialize
from .algebra import EPS_EIG, Ideal, identity_element
from .channels import apply_kraus, choi_of, kraus_from_choi
from .exact_channel import PurificationError, construct_exact_channel
from .functionals import evaluate, ideal_norm, jordan_decompose, restrict_to_center
from .numerics import EPS_FEAS, get_backend
from .oracle import choi_membership_oracle
from .reachability import (
    ETA_DEC,
    build_transport_map,
    check_hermitian_reachable,
    check_more_mixed,
    check_state_reachable,
    is_maximally_mixed,
)
from .selftest import run_selftest

EXIT_YES = 0
EXIT_NO = 1
EXIT_INDETERMINATE = 2
EXIT_INPUT_ERROR = 3
EXIT_INTERNAL_ERROR = 4

_VERDICT_EXIT = {"yes": EXIT_YES, "success": EXIT_YES, "no": EXIT_NO,
                 "indeterminate": EXIT_INDETERMINATE}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    parser = _Parser(prog="statemix", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, omega=False, rho=False):
        if omega:
            p.add_argument("--omega", required=True, help="source functional JSON")
        if rho:
            p.add_argument("--rho", required=True, help="target functional JSON")
        p.add_argument("--tol-eig", type=float, default=EPS_EIG,
                       help="eigenvalue / support cutoff")
        p.add_argument("--tol-feas", type=float, default=EPS_FEAS,
                       help="feasibility tolerance for oracle runs")
        p.add_argument("--tol-dec", type=float, default=None,
                       help="decision band width (default scales with norms)")
        p.add_argument("--seed", type=int, default=42, help="random seed")
        p.add_argument("--out", default=None, help="report output path")

    p = sub.add_parser("reach", help="decide reachability between functionals")
    add_common(p, omega=True, rho=True)
    p.add_argument("--mode", choices=["auto", "state", "positive", "hermitian"],
                   default="auto")
    p.add_argument("--with-oracle", action="store_true",
                   help="cross-check with the Choi membership oracle")

    p = sub.add_parser("transport", help="construct the transport map")
    add_common(p, omega=True, rho=True)
    p.add_argument("--channel-out", default=None,
                   help="write the constructed channel (Kraus JSON) here")

    p = sub.add_parser("exact-channel", help="construct an exact Kraus channel")
    add_common(p, omega=True, rho=True)
    p.add_argument("--channel-out", default=None,
                   help="write the constructed channel (Kraus JSON) here")

    p = sub.add_parser("jordan", help="Jordan decomposition of a functional")
    add_common(p, omega=True)

    p = sub.add_parser("ideal-norms", help="restriction norms over all ideals")
    add_common(p, omega=True)

    p = sub.add_parser("maxmix", help="maximal mixedness of a state")
    add_common(p, omega=True)
    p.add_argument("--ideal", default=None,
                   help="comma-separated 0-based blocks of an annihilated ideal")

    p = sub.add_parser("convert-channel", help="convert Kraus and Choi files")
    p.add_argument("--channel", required=True, help="channel JSON (either form)")
    p.add_argument("--to", choices=["kraus", "choi"], required=True)
    p.add_argument("--out", required=True, help="output path")

    p = sub.add_parser("oracle", help="re-validate a saved decision report")
    p.add_argument("--report", required=True, help="saved reach report JSON")
    p.add_argument("--out", default=None, help="oracle report output path")

    p = sub.add_parser("selftest", help="run the acceptance suites")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default: all)")
    p.add_argument("--out", default=None, help="summary report output path")

    return parser


def _tolerances(args):
    return {"tol_eig": getattr(args, "tol_eig", EPS_EIG),
            "tol_feas": getattr(args, "tol_feas", EPS_FEAS),
            "tol_dec": getattr(args, "tol_dec", None) or ETA_DEC}


def _load_functional(path):
    return serialize.functional_from_dict(serialize.load_json(path), path)


def _emit(report, out, quiet=False):
    text = serialize.dump_report(report, out)
    if not quiet:
        print(text)


def _cmd_reach(args):
    omega = _load_functional(args.omega)
    rho = _load_functional(args.rho)
    mode = args.mode
    if mode == "auto":
        if omega.is_state() and rho.is_state():
            mode = "state"
        elif omega.is_positive() and rho.is_positive():
            mode = "positive"
        else:
            mode = "hermitian"
    if mode == "state":
        decision = check_state_reachable(omega, rho, eta=args.tol_dec)
    elif mode == "positive":
        decision = check_more_mixed(omega, rho, eta=args.tol_dec)
    else:
        decision = check_hermitian_reachable(omega, rho, eta=args.tol_dec)

    oracle_section = None
    exit_code = _VERDICT_EXIT[decision.verdict]
    if args.with_oracle:
        rep = choi_membership_oracle(omega, rho, eps_feas=args.tol_feas)
        oracle_verdict = {"feasible": "yes", "infeasible": "no"}.get(
            rep.verdict, "indeterminate")
        agree = (oracle_verdict == decision.verdict
                 or "indeterminate" in (oracle_verdict, decision.verdict))
        oracle_section = {"verdict": oracle_verdict, "residual": rep.residual,
                          "iterations": rep.iterations, "agrees": agree}
        if not agree:
            exit_code = EXIT_INTERNAL_ERROR

    report = serialize.decision_report(
        kind=f"reach-{mode}",
        decision=decision,
        inputs={"omega": omega, "rho": rho, "mode": mode},
        seed=args.seed,
        tolerances=_tolerances(args),
        oracle=oracle_section,
    )
    _emit(report, args.out)
    return exit_code


def _verify_channel(omega, rho, channel, rng, trials=25):
    worst = 0.0
    for _ in range(trials):
        from .algebra import Element
        blocks = tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                       for n in omega.algebra.block_dims)
        x = Element(omega.algebra, blocks)
        err = abs(evaluate(omega, apply_kraus(channel, x)) - evaluate(rho, x))
        worst = max(worst, err / max(x.norm(), 1e-12))
    return worst


def _cmd_transport(args):
    omega = _load_functional(args.omega)
    rho = _load_functional(args.rho)
    decision = check_hermitian_reachable(omega, rho, eta=args.tol_dec)
    if not decision.is_yes:
        report = serialize.decision_report(
            kind="transport", decision=decision,
            inputs={"omega": omega, "rho": rho},
            seed=args.seed, tolerances=_tolerances(args),
        )
        _emit(report, args.out)
        return _VERDICT_EXIT[decision.verdict]

    choi = build_transport_map(omega, rho, eta=args.tol_dec)
    kraus = kraus_from_choi(choi, tol=args.tol_eig)
    rng = np.random.default_rng(args.seed)
    details = {
        "kraus_rank": len(kraus.operators),
        "unitality_defect": kraus.unitality_defect(),
        "composition_defect": _verify_channel(omega, rho, kraus, rng),
        "choi_min_eigenvalue_defect": 0.0 if choi.is_completely_positive() else 1.0,
    }
    if args.channel_out:
        serialize.dump_report(serialize.kraus_to_dict(kraus), args.channel_out)
        details["channel_path"] = args.channel_out
    report = serialize.decision_report(
        kind="transport", decision=decision,
        inputs={"omega": omega, "rho": rho},
        seed=args.seed, tolerances=_tolerances(args), details=details,
    )
    _emit(report, args.out)
    return EXIT_YES


def _cmd_exact_channel(args):
    omega = _load_functional(args.omega)
    rho = _load_functional(args.rho)
    try:
        channel, diagnostics = construct_exact_channel(
            omega, rho, tol=args.tol_eig, with_diagnostics=True)
    except ValueError as exc:
        report = serialize.utility_report(
            kind="exact-channel", inputs={"omega": omega, "rho": rho},
            details={"reason": str(exc)}, seed=args.seed,
            tolerances=_tolerances(args), verdict="no",
            explanation=str(exc))
        _emit(report, args.out)
        return EXIT_NO
    rng = np.random.default_rng(args.seed)
    diagnostics["composition_defect"] = _verify_channel(omega, rho, channel, rng)
    diagnostics["kraus_rank"] = len(channel.operators)
    if args.channel_out:
        serialize.dump_report(serialize.kraus_to_dict(channel), args.channel_out)
        diagnostics["channel_path"] = args.channel_out
    report = serialize.utility_report(
        kind="exact-channel", inputs={"omega": omega, "rho": rho},
        details=diagnostics, seed=args.seed, tolerances=_tolerances(args),
        verdict="yes",
        explanation=("a finite Kraus channel composing the source into the "
                     "target was constructed and verified"))
    _emit(report, args.out)
    return EXIT_YES


def _cmd_jordan(args):
    omega = _load_functional(args.omega)
    pair = jordan_decompose(omega, tol=args.tol_eig)
    details = {
        "positive_part": pair.positive_part,
        "negative_part": pair.negative_part,
        "positive_mass": restrict_to_center(pair.positive_part).real_values().sum(),
        "negative_mass": restrict_to_center(pair.negative_part).real_values().sum(),
        "norm": omega.norm(),
    }
    report = serialize.utility_report(
        kind="jordan", inputs={"omega": omega}, details=details,
        seed=args.seed, tolerances=_tolerances(args),
        explanation="orthogonal positive and negative parts of the functional")
    _emit(report, args.out)
    return EXIT_YES


def _cmd_ideal_norms(args):
    omega = _load_functional(args.omega)
    from .algebra import enumerate_ideals
    lattice = enumerate_ideals(omega.algebra)
    table = [{"blocks": sorted(ideal.support),
              "norm": ideal_norm(omega, ideal)}
             for ideal in lattice.ideals]
    details = {
        "table": table,
        "maximal_ideals": [sorted(m.support) for m in lattice.maximal_ideals],
        "strong_radical": sorted(lattice.strong_radical.support),
    }
    report = serialize.utility_report(
        kind="ideal-norms", inputs={"omega": omega}, details=details,
        seed=args.seed, tolerances=_tolerances(args),
        explanation="restriction norms over the full ideal lattice")
    _emit(report, args.out)
    return EXIT_YES


def _cmd_maxmix(args):
    omega = _load_functional(args.omega)
    ideal = None
    if args.ideal:
        try:
            blocks = [int(tok) for tok in args.ideal.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise serialize.FormatError(f"--ideal: {exc}") from exc
        ideal = Ideal(omega.algebra, frozenset(blocks))
    decision = is_maximally_mixed(omega, annihilated_ideal=ideal,
                                  eta=args.tol_dec)
    report = serialize.decision_report(
        kind="maxmix", decision=decision,
        inputs={"omega": omega,
                "annihilated_ideal": sorted(ideal.support) if ideal else None},
        seed=args.seed, tolerances=_tolerances(args),
    )
    _emit(report, args.out)
    return _VERDICT_EXIT[decision.verdict]


def _cmd_convert_channel(args):
    data = serialize.load_json(args.channel)
    channel = serialize.channel_from_dict(data, args.channel)
    from .channels import KrausMap, ModuleMapChoi

    if args.to == "choi":
        choi = channel if isinstance(channel, ModuleMapChoi) else choi_of(channel)
        serialize.dump_report(serialize.choi_to_dict(choi), args.out)
    else:
        kraus = channel if isinstance(channel, KrausMap) else kraus_from_choi(channel)
        serialize.dump_report(serialize.kraus_to_dict(kraus), args.out)
    print(f"wrote {args.to} form to {args.out}")
    return EXIT_YES


def _cmd_oracle(args):
    saved = serialize.load_json(args.report)
    inputs = serialize._require(saved, "inputs", args.report)
    omega = serialize.functional_from_dict(
        serialize._require(inputs, "omega", f"{args.report}.inputs"),
        f"{args.report}.inputs.omega")
    rho = serialize.functional_from_dict(
        serialize._require(inputs, "rho", f"{args.report}.inputs.rho"),
        f"{args.report}.inputs.rho")
    saved_verdict = serialize._require(saved, "verdict", args.report)
    rep = choi_membership_oracle(omega, rho)
    oracle_verdict = {"feasible": "yes", "infeasible": "no"}.get(
        rep.verdict, "indeterminate")
    agree = (oracle_verdict == saved_verdict
             or "indeterminate" in (oracle_verdict, saved_verdict))
    report = serialize.utility_report(
        kind="oracle",
        inputs={"omega": omega, "rho": rho, "saved_verdict": saved_verdict},
        details={"oracle_verdict": oracle_verdict, "residual": rep.residual,
                 "iterations": rep.iterations, "agrees": agree},
        verdict="success" if agree else "error",
        explanation=("oracle agrees with the saved verdict" if agree else
                     "oracle disagrees with the saved verdict"))
    _emit(report, args.out)
    return EXIT_YES if agree else EXIT_INTERNAL_ERROR


def _cmd_selftest(args):
    criteria = None
    if args.criteria:
        try:
            criteria = [int(tok) for tok in args.criteria.split(",") if tok.strip()]
        except ValueError as exc:
            raise serialize.FormatError(f"--criteria: {exc}") from exc
    results = run_selftest(seed=args.seed, criteria=criteria)
    details = {
        "results": [{"criterion": r.index, "name": r.name, "passed": r.passed,
                     "details": r.details, "elapsed_seconds": round(r.elapsed, 3)}
                    for r in results],
        "backend": get_backend(),
    }
    all_passed = all(r.passed for r in results)
    report = serialize.utility_report(
        kind="selftest", inputs={"criteria": [r.index for r in results]},
        details=details, seed=args.seed,
        verdict="success" if all_passed else "error",
        explanation="acceptance suites" + ("" if all_passed else " (failures)"))
    if args.out:
        serialize.dump_report(report, args.out)
    return EXIT_YES if all_passed else EXIT_NO


_COMMANDS = {
    "reach": _cmd_reach,
    "transport": _cmd_transport,
    "exact-channel": _cmd_exact_channel,
    "jordan": _cmd_jordan,
    "ideal-norms": _cmd_ideal_norms,
    "maxmix": _cmd_maxmix,
    "convert-channel": _cmd_convert_channel,
    "oracle": _cmd_oracle,
    "selftest": _cmd_selftest,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"statemix: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        return _COMMANDS[args.command](args)
    except (serialize.FormatError, ValueError) as exc:
        print(f"statemix: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except PurificationError as exc:
        print(f"statemix: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
