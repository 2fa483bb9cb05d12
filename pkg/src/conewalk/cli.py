"""Command-line entry point.

Subcommands: analyze | enumerate | excursion | rho | bounds | guess | simulate.
Exit codes: 0 success, 2 validation error, 3 resource-budget error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import exact_dp, laplace, mc, report, seqlab
from .errors import (
    ConewalkError,
    HorizonTooLarge,
    MemoryBudgetExceeded,
)
from .laplace import DriftClass
from .model import load_model

DEFAULT_HORIZON = 120
DEFAULT_KMAX = 30


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conewalk")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("analyze", "enumerate", "excursion", "rho", "bounds",
                 "guess", "simulate"):
        sp = sub.add_parser(name)
        sp.add_argument("--model", required=True, help="model file path")
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
        sp.add_argument("--target", type=str, default=None,
                        help="comma-separated lattice point, e.g. '0,0'")
        sp.add_argument("--samples", type=int, default=0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--normalize", action="store_true")
        sp.add_argument("--out", type=str, default=None, help="output directory")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _parse_target(raw: str):
    return tuple(int(c) for c in raw.split(","))


def _survival_with_verdict(model, analysis, horizon, kmax):
    seq = exact_dp.survival_sequence(model, horizon)
    a_inf = None
    rho = analysis.rho if analysis is not None else None
    if (analysis is not None
            and analysis.classification is DriftClass.INTERIOR
            and model.small_step and not model.trapped):
        bounds = exact_dp.escape_probability_bounds(model, min(horizon, 100))
        lo, hi = bounds.best
        a_inf = float(lo + hi) / 2.0
        rho = None  # decay rate of the two-term remainder is not L(t0)
    needed = 2 * kmax + seqlab.MIN_EXTRA_TERMS
    if len(seq.terms) < needed:
        kmax = max((len(seq.terms) - seqlab.MIN_EXTRA_TERMS) // 2, 1)
    verdict = seqlab.sequence_verdict(
        seq.terms, kmax,
        rho=rho if len(seq.terms) >= 32 or rho is not None else 1.0,
        a_inf=a_inf,
    )
    return seq, verdict


def run_report(argv) -> tuple[dict, int]:
    """Execute a CLI invocation; returns (report document, exit code)."""
    args = _parser().parse_args(argv)
    try:
        model = load_model(args.model, normalize=args.normalize)
        horizon = args.horizon if args.horizon is not None else DEFAULT_HORIZON
        doc = report.base_report(model)
        sequences: dict = {}
        verdicts: dict = {}
        doc["sequences"] = sequences
        doc["verdicts"] = verdicts
        csv_payload = None

        analysis = None
        if args.command in ("analyze", "rho", "simulate", "excursion"):
            analysis = laplace.analyze(model.dist, model.cone)
            doc["laplace"] = report.laplace_block(analysis)

        if args.command in ("analyze", "enumerate", "guess"):
            if args.command != "analyze" and analysis is None:
                try:
                    analysis = laplace.analyze(model.dist, model.cone)
                    doc["laplace"] = report.laplace_block(analysis)
                except ConewalkError:
                    analysis = None
            seq, verdict = _survival_with_verdict(model, analysis, horizon, args.kmax)
            sequences["survival"] = report.sequence_block(seq)
            verdicts["survival"] = report.verdict_block(verdict)
            csv_payload = seq.to_csv()

        if args.command in ("analyze", "excursion") and (
            args.target is not None or args.command == "excursion"
        ):
            target = _parse_target(args.target) if args.target else tuple(model.start)
            seq = exact_dp.excursion_sequence(model, target, horizon)
            sequences["excursion"] = report.sequence_block(seq)
            if analysis is not None and analysis.rho_global is not None:
                period = seqlab.detect_period(seq.terms)
                lo = max(horizon // 4, period or 1)
                try:
                    fit = seqlab.excursion_exponent_fit(
                        seq.terms, analysis.rho_global, (lo, horizon))
                    verdicts["excursionExponent"] = {
                        "provenance": "float",
                        "kappa": fit.kappa,
                        "residual": fit.residual,
                        "rhoGlobal": analysis.rho_global,
                        "period": period,
                    }
                except ConewalkError:
                    pass
            csv_payload = seq.to_csv()

        if args.command in ("analyze", "bounds"):
            applicable = (model.small_step and not model.trapped
                          and model.cone.is_orthant)
            if applicable and analysis is None:
                analysis = laplace.analyze(model.dist, model.cone)
                doc["laplace"] = report.laplace_block(analysis)
            if applicable and analysis.classification is DriftClass.INTERIOR:
                bounds = exact_dp.escape_probability_bounds(model, horizon)
                doc["bounds"] = report.bounds_block(bounds)
            elif args.command == "bounds":
                raise ConewalkError(
                    "escape bounds need a small-step, non-trapped orthant model "
                    "with interior drift"
                )

        if args.command in ("analyze", "simulate") and args.samples > 0:
            estimates = [mc.simulate_survival(
                model, horizon, args.samples, args.seed)]
            if analysis is not None:
                estimates.append(mc.simulate_tilted(
                    model, analysis, horizon, args.samples, args.seed))
            doc["mc"] = [report.mc_block(e) for e in estimates]
        elif args.command == "simulate":
            raise ConewalkError("simulate needs --samples > 0")

        doc["assumptions"] = report.assumption_checklist(model, analysis)
        doc["regimeTags"] = report.regime_tags(model, analysis)

        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "report.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
            for name, block in sequences.items():
                lines = ["n,numerator,denominator,value"]
                for n, (term, fl) in enumerate(zip(block["terms"], block["floats"])):
                    num, den = term.split("/")
                    lines.append(f"{n},{num},{den},{fl!r}")
                with open(os.path.join(args.out, f"{name}.csv"), "w",
                          encoding="utf-8") as fh:
                    fh.write("\n".join(lines) + "\n")
        doc["_stdout"] = (
            csv_payload if args.format == "csv" and csv_payload is not None
            else None
        )
        return doc, 0
    except (MemoryBudgetExceeded, HorizonTooLarge) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}, 3
    except ConewalkError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}, 2
    except FileNotFoundError as exc:
        return {"error": f"FileNotFound: {exc}"}, 2


def main(argv=None) -> int:
    doc, code = run_report(argv if argv is not None else sys.argv[1:])
    payload = doc.pop("_stdout", None)
    if payload is not None:
        sys.stdout.write(payload)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
