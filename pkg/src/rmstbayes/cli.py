"""Command-line front end: fit / simulate / rmst / waic.

Every subcommand is deterministic given --seed, prints a human-readable
table to stdout, and (with --output) writes a single JSON document that
carries the fully resolved configuration alongside the results.  Output
files are written to a temporary file and renamed into place so a failed
run never leaves a partial document.  Exit status: 0 on success, 1 on
runtime failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .dataio import DataError, ingest_csv
from .families import (AltFamilyParams, EffectKind, EffectValue, Family,
                       FamilyParams, NO_EFFECT, convert_loglogistic_alt,
                       convert_weibull_alt)
from .inference import ModelSpec
from .model_selection import waic as compute_waic
from .rmst import rmst_difference, rmst_value
from .sampler import SamplerConfig, effective_sample_size, run_chains, split_rhat
from .simulation import ScenarioConfig, evaluate_replications, scenario_truth
from .summaries import RmstSummary, forest_rows, histogram_bins, summarize


def _write_output(doc: dict, path: str | None) -> None:
    if path is None:
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _summary_dict(s: RmstSummary) -> dict:
    return {
        "mean": s.mean, "median": s.median, "mode": s.mode, "sd": s.sd,
        "ci_level": s.ci_level, "ci_low": s.ci_low, "ci_high": s.ci_high,
        "exceedance": [{"threshold": t, "probability": p} for t, p in s.exceedance],
    }


def _table(headers, rows) -> str:
    cells = [[str(h) for h in headers]]
    for row in rows:
        cells.append([f"{v:.4f}" if isinstance(v, float) else str(v) for v in row])
    widths = [max(len(r[j]) for r in cells) for j in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _add_sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chains", type=int, default=2)
    p.add_argument("--iter", dest="iterations", type=int, default=2000)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family])
    p.add_argument("--effect", default="none",
                   choices=[e.value for e in EffectKind])


def _add_column_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-col", default="time")
    p.add_argument("--event-col", default="event")
    p.add_argument("--cluster-col", default="cluster")
    p.add_argument("--group-col", default="group")
    p.add_argument("--covariate", action="append", default=None, metavar="COLUMN",
                   help="design covariate column (repeatable; default: all extra columns)")


def _ingest(args) -> "SurvivalDataset":
    return ingest_csv(args.input, time_col=args.time_col, event_col=args.event_col,
                      cluster_col=args.cluster_col, group_col=args.group_col,
                      covariate_cols=args.covariate)


def _fit(args):
    data = _ingest(args)
    spec = ModelSpec(family=Family(args.family), effect=EffectKind(args.effect))
    cfg = SamplerConfig(chains=args.chains, iterations=args.iterations,
                        burnin=args.burnin, seed=args.seed)
    draws = run_chains(data, spec, cfg)
    return data, spec, cfg, draws


def cmd_fit(args) -> int:
    data, spec, cfg, draws = _fit(args)
    flat = draws.flat()
    param_rows = []
    for j, name in enumerate(draws.columns):
        s = summarize(flat[:, j], level=args.ci_level)
        param_rows.append({
            "name": name, "mode": s.mode, "median": s.median, "mean": s.mean,
            "sd": s.sd, "ci_low": s.ci_low, "ci_high": s.ci_high,
            "rhat": split_rhat(draws, j), "ess": effective_sample_size(draws, j),
        })

    thresholds = args.threshold or []
    g0, g1, diff = rmst_difference(draws, args.tau)
    rmst_doc = {
        "group0": _summary_dict(summarize(g0.values, args.ci_level)),
        "group1": _summary_dict(summarize(g1.values, args.ci_level)),
        "difference": _summary_dict(summarize(diff.values, args.ci_level, thresholds)),
    }
    edges, counts = histogram_bins(diff.values)
    forest = None
    if spec.effect is not EffectKind.NONE:
        per_cluster = {}
        for i in range(1, data.n_clusters + 1):
            _, _, cdiff = rmst_difference(draws, args.tau, cluster=i)
            per_cluster[f"cluster-{i}"] = summarize(cdiff.values, args.ci_level)
        forest = forest_rows(per_cluster, summarize(diff.values, args.ci_level))

    doc = {
        "config": {
            "subcommand": "fit", "input": args.input, "family": spec.family.value,
            "effect": spec.effect.value, "tau": args.tau, "chains": cfg.chains,
            "iterations": cfg.iterations, "burnin": cfg.burnin, "seed": cfg.seed,
            "ci_level": args.ci_level, "thresholds": thresholds,
        },
        "parameters": param_rows,
        "rmst": rmst_doc,
        "histogram": {"edges": list(edges), "counts": [int(c) for c in counts]},
        "forest": [list(r) for r in forest] if forest is not None else None,
        "acceptance": draws.acceptance,
    }
    _write_output(doc, args.output)

    headers = ["parameter", "Mode", "Median", "Mean", "SE",
               f"{args.ci_level:.0%}CI lo", "hi", "Rhat", "ESS"]
    rows = [(r["name"], r["mode"], r["median"], r["mean"], r["sd"],
             r["ci_low"], r["ci_high"], r["rhat"], r["ess"]) for r in param_rows]
    for label in ("group0", "group1", "difference"):
        s = rmst_doc[label]
        rows.append((f"RMST {label}", s["mode"], s["median"], s["mean"], s["sd"],
                     s["ci_low"], s["ci_high"], "", ""))
    print(_table(headers, rows))
    for item in rmst_doc["difference"]["exceedance"]:
        print(f"P(RMST difference < {item['threshold']:g}) = {item['probability']:.4f}")
    return 0


def cmd_waic(args) -> int:
    data, spec, cfg, draws = _fit(args)
    result = compute_waic(data, spec, draws)
    doc = {
        "config": {
            "subcommand": "waic", "input": args.input, "family": spec.family.value,
            "effect": spec.effect.value, "chains": cfg.chains,
            "iterations": cfg.iterations, "burnin": cfg.burnin, "seed": cfg.seed,
        },
        "waic": result.waic, "lppd": result.lppd, "p_waic": result.p_waic,
    }
    _write_output(doc, args.output)
    print(_table(["WAIC", "lppd", "p_waic"], [(result.waic, result.lppd, result.p_waic)]))
    return 0


def cmd_rmst(args, parser) -> int:
    family = Family(args.family)
    if args.scale is not None:
        if family not in (Family.WEIBULL, Family.LOG_LOGISTIC) or args.k is None:
            parser.error("--scale requires --k and family weibull or loglogistic")
        alt = AltFamilyParams(family, scale=args.scale, k=args.k)
        params = (convert_weibull_alt(alt) if family is Family.WEIBULL
                  else convert_loglogistic_alt(alt))
    else:
        try:
            if family is Family.EXPONENTIAL:
                params = FamilyParams.exponential(_require(parser, args.lam, "--lambda"))
            elif family is Family.WEIBULL:
                params = FamilyParams.weibull(_require(parser, args.lam, "--lambda"),
                                              _require(parser, args.k, "--k"))
            elif family is Family.LOG_LOGISTIC:
                params = FamilyParams.loglogistic(_require(parser, args.mu, "--mu"),
                                                  _require(parser, args.k, "--k"))
            else:
                params = FamilyParams.lognormal(_require(parser, args.mu, "--mu"),
                                                _require(parser, args.sigma2, "--sigma2"))
        except ValueError as exc:
            parser.error(str(exc))
    if args.u is not None and args.v is not None:
        parser.error("--u and --v are mutually exclusive")
    effect = NO_EFFECT
    if args.u is not None:
        effect = EffectValue(EffectKind.RANDOM, args.u)
    elif args.v is not None:
        effect = EffectValue(EffectKind.FRAILTY, args.v)
    value = rmst_value(params, effect, args.tau)
    doc = {
        "config": {
            "subcommand": "rmst", "family": family.value, "tau": args.tau,
            "lambda": args.lam, "k": args.k, "mu": args.mu, "sigma2": args.sigma2,
            "scale": args.scale, "u": args.u, "v": args.v,
        },
        "rmst": value,
    }
    _write_output(doc, args.output)
    print(f"RMST(tau={args.tau:g}) = {value:.6f}")
    return 0


def _require(parser, value, flag):
    if value is None:
        parser.error(f"{flag} is required for this family")
    return value


def cmd_simulate(args) -> int:
    cfg = ScenarioConfig(scenario=args.scenario, n=args.n,
                         replications=args.reps, seed=args.seed, tau=args.tau)
    family = Family(args.family) if args.family else cfg.family
    spec = ModelSpec(family=family, effect=EffectKind(args.effect))
    sampler_cfg = SamplerConfig(chains=args.chains, iterations=args.iterations,
                                burnin=args.burnin, seed=args.seed)
    metrics = evaluate_replications(cfg, spec, sampler_cfg)
    truth = scenario_truth(cfg)
    doc = {
        "config": {
            "subcommand": "simulate", "scenario": args.scenario, "n": args.n,
            "replications": args.reps, "family": family.value,
            "effect": args.effect, "tau": args.tau, "chains": args.chains,
            "iterations": args.iterations, "burnin": args.burnin, "seed": args.seed,
        },
        "truth": {"group0": truth[0], "group1": truth[1], "difference": truth[2]},
        "metrics": {"bias": metrics.bias, "mse": metrics.mse,
                    "mode": metrics.mode_diff, "median": metrics.median_diff,
                    "replications": metrics.replications, "failures": metrics.failures},
    }
    _write_output(doc, args.output)
    print(_table(["Bias", "MSE", "Mode", "Median", "reps", "failed"],
                 [(metrics.bias, metrics.mse, metrics.mode_diff,
                   metrics.median_diff, metrics.replications, metrics.failures)]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmstbayes",
        description="Bayesian restricted mean survival time for parametric "
                    "survival models with cluster effects.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_fit = sub.add_parser("fit", help="fit a model to a CSV dataset by MCMC")
    p_fit.add_argument("--input", required=True)
    _add_model_flags(p_fit)
    _add_column_flags(p_fit)
    _add_sampler_flags(p_fit)
    p_fit.add_argument("--tau", type=float, default=100.0)
    p_fit.add_argument("--ci-level", type=float, default=0.95)
    p_fit.add_argument("--threshold", type=float, action="append")
    p_fit.add_argument("--output")

    p_waic = sub.add_parser("waic", help="fit a model and report WAIC")
    p_waic.add_argument("--input", required=True)
    _add_model_flags(p_waic)
    _add_column_flags(p_waic)
    _add_sampler_flags(p_waic)
    p_waic.add_argument("--output")

    p_rmst = sub.add_parser("rmst", help="closed-form RMST for given parameters")
    p_rmst.add_argument("--family", required=True, choices=[f.value for f in Family])
    p_rmst.add_argument("--lambda", dest="lam", type=float)
    p_rmst.add_argument("--k", type=float)
    p_rmst.add_argument("--mu", type=float)
    p_rmst.add_argument("--sigma2", type=float)
    p_rmst.add_argument("--scale", type=float,
                        help="time-scale parameterization (with --k)")
    p_rmst.add_argument("--u", type=float, help="random-effect offset")
    p_rmst.add_argument("--v", type=float, help="frailty multiplier")
    p_rmst.add_argument("--tau", type=float, required=True)
    p_rmst.add_argument("--output")

    p_sim = sub.add_parser("simulate", help="run the replication harness")
    p_sim.add_argument("--scenario", required=True, choices=["A", "B", "C"])
    p_sim.add_argument("--n", type=int, default=512)
    p_sim.add_argument("--reps", type=int, default=10)
    p_sim.add_argument("--family", choices=[f.value for f in Family],
                       help="model family to fit (default: the generating family)")
    p_sim.add_argument("--effect", default="none",
                       choices=[e.value for e in EffectKind])
    p_sim.add_argument("--tau", type=float, default=100.0)
    _add_sampler_flags(p_sim)
    p_sim.add_argument("--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "fit":
            return cmd_fit(args)
        if args.subcommand == "waic":
            return cmd_waic(args)
        if args.subcommand == "rmst":
            return cmd_rmst(args, parser)
        return cmd_simulate(args)
    except (DataError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
