"""Command-line interface.

Every subcommand reads a JSON run configuration (--config, default
./config.json) for data locations and defaults, then applies its own
flags. Stage subcommands print CSV to stdout for one (state, naics)
model; ``run`` executes the full pipeline for every configured model and
writes the report bundle to the output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .diagnostics import lm_autocorrelation, normality_tests
from .errors import CointegraError
from .johansen import DeterministicCase, johansen_test
from .lagselect import select_lags
from .panel import VARIABLES, ingest_panel, lq_significance, summarize
from .pipeline import (
    ADF_CASE,
    ADF_LAG,
    LM_LAGS,
    REPORT_HEADERS,
    RunConfig,
    fmt3,
    fmt6,
    load_aux_series,
    load_config,
    lq_records_for_panel,
    run_pipeline,
)
from .quarters import QuarterDate
from .unitroot import adf_test
from .vecm import ModelSpec, backtest, fit_vecm, forecast, irf


def _write_rows(header, rows, stream=None) -> None:
    writer = csv.writer(stream or sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _model_args(parser: argparse.ArgumentParser, with_spec: bool = False) -> None:
    parser.add_argument("--state", required=True)
    parser.add_argument("--naics", required=True, type=int)
    if with_spec:
        parser.add_argument("--k", type=int, default=None)
        parser.add_argument("--r", type=int, default=None)
        parser.add_argument("--case", default=None)


def _load_panel(config: RunConfig, state: str, naics: int):
    import os

    return ingest_panel(
        os.path.join(config.data_dir, "panels", f"{state}_{naics}.csv"),
        state=state,
        naics=naics,
    )


def _resolve_spec(config: RunConfig, panel, args) -> ModelSpec:
    """Fill k and r from lag selection and the rank test when not given."""
    case = args.case or config.defaults.johansen_case
    k = args.k
    if k is None:
        selection = select_lags(panel, max_lag=config.defaults.max_lag)
        k = max(1, selection.chosen["byAic"])
    r = args.r
    if r is None:
        r = johansen_test(panel.matrix(), k, case).selected_rank
    return ModelSpec(k=k, r=r, case=case)


def _cmd_ingest(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    print(
        f"ok {panel.state} {panel.naics} {len(panel)} quarters "
        f"{panel.start.label()}..{panel.end.label()}"
    )
    return 0


def _cmd_summarize(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    ident = (panel.state, panel.naics)
    rows = [
        ident
        + (
            name,
            stats["n"],
            fmt3(stats["mean"]),
            fmt3(stats["sd"]),
            fmt3(stats["min"]),
            fmt3(stats["max"]),
        )
        for name, stats in summarize(panel).items()
    ]
    _write_rows(REPORT_HEADERS["summary.csv"], rows)
    return 0


def _cmd_lq(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    aux = load_aux_series(config.data_dir, [args.state], [args.naics])
    records = lq_records_for_panel(panel, aux)
    rows = [
        (rec.state, rec.naics, rec.quarter.label(), fmt6(rec.lq)) for rec in records
    ]
    _write_rows(REPORT_HEADERS["lq.csv"], rows)
    flag = lq_significance(records, config.defaults.lq_threshold)[0]
    print(
        f"# mean_lq={fmt6(flag.mean_lq)} "
        f"significant={'1' if flag.significant else '0'}"
    )
    return 0


def _cmd_adf(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    rows = []
    for name in VARIABLES:
        res = adf_test(panel.series(name).values, args.lag, args.deterministic)
        rows.append(
            (
                panel.state,
                panel.naics,
                name,
                fmt6(res.statistic),
                fmt6(res.critical_values[0.01]),
                fmt6(res.critical_values[0.05]),
                fmt6(res.critical_values[0.10]),
                "1" if res.reject_at_5pct else "0",
            )
        )
    _write_rows(REPORT_HEADERS["adf.csv"], rows)
    return 0


def _cmd_lags(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    selection = select_lags(panel, max_lag=args.max_lag or config.defaults.max_lag)
    rows = []
    for stats in selection.per_lag:
        flags = "+".join(
            sorted(
                key.removeprefix("by").lower()
                for key, lag in selection.chosen.items()
                if lag == stats.lag
            )
        )
        rows.append(
            (
                panel.state,
                panel.naics,
                stats.lag,
                fmt6(stats.log_lik),
                fmt6(stats.aic),
                fmt6(stats.fpe),
                fmt6(stats.hqic),
                fmt6(stats.sbic),
                "" if stats.lr_statistic is None else fmt6(stats.lr_statistic),
                "" if stats.lr_pvalue is None else fmt6(stats.lr_pvalue),
                flags,
            )
        )
    _write_rows(REPORT_HEADERS["lags.csv"], rows)
    return 0


def _cmd_johansen(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    case = args.case or config.defaults.johansen_case
    k = args.k
    if k is None:
        k = max(1, select_lags(panel, max_lag=config.defaults.max_lag).chosen["byAic"])
    res = johansen_test(panel.matrix(), k, case)
    short = DeterministicCase.parse(case).short
    rows = []
    for r in range(len(res.eigenvalues)):
        cv = (
            ""
            if res.critical_values_5pct is None
            else fmt6(res.critical_values_5pct["trace"][r])
        )
        rows.append(
            (
                panel.state,
                panel.naics,
                k,
                short,
                r,
                fmt6(res.eigenvalues[r]),
                fmt6(res.trace_stats[r]),
                cv,
                fmt6(res.max_eig_stats[r]),
                "" if res.selected_rank is None else res.selected_rank,
            )
        )
    _write_rows(REPORT_HEADERS["johansen.csv"], rows)
    return 0


def _fit_rows(fit) -> list[tuple]:
    """Long-format parameter listing: component, row label, column, value."""
    spec = fit.spec
    n = fit.n
    beta_labels = list(VARIABLES[:n])
    if len(beta_labels) < n:
        beta_labels = [f"var{i+1}" for i in range(n)]
    if fit.beta.shape[0] == n + 1:
        beta_labels.append("const")
    rows = []
    for j in range(spec.r):
        for i, label in enumerate(beta_labels):
            rows.append(("beta", label, j + 1, fmt6(fit.beta[i, j])))
        for i in range(n):
            rows.append(("alpha", beta_labels[i], j + 1, fmt6(fit.alpha[i, j])))
    for g, gamma in enumerate(fit.gammas, start=1):
        for i in range(n):
            for j in range(n):
                rows.append((f"gamma{g}", beta_labels[i], j + 1, fmt6(gamma[i, j])))
    for i in range(n):
        rows.append(("mu", beta_labels[i], 1, fmt6(fit.mu[i])))
    for i in range(n):
        for j in range(n):
            rows.append(("sigma", beta_labels[i], j + 1, fmt6(fit.sigma[i, j])))
    return rows


def _cmd_fit(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    spec = _resolve_spec(config, panel, args)
    fit = fit_vecm(panel, spec)
    print(
        f"# {panel.state} {panel.naics} k={spec.k} r={spec.r} "
        f"case={spec.case.short} t_eff={fit.t_eff}"
    )
    _write_rows(("component", "row", "col", "value"), _fit_rows(fit))
    return 0


def _cmd_diagnose(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    spec = _resolve_spec(config, panel, args)
    fit = fit_vecm(panel, spec)
    ident = (panel.state, panel.naics)
    lm_rows = [
        ident + (res.lag, fmt6(res.statistic), res.dof, fmt6(res.pvalue))
        for res in lm_autocorrelation(fit, LM_LAGS)
    ]
    _write_rows(REPORT_HEADERS["lm.csv"], lm_rows)
    print()
    report = normality_tests(fit)
    rows = [
        ident
        + (
            eq.equation,
            fmt6(eq.jb.stat),
            eq.jb.dof,
            fmt6(eq.jb.pvalue),
            fmt6(eq.skew),
            fmt6(eq.skew_test.stat),
            eq.skew_test.dof,
            fmt6(eq.skew_test.pvalue),
            fmt6(eq.kurtosis),
            fmt6(eq.kurtosis_test.stat),
            eq.kurtosis_test.dof,
            fmt6(eq.kurtosis_test.pvalue),
        )
        for eq in report.per_equation
    ]
    rows.append(
        ident
        + (
            "ALL",
            fmt6(report.joint_jb.stat),
            report.joint_jb.dof,
            fmt6(report.joint_jb.pvalue),
            "",
            fmt6(report.joint_skew.stat),
            report.joint_skew.dof,
            fmt6(report.joint_skew.pvalue),
            "",
            fmt6(report.joint_kurtosis.stat),
            report.joint_kurtosis.dof,
            fmt6(report.joint_kurtosis.pvalue),
        )
    )
    _write_rows(REPORT_HEADERS["normality.csv"], rows)
    return 0


def _cmd_forecast(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    spec = _resolve_spec(config, panel, args)
    fit = fit_vecm(panel, spec)
    horizon = args.horizon or config.defaults.horizon
    path = forecast(fit, panel.matrix()[-spec.k :], horizon, origin=panel.end)
    rows = []
    for h, when in enumerate(path.quarters()):
        for j, name in enumerate(VARIABLES):
            rows.append(
                (panel.state, panel.naics, when.label(), name, fmt6(path.values[h, j]), 1)
            )
    _write_rows(REPORT_HEADERS["forecast.csv"], rows)
    return 0


def _cmd_backtest(config, args) -> int:
    panel = _load_panel(config, args.state, args.naics)
    spec = _resolve_spec(config, panel, args)
    holdout = (
        QuarterDate.parse(args.holdout)
        if args.holdout
        else config.defaults.holdout_start
    )
    if holdout is None:
        print("no holdout start given (--holdout or defaults.holdoutStart)", file=sys.stderr)
        return 2
    result = backtest(panel, spec, holdout)
    rows = [
        (
            panel.state,
            panel.naics,
            name,
            fmt6(result.metrics[name]["rmse"]),
            fmt6(result.metrics[name]["mape"]),
        )
        for name in VARIABLES
    ]
    _write_rows(REPORT_HEADERS["backtest.csv"], rows)
    return 0


def _cmd_run(config, args) -> int:
    manifest = run_pipeline(config)
    for entry in manifest.models:
        line = f"{entry['state']} {entry['naics']}: {entry['status']}"
        if entry["status"] == "ok":
            line += f" (k={entry['k']} r={entry['r']} case={entry['case']})"
        else:
            line += f" ({entry['message']})"
        print(line)
    print(f"wrote {len(manifest.files)} reports to {config.out_dir}")
    return 1 if manifest.failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="config.json", help="run configuration path")
    common.add_argument("--out", default=None, help="override output directory")
    common.add_argument("--seed", type=int, default=None, help="override configured seed")

    parser = argparse.ArgumentParser(
        prog="cointegra",
        description="State-industry cointegration and forecasting toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name: str, help_text: str, with_spec: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, parents=[common])
        _model_args(p, with_spec=with_spec)
        return p

    stage("ingest", "validate one panel file")
    stage("summarize", "per-variable summary statistics")
    stage("lq", "location-quotient screening")
    p = stage("adf", "unit-root tests for each variable")
    p.add_argument("--lag", type=int, default=ADF_LAG)
    p.add_argument("--deterministic", default=ADF_CASE)
    p = stage("lags", "lag-order selection criteria")
    p.add_argument("--max-lag", type=int, default=None)
    p = stage("johansen", "cointegration rank test")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--case", default=None)
    stage("fit", "estimate the error-correction model", with_spec=True)
    stage("diagnose", "residual diagnostics", with_spec=True)
    p = stage("forecast", "point forecasts in levels", with_spec=True)
    p.add_argument("--horizon", type=int, default=None)
    p = stage("backtest", "holdout forecast evaluation", with_spec=True)
    p.add_argument("--holdout", default=None, help="first holdout quarter, e.g. 2016Q1")
    sub.add_parser("run", help="full pipeline over all configured models", parents=[common])
    return parser


_COMMANDS = {
    "ingest": _cmd_ingest,
    "summarize": _cmd_summarize,
    "lq": _cmd_lq,
    "adf": _cmd_adf,
    "lags": _cmd_lags,
    "johansen": _cmd_johansen,
    "fit": _cmd_fit,
    "diagnose": _cmd_diagnose,
    "forecast": _cmd_forecast,
    "backtest": _cmd_backtest,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    import os

    args = build_parser().parse_args(argv)
    try:
        config = load_config(
            args.config,
            out_dir=None if args.out is None else os.path.abspath(args.out),
            seed=args.seed,
        )
        return _COMMANDS[args.command](config, args)
    except CointegraError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
