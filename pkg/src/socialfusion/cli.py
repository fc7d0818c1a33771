"""Command-line front end.

Usage::

    socialfusion SUBCOMMAND --config FILE [--out DIR] [--jobs N] [--seed S]
                 [--trials T] [--log-domain-report]

Subcommands write one file each into the output directory:

=============== =================== ==========================================
subcommand      file                columns / content
=============== =================== ==========================================
simulate        simulate.csv        agent, md, fa, cascade_mass_w0, cascade_mass_w1
sweep           sweep.csv           axis_value, md_final, fa_final, config_hash
cascade-audit   cascade_audit.txt   flags, onset, masses, counterexamples
mc-check        mc_check.csv        n, exact_md, mc_md, stderr, pass
calibrate       calibrate.csv       tau0, fa_final, alpha
=============== =================== ==========================================

Every file ends with ``# socialfusion <version> config_hash=<h> seed=<s>``.
The exit status is 0 on success and 1 if any row or check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cascade_analysis import cascade_report, proposition1_crosscheck
from .config import ConfigError, ScenarioConfig, format_float, load_config
from .fusion_engine import PropagationResult
from .metrics_sweeps import InfeasibleAlphaError, calibrate_tau0, exact_rates, run_config, sweep
from .montecarlo import binomial_stderr, estimate_rates

log = logging.getLogger("socialfusion")

MC_SIGMAS = 4.0
SUBCOMMANDS = ("simulate", "sweep", "cascade-audit", "mc-check", "calibrate")


def trailer(config: ScenarioConfig) -> str:
    return f"# socialfusion {__version__} config_hash={config.config_hash()} seed={config.seed}\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def _write(out: Path, name: str, body: str, config: ScenarioConfig) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(body + trailer(config))
    return path


def _log_domain_report(out: Path, result: PropagationResult, config: ScenarioConfig):
    rows = [
        (n, int(result.pruned_count[n - 1]), *result.pruned_log_mass[n - 1], *result.normalization_drift[n - 1])
        for n in range(1, result.N + 1)
    ]
    header = ["agent", "pruned_states", "pruned_log_mass_w0", "pruned_log_mass_w1", "drift_w0", "drift_w1"]
    _write(out, "log_domain_report.csv", _csv_text(header, rows), config)


def cmd_simulate(config, args) -> int:
    from .cascade_analysis import cascade_mass

    result = run_config(config)
    rates = exact_rates(result)
    mass = cascade_mass(result)
    rows = [(n, rates.md[n - 1], rates.fa[n - 1], *mass[n - 1]) for n in range(1, result.N + 1)]
    _write(args.out, "simulate.csv",
           _csv_text(["agent", "md", "fa", "cascade_mass_w0", "cascade_mass_w1"], rows), config)
    if args.log_domain_report:
        _log_domain_report(args.out, result, config)
    return 0


def cmd_sweep(config, args) -> int:
    if config.sweep_axis is None:
        raise ConfigError("sweep needs sweep_axis and sweep_values in the config")
    rows = sweep(config, config.sweep_axis, config.sweep_values, jobs=args.jobs)
    for row in rows:
        if row.failed:
            log.error("sweep point %s failed: %s", row.axis_value, row.error)
    _write(args.out, "sweep.csv", _csv_text(
        ["axis_value", "md_final", "fa_final", "config_hash"],
        [(r.axis_value, r.md_final, r.fa_final, r.config_hash) for r in rows],
    ), config)
    return 1 if any(r.failed for r in rows) else 0


def cmd_cascade_audit(config, args) -> int:
    result = run_config(config)
    report = cascade_report(result)
    agree, _ = proposition1_crosscheck(result)
    lines = [
        f"kernel = {result.kernel.describe()}",
        f"N = {result.N}",
        f"belief_bounds = {format_float(result.model.lower_bound)}, {format_float(result.model.upper_bound)}",
        f"strong_consistent = {_cell(report.strong_consistent)}",
        f"weak_consistent = {_cell(report.weak_consistent)}",
        f"weakly_invertible = {_cell(report.weakly_invertible)}",
        f"theorem2 = {'not-applicable' if report.theorem2 is None else _cell(report.theorem2)}",
        f"interval_predicate_agrees = {_cell(agree)}",
        f"first_onset = {report.first_onset if report.first_onset is not None else 'none'}",
        "",
        "agent,cascade_states,cascade_mass_w0,cascade_mass_w1",
    ]
    for n in range(1, result.N + 1):
        m0, m1 = report.cascade_mass[n - 1]
        lines.append(f"{n},{len(report.local_cascade_states[n - 1])},{format_float(m0)},{format_float(m1)}")
    for name, items in report.counterexamples.items():
        lines += ["", f"[{name}] {len(items)} counterexample(s)"]
        for v in items[:50]:
            lines.append(
                f"step={v.step} from={v.prev_state} x={v.x} to={v.state} "
                f"tau_prev={format_float(v.prev_tau)} tau={format_float(v.tau)} {v.note}".rstrip()
            )
    lines += ["", f"[boundary_states] {len(report.boundary_states)}"]
    lines += [f"step={n} state={g} tau={format_float(t)}" for n, g, t in report.boundary_states]
    _write(args.out, "cascade_audit.txt", "\n".join(lines) + "\n", config)
    if args.log_domain_report:
        _log_domain_report(args.out, result, config)

    failed = report.theorem2 is False or not agree
    if report.weakly_invertible and not report.weak_consistent:
        failed = True
    if config.p_b == 0 and report.strong_consistent and not report.weak_consistent:
        failed = True
    return 1 if failed else 0


def cmd_mc_check(config, args) -> int:
    result = run_config(config)
    exact = exact_rates(result).md
    est = estimate_rates(result, config.trials, config.seed)
    sigma = np.maximum(est.md_stderr, binomial_stderr(exact, config.trials))
    ok = np.abs(exact - est.md) <= MC_SIGMAS * sigma
    rows = [(n, exact[n - 1], est.md[n - 1], est.md_stderr[n - 1], bool(ok[n - 1]))
            for n in range(1, result.N + 1)]
    _write(args.out, "mc_check.csv", _csv_text(["n", "exact_md", "mc_md", "stderr", "pass"], rows), config)
    if args.log_domain_report:
        _log_domain_report(args.out, result, config)
    return 0 if ok.all() else 1


def cmd_calibrate(config, args) -> int:
    model, kernel, adv = config.signal_model(), config.social_kernel(), config.adversary()
    try:
        tau0, fa = calibrate_tau0(model, kernel, adv, config.alpha, config.N, config.tau0_grid)
    except InfeasibleAlphaError as exc:
        log.error("%s", exc)
        return 1
    _write(args.out, "calibrate.csv", _csv_text(["tau0", "fa_final", "alpha"], [(tau0, fa, config.alpha)]), config)
    if args.log_domain_report:
        _log_domain_report(args.out, run_config(config.replace(tau0=tau0)), config)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "cascade-audit": cmd_cascade_audit,
    "mc-check": cmd_mc_check,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialfusion", description=__doc__.split("\n\n")[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, type=Path, help="scenario config file")
    parser.add_argument("--out", type=Path, help="output directory (default: config 'output')")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--trials", type=int, help="override the config Monte Carlo trials")
    parser.add_argument("--log-domain-report", action="store_true",
                        help="also write per-step pruned mass and normalisation drift")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if overrides:
            config = config.replace(**overrides)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        args.out = Path(config.output)
    try:
        return COMMANDS[args.subcommand](config, args)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"{args.subcommand} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
