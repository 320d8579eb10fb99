"""Command-line front end: JSON experiment configs in, CSV/JSON reports out.

Exit codes: 0 when every executed check is satisfied, 1 when a deterministic
check failed or a non-vacuous tail bound was violated, 2 for unusable input
(malformed config, unknown theorem, empty suite, bad flags).

Flags override file values (documented precedence: flag > config field >
default).  Reports are schedule-independent at a fixed seed: the JSON body is
byte-identical across repeated runs, with timestamps and runtimes confined to
a separate ``meta`` block (runtime also lands in the CSV's final column,
which is the one column allowed to differ between repeats).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .tensor_core import TensorError, from_diagonal, unfold
from .connections import get_connection, perspective_mean
from .bounds import ratio_spectrum
from .sampling import ENSEMBLES, SamplerSpec, SeedStream, sample_pd
from .oracles import (
    diagonal_ratio_extremes,
    naive_einstein_product,
    naive_trace,
    scalar_mean_formula,
)
from .verify import BoundReport, CheckConfig, ConfigError, THEOREM_IDS, run_check

__all__ = ["main", "CSV_COLUMNS", "load_config", "report_row", "write_reports"]

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2

# Fixed, documented column order; every row parses back into these fields.
CSV_COLUMNS = [
    "theorem",
    "shape",
    "ensemble",
    "connection",
    "q",
    "p",
    "trials",
    "seed",
    "p_hat",
    "ci_low",
    "ci_high",
    "rhs_primary",
    "rhs_printed_variant",
    "satisfied",
    "vacuous",
    "pass_rate_deterministic",
    "runtime_ms",
]


class ConfigFileError(Exception):
    """Raised with a human-readable field diagnostic; maps to exit 2."""


def _field(cfg: dict, name: str, kind, required=False, default=None):
    if name not in cfg:
        if required:
            raise ConfigFileError(f"missing required field '{name}'")
        return default
    value = cfg[name]
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigFileError(f"field '{name}': {exc}") from exc


def load_config(cfg: dict, overrides: dict | None = None) -> CheckConfig:
    """Build a CheckConfig from a parsed JSON object, applying flag overrides."""
    if not isinstance(cfg, dict):
        raise ConfigFileError("config entry must be a JSON object")
    overrides = overrides or {}
    merged = dict(cfg)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value

    theorem = _field(merged, "theorem", str, required=True)
    if theorem not in THEOREM_IDS:
        raise ConfigFileError(
            f"field 'theorem': unknown id {theorem!r}; one of {list(THEOREM_IDS)}"
        )
    shape = _field(merged, "shape", lambda v: [int(m) for m in v], required=True)
    ensemble = _field(merged, "ensemble", str, default="wishart")
    if ensemble not in ENSEMBLES:
        raise ConfigFileError(
            f"field 'ensemble': unknown ensemble {ensemble!r}; one of {list(ENSEMBLES)}"
        )

    conn_field = merged.get("connection", "arithmetic")
    if isinstance(conn_field, str):
        conn_name, conn_params = conn_field, {}
    elif isinstance(conn_field, dict):
        conn_name = conn_field.get("name")
        if not isinstance(conn_name, str):
            raise ConfigFileError("field 'connection.name': must be a string")
        conn_params = dict(conn_field.get("params", {}))
    else:
        raise ConfigFileError("field 'connection': must be a string or object")

    target_scale = None
    target_diagonal = None
    target = merged.get("target")
    if target is not None:
        if not isinstance(target, dict):
            raise ConfigFileError("field 'target': must be an object")
        if "scale" in target:
            target_scale = float(target["scale"])
        if "diagonal" in target:
            target_diagonal = tuple(float(v) for v in target["diagonal"])
        if target_scale is None and target_diagonal is None:
            raise ConfigFileError("field 'target': needs 'scale' or 'diagonal'")

    try:
        return CheckConfig(
            theorem=theorem,
            shape=shape,
            ensemble=ensemble,
            connection=conn_name,
            connection_params=conn_params,
            q=_field(merged, "q", float, default=2.0),
            p=_field(merged, "p", float, default=1.0),
            trials=_field(merged, "trials", int, default=500),
            seed=_field(merged, "seed", int, default=0),
            tolerance=_field(merged, "tolerance", float, default=1e-8),
            spectrum_floor=_field(merged, "spectrum_floor", float, default=0.05),
            target_scale=target_scale,
            target_diagonal=target_diagonal,
            kappa=_field(merged, "kappa", float),
            k_index=_field(merged, "k", int),
            workers=_field(merged, "workers", int, default=1),
            mp_dps=_field(merged, "mp_dps", int, default=40),
        )
    except (ConfigError, TensorError) as exc:
        raise ConfigFileError(str(exc)) from exc


def report_row(report: BoundReport) -> dict:
    params = report.parameters
    tail = report.primary_tail
    conn = params.get("connection", "")
    conn_params = params.get("connection_params") or {}
    if conn_params:
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(conn_params.items()))
        conn = f"{conn}({inner})"
    return {
        "theorem": report.theorem_id,
        "shape": "x".join(str(m) for m in params["shape"]),
        "ensemble": params.get("ensemble", ""),
        "connection": conn,
        "q": params.get("q", ""),
        "p": params.get("p", ""),
        "trials": params.get("trials", ""),
        "seed": params.get("seed", ""),
        "p_hat": tail.estimate.p_hat if tail else "",
        "ci_low": tail.estimate.ci_low if tail else "",
        "ci_high": tail.estimate.ci_high if tail else "",
        "rhs_primary": tail.rhs if tail else "",
        "rhs_printed_variant": (
            tail.rhs_printed if tail and tail.rhs_printed is not None else ""
        ),
        "satisfied": report.satisfied,
        "vacuous": report.vacuous,
        "pass_rate_deterministic": (
            report.pass_rate_deterministic
            if report.pass_rate_deterministic is not None
            else ""
        ),
        "runtime_ms": round(report.runtime_ms, 3),
    }


def write_reports(reports: list[BoundReport], out_dir: Path, base: str) -> tuple[Path, Path]:
    """Write the CSV table and its JSON mirror; returns both paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{base}.csv"
    json_path = out_dir / f"{base}.json"
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for report in reports:
            writer.writerow(report_row(report))
    body = {"reports": [r.to_dict() for r in reports]}
    meta = {
        "generated_unix_time": time.time(),
        "runtimes_ms": [round(r.runtime_ms, 3) for r in reports],
    }
    payload = {"report": body, "meta": meta}
    with json_path.open("w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return csv_path, json_path


def _print_report(report: BoundReport) -> None:
    head = f"[{report.theorem_id}] satisfied={report.satisfied}"
    if report.vacuous:
        head += " (vacuous)"
    rate = report.pass_rate_deterministic
    if rate is not None:
        head += f" deterministic_pass_rate={rate:.4f}"
    print(head)
    for det in report.deterministic:
        print(
            f"    det {det.name} [{det.variant}]: pass {det.pass_rate:.4f} "
            f"worst_margin {det.worst_margin:.3e}"
        )
    for tail in report.tails:
        mark = "vacuous" if tail.vacuous else ("ok" if tail.satisfied else "VIOLATED")
        printed = "" if tail.rhs_printed is None else f" printed_rhs={tail.rhs_printed:.4g}"
        print(
            f"    tail {tail.name}: p_hat={tail.estimate.p_hat:.4g} "
            f"ci=[{tail.estimate.ci_low:.4g},{tail.estimate.ci_high:.4g}] "
            f"rhs={tail.rhs:.4g}{printed} -> {mark}"
        )


def _exit_code(reports: list[BoundReport]) -> int:
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_VIOLATED


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "trials": args.trials,
        "tolerance": args.tolerance,
        "workers": args.workers,
    }


def _cmd_run(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(
            f"config error: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        cfg = load_config(raw, _overrides(args))
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_check(cfg)
    except (ConfigError, TensorError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    base = raw.get("out") or f"{cfg.theorem}_seed{cfg.seed}"
    csv_path, json_path = write_reports([report], Path(args.out_dir), base)
    _print_report(report)
    print(f"wrote {csv_path} and {json_path}")
    return _exit_code([report])


def _cmd_suite(args) -> int:
    try:
        raw = json.loads(Path(args.suite).read_text())
    except OSError as exc:
        print(f"suite error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(
            f"suite error: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    entries = raw.get("runs") if isinstance(raw, dict) else raw
    if not isinstance(entries, list) or not entries:
        print("suite error: need a nonempty list of run configs", file=sys.stderr)
        return EXIT_USAGE
    reports: list[BoundReport] = []
    worst = EXIT_OK
    for idx, entry in enumerate(entries):
        try:
            cfg = load_config(entry, _overrides(args))
            report = run_check(cfg)
        except (ConfigFileError, ConfigError, TensorError) as exc:
            print(f"suite entry {idx}: config error: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_USAGE)
            continue
        reports.append(report)
        _print_report(report)
    if reports:
        base = (raw.get("out") if isinstance(raw, dict) else None) or "suite"
        csv_path, json_path = write_reports(reports, Path(args.out_dir), base)
        print(f"wrote {csv_path} and {json_path}")
        worst = max(worst, _exit_code(reports))
    elif worst == EXIT_OK:
        worst = EXIT_USAGE
    return worst


def _parse_modes(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _cmd_oracle(args) -> int:
    tol = args.tolerance if args.tolerance is not None else 1e-12
    if args.oracle == "einstein_product":
        modes = _parse_modes(args.modes)
        spec = SamplerSpec(shape=modes, ensemble="wishart", spectrum_floor=0.05)
        worst = 0.0
        for trial in range(args.trials):
            x = sample_pd(spec, SeedStream(args.seed, 2 * trial))
            y = sample_pd(spec, SeedStream(args.seed, 2 * trial + 1))
            fast = (x @ y).data
            slow = naive_einstein_product(x, y)
            matrix = unfold(x) @ unfold(y)
            worst = max(
                worst,
                float(np.max(np.abs(fast - slow))),
                float(np.max(np.abs(fast.reshape(matrix.shape) - matrix))),
            )
        print(f"einstein_product max deviation: {worst:.3e}")
        return EXIT_OK if worst <= tol else EXIT_VIOLATED
    if args.oracle == "trace_cyclic":
        modes = _parse_modes(args.modes)
        spec = SamplerSpec(shape=modes, ensemble="wishart", spectrum_floor=0.05)
        worst = 0.0
        for trial in range(args.trials):
            x = sample_pd(spec, SeedStream(args.seed, 2 * trial))
            y = sample_pd(spec, SeedStream(args.seed, 2 * trial + 1))
            lhs = naive_trace(x @ y)
            rhs = naive_trace(y @ x)
            worst = max(worst, abs(lhs - rhs))
        print(f"trace_cyclic max deviation: {worst:.3e}")
        return EXIT_OK if worst <= tol else EXIT_VIOLATED
    if args.oracle == "ratio_spectrum":
        diag = [float(tok) for tok in args.diag.split(",") if tok.strip()]
        conn = get_connection(args.connection, **_conn_params(args))
        z = from_diagonal(diag, [len(diag)])
        got = ratio_spectrum(conn, args.q, z)
        want_min, want_max = diagonal_ratio_extremes(conn, args.q, diag)
        dev = max(abs(got.min - want_min), abs(got.max - want_max))
        print(
            f"ratio_spectrum: library ({got.min:.12g}, {got.max:.12g}) "
            f"oracle ({want_min:.12g}, {want_max:.12g}) deviation {dev:.3e}"
        )
        return EXIT_OK if dev <= tol else EXIT_VIOLATED
    if args.oracle == "scalar_mean":
        conn = get_connection(args.connection, **_conn_params(args))
        x = from_diagonal([args.x], [1])
        y = from_diagonal([args.y], [1])
        lib = float(perspective_mean(x, y, conn).value.data.reshape(())[()].real)
        want = scalar_mean_formula(args.x, args.y, conn)
        dev = abs(lib - want)
        print(f"scalar_mean: library {lib:.12g} formula {want:.12g} deviation {dev:.3e}")
        return EXIT_OK if dev <= tol else EXIT_VIOLATED
    print(f"unknown oracle {args.oracle!r}", file=sys.stderr)
    return EXIT_USAGE


def _conn_params(args) -> dict:
    return {"alpha": args.alpha} if args.alpha is not None else {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensor-means",
        description="Verify tail bounds and order relations for bivariate tensor means.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--tolerance", type=float, default=None, help="override the tolerance")
        p.add_argument("--workers", type=int, default=None, help="parallel trial workers")
        p.add_argument("--out-dir", default="reports", help="report output directory")

    run_p = sub.add_parser("run", help="execute one experiment config")
    run_p.add_argument("--config", required=True, help="path to a JSON config")
    common(run_p)
    run_p.set_defaults(fn=_cmd_run)

    suite_p = sub.add_parser("suite", help="execute a list of configs")
    suite_p.add_argument("--suite", required=True, help="path to a JSON suite file")
    common(suite_p)
    suite_p.set_defaults(fn=_cmd_suite)

    oracle_p = sub.add_parser("oracle", help="brute-force cross-checks")
    oracle_p.add_argument(
        "oracle",
        choices=["einstein_product", "trace_cyclic", "ratio_spectrum", "scalar_mean"],
    )
    oracle_p.add_argument("--modes", default="2,2", help="comma-separated mode sizes")
    oracle_p.add_argument("--seed", type=int, default=0)
    oracle_p.add_argument("--trials", type=int, default=20)
    oracle_p.add_argument("--tolerance", type=float, default=None)
    oracle_p.add_argument("--connection", default="arithmetic")
    oracle_p.add_argument("--alpha", type=float, default=None)
    oracle_p.add_argument("--q", type=float, default=2.0)
    oracle_p.add_argument("--diag", default="4,1")
    oracle_p.add_argument("--x", type=float, default=4.0)
    oracle_p.add_argument("--y", type=float, default=9.0)
    oracle_p.set_defaults(fn=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return EXIT_USAGE if exc.code not in (0,) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
