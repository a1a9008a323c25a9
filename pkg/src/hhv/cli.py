"""Command-line surface: certifiers, chain evaluators, and search.

JSON reports go to stdout (keys sorted, deterministic apart from the
``timings`` field); a one-line human summary goes to stderr.  Exit codes:
0 the property or chain holds, 1 a violation was found, 2 usage or config
error, 3 numeric failure (domain error, positivity, non-convergence).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .chains import (
    CHAIN_IDS, ChainReport, eval_classic_hh, eval_dragomir_mond,
    eval_theorem1, eval_theorem2, VERDICT_CHAIN_HOLDS,
)
from .convexity import (
    ConvexityReport, PhiMap, SamplePlan, VERDICT_HOLDS,
    check_convex, check_log_convex, check_log_phi_convex,
    check_log_phi_midconvex, check_phi_convex,
)
from .errors import HHVError, ParseError
from .expr import Interval, parse
from .search import FAMILIES, FamilySpec, SearchTarget, find_counterexample

EXIT_HOLDS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_CLASS_FLAGS = {
    "convex": "convex",
    "log-convex": "log_convex",
    "phi-convex": "phi_convex",
    "log-phi-convex": "log_phi_convex",
    "log-phi-midconvex": "log_phi_midconvex",
}
_PHI_CLASSES = ("phi_convex", "log_phi_convex", "log_phi_midconvex")

_HOLD_VERDICTS = (VERDICT_HOLDS, VERDICT_CHAIN_HOLDS, "no_violation_found")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    f_text: str | None = None
    g_text: str | None = None
    phi_text: str | None = None
    a: float | None = None
    b: float | None = None
    check_class: str | None = None
    chain_id: str | None = None
    target: str | None = None
    f_family: str | None = None
    f_degree: int = 2
    f_coeff_min: float = 0.0
    f_coeff_max: float = 2.0
    phi_family: str = "identity"
    phi_degree: int = 2
    grid_x: int = 33
    grid_t: int = 17
    samples: int = 4096
    seed: int = 0
    quad_tol: float = 1e-10
    tolerance: float | None = None
    budget: int = 100
    output_format: str = "json"
    diagnostics: bool = False
    input_path: str | None = None


# ----------------------------- argument handling ------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhv",
        description="Numerical certifiers for generalized convexity classes and "
                    "Hermite-Hadamard-type inequality chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, functions: bool) -> None:
        if functions:
            p.add_argument("--f", dest="f_text", help="expression for f(x)")
            p.add_argument("--g", dest="g_text", help="expression for g(x)")
            p.add_argument("--phi", dest="phi_text",
                           help="deformation map (default: identity 'x')")
            p.add_argument("--a", type=float, help="left endpoint")
            p.add_argument("--b", type=float, help="right endpoint")
        p.add_argument("--seed", type=int, help="seed (default: $HHV_SEED or 0)")
        p.add_argument("--quad-tol", dest="quad_tol", type=float,
                       help="quadrature tolerance (default 1e-10)")
        p.add_argument("--tol", dest="tolerance", type=float,
                       help="margin tolerance (default 1e-9 checks, 1e-8 chains)")
        p.add_argument("--grid-x", dest="grid_x", type=int, help="x lattice size")
        p.add_argument("--grid-t", dest="grid_t", type=int, help="t lattice size (odd)")
        p.add_argument("--samples", type=int, help="random triples per check")
        p.add_argument("--format", dest="output_format",
                       choices=("json", "csv", "human"), help="stdout format")
        p.add_argument("--diagnostics", action="store_true", default=None,
                       help="include proof-intermediate diagnostic terms")
        p.add_argument("--config", help="JSON config file merged under explicit flags")

    p_check = sub.add_parser("check", help="certify a convexity class on samples")
    p_check.add_argument("--class", dest="check_class", choices=sorted(_CLASS_FLAGS),
                         help="convexity class to certify")
    common(p_check, functions=True)

    p_chain = sub.add_parser("chain", help="evaluate an inequality chain term by term")
    p_chain.add_argument("--id", dest="chain_id",
                         help=f"chain id: {', '.join(CHAIN_IDS)}")
    common(p_chain, functions=True)

    p_search = sub.add_parser("search", help="seeded counterexample search")
    p_search.add_argument("--target", help="check:<class> or chain:<id>")
    p_search.add_argument("--f-family", dest="f_family", choices=FAMILIES)
    p_search.add_argument("--f-degree", dest="f_degree", type=int)
    p_search.add_argument("--f-coeff-min", dest="f_coeff_min", type=float)
    p_search.add_argument("--f-coeff-max", dest="f_coeff_max", type=float)
    p_search.add_argument("--phi-family", dest="phi_family",
                          choices=("identity", "poly"))
    p_search.add_argument("--phi-degree", dest="phi_degree", type=int)
    p_search.add_argument("--budget", type=int, help="number of trials")
    p_search.add_argument("--a", type=float, help="left endpoint")
    p_search.add_argument("--b", type=float, help="right endpoint")
    common(p_search, functions=False)

    p_report = sub.add_parser("report", help="re-render a saved JSON report")
    p_report.add_argument("--input", dest="input_path",
                          help="report path, or '-' for stdin")
    p_report.add_argument("--format", dest="output_format",
                          choices=("json", "csv", "human"))
    return parser


def _resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge precedence: explicit flag > config file > built-in default."""
    file_cfg: dict = {}
    cfg_path = getattr(ns, "config", None)
    if cfg_path:
        try:
            with open(cfg_path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config file {cfg_path}: {err}") from err
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    defaults = RunConfig(command=ns.command)

    def pick(field: str):
        flag = getattr(ns, field, None)
        if flag is not None:
            return flag
        if field in file_cfg:
            return file_cfg[field]
        return getattr(defaults, field)

    seed = getattr(ns, "seed", None)
    if seed is None:
        seed = file_cfg.get("seed")
    if seed is None:
        seed = int(os.environ.get("HHV_SEED", "0"))
    check_class = getattr(ns, "check_class", None)
    if check_class is None and "check_class" in file_cfg:
        check_class = file_cfg["check_class"]
    if check_class in _CLASS_FLAGS:
        check_class = _CLASS_FLAGS[check_class]
    chain_id = pick("chain_id") if hasattr(ns, "chain_id") or "chain_id" in file_cfg else None
    if isinstance(chain_id, str):
        chain_id = chain_id.replace("-", "_")

    cfg = RunConfig(
        command=ns.command,
        f_text=pick("f_text"),
        g_text=pick("g_text"),
        phi_text=pick("phi_text"),
        a=pick("a"),
        b=pick("b"),
        check_class=check_class,
        chain_id=chain_id,
        target=pick("target"),
        f_family=pick("f_family"),
        f_degree=int(pick("f_degree")),
        f_coeff_min=float(pick("f_coeff_min")),
        f_coeff_max=float(pick("f_coeff_max")),
        phi_family=pick("phi_family"),
        phi_degree=int(pick("phi_degree")),
        grid_x=int(pick("grid_x")),
        grid_t=int(pick("grid_t")),
        samples=int(pick("samples")),
        seed=int(seed),
        quad_tol=float(pick("quad_tol")),
        tolerance=pick("tolerance"),
        budget=int(pick("budget")),
        output_format=pick("output_format") or "json",
        diagnostics=bool(pick("diagnostics")),
        input_path=pick("input_path"),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.command in ("check", "chain"):
        if cfg.f_text is None:
            raise ConfigError("--f is required")
        if cfg.a is None or cfg.b is None:
            raise ConfigError("--a and --b are required")
        if not cfg.a < cfg.b:
            raise ConfigError(f"need a < b, got a={cfg.a}, b={cfg.b}")
    if cfg.command == "check" and cfg.check_class is None:
        raise ConfigError("--class is required")
    if cfg.command == "chain":
        if cfg.chain_id not in CHAIN_IDS:
            raise ConfigError(f"--id must be one of {', '.join(CHAIN_IDS)}")
        if cfg.chain_id == "theorem2" and cfg.g_text is None:
            raise ConfigError("--g is required for the theorem2 chain")
    if cfg.command == "search":
        if cfg.target is None:
            raise ConfigError("--target is required (check:<class> or chain:<id>)")
        if cfg.f_family is None:
            raise ConfigError("--f-family is required")
        if cfg.a is None or cfg.b is None:
            raise ConfigError("--a and --b are required")
        if not cfg.a < cfg.b:
            raise ConfigError(f"need a < b, got a={cfg.a}, b={cfg.b}")
        if cfg.budget < 1:
            raise ConfigError(f"--budget must be >= 1, got {cfg.budget}")
    if cfg.command == "report" and cfg.input_path is None:
        raise ConfigError("--input is required")
    if cfg.quad_tol <= 0:
        raise ConfigError("--quad-tol must be positive")
    if cfg.tolerance is not None and cfg.tolerance <= 0:
        raise ConfigError("--tol must be positive")


# ----------------------------- command execution ------------------------------

def _sampler(cfg: RunConfig) -> SamplePlan:
    return SamplePlan(x_points=cfg.grid_x, t_points=cfg.grid_t,
                      random_count=cfg.samples, seed=cfg.seed)


def _triple_dict(triple) -> dict | None:
    if triple is None:
        return None
    return {"x": triple.x, "y": triple.y, "t": triple.t}


def _check_payload(report: ConvexityReport) -> tuple[dict, int]:
    payload = {
        "verdict": report.verdict,
        "class": report.class_checked,
        "min_margin": report.min_margin,
        "samples_tested": report.samples_tested,
        "tolerance": report.tolerance,
        "witness": _triple_dict(report.witness),
        "failure_kind": report.failure_kind,
    }
    code = EXIT_HOLDS if report.verdict == VERDICT_HOLDS else EXIT_VIOLATION
    return payload, code


def _chain_payload(report: ChainReport) -> tuple[dict, int]:
    payload = {
        "verdict": report.verdict,
        "chain_id": report.chain_id,
        "terms": [{"name": n, "value": v} for n, v in report.terms],
        "margins": list(report.pair_margins),
        "violated_links": list(report.violated_links),
        "tolerance": report.tolerance,
        "quad_tol": report.quad_tol,
        "notes": list(report.notes),
    }
    if report.diagnostics is not None:
        payload["diagnostics"] = report.diagnostics
    code = EXIT_HOLDS if report.verdict == VERDICT_CHAIN_HOLDS else EXIT_VIOLATION
    return payload, code


def _run_check(cfg: RunConfig) -> tuple[dict, int]:
    f = parse(cfg.f_text)
    interval = Interval(cfg.a, cfg.b)
    sampler = _sampler(cfg)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-9
    name = cfg.check_class
    if name in _PHI_CLASSES:
        phi = PhiMap(parse(cfg.phi_text or "x"), interval)
        fn = {"phi_convex": check_phi_convex,
              "log_phi_convex": check_log_phi_convex,
              "log_phi_midconvex": check_log_phi_midconvex}[name]
        report = fn(f, phi, sampler, tolerance=tol)
    elif name == "log_convex":
        report = check_log_convex(f, interval, sampler, tolerance=tol)
    else:
        report = check_convex(f, interval, sampler, tolerance=tol)
    return _check_payload(report)


def _run_chain(cfg: RunConfig) -> tuple[dict, int]:
    f = parse(cfg.f_text)
    interval = Interval(cfg.a, cfg.b)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    if cfg.chain_id == "classic_hh":
        report = eval_classic_hh(f, interval, cfg.quad_tol, tol)
    elif cfg.chain_id == "dragomir_mond":
        report = eval_dragomir_mond(f, interval, cfg.quad_tol, tol)
    elif cfg.chain_id == "theorem1":
        phi = PhiMap(parse(cfg.phi_text or "x"), interval)
        report = eval_theorem1(f, phi, cfg.quad_tol, tol,
                               include_diagnostics=cfg.diagnostics)
    else:
        phi = PhiMap(parse(cfg.phi_text or "x"), interval)
        report = eval_theorem2(f, parse(cfg.g_text), phi, cfg.quad_tol, tol,
                               include_diagnostics=cfg.diagnostics)
    return _chain_payload(report)


def _run_search(cfg: RunConfig) -> tuple[dict, int]:
    kind, _, name = cfg.target.partition(":")
    name = name.replace("-", "_")
    target = SearchTarget(kind, name)
    domain = Interval(cfg.a, cfg.b)
    f_spec = FamilySpec(cfg.f_family, cfg.f_degree,
                        (cfg.f_coeff_min, cfg.f_coeff_max))
    phi_spec = None
    if cfg.phi_family == "poly":
        phi_spec = FamilySpec("positive_poly", max(1, cfg.phi_degree),
                              (0.1, max(0.2, cfg.f_coeff_max)))
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-9
    outcome = find_counterexample(
        target, f_spec, phi_spec, domain, cfg.budget, cfg.seed,
        sampler=_sampler(cfg), tolerance=tol, quad_tol=cfg.quad_tol,
    )
    payload: dict = {
        "verdict": "violation_found" if outcome.found else "no_violation_found",
        "found": outcome.found,
        "trials": outcome.trials,
        "budget": cfg.budget,
        "skipped": outcome.skipped,
        "witness": None,
    }
    if outcome.witness is not None:
        w = outcome.witness
        if isinstance(w.report, ChainReport):
            detail, _ = _chain_payload(w.report)
        else:
            detail, _ = _check_payload(w.report)
        payload["witness"] = {
            "f": w.f_text, "phi": w.phi_text, "g": w.g_text,
            "trial": w.trial, "report": detail,
        }
    return payload, EXIT_VIOLATION if outcome.found else EXIT_HOLDS


def _run_report(cfg: RunConfig) -> tuple[dict, int]:
    try:
        if cfg.input_path == "-":
            saved = json.load(sys.stdin)
        else:
            with open(cfg.input_path, encoding="utf-8") as fh:
                saved = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read report: {err}") from err
    if not isinstance(saved, dict) or "verdict" not in saved:
        raise ConfigError("input is not a report produced by this tool")
    code = EXIT_HOLDS if saved.get("verdict") in _HOLD_VERDICTS else EXIT_VIOLATION
    return saved, code


# ----------------------------- output ----------------------------------------

def _to_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if "terms" in payload and payload["terms"]:
        writer.writerow(["index", "name", "value", "margin_to_next"])
        margins = payload.get("margins", [])
        for i, term in enumerate(payload["terms"]):
            margin = margins[i] if i < len(margins) else ""
            writer.writerow([i, term["name"], repr(term["value"]),
                             repr(margin) if margin != "" else ""])
    else:
        keys = [k for k in sorted(payload) if not isinstance(payload[k], (dict, list))]
        writer.writerow(keys)
        writer.writerow([payload[k] for k in keys])
    return buf.getvalue()


def _to_human(payload: dict) -> str:
    lines = [f"verdict: {payload.get('verdict')}"]
    if "class" in payload:
        lines.append(f"class: {payload['class']}")
        lines.append(f"min margin: {payload.get('min_margin')!r} "
                     f"over {payload.get('samples_tested')} samples")
        if payload.get("witness"):
            w = payload["witness"]
            lines.append(f"witness: x={w['x']!r} y={w['y']!r} t={w['t']!r}")
    for term in payload.get("terms", []):
        lines.append(f"  {term['name']:32s} {term['value']!r}")
    if payload.get("margins"):
        lines.append(f"margins: {[repr(m) for m in payload['margins']]}")
    if "found" in payload:
        lines.append(f"found: {payload['found']} after {payload.get('trials')} trials")
        if payload.get("witness"):
            lines.append(f"witness f: {payload['witness'].get('f')}")
    for note in payload.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _emit(payload: dict, cfg: RunConfig, started: float) -> None:
    payload = dict(payload)
    payload["tool_version"] = __version__
    payload["command"] = cfg.command
    payload["config_echo"] = asdict(cfg)
    payload["seed"] = cfg.seed
    payload["timings"] = {"total_s": round(time.perf_counter() - started, 6)}
    if cfg.output_format == "csv":
        sys.stdout.write(_to_csv(payload))
    elif cfg.output_format == "human":
        sys.stdout.write(_to_human(payload))
    else:
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    summary = f"hhv {cfg.command}: {payload.get('verdict', 'error')}"
    if "min_margin" in payload:
        summary += f" (min margin {payload['min_margin']!r})"
    print(summary, file=sys.stderr)


def _emit_error(err: Exception, command: str, started: float, code: int) -> int:
    payload = {
        "tool_version": __version__,
        "command": command,
        "error": {"type": type(err).__name__, "message": str(err)},
        "verdict": "error",
        "timings": {"total_s": round(time.perf_counter() - started, 6)},
    }
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print(f"hhv {command}: error: {err}", file=sys.stderr)
    return code


# ----------------------------- entry point ------------------------------------

_RUNNERS = {
    "check": _run_check,
    "chain": _run_chain,
    "search": _run_search,
    "report": _run_report,
}


def main(argv: list[str] | None = None) -> int:
    started = time.perf_counter()
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage to stderr
        return int(exc.code or 0)
    command = ns.command
    try:
        cfg = _resolve_config(ns)
    except (ConfigError, ValueError) as err:
        return _emit_error(err, command, started, EXIT_USAGE)
    try:
        payload, code = _RUNNERS[command](cfg)
    except (ParseError, ConfigError) as err:
        return _emit_error(err, command, started, EXIT_USAGE)
    except ValueError as err:
        return _emit_error(err, command, started, EXIT_USAGE)
    except HHVError as err:
        return _emit_error(err, command, started, EXIT_NUMERIC)
    _emit(payload, cfg, started)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
