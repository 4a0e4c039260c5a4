"""Command-line entry point: ``mdpc <verb> <sub-verb> [options]``.

Every run resolves its parameters as flags > ``--config`` file > defaults and
emits a manifest echoing them.  ``mdpc replay MANIFEST`` re-runs a manifest.
Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .bounds import exact_bias, scenario_dfr
from .construct import (
    ConstructionBudget,
    GallagerParams,
    QcParams,
    construct_certified,
    default_target_s,
)
from .core import expand_qc
from .decode import decode
from .errors import FormatError, MdpcError
from .intersect import max_column_intersection, qc_max_intersection
from .io import dumps, key_to_dict, load_key, load_matrix, load_word, matrix_to_dict, read_json, word_to_dict, write_json
from .sim import (
    RECORD_COLUMNS,
    SEARCH_COLUMNS,
    TrialPlan,
    coincidence_test,
    estimate_s_percentile,
    run_dfr,
    search_scenario_params,
)

MANIFEST_SCHEMA = "mdpc.manifest/1"
REQUIRED = object()


class UsageError(Exception):
    """Bad command line or config; mapped to exit code 2."""


def int_list(value: Any) -> list[int]:
    """Parse ``"a,b,c"`` or an inclusive range ``"start:stop[:step]"`` (lists pass through)."""
    if isinstance(value, list):
        return [int(x) for x in value]
    text = str(value)
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {value!r}") from None


@dataclass(frozen=True)
class Opt:
    dest: str
    type: Callable | None = None
    default: Any = None
    help: str = ""
    choices: tuple | None = None

    @property
    def flag(self) -> str:
        return "--" + self.dest.replace("_", "-")


OUT = Opt("out", str, None, "output path")
SEED = Opt("seed", int, 0, "master seed; the only source of randomness")

COMMANDS: dict[tuple[str, ...], list[Opt]] = {
    ("construct", "gallager"): [
        Opt("n", int, REQUIRED, "code length"),
        Opt("w", int, REQUIRED, "row weight"),
        Opt("v", int, REQUIRED, "column weight"),
        Opt("r", int, None, "number of rows (default n*v/w)"),
        SEED,
        Opt("max_attempts", int, 1000, "rejection-sampling budget"),
        Opt("target_s", int, None, "max column intersection to certify (default ceil(2.5 ln n / ln ln n))"),
        Opt("out", str, REQUIRED, "matrix JSON path"),
        Opt("certificate", str, None, "certificate sidecar path (default <out>.cert.json)"),
    ],
    ("construct", "qc"): [
        Opt("p", int, REQUIRED, "circulant block size"),
        Opt("half_weight", int, REQUIRED, "weight of each block's first row"),
        SEED,
        Opt("max_attempts", int, 1000, "rejection-sampling budget"),
        Opt("target_s", int, None, "max column intersection to certify (default ceil(2.5 ln n / ln ln n))"),
        Opt("out", str, REQUIRED, "key JSON path"),
        Opt("certificate", str, None, "certificate sidecar path (default <out>.cert.json)"),
        Opt("matrix_out", str, None, "also write the expanded matrix here"),
    ],
    ("analyze", "intersections"): [
        Opt("matrix", str, None, "matrix JSON"),
        Opt("qc", str, None, "QC key JSON (analysed without expansion)"),
        OUT,
    ],
    ("decode",): [
        Opt("matrix", str, REQUIRED, "matrix JSON"),
        Opt("word", str, REQUIRED, "received word JSON"),
        Opt("iters", int, 1, "number of bit-flipping iterations N"),
        Opt("report", str, None, "decode report JSON path"),
        Opt("out", str, None, "decoded word JSON path"),
    ],
    ("bound", "bias"): [
        Opt("n", int, REQUIRED, "code length"),
        Opt("w", int, REQUIRED, "check weight"),
        Opt("t", int, REQUIRED, "error weight"),
        Opt("mode", str, "auto", "exact rationals, float, or auto (exact up to n = 10^4)",
            ("auto", "exact", "eps")),
        Opt("format", str, "text", "stdout format", ("text", "json")),
    ],
    ("bound", "dfr"): [
        Opt("n", int, REQUIRED, "code length"),
        Opt("w", int, REQUIRED, "row weight"),
        Opt("t", int, REQUIRED, "error weight"),
        Opt("scenario", str, REQUIRED, "parameter-selection scenario", ("I", "II", "III", "IV")),
        Opt("s", int, None, "max column intersection (scenarios I and II)"),
        Opt("alpha", float, None, "residual-contraction ratio (III: 0.5, IV: 0.75)"),
        Opt("v", int, None, "column weight (default w/2)"),
        Opt("p_mode", str, "exact", "conditional check probabilities", ("exact", "eps")),
        Opt("target_bits", int, 80, "security target lambda"),
        OUT,
    ],
    ("sim", "dfr"): [
        Opt("matrix", str, None, "matrix JSON"),
        Opt("qc_key", str, None, "QC key JSON"),
        Opt("construct", str, None, "sample a fresh code", ("gallager", "qc")),
        Opt("n", int, None, "Gallager: code length"),
        Opt("w", int, None, "Gallager: row weight"),
        Opt("v", int, None, "Gallager: column weight"),
        Opt("p", int, None, "QC: block size"),
        Opt("half_weight", int, None, "QC: block weight"),
        Opt("t", int, REQUIRED, "error weight"),
        Opt("trials", int, 1000, "number of trials"),
        SEED,
        Opt("iters", int, 1, "bit-flipping iterations N"),
        Opt("out", str, None, "CSV path (stdout if omitted)"),
    ],
    ("sim", "coincidence"): [
        Opt("n", int, REQUIRED, "code length"),
        Opt("w", int, REQUIRED, "row weight"),
        Opt("v", int, REQUIRED, "column weight"),
        Opt("matrices", int, 20, "number of sampled matrices"),
        Opt("pairs", int, 2000, "column pairs per matrix"),
        SEED,
        OUT,
    ],
    ("sim", "estimate-s"): [
        Opt("construct", str, "qc", "sampler", ("gallager", "qc")),
        Opt("p", int, None, "QC: block size"),
        Opt("half_weight", int, None, "QC: block weight"),
        Opt("n", int, None, "Gallager: code length"),
        Opt("w", int, None, "Gallager: row weight"),
        Opt("v", int, None, "Gallager: column weight"),
        Opt("samples", int, 50, "number of sampled matrices"),
        Opt("percentile", float, 0.2, "fraction of samples that must have max_s <= s0"),
        SEED,
        OUT,
    ],
    ("sim", "search"): [
        Opt("scenario", str, REQUIRED, "parameter-selection scenario", ("I", "II", "III", "IV")),
        Opt("t", int, REQUIRED, "error weight"),
        Opt("target_bits", int, 80, "security target lambda"),
        Opt("n_values", int_list, REQUIRED, "code lengths: a,b,c or start:stop[:step]"),
        Opt("w_values", int_list, REQUIRED, "row weights: a,b,c or start:stop[:step]"),
        Opt("samples", int, 50, "keys sampled per point for the s estimate"),
        Opt("percentile", float, 0.2, "percentile for the s estimate"),
        Opt("alpha", float, None, "override the scenario's contraction ratio"),
        Opt("p_mode", str, "exact", "conditional check probabilities", ("exact", "eps")),
        SEED,
        Opt("out", str, None, "CSV path for the full table"),
    ],
}


def config_merge(file_cfg: dict | None, flags: dict, defaults: dict) -> dict:
    """Resolve parameters with precedence flags > config file > defaults."""
    merged = dict(defaults)
    for source in (file_cfg or {}), flags:
        merged.update({k: v for k, v in source.items() if k in defaults})
    return merged


def _read_config(path: str, opts: list[Opt]) -> dict:
    try:
        raw = read_json(path)
    except (OSError, FormatError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if isinstance(raw, dict) and raw.get("schema") == MANIFEST_SCHEMA:
        raw = raw.get("params", {})
    if not isinstance(raw, dict):
        raise UsageError(f"config {path} must be a JSON object")
    known = {o.dest: o for o in opts}
    out = {}
    for key, value in raw.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known:
            raise UsageError(f"config {path}: unknown parameter {key!r}")
        opt = known[dest]
        if value is not None and opt.type is not None:
            try:
                value = opt.type(value)
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config {path}: bad value for {key!r}: {exc}") from None
        if opt.choices and value not in opt.choices:
            raise UsageError(f"config {path}: {key!r} must be one of {list(opt.choices)}")
        out[dest] = value
    return out


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        value = flag
    elif os.environ.get("MDPC_THREADS"):
        try:
            value = int(os.environ["MDPC_THREADS"])
        except ValueError:
            raise UsageError("MDPC_THREADS must be an integer") from None
    else:
        value = os.cpu_count() or 1
    if value < 1:
        raise UsageError("thread count must be >= 1")
    return value


# ---------------------------------------------------------------- handlers


def _certify(params, cfg: dict, n: int):
    if cfg["target_s"] is None:
        cfg["target_s"] = default_target_s(n)
    if cfg["certificate"] is None:
        cfg["certificate"] = cfg["out"] + ".cert.json"
    return construct_certified(params, ConstructionBudget(cfg["max_attempts"], cfg["target_s"]))


def _write_certificate(cfg: dict, result, kind: str) -> dict:
    cert = {"schema": "mdpc.certificate/1", "kind": kind, **result.certificate()}
    write_json(cfg["certificate"], cert)
    return cert


def cmd_construct_gallager(cfg: dict, threads: int) -> dict:
    params = GallagerParams(cfg["n"], cfg["w"], cfg["v"], cfg["r"], cfg["seed"])
    cfg["r"] = params.r
    result = _certify(params, cfg, params.n)
    write_json(cfg["out"], matrix_to_dict(result.code.matrix))
    return _write_certificate(cfg, result, "gallager")


def cmd_construct_qc(cfg: dict, threads: int) -> dict:
    params = QcParams(cfg["p"], cfg["half_weight"], cfg["seed"])
    result = _certify(params, cfg, params.n)
    write_json(cfg["out"], key_to_dict(result.key))
    if cfg["matrix_out"]:
        write_json(cfg["matrix_out"], matrix_to_dict(result.code.matrix))
    return _write_certificate(cfg, result, "quasi_cyclic")


def cmd_analyze_intersections(cfg: dict, threads: int) -> dict:
    if (cfg["matrix"] is None) == (cfg["qc"] is None):
        raise UsageError("give exactly one of --matrix or --qc")
    if cfg["matrix"]:
        m = load_matrix(cfg["matrix"])
        profile = max_column_intersection(m)
        v_min = int(m.col_weights.min()) if m.rows else 0
    else:
        key = load_key(cfg["qc"])
        profile = qc_max_intersection(key)
        v_min = min(len(key.h0), len(key.h1))
    out = {"schema": "mdpc.intersections/1", **profile.to_dict(v_min)}
    if cfg["out"]:
        write_json(cfg["out"], out)
    return out


def cmd_decode(cfg: dict, threads: int) -> dict:
    m = load_matrix(cfg["matrix"])
    report = decode(m, load_word(cfg["word"]), cfg["iters"])
    if cfg["report"]:
        write_json(cfg["report"], report.to_dict())
    if cfg["out"]:
        write_json(cfg["out"], word_to_dict(report.output))
    return report.to_dict()


def _fmt_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def cmd_bound_bias(cfg: dict, threads: int) -> dict:
    exact = {"auto": None, "exact": True, "eps": False}[cfg["mode"]]
    b = exact_bias(cfg["n"], cfg["w"], cfg["t"], exact=exact)
    return {
        "schema": "mdpc.bias/1",
        "n": b.n,
        "w": b.w,
        "t": b.t,
        "exact": b.exact,
        "delta": _fmt_number(b.delta),
        "delta_float": float(b.delta),
        "p_odd": _fmt_number(b.p_odd),
        "eps": b.eps_approx,
    }


def _print_bias(out: dict, stream) -> None:
    print(f"δ = {out['delta']}", file=stream)
    print(f"ε = {out['eps']!r}", file=stream)
    print(f"P(check violated) = {out['p_odd']}", file=stream)


def cmd_bound_dfr(cfg: dict, threads: int) -> dict:
    res = scenario_dfr(
        cfg["n"], cfg["w"], cfg["t"], cfg["scenario"], s=cfg["s"], alpha=cfg["alpha"],
        v=cfg["v"], p_mode=cfg["p_mode"], target_bits=cfg["target_bits"],
    )
    out = res.to_dict()
    if cfg["out"]:
        write_json(cfg["out"], out)
    return out


def _code_source(cfg: dict) -> dict:
    given = [k for k in ("matrix", "qc_key", "construct") if cfg[k] is not None]
    if len(given) != 1:
        raise UsageError("give exactly one code source: --matrix, --qc-key or --construct")
    if cfg["matrix"]:
        return {"matrix": load_matrix(cfg["matrix"])}
    if cfg["qc_key"]:
        return {"matrix": expand_qc(load_key(cfg["qc_key"]))}
    if cfg["construct"] == "gallager":
        _need(cfg, "n", "w", "v")
        return {"construction": GallagerParams(cfg["n"], cfg["w"], cfg["v"], seed=cfg["seed"])}
    _need(cfg, "p", "half_weight")
    return {"construction": QcParams(cfg["p"], cfg["half_weight"], cfg["seed"])}


def _need(cfg: dict, *names: str) -> None:
    missing = [n for n in names if cfg.get(n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _write_csv(rows: list[dict], columns: list[str], path: str | None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in columns})
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def cmd_sim_dfr(cfg: dict, threads: int) -> dict:
    plan = TrialPlan(
        t=cfg["t"], trials=cfg["trials"], master_seed=cfg["seed"], max_iterations=cfg["iters"],
        **_code_source(cfg),
    )
    record = run_dfr(plan, workers=threads)
    row = record.to_row()
    text = _write_csv([row], RECORD_COLUMNS, cfg["out"])
    return {"csv": None if cfg["out"] else text, "row": row}


def cmd_sim_coincidence(cfg: dict, threads: int) -> dict:
    rep = coincidence_test(GallagerParams(cfg["n"], cfg["w"], cfg["v"], seed=cfg["seed"]),
                           cfg["matrices"], cfg["pairs"])
    out = {
        "schema": "mdpc.coincidence/1",
        "observed": rep.observed,
        "bins": [list(b) for b in rep.bins],
        "bin_observed": rep.bin_observed,
        "bin_expected": rep.bin_expected,
        "chi2": rep.chi2,
        "dof": rep.dof,
        "p_value": rep.p_value,
        "matrices": rep.matrices,
        "pairs_per_matrix": rep.pairs_per_matrix,
    }
    if cfg["out"]:
        write_json(cfg["out"], out)
    return out


def cmd_sim_estimate_s(cfg: dict, threads: int) -> dict:
    if cfg["construct"] == "qc":
        _need(cfg, "p", "half_weight")
        params = QcParams(cfg["p"], cfg["half_weight"], cfg["seed"])
    else:
        _need(cfg, "n", "w", "v")
        params = GallagerParams(cfg["n"], cfg["w"], cfg["v"], seed=cfg["seed"])
    est = estimate_s_percentile(params, cfg["samples"], cfg["percentile"])
    out = {"schema": "mdpc.s-estimate/1", "sampler": cfg["construct"], **est.to_dict()}
    if cfg["out"]:
        write_json(cfg["out"], out)
    return out


def cmd_sim_search(cfg: dict, threads: int) -> dict:
    res = search_scenario_params(
        cfg["scenario"], cfg["t"], cfg["target_bits"], cfg["n_values"], cfg["w_values"],
        samples=cfg["samples"], percentile=cfg["percentile"], seed=cfg["seed"],
        alpha=cfg["alpha"], p_mode=cfg["p_mode"],
    )
    _write_csv(res.table, SEARCH_COLUMNS, cfg["out"])
    return {"schema": "mdpc.search/1", "best": res.best, "rows_evaluated": len(res.table)}


HANDLERS: dict[tuple[str, ...], Callable[[dict, int], dict]] = {
    ("construct", "gallager"): cmd_construct_gallager,
    ("construct", "qc"): cmd_construct_qc,
    ("analyze", "intersections"): cmd_analyze_intersections,
    ("decode",): cmd_decode,
    ("bound", "bias"): cmd_bound_bias,
    ("bound", "dfr"): cmd_bound_dfr,
    ("sim", "dfr"): cmd_sim_dfr,
    ("sim", "coincidence"): cmd_sim_coincidence,
    ("sim", "estimate-s"): cmd_sim_estimate_s,
    ("sim", "search"): cmd_sim_search,
}


# ------------------------------------------------------------------ parsing


def _add_globals(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON config file or manifest")
    p.add_argument("--threads", type=int, default=S, help="worker count (env MDPC_THREADS)")
    p.add_argument("--manifest", default=S, help="manifest path (default <out>.manifest.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mdpc {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    groups: dict[str, argparse._SubParsersAction] = {}
    for command, opts in COMMANDS.items():
        if len(command) == 1:
            leaf = verbs.add_parser(command[0])
        else:
            if command[0] not in groups:
                grp = verbs.add_parser(command[0])
                groups[command[0]] = grp.add_subparsers(dest="sub", required=True, metavar="SUB")
            leaf = groups[command[0]].add_parser(command[1])
        leaf.set_defaults(command=command)
        _add_globals(leaf)
        for o in opts:
            if command == ("bound", "bias") and o.dest == "mode":
                mx = leaf.add_mutually_exclusive_group()
                mx.add_argument("--exact", dest="mode", action="store_const", const="exact",
                                default=argparse.SUPPRESS, help="exact rational arithmetic")
                mx.add_argument("--eps", dest="mode", action="store_const", const="eps",
                                default=argparse.SUPPRESS, help="floating-point evaluation")
                continue
            leaf.add_argument(o.flag, dest=o.dest, type=o.type, choices=o.choices,
                              default=argparse.SUPPRESS, help=o.help)
    replay = verbs.add_parser("replay", help="re-run a manifest")
    replay.set_defaults(command=("replay",))
    replay.add_argument("manifest_in", metavar="MANIFEST")
    replay.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a recorded parameter (value parsed as JSON if possible)")
    replay.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    replay.add_argument("--manifest", default=argparse.SUPPRESS)
    return parser


def _manifest(command: tuple[str, ...], cfg: dict, threads: int) -> dict:
    return {
        "schema": MANIFEST_SCHEMA,
        "tool_version": __version__,
        "command": list(command),
        "params": cfg,
        "threads": threads,
    }


def _execute(command: tuple[str, ...], cfg: dict, threads: int, manifest_path: str | None,
             stdout, stderr) -> int:
    out = HANDLERS[command](cfg, threads)
    if command == ("bound", "bias") and cfg["format"] == "text":
        _print_bias(out, stdout)
    elif command == ("sim", "dfr") and out["csv"] is not None:
        stdout.write(out["csv"])
    elif command == ("sim", "dfr"):
        print(dumps(out["row"]), file=stdout)
    else:
        print(dumps(out), file=stdout)
    manifest = _manifest(command, cfg, threads)
    path = manifest_path or (cfg["out"] + ".manifest.json" if cfg.get("out") else None)
    if path:
        write_json(path, manifest)
    else:
        print(json.dumps({"manifest": json.loads(dumps(manifest))}, sort_keys=True), file=stderr)
    return 0


def _replay_cfg(ns) -> tuple[tuple[str, ...], dict]:
    try:
        raw = read_json(ns.manifest_in)
    except (OSError, FormatError) as exc:
        raise UsageError(f"cannot read manifest: {exc}") from None
    if not isinstance(raw, dict) or raw.get("schema") != MANIFEST_SCHEMA:
        raise UsageError(f"{ns.manifest_in} is not a {MANIFEST_SCHEMA} document")
    command = tuple(raw.get("command", ()))
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r} in manifest")
    defaults = {o.dest: o.default for o in COMMANDS[command]}
    cfg = config_merge(raw.get("params", {}), {}, defaults)
    for item in ns.set:
        key, sep, value = item.partition("=")
        key = key.replace("-", "_")
        if not sep or key not in defaults:
            raise UsageError(f"bad --set {item!r}")
        try:
            cfg[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg[key] = value
    return command, cfg


def dispatch(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = vars(ns)
        command = args.pop("command")
        threads = resolve_threads(args.pop("threads", None))
        manifest_path = args.pop("manifest", None)
        if command == ("replay",):
            command, cfg = _replay_cfg(ns)
        else:
            opts = COMMANDS[command]
            file_cfg = _read_config(args.pop("config"), opts) if "config" in args else None
            flags = {k: v for k, v in args.items() if k not in ("verb", "sub")}
            cfg = config_merge(file_cfg, flags, {o.dest: o.default for o in opts})
        missing = [k for k, v in cfg.items() if v is REQUIRED]
        if missing:
            raise UsageError("missing required " + ", ".join(
                "--" + k.replace("_", "-") for k in missing))
        return _execute(command, cfg, threads, manifest_path, stdout, stderr)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"mdpc: error: {exc}", file=stderr)
        return 2
    except (MdpcError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
