"""Command-line front end.

Every output file starts with the package version, the subcommand and the full
run configuration, so ``ctrm <command> --config <output file>`` regenerates it
byte for byte. The worker count and output path are not part of the
configuration; results never depend on them.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 numerical
accuracy failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .errors import AccuracyError, CtrmError, DomainError
from .experiment import DEFAULT_CHUNK, draw_rescaled, run_convergence
from .govern import laplace_domain_check, residual_study
from .laplace import InversionConfig, invert
from .limits import (
    CONSISTENCY_TOL,
    LimitCdfRequest,
    Method,
    limit_cdf,
    prelimit_cdf_exact,
    prelimit_cdf_via_inversion,
    prelimit_laplace_ctrm,
    prelimit_laplace_octrm,
    limit_transform,
)
from .model import ExponentialIndependent, model_from_dict
from .process import Which

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ACCURACY = 0, 2, 3, 4
WORKERS_ENV = "CTRM_WORKERS"
COMMANDS = ("simulate", "cdf", "invert", "converge", "govern-check")


class ConfigError(DomainError):
    pass


@dataclass
class XGrid:
    min: float = 0.1
    max: float = 10.0
    count: int = 5
    spacing: str = "log"

    def validate(self):
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError("x_grid.count must be an integer >= 2")
        if self.spacing not in ("lin", "log"):
            raise ConfigError("x_grid.spacing must be 'lin' or 'log'")
        if not (self.min > 0 and self.max > self.min and math.isfinite(self.max)):
            raise ConfigError("x_grid needs 0 < min < max < inf")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), int(self.count))
        return np.linspace(self.min, self.max, int(self.count))


@dataclass
class RunConfig:
    """Everything that determines the data section of an output file."""

    model: dict = field(default_factory=lambda: {"kind": "coupled", "beta": 0.5, "gamma": 1.0})
    which: str = "CTRM"
    t: list = field(default_factory=lambda: [1.0])
    x_grid: XGrid = field(default_factory=XGrid)
    c: list = field(default_factory=lambda: [100.0])
    n_samples: int = 1000
    seed: int = 0
    methods: list = field(default_factory=lambda: ["Series"])
    inversion_order: int = 20
    inversion_precision: str = "extended"
    xi: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    h: list = field(default_factory=lambda: [2e-3, 1e-3, 5e-4])
    ks_threshold: float = 0.05
    chunk_size: int = DEFAULT_CHUNK
    format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        data = dict(data)
        if "x_grid" in data:
            grid = data["x_grid"]
            if not isinstance(grid, dict) or set(grid) - {f.name for f in fields(XGrid)}:
                raise ConfigError("x_grid must be an object with min, max, count, spacing")
            data["x_grid"] = XGrid(**grid)
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self):
        try:
            self.model_spec = model_from_dict(self.model)
            self.model = self.model_spec.to_dict()
            Which(self.which)
            [Method(m) for m in self.methods]
            self.inversion = InversionConfig(order=self.inversion_order, precision=self.inversion_precision)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        self.x_grid.validate()
        for name in ("t", "c", "xi", "h"):
            vals = getattr(self, name)
            if not isinstance(vals, list) or not vals or not all(isinstance(v, (int, float)) and v > 0 for v in vals):
                raise ConfigError(f"{name} must be a non-empty list of positive numbers")
        if not isinstance(self.n_samples, int) or self.n_samples < 0:
            raise ConfigError("n_samples must be a nonnegative integer")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.chunk_size, int) or self.chunk_size < 1:
            raise ConfigError("chunk_size must be a positive integer")
        if not 1 <= len(self.methods) <= 2:
            raise ConfigError("methods must name one or two routes")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        return self


# -- output -----------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


@dataclass
class Table:
    name: str
    columns: list
    rows: list


def render(command: str, cfg: RunConfig, tables: list, summary: dict | None = None) -> str:
    config_json = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    if cfg.format == "json":
        doc = {
            "artifact_version": __version__,
            "command": command,
            "config": cfg.to_dict(),
            "summary": {k: _json_value(v) for k, v in (summary or {}).items()},
            "tables": [
                {"name": t.name, "columns": t.columns, "rows": [[_json_value(v) for v in r] for r in t.rows]}
                for t in tables
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# artifact {__version__}\n# command: {command}\n# config: {config_json}\n")
    for k, v in (summary or {}).items():
        buf.write(f"# {k}: {_fmt(v)}\n")
    for t in tables:
        if len(tables) > 1:
            buf.write(f"# table: {t.name}\n")
        buf.write(",".join(t.columns) + "\n")
        for r in t.rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def read_embedded_config(text: str) -> tuple[str | None, dict]:
    """``(command, config)`` from an output file, or ``(None, config)`` from a plain config."""
    stripped = text.lstrip()
    if stripped.startswith("#"):
        command, config = None, None
        for line in text.splitlines():
            if not line.startswith("#"):
                break
            if line.startswith("# command: "):
                command = line[len("# command: ") :].strip()
            elif line.startswith("# config: "):
                config = json.loads(line[len("# config: ") :])
        if config is None:
            raise ConfigError("no embedded config found")
        return command, config
    doc = json.loads(text)
    if isinstance(doc, dict) and "artifact_version" in doc and "config" in doc:
        return doc.get("command"), doc["config"]
    return None, doc


# -- commands -----------------------------------------------------------------


def cmd_simulate(cfg: RunConfig, workers: int = 1):
    model, which = cfg.model_spec, Which(cfg.which)
    rows = []
    for c in cfg.c:
        for t in cfg.t:
            v, u = draw_rescaled(model, c, t, cfg.n_samples, cfg.seed, workers, cfg.chunk_size)
            for val in v if which is Which.CTRM else u:
                rows.append((float(c), float(t), float(val)))
    return [Table("samples", ["c", "t", "value"], rows)], {}


def _cdf_value(cfg, method: Method, t: float, x: float) -> float:
    model, which = cfg.model_spec, Which(cfg.which)
    if isinstance(model, ExponentialIndependent):
        if method is Method.INVERSION:
            return prelimit_cdf_via_inversion(model, which, t, x, cfg.inversion)
        if method is Method.CLOSED_FORM:
            return prelimit_cdf_exact(model, which, t, x)
        raise ConfigError(f"method {method.value} is not available for the exponential model")
    return limit_cdf(LimitCdfRequest(model, which, method, t, x), cfg.inversion)


def cmd_cdf(cfg: RunConfig, workers: int = 1):
    methods = [Method(m) for m in cfg.methods]
    cols = ["t", "x"] + [m.value for m in methods] + (["abs_diff"] if len(methods) == 2 else [])
    rows = []
    max_diff = 0.0
    for t in cfg.t:
        for x in cfg.x_grid.values():
            vals = [_cdf_value(cfg, m, float(t), float(x)) for m in methods]
            if len(vals) == 2:
                diff = abs(vals[0] - vals[1])
                max_diff = max(max_diff, diff)
                vals.append(diff)
            rows.append((float(t), float(x), *vals))
    summary = {"max_abs_diff": max_diff} if len(methods) == 2 else {}
    return [Table("cdf", cols, rows)], summary


def cmd_invert(cfg: RunConfig, workers: int = 1):
    """Inversion at the configured order next to order - 2; a gap above the consistency tolerance fails."""
    model, which = cfg.model_spec, Which(cfg.which)
    lower = InversionConfig(order=max(cfg.inversion_order - 2, 4), precision=cfg.inversion_precision)
    rows = []
    for t in cfg.t:
        for x in cfg.x_grid.values():
            if isinstance(model, ExponentialIndependent):
                fn = prelimit_laplace_ctrm if which is Which.CTRM else prelimit_laplace_octrm
                transform = lambda xi, x=float(x): fn(model, xi, x)  # noqa: E731
            else:
                transform = limit_transform(model, which, float(x))
            hi = invert(transform, float(t), cfg.inversion)
            lo = invert(transform, float(t), lower)
            rows.append((float(t), float(x), hi, lo, abs(hi - lo)))
    worst = max(rows, key=lambda r: r[-1])
    if worst[-1] > CONSISTENCY_TOL:
        raise AccuracyError(f"inversion orders disagree by {worst[-1]:.3g} at t={worst[0]}, x={worst[1]}")
    cols = ["t", "x", f"order_{cfg.inversion_order}", f"order_{lower.order}", "gap"]
    return [Table("inversion", cols, rows)], {"max_gap": max(r[-1] for r in rows)}


def cmd_converge(cfg: RunConfig, workers: int = 1):
    model, which = cfg.model_spec, Which(cfg.which)
    tables, summary = [], {}
    for t in cfg.t:
        rep = run_convergence(
            model, which, float(t), cfg.c, cfg.n_samples, cfg.seed, workers, cfg.chunk_size, cfg.ks_threshold
        )
        rows = [(float(t), r.c, r.n_samples, r.ks_distance, r.mc_standard_error, r.passed) for r in rep.rows]
        tables.append(rows)
        summary[f"strictly_decreasing_t={_fmt(float(t))}"] = rep.strictly_decreasing
    cols = ["t", "c", "n_samples", "ks_distance", "mc_standard_error", "passed"]
    return [Table("convergence", cols, [r for rows in tables for r in rows])], summary


def cmd_govern_check(cfg: RunConfig, workers: int = 1):
    model, which = cfg.model_spec, Which(cfg.which)
    xs = [float(x) for x in cfg.x_grid.values()]
    hs = sorted((float(h) for h in cfg.h), reverse=True)
    res_rows = []
    for x in xs:
        study = residual_study(model, which, x, hs)
        for i, (h, r) in enumerate(study):
            ratio = r / study[i - 1][1] if i else float("nan")
            res_rows.append((x, h, r, ratio))
    lap_rows = [
        (ck.x, ck.xi, ck.lhs, ck.rhs, ck.rel_error, ck.accurate)
        for ck in laplace_domain_check(model, which, xs, [float(v) for v in cfg.xi])
    ]
    tables = [
        Table("residuals", ["x", "h", "max_residual", "ratio"], res_rows),
        Table("laplace", ["x", "xi", "lhs", "rhs", "rel_error", "accurate"], lap_rows),
    ]
    return tables, {"max_laplace_rel_error": max(r[4] for r in lap_rows)}


HANDLERS = {
    "simulate": cmd_simulate,
    "cdf": cmd_cdf,
    "invert": cmd_invert,
    "converge": cmd_converge,
    "govern-check": cmd_govern_check,
}


# -- argument parsing -----------------------------------------------------------


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config or a previous output file to replay")
    common.add_argument("--seed", type=_u64)
    common.add_argument("--workers", type=int, default=None, help=f"threads for sampling (default ${WORKERS_ENV} or 1)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--model", choices=("independent", "coupled", "exponential"))
    common.add_argument("--beta", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--rate", type=float)
    common.add_argument("--which", choices=("CTRM", "OCTRM"))
    common.add_argument("--t", type=_float_list, help="comma-separated times")
    common.add_argument("--c", type=_float_list, help="comma-separated scale factors")
    common.add_argument("--x-min", type=float)
    common.add_argument("--x-max", type=float)
    common.add_argument("--x-count", type=int)
    common.add_argument("--x-spacing", choices=("lin", "log"))
    common.add_argument("--n-samples", type=int)
    common.add_argument("--methods", help="one or two of Inversion,ClosedForm,Series")
    common.add_argument("--order", type=int, help="Gaver-Stehfest order")
    common.add_argument("--precision", choices=("double", "extended"))
    common.add_argument("--xi", type=_float_list)
    common.add_argument("--h", type=_float_list)
    common.add_argument("--ks-threshold", type=float)
    common.add_argument("--chunk-size", type=int)

    parser = argparse.ArgumentParser(prog="ctrm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"artifact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=(HANDLERS[name].__doc__ or name).splitlines()[0])
    return parser


_MODEL_PARAMS = {"independent": ("beta", "alpha"), "coupled": ("beta", "gamma"), "exponential": ("rate", "jump")}


def config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        try:
            _, data = read_embedded_config(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    cfg = RunConfig.from_dict(data)

    model = dict(cfg.model)
    if args.model and args.model != model.get("kind"):
        model = {"kind": args.model}
    for key in ("beta", "alpha", "gamma", "rate"):
        if getattr(args, key) is not None:
            model[key] = getattr(args, key)
    kind = model.get("kind")
    if kind in _MODEL_PARAMS:
        model = {"kind": kind, **{k: v for k, v in model.items() if k in _MODEL_PARAMS[kind]}}
    cfg.model = model

    simple = {
        "seed": "seed",
        "format": "format",
        "which": "which",
        "t": "t",
        "c": "c",
        "n_samples": "n_samples",
        "order": "inversion_order",
        "precision": "inversion_precision",
        "xi": "xi",
        "h": "h",
        "ks_threshold": "ks_threshold",
        "chunk_size": "chunk_size",
    }
    for arg, attr in simple.items():
        if getattr(args, arg) is not None:
            setattr(cfg, attr, getattr(args, arg))
    if args.methods is not None:
        cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for arg, attr in (("x_min", "min"), ("x_max", "max"), ("x_count", "count"), ("x_spacing", "spacing")):
        if getattr(args, arg) is not None:
            setattr(cfg.x_grid, attr, getattr(args, arg))
    return cfg.validate()


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get(WORKERS_ENV)
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        tables, summary = HANDLERS[args.command](cfg, _workers(args))
        text = render(args.command, cfg, tables, summary)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (CtrmError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
