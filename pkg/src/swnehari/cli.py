"""File-based command line driver.

Subcommands::

    validate          check the structural hypotheses, write validation.json
    estimate-lambda   extremal values lambda_star / lambda_star_lower + minimizers
    solve             both Nehari solutions at a given --lambda
    trichotomy        sweep lambda and compare the sign of J(v) to prediction
    fibering          emit (t, Q_n(t), Q_e(t)) for a stored direction field

Configuration is a flat ``key = value`` text file (``#`` comments); see
``sample_config`` for the schema.  Every numeric subcommand refuses to run
when the hypothesis validation fails.  Exit codes: 0 ok, 1 hypothesis or
consistency failure, 2 malformed configuration, 3 optimizer failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fibering, rayleigh, solver
from .descent import DescentOptions, MaxIterationsError, NonfiniteValueError
from .functional import Coefficients, fiber_triple
from .grid import GridSpec, read_field, write_field
from .model import ModelParams, validate_hypotheses

__all__ = ["main", "entry", "load_config", "sample_config", "ConfigError"]

MODEL_KEYS = (
    "dim_n", "alpha", "mu", "p", "q", "lambda",
    "gamma1", "gamma2", "beta", "v0", "v_inf",
)
GRID_KEYS = ("box_half_width", "points_per_axis")
OPT_KEYS = ("tol", "max_iter", "multistart", "seed", "residual_tol", "restarts")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: ModelParams
    grid: GridSpec
    opts: DescentOptions
    out_dir: Path


def sample_config() -> str:
    return (
        "# model\n"
        "dim_n = 3\n"
        "alpha = 0.25\n"
        "mu = 1.0\n"
        "p = 2.5\n"
        "q = 1.5\n"
        "lambda = 0.5\n"
        "gamma1 = 2.0\n"
        "gamma2 = 2.0\n"
        "beta = 10.0\n"
        "v0 = 1.0\n"
        "v_inf = 1.0\n"
        "# grid\n"
        "box_half_width = 4.0\n"
        "points_per_axis = 16\n"
        "# optimizer (optional)\n"
        "tol = 1e-7\n"
        "max_iter = 10000\n"
        "multistart = 5\n"
        "seed = 0\n"
    )


def _parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        out[key.lower()] = val
    return out


def load_config(path, *, seed=None, grid_m=None, box_l=None, out_dir=None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    kv = _parse_kv(text)

    missing = [k for k in MODEL_KEYS + GRID_KEYS if k not in kv]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    unknown = [k for k in kv if k not in MODEL_KEYS + GRID_KEYS + OPT_KEYS + ("out_dir",)]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    def num(key: str) -> float:
        try:
            return float(kv[key])
        except ValueError as err:
            raise ConfigError(f"key {key}: not a number: {kv[key]!r}") from err

    def integer(key: str, default=None) -> int:
        if key not in kv:
            return default
        try:
            return int(kv[key])
        except ValueError as err:
            raise ConfigError(f"key {key}: not an integer: {kv[key]!r}") from err

    try:
        params = ModelParams(
            dim_n=integer("dim_n"),
            alpha=num("alpha"),
            mu=num("mu"),
            p=num("p"),
            q=num("q"),
            lam=num("lambda"),
            v0=num("v0"),
            v_inf=num("v_inf"),
            gamma1=num("gamma1"),
            gamma2=num("gamma2"),
            beta=num("beta"),
        )
        grid = GridSpec(
            half_width=float(box_l) if box_l is not None else num("box_half_width"),
            points_per_axis=int(grid_m) if grid_m is not None else integer("points_per_axis"),
            dim=params.dim_n,
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    opts = DescentOptions(
        tol=num("tol") if "tol" in kv else 1e-7,
        max_iter=integer("max_iter", 10000),
        multistart=integer("multistart", 5),
        seed=int(seed) if seed is not None else integer("seed", 0),
        residual_tol=num("residual_tol") if "residual_tol" in kv else 5e-7,
        restarts=integer("restarts", 3),
    )
    out = Path(out_dir) if out_dir is not None else Path(kv.get("out_dir", "out"))
    return RunConfig(params, grid, opts, out)


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _ensure_out(cfg: RunConfig) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir


def cmd_validate(cfg: RunConfig) -> int:
    report = validate_hypotheses(cfg.params)
    out = _ensure_out(cfg)
    _write_json(out / "validation.json", report.to_dict())
    if report.passed:
        print("hypotheses: all pass")
        return EXIT_OK
    print(f"hypotheses FAILED: {', '.join(report.failures())}", file=sys.stderr)
    return EXIT_FAIL


def _validated_coefficients(cfg: RunConfig) -> Coefficients | None:
    report = validate_hypotheses(cfg.params)
    if not report.passed:
        out = _ensure_out(cfg)
        _write_json(out / "validation.json", report.to_dict())
        print(
            f"refusing to run: hypotheses failed ({', '.join(report.failures())})",
            file=sys.stderr,
        )
        return None
    return Coefficients.assemble(cfg.params, cfg.grid)


def cmd_estimate_lambda(cfg: RunConfig) -> int:
    c = _validated_coefficients(cfg)
    if c is None:
        return EXIT_FAIL
    out = _ensure_out(cfg)
    try:
        est_n = rayleigh.estimate_lambda_star(c, cfg.opts)
        est_e = rayleigh.estimate_lambda_star_lower(c, cfg.opts)
    except (MaxIterationsError, NonfiniteValueError) as err:
        print(f"optimizer failure: {err}", file=sys.stderr)
        return EXIT_SOLVER

    diag_residual = rayleigh.extremal_residual(c, est_n.minimizer, est_n.value)
    _write_json(out / "lambda_star.json", est_n.to_dict() | {"extremal_residual": diag_residual})
    _write_json(out / "lambda_star_lower.json", est_e.to_dict())
    write_field(out / "lambda_star_minimizer.field", cfg.grid, est_n.minimizer)
    write_field(out / "lambda_star_lower_minimizer.field", cfg.grid, est_e.minimizer)

    ratio = est_e.value / est_n.value
    expected = fibering.fiber_constants(cfg.params.p, cfg.params.q).ratio
    print(f"lambda_star       = {est_n.value!r}")
    print(f"lambda_star_lower = {est_e.value!r}")
    print(f"ratio = {ratio!r} (closed form {expected!r})")
    if abs(ratio - expected) > 1e-6 * expected:
        print(
            f"ratio mismatch: |{ratio} - {expected}| > 1e-6 relative",
            file=sys.stderr,
        )
        return EXIT_FAIL
    return EXIT_OK


def cmd_solve(cfg: RunConfig, lam: float) -> int:
    if lam is None or lam <= 0:
        print(f"solve needs --lambda > 0, got {lam}", file=sys.stderr)
        return EXIT_CONFIG
    c = _validated_coefficients(cfg)
    if c is None:
        return EXIT_FAIL
    out = _ensure_out(cfg)
    try:
        u_sol = solver.minimize_on_nplus(c, lam, opts=cfg.opts)
        v_sol = solver.minimize_on_nminus(c, lam, opts=cfg.opts)
    except (solver.NoRootsError, MaxIterationsError, NonfiniteValueError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    for name, sol in (("nplus", u_sol), ("nminus", v_sol)):
        _write_json(out / f"solution_{name}.json", sol.to_dict())
        write_field(out / f"solution_{name}.field", cfg.grid, sol.field)
    print(f"J(u) = {u_sol.energy!r}  (second {u_sol.second!r})")
    print(f"J(v) = {v_sol.energy!r}  (second {v_sol.second!r})")
    return EXIT_OK


TRICHOTOMY_MULTIPLES = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75)


def cmd_trichotomy(cfg: RunConfig) -> int:
    c = _validated_coefficients(cfg)
    if c is None:
        return EXIT_FAIL
    out = _ensure_out(cfg)
    try:
        est_n = rayleigh.estimate_lambda_star(c, cfg.opts)
        est_e = rayleigh.estimate_lambda_star_lower(c, cfg.opts)
    except (MaxIterationsError, NonfiniteValueError) as err:
        print(f"optimizer failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    lam_list = [
        m * est_e.value
        for m in TRICHOTOMY_MULTIPLES
        if m * est_e.value < est_n.value * (1 - 1e-9)
    ]
    report = solver.trichotomy_experiment(
        c,
        lam_list,
        est_n.value,
        est_e.value,
        opts=cfg.opts,
        extra_inits=(est_e.minimizer, est_n.minimizer),
    )
    (out / "trichotomy.csv").write_text("\n".join(report.csv_lines()) + "\n")
    _write_json(
        out / "trichotomy.json",
        {
            "lambda_star": report.lambda_star,
            "lambda_star_lower": report.lambda_star_lower,
            "all_match": report.all_match,
            "errors": [r.error for r in report.rows if r.error],
        },
    )
    for row in report.rows:
        status = "ok" if row.match else (row.error or "MISMATCH")
        print(
            f"lambda={row.lam:.6g} J_v={row.j_v:.6g} predicted={row.predicted_sign} "
            f"observed={row.observed_sign} [{status}]"
        )
    if not report.any_succeeded:
        print("all lambda runs failed", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if report.all_match else EXIT_FAIL


def cmd_fibering(cfg: RunConfig, direction: str) -> int:
    c = _validated_coefficients(cfg)
    if c is None:
        return EXIT_FAIL
    try:
        fspec, u = read_field(direction)
    except (OSError, ValueError) as err:
        print(f"cannot read direction field: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if fspec != cfg.grid:
        print(
            f"direction grid {fspec} does not match config grid {cfg.grid}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    if not np.any(u):
        print("direction field is identically zero", file=sys.stderr)
        return EXIT_CONFIG
    out = _ensure_out(cfg)
    p, q = cfg.params.p, cfg.params.q
    triple = fiber_triple(c, u)
    report = fibering.fibering_report(triple, p, q, cfg.params.lam)
    _write_json(out / "fibering.json", report.to_dict())
    ts = np.linspace(0.0, 2.5 * report.t_n, 501)
    lines = ["t,q_n,q_e"]
    for t in ts:
        lines.append(
            f"{t:.17g},{fibering.q_n(float(t), triple, p, q):.17g},"
            f"{fibering.q_e(float(t), triple, p, q):.17g}"
        )
    (out / "fibering.csv").write_text("\n".join(lines) + "\n")
    print(f"t_n = {report.t_n!r}, t_e = {report.t_e!r}")
    print(f"lambda_n = {report.lambda_n!r}, lambda_e = {report.lambda_e!r}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swnehari", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "estimate-lambda", "solve", "trichotomy", "fibering"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--grid-m", type=int, default=None)
        sp.add_argument("--box-l", type=float, default=None)
        if name == "solve":
            sp.add_argument("--lambda", dest="lam", type=float, required=True)
        if name == "fibering":
            sp.add_argument("--direction", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            seed=args.seed,
            grid_m=args.grid_m,
            box_l=args.box_l,
            out_dir=args.out,
        )
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        return cmd_validate(cfg)
    if args.command == "estimate-lambda":
        return cmd_estimate_lambda(cfg)
    if args.command == "solve":
        return cmd_solve(cfg, args.lam)
    if args.command == "trichotomy":
        return cmd_trichotomy(cfg)
    if args.command == "fibering":
        return cmd_fibering(cfg, args.direction)
    raise AssertionError(f"unhandled command {args.command}")


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
