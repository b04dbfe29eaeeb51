"""Batch command-line front end.

Subcommands: ``exponent`` (one rate pair, key-value record), ``sweep``
(rate-plane CSV with region classification), ``region`` (full-security
intervals per R1), ``gaussian`` (record or CSV sweep), ``simulate``
(finite-n ensemble estimate), ``check`` (validate a channel file and run
the degradedness check).

Rates are nats by default; ``--bits`` converts rate-like quantities on both
input and output.  All numeric output uses 12 significant digits and is
byte-identical across runs for identical inputs, including seeds and worker
counts.  Exit status: 0 success, 2 input validation, 3 solver
non-convergence, 4 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import simulate as sim
from .channels import check_degraded, load_channel_spec
from .errors import BudgetExceededError, ChannelFileError, SolverError
from .exponent import ExponentSolver, RatePair
from .gaussian import GaussianSpec, gaussian_exponent
from .security import classify_rate_point, compute_qstar, full_security_interval

LN2 = math.log(2.0)

_DEFAULTS = {
    "gap_tol": 1e-10,
    "max_iter": 200_000,
    "table_points": 65,
    "classify_tol": 1e-6,
    "gaussian_grid": 100_000,
    "refine_tol": 1e-9,
    "z_budget": 1 << 24,
    "type_budget": 1 << 24,
    "codebook_budget": 1 << 22,
    "z_samples": 256,
    "workers": 1,
    "degraded_tol": 1e-9,
}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _settings(args) -> dict:
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ChannelFileError(
                f"config file {args.config}: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _solver_kwargs(cfg) -> dict:
    return {"gap_tol": cfg["gap_tol"], "max_iter": int(cfg["max_iter"]),
            "table_points": int(cfg["table_points"])}


def _parse_grid(text: str, what: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ChannelFileError(f"{what} must be MIN:MAX:STEPS, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ChannelFileError(f"{what}: cannot parse {text!r}") from None
    if steps < 0 or hi < lo:
        raise ChannelFileError(f"{what}: empty or inverted grid {text!r}")
    return np.linspace(lo, hi, steps) if steps else np.array([])


def _emit(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + ("\n" if lines else "")
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_exponent(args) -> int:
    cfg = _settings(args)
    unit = LN2 if args.bits else 1.0
    spec = load_channel_spec(args.channel)
    rates = RatePair(args.r1 * unit, args.r2 * unit)
    solver = ExponentSolver(spec, **_solver_kwargs(cfg))
    res = solver.solve(rates)
    lines = [
        f"R1 {_fmt(rates.r1 / unit)}",
        f"R2 {_fmt(rates.r2 / unit)}",
        f"E {_fmt(res.e / unit)}",
        f"E1 {_fmt(res.e1 / unit)}",
        f"E2 {_fmt(res.e2 / unit)}",
        f"E3 {_fmt(res.e3 / unit)}",
        f"branch {res.active_branch}",
        f"rep2 {_fmt(res.rep2_value / unit)}",
        f"lambda1 {_fmt(res.lambda1)}",
        f"lambda2 {_fmt(res.lambda2)}",
        f"rep_discrepancy {_fmt((res.e - res.rep2_value) / unit)}",
    ]
    _emit(lines, args.output)
    return 0


_SWEEP_COLUMNS = ("R1", "R2", "E", "E1", "E2", "E3", "branch", "class")


def _sweep_rows(spec_dict: dict, r1_values, r2_mode, cfg) -> tuple[list, int]:
    from .channels import parse_channel_spec
    spec = parse_channel_spec(json.dumps(spec_dict))
    solver = ExponentSolver(spec, **_solver_kwargs(cfg))
    kind, r2_values = r2_mode
    rows, skipped = [], 0
    for r1 in r1_values:
        r2s = r2_values * r1 if kind == "fractions" else r2_values
        for r2 in r2s:
            if r2 > r1:
                skipped += 1
                continue
            rates = RatePair(float(r1), float(r2))
            res = solver.exponent_rep1(rates)
            cls = classify_rate_point(spec, rates, tol=cfg["classify_tol"],
                                      solver=solver)
            rows.append((rates.r1, rates.r2, res.e, res.e1, res.e2, res.e3,
                         res.active_branch, cls))
    return rows, skipped


def _sweep_worker(payload):
    spec_dict, chunk, r2_mode, cfg = payload
    return _sweep_rows(spec_dict, chunk, r2_mode, cfg)


def _cmd_sweep(args) -> int:
    cfg = _settings(args)
    unit = LN2 if args.bits else 1.0
    spec = load_channel_spec(args.channel)
    r1_values = _parse_grid(args.r1_grid, "--r1-grid") * unit
    if (args.r2_grid is None) == (args.r2_fractions is None):
        raise ChannelFileError("exactly one of --r2-grid / --r2-fractions required")
    if args.r2_grid is not None:
        r2_mode = ("grid", _parse_grid(args.r2_grid, "--r2-grid") * unit)
    else:
        frac = _parse_grid(args.r2_fractions, "--r2-fractions")
        if frac.size and (frac.min() < 0 or frac.max() > 1):
            raise ChannelFileError("--r2-fractions must lie in [0, 1]")
        r2_mode = ("fractions", frac)

    columns = _SWEEP_COLUMNS
    if args.columns:
        columns = tuple(c.strip() for c in args.columns.split(","))
        bad = set(columns) - set(_SWEEP_COLUMNS)
        if bad:
            raise ChannelFileError(f"unknown sweep columns {sorted(bad)}")

    workers = int(cfg["workers"])
    if workers > 1 and r1_values.size > 1:
        chunks = np.array_split(r1_values, min(workers, r1_values.size))
        payloads = [(spec.to_json_dict(), chunk, r2_mode, cfg)
                    for chunk in chunks if chunk.size]
        rows, skipped = [], 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part, sk in pool.map(_sweep_worker, payloads):
                rows.extend(part)
                skipped += sk
    else:
        rows, skipped = _sweep_rows(spec.to_json_dict(), r1_values, r2_mode, cfg)

    rate_like = {"R1", "R2", "E", "E1", "E2", "E3"}
    lines = [",".join(columns)]
    for row in rows:
        rec = dict(zip(_SWEEP_COLUMNS, row))
        lines.append(",".join(
            _fmt(rec[c] / unit) if c in rate_like else _fmt(rec[c])
            for c in columns))
    _emit(lines, args.output)
    if skipped:
        print(f"skipped {skipped} grid points with R2 > R1", file=sys.stderr)
    return 0


def _cmd_region(args) -> int:
    cfg = _settings(args)
    unit = LN2 if args.bits else 1.0
    spec = load_channel_spec(args.channel)
    if args.r1_list:
        r1s = [float(t) * unit for t in args.r1_list.split(",")]
    else:
        r1s = [v * unit for v in (args.r1 or [])]
    if not r1s:
        raise ChannelFileError("no R1 values given (use --r1 or --r1-list)")
    solver = ExponentSolver(spec, **_solver_kwargs(cfg))
    analysis = compute_qstar(spec, solver=solver)
    lines = [",".join(("R1", "lower", "upper", "empty", "bracket_lower",
                       "bracket_upper", "bracket_valid", "i_qstar", "d_qstar",
                       "i_p", "verified"))]
    for r1 in r1s:
        iv = full_security_interval(spec, r1, tol=cfg["classify_tol"],
                                    solver=solver)
        lines.append(",".join((
            _fmt(r1 / unit), _fmt(iv.lower / unit), _fmt(iv.upper / unit),
            _fmt(iv.empty), _fmt(iv.bracket_lower / unit),
            _fmt(iv.bracket_upper / unit), _fmt(iv.bracket_valid),
            _fmt(analysis.i_qstar / unit), _fmt(analysis.d_qstar / unit),
            _fmt(analysis.i_p / unit), _fmt(iv.verified))))
    _emit(lines, args.output)
    return 0


def _gaussian_rows(s, sigma2, r1_values, r2_values, grid, rtol):
    g = GaussianSpec(s, sigma2)
    rows, skipped = [], 0
    for r1 in r1_values:
        for r2 in r2_values:
            if r2 > r1:
                skipped += 1
                continue
            opt = gaussian_exponent(g, RatePair(float(r1), float(r2)),
                                    grid_points=grid, refine_tol=rtol)
            rows.append((r1, r2, opt))
    return rows, skipped


def _gaussian_worker(payload):
    return _gaussian_rows(*payload)


def _cmd_gaussian(args) -> int:
    cfg = _settings(args)
    unit = LN2 if args.bits else 1.0
    g = GaussianSpec(args.power, args.noise)
    grid = int(cfg["gaussian_grid"])
    rtol = cfg["refine_tol"]
    if args.r1_grid or args.r2_grid:
        if not (args.r1_grid and args.r2_grid):
            raise ChannelFileError(
                "sweep mode needs both --r1-grid and --r2-grid")
        r1s = _parse_grid(args.r1_grid, "--r1-grid") * unit
        r2s = _parse_grid(args.r2_grid, "--r2-grid") * unit
        workers = int(cfg["workers"])
        if workers > 1 and r1s.size > 1:
            chunks = np.array_split(r1s, min(workers, r1s.size))
            payloads = [(g.s, g.sigma2, chunk, r2s, grid, rtol)
                        for chunk in chunks if chunk.size]
            rows, skipped = [], 0
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part, sk in pool.map(_gaussian_worker, payloads):
                    rows.extend(part)
                    skipped += sk
        else:
            rows, skipped = _gaussian_rows(g.s, g.sigma2, r1s, r2s, grid, rtol)
        lines = [",".join(("S", "sigma2", "R1", "R2", "E", "E1", "E2", "E3",
                           "rho_star", "sigma_z_star", "branch"))]
        for r1, r2, opt in rows:
            lines.append(",".join((
                _fmt(g.s), _fmt(g.sigma2), _fmt(r1 / unit),
                _fmt(r2 / unit), _fmt(opt.e / unit), _fmt(opt.e1 / unit),
                _fmt(opt.e2 / unit), _fmt(opt.e3 / unit),
                _fmt(opt.rho_star), _fmt(opt.sigma_z_star),
                opt.active_branch)))
        _emit(lines, args.output)
        if skipped:
            print(f"skipped {skipped} grid points with R2 > R1",
                  file=sys.stderr)
        return 0
    if args.r1 is None or args.r2 is None:
        raise ChannelFileError("need --r1/--r2 or --r1-grid/--r2-grid")
    rates = RatePair(args.r1 * unit, args.r2 * unit)
    opt = gaussian_exponent(g, rates, grid_points=grid, refine_tol=rtol)
    lines = [
        f"S {_fmt(g.s)}",
        f"sigma2 {_fmt(g.sigma2)}",
        f"R1 {_fmt(rates.r1 / unit)}",
        f"R2 {_fmt(rates.r2 / unit)}",
        f"E {_fmt(opt.e / unit)}",
        f"E1 {_fmt(opt.e1 / unit)}",
        f"E2 {_fmt(opt.e2 / unit)}",
        f"E3 {_fmt(opt.e3 / unit)}",
        f"rho_star {_fmt(opt.rho_star)}",
        f"sigma_z_star {_fmt(opt.sigma_z_star)}",
        f"branch {opt.active_branch}",
    ]
    _emit(lines, args.output)
    return 0


def _simulate_worker(payload):
    spec_dict, comp, n, r1, r2, trials, seed, lo, hi, cfg = payload
    from .channels import parse_channel_spec
    spec = parse_channel_spec(json.dumps(spec_dict))
    es = sim.EnsembleSpec(n=n, rates=RatePair(r1, r2), p_x_type=tuple(comp),
                          channel=spec.wiretap, trials=trials, seed=seed)
    return sim.per_trial_pc(es, budget=int(cfg["z_budget"]),
                            z_samples=int(cfg["z_samples"]),
                            codebook_budget=int(cfg["codebook_budget"]),
                            trial_range=(lo, hi))


def _cmd_simulate(args) -> int:
    cfg = _settings(args)
    unit = LN2 if args.bits else 1.0
    spec = load_channel_spec(args.channel)
    rates = RatePair(args.r1 * unit, args.r2 * unit)
    comp = sim.quantize_composition(spec.input_dist.probs, args.n)
    es = sim.EnsembleSpec(n=args.n, rates=rates, p_x_type=comp,
                          channel=spec.wiretap, trials=args.trials,
                          seed=args.seed)
    workers = int(cfg["workers"])
    if workers > 1 and args.trials > 1:
        bounds = np.linspace(0, args.trials,
                             min(workers, args.trials) + 1).astype(int)
        payloads = [(spec.to_json_dict(), list(comp), args.n, rates.r1,
                     rates.r2, args.trials, args.seed, int(lo), int(hi), cfg)
                    for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        pcs = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_simulate_worker, payloads):
                pcs.extend(part)
        result = sim.summarize_trials(es, pcs)
    else:
        result = sim.estimate_ensemble_pc(
            es, budget=int(cfg["z_budget"]), z_samples=int(cfg["z_samples"]),
            codebook_budget=int(cfg["codebook_budget"]))
    solver = ExponentSolver(spec, **_solver_kwargs(cfg))
    asymptotic = solver.exponent_rep1(rates).e
    lines = [",".join(("n", "R1_req", "R2_req", "R1_real", "R2_real", "trials",
                       "pc_mean", "pc_stderr", "emp_exponent", "seed",
                       "E_asymptotic"))]
    lines.append(",".join((
        str(es.n), _fmt(rates.r1 / unit), _fmt(rates.r2 / unit),
        _fmt(es.realized_r1 / unit), _fmt(es.realized_r2 / unit),
        str(result.trials_used), _fmt(result.pc_mean),
        _fmt(result.pc_std_err), _fmt(result.empirical_exponent / unit),
        str(es.seed), _fmt(asymptotic / unit))))
    _emit(lines, args.output)
    return 0


def _cmd_check(args) -> int:
    cfg = _settings(args)
    spec = load_channel_spec(args.channel)
    print(f"channel file ok: |X| = {spec.input_dist.size}, "
          f"|Z| = {spec.wiretap.num_outputs}" +
          (f", |Y| = {spec.main.num_outputs}" if spec.main else ""))
    if spec.main is None:
        print("no main channel given; degradedness check skipped")
        return 0
    res = check_degraded(spec.main, spec.wiretap, tol=cfg["degraded_tol"])
    if res.is_degraded:
        print(f"degraded: yes (residual {_fmt(res.residual)})")
    else:
        print(f"degraded: no (residual {_fmt(res.residual)})")
        print("warning: wiretap channel is not a degraded version of the "
              "main channel; exponent computations remain valid",
              file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", action="store_true",
                   help="rates given and reported in bits instead of nats")
    p.add_argument("--config", help="JSON file with solver settings")
    p.add_argument("--output", help="write to file instead of stdout")
    p.add_argument("--gap-tol", dest="gap_tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--workers", dest="workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiretap-exponent",
        description="Correct-decoding exponents of the wiretap channel "
                    "decoder and the associated rate regions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="exponent at one rate pair")
    p.add_argument("channel")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_exponent)

    p = sub.add_parser("sweep", help="rate-plane sweep to CSV")
    p.add_argument("channel")
    p.add_argument("--r1-grid", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--r2-grid", metavar="MIN:MAX:STEPS")
    p.add_argument("--r2-fractions", metavar="MIN:MAX:STEPS",
                   help="R2 as fractions of each R1")
    p.add_argument("--columns", help="comma-separated column selection")
    p.add_argument("--classify-tol", dest="classify_tol", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("region", help="full-security intervals per R1")
    p.add_argument("channel")
    p.add_argument("--r1", type=float, action="append")
    p.add_argument("--r1-list", help="comma-separated R1 values")
    p.add_argument("--classify-tol", dest="classify_tol", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("gaussian", help="Gaussian-channel exponent")
    p.add_argument("--power", "-S", type=float, required=True)
    p.add_argument("--noise", type=float, required=True, metavar="SIGMA2")
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--r1-grid", metavar="MIN:MAX:STEPS")
    p.add_argument("--r2-grid", metavar="MIN:MAX:STEPS")
    p.add_argument("--gaussian-grid", dest="gaussian_grid", type=int)
    _add_common(p)
    p.set_defaults(func=_cmd_gaussian)

    p = sub.add_parser("simulate", help="finite-n ensemble estimate")
    p.add_argument("channel")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", dest="z_budget", type=int,
                   help="cap on |Z|^n for exact enumeration")
    p.add_argument("--z-samples", dest="z_samples", type=int,
                   help="per-trial output samples when beyond the budget")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="validate a channel file")
    p.add_argument("channel")
    p.add_argument("--tol", dest="degraded_tol", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ChannelFileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
