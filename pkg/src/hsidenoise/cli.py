"""``hsidenoise`` command line: simulate, denoise, evaluate, selfcheck.

Exit codes: 0 success, 1 usage or config error, 2 I/O error, 3 numeric
failure, 4 selfcheck failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time

import numpy as np

from .config import ConfigError, RunConfig, dump_config, load_config
from .cube import denormalize, normalize_bands
from .fileio import CubeFormatError, read_cube, write_cube
from .metrics import evaluate, spectral_signature
from .noisegen import simulate
from .oracles import run_selfcheck
from .solver import MODES, NonFiniteError, run

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_SELFCHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(value):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    return value


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _load_run_config(path):
    return load_config(path) if path else RunConfig()


def cmd_simulate(args) -> int:
    cfg = _load_run_config(args.config)
    overrides = {"case_id": args.case}
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        spec = dataclasses.replace(cfg.noise, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    clean = read_cube(args.clean)
    noisy, report = simulate(clean, spec)
    report["nominal_bands"] = spec.nominal_bands
    write_cube(args.out, noisy)
    _write_json(args.report or f"{args.out}.json", report)
    return EXIT_OK


def _trace_text(result, config) -> str:
    trace = result.trace
    lines = [
        f"# converged={'true' if result.converged else 'false'}",
        f"# iterations={result.iterations_used}",
        f"# stopped_by={'tolerance' if result.converged else 't_max'}",
        f"# mode={config.mode} lam={config.lam!r} gamma={config.gamma!r}",
    ]
    header = ["iteration", "rho", "r_sparse", "r_lowrank", "r_ab", "r_tv"]
    with_metrics = bool(trace.mpsnr)
    if with_metrics:
        header += ["mpsnr", "mssim", "ergas"]
    lines.append(",".join(header))
    for i, (rho, res) in enumerate(zip(trace.rho, trace.residuals)):
        row = [str(i + 1), repr(rho)] + [repr(float(r)) for r in res]
        if with_metrics:
            row += [repr(float(trace.mpsnr[i])), repr(float(trace.mssim[i])),
                    repr(float(trace.ergas[i]))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_denoise(args) -> int:
    cfg = _load_run_config(args.config)
    overrides = {}
    for name in ("mode", "lam", "gamma", "threads", "t_max"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    try:
        solver_cfg = dataclasses.replace(cfg.solver, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    normalize = cfg.normalize and not args.no_normalize

    noisy = read_cube(args.noisy)
    reference = read_cube(args.reference) if args.reference else None
    if reference is not None and reference.shape != noisy.shape:
        raise UsageError(f"reference shape {reference.shape} != input shape {noisy.shape}")
    if normalize:
        work, scale = normalize_bands(noisy)
        if reference is not None:
            # Bring the reference into the same per-band coordinates.
            span = np.where(scale.maxs > scale.mins, scale.maxs - scale.mins, 1.0)
            reference = (reference - scale.mins) / span
    else:
        work, scale = noisy, None

    result = run(work, solver_cfg, reference=reference)
    L, S = result.denoised, result.sparse
    if scale is not None:
        L = denormalize(L, scale)
        span = np.where(scale.maxs > scale.mins, scale.maxs - scale.mins, 0.0)
        S = S * span
    write_cube(args.out_L, L)
    write_cube(args.out_S, S)
    with open(args.trace, "w", encoding="utf-8") as fh:
        fh.write(_trace_text(result, solver_cfg))
    if args.save_config:
        with open(args.save_config, "w", encoding="utf-8") as fh:
            fh.write(dump_config(dataclasses.replace(cfg, solver=solver_cfg)))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ref = read_cube(args.reference)
    test = read_cube(args.test)
    if ref.shape != test.shape:
        raise UsageError(f"shape mismatch {ref.shape} vs {test.shape}")
    report = evaluate(ref, test)
    sys.stdout.write(report.table())
    doc = report.to_dict()
    pixel = tuple(args.pixel) if args.pixel else None
    if pixel is None and args.config:
        pixel = load_config(args.config).pixel
    if pixel is not None:
        try:
            doc["signature"] = {
                "pixel": list(pixel),
                "reference": spectral_signature(ref, *pixel).tolist(),
                "test": spectral_signature(test, *pixel).tolist(),
            }
        except IndexError as exc:
            raise UsageError(str(exc)) from None
    if args.report:
        _write_json(args.report, doc)
    if args.curves:
        with open(args.curves, "w", encoding="utf-8") as fh:
            fh.write("band,psnr_db,ssim\n")
            for b, (p, s) in enumerate(zip(report.per_band_psnr, report.per_band_ssim)):
                fh.write(f"{b + 1},{p!r},{s!r}\n")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    t0 = time.perf_counter()
    results = run_selfcheck(deep=args.deep, seed=args.seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<42} margin={r.margin:.3e}  {r.detail}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed "
          f"in {time.perf_counter() - t0:.1f}s")
    if failed:
        print("failed: " + ", ".join(r.name for r in failed), file=sys.stderr)
        return EXIT_SELFCHECK
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsidenoise", description="Hyperspectral cube simulation, denoising and evaluation.",
                     epilog="exit codes: 0 ok, 1 usage/config, 2 I/O, 3 numeric failure, 4 selfcheck failure")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="add one of the synthetic noise cases to a clean cube")
    p.add_argument("clean", help="clean cube file")
    p.add_argument("--case", type=int, required=True, choices=range(1, 7), metavar="{1..6}")
    p.add_argument("--seed", type=int, help="noise seed (overrides the config)")
    p.add_argument("-o", "--out", required=True, help="noisy cube file to write")
    p.add_argument("--report", help="sidecar JSON path (default: OUT.json)")
    p.add_argument("--config", help="run config; its [noise] section supplies overrides")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("denoise", help="separate a noisy cube into low-rank and sparse parts")
    p.add_argument("noisy", help="noisy cube file")
    p.add_argument("--config", help="run config file")
    p.add_argument("--out-L", dest="out_L", required=True, help="denoised cube file")
    p.add_argument("--out-S", dest="out_S", required=True, help="sparse-component cube file")
    p.add_argument("--trace", required=True, help="per-iteration CSV trace")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--lam", type=float, help="sparse-term weight")
    p.add_argument("--gamma", type=float, help="SSTV weight")
    p.add_argument("--t-max", dest="t_max", type=int, help="iteration cap")
    p.add_argument("--threads", type=int, help="worker threads for the patch updates")
    p.add_argument("--reference", help="clean cube; adds MPSNR/MSSIM/ERGAS columns to the trace")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip per-band min-max scaling (input already in [0, 1])")
    p.add_argument("--save-config", help="write the effective config in canonical form")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("evaluate", help="PSNR/SSIM/ERGAS of a test cube against a reference")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--curves", help="per-band PSNR/SSIM CSV path")
    p.add_argument("--pixel", type=int, nargs=2, metavar=("ROW", "COL"),
                   help="add the spectral signature at this pixel to the report")
    p.add_argument("--config", help="run config; [metrics] pixel is used when --pixel is absent")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("selfcheck", help="run the oracle checks")
    p.add_argument("--deep", action="store_true", help="ten times larger samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"hsidenoise: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CubeFormatError) as exc:
        print(f"hsidenoise: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NonFiniteError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"hsidenoise: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
