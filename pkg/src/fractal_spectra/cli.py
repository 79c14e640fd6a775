"""Command line front end.

Subcommands:

    meta              closed-form data of a self-similar weight (JSON)
    reference         both-ray eigenvalue table of the built-in weight (CSV)
    eigen             depth-refined pencil eigenvalues on one ray (CSV)
    counting          inertia counting series over a magnitude window (CSV)
    s-estimate        amplitude report from a stored counting series (JSON)
    renewal-discrete  integer-lag two-component recursion and its limits
    renewal-lattice   lattice renewal system along unit fibers
    renewal-nonarith  real-delay renewal system on a uniform grid

Exit codes: 0 success, 2 validation failure (bad parameters, malformed
input), 3 numerical failure, 4 I/O failure.  The environment variable
FRACTAL_SPECTRA_THREADS caps the compiled-kernel thread count.
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import json
import os
import sys

import numpy as np

from . import asympt, renewal, selfsim, spectral
from .errors import FractalSpectraError, NumericalError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _configure_threads() -> None:
    raw = os.environ.get("FRACTAL_SPECTRA_THREADS")
    if not raw:
        return
    try:
        import numba

        numba.set_num_threads(max(1, int(raw)))
    except Exception:
        pass  # thread capping is best effort


def _load_json_arg(text: str):
    """Parse inline JSON or read it from a file path."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON argument: {exc}") from exc
    with open(text, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON in {text}: {exc}") from exc


def _float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(selfsim._as_float(tok)) for tok in text.split(",")]
    except (ValueError, ValidationError) as exc:
        raise ValidationError(f"unparsable number list {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def _csv(header: list[str], columns: list) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        cells = []
        for val in row:
            if isinstance(val, str):
                cells.append(val)
            elif isinstance(val, (int, np.integer)):
                cells.append(str(int(val)))
            else:
                cells.append("%.5e" % float(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _read_csv_columns(path: str, wanted: list[str]) -> list[np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv_mod.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        idx = []
        for name in wanted:
            if name not in header:
                raise ValidationError(f"{path} lacks a {name!r} column")
            idx.append(header.index(name))
        cols = [[] for _ in wanted]
        for row in reader:
            if not row:
                continue
            for j, i in enumerate(idx):
                try:
                    cols[j].append(float(row[i]))
                except (IndexError, ValueError) as exc:
                    raise ValidationError(f"bad row in {path}: {row}") from exc
    return [np.asarray(c) for c in cols]


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_meta(args) -> int:
    params = selfsim.validate_params(_load_json_arg(args.params))
    meta = selfsim.compute_meta(params)
    payload = {"n_pieces": params.n_pieces}
    payload.update(selfsim.meta_to_mapping(meta))
    _emit(_json_dump(payload), args.out)
    return EXIT_OK


def _ray_rows(params, meta, side: str, args):
    res = spectral.eigenvalues_converged(
        params, side, args.count, depth_max=args.depth_max, tol=args.tol,
        rtol=args.rtol,
    )
    sign = 1 if side == "pos" else -1
    n = sign * np.arange(1, args.count + 1)
    ratio = np.abs(n) / np.abs(res.lam) ** meta.D_half
    return n, res.lam, res.rel_gap, ratio


def cmd_reference(args) -> int:
    params = selfsim.reference_params()
    meta = selfsim.compute_meta(params)
    cols = [np.concatenate(c) for c in zip(
        _ray_rows(params, meta, "pos", args),
        _ray_rows(params, meta, "neg", args),
    )]
    _emit(_csv(["n", "lambda", "rel_gap", "ratio"], cols), args.out)
    return EXIT_OK


def cmd_eigen(args) -> int:
    params = selfsim.validate_params(_load_json_arg(args.params))
    meta = selfsim.compute_meta(params)
    n, lam, gap, _ = _ray_rows(params, meta, args.side, args)
    _emit(_csv(["n", "lambda", "rel_gap"], [np.abs(n), lam, gap]), args.out)
    return EXIT_OK


def cmd_counting(args) -> int:
    params = selfsim.validate_params(_load_json_arg(args.params))
    pencil = spectral.build_pencil(params, args.depth)
    if not (0.0 < args.lmin < args.lmax):
        raise ValidationError("need 0 < lmin < lmax")
    if args.phases is not None:
        meta = pencil.meta
        if meta.nu is None:
            raise ValidationError("phase grids need an arithmetic weight")
        mags = np.unique(np.concatenate([
            asympt.lattice_magnitudes(meta.nu, (args.lmin, args.lmax), p,
                                      side=args.side)
            for p in _float_list(args.phases)
        ]))
        if mags.size == 0:
            raise ValidationError("no lattice magnitudes inside the window")
    else:
        mags = np.geomspace(args.lmin, args.lmax, args.points)
    series = spectral.counting_series(pencil, mags, args.side)
    _emit(_csv(["lambda", "count"], [series.lam, series.counts]), args.out)
    return EXIT_OK


def cmd_s_estimate(args) -> int:
    meta = selfsim.meta_from_mapping(_load_json_arg(args.meta))
    lam, counts = _read_csv_columns(args.series, ["lambda", "count"])
    series = spectral.series_from_arrays(lam, counts, meta)
    window = None
    if args.window is not None:
        window = (float(args.window[0]), float(args.window[1]))
    payload = {
        "side": series.side,
        "D_half": meta.D_half,
        "classification": meta.classification,
    }
    if meta.nu is None:
        est = asympt.estimate_constant_s(series, decades=args.decades)
        b = est.bins[0]
        payload.update({
            "mode": "constant",
            "window": list(est.window),
            "estimate": {"mean": b.mean, "lo": b.lo, "hi": b.hi,
                         "n_samples": int(b.ratios.size)},
        })
    else:
        phases = _float_list(args.phases or "0,1")
        est = asympt.estimate_periodic_s(series, phases, window=window)
        payload.update({
            "mode": "periodic",
            "nu": meta.nu,
            "window": list(est.window),
            "bins": {
                "%g" % b.phase: {"mean": b.mean, "lo": b.lo, "hi": b.hi,
                                 "n_samples": int(b.ratios.size)}
                for b in est.bins
            },
        })
    _emit(_json_dump(payload), args.out)
    return EXIT_OK


def _coeffs_from_args(args) -> renewal.RenewalCoefficients:
    u = _float_list(args.u)
    v = _float_list(args.v)
    if getattr(args, "delays", None):
        return renewal.RenewalCoefficients.real_delays(u, v, _float_list(args.delays))
    return renewal.RenewalCoefficients.integer_lags(u, v)


def cmd_renewal_discrete(args) -> int:
    coeffs = _coeffs_from_args(args)
    x1 = _float_list(args.x1)
    x2 = _float_list(args.x2)
    z1, z2 = renewal.solve_discrete(coeffs, x1, x2, args.n)
    limits = renewal.discrete_limits(coeffs, x1, x2)
    payload = {
        "J": limits.J,
        "omega": limits.omega,
        "chi": limits.chi,
        "z1_final": float(z1[-1]),
        "z2_final": float(z2[-1]),
        "limits": {
            "z1_even": limits.limit(1, 0), "z1_odd": limits.limit(1, 1),
            "z2_even": limits.limit(2, 0), "z2_odd": limits.limit(2, 1),
        },
    }
    if args.out is not None:
        n = np.arange(args.n + 1)
        _emit(_csv(["n", "z1", "z2"], [n, z1, z2]), args.out)
    sys.stdout.write(_json_dump(payload))
    return EXIT_OK


def cmd_renewal_lattice(args) -> int:
    coeffs = _coeffs_from_args(args)
    forcing = renewal.forcing_from_spec(_load_json_arg(args.forcing))
    phases = _float_list(args.phases)
    sol = renewal.solve_lattice(coeffs, forcing, phases, args.horizon)
    rep = sol.limit_report
    payload = {
        "J": coeffs.J,
        "horizon": args.horizon,
        "tail_window": list(rep.tail_window),
        "tail_discrepancy": rep.tail_discrepancy,
    }
    if args.out is not None:
        _emit(_csv(["t", "z1", "z2"], [sol.grid, sol.z1, sol.z2]), args.out)
    sys.stdout.write(_json_dump(payload))
    return EXIT_OK


def cmd_renewal_nonarith(args) -> int:
    coeffs = _coeffs_from_args(args)
    forcing = renewal.forcing_from_spec(_load_json_arg(args.forcing))
    tail_tol = None if args.tail_tol.lower() == "none" else float(args.tail_tol)
    sol = renewal.solve_nonarithmetic(
        coeffs, forcing, args.step, (args.window[0], args.window[1]),
        tail_mass_tol=tail_tol,
    )
    rep = sol.limit_report
    payload = {
        "J": coeffs.J,
        "limits": list(rep.predicted),
        "tail_window": list(rep.tail_window),
        "tail_discrepancy": rep.tail_discrepancy,
    }
    if args.out is not None:
        _emit(_csv(["t", "z1", "z2"], [sol.grid, sol.z1, sol.z2]), args.out)
    sys.stdout.write(_json_dump(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractal-spectra",
        description="Spectral asymptotics of strings with self-similar "
                    "indefinite weights, and their renewal systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", default=None, help="output file (default stdout)")

    def add_policy(p):
        p.add_argument("--count", type=int, default=12)
        p.add_argument("--depth-max", type=int, default=12)
        p.add_argument("--tol", type=float, default=0.005,
                       help="relative eigenvalue movement between depths")
        p.add_argument("--rtol", type=float, default=spectral.DEFAULT_EIGEN_RTOL)

    p = sub.add_parser("meta", help="closed-form data of a weight")
    p.add_argument("--params", required=True, help="JSON file or inline JSON")
    add_out(p)
    p.set_defaults(func=cmd_meta)

    p = sub.add_parser("reference", help="both-ray table of the built-in weight")
    add_policy(p)
    add_out(p)
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("eigen", help="pencil eigenvalues on one ray")
    p.add_argument("--params", required=True)
    p.add_argument("--side", choices=["pos", "neg"], required=True)
    add_policy(p)
    add_out(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("counting", help="inertia counts over a magnitude window")
    p.add_argument("--params", required=True)
    p.add_argument("--side", choices=["pos", "neg"], required=True)
    p.add_argument("--lmin", type=float, required=True)
    p.add_argument("--lmax", type=float, required=True)
    p.add_argument("--points", type=int, default=64,
                   help="log-spaced sample count")
    p.add_argument("--phases", default=None,
                   help="comma list; sample the phase lattice instead")
    p.add_argument("--depth", type=int, default=10)
    add_out(p)
    p.set_defaults(func=cmd_counting)

    p = sub.add_parser("s-estimate", help="amplitude report from a counting series")
    p.add_argument("--series", required=True, help="counting CSV")
    p.add_argument("--meta", required=True, help="meta JSON (from `meta`)")
    p.add_argument("--phases", default=None, help="comma list, default 0,1")
    p.add_argument("--window", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"),
                   help="magnitude window the series was drawn to cover")
    p.add_argument("--decades", type=float, default=1.0,
                   help="top decades pooled in constant mode")
    add_out(p)
    p.set_defaults(func=cmd_s_estimate)

    p = sub.add_parser("renewal-discrete", help="integer-lag recursion")
    p.add_argument("--u", required=True, help="comma list, lag k = position")
    p.add_argument("--v", required=True)
    p.add_argument("--x1", default="", help="forcing sequence, comma list")
    p.add_argument("--x2", default="")
    p.add_argument("--n", type=int, default=400)
    add_out(p)
    p.set_defaults(func=cmd_renewal_discrete)

    p = sub.add_parser("renewal-lattice", help="lattice renewal system")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--forcing", required=True, help="JSON file or inline JSON")
    p.add_argument("--phases", default="0,0.25,0.5,0.75")
    p.add_argument("--horizon", type=float, default=60.0)
    add_out(p)
    p.set_defaults(func=cmd_renewal_lattice)

    p = sub.add_parser("renewal-nonarith", help="real-delay renewal system")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--delays", required=True)
    p.add_argument("--forcing", required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--window", type=float, nargs=2, default=(-12.0, 200.0),
                   metavar=("T_LO", "T_HI"))
    p.add_argument("--tail-tol", default="1e-9",
                   help="forcing tail tolerance, or 'none'")
    add_out(p)
    p.set_defaults(func=cmd_renewal_nonarith)

    return parser


def main(argv=None) -> int:
    _configure_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FractalSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", EXIT_VALIDATION)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
