"""Command-line front end.

Exit codes: 0 success, 1 usage or invalid arguments, 2 numerical failure,
3 non-convergence (only with ``optimize --strict``). Relative output paths
are resolved against ``$GAMKIT_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constellation import Scheme, build, load_json, save_json
from .gaps import gap_report
from .linksim import ser_sweep, ser_table_csv
from .metrics import entropy_bits, report
from .mi import SweepTable, capacity_rows, mi_sweep
from .optimize import G1Problem, solve_g1

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_NOT_CONVERGED = 0, 1, 2, 3
OUTPUT_DIR_ENV = "GAMKIT_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_snr_list(text: str) -> list:
    """``"0,5,10"`` or an inclusive range ``"start:stop:step"`` (dB)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 10) for k in range(count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}") from None


def _schemes(values) -> list:
    out = []
    for v in values:
        for name in v.split(","):
            try:
                out.append(Scheme(name.strip()))
            except ValueError:
                raise UsageError(f"unknown scheme {name!r}") from None
    return out


def _resolve(path):
    if path is None or path == "-":
        return path
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(text: str, path):
    path = _resolve(path)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _build(scheme, n, power):
    try:
        return build(scheme, n, power)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_generate(args) -> int:
    c = _build(_schemes([args.scheme])[0], args.n, args.power)
    out = _resolve(args.out) or Path(f"{c.scheme.value}_{c.n_points}.json")
    save_json(c, out)
    print(f"wrote {out}")
    print(report(c).to_text())
    return EXIT_OK


def cmd_metrics(args) -> int:
    c = load_json(args.input)
    rep = report(c)
    print(json.dumps(rep.to_dict()) if args.json else rep.to_text())
    return EXIT_OK


def _sweep_kwargs(args) -> dict:
    return dict(
        method=args.method,
        n_samples=args.samples,
        seed=args.seed,
        half_width_sigmas=args.half_width,
        nodes_per_axis=args.nodes,
        max_workers=args.workers,
    )


def _constellations(args) -> list:
    if args.input:
        return [load_json(args.input)]
    return [_build(s, args.n, args.power) for s in _schemes(args.scheme or ["gb-hr"])]


def cmd_mi_sweep(args) -> int:
    table = SweepTable()
    for c in _constellations(args):
        table.rows += mi_sweep(c, args.snr, **_sweep_kwargs(args)).rows
    computed = list(table.rows)
    if args.capacity:
        table.rows += capacity_rows(args.snr)
    for r in computed:
        if r.note:
            print(f"warning: {r.scheme} N={r.n} at {r.snr_db} dB {r.note}", file=sys.stderr)
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.out)
    if computed and all(math.isnan(r.mi_bits) for r in computed):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_optimize(args) -> int:
    init = args.init
    if args.init_file:
        init = list(load_json(args.init_file).radii)
    results = []
    code = EXIT_OK
    for snr_db in args.snr:
        try:
            prob = G1Problem(
                n_points=args.n,
                snr_linear=10.0 ** (snr_db / 10.0),
                papr_cap=args.papr_cap,
                init=init,
                max_iter=args.max_iter,
                tol=args.tol,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        res = solve_g1(prob)
        if not np.isfinite(res.mi_bits):
            code = EXIT_NUMERIC
        elif not res.converged and args.strict and code == EXIT_OK:
            code = EXIT_NOT_CONVERGED
        print(f"{snr_db:g} dB: MI {res.mi_bits:.4f} b/s/Hz (init {res.init_mi_bits:.4f}), "
              f"PAPR {res.papr:.3f}, {res.iterations} iterations, converged={res.converged}")
        results.append({"snr_db": snr_db, "problem": prob.to_dict(), "result": res.to_dict()})
        if args.constellation_out:
            stem = Path(args.constellation_out)
            path = stem if len(args.snr) == 1 else stem.with_name(f"{stem.stem}_{snr_db:g}dB{stem.suffix}")
            save_json(res.constellation(args.power), _resolve(path))
    _emit(json.dumps(results, indent=1) + "\n", args.out)
    return code


def cmd_ser_sweep(args) -> int:
    lines = []
    for c in _constellations(args):
        text = ser_table_csv(c, ser_sweep(c, args.snr, args.symbols, args.seed))
        lines.append(text if not lines else text.split("\n", 1)[1])
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    curves, entropies = {}, {}
    for c in _constellations(args):
        table = mi_sweep(c, args.snr, **_sweep_kwargs(args))
        name = c.scheme.value
        curves[name] = ([r.snr_db for r in table], [r.mi_bits for r in table])
        entropies[name] = entropy_bits(c)
    rep = gap_report(curves, args.target_mi, entropies)
    if args.format == "json":
        _emit(json.dumps(rep.to_dict(), indent=1) + "\n", args.out)
    else:
        _emit(rep.to_text() + "\n", args.out)
    if len(rep.unreachable) == len(curves):
        return EXIT_NUMERIC
    return EXIT_OK


def _add_constellation_args(p, multi=False):
    if multi:
        p.add_argument("--scheme", action="append",
                       help="scheme name (repeatable or comma separated): disc, gb-hr, qam, psk")
        p.add_argument("--in", dest="input", help="sweep a saved constellation JSON instead")
    else:
        p.add_argument("--scheme", required=True)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--power", type=float, default=1.0)


def _add_estimator_args(p):
    p.add_argument("--method", choices=["mc", "grid"], default="mc")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=513)
    p.add_argument("--half-width", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gamkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="build a constellation and write it as JSON")
    _add_constellation_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("metrics", help="figures of merit for a constellation file")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("mi-sweep", help="MI versus SNR as CSV/JSON")
    _add_constellation_args(p, multi=True)
    p.add_argument("--snr", type=parse_snr_list, default=parse_snr_list("0:20:2"))
    _add_estimator_args(p)
    p.add_argument("--no-capacity", dest="capacity", action="store_false")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mi_sweep)

    p = sub.add_parser("optimize", help="MI-optimised radii (formulation G1)")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--snr", type=parse_snr_list, required=True)
    p.add_argument("--papr-cap", type=float)
    p.add_argument("--init", choices=["hr", "disc"], default="hr")
    p.add_argument("--init-file", help="start from the radii of a constellation JSON")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--power", type=float, default=1.0,
                   help="mean power of the written constellation")
    p.add_argument("--strict", action="store_true", help="exit 3 if the solver does not converge")
    p.add_argument("--constellation-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("ser-sweep", help="symbol error rate versus SNR")
    _add_constellation_args(p, multi=True)
    p.add_argument("--snr", type=parse_snr_list, default=parse_snr_list("0:20:2"))
    p.add_argument("--symbols", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ser_sweep)

    p = sub.add_parser("compare", help="required-SNR gaps at a target MI")
    _add_constellation_args(p, multi=True)
    p.add_argument("--target-mi", type=float, required=True)
    p.add_argument("--snr", type=parse_snr_list, required=True)
    _add_estimator_args(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gamkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"gamkit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
