"""Command-line interface: ``plsbound {synth,fit,bound,experiment}``.

Every command writes plain CSV (and, for ``synth``, a JSON sidecar) into the
directory given by ``--out``. Identical arguments give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import bound_series, closed_form_report, moments
from .errors import PlsError
from .estimators import fit
from .experiment import (
    AggregateRow,
    ExperimentRecord,
    aggregate,
    check_records,
    run_experiment,
    write_dataclass_csv,
)
from .ingest import load_csv, load_xy, preprocess, read_numeric_csv
from .model import Dataset, covariance_pair
from .numerics import sym_eig
from .synth import SCENARIOS, generate_problem, get_scenario, parse_scenario


class CliError(Exception):
    pass


def _r(v: float) -> str:
    return repr(float(v))


def _ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {path}: {exc.strerror}") from exc
    return path


def _write_rows(path: str, header: Sequence[str], rows: Sequence[Sequence], comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _r(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _load_dataset(args: argparse.Namespace) -> Dataset:
    if args.y:
        table = load_xy(args.data, args.y)
    elif args.response:
        table = load_csv(args.data, args.response)
    else:
        raise CliError("--response (column name) or --y (response file) is required with --data")
    return preprocess(table, args.threshold, scale=not args.no_scale)


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args: argparse.Namespace) -> int:
    if args.scenario_file:
        with open(args.scenario_file, encoding="utf-8") as fh:
            sc = parse_scenario(fh.read())
    else:
        sc = get_scenario(args.scenario)
    prob = generate_problem(sc, n=args.n, seed=args.seed, design=args.design)
    out = _ensure_dir(args.out)
    d = prob.dataset
    _write_rows(os.path.join(out, "X.csv"), [f"x{j + 1}" for j in range(d.d)], [list(map(float, r)) for r in d.x])
    _write_rows(os.path.join(out, "y.csv"), ["y"], [[float(v)] for v in d.y])
    meta = {
        "scenario": sc.id,
        "scenario_name": sc.name,
        "n": d.n,
        "d": d.d,
        "seed": prob.seed,
        "design": prob.design,
        "sigma_noise": prob.sigma_noise,
        "realized_eigenvalues": [float(v) for v in prob.realized_eigenvalues],
        "true_beta": [float(v) for v in prob.true_beta],
    }
    with open(os.path.join(out, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(f"wrote scenario {sc.id} (n={d.n}, D={d.d}, seed={prob.seed}) to {out}")
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    d = _load_dataset(args)
    lmax = args.lmax if args.lmax is not None else d.d
    if args.method != "ols" and not 1 <= lmax <= d.d:
        raise CliError(f"--lmax must be between 1 and {d.d}")
    try:
        rep = fit(d, args.method, lmax)
    except PlsError as exc:
        raise CliError(f"{args.method} fit failed: {exc}") from exc
    out = _ensure_dir(args.out)
    # a path that stopped early is constant from there on; emit every requested L
    ls = [d.d] if args.method == "ols" else list(range(1, lmax + 1))
    idx = [0] if args.method == "ols" else [min(l, rep.coefficients.l_max) - 1 for l in ls]
    _write_rows(
        os.path.join(out, "coefficients.csv"),
        ["L"] + [f"b{j + 1}" for j in range(d.d)],
        [[l] + [float(v) for v in rep.coefficients.betas[i]] for l, i in zip(ls, idx)],
        comments=[f"method={args.method}"] + rep.notes,
    )
    _write_rows(
        os.path.join(out, "summary.csv"),
        ["L", "r2", "residual_norm"],
        [[l, float(rep.r2_per_l[i]), float(rep.residual_norms[i])] for l, i in zip(ls, idx)],
        comments=[f"method={args.method}"] + rep.notes,
    )
    print(f"{args.method}: {len(ls)} coefficient row(s), final R^2 = {rep.r2_per_l[-1]:.6f}")
    return 0


def _read_eigenvalues(path: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise CliError(f"no such file: {path}")
    vals = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            for tok in re.split(r"[,\s]+", line):
                if not tok:
                    continue
                try:
                    vals.append(float(tok))
                except ValueError:
                    raise CliError(f"{path}: not a number: {tok!r}") from None
    if not vals:
        raise CliError(f"{path}: no eigenvalues found")
    return np.asarray(vals)


def cmd_bound(args: argparse.Namespace) -> int:
    if args.eigenvalues:
        lam = _read_eigenvalues(args.eigenvalues)
        source = args.eigenvalues
    elif args.data:
        sxx, _ = covariance_pair(_load_dataset(args))
        lam = sym_eig(sxx).eigenvalues
        source = args.data
    else:
        raise CliError("one of --eigenvalues or --data is required")
    ms = moments(lam, args.lmax)
    series = bound_series(ms, args.lmax)
    rep = closed_form_report(ms)
    comments = [
        f"source={source}",
        f"D={ms.d_count} mean={_r(ms.mean)} cv={_r(ms.cv)} gamma={_r(ms.gamma)} kappa={_r(ms.kappa)}"
        + (" degenerate_spectrum" if ms.degenerate else ""),
        f"closed_form C1={_r(rep['closed_c1'])} C2_published={_r(rep['published_c2'])} "
        f"C2_exact={_r(rep['exact_c2'])}",
        f"hankel C1={_r(rep['hankel_c1'])} C2={_r(rep['hankel_c2'])} "
        f"rel_err_C2_published={_r(rep['rel_err_published_c2'])}",
    ]
    rows = [
        [l, float(c), float(k), str(bool(cl)).lower(), str(bool(ill)).lower()]
        for l, c, k, cl, ill in zip(
            range(1, args.lmax + 1),
            series.c_l_values,
            series.hankel_condition,
            series.clamped,
            series.ill_conditioned,
        )
    ]
    out = _ensure_dir(args.out)
    _write_rows(
        os.path.join(out, "bound.csv"),
        ["L", "C_L", "condition_H_L", "clamped", "ill_conditioned"],
        rows,
        comments,
    )
    print(f"C_1..C_{args.lmax} written to {os.path.join(out, 'bound.csv')}")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    scenarios = args.scenarios or ([] if args.data else sorted(SCENARIOS))
    for s in scenarios:
        get_scenario(s)
    seeds = args.seed_list if args.seed_list else args.seeds
    external = None
    if args.data:
        external = {args.label: _load_dataset(args)}
    rows = run_experiment(
        scenarios, seeds, args.lmax, n=args.n, design=args.design, external=external, jobs=args.jobs
    )
    problems = check_records(rows)
    if problems:
        raise CliError(f"{len(problems)} invariant violation(s), first: {problems[0]}")
    out = _ensure_dir(args.out)
    write_dataclass_csv(os.path.join(out, "records.csv"), rows, ExperimentRecord)
    write_dataclass_csv(os.path.join(out, "aggregate.csv"), aggregate(rows), AggregateRow)
    failed = sum(1 for r in rows if r.error)
    print(f"{len(rows)} rows ({failed} failed) written to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_data_args(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--data", required=required, help="CSV with a header row")
    p.add_argument("--response", help="name of the response column in --data")
    p.add_argument("--y", help="separate single-column response CSV (e.g. from 'synth')")
    p.add_argument("--threshold", type=float, help="drop rows whose response is >= this value")
    p.add_argument("--no-scale", action="store_true", help="center only; skip unit-variance scaling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plsbound", description="PLS vs OLS regression with spectral distance bounds."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic regression problem")
    p.add_argument("--scenario", type=int, default=1, help=f"built-in scenario id {sorted(SCENARIOS)}")
    p.add_argument("--scenario-file", help="key = value scenario definition (overrides --scenario)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--design", choices=["gaussian", "exact"], default="gaussian")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit PLS, OLS or PCR and write coefficient paths")
    _add_data_args(p, required=True)
    p.add_argument("--method", choices=["pls", "ols", "pcr"], default="pls")
    p.add_argument("--lmax", type=int, help="largest component count (default: D)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bound", help="moment bound C_L from eigenvalues or data")
    p.add_argument("--eigenvalues", help="file of eigenvalues (comma/whitespace separated)")
    _add_data_args(p)
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("experiment", help="seeded NED / C_L / R^2 runs over scenarios")
    p.add_argument("--scenarios", type=int, nargs="+", help="scenario ids (default: all built-ins)")
    p.add_argument("--seeds", type=int, default=20, help="use seeds 1..SEEDS")
    p.add_argument("--seed-list", type=int, nargs="+", help="explicit seeds (overrides --seeds)")
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--design", choices=["gaussian", "exact"], default="gaussian")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_data_args(p)
    p.add_argument("--label", default="external", help="scenario label for --data rows")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, PlsError, OSError, ValueError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"plsbound {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
