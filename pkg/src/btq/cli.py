"""Command-line entry point: ``btq <subcommand> [options]``.

Every subcommand writes one table, either CSV (header then rows) or JSON
(``{"meta": ..., "rows": [...]}``), to ``--output`` or stdout.  Exit codes:
0 success, 1 a check failed, 2 bad usage.
"""
import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .asymptotics import (DEFAULT_M_RANGE, estimate_A1, sample_grid, sweep_berezin, sweep_dirac,
                          sweep_norm_limit, sweep_product, tuynman_table)
from .geometry import function_library, manifold, parse_function, random_points
from .hilbert import build_section_space, epsilon_function, two_point_kernel
from .operators import OperatorMatrix, operator_norm, toeplitz
from .symbols import berezin_transform, contravariant_solve, toeplitz_map_matrix
from ._backend import get_backend
from .verification import _adjoint_worst, check_surjectivity, run_all

SIG_DIGITS = 12


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization

def _fmt_real(x):
    return float(f"{x:.{SIG_DIGITS}g}")


def fmt_value(v):
    """Round to 12 significant digits; complex values become ``"re+imj"``."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        re, im = _fmt_real(v.real), _fmt_real(v.imag)
        return f"{re:.{SIG_DIGITS}g}{'+' if im >= 0 else '-'}{abs(im):.{SIG_DIGITS}g}j"
    if isinstance(v, (float, np.floating)):
        return _fmt_real(v)
    return v


def render(meta, rows, fmt):
    rows = [{k: fmt_value(v) for k, v in r.items()} for r in rows]
    if fmt == "json":
        meta = {k: fmt_value(v) if not isinstance(v, (list, dict)) else v for k, v in meta.items()}
        return json.dumps({"meta": meta, "rows": rows}, indent=1) + "\n"
    buf = io.StringIO()
    fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument helpers

def parse_m_range(text):
    """``"4:60:2"`` (inclusive stop), ``"4,6,10"`` or a single level."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            out = list(range(parts[0], parts[1] + 1, step))
        else:
            out = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed m range {text!r}") from None
    if not out or min(out) < 1 or any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError(f"m range must be nonempty, ascending and >= 1: {text!r}")
    return out


def _level(args, model):
    m = args.m
    if m is None:
        raise UsageError("--m is required")
    try:
        vals = [int(v) for v in str(m).split(",")]
        return model.levels(vals[0] if len(vals) == 1 else vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _functions(args, model, count=None):
    names = args.function or []
    if count is not None and len(names) != count:
        raise UsageError(f"expected {count} --function value(s), got {len(names)}")
    try:
        return [parse_function(n, model) for n in names]
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None


def _m_range(args):
    if args.m_range:
        return parse_m_range(args.m_range)
    return [m for m in DEFAULT_M_RANGE if m <= (args.m_max or 60)]


def _space(args, model, m=None):
    return build_section_space(model, m if m is not None else _level(args, model), args.extra_band)


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, extra meta, ok)

def cmd_gram(args, model):
    sp = _space(args, model)
    rows = []
    for i in range(sp.dimension):
        for j in range(sp.dimension):
            rows.append({"i": i, "j": j, "exponent_i": str(tuple(int(e) for e in sp.exponents[i])),
                         "exponent_j": str(tuple(int(e) for e in sp.exponents[j])), "gram": sp.gram[i, j],
                         "transform": sp.basis_transform[i, j]})
    return rows, {"dimension": sp.dimension}, True


def cmd_toeplitz(args, model):
    sp = _space(args, model)
    (f,) = _functions(args, model, 1)
    t = toeplitz(sp, f)
    rows = [{"i": i, "j": j, "value": t.entries[i, j]}
            for i in range(sp.dimension) for j in range(sp.dimension)]
    return rows, {"function": f.name, "operator_norm": operator_norm(t),
                  "diagnostics": list(t.diagnostics)}, True


def _table_rows(table):
    return table.as_records(), {"label": table.label, "slope": table.slope,
                                "fit_range": list(table.fit_range or ()), "r2": table.r2}


def cmd_norms(args, model):
    (f,) = _functions(args, model, 1)
    rows, meta = _table_rows(sweep_norm_limit(f, _m_range(args), model, args.workers))
    return rows, meta, True


def cmd_dirac(args, model):
    f, g = _functions(args, model, 2)
    rows, meta = _table_rows(sweep_dirac(f, g, _m_range(args), model, args.workers))
    return rows, meta, True


def cmd_product(args, model):
    f, g = _functions(args, model, 2)
    rows, meta = _table_rows(sweep_product(f, g, _m_range(args), model, args.workers))
    return rows, meta, True


def _grid(args, model):
    if model.complex_dimension == 1:
        return sample_grid(size=args.grid)
    return random_points(model, args.grid ** 2, np.random.default_rng(args.seed))


def _point_columns(z, n):
    if n == 1:
        return [{"z": complex(v)} for v in z]
    return [{f"z{i}": complex(v) for i, v in enumerate(p)} for p in z]


def cmd_epsilon(args, model):
    sp = _space(args, model)
    z = _grid(args, model)
    eps = epsilon_function(sp, z)
    target = sp.dimension / model.total_volume
    rows = [dict(p, epsilon=e) for p, e in zip(_point_columns(z, model.complex_dimension), eps)]
    dev = float(np.max(np.abs(eps - target)) / target)
    return rows, {"target": target, "max_relative_deviation": dev}, dev < 1e-10


def cmd_kernel(args, model):
    sp = _space(args, model)
    rng = np.random.default_rng(args.seed)
    z = random_points(model, args.grid, rng)
    w = random_points(model, args.grid, rng)
    kmat = two_point_kernel(sp).matrix(z, w)
    n = model.complex_dimension
    px, py = _point_columns(z, n), _point_columns(w, n)
    rows = []
    for i in range(len(px)):
        for j in range(len(py)):
            row = {f"x_{k}": v for k, v in px[i].items()}
            row.update({f"y_{k}": v for k, v in py[j].items()})
            row["K"] = kmat[i, j]
            rows.append(row)
    return rows, {}, True


def cmd_berezin(args, model):
    (f,) = _functions(args, model, 1)
    if args.m is not None:
        sp = _space(args, model)
        z = _grid(args, model)
        b = berezin_transform(sp, f, z)
        rows = [dict(p, f=complex(fv), berezin=bv)
                for p, fv, bv in zip(_point_columns(z, model.complex_dimension), f(z), b)]
        return rows, {"function": f.name}, True
    if model.complex_dimension != 1:
        raise UsageError("berezin sweeps run on cp1; pass --m for point values")
    ms = _m_range(args)
    table = sweep_berezin(f, ms, model, workers=args.workers)
    a1 = estimate_A1(f, ms, model=model, workers=args.workers)
    rows, meta = _table_rows(table)
    meta.update({"A1_laplacian_ratio": a1.laplacian_ratio, "A1_misfit": a1.misfit,
                 "A1_fit_levels": list(a1.fit_levels)})
    return rows, meta, True


def cmd_adjoint(args, model):
    ms = parse_m_range(args.m_range) if args.m_range else [5, 10, 20, 40]
    fns = _functions(args, model) or function_library(model)
    rows = []
    for m in ms:
        worst = _adjoint_worst(_space(args, model, m), fns, rng=args.seed + m)
        rows.append({"m": m, "worst_relative_error": worst, "passed": worst < 1.0})
    return rows, {"functions": [f.name for f in fns]}, all(r["passed"] for r in rows)


def cmd_surjectivity(args, model):
    if model.complex_dimension != 1:
        rng = np.random.default_rng(args.seed)
        sp = _space(args, model)
        mat, _ = toeplitz_map_matrix(sp)
        sv = np.linalg.svd(mat, compute_uv=False)
        a = rng.normal(size=(sp.dimension,) * 2) + 1j * rng.normal(size=(sp.dimension,) * 2)
        sol = contravariant_solve(OperatorMatrix(sp.level, a), sp, tol=np.inf)
        rows = [{"levels": str(sp.levels), "sv_ratio": sv[-1] / sv[0], "rank": sol.rank,
                 "round_trip": sol.residual / operator_norm(a)}]
        return rows, {}, rows[0]["sv_ratio"] > 1e-8
    res = check_surjectivity(m_max=args.m_max or 8, rng=args.seed)
    rows = [{"m": m, "sv_ratio": r, "equilibrated_sv_ratio": res.detail["equilibrated_ratios"][m]}
            for m, r in res.detail["ratios"].items()]
    return rows, {"round_trip": res.detail["round_trip"]}, res.passed


def cmd_tuynman(args, model):
    fns = _functions(args, model) or None
    ms = parse_m_range(args.m_range) if args.m_range else list(range(2, (args.m_max or 40) + 1))
    table = tuynman_table(fns, ms, model, args.workers)
    rows = table.as_records()
    worst = float(table.values.max())
    return rows, {"max_residual": worst}, worst < 1e-8


def cmd_verify_all(args, model):
    if args.m_max is not None and args.m_max < 10:
        raise UsageError("verify-all needs --m-max >= 10")
    results = run_all(args.m_max, workers=args.workers)
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed, "value": r.value,
             "threshold": r.threshold, "detail": json.dumps(r.detail, default=float, sort_keys=True)}
            for r in results]
    for r in results:
        print(r.line(), file=sys.stderr)
    return rows, {"criteria": len(results)}, all(r.passed for r in results)


COMMANDS = {
    "gram": cmd_gram, "toeplitz": cmd_toeplitz, "norms": cmd_norms, "dirac": cmd_dirac,
    "product": cmd_product, "epsilon": cmd_epsilon, "kernel": cmd_kernel,
    "berezin": cmd_berezin, "adjoint": cmd_adjoint, "surjectivity": cmd_surjectivity,
    "tuynman": cmd_tuynman, "verify-all": cmd_verify_all,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="btq", description="Berezin-Toeplitz quantization on CP^1 and CP^1 x CP^1")
    p.add_argument("--version", action="version", version=f"btq {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--manifold", default="cp1", choices=["cp1", "cp1xcp1"])
    p.add_argument("--m", help="level; 'm1,m2' on the product manifold")
    p.add_argument("--m-max", type=int)
    p.add_argument("--m-range", help="'lo:hi[:step]' (inclusive) or a comma list")
    p.add_argument("--function", action="append",
                   help="library function, e.g. x3 or 'x1+x3' or 'x1@0*x2@1'; repeatable")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--extra-band", type=int, default=8)
    p.add_argument("--grid", type=int, default=20, help="points per axis for sampled output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help="parallel levels (default BTQ_WORKERS or cpu count)")
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.m_max is not None and args.m_max < 1:
            raise UsageError("--m-max must be >= 1")
        if args.extra_band < 0 or args.grid < 1:
            raise UsageError("--extra-band must be >= 0 and --grid >= 1")
        if args.workers is not None and args.workers < 1:
            raise UsageError("--workers must be >= 1")
        model = manifold(args.manifold)
        rows, meta, ok = COMMANDS[args.command](args, model)
    except UsageError as exc:
        print(f"btq: error: {exc}", file=sys.stderr)
        return 2
    meta = {"command": args.command, "manifold": args.manifold, "m": args.m,
            "m_max": args.m_max, "m_range": args.m_range, "functions": args.function,
            "extra_band": args.extra_band, "seed": args.seed, "version": __version__,
            "backend": get_backend(), **meta}
    text = render(meta, rows, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
