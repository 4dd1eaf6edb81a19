"""Command-line front door: wires models to the distance computations,
runs rate experiments over n, and emits machine-readable reports.

Exit codes: 0 success (or "holds" for checkers), 1 failure, 2
inconclusive, 3 argument or config parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .divergences import kl, pearson_vajda, renyi_tsallis, infinite_order, tv_hellinger
from .edgeworth import CumulantVector, expansion_constants, fit_leading_constant, q_polynomial
from .errors import LabError
from .grids import GridConfig, gaussian_grid, normalized_sum_density
from .hermite import normal_moments
from .models import MODEL_DOCS, ModelSpec, make_model
from .reports import FAILS, HOLDS, INCONCLUSIVE
from .subgauss import dinf_clt_check, profile, separation_check, strict_subgauss_check

_EXIT = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    distance: str                       # kl | chi2 | renyi | tinf
    n_values: tuple
    grid: GridConfig = field(default_factory=GridConfig)
    output: str | None = None
    format: str = "csv"
    alpha: float = 2.0

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_values)
        if any(b <= a for a, b in zip(ns, ns[1:])) or not ns:
            raise ValueError("n_values must be nonempty and strictly increasing")
        object.__setattr__(self, "n_values", ns)
        if self.grid.points & (self.grid.points - 1):
            raise ValueError("grid points must be a power of two")
        if self.distance not in ("kl", "chi2", "renyi", "tinf"):
            raise ValueError(f"unknown distance {self.distance!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _parse_model(text: str) -> ModelSpec:
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    text = text.strip()
    if text.startswith("{"):
        obj = json.loads(text)
        return ModelSpec(obj.get("kind", ""), obj.get("params", {}) or {})
    return ModelSpec(text, {})


def _parse_grid(text: str) -> GridConfig:
    w, _, n = text.partition("x")
    return GridConfig(half_width=float(w), points=int(n))


def _parse_floats(text: str):
    return [float(v) for v in text.split(",") if v]


def _parse_ints(text: str):
    return [int(v) for v in text.split(",") if v]


def _emit(rows, header, out, as_json):
    """Write rows either as CSV (12 significant digits) or JSON."""
    if as_json:
        payload = [dict(zip(header, r)) for r in rows]
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_dist(args) -> int:
    model = make_model(_parse_model(args.model))
    p = normalized_sum_density(model, args.n, args.grid)
    q = gaussian_grid(p)
    rows = []
    for alpha in args.alpha:
        if alpha == 1.0:
            d = kl(p, q)
            rows.append((alpha, d, d, 0.0))
        elif math.isinf(alpha):
            d, t = infinite_order(p, q)
            rows.append((alpha, d, t, 0.0))
        else:
            d, t = renyi_tsallis(p, q, alpha)
            rows.append((alpha, d.value, t.value, t.tail_bound))
    _emit(rows, ["alpha", "D_alpha", "T_alpha", "tail_bound"],
          args.out, args.json or args.format == "json")
    return 0


def _distance_value(model, n, cfg, distance, alpha):
    p = normalized_sum_density(model, n, cfg)
    q = gaussian_grid(p)
    if distance == "kl":
        return kl(p, q), 0.0
    if distance == "chi2":
        return pearson_vajda(p, q, 2.0), 0.0
    if distance == "tinf":
        _, t = infinite_order(p, q)
        return t, 0.0
    d, t = renyi_tsallis(p, q, alpha)
    return t.value, t.tail_bound


def run_experiment(cfg: ExperimentConfig) -> list:
    """One row per n: value, tail_bound, fitted constant, predicted
    constant, relative gap.  Returns the rows; writes cfg.output if set."""
    model = make_model(cfg.model)
    workers = int(os.environ.get("RENYI_LAB_THREADS", "0")) or min(4, len(cfg.n_values))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(
            lambda n: _distance_value(model, n, cfg.grid, cfg.distance, cfg.alpha),
            cfg.n_values))
    values = [v for v, _ in results]
    gam = model.cumulants or (0.0, 1.0)
    const = expansion_constants(CumulantVector(tuple(gam) + (0.0,) * max(0, 4 - len(gam))))
    g3_zero = const["chi2_c2_valid"]
    if cfg.distance == "kl":
        power = 2.0 if g3_zero else 1.0
        predicted = const["entropy_c2"] if g3_zero else const["entropy_c1"]
    elif cfg.distance in ("chi2", "renyi"):
        power = 2.0 if g3_zero else 1.0
        predicted = const["chi2_c2"] if g3_zero else const["chi2_c1"]
    else:
        power, predicted = 0.0, math.nan
    if all(math.isfinite(v) for v in values):
        fitted, _ = fit_leading_constant(cfg.n_values, values, power)
    else:
        fitted = math.nan
    gap = abs(fitted - predicted) / abs(predicted) if predicted else math.nan
    rows = [(n, v, tb, fitted, predicted, gap)
            for n, (v, tb) in zip(cfg.n_values, results)]
    header = ["n", "value", "tail_bound", "fitted_constant",
              "predicted_constant", "relative_gap"]
    _emit(rows, header, cfg.output, cfg.format == "json")
    return rows


def _cmd_rate(args) -> int:
    cfg = ExperimentConfig(
        model=_parse_model(args.model), distance=args.distance,
        n_values=tuple(args.n), grid=args.grid,
        output=args.out, format="json" if args.json else args.format,
        alpha=args.alpha_value)
    run_experiment(cfg)
    return 0


def _cmd_hermite(args) -> int:
    model = make_model(_parse_model(args.model))
    c = normal_moments(model, K=args.k)
    rows = [(k, c[k]) for k in range(len(c))]
    _emit(rows, ["k", "c_k"], args.out, args.json or args.format == "json")
    return 0


def _cmd_edgeworth(args) -> int:
    if args.model:
        model = make_model(_parse_model(args.model))
        if model.cumulants is None:
            raise LabError(f"model {model.name!r} has no closed-form cumulants")
        gam = CumulantVector(model.cumulants)
    else:
        gam = CumulantVector(tuple(_parse_floats(args.gammas)))
    rows = []
    for nu in range(1, args.m - 1):
        poly = q_polynomial(nu, gam)
        for deg in sorted(poly.coefficients):
            co = poly.coefficients[deg]
            if co:
                rows.append((nu, deg, co))
    _emit(rows, ["nu", "degree", "coefficient"],
          args.out, args.json or args.format == "json")
    return 0


def _check_report(args, which) -> int:
    model = make_model(_parse_model(args.model))
    prof = profile(model)
    if which == "subgauss":
        report = strict_subgauss_check(prof)
        if args.t0:
            sep = separation_check(prof, _parse_floats(args.t0))
            worst = max(report.verdict, sep.verdict, key=lambda v: _EXIT[v])
            payload = {"strict": report.to_dict(), "separation": sep.to_dict(),
                       "verdict": worst}
            sys.stdout.write(json.dumps(payload, indent=2, default=float) + "\n")
            return _EXIT[worst]
    else:
        report = dinf_clt_check(prof)
    sys.stdout.write(json.dumps(report.to_dict(), indent=2, default=float) + "\n")
    return _EXIT[report.verdict]


def _cmd_zoo(args) -> int:
    if args.action == "list" and not args.model:
        for kind in sorted(MODEL_DOCS):
            print(f"{kind}: {MODEL_DOCS[kind]}")
        return 0
    model = make_model(_parse_model(args.model))
    info = {"name": model.name,
            "cumulants": list(model.cumulants) if model.cumulants else None,
            "has_density": model.density is not None,
            "has_log_laplace": model.log_laplace is not None,
            "meta": {k: v for k, v in model.meta.items()
                     if isinstance(v, (int, float, str, tuple, list))}}
    sys.stdout.write(json.dumps(info, indent=2, default=str) + "\n")
    return 0


def _add_common(sub):
    sub.add_argument("--grid", type=_parse_grid, default="12x16384",
                     help="window as WxN, e.g. 12x16384")
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", default="csv", choices=["csv", "json"])
    sub.add_argument("--json", action="store_true", help="shortcut for --format json")


def build_parser() -> _Parser:
    ap = _Parser(prog="renyi-lab", description=__doc__)
    sp = ap.add_subparsers(dest="command", required=True)

    d = sp.add_parser("dist", help="divergences of Z_n from the standard normal")
    d.add_argument("--model", required=True)
    d.add_argument("--alpha", type=_parse_floats, default="2",
                   help="comma-separated orders; 1 means KL, inf allowed")
    d.add_argument("--n", type=int, default=1)
    _add_common(d)
    d.set_defaults(fn=_cmd_dist)

    r = sp.add_parser("rate", help="distance decay over a list of n")
    r.add_argument("--model", required=True)
    r.add_argument("--distance", default="chi2", choices=["kl", "chi2", "renyi", "tinf"])
    r.add_argument("--alpha-value", type=float, default=2.0)
    r.add_argument("--n", type=_parse_ints, default="16,32,64",
                   help="comma-separated, strictly increasing")
    _add_common(r)
    r.set_defaults(fn=_cmd_rate)

    h = sp.add_parser("hermite", help="normal moments c_k = E H_k(X)")
    h.add_argument("--model", required=True)
    h.add_argument("--k", type=int, default=40)
    _add_common(h)
    h.set_defaults(fn=_cmd_hermite)

    e = sp.add_parser("edgeworth", help="correction polynomial coefficients")
    e.add_argument("--model", default=None)
    e.add_argument("--gammas", default=None, help="comma-separated cumulants gamma_1,...")
    e.add_argument("--m", type=int, default=4, help="expansion order (emits q_1..q_{m-2})")
    _add_common(e)
    e.set_defaults(fn=_cmd_edgeworth)

    cs = sp.add_parser("check-subgauss", help="strict subgaussianity checker")
    cs.add_argument("--model", required=True)
    cs.add_argument("--t0", default=None, help="also run the separation check at these t0")
    cs.set_defaults(fn=lambda a: _check_report(a, "subgauss"))

    cd = sp.add_parser("check-clt-dinf", help="CLT-in-D_inf condition checker")
    cd.add_argument("--model", required=True)
    cd.set_defaults(fn=lambda a: _check_report(a, "dinf"))

    z = sp.add_parser("zoo", help="list models or describe one")
    z.add_argument("action", nargs="?", default="list")
    z.add_argument("--model", default=None)
    z.set_defaults(fn=_cmd_zoo)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "model", None) is None and args.command == "edgeworth" \
            and args.gammas is None:
        ap.exit(3, "renyi-lab: error: edgeworth needs --model or --gammas\n")
    try:
        return args.fn(args)
    except (json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"renyi-lab: parse error: {exc}", file=sys.stderr)
        return 3
    except (LabError, ValueError) as exc:
        print(f"renyi-lab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
