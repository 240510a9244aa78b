"""Command-line front end: pair data, symbol artifacts, verification suites."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .pair_catalog import (DualPair, HCParameter, IntegralityError, PairError, as_fraction,
                           covering_splits, make_pair, parse_pair)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARAM = 0, 1, 2, 3
FLOAT_DIGITS = 12
SUITES = ("kernels", "root-weyl", "cayley", "metaplectic", "symbol", "wavefront")
MAX_GRID_POINTS = 1_000_000


class UsageError(Exception):
    pass


class ParameterRejected(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Resolved settings; precedence is defaults < config file < flags.

    pair        pair spec such as "O-Sp:3,2" (or family/d/dprime/signature)
    weight      comma list of rationals ("3/2,1/2")
    highest_weight  read ``weight`` as a highest weight and add rho
    parity      +1 or -1, used by the O_1 base case
    case        auto | special-even | special-odd
    sign        sign of the special O_{2l} component
    grid        points per axis for symbol samples
    extent      half-width of the sampled box
    cutoff      Hermite cutoff for the metaplectic oracle
    samples     sample count for the moment-map fibre
    out         output path, stdout when empty
    format      json | csv
    seed        RNG seed
    threads     worker bound for verification suites
    quick       reduced verification sizes
    """

    pair: Optional[str] = None
    family: Optional[str] = None
    d: Optional[int] = None
    dprime: Optional[int] = None
    signature: Optional[str] = None
    weight: Optional[str] = None
    highest_weight: bool = False
    parity: int = 1
    case: str = "auto"
    sign: int = 1
    grid: int = 16
    extent: float = 4.0
    cutoff: int = 32
    samples: int = 200
    out: Optional[str] = None
    format: str = "json"
    seed: int = 0
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    quick: bool = False

    def validate(self) -> "RunConfig":
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.case not in ("auto", "special-even", "special-odd"):
            raise UsageError(f"unknown case {self.case!r}")
        if self.parity not in (1, -1) or self.sign not in (1, -1):
            raise UsageError("parity and sign must be +1 or -1")
        if self.grid < 1 or self.cutoff < 2 or self.samples < 1 or self.threads < 1:
            raise UsageError("grid, cutoff, samples and threads must be positive")
        if self.extent <= 0:
            raise UsageError("extent must be positive")
        return self

    def resolve_pair(self) -> DualPair:
        if self.pair:
            return parse_pair(self.pair)
        if self.family is None or self.d is None or self.dprime is None:
            raise UsageError("give --pair or --family/--d/--dprime")
        sig = None
        if self.signature is not None:
            try:
                sig = [int(t) for t in str(self.signature).split(",")]
            except ValueError as exc:
                raise PairError(f"malformed signature {self.signature!r}") from exc
            if len(sig) != 2:
                raise PairError(f"malformed signature {self.signature!r}")
        return make_pair(self.family, int(self.d), int(self.dprime), sig)

    def weight_values(self) -> List[Fraction]:
        if not self.weight:
            return []
        try:
            return [as_fraction(Fraction(t.strip())) for t in self.weight.split(",") if t.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"cannot parse weight {self.weight!r}") from exc


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    flat = {}
    for key, val in data.items():
        # allow one level of nesting, e.g. {"grid": {"grid": 8}} or {"symbol": {...}}
        if isinstance(val, dict):
            flat.update(val)
        else:
            flat[key] = val
    flat = {k.replace("-", "_"): v for k, v in flat.items()}
    unknown = set(flat) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return flat


def build_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for key, val in load_config(getattr(ns, "config", None)).items():
        setattr(cfg, key, val)
    for f in fields(RunConfig):
        val = getattr(ns, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    return cfg.validate()


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def normalize(obj):
    """Turn results into plain JSON data with fixed float precision."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        x = round(x, FLOAT_DIGITS)
        return 0.0 if x == 0 else x
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real), normalize(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(normalize(obj), sort_keys=True, indent=2) + "\n"


def flat_rows(obj, prefix: str = "") -> List[tuple]:
    """key/value rows for CSV; values are JSON scalars so the data round-trips."""
    obj = normalize(obj)
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += flat_rows(obj[k], f"{prefix}{k}.")
    else:
        rows.append((prefix.rstrip("."), json.dumps(obj, sort_keys=True)))
    return rows


def rows_to_data(rows: Sequence[Sequence[str]]) -> dict:
    out: dict = {}
    for key, val in rows:
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = json.loads(val)
    return out


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# pair info
# ---------------------------------------------------------------------------

def pair_info_data(pair: DualPair) -> dict:
    data = pair.info()
    data["label"] = pair.label
    data["signature"] = list(pair.signature) if pair.signature else None
    data["rho"] = list(pair.rho)
    data["covering_exponent"] = covering_splits(pair)[1]
    return data


def cmd_pair_info(cfg: RunConfig) -> int:
    data = pair_info_data(cfg.resolve_pair())
    if cfg.format == "csv":
        emit(csv_text(("key", "value"), flat_rows(data)), cfg.out)
    else:
        emit(dumps(data), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def resolve_parameter(pair: DualPair, cfg: RunConfig) -> HCParameter:
    vals = cfg.weight_values()
    if len(vals) != pair.l:
        raise UsageError(f"the pair needs {pair.l} weight entries, got {len(vals)}")
    mu = HCParameter.from_highest_weight(pair, vals) if cfg.highest_weight else HCParameter.from_values(vals)
    if any(not a > b for a, b in zip(mu.mu, mu.mu[1:])):
        raise ParameterRejected("parameter is not strictly decreasing: "
                                + ",".join(str(m) for m in mu.mu))
    return mu.validate(pair)


def build_symbol(pair: DualPair, cfg: RunConfig):
    from . import symbol_assembly as sa

    if cfg.case == "special-even":
        vals = cfg.weight_values()
        if pair.family != "O-Sp" or pair.d % 2:
            raise UsageError("special-even needs an (O_{2l}, Sp) pair")
        if len(vals) != pair.l:
            raise UsageError(f"the pair needs {pair.l} highest-weight entries")
        return sa.assemble_special_O2l(pair, vals, cfg.sign)
    if pair.l == 0:
        return sa.o1_base(pair, cfg.parity)
    mu = resolve_parameter(pair, cfg)
    if cfg.case == "special-odd":
        if pair.family != "O-Sp" or pair.d % 2 == 0:
            raise UsageError("special-odd needs an (O_{2l+1}, Sp) pair")
        return sa.assemble_special_O2lp1(pair, mu)
    return sa.assemble(pair, mu, cfg.parity)


def grid_samples(sym, n: int, extent: float) -> dict:
    nv = sym.nvars
    if n ** nv > MAX_GRID_POINTS:
        raise UsageError(f"grid of {n}^{nv} points is too large")
    axis = np.linspace(-extent, extent, n)
    if nv == 0:
        pts = np.zeros((1, 0))
    else:
        mesh = np.meshgrid(*([axis] * nv), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.array([sym.smooth_value(p) for p in pts], dtype=complex)
    return {"axis": axis, "shape": [n] * nv, "points": pts, "real": vals.real, "imag": vals.imag}


def symbol_data(sym, cfg: RunConfig) -> dict:
    samples = grid_samples(sym, cfg.grid, cfg.extent)
    return {
        "pair": pair_info_data(sym.pair),
        "symbol": sym.summary(),
        "grid": {"axis": samples["axis"], "shape": samples["shape"],
                 "order": "C", "real": samples["real"], "imag": samples["imag"]},
    }, samples


def cmd_symbol(cfg: RunConfig) -> int:
    pair = cfg.resolve_pair()
    sym = build_symbol(pair, cfg)
    data, samples = symbol_data(sym, cfg)
    if cfg.format == "csv":
        nv = sym.nvars
        header = [f"y{j + 1}" for j in range(nv)] + ["re", "im"]
        rows = []
        for p, re, im in zip(samples["points"], samples["real"], samples["imag"]):
            rows.append([normalize(float(v)) for v in p] + [normalize(float(re)), normalize(float(im))])
        emit(csv_text(header, rows), cfg.out)
    else:
        emit(dumps(data), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# wavefront
# ---------------------------------------------------------------------------

def o1_scaling_report(pair: DualPair) -> dict:
    from .symbol_assembly import o1_base
    from .wavefront_asymptotics import ScalingProbe, scaling_limit

    sym = o1_base(pair)
    out = {}
    for a in (0.5, 1.0, 2.0):
        res = scaling_limit(ScalingProbe(sym, lambda r2, a=a: np.exp(-math.pi * a * r2)))
        out[f"gaussian_{a:g}"] = {"slope": res.slope, "limit": res.limit,
                                  "errors": res.errors, "ts": res.ts}
    return out


def cmd_wavefront(cfg: RunConfig) -> int:
    from .wavefront_asymptotics import orbit_fiber_classify

    pair = cfg.resolve_pair()
    data = {"fibre": orbit_fiber_classify(pair, cfg.samples, cfg.seed).as_dict()}
    if pair.family == "O-Sp" and pair.d == 1:
        data["scaling"] = o1_scaling_report(pair)
    if cfg.format == "csv":
        emit(csv_text(("key", "value"), flat_rows(data)), cfg.out)
    else:
        emit(dumps(data), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _check(name: str, value: float, tol: float, passed: Optional[bool] = None) -> dict:
    ok = bool(value <= tol) if passed is None else bool(passed)
    return {"name": name, "value": value, "tolerance": tol, "passed": ok}


def suite_kernels(cfg: RunConfig) -> List[dict]:
    from .kernel_functions import decomposition_identity_holds, fourier_identity_check

    amax = 2 if cfg.quick else 4
    grid = [s * 0.25 * k for k in range(1, 21) for s in (1, -1)]
    if cfg.quick:
        grid = grid[::4]
    worst = max(fourier_identity_check(a, b, grid) for a in range(1, amax + 1) for b in range(1, amax + 1))
    out = [_check("fourier_identity", worst, 1e-6)]
    bad = [(a, b) for a in range(-5, 6) for b in range(-5, 6) if not decomposition_identity_holds(a, b)]
    out.append(_check("decomposition_identity", float(len(bad)), 0.0))
    return out


def suite_root_weyl(cfg: RunConfig) -> List[dict]:
    from .root_weyl import RootSystem, TorusPoint, skew_sum, weyl_character, weyl_dimension, weyl_elements

    rng = np.random.default_rng(cfg.seed)
    cases = [("O", 3, (Fraction(3, 2),)), ("O", 5, (Fraction(5, 2), Fraction(1, 2))),
             ("U", 3, (Fraction(2), Fraction(0), Fraction(-1))), ("Sp", 2, (Fraction(3), Fraction(1)))]
    skew_err, dim_err = 0.0, 0.0
    for group, d, mu in cases:
        rs = RootSystem(group, d)
        for _ in range(3 if cfg.quick else 10):
            u = TorusPoint.from_angles(rng.uniform(-math.pi, math.pi, rs.l)).u
            base = skew_sum(rs, mu, u)
            for w in weyl_elements(rs.rtype, rs.l):
                moved = skew_sum(rs, mu, w.act_torus(u))
                skew_err = max(skew_err, abs(moved - w.sgn * base) / max(1.0, abs(base)))
        # tiny angles cancel catastrophically; extrapolate a quadratic from moderate ones
        base = (1 + np.arange(rs.l)) / rs.l
        c1, c2, c4 = (weyl_character(rs, mu, TorusPoint.from_angles(h * base)) for h in (0.025, 0.05, 0.1))
        char = (8 * c1 - 6 * c2 + c4) / 3
        dim = weyl_dimension(rs, mu)
        dim_err = max(dim_err, abs(char - dim) / dim)
    return [_check("skew_sum_alternates", skew_err, 1e-10),
            _check("character_near_identity_is_dimension", dim_err, 1e-3)]


def suite_cayley(cfg: RunConfig) -> List[dict]:
    from .cayley_geometry import delta_pi_relation_check, jacobian_cminus, jacobian_cminus_matrix, random_lie_element

    rng = np.random.default_rng(cfg.seed)
    n = 10 if cfg.quick else 100
    jac = 0.0
    for group, d in (("O", 3), ("U", 2), ("Sp", 1)):
        for _ in range(n):
            x = random_lie_element(group, d, rng)
            a, b = jacobian_cminus(x, group, d), jacobian_cminus_matrix(x, group, d)
            jac = max(jac, abs(a - b) / abs(b))
    spread = 0.0
    m = 10 if cfg.quick else 50
    for group, d in (("O", 3), ("O", 4), ("U", 2), ("Sp", 2)):
        rank = d // 2 if group == "O" else d
        pts = rng.uniform(-2, 2, size=(m, rank))
        spread = max(spread, delta_pi_relation_check(group, d, pts)[1])
    return [_check("jacobian_closed_form", jac, 1e-10), _check("pi_delta_ratio_spread", spread, 1e-8)]


def suite_metaplectic(cfg: RunConfig) -> List[dict]:
    from .metaplectic_oracle import (HermiteModel, central_character_check, fit_u1u1, lift_rotation,
                                     multiply_lifts_projectively, o1_operator_identity, u1u1_oracle_profiles)

    rng = np.random.default_rng(cfg.seed)
    out = []
    model = HermiteModel(cfg.cutoff, 256 if not cfg.quick else 128, 6.0 if not cfg.quick else 5.0)
    out.append(_check("o1_operator_identity", o1_operator_identity(1, model)["operator_error"], 1e-6))
    worst = 0.0
    for _ in range(10 if cfg.quick else 50):
        t1, t2 = rng.uniform(0, 4 * math.pi, 2)
        worst = max(worst, multiply_lifts_projectively(lift_rotation(t1), lift_rotation(t2), cfg.cutoff))
    out.append(_check("projective_product", worst, 1e-6))
    out.append(_check("central_characters", central_character_check(cfg.cutoff), 1e-10))
    y, prof = u1u1_oracle_profiles(kmax=2 if cfg.quick else 5, cutoff=cfg.cutoff)[:2]
    fit = fit_u1u1(y, prof)
    near = min(abs(fit.scale / math.pi - 1), abs(fit.scale / (2 * math.pi) - 1))
    out.append(_check("u1u1_residual", max(fit.residuals.values()), 1e-3))
    out.append(_check("u1u1_scale", near, 0.01, passed=near <= 0.01 and fit.shared_ok))
    return out


def suite_symbol(cfg: RunConfig) -> List[dict]:
    from .symbol_assembly import assemble, o1_base, o1_gaussian_pairing

    out = []
    for spec, mu in (("O-Sp:5,2", (Fraction(5, 2), Fraction(1, 2))), ("U-U:2,1,1,0", (Fraction(1), Fraction(0)))):
        pair = parse_pair(spec)
        sym = assemble(pair, HCParameter.from_values(mu).validate(pair))
        ok = sym.quotient is not None and sym.quotient.divisible and sym.quotient.remainder.is_zero()
        out.append(_check(f"divisible {pair.label}", 0.0 if ok else 1.0, 0.0))
    err = 0.0
    for dp in (2, 4):
        pair = make_pair("O-Sp", 1, dp)
        for parity in (1, -1):
            got = o1_gaussian_pairing(o1_base(pair, parity))
            err = max(err, abs(got - (1 + parity * 2.0 ** (-pair.dimW / 2))))
    out.append(_check("o1_gaussian_pairing", err, 1e-14))
    return out


def suite_wavefront(cfg: RunConfig) -> List[dict]:
    from .kernel_functions import P_ab
    from .wavefront_asymptotics import fourier_lemma_bound_check, mtau_law_check

    rep = o1_scaling_report(make_pair("O-Sp", 1, 2))
    slope_err = max(abs(v["slope"] - 2.0) for v in rep.values())
    out = [_check("o1_scaling_slope", slope_err, 0.05)]
    law = mtau_law_check(make_pair("O-Sp", 3, 2), 0.5, samples=100 if cfg.quick else 400, seed=cfg.seed)
    out.append(_check("moment_scaling_law", law["relative_error"], 1e-10))
    bound_ok = all(fourier_lemma_bound_check(P_ab(a, b)).bound_ok for a, b in ((1, 1), (2, 1), (2, 2)))
    out.append(_check("fourier_decay_bound", 0.0 if bound_ok else 1.0, 0.0))
    return out


SUITE_FUNCS: Dict[str, Callable[[RunConfig], List[dict]]] = {
    "kernels": suite_kernels, "root-weyl": suite_root_weyl, "cayley": suite_cayley,
    "metaplectic": suite_metaplectic, "symbol": suite_symbol, "wavefront": suite_wavefront,
}


def run_suite(name: str, cfg: RunConfig) -> dict:
    start = time.perf_counter()
    try:
        checks = SUITE_FUNCS[name](cfg)
        error = None
    except Exception as exc:  # a crashing suite is a failed suite
        checks, error = [], f"{type(exc).__name__}: {exc}"
    rep = {"suite": name, "checks": checks, "passed": error is None and all(c["passed"] for c in checks),
           "seconds": time.perf_counter() - start}
    if error:
        rep["error"] = error
    return rep


def run_verification(names: Sequence[str], cfg: RunConfig) -> dict:
    with ThreadPoolExecutor(max_workers=min(cfg.threads, len(names))) as pool:
        reports = list(pool.map(lambda n: run_suite(n, cfg), names))
    return {"suites": reports, "passed": all(r["passed"] for r in reports), "quick": cfg.quick}


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    names = list(SUITES) if suite == "all" else [suite]
    report = run_verification(names, cfg)
    emit(dumps(report), cfg.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON file of settings")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)


def _pair_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pair", default=None, help="e.g. O-Sp:3,2 or U-U:1,1,1,0")
    p.add_argument("--family", default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--dprime", type=int, default=None)
    p.add_argument("--signature", default=None, help="p,q for U-U")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualpair-symbols", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    pair = sub.add_parser("pair").add_subparsers(dest="action", parser_class=_Parser)
    info = pair.add_parser("info")
    _pair_flags(info)
    _global_flags(info)
    info.add_argument("--json", dest="format", action="store_const", const="json")
    info.add_argument("--csv", dest="format", action="store_const", const="csv")

    sym = sub.add_parser("symbol").add_subparsers(dest="action", parser_class=_Parser)
    comp = sym.add_parser("compute")
    _pair_flags(comp)
    _global_flags(comp)
    comp.add_argument("--weight", default=None, help="comma list of rationals")
    comp.add_argument("--highest-weight", dest="highest_weight", action="store_const", const=True, default=None)
    comp.add_argument("--parity", type=int, default=None)
    comp.add_argument("--case", default=None, choices=("auto", "special-even", "special-odd"))
    comp.add_argument("--sign", type=int, default=None)
    comp.add_argument("--grid", type=int, default=None)
    comp.add_argument("--extent", type=float, default=None)

    ver = sub.add_parser("verify")
    ver.add_argument("suite")
    ver.add_argument("--quick", action="store_const", const=True, default=None)
    _global_flags(ver)

    wf = sub.add_parser("wavefront")
    _pair_flags(wf)
    _global_flags(wf)
    wf.add_argument("--samples", type=int, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = build_config(ns)
        if ns.command == "pair" and ns.action == "info":
            return cmd_pair_info(cfg)
        if ns.command == "symbol" and ns.action == "compute":
            return cmd_symbol(cfg)
        if ns.command == "verify":
            if ns.suite not in SUITES + ("all",):
                raise UsageError(f"unknown suite {ns.suite!r}")
            return cmd_verify(cfg, ns.suite)
        if ns.command == "wavefront":
            return cmd_wavefront(cfg)
        raise UsageError("missing command; see --help")
    except IntegralityError as exc:
        print(f"parameter rejected: j={exc.index}, mu_j+delta={exc.value}", file=sys.stderr)
        return EXIT_PARAM
    except ParameterRejected as exc:
        print(f"parameter rejected: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (UsageError, PairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
