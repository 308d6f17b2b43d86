"""Config-driven command-line front end.

Subcommands: spectrum (semiclassical vs oracle table), sweep (bias scans),
pcf (spot-check the special functions), verify (run the invariant suite),
export-potential (tabulate V to CSV).  A single JSON config file is the
source of truth; flags override it.  Outputs are deterministic: identical
config gives byte-identical CSV/JSON (timings are opt-in and excluded).

Exit codes: 0 success, 1 verification failure, 2 config or construction
error, 3 numeric range error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import oracle, quantize, twolevel
from .errors import (AsymwellError, ConfigError, ConstructionError,
                     DomainError, RangeError)
from .potential import (DEFAULT_PARABOLIC_TOL, DoubleWellPotential, UnitsConfig,
                        WellParams, build_biased_quartic, build_from_csv,
                        build_piecewise_parabolic)
from .specfun import pcf_d, pcf_d_asymptotic, pcf_d_ode

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RANGE = 3

ENV_CONFIG = "ASYMWELL_CONFIG"

DEFAULTS = {
    "units": {"hbar": 1.0, "mass": 1.0},
    "levels": [[0, 0]],
    "grid": {"n_points": 8001},
    "numerov": False,
    "c_override": None,
    "parabolic_tol": DEFAULT_PARABOLIC_TOL,
    "output": {"format": "json", "path": "-"},
    "jobs": 1,
}


def _schema() -> dict:
    text = resources.files("asymwell").joinpath("schemas/config.schema.json").read_text()
    return json.loads(text)


def load_config(path: str | None, overrides: dict | None = None) -> dict:
    """Read, schema-validate, and default-fill a run configuration."""
    import jsonschema

    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        raise ConfigError(f"no config file given (flag --config or ${ENV_CONFIG})")
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if overrides:
        raw = _merge(raw, overrides)
    _validate_config(raw)
    cfg = _merge(dict(DEFAULTS), raw)
    return cfg


def _validate_config(raw: dict) -> None:
    """Schema validation in two stages so that a missing family parameter
    is reported by name rather than as a failed oneOf."""
    import jsonschema

    schema = _schema()
    try:
        jsonschema.validate(raw, schema)
        family = raw["potential"]["family"]
        jsonschema.validate(raw["potential"]["params"],
                            schema["$defs"][f"params_{family}"])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def build_potential(cfg: dict) -> DoubleWellPotential:
    units = UnitsConfig(**cfg["units"])
    fam = cfg["potential"]["family"]
    params = cfg["potential"]["params"]
    tol = cfg["parabolic_tol"]
    if fam == "biased_quartic":
        pot = build_biased_quartic(params["half_separation"], params["barrier_scale"],
                                   params.get("bias", 0.0), units, parabolic_tol=tol)
    elif fam == "piecewise_parabolic":
        left = WellParams.from_omega(params["a_l"], params["omega_l"],
                                     params.get("v_l", 0.0), params["d_l"], units)
        right = WellParams.from_omega(params["a_r"], params["omega_r"],
                                      params.get("v_r", 0.0), params["d_r"], units)
        pot = build_piecewise_parabolic(left, right, (params["d_l"], params["d_r"]),
                                        params["barrier_height"], units)
    elif fam == "csv_table":
        pot = build_from_csv(params["path"], units, parabolic_tol=tol)
    else:  # unreachable past schema validation
        raise ConfigError(f"unknown potential family {fam}")
    if cfg.get("c_override") is not None:
        pot = pot.with_c(cfg["c_override"])
    return pot


def _grid_for(cfg: dict, pot: DoubleWellPotential, count: int) -> oracle.GridSpec:
    g = cfg["grid"]
    if "x_lo" in g and "x_hi" in g:
        return oracle.GridSpec(g["x_lo"], g["x_hi"], g.get("n_points", 8001))
    return oracle.default_grid(pot, n_points=g.get("n_points", 8001), count=count)


def _fmt(x, digits=17):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return str(x)
    return f"{x:.{digits}g}"


def _jsonify(obj):
    """Native Python types only; float repr carries 17 significant digits."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _emit(cfg: dict, rows: list[dict], columns: list[str], stream) -> None:
    """Write the report in the configured format; the full config is echoed
    as the header block for reproducibility."""
    fmt = cfg["output"]["format"]
    if fmt == "json":
        doc = {"config": cfg, "rows": [
            {k: _jsonify(row.get(k)) for k in columns} for row in rows]}
        stream.write(json.dumps(doc, indent=2))
        stream.write("\n")
    else:
        for line in json.dumps(cfg, sort_keys=True).splitlines():
            stream.write(f"# {line}\n")
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(_fmt(row.get(k), digits=12)
                                  for k in columns) + "\n")


def _open_output(cfg: dict):
    path = cfg["output"]["path"]
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _level_row(pot: DoubleWellPotential, n_l: int, n_r: int,
               spectrum: oracle.SpectrumResult, want_timings: bool) -> dict:
    units = pot.units
    t0 = time.perf_counter()
    row: dict = {"n_l": n_l, "n_r": n_r}
    eps_l = quantize.epsilon_level(pot.left, n_l, units)
    eps_r = quantize.epsilon_level(pot.right, n_r, units)
    row.update(eps_l=eps_l, eps_r=eps_r, delta_eps=eps_l - eps_r)
    quad = quantize.solve_pair_quadratic(pot, n_l, n_r)
    row.update(delta=quad.delta_split, delta_e=quad.delta_e,
               e_plus_quadratic=quad.e_plus, e_minus_quadratic=quad.e_minus)
    try:
        exact = quantize.solve_pair_exact(pot, n_l, n_r)
        row.update(e_plus_exact=exact.e_plus, e_minus_exact=exact.e_minus,
                   delta_e_exact=exact.delta_e, pair_error="")
    except AsymwellError as exc:
        # a localized non-degenerate state (or detuned pair) is reported
        # in-row; the remaining columns still carry the oracle side
        row.update(e_plus_exact=None, e_minus_exact=None, delta_e_exact=None,
                   pair_error=type(exc).__name__)
    model = twolevel.build_two_level(pot, n_l, n_r)
    row["theta"] = model.theta
    # oracle states nearest the pair
    cls = oracle.resolve_pair_or_single(spectrum, pot, n_l, n_r)
    i, j = cls.state_indices
    row.update(e_oracle_lower=float(spectrum.eigenvalues[i]),
               e_oracle_upper=float(spectrum.eigenvalues[j]),
               gap_oracle=cls.gap, classification=cls.kind,
               oracle_left_prob_lower=cls.left_probs[0],
               oracle_left_prob_upper=cls.left_probs[1])
    if row["e_plus_exact"] is not None:
        row["err_plus"] = abs(row["e_plus_exact"] - row["e_oracle_upper"])
        row["err_minus"] = abs(row["e_minus_exact"] - row["e_oracle_lower"])
        hw = units.hbar * min(pot.left.omega, pot.right.omega)
        row["rel_err_plus"] = row["err_plus"] / hw
        row["rel_err_minus"] = row["err_minus"] / hw
    else:
        row.update(err_plus=None, err_minus=None,
                   rel_err_plus=None, rel_err_minus=None)
    if want_timings:
        row["seconds"] = time.perf_counter() - t0
    return row


SPECTRUM_COLUMNS = [
    "n_l", "n_r", "eps_l", "eps_r", "delta_eps", "delta", "delta_e",
    "e_minus_quadratic", "e_plus_quadratic", "e_minus_exact", "e_plus_exact",
    "delta_e_exact", "pair_error", "theta", "e_oracle_lower", "e_oracle_upper",
    "gap_oracle", "classification", "oracle_left_prob_lower",
    "oracle_left_prob_upper", "err_minus", "err_plus", "rel_err_minus",
    "rel_err_plus", "seconds",
]


def cmd_spectrum(cfg: dict, want_timings: bool = False) -> int:
    pot = build_potential(cfg)
    count = 2 * max(max(nl, nr) for nl, nr in cfg["levels"]) + 2
    grid = _grid_for(cfg, pot, count)
    spectrum = oracle.solve_spectrum(pot, grid, count, numerov=cfg["numerov"])
    rows = [_level_row(pot, nl, nr, spectrum, want_timings)
            for nl, nr in cfg["levels"]]
    stream, close = _open_output(cfg)
    try:
        _emit(cfg, rows, SPECTRUM_COLUMNS, stream)
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _set_by_path(cfg: dict, dotted: str, value):
    node = cfg
    keys = dotted.split(".")
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"sweep parameter path {dotted!r} not found")
        node = node[key]
    if not isinstance(node, dict):
        raise ConfigError(f"sweep parameter path {dotted!r} not found")
    # the leaf may be created (optional params like bias); the point config
    # is re-validated afterwards, so typos still fail the schema
    node[keys[-1]] = value


SWEEP_COLUMNS = [
    "index", "value", "delta_eps", "delta", "delta_e", "theta",
    "gap_oracle", "oracle_left_prob_lower", "oracle_left_prob_upper",
    "classification", "error", "seconds",
]


def _sweep_point(args):
    cfg, index, value, want_timings = args
    t0 = time.perf_counter()
    row = {"index": index, "value": value, "error": ""}
    try:
        point_cfg = json.loads(json.dumps(cfg))
        _set_by_path(point_cfg, cfg["sweep"]["parameter"], value)
        _validate_config(point_cfg)
        pot = build_potential(point_cfg)
        n_l, n_r = cfg["levels"][0]
        quad = quantize.solve_pair_quadratic(pot, n_l, n_r)
        model = twolevel.build_two_level(pot, n_l, n_r)
        count = 2 * max(n_l, n_r) + 2
        grid = _grid_for(point_cfg, pot, count)
        spectrum = oracle.solve_spectrum(pot, grid, count, numerov=cfg["numerov"])
        cls = oracle.resolve_pair_or_single(spectrum, pot, n_l, n_r)
        row.update(delta_eps=quad.decomposition_plus.delta_eps,
                   delta=quad.delta_split, delta_e=quad.delta_e,
                   theta=model.theta, gap_oracle=cls.gap,
                   oracle_left_prob_lower=cls.left_probs[0],
                   oracle_left_prob_upper=cls.left_probs[1],
                   classification=cls.kind)
    except AsymwellError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    if want_timings:
        row["seconds"] = time.perf_counter() - t0
    return row


def cmd_sweep(cfg: dict, want_timings: bool = False) -> int:
    if "sweep" not in cfg:
        raise ConfigError("sweep block missing from config")
    sw = cfg["sweep"]
    values = np.linspace(sw["from"], sw["to"], sw["steps"])
    tasks = [(cfg, i, float(v), want_timings) for i, v in enumerate(values)]
    if cfg["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda r: r["index"])
    stream, close = _open_output(cfg)
    try:
        _emit(cfg, rows, SWEEP_COLUMNS, stream)
    finally:
        if close:
            stream.close()
    return EXIT_OK


def cmd_pcf(nu: float, z: float) -> int:
    ev = pcf_d(nu, z)
    print(f"D_{nu:g}({z:g}) = {ev.value:.12g}")
    print(f"abs error estimate: {ev.abs_error_estimate:.3g}   regime: {ev.regime}")
    try:
        asym = pcf_d_asymptotic(nu, z)
        print(f"asymptotic branch:  {asym.value:.12g} "
              f"(agreement {abs(asym.value - ev.value):.3g})")
    except RangeError:
        pass
    try:
        ode = pcf_d_ode(nu, z)
        print(f"ode oracle:         {ode.value:.12g} "
              f"(agreement {abs(ode.value - ev.value):.3g})")
    except RangeError as exc:
        print(f"ode oracle:         unavailable ({exc})")
    return EXIT_OK


def _verify_checks(cfg: dict):
    """Yield (name, passed, observed, threshold) for the invariant suite."""
    pot = build_potential(cfg)
    n_l, n_r = cfg["levels"][0]
    units = pot.units
    hw = units.hbar * min(pot.left.omega, pot.right.omega)

    delta = quantize.splitting_degenerate(pot, n_l, n_r)
    td = twolevel.tilde_delta(pot, n_l, n_r)
    dev = abs(td / delta - 1.0)
    yield "tilde_delta_equals_delta", dev <= 1e-12, dev, 1e-12

    base = quantize.solve_pair_exact(pot, n_l, n_r)
    worst = 0.0
    from .potential import turning_points
    pair = turning_points(pot, base.e_minus)
    span = pair.a_nu_r - pair.a_nu_l
    for frac in (-0.2, -0.1, 0.1, 0.2):
        shifted = quantize.solve_pair_exact(pot, n_l, n_r,
                                            c=pot.c + frac * span)
        worst = max(worst,
                    abs(shifted.e_plus / base.e_plus - 1.0),
                    abs(shifted.e_minus / base.e_minus - 1.0))
    yield "c_invariance_exact_roots", worst <= 1e-9, worst, 1e-9

    srule = abs(base.e_plus + base.e_minus
                - (base.decomposition_plus.eps_l + base.decomposition_plus.eps_r))
    yield "sum_rule_exact_roots", srule <= 1e-6 * hw, srule, 1e-6 * hw

    psi_l, dpsi_l, psi_r, dpsi_r = twolevel.wkb_tail_functions(pot, n_l, n_r)
    flux = twolevel.flux_splitting(psi_l, psi_r, pot.c, units, n_r=n_r,
                                   dpsi_left=dpsi_l, dpsi_right=dpsi_r)
    fdev = abs(flux / td - 1.0)
    yield "flux_identity", fdev <= 1e-10, fdev, 1e-10

    count = 2 * max(n_l, n_r) + 2
    grid = _grid_for(cfg, pot, count)
    spectrum = oracle.solve_spectrum(pot, grid, count, numerov=cfg["numerov"])

    est = oracle.eigenvalue_error_estimate(pot, grid, count,
                                           numerov=cfg["numerov"])
    resolution = float(np.max(est))
    yield "oracle_resolution", resolution <= 1e-6 * hw, resolution, 1e-6 * hw

    gap = oracle.pair_splitting(spectrum, max(n_l, n_r))
    rel = abs(delta - gap) / gap if gap > 0 else math.inf
    threshold = 0.05 if cfg["potential"]["family"] == "piecewise_parabolic" else 0.15
    yield "splitting_vs_oracle", rel <= threshold, rel, threshold

    mid_semi = 0.5 * (base.e_plus + base.e_minus)
    i, j = oracle.resolve_pair_or_single(spectrum, pot, n_l, n_r).state_indices
    mid_oracle = 0.5 * float(spectrum.eigenvalues[i] + spectrum.eigenvalues[j])
    place = abs(mid_semi - mid_oracle)
    yield "pair_placement_vs_oracle", place <= 0.05 * hw, place, 0.05 * hw


def cmd_verify(cfg: dict) -> int:
    failures = 0
    for name, passed, observed, threshold in _verify_checks(cfg):
        tag = "PASS" if passed else "FAIL"
        print(f"{tag} {name}: observed {observed:.6g} vs threshold {threshold:.6g}")
        failures += 0 if passed else 1
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def cmd_export_potential(cfg: dict, samples: int) -> int:
    pot = build_potential(cfg)
    grid = _grid_for(cfg, pot, count=4)
    xs = np.linspace(grid.x_lo, grid.x_hi, samples)
    vs = pot.V(xs)
    stream, close = _open_output(cfg)
    try:
        for line in json.dumps(cfg, sort_keys=True).splitlines():
            stream.write(f"# {line}\n")
        stream.write("x,V\n")
        for x, v in zip(xs, vs):
            stream.write(f"{x:.17g},{v:.17g}\n")
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _error_exit(exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    if isinstance(exc, (ConfigError, ConstructionError)):
        return EXIT_CONFIG
    if isinstance(exc, (RangeError, DomainError)):
        return EXIT_RANGE
    return EXIT_CONFIG if isinstance(exc, AsymwellError) else EXIT_RANGE


def _add_config_flags(sub):
    sub.add_argument("--config", help=f"config file (default ${ENV_CONFIG})")
    sub.add_argument("--n-points", type=int, help="override grid.n_points")
    sub.add_argument("--c-override", type=float, help="override reference point c")
    sub.add_argument("--numerov", action="store_true", default=None,
                     help="4th-order Numerov oracle discretization")
    sub.add_argument("--output", help="override output.path")
    sub.add_argument("--format", choices=["csv", "json"], help="override output.format")
    sub.add_argument("--jobs", type=int, help="parallel sweep workers")
    sub.add_argument("--timings", action="store_true",
                     help="include wall-clock timings in rows (non-deterministic)")


def _overrides_from(args) -> dict:
    out: dict = {}
    if args.n_points is not None:
        out["grid"] = {"n_points": args.n_points}
    if args.c_override is not None:
        out["c_override"] = args.c_override
    if args.numerov:
        out["numerov"] = True
    if args.output is not None:
        out.setdefault("output", {})["path"] = args.output
    if args.format is not None:
        out.setdefault("output", {})["format"] = args.format
    if args.jobs is not None:
        out["jobs"] = args.jobs
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="asymwell",
        description="Semiclassical spectra of asymmetric double-well potentials, "
                    "verified against an exact grid eigensolver.")
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("spectrum", "sweep", "verify", "export-potential"):
        sub = subs.add_parser(name)
        _add_config_flags(sub)
        if name == "export-potential":
            sub.add_argument("--samples", type=int, default=2001)

    pcf = subs.add_parser("pcf", help="evaluate D_nu(z)")
    pcf.add_argument("nu", type=float)
    pcf.add_argument("z", type=float)

    args = parser.parse_args(argv)
    try:
        if args.command == "pcf":
            return cmd_pcf(args.nu, args.z)
        cfg = load_config(args.config, _overrides_from(args))
        if args.command == "spectrum":
            return cmd_spectrum(cfg, want_timings=args.timings)
        if args.command == "sweep":
            return cmd_sweep(cfg, want_timings=args.timings)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "export-potential":
            return cmd_export_potential(cfg, args.samples)
        raise ConfigError(f"unknown command {args.command}")
    except AsymwellError as exc:
        return _error_exit(exc)


if __name__ == "__main__":
    sys.exit(main())
