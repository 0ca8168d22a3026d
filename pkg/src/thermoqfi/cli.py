"""Command-line front end: ``thermoqfi sweep | scaling | validate``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import metrology as met
from . import steady as st
from .dynamics import build_channels, liouvillian, steady_state
from .errors import NumericalFailure, ThermoQfiError
from .model import DmModelParams, ThermometerParams, build_dm_hamiltonian, dressed_frame, model_hamiltonian, to_local, dressing_unitary
from .presets import PRESETS, get_preset
from .qcore import gibbs_state, partial_trace, trace_distance
from .validation import FAULTS, run_validation

log = logging.getLogger("thermoqfi")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
MODELS = ("asymmetric-local", "global-gibbs", "dipole-dipole", "dm")
OUTPUTS = frozenset({"qfi", "coherence", "rel_error", "peaks"})
CSV_HEADER = "T,qfi,coherence,rel_error"
DENSE_LIMIT = 11  # qubits


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    model: str
    params: dict
    t_min: float = 1e-3
    t_max: float = 10.0
    n_points: int = 400
    grid: str = "log"
    outputs: tuple = ("qfi", "coherence", "rel_error", "peaks")
    validate_numeric: bool = False
    probe_gap: str = "literal"
    label: str = "sweep"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        try:
            self.t_min, self.t_max = float(self.t_min), float(self.t_max)
        except (TypeError, ValueError):
            raise ConfigError("t_min and t_max must be numbers") from None
        if not (0 < self.t_min < self.t_max):
            raise ConfigError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        if isinstance(self.n_points, bool) or not isinstance(self.n_points, int) or self.n_points < 3:
            raise ConfigError(f"n_points must be an integer >= 3, got {self.n_points!r}")
        if self.grid not in ("log", "linear"):
            raise ConfigError(f"grid must be 'log' or 'linear', got {self.grid!r}")
        bad = set(self.outputs) - OUTPUTS
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}")
        self.outputs = tuple(sorted(set(self.outputs)))
        if self.probe_gap not in ("literal", "mean"):
            raise ConfigError("probe_gap must be 'literal' or 'mean'")
        self.build_params()  # validates the parameter block

    def build_params(self):
        p = dict(self.params)
        try:
            if self.model in ("asymmetric-local", "global-gibbs"):
                params = ThermometerParams(
                    float(p.pop("omega_p")),
                    tuple(float(x) for x in p.pop("omega_k")),
                    tuple(float(x) for x in p.pop("g_k")),
                )
                if self.model == "asymmetric-local" and params.n_ancilla not in (1, 2):
                    raise ConfigError("asymmetric-local needs 1 or 2 ancillas")
            else:
                params = DmModelParams(float(p.pop("omega_1")), float(p.pop("omega_p")), float(p.pop("g")))
        except KeyError as exc:
            raise ConfigError(f"missing parameter {exc.args[0]!r} for model {self.model}") from None
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid parameters: {exc}") from None
        if p:
            raise ConfigError(f"unexpected parameters {sorted(p)}")
        return params

    def family(self):
        params = self.build_params()
        if self.model == "asymmetric-local":
            return st.LocalProbeFamily(params, self.probe_gap)
        if self.model == "global-gibbs":
            return st.GlobalGibbsFamily(params)
        if self.model == "dm":
            return st.DmFamily(params)
        return st.ConstantFamily(st.dd_probe_state(params.omega_p, params.omega_1, params.g, 1.0))

    def temps(self):
        return met.temperature_grid(self.t_min, self.t_max, self.n_points, self.grid)

    def to_dict(self) -> dict:
        d = {
            "label": self.label, "model": self.model, "params": self.params,
            "t_min": self.t_min, "t_max": self.t_max, "n_points": self.n_points, "grid": self.grid,
            "outputs": list(self.outputs), "validate_numeric": self.validate_numeric,
            "probe_gap": self.probe_gap,
        }
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"model", "params", "t_min", "t_max", "n_points", "grid", "outputs", "validate_numeric", "probe_gap", "label"}
        echo = {"preset", "figure"}
        unknown = set(d) - known - echo
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "model" not in d or "params" not in d:
            raise ConfigError("config needs 'model' and 'params'")
        return cls(**{k: v for k, v in d.items() if k in known}, extra={k: d[k] for k in echo & set(d)})


# -- numerical cross-checks ------------------------------------------------------

def _numeric_check(cfg: SweepConfig, temps) -> dict:
    """Compare the analytic probe state with an independent numerical route at a few temperatures."""
    params = cfg.build_params()
    sample = temps[np.linspace(0, len(temps) - 1, min(5, len(temps))).astype(int)]
    devs = []
    if cfg.model == "asymmetric-local":
        fr = dressed_frame(params, cfg.probe_gap)
        h, u = model_hamiltonian(params, fr), dressing_unitary(params)
        fam = cfg.family()
        for T in sample:
            rho = to_local(steady_state(liouvillian(h, build_channels(params, fr, T))), u)
            red = partial_trace(rho, [2] * params.n_qubits, {params.n_ancilla})
            devs.append(trace_distance(red, fam.state(T).matrix))
        method, tol = "liouvillian null space", 1e-7
    elif cfg.model == "global-gibbs":
        if params.n_qubits > DENSE_LIMIT:
            return {"method": "dense gibbs", "skipped": f"more than {DENSE_LIMIT} qubits"}
        for T in sample:
            devs.append(trace_distance(st.global_gibbs_probe(params, T).matrix, st.global_gibbs_probe_dense(params, T)))
        method, tol = "dense gibbs", 1e-10
    elif cfg.model == "dm":
        h = build_dm_hamiltonian(params.omega_p, params.omega_1, params.g)
        for T in sample:
            devs.append(trace_distance(st.dm_probe_state(params, T).matrix, partial_trace(gibbs_state(h, T), [2, 2], {1})))
        method, tol = "dense gibbs", 1e-10
    else:
        for T in sample:
            devs.append(trace_distance(st.dd_probe_state(params.omega_p, params.omega_1, params.g, T).matrix, 0.5 * np.eye(2)))
        method, tol = "maximally mixed", 0.0
    worst = float(max(devs))
    return {"method": method, "temperatures": [float(t) for t in sample], "max_trace_distance": worst,
            "tolerance": tol, "passed": worst <= tol}


def run_curve(cfg_dict: dict) -> dict:
    """Worker entry point; takes and returns plain data so it can cross process boundaries."""
    cfg = SweepConfig.from_dict(cfg_dict)
    temps = cfg.temps()
    curve = met.qfi_curve(cfg.family(), temps, refine="peaks" in cfg.outputs)
    out = {
        "config": cfg.to_dict(),
        "temps": curve.temps.tolist(), "qfi": curve.qfi.tolist(),
        "coherence": curve.coherence.tolist(), "rel_error": curve.rel_error.tolist(),
        "peaks": [{"T": t, "F": f} for t, f in curve.peaks] if "peaks" in cfg.outputs else [],
        "validation": _numeric_check(cfg, temps) if cfg.validate_numeric else {},
    }
    return out


# -- output ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: str, columns) -> None:
    rows = zip(*columns)
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _check_finite(result: dict) -> None:
    for key in ("qfi", "coherence", "rel_error"):
        arr = np.asarray(result[key], float)
        if not np.all(np.isfinite(arr)):
            i = int(np.flatnonzero(~np.isfinite(arr))[0])
            T = result["temps"][i]
            hint = " (the QFI vanishes, so the error bound is unbounded)" if key == "rel_error" else ""
            raise NumericalFailure(f"non-finite {key} at T={T:.6g}{hint}")


def _write_sidecar(path: Path, config, peaks, fits, validation, wall) -> None:
    doc = {"config": config, "peaks": peaks, "fits": fits, "validation": validation,
           "version": __version__, "wall_time_s": wall}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _slug(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", s).strip("_") or "curve"


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("THERMOQFI_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"THERMOQFI_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


# -- commands ------------------------------------------------------------------

def _sweep_configs(args) -> tuple[str, list[SweepConfig], dict]:
    grid_over = {k: v for k, v in (("t_min", args.t_min), ("t_max", args.t_max), ("n_points", args.n_points), ("grid", args.grid)) if v is not None}
    if args.preset and args.config:
        raise ConfigError("use either --preset or --config, not both")
    if args.preset:
        try:
            pre = get_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        meta = {k: v for k, v in pre.items() if k not in ("curves", "scaling")}
        base = {k: pre[k] for k in ("t_min", "t_max", "n_points", "grid")}
        base.update(grid_over)
        cfgs = []
        for c in pre["curves"]:
            params = dict(c["params"])
            if args.omega_p is not None:
                params["omega_p"] = args.omega_p
            cfgs.append(SweepConfig(model=c["model"], params=params, label=c["label"],
                                    validate_numeric=args.validate_numeric, probe_gap=args.probe_gap or "literal",
                                    extra={"preset": args.preset, "figure": pre["figure"]}, **base))
        return args.preset, cfgs, meta
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    else:
        d = {}
    if args.model:
        d["model"] = args.model
    params = dict(d.get("params", {}))
    for key, val in (("omega_p", args.omega_p), ("omega_1", args.omega_1), ("g", args.g)):
        if val is not None:
            params[key] = val
    for key, val in (("omega_k", args.omega_k), ("g_k", args.g_k)):
        if val is not None:
            params[key] = val
    d["params"] = params
    d.update(grid_over)
    if args.validate_numeric:
        d["validate_numeric"] = True
    if args.probe_gap:
        d["probe_gap"] = args.probe_gap
    if args.outputs:
        d["outputs"] = args.outputs
    d.setdefault("label", Path(args.config).stem if args.config else "sweep")
    return d["label"], [SweepConfig.from_dict(d)], {}


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    stem, cfgs, meta = _sweep_configs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = _map(run_curve, [c.to_dict() for c in cfgs], _threads(args.threads))
    for r in results:
        _check_finite(r)
    extra_files = []
    if meta.get("approximation") == "weak-coupling-n1":
        p = cfgs[0].build_params()
        temps = np.asarray(results[0]["temps"])
        approx = np.array([met.qfi_approx_n1(p, T) for T in temps])
        extra_files.append((out / f"{_slug(stem)}_approx.csv", [temps, approx, np.zeros_like(approx), 1 / (temps * np.sqrt(approx))]))
    wall = time.perf_counter() - t0
    failed = False
    for i, (cfg, r) in enumerate(zip(cfgs, results)):
        name = _slug(stem) if len(cfgs) == 1 else f"{_slug(stem)}_{i:02d}_{_slug(cfg.label)}"
        write_csv(out / f"{name}.csv", CSV_HEADER, [r["temps"], r["qfi"], r["coherence"], r["rel_error"]])
        config = dict(r["config"])
        if meta:
            config["preset_meta"] = meta
        _write_sidecar(out / f"{name}.json", config, r["peaks"], {}, r["validation"], wall)
        print(f"{name}: {len(r['peaks'])} peak(s) " + ", ".join(f"T*={p['T']:.5g} F*={p['F']:.5g}" for p in r["peaks"]))
        if r["validation"] and not r["validation"].get("passed", True):
            print(f"{name}: numerical cross-check FAILED: {r['validation']}", file=sys.stderr)
            failed = True
    for path, cols in extra_files:
        write_csv(path, CSV_HEADER, cols)
    return EXIT_VALIDATION if failed else EXIT_OK


def _scaling_point(args_tuple):
    omega_p, omega, g, n, t_min, t_max, n_points = args_tuple
    fam = st.GlobalGibbsFamily(ThermometerParams.identical(omega_p, omega, g, n))
    curve = met.qfi_curve(fam, met.temperature_grid(t_min, t_max, n_points))
    if not curve.peaks:
        raise NumericalFailure(f"no QFI peak found for N={n}")
    T, F = curve.peaks[0]
    _, coh, _ = met.qfi_at(fam, T)
    return {"N": n, "T": T, "qfi": F, "coherence": coh}


def cmd_scaling(args) -> int:
    t0 = time.perf_counter()
    if args.preset:
        try:
            pre = get_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        if "scaling" not in pre:
            raise ConfigError(f"preset {args.preset} has no scaling study")
        sc = dict(pre["scaling"])
        figure = pre["figure"]
    else:
        sc, figure = {"omega_p": 1.0, "omega": 0.03, "g": 0.01, "n_max": 10}, None
    for key in ("omega_p", "omega", "g", "n_max"):
        val = getattr(args, key)
        if val is not None:
            sc[key] = val
    if sc["n_max"] < 2:
        raise ConfigError("n_max must be at least 2")
    if not (sc["omega_p"] > 0 and sc["omega"] > 0):
        raise ConfigError("frequencies must be positive")
    t_min = args.t_min if args.t_min is not None else 1e-3 * sc["omega_p"]
    t_max = args.t_max if args.t_max is not None else 10.0 * sc["omega_p"]
    n_points = args.n_points if args.n_points is not None else 400
    if not (0 < t_min < t_max) or n_points < 3:
        raise ConfigError("invalid temperature grid")
    ns = list(range(1, sc["n_max"] + 1))
    rows = _map(_scaling_point, [(sc["omega_p"], sc["omega"], sc["g"], n, t_min, t_max, n_points) for n in ns], _threads(args.threads))

    fit_rows = [r for r in rows if r["N"] >= 2]
    fits = {"range": [2, sc["n_max"]]}
    try:
        fits["qfi"] = met.scaling_fit([r["N"] for r in fit_rows], [r["qfi"] for r in fit_rows]).to_dict()
        fits["coherence"] = met.scaling_fit([r["N"] for r in fit_rows], [r["coherence"] for r in fit_rows]).to_dict()
    except met.DomainError as exc:
        fits.update(qfi=None, coherence=None, warning=str(exc))
        print(f"warning: fit skipped: {exc}", file=sys.stderr)

    n_chk = min(8, sc["n_max"])
    row = next(r for r in rows if r["N"] == n_chk)
    p_chk = ThermometerParams.identical(sc["omega_p"], sc["omega"], sc["g"], n_chk)
    dist = trace_distance(st.global_gibbs_probe(p_chk, row["T"]).matrix, st.global_gibbs_probe_dense(p_chk, row["T"]))
    validation = {"dense_spot_check": {"N": n_chk, "T": row["T"], "trace_distance": dist, "tolerance": 1e-10, "passed": dist < 1e-10}}

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = _slug(args.preset or "scaling") + "_scaling"
    write_csv(out / f"{stem}.csv", "N,T,qfi,coherence", [[r[k] for r in rows] for k in ("N", "T", "qfi", "coherence")])
    config = {**sc, "t_min": t_min, "t_max": t_max, "n_points": n_points}
    if figure:
        config.update(preset=args.preset, figure=figure)
    _write_sidecar(out / f"{stem}.json", config, [{"T": r["T"], "F": r["qfi"]} for r in rows], fits, validation,
                   time.perf_counter() - t0)
    for r in rows:
        print(f"N={r['N']:3d}  T*={r['T']:.5g}  F*={r['qfi']:.5g}  |c|={r['coherence']:.4g}")
    if fits.get("qfi"):
        print(f"QFI exponent {fits['qfi']['exponent']:.3f} (r^2={fits['qfi']['r_squared']:.4f}), "
              f"coherence exponent {fits['coherence']['exponent']:.3f}")
    if not validation["dense_spot_check"]["passed"]:
        print(f"dense spot check FAILED: {dist:.3e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    rep = run_validation(seed=args.seed, fault=args.fault)
    print(rep.format())
    if args.out:
        doc = rep.to_dict()
        doc.update(version=__version__, wall_time_s=time.perf_counter() - t0)
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def _floats(s: str):
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thermoqfi", description="Thermometry with an ancilla-assisted qubit probe.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def grid_opts(p):
        p.add_argument("--t-min", type=float)
        p.add_argument("--t-max", type=float)
        p.add_argument("--n-points", type=int)
        p.add_argument("--threads", type=int, help="worker processes (default: THERMOQFI_THREADS or all cores)")
        p.add_argument("--out", default=".", help="output directory")

    sw = sub.add_parser("sweep", help="QFI, coherence and error bound over a temperature grid")
    sw.add_argument("--preset", choices=sorted(PRESETS))
    sw.add_argument("--config", help="JSON config file")
    sw.add_argument("--model", choices=MODELS)
    sw.add_argument("--omega-p", type=float)
    sw.add_argument("--omega-k", type=_floats)
    sw.add_argument("--g-k", type=_floats)
    sw.add_argument("--omega-1", type=float, help="ancilla frequency for the dipole-dipole and DM models")
    sw.add_argument("--g", type=float, help="coupling for the dipole-dipole and DM models")
    sw.add_argument("--grid", choices=("log", "linear"))
    sw.add_argument("--outputs", type=lambda s: [x for x in s.split(",") if x])
    sw.add_argument("--probe-gap", choices=("literal", "mean"))
    sw.add_argument("--validate-numeric", action="store_true")
    grid_opts(sw)
    sw.set_defaults(func=cmd_sweep)

    sc = sub.add_parser("scaling", help="low-temperature peak QFI and coherence versus ancilla number")
    sc.add_argument("--preset", choices=sorted(k for k, v in PRESETS.items() if "scaling" in v))
    sc.add_argument("--omega-p", type=float)
    sc.add_argument("--omega", type=float)
    sc.add_argument("--g", type=float)
    sc.add_argument("--n-max", type=int)
    grid_opts(sc)
    sc.set_defaults(func=cmd_scaling)

    va = sub.add_parser("validate", help="run the oracle-equivalence suites")
    va.add_argument("--out", help="write the JSON report here")
    va.add_argument("--seed", type=int, default=20240)
    va.add_argument("--fault", choices=FAULTS, help="inject a known bug (sensitivity check)")
    va.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ThermoQfiError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
