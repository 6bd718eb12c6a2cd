"""Command line front end: ``manakov simulate|verify|uniformize``."""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import core, dynamics, spectral, wurzel
from .abelian import uniformize
from .errors import ConfigError, ManakovError

SUITES = ("invariants", "lax", "quadrics", "identities", "theorem")

DEFAULT_TOLERANCES = {
    "drift": 1e-8,
    "hamiltonian": 1e-12,
    "lax": 1e-6,
    "root": 1e-10,
    "isotropy": 1e-10,
    "delta": 1e-9,
    "round_trip": 1e-9,
    "quadric": 1e-9,
    "moduli_spread": 1e-8,
    "identity": 1e-10,
    "calibration": 1e-6,
    "linearity": 1e-6,
    "reconstruction": 1e-5,
    "imaginary": 1e-6,
    "integrals": 1e-6,
}


@dataclass
class RunConfig:
    a: np.ndarray
    c: np.ndarray
    b: np.ndarray | None = None
    l0: np.ndarray | None = None
    t_end: float = 5.0
    dt: float = 1e-3
    stride: int = 100
    method: str = "rk4"
    seed: int = 0
    samples: int = 1000
    out: str | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def is_manakov(self) -> bool:
        return self.b is not None

    def initial_state(self) -> np.ndarray:
        if self.l0 is not None:
            return self.l0
        l = np.random.default_rng(self.seed).normal(size=6)
        return l / np.linalg.norm(l)


def _vector(raw, name, size):
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected {size} numbers") from exc
    if v.shape != (size,):
        raise ConfigError(f"{name}: expected {size} numbers, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ConfigError(f"{name}: non-finite entries")
    return v


def load_config(path: str, seed: int | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw, seed)


def parse_config(raw: dict, seed: int | None = None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "a" not in raw:
        raise ConfigError("config needs the moduli 'a'")
    a = _vector(raw["a"], "a", 4)
    b = None
    if "c" in raw:
        c = np.asarray(raw["c"], dtype=float)
        if c.shape != (4, 4) or not np.all(np.isfinite(c)):
            raise ConfigError("c must be a finite 4x4 matrix")
        if not np.allclose(c, c.T) or np.any(np.diag(c) != 0):
            raise ConfigError("c must be symmetric with zero diagonal")
    elif "b" in raw:
        b = _vector(raw["b"], "b", 4)
        c = core.derive_c(a, b)
    else:
        raise ConfigError("config needs either 'b' or an explicit 'c'")
    if len(set(a.tolist())) < 4:
        raise ConfigError("moduli a must be pairwise distinct")
    cfg = RunConfig(a=a, c=c, b=b)
    if raw.get("l0") is not None:
        cfg.l0 = _vector(raw["l0"], "l0", 6)
    for key, kind in (("t_end", float), ("dt", float), ("stride", int), ("samples", int), ("seed", int)):
        if key in raw:
            try:
                setattr(cfg, key, kind(raw[key]))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: bad value {raw[key]!r}") from exc
    if not (math.isfinite(cfg.t_end) and cfg.t_end > 0):
        raise ConfigError("t_end must be positive")
    if not (math.isfinite(cfg.dt) and cfg.dt > 0):
        raise ConfigError("dt must be positive")
    if cfg.stride < 1 or cfg.samples < 1:
        raise ConfigError("stride and samples must be positive")
    cfg.method = str(raw.get("method", "rk4"))
    if cfg.method not in ("rk4", "midpoint"):
        raise ConfigError(f"unknown integrator {cfg.method!r}")
    cfg.out = raw.get("out")
    tol = raw.get("tolerances", {})
    unknown = set(tol) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
    cfg.tolerances.update({k: float(v) for k, v in tol.items()})
    if seed is not None:
        cfg.seed = seed
    return cfg


def threads() -> int:
    try:
        return max(1, int(os.environ.get("MANAKOV_THREADS", "1")))
    except ValueError:
        return 1


def check(name, residual, threshold) -> dict:
    residual = float(residual)
    return {"check": name, "residual": residual, "threshold": float(threshold),
            "pass": bool(np.isfinite(residual) and residual < threshold)}


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(cfg: RunConfig) -> int:
    traj = dynamics.integrate(cfg.initial_state(), cfg.c, cfg.t_end, cfg.dt, cfg.method, stride=1)
    keep = traj.subsample(cfg.stride)
    h = core.integrals_series(keep.states, cfg.a)
    header = ["t", "l12", "l13", "l14", "l23", "l24", "l34", "H0", "H1", "H2", "H3"]
    rows = np.column_stack([keep.times, keep.states, h])
    _emit(_csv(header, rows), cfg.out)
    return 0


def suite_invariants(cfg: RunConfig) -> list[dict]:
    tol = cfg.tolerances
    traj = dynamics.integrate(cfg.initial_state(), cfg.c, cfg.t_end, cfg.dt, cfg.method)
    drift = dynamics.relative_drift(traj, cfg.a)
    out = [check(f"H{k}_drift", drift[k], tol["drift"]) for k in range(4)]
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(100):
        l = rng.normal(size=6)
        diff = dynamics.euler_frahm_rhs(l, cfg.c) - dynamics.hamiltonian_vector_field(l, cfg.c)
        worst = max(worst, np.abs(diff).max())
    out.append(check("rhs_equals_bracket_flow", worst, tol["hamiltonian"]))
    return out


def suite_lax(cfg: RunConfig) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    traj = dynamics.integrate(cfg.initial_state(), cfg.c, min(cfg.t_end, 2.0), cfg.dt, cfg.method)
    out = []
    for i in range(3):
        s = complex(rng.uniform(0, 5), rng.uniform(-2, 2))
        out.append(check(f"lax_residual_probe_{i}", dynamics.lax_residual(traj, cfg.a, s), cfg.tolerances["lax"]))
    return out


def _trajectory_samples(cfg: RunConfig, count: int = 50):
    traj = dynamics.integrate(cfg.initial_state(), cfg.c, cfg.t_end, cfg.dt, cfg.method)
    idx = np.unique(np.linspace(0, len(traj) - 1, count).round().astype(int))
    return traj, traj.times[idx], traj.states[idx]


def suite_quadrics(cfg: RunConfig) -> list[dict]:
    tol = cfg.tolerances
    _, times, states = _trajectory_samples(cfg)
    h = core.integrals(states[0], cfg.a)
    sd = spectral.spectral_data(h, cfg.a)
    scale = h.scale
    coef = spectral.quartic_coefficients(h, cfg.a)
    lp = sd.isotropic(states[0])
    out = [
        check("quartic_root_residual", np.abs(np.polyval(coef, sd.roots)).max() / scale, tol["root"]),
        check("isotropy", np.abs((lp * lp).sum(1)).max() / scale, tol["isotropy"]),
        check("delta_square_sum", np.abs((sd.delta ** 2).sum(1)).max() / np.abs(sd.delta).max() ** 2, tol["delta"]),
    ]
    worst_q = worst_rt = spread = 0.0
    for l in states:
        xi, eta = sd.xi_eta(l)
        worst_q = max(worst_q, np.abs(sd.quadrics(xi, eta)).max() / scale)
        worst_rt = max(worst_rt, np.abs(sd.to_state(xi, eta) - l).max() / np.abs(l).max())
        d3 = spectral.spectral_data(core.integrals(l, cfg.a), cfg.a).d3
        spread = max(spread, np.abs(d3 - sd.d3).max() / np.abs(sd.d3).max())
    out += [
        check("round_trip", worst_rt, tol["round_trip"]),
        check("quadrics_along_trajectory", worst_q, tol["quadric"]),
        check("moduli_spread", spread, tol["moduli_spread"]),
    ]
    return out


def _identity_sample(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    d = spectral.full_moduli(rng.normal(size=3) + 1j * rng.normal(size=3))
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    sh = rng.choice([1, -1], size=2)
    D = wurzel.Divisor(wurzel.CurvePoint.on_curve(z[0], d, sh[0]), wurzel.CurvePoint.on_curve(z[1], d, sh[1]))
    s = complex(rng.normal(), rng.normal())
    return wurzel.identity_suite(D, d, s)


def suite_identities(cfg: RunConfig) -> list[dict]:
    seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.samples)
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        reports = list(pool.map(_identity_sample, (int(s) for s in seeds)))
    keys = ("resolvent", "trace_d4", "trace_p0", "cross_c", "cross_ct", "weighted")
    return [check(f"identity_{k}", max(r[k] for r in reports), cfg.tolerances["identity"]) for k in keys]


def suite_theorem(cfg: RunConfig) -> list[dict]:
    tol = cfg.tolerances
    traj, times, states = _trajectory_samples(cfg)
    U = uniformize(times, states, cfg.a, seed=cfg.seed)
    stride = max(1, len(traj) // 200)
    err = imag = integ = 0.0
    h = core.integrals(states[0], cfg.a).as_array()
    for t, l in zip(traj.times[::stride], traj.states[::stride]):
        rec = U.state(t)
        err = max(err, np.abs(rec - l).max())
        imag = max(imag, np.abs(rec.imag).max())
        hr = core.integrals(rec.real, cfg.a).as_array()
        integ = max(integ, np.abs(hr - h).max() / max(1.0, np.abs(h).max()))
    return [
        check("calibration_spread", U.calibration.max_spread, tol["calibration"]),
        check("linear_flow_residual", U.fit_residual, tol["linearity"]),
        check("reconstruction_error", err, tol["reconstruction"]),
        check("reconstruction_imaginary", imag, tol["imaginary"]),
        check("reconstruction_integrals", integ, tol["integrals"]),
    ]


SUITE_FUNCS = {
    "invariants": suite_invariants,
    "lax": suite_lax,
    "quadrics": suite_quadrics,
    "identities": suite_identities,
    "theorem": suite_theorem,
}


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    if suite not in SUITE_FUNCS:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    checks = SUITE_FUNCS[suite](cfg)
    ok = all(c["pass"] for c in checks)
    report = {"suite": suite, "pass": ok, "checks": checks}
    _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    return 0 if ok else 1


def cmd_uniformize(cfg: RunConfig) -> int:
    traj = dynamics.integrate(cfg.initial_state(), cfg.c, cfg.t_end, cfg.dt, cfg.method, stride=cfg.stride)
    U = uniformize(traj.times, traj.states, cfg.a, seed=cfg.seed)
    z = U.z
    rows = np.column_stack([traj.times, z[:, 0].real, z[:, 0].imag, z[:, 1].real, z[:, 1].imag,
                            U.u[:, 0].real, U.u[:, 0].imag, U.u[:, 1].real, U.u[:, 1].imag])
    header = ["t", "z1_re", "z1_im", "z2_re", "z2_im", "u1_re", "u1_im", "u2_re", "u2_im"]
    _emit(_csv(header, rows), cfg.out)
    steps = np.abs(np.diff(U.u, axis=0)).max() if len(U.u) > 1 else 0.0
    jump_bound = 10 * np.abs(U.v).max() * cfg.dt * cfg.stride
    sidecar = {
        "u0": [[float(x.real), float(x.imag)] for x in U.u0],
        "v": [[float(x.real), float(x.imag)] for x in U.v],
        "tau": [[[float(x.real), float(x.imag)] for x in row] for row in U.ctx.tau],
        "characteristics": {k or "denominator": list(v) for k, v in U.calibration.table.items()},
        "checks": [
            check("linear_flow_residual", U.fit_residual, cfg.tolerances["linearity"]),
            check("max_step_over_bound", steps / jump_bound if jump_bound > 0 else 0.0, 1.0),
        ],
    }
    text = json.dumps(sidecar, indent=2) + "\n"
    if cfg.out:
        root, _ = os.path.splitext(cfg.out)
        with open(root + ".json", "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="manakov", description="Integrate and uniformise the so(4) Manakov top.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("simulate", "verify", "uniformize"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out")
        sp.add_argument("--seed", type=int)
        if name == "verify":
            sp.add_argument("--suite", required=True, choices=SUITES)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
        if args.out:
            cfg.out = args.out
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        return cmd_uniformize(cfg)
    except ManakovError as exc:
        print(f"manakov: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"manakov: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
