"""Command-line surface: simulation runs, verification suites, and
serialization.

Commands::

    confmech models
    confmech simulate         --model ... --dt ... --t-end ... [--output f]
    confmech reconstruct      --model ... --t-end ... --num ...
    confmech verify-algebra   --model ... --samples ... --tol ... --seed ...
    confmech verify-decoupling --model ... [--dim ...]
    confmech reduce           --model ... --state "q1,..,p1,.."
    confmech exact            --model ... [--state ...] --t-end ... --num ...

Exit codes: 0 success / verification passed; 1 verification failed (the
report is still written); 2 usage error; 3 numeric error (singularity,
collapse, chart pole) or I/O error, with a diagnostic JSON document.

A flat ``key = value`` config file can seed any flag (``--config run.cfg``);
explicit flags take precedence, unknown keys are rejected. All randomness
flows through the single ``--seed`` value echoed in every report.

Trajectory CSV schema: header ``t,q1..qd,p1..pd,H,D,K,I``, floats with 17
significant digits, LF line endings. JSON reports have a stable key order
and embed the tool version, the seed, and the parsed config.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, models, radial
from .conformal import verify_algebra
from .errors import (
    ChartSingularError,
    CollapseOnPathError,
    ConfmechError,
    DomainError,
    NonFiniteError,
    NotHomogeneousError,
    SingularityApproachError,
    StepUnderflowError,
    UsageError,
    ZeroAngularEnergyError,
)
from .lobachevsky import canonicity_report
from .phase import PhaseState, Trajectory, integrate_verlet
from .radial import RadialData, fall_time, radial_squared, reparam_time
from .reduction import from_hyperspherical, to_hyperspherical

COMMANDS = ("simulate", "reconstruct", "verify-algebra", "verify-decoupling",
            "reduce", "exact", "models")

_NUMERIC_ERRORS = (SingularityApproachError, StepUnderflowError,
                   CollapseOnPathError, ChartSingularError, DomainError,
                   NonFiniteError, NotHomogeneousError,
                   ZeroAngularEnergyError)


@dataclass
class RunConfig:
    command: str
    model: str = None
    dim: int = None
    kappa: float = None
    omega: float = None
    gamma: float = None
    g: float = None
    particles: int = None
    state: str = None
    dt: float = 1e-3
    t_end: float = 10.0
    rtol: float = 1e-10
    samples: int = 200
    tol: float = 1e-8
    num: int = 101
    seed: int = 0
    output: str = None
    format: str = None
    echo: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_FLAG_TYPES = {
    "model": str, "dim": int, "kappa": float, "omega": float, "gamma": float,
    "g": float, "particles": int, "state": str, "dt": float, "t_end": float,
    "rtol": float, "samples": int, "tol": float, "num": int, "seed": int,
    "output": str, "format": str,
}


def _build_parser() -> _Parser:
    p = _Parser(prog="confmech", description="conformal mechanics toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value file; flags win")
    p.add_argument("--model", help="free | inverse-square | higgs | coulomb "
                                   "| calogero")
    p.add_argument("--dim", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--particles", type=int)
    p.add_argument("--state", help="comma-separated q1..qd,p1..pd")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--num", type=int, help="grid points for reconstruct/exact")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def _read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _FLAG_TYPES:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    out[key] = _FLAG_TYPES[key](val.strip())
                except ValueError:
                    raise UsageError(
                        f"{path}:{lineno}: bad value for {key!r}") from None
    except OSError as err:
        raise UsageError(f"cannot read config file: {err}") from None
    return out


def parse_config(argv) -> RunConfig:
    """argv (plus an optional config file) -> validated RunConfig."""
    ns = _build_parser().parse_args(argv)
    values = {k: getattr(ns, k) for k in _FLAG_TYPES}
    if ns.config:
        for key, val in _read_config_file(ns.config).items():
            if values.get(key) is None:
                values[key] = val
    cfg = RunConfig(command=ns.command)
    for key, val in values.items():
        if val is not None:
            setattr(cfg, key, val)
    if cfg.format is None:
        cfg.format = "csv" if cfg.command in ("simulate", "reconstruct") \
            else "json"
    _validate(cfg)
    # the output destination is not semantic config: identical runs must
    # produce byte-identical reports wherever they are written
    cfg.echo = {k: v for k, v in values.items()
                if v is not None and k != "output"}
    cfg.echo["command"] = cfg.command
    return cfg


def _validate(cfg: RunConfig):
    if cfg.dt <= 0:
        raise UsageError("--dt must be positive")
    if cfg.t_end <= 0:
        raise UsageError("--t-end must be positive")
    if not (1e-13 <= cfg.rtol <= 1e-3):
        raise UsageError("--rtol must lie in [1e-13, 1e-3]")
    if cfg.samples < 1:
        raise UsageError("--samples must be >= 1")
    if cfg.tol <= 0:
        raise UsageError("--tol must be positive")
    if cfg.num < 2:
        raise UsageError("--num must be >= 2")
    if cfg.command == "verify-decoupling" and cfg.model is None:
        # bare --dim N checks the plain inverse-square system (g = 1)
        cfg.model = "inverse-square"
        if cfg.kappa is None:
            cfg.kappa = 0.5
    if cfg.command != "models" and cfg.model is None:
        raise UsageError(f"{cfg.command} needs --model")


def _model_spec(cfg: RunConfig) -> models.ModelSpec:
    params = {}
    for key in ("kappa", "omega", "gamma", "g"):
        if getattr(cfg, key) is not None:
            params[key] = getattr(cfg, key)
    if cfg.particles is not None:
        params["particles"] = cfg.particles
    try:
        ms = models.spec(cfg.model, d=cfg.dim, **params)
    except (ValueError, TypeError) as err:
        raise UsageError(str(err)) from None
    return ms


def _initial_state(cfg: RunConfig, ms: models.ModelSpec) -> PhaseState:
    if cfg.state is None:
        return models.reference_state(ms)
    try:
        vals = [float(x) for x in cfg.state.replace(",", " ").split()]
    except ValueError:
        raise UsageError("--state must be a list of numbers") from None
    if len(vals) != 2 * ms.d:
        raise UsageError(f"--state needs {2 * ms.d} numbers for d={ms.d}")
    return PhaseState(vals[:ms.d], vals[ms.d:])


def _float_repr(x: float) -> str:
    return f"{x:.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    d = traj.qs.shape[1]
    cols = (["t"] + [f"q{i + 1}" for i in range(d)]
            + [f"p{i + 1}" for i in range(d)] + ["H", "D", "K", "I"])
    lines = [",".join(cols)]
    mon = [traj.monitors[k] for k in ("H", "D", "K", "I")]
    for i in range(len(traj)):
        row = ([traj.times[i]] + list(traj.qs[i]) + list(traj.ps[i])
               + [m[i] for m in mon])
        lines.append(",".join(_float_repr(v) for v in row))
    return "\n".join(lines) + "\n"


def read_trajectory_csv(path: str):
    """Parse a trajectory CSV back into (times, qs, ps, monitors)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(x) for x in line.split(",")]
                for line in fh if line.strip()]
    data = np.asarray(rows)
    d = (len(header) - 5) // 2
    mons = {k: data[:, 1 + 2 * d + j] for j, k in enumerate("HDKI")}
    return data[:, 0], data[:, 1:1 + d], data[:, 1 + d:1 + 2 * d], mons


def _json_doc(cfg: RunConfig, payload: dict) -> dict:
    doc = {"tool": "confmech", "version": __version__, "seed": cfg.seed,
           "config": {k: cfg.echo[k] for k in sorted(cfg.echo)}}
    doc.update(payload)
    return doc


def emit(text_or_doc, fmt: str, path: str):
    """Write CSV text or a JSON document to a path (or stdout)."""
    if fmt == "json":
        text = json.dumps(text_or_doc, indent=2) + "\n"
    else:
        text = text_or_doc
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _trajectory_payload(traj: Trajectory) -> dict:
    return {
        "times": list(traj.times),
        "q": [list(row) for row in traj.qs],
        "p": [list(row) for row in traj.ps],
        "monitors": {k: list(v) for k, v in traj.monitors.items()},
    }


def run(cfg: RunConfig) -> int:
    """Execute a parsed config; returns the process exit code."""
    if cfg.command == "models":
        entries = []
        for ms in models.catalog():
            s0 = models.reference_state(ms)
            entries.append({
                "name": ms.name, "d": ms.d,
                "params": {k: ms.params[k] for k in sorted(ms.params)},
                "reference_state": {"q": list(s0.q), "p": list(s0.p)},
            })
        emit(_json_doc(cfg, {"models": entries}), "json", cfg.output)
        return 0

    ms = _model_spec(cfg)
    sys_ = models.build(ms)

    if cfg.command == "simulate":
        s0 = _initial_state(cfg, ms)
        traj = integrate_verlet(sys_, s0, cfg.dt, cfg.t_end)
        if cfg.format == "csv":
            emit(trajectory_csv(traj), "csv", cfg.output)
        else:
            emit(_json_doc(cfg, _trajectory_payload(traj)), "json",
                 cfg.output)
        return 0

    if cfg.command == "reconstruct":
        s0 = _initial_state(cfg, ms)
        grid = np.linspace(0.0, cfg.t_end, cfg.num)
        traj = radial.reconstruct(sys_, s0, grid, rtol=cfg.rtol)
        if cfg.format == "csv":
            emit(trajectory_csv(traj), "csv", cfg.output)
        else:
            emit(_json_doc(cfg, _trajectory_payload(traj)), "json",
                 cfg.output)
        return 0

    if cfg.command == "verify-algebra":
        report = verify_algebra(sys_, samples=cfg.samples, tol=cfg.tol,
                                seed=cfg.seed)
        emit(_json_doc(cfg, report.to_dict()), "json", cfg.output)
        return 0 if report.passed else 1

    if cfg.command == "verify-decoupling":
        report = canonicity_report(ms, samples=cfg.samples, tol=cfg.tol,
                                   seed=cfg.seed)
        emit(_json_doc(cfg, report.to_dict()), "json", cfg.output)
        expected = "canonical" if ms.d == 1 else "non-canonical"
        return 0 if report.verdict == expected else 1

    if cfg.command == "reduce":
        s0 = _initial_state(cfg, ms)
        rs = to_hyperspherical(s0)
        back = from_hyperspherical(rs)
        err = max(float(np.max(np.abs(back.q - s0.q))),
                  float(np.max(np.abs(back.p - s0.p))))
        emit(_json_doc(cfg, {
            "r": rs.r, "p_r": rs.p_r,
            "phi": list(rs.phi), "pi": list(rs.pi),
            "round_trip_error": err,
        }), "json", cfg.output)
        return 0

    if cfg.command == "exact":
        s0 = _initial_state(cfg, ms)
        rd = RadialData.from_state(sys_, s0)
        t_fall = fall_time(rd)
        t_max = cfg.t_end
        if t_fall is not None:
            t_max = min(t_max, 0.999 * t_fall)
        grid = np.linspace(0.0, t_max, cfg.num)
        rows = [{"t": float(t),
                 "r_squared": radial_squared(rd, float(t)),
                 "T": reparam_time(rd, float(t))} for t in grid]
        payload = {"E": rd.E, "D0": rd.D0, "r0sq": rd.r0sq, "I0": rd.I0,
                   "fall_time": t_fall, "samples": rows}
        if cfg.format == "csv":
            lines = ["t,r_squared,T"] + [
                ",".join(_float_repr(r[k]) for k in ("t", "r_squared", "T"))
                for r in rows]
            emit("\n".join(lines) + "\n", "csv", cfg.output)
        else:
            emit(_json_doc(cfg, payload), "json", cfg.output)
        return 0

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    """Entry point; maps typed failures onto the documented exit codes."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as err:
        diag = {"tool": "confmech", "version": __version__,
                "error": type(err).__name__, "message": str(err)}
        for attr in ("last_good_time", "t_reached", "collapse_time"):
            if getattr(err, attr, None) is not None:
                diag[attr] = getattr(err, attr)
        emit(diag, "json", cfg.output)
        return 3
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 3
    except ConfmechError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
