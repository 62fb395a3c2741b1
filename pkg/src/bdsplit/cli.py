"""Command-line front end.

    bdsplit transfer   --delta-range=-10:10:1001 -o transfer.csv
    bdsplit simulate   --cooperativity 20 -o run.csv
    bdsplit sweep      --c-range 0.1:100:40log -o sweep.csv
    bdsplit fock-check --cutoff 8

Settings may also come from a flat ``key = value`` file passed with
``--config``; command-line flags win over file values.
"""
from __future__ import annotations

import argparse
import ast
import dataclasses
import json
import math
import operator
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import sweep_cooperativity
from .dynamics import integrate, norm_budget
from .errors import NumericalError, ParameterError
from .fock import fock_check
from .kernels import default_backend
from .model import InputSuperposition, Pulse, SystemParams, TimeGrid
from .transfer import AtomBranch, coefficients_at

MODES = ("transfer", "simulate", "sweep", "fock-check")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

SWEEP_HEADER = "C,p_hp,p_exact,abs_diff,atomic_loss"
TRANSFER_HEADER = "delta,re_x_plus,im_x_plus,re_x_minus,im_x_minus,re_y_plus,im_y_plus,re_y_minus,im_y_minus"
SIMULATE_HEADER = "t,abs_c_e,abs_out_ar,abs_out_br,abs_out_at,abs_out_bt"
BUDGET_HEADER = "reflected,transmitted,atomic_loss,residual"


class ConfigError(ParameterError):
    def __init__(self, message, key=None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass
class RunConfig:
    """Every setting of a run; defaults are Gamma = 0.1, kappa tau_p = 100."""

    mode: str = None
    g: float = 1.0
    gamma: float = 0.1
    kappa_r: float = 0.5
    kappa_t: float = 0.5
    cooperativity: float = None
    branch: str = None
    lambda_1: complex = None
    lambda_2: complex = None
    mu_a: complex = 1.0
    mu_b: complex = 0.0
    kappa_tau_p: float = 100.0
    t0: float = 0.0
    c_range: str = None
    c_values: str = None
    delta_range: str = "-10:10:1001"
    output: str = None
    dt_factor: float = 50.0
    window_factor: float = 6.0
    ringdown: float = 10.0
    cutoff: int = 8
    workers: int = 1
    gnuplot: bool = False

    # -- derived objects ------------------------------------------------

    def params(self):
        for key in ("gamma", "kappa_r", "kappa_t"):
            val = getattr(self, key)
            if key != "gamma" and not val > 0:
                raise ConfigError(f"rate must be positive, got {val!r}", key)
        if self.gamma < 0:
            raise ConfigError(f"rate must be non-negative, got {self.gamma!r}", "gamma")
        kappa = self.kappa_r + self.kappa_t
        if self.cooperativity is not None:
            if self.cooperativity < 0:
                raise ConfigError("must be non-negative", "cooperativity")
            if self.gamma <= 0:
                raise ConfigError("cooperativity needs gamma > 0", "gamma")
            g = math.sqrt(self.cooperativity * kappa * self.gamma / 2.0)
        else:
            g = self.g
            if g < 0:
                raise ConfigError(f"coupling must be non-negative, got {g!r}", "g")
        return SystemParams(g, g, self.kappa_r, self.kappa_t, self.kappa_r, self.kappa_t, self.gamma, 0.0)

    def lambdas(self):
        implied = None
        if self.branch is not None:
            branch = AtomBranch.parse(self.branch)
            implied = (1.0, 0.0) if branch is AtomBranch.G1 else (0.0, 1.0)
        given = (self.lambda_1, self.lambda_2)
        if given == (None, None):
            return implied or (1.0, 0.0)
        l1 = 0.0 if self.lambda_1 is None else self.lambda_1
        l2 = 0.0 if self.lambda_2 is None else self.lambda_2
        if implied is not None and (abs(l1 - implied[0]) > 1e-12 or abs(l2 - implied[1]) > 1e-12):
            raise ConfigError(f"conflicts with lambda_1 = {l1}, lambda_2 = {l2}", "branch")
        return l1, l2

    def state(self):
        l1, l2 = self.lambdas()
        if abs(abs(l1) ** 2 + abs(l2) ** 2 - 1.0) > 1e-12:
            raise ConfigError("atomic state not normalized", "lambda_1")
        if abs(abs(self.mu_a) ** 2 + abs(self.mu_b) ** 2 - 1.0) > 1e-12:
            raise ConfigError("input not normalized", "mu_a")
        return InputSuperposition(l1, l2, self.mu_a, self.mu_b)

    def transfer_branch(self):
        if self.branch is not None:
            return AtomBranch.parse(self.branch)
        l1, _ = self.lambdas()
        return AtomBranch.G1 if abs(l1) > 0.5 else AtomBranch.G2

    def pulse(self):
        if not self.kappa_tau_p > 0:
            raise ConfigError("must be positive", "kappa_tau_p")
        kappa = self.kappa_r + self.kappa_t
        return Pulse.from_duration(self.kappa_tau_p / kappa, t0=self.t0)

    def grid_kwargs(self):
        return {"window": self.window_factor, "ringdown": self.ringdown, "dt_factor": self.dt_factor}

    def cooperativities(self):
        if self.c_range is not None and self.c_values is not None:
            raise ConfigError("give either c_range or c_values, not both", "c_values")
        if self.c_values is not None:
            try:
                return [float(_parse_number(v)) for v in self.c_values.split(",") if v.strip()]
            except ValueError as exc:
                raise ConfigError(str(exc), "c_values") from None
        return parse_range(self.c_range or "0.1:100:40log", "c_range", default_spacing="log")

    def deltas(self):
        return parse_range(self.delta_range, "delta_range", default_spacing="lin")

    def validate(self):
        if self.mode is None:
            raise ConfigError("missing required mode (one of: " + ", ".join(MODES) + ")", "mode")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}", "mode")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ConfigError("must be an integer >= 1", "cutoff")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "workers")
        for key in ("dt_factor", "window_factor", "ringdown"):
            if not getattr(self, key) > 0:
                raise ConfigError("must be positive", key)
        if self.mode == "fock-check":
            return self
        self.params()
        self.state()
        self.pulse()
        if self.mode == "sweep":
            l1, _ = self.lambdas()
            if abs(abs(l1) - 1.0) > 1e-12:
                raise ConfigError("sweeps require the atom in |g1> (lambda_1 = 1)", "lambda_1")
            if self.cooperativity is not None:
                raise ConfigError("not used by sweep; use c_range or c_values", "cooperativity")
            cs = self.cooperativities()
            if not cs or any(c <= 0 for c in cs):
                raise ConfigError("cooperativities must be positive", "c_range")
        if self.mode == "transfer":
            self.deltas()
        return self

    # -- serialization --------------------------------------------------

    def to_text(self):
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if val is not None:
                lines.append(f"{f.name} = {val!r}" if not isinstance(val, str) else f"{f.name} = {val}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {
    "mode": str,
    "branch": str,
    "c_range": str,
    "c_values": str,
    "delta_range": str,
    "output": str,
    "cutoff": int,
    "workers": int,
    "gnuplot": bool,
    "lambda_1": complex,
    "lambda_2": complex,
    "mu_a": complex,
    "mu_b": complex,
}

_BIN_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "j": 1j, "i": 1j}
_FUNCS = {"sqrt": np.emath.sqrt, "exp": np.exp}


def _parse_number(text):
    """Parse a real or complex literal, or a small arithmetic expression like 1/sqrt(2)."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
            return complex(_FUNCS[node.func.id](ev(node.args[0])))
        raise ValueError(f"cannot parse number {text!r}")

    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse number {text!r}") from None
    return ev(tree)


def _coerce(key, raw):
    kind = _FIELD_TYPES.get(key, float)
    if not isinstance(raw, str):
        return raw
    if kind is str:
        return raw.strip()
    if kind is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}", key)
    try:
        val = _parse_number(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc), key) from None
    if kind is complex:
        return complex(val)
    if isinstance(val, complex):
        if val.imag != 0:
            raise ConfigError(f"expected a real number, got {raw!r}", key)
        val = val.real
    if kind is int:
        if float(val) != int(val):
            raise ConfigError(f"expected an integer, got {raw!r}", key)
        return int(val)
    return float(val)


def parse_range(text, key, default_spacing="lin"):
    """``start:stop:count[log|lin]`` -> list of floats."""
    try:
        start, stop, count = text.split(":")
        spacing = default_spacing
        count = count.strip().lower()
        for suffix in ("log", "lin"):
            if count.endswith(suffix):
                spacing, count = suffix, count[: -len(suffix)]
        start, stop, n = float(start), float(stop), int(count)
    except ValueError:
        raise ConfigError(f"expected start:stop:count[log|lin], got {text!r}", key) from None
    if n < 1:
        raise ConfigError("count must be >= 1", key)
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("log ranges need positive bounds", key)
        return list(np.geomspace(start, stop, n))
    return list(np.linspace(start, stop, n))


def read_config_file(path):
    """Flat UTF-8 ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            values[key] = val
    return values


def config_from_text(text):
    values = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
    return _build_config(values)


def _build_config(values):
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}", unknown[0])
    return RunConfig(**{k: _coerce(k, v) for k, v in values.items()})


def build_parser():
    parser = argparse.ArgumentParser(prog="bdsplit", description="Bright/dark beam-splitter simulator")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("mode", nargs="?", choices=MODES, help="workflow to run")
    parser.add_argument("--config", help="flat key = value settings file")
    opt = parser.add_argument_group("settings (override the config file)")
    for f in fields(RunConfig):
        if f.name == "mode":
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name == "output":
            opt.add_argument("-o", flag, dest=f.name, default=None)
        elif f.name == "gnuplot":
            opt.add_argument(flag, dest=f.name, action="store_const", const="true", default=None)
        else:
            opt.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())
    return parser


def parse_config(argv=None):
    """argv + optional config file -> validated RunConfig."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = read_config_file(ns.config) if ns.config else {}
    for f in fields(RunConfig):
        val = getattr(ns, f.name, None)
        if val is not None:
            values[f.name] = val
    return _build_config(values).validate()


def _fmt(x):
    return f"{float(x):.12g}"


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_meta(path, cfg, extra=None):
    meta = {
        "program": "bdsplit",
        "version": __version__,
        "backend": default_backend(),
        "created_unix": time.time(),
        "config": dataclasses.asdict(cfg),
    }
    meta.update(extra or {})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")


def _write_gnuplot(path, data, columns, logx=False):
    lines = ["set datafile separator ','", "set key autotitle columnhead"]
    if logx:
        lines.append("set logscale x")
    plots = [f"'{data}' using 1:{c} with lines" for c in columns]
    lines.append("plot " + ", ".join(plots))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _output_path(cfg):
    return Path(cfg.output or f"bdsplit-{cfg.mode}.csv")


def run_transfer(cfg, out):
    params = cfg.params()
    branch = cfg.transfer_branch()
    rows = []
    for d in cfg.deltas():
        c = coefficients_at(params, branch, d)
        rows.append([d] + [p for z in c.as_tuple() for p in (z.real, z.imag)])
    _write_csv(out, TRANSFER_HEADER, rows)
    print(f"transfer: branch {branch.value}, {len(rows)} detunings -> {out}")
    if cfg.gnuplot:
        _write_gnuplot(out.with_suffix(".gp"), out.name, range(2, 10))
    return {"rows": len(rows)}


def run_simulate(cfg, out):
    params, state, pulse = cfg.params(), cfg.state(), cfg.pulse()
    grid = TimeGrid.for_run(params, pulse, **cfg.grid_kwargs())
    traj = integrate(params, state, pulse, grid)
    budget = norm_budget(traj)
    ar, br, at, bt = traj.outputs(1)
    rows = np.column_stack([traj.t, np.abs(traj.c_e), np.abs(ar), np.abs(br), np.abs(at), np.abs(bt)])
    _write_csv(out, SIMULATE_HEADER, rows)
    budget_path = out.with_suffix(".budget.csv")
    _write_csv(budget_path, BUDGET_HEADER, [budget.as_tuple()])
    print(
        f"simulate: g={params.g_a:.6g} reflected={budget.reflected:.6f} transmitted={budget.transmitted:.6f} "
        f"atomic_loss={budget.atomic_loss:.6f} residual={budget.residual:.3g} -> {out}"
    )
    if cfg.gnuplot:
        _write_gnuplot(out.with_suffix(".gp"), out.name, range(2, 7))
    return {"rows": len(rows), "budget_file": str(budget_path)}


def run_sweep(cfg, out):
    template = cfg.params()
    state = cfg.state()
    rows = sweep_cooperativity(
        template,
        state.mu_a,
        state.mu_b,
        cfg.cooperativities(),
        cfg.pulse(),
        cfg.grid_kwargs(),
        workers=cfg.workers,
    )
    _write_csv(out, SWEEP_HEADER, [(r.C, r.p_hp, r.p_exact, r.abs_diff, r.atomic_loss) for r in rows])
    for r in rows:
        print(f"C={r.C:<10.6g} p_hp={r.p_hp:.6f} p_exact={r.p_exact:.6f} abs_diff={r.abs_diff:.2e} atomic_loss={r.atomic_loss:.6f}")
    if cfg.gnuplot:
        _write_gnuplot(out.with_suffix(".gp"), out.name, (2, 3), logx=True)
    return {"rows": len(rows)}


def run_fock_check(cfg, out):
    results = fock_check(cfg.cutoff)
    worst = max(results.values())
    for name, val in results.items():
        print(f"{name:<28} {val:.3e}")
    ok = worst < 1e-12
    print(f"fock-check: cutoff={cfg.cutoff} max residual {worst:.3e} {'PASS' if ok else 'FAIL'}")
    if cfg.output:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("check,residual\n")
            for name, val in results.items():
                fh.write(f"{name},{_fmt(val)}\n")
    if not ok:
        raise NumericalError(f"Fock oracle residual {worst:.3e} exceeds 1e-12")
    return {"max_residual": worst}


RUNNERS = {"transfer": run_transfer, "simulate": run_simulate, "sweep": run_sweep, "fock-check": run_fock_check}


def run(cfg):
    """Execute a validated config; returns the process exit status."""
    out = _output_path(cfg)
    try:
        info = RUNNERS[cfg.mode](cfg, out)
        if cfg.mode != "fock-check" or cfg.output:
            _write_meta(out.with_suffix(".meta.json"), cfg, info)
    except ParameterError as exc:
        print(f"bdsplit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"bdsplit: numerical error in {cfg.mode}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"bdsplit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None):
    try:
        cfg = parse_config(argv)
    except ParameterError as exc:
        print(f"bdsplit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"bdsplit: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
