"""Named experiment scenarios and deterministic tabular output.

Configs use INI syntax: one section per job, a ``scenario`` key selecting
the scenario type, and flat ``key = value`` overrides.  Time lists accept
``T``-expressions (``T``, ``T/4``, ``0.5T``) where T = 2 pi N_A / (lam N_B).
All numeric output is written with 17 significant digits so reruns are
byte-identical.
"""

from __future__ import annotations

import configparser
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boson import coherent_state
from .dynamics import HamiltonianSpec, Picture, build_hamiltonian, evolve
from .observables import expectation, fidelity, q_function, squeezing_kitagawa_ueda, variance
from .spin import (
    CollectiveSpinParams,
    OperatorKind,
    make_operator,
    product_state,
    spin_coherent_state,
)

__all__ = [
    "SCENARIOS",
    "ConfigError",
    "ScenarioConfig",
    "OutputRecord",
    "validate_config",
    "validate_config_text",
    "run_scenario",
    "write_record",
]

SCENARIOS = ("fig1_fidelity", "fig2_squeezing", "fig3_qfunctions", "fig4_expvar", "custom")
THREADS_ENV = "SPINCAT_THREADS"


class ConfigError(ValueError):
    """Carries the full list of per-field validation messages."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ScenarioConfig:
    """Effective parameters of one scenario run (defaults already applied)."""

    name: str
    scenario: str
    n_a: int
    n_b: int
    zeta_abs: float = 1.0
    zeta_phase: float = 0.0
    coupling: float = 1.0
    omega_a: float = 0.0
    omega_b: float = 0.0
    picture: str = "interaction"
    t_start: float = 0.0
    t_stop: float = 0.0
    t_steps: int = 1
    times: tuple | None = None  # raw tokens, may contain T-expressions
    observables: tuple = ()
    q_theta: int = 181
    q_phi: int = 360
    out_format: str = "csv"
    out_name: str | None = None
    zeta_max: float | None = None  # fig1 sweep
    zeta_steps: int = 201  # fig1 sweep
    n_b_values: tuple = (1, 2, 3, 4)  # fig2 sweep

    @property
    def zeta(self) -> complex:
        return self.zeta_abs * np.exp(1j * self.zeta_phase)

    def period(self) -> float:
        if self.coupling == 0:
            raise ConfigError([f"{self.name}: T is undefined at zero coupling"])
        return 2 * math.pi * self.n_a / (self.coupling * self.n_b)

    def resolved_times(self) -> np.ndarray:
        if self.times is not None:
            vals = sorted(_parse_time_token(tok, self.period) for tok in self.times)
            return np.array(vals, dtype=float)
        stop = _parse_time_token(self.t_stop, self.period)
        start = _parse_time_token(self.t_start, self.period)
        return np.linspace(start, stop, self.t_steps)


_DEFAULT_OBSERVABLES = (
    "fidelity_initial",
    "exp_jx_a",
    "exp_jz_a",
    "var_jx_a",
    "exp_jx_b",
    "exp_jz_b",
    "var_jx_b",
)

_SCENARIO_DEFAULTS = {
    "fig1_fidelity": dict(n_a=100, n_b=1, zeta_max=None, zeta_steps=201),
    "fig2_squeezing": dict(n_a=80, n_b=1, t_start=0.0, t_stop=15.0, t_steps=301),
    "fig3_qfunctions": dict(n_a=80, n_b=2, times=("0", "T/40", "T/4", "T/3", "T/2", "T")),
    "fig4_expvar": dict(
        n_a=80, n_b=2, t_start=0.0, t_stop="1.1T", t_steps=551, observables=_DEFAULT_OBSERVABLES
    ),
    "custom": dict(observables=_DEFAULT_OBSERVABLES),
}

_KEY_PARSERS = {
    "scenario": str,
    "n_a": int,
    "n_b": int,
    "zeta_abs": float,
    "zeta_phase": float,
    "coupling": float,
    "omega_a": float,
    "omega_b": float,
    "picture": str,
    "t_start": str,  # may be a T-expression
    "t_stop": str,
    "t_steps": int,
    "times": str,
    "observables": str,
    "q_theta": int,
    "q_phi": int,
    "out_format": str,
    "out_name": str,
    "zeta_max": float,
    "zeta_steps": int,
    "n_b_values": str,
}


def _parse_time_token(token, period_fn) -> float:
    """A time value: a float, or T, T/<d>, <f>*T / <f>T."""
    if isinstance(token, (int, float)):
        return float(token)
    text = str(token).strip()
    try:
        return float(text)
    except ValueError:
        pass
    expr = text.replace(" ", "")
    if "T" not in expr:
        raise ConfigError([f"cannot parse time value {token!r}"])
    T = period_fn() if callable(period_fn) else period_fn
    if expr == "T":
        return T
    if expr.startswith("T/"):
        return T / float(expr[2:])
    if expr.endswith("T"):
        head = expr[:-1].rstrip("*")
        return float(head) * T
    raise ConfigError([f"cannot parse time value {token!r}"])


def _make_observable_registry(pa, pb, psi0):
    ops = {}
    for side, params in (("a", pa), ("b", pb)):
        for label, kind in (
            ("jx", OperatorKind.JX),
            ("jy", OperatorKind.JY),
            ("jz", OperatorKind.JZ),
            ("number", OperatorKind.NUMBER),
        ):
            ops[(label, side)] = make_operator(params, kind)

    registry = {}
    for (label, side), op in ops.items():
        registry[f"exp_{label}_{side}"] = (
            lambda st, op=op, side=side: np.real(expectation(op, st, subsystem=side))
        )
        registry[f"var_{label}_{side}"] = (
            lambda st, op=op, side=side: variance(op, st, subsystem=side)
        )
    registry["chi2_a"] = lambda st: squeezing_kitagawa_ueda(st, "a").chi_squared
    registry["chi2_b"] = lambda st: squeezing_kitagawa_ueda(st, "b").chi_squared
    registry["fidelity_initial"] = lambda st: fidelity(psi0, st)
    registry["norm"] = lambda st: st.norm()
    return registry


OBSERVABLE_NAMES = tuple(
    [f"{pre}_{label}_{side}" for pre in ("exp", "var") for label in ("jx", "jy", "jz", "number") for side in "ab"]
    + ["chi2_a", "chi2_b", "fidelity_initial", "norm"]
)


def validate_config_text(text: str) -> list[ScenarioConfig]:
    """Parse and validate a config document; report every violation at once."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"config syntax: {exc}"]) from exc
    if not parser.sections():
        raise ConfigError(["config defines no scenario sections"])
    errors: list[str] = []
    configs: list[ScenarioConfig] = []
    for section in parser.sections():
        raw = dict(parser.items(section))
        cfg = _validate_section(section, raw, errors)
        if cfg is not None:
            configs.append(cfg)
    if errors:
        raise ConfigError(errors)
    return configs


def validate_config(raw) -> list[ScenarioConfig]:
    """validate_config_text, also accepting a mapping {section: {key: value}}."""
    if isinstance(raw, str):
        return validate_config_text(raw)
    buf = io.StringIO()
    for section, kv in raw.items():
        buf.write(f"[{section}]\n")
        for k, v in kv.items():
            buf.write(f"{k} = {v}\n")
    return validate_config_text(buf.getvalue())


def _validate_section(section: str, raw: dict, errors: list[str]) -> ScenarioConfig | None:
    where = lambda key: f"{section}.{key}"
    local: list[str] = []
    scenario = raw.get("scenario", "").strip()
    if scenario not in SCENARIOS:
        errors.append(f"{where('scenario')}: must be one of {', '.join(SCENARIOS)} (got {scenario!r})")
        return None

    values = dict(_SCENARIO_DEFAULTS.get(scenario, {}))
    for key, text in raw.items():
        if key == "scenario":
            continue
        if key not in _KEY_PARSERS:
            local.append(f"{where(key)}: unknown key")
            continue
        try:
            values[key] = _KEY_PARSERS[key](text)
        except ValueError:
            local.append(f"{where(key)}: cannot parse {text!r}")

    if scenario == "custom":
        for req in ("n_a", "n_b"):
            if req not in values:
                local.append(f"{where(req)}: required for custom scenarios")

    for key in ("times", "observables"):
        if isinstance(values.get(key), str):
            values[key] = tuple(tok.strip() for tok in values[key].split(",") if tok.strip())
    if isinstance(values.get("n_b_values"), str):
        try:
            values["n_b_values"] = tuple(int(tok) for tok in values["n_b_values"].split(","))
        except ValueError:
            local.append(f"{where('n_b_values')}: must be a comma list of integers")
            values["n_b_values"] = (1,)

    cfg = ScenarioConfig(
        name=section, scenario=scenario, n_a=values.pop("n_a", 1), n_b=values.pop("n_b", 1), **values
    )

    if cfg.n_a < 1:
        local.append(f"{where('n_a')}: must be >= 1 (got {cfg.n_a})")
    if cfg.n_b < 1:
        local.append(f"{where('n_b')}: must be >= 1 (got {cfg.n_b})")
    if cfg.t_steps < 1:
        local.append(f"{where('t_steps')}: must be >= 1 (got {cfg.t_steps})")
    if cfg.times is None:
        try:
            start, stop = float(cfg.t_start), float(cfg.t_stop)
        except (TypeError, ValueError):
            pass  # T-expressions are resolved against the period at run time
        else:
            if stop < start:
                local.append(f"{where('t_stop')}: must be >= t_start")
    if cfg.picture not in ("lab", "interaction"):
        local.append(f"{where('picture')}: must be lab or interaction (got {cfg.picture!r})")
    if cfg.out_format not in ("csv", "json"):
        local.append(f"{where('out_format')}: must be csv or json (got {cfg.out_format!r})")
    if cfg.q_theta < 2 or cfg.q_phi < 1:
        local.append(f"{where('q_theta')}: grid needs q_theta >= 2 and q_phi >= 1")
    for nb in cfg.n_b_values:
        if nb < 1:
            local.append(f"{where('n_b_values')}: entries must be >= 1 (got {nb})")
    bad_obs = [o for o in cfg.observables if o not in OBSERVABLE_NAMES]
    if bad_obs:
        local.append(f"{where('observables')}: unknown names {', '.join(bad_obs)}")

    if local:
        errors.extend(local)
        return None
    return cfg


@dataclass
class OutputRecord:
    """Named real columns plus the full parameter echo."""

    params: dict
    columns: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)

    def add(self, name: str, values) -> None:
        arr = np.asarray(values)
        if np.iscomplexobj(arr):
            self.columns[f"{name}_re"] = np.real(arr).ravel()
            self.columns[f"{name}_im"] = np.imag(arr).ravel()
        else:
            self.columns[name] = arr.astype(float).ravel()

    def validate(self) -> None:
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: {sorted(lengths)}")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_record(record: OutputRecord, path: str, fmt: str) -> None:
    record.validate()
    if fmt == "csv":
        lines = [f"# {key} = {value}" for key, value in sorted(record.params.items())]
        names = list(record.columns)
        lines.append(",".join(names))
        cols = [record.columns[n] for n in names]
        for row in zip(*cols) if cols else []:
            lines.append(",".join(_fmt(v) for v in row))
        payload = "\n".join(lines) + "\n"
        with open(path, "w", newline="\n") as handle:
            handle.write(payload)
    elif fmt == "json":
        doc = {
            "params": {k: (str(v) if not isinstance(v, (int, float, bool)) else v) for k, v in record.params.items()},
            "columns": {name: [_fmt(v) for v in col] for name, col in record.columns.items()},
        }
        with open(path, "w", newline="\n") as handle:
            json.dump(doc, handle, indent=1, sort_keys=True)
            handle.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            warnings.warn(f"ignoring non-integer {THREADS_ENV}={raw!r}")
    return os.cpu_count() or 1


def _ordered_map(fn, items):
    workers = _worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _param_echo(cfg: ScenarioConfig) -> dict:
    echo = {
        "scenario": cfg.scenario,
        "job": cfg.name,
        "n_a": cfg.n_a,
        "n_b": cfg.n_b,
        "zeta_abs": cfg.zeta_abs,
        "zeta_phase": cfg.zeta_phase,
        "coupling": cfg.coupling,
        "omega_a": cfg.omega_a,
        "omega_b": cfg.omega_b,
        "picture": cfg.picture,
        "q_theta": cfg.q_theta,
        "q_phi": cfg.q_phi,
        "out_format": cfg.out_format,
    }
    if cfg.scenario == "fig1_fidelity":
        echo["zeta_max"] = cfg.zeta_max if cfg.zeta_max is not None else 2 * math.sqrt(cfg.n_a)
        echo["zeta_steps"] = cfg.zeta_steps
    elif cfg.scenario == "fig2_squeezing":
        echo["n_b_values"] = ",".join(str(v) for v in cfg.n_b_values)
    if cfg.scenario != "fig1_fidelity":
        echo["times"] = ",".join(_fmt(t) for t in cfg.resolved_times())
        if cfg.coupling != 0:
            echo["period_T"] = cfg.period()
    return echo


def _exact_setup(cfg: ScenarioConfig, n_b: int | None = None):
    pa = CollectiveSpinParams(cfg.n_a)
    pb = CollectiveSpinParams(n_b if n_b is not None else cfg.n_b)
    spec = HamiltonianSpec(
        omega_a=cfg.omega_a,
        omega_b=cfg.omega_b,
        coupling=cfg.coupling,
        picture=Picture.LAB if cfg.picture == "lab" else Picture.INTERACTION,
    )
    h = build_hamiltonian(pa, pb, spec)
    psi0 = product_state(spin_coherent_state(pa, cfg.zeta), spin_coherent_state(pb, cfg.zeta))
    return pa, pb, h, psi0


def run_scenario(cfg: ScenarioConfig, out_dir: str = ".") -> OutputRecord:
    """Run one scenario and write its output file; returns the record."""
    runner = {
        "fig1_fidelity": _run_fig1,
        "fig2_squeezing": _run_fig2,
        "fig3_qfunctions": _run_fig3,
        "fig4_expvar": _run_fig4,
        "custom": _run_custom,
    }[cfg.scenario]
    record = runner(cfg)
    record.validate()
    os.makedirs(out_dir, exist_ok=True)
    out_name = cfg.out_name or f"{cfg.name}.{cfg.out_format}"
    write_record(record, os.path.join(out_dir, out_name), cfg.out_format)
    return record


def _run_fig1(cfg: ScenarioConfig) -> OutputRecord:
    # t = 0 overlap of coherent(zeta) with SCS(zeta / sqrt(N_A))
    zeta_max = cfg.zeta_max if cfg.zeta_max is not None else 2 * math.sqrt(cfg.n_a)
    zetas = np.linspace(0.0, zeta_max, cfg.zeta_steps)
    pa = CollectiveSpinParams(cfg.n_a)
    phase = np.exp(1j * cfg.zeta_phase)
    fids = []
    for z in zetas:
        coh = coherent_state(z * phase)
        scs = spin_coherent_state(pa, z * phase / math.sqrt(cfg.n_a))
        rows = min(coh.cutoff + 1, pa.dim)
        fids.append(abs(np.vdot(coh.amplitudes[:rows], scs.amplitudes[:rows])))
    fids = np.array(fids)
    record = OutputRecord(_param_echo(cfg))
    record.add("zeta_abs", zetas)
    record.add("fidelity", fids)
    below = zetas[fids < 0.99]
    record.summary.append(f"fidelity at zeta=1: {fids[np.argmin(np.abs(zetas - 1.0))]:.6f}")
    record.summary.append(
        "fidelity >= 0.99 everywhere"
        if below.size == 0
        else f"fidelity drops below 0.99 at zeta ~ {below[0]:.3f} (sqrt(N_A) = {math.sqrt(cfg.n_a):.3f})"
    )
    return record


def _run_fig2(cfg: ScenarioConfig) -> OutputRecord:
    times = cfg.resolved_times()
    record = OutputRecord(_param_echo(cfg))
    record.add("time", times)
    for nb in cfg.n_b_values:
        pa, pb, h, psi0 = _exact_setup(cfg, n_b=nb)
        chi = np.array(
            [squeezing_kitagawa_ueda(st, "a").chi_squared for st in evolve(h, psi0, times).states]
        )
        record.add(f"chi2_nb{nb}", chi)
        k = int(np.argmin(chi))
        record.summary.append(f"N_B={nb}: min chi2 = {chi[k]:.4f} at lambda*t = {times[k] * cfg.coupling:.4f}")
    return record


def _run_fig3(cfg: ScenarioConfig) -> OutputRecord:
    times = cfg.resolved_times()
    pa, pb, h, psi0 = _exact_setup(cfg)
    states = evolve(h, psi0, times).states
    fields = _ordered_map(lambda st: q_function(st, cfg.q_theta, cfg.q_phi), states)
    record = OutputRecord(_param_echo(cfg))
    theta_grid, phi_grid = np.meshgrid(fields[0].thetas, fields[0].phis, indexing="ij")
    record.add("theta", theta_grid)
    record.add("phi", phi_grid)
    for k, (t, fld) in enumerate(zip(times, fields)):
        record.add(f"q_t{k}", fld.values)
        record.summary.append(
            f"t={t:.4f}: max Q = {fld.values.max():.4f}, fidelity with initial = {fidelity(psi0, states[k]):.4f}"
        )
    return record


def _run_fig4(cfg: ScenarioConfig) -> OutputRecord:
    times = cfg.resolved_times()
    pa, pb, h, psi0 = _exact_setup(cfg)
    states = evolve(h, psi0, times).states
    registry = _make_observable_registry(pa, pb, psi0)
    record = OutputRecord(_param_echo(cfg))
    record.add("time", times)
    names = cfg.observables or _DEFAULT_OBSERVABLES
    for name in names:
        record.add(name, np.array([registry[name](st) for st in states]))
    for name in ("var_jx_a", "var_jx_b"):
        if name in record.columns:
            col = record.columns[name]
            k = int(np.argmax(col))
            record.summary.append(f"peak {name} = {col[k]:.4f} at lambda*t = {times[k] * cfg.coupling:.4f}")
    if "fidelity_initial" in record.columns:
        col = record.columns["fidelity_initial"]
        k = int(np.argmax(col[len(col) // 2 :])) + len(col) // 2 if len(col) > 1 else 0
        record.summary.append(f"late-time revival fidelity peak = {col[k]:.4f} at lambda*t = {times[k] * cfg.coupling:.4f}")
    return record


def _run_custom(cfg: ScenarioConfig) -> OutputRecord:
    times = cfg.resolved_times()
    pa, pb, h, psi0 = _exact_setup(cfg)
    states = evolve(h, psi0, times).states
    registry = _make_observable_registry(pa, pb, psi0)
    record = OutputRecord(_param_echo(cfg))
    record.add("time", times)
    for name in cfg.observables or _DEFAULT_OBSERVABLES:
        record.add(name, np.array([registry[name](st) for st in states]))
    last = {name: record.columns[name][-1] for name in record.columns if name != "time"}
    record.summary.append(
        "final values: " + ", ".join(f"{k}={v:.6g}" for k, v in sorted(last.items()))
    )
    return record
