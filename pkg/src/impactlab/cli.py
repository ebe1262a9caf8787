"""Command-line front end: YAML scenario configs in, deterministic CSVs out.

Subcommands mirror the scenario modes: ``levy-sim``, ``markov-fields``,
``shockwave``, ``dp-value``, ``convergence``, ``verify``.  Every config
carries ``schema_version: 1``; field problems are reported as a ConfigError
naming the offending dotted path, before any computation starts, and exit
with status 2.  Computation-stage errors exit 3 with a machine-readable
JSON record on stderr; ``verify`` exits 1 when any invariant fails.

CSV output uses a header row, '.' decimal separator, 17 significant digits
for reals, and LF line endings, so reruns with the same config and seed
are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml

from . import __version__
from .cumulants import Brownian, GammaProcess, OneSidedStable
from .dp import DpScenario, Lattice, convergence_study, emm_eipu, no_rebalance_check, value_recursion
from .efficient import LevyScenario, allocation_value, efficient_path_record
from .errors import (
    ConfigError,
    DomainError,
    NoRootError,
    NonDifferentiableError,
    ParameterError,
    PreconditionError,
    QuadratureError,
    ScheduleError,
)
from .markov import (
    MarkovPayoffs,
    QuadraticModel,
    ShockWaveModel,
    field_p,
    field_q,
    field_u,
    field_v,
    quadratic_closed_forms,
    shockwave_path,
    shockwave_price,
    shockwave_strategy,
)
from .paths import PathGrid, ShockSchedule, simulate_batch
from .utility import AgentPair
from .verification import run_all

SCHEMA_VERSION = 1

_MODULE_ERRORS = (
    ParameterError,
    DomainError,
    ScheduleError,
    QuadratureError,
    NoRootError,
    PreconditionError,
    NonDifferentiableError,
    OverflowError,
)

_REQUIRED = object()


# ---------------------------------------------------------------------------
# config access


class Section:
    """Mapping wrapper that reports problems with dotted field paths."""

    def __init__(self, data, prefix: str = ""):
        name = prefix or "<root>"
        if not isinstance(data, dict):
            raise ConfigError(name, "must be a mapping")
        self.data = data
        self.prefix = prefix

    def path(self, name: str) -> str:
        return f"{self.prefix}.{name}" if self.prefix else name

    def require_keys(self, allowed):
        for key in self.data:
            if key not in allowed:
                raise ConfigError(self.path(str(key)), "unknown field")

    def section(self, name: str, required: bool = True) -> "Section":
        if name not in self.data:
            if required:
                raise ConfigError(self.path(name), "required section is missing")
            return Section({}, self.path(name))
        return Section(self.data[name], self.path(name))

    def _fetch(self, name: str, default):
        if name in self.data:
            return self.data[name]
        if default is _REQUIRED:
            raise ConfigError(self.path(name), "required field is missing")
        return default

    def number(
        self,
        name: str,
        default=_REQUIRED,
        minimum: Optional[float] = None,
        maximum: Optional[float] = None,
        exclusive_min: bool = False,
        exclusive_max: bool = False,
        allow_inf: bool = False,
        nonzero: bool = False,
    ) -> float:
        raw = self._fetch(name, default)
        if isinstance(raw, str) and allow_inf and raw.lower() in ("inf", "infinity"):
            raw = math.inf
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(self.path(name), "must be a number")
        value = float(raw)
        if math.isnan(value):
            raise ConfigError(self.path(name), "must not be NaN")
        if math.isinf(value) and not allow_inf:
            raise ConfigError(self.path(name), "must be finite")
        if minimum is not None:
            if exclusive_min and not value > minimum:
                raise ConfigError(self.path(name), f"must be > {minimum}")
            if not exclusive_min and not value >= minimum:
                raise ConfigError(self.path(name), f"must be >= {minimum}")
        if maximum is not None:
            if exclusive_max and not value < maximum:
                raise ConfigError(self.path(name), f"must be < {maximum}")
            if not exclusive_max and not value <= maximum:
                raise ConfigError(self.path(name), f"must be <= {maximum}")
        if nonzero and value == 0.0:
            raise ConfigError(self.path(name), "must be nonzero")
        return value

    def integer(
        self,
        name: str,
        default=_REQUIRED,
        minimum: Optional[int] = None,
        maximum: Optional[int] = None,
    ) -> int:
        raw = self._fetch(name, default)
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(self.path(name), "must be an integer")
        if minimum is not None and raw < minimum:
            raise ConfigError(self.path(name), f"must be >= {minimum}")
        if maximum is not None and raw > maximum:
            raise ConfigError(self.path(name), f"must be <= {maximum}")
        return int(raw)

    def string(self, name: str, default=_REQUIRED, choices=None) -> str:
        raw = self._fetch(name, default)
        if not isinstance(raw, str):
            raise ConfigError(self.path(name), "must be a string")
        if choices is not None and raw not in choices:
            raise ConfigError(
                self.path(name), f"must be one of {', '.join(sorted(choices))}"
            )
        return raw

    def boolean(self, name: str, default=_REQUIRED) -> bool:
        raw = self._fetch(name, default)
        if not isinstance(raw, bool):
            raise ConfigError(self.path(name), "must be a boolean")
        return bool(raw)

    def number_list(self, name: str, default=_REQUIRED) -> List[float]:
        raw = self._fetch(name, default)
        if not isinstance(raw, (list, tuple)):
            raise ConfigError(self.path(name), "must be a list of numbers")
        out = []
        for i, item in enumerate(raw):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{self.path(name)}[{i}]", "must be a number")
            value = float(item)
            if not math.isfinite(value):
                raise ConfigError(f"{self.path(name)}[{i}]", "must be finite")
            out.append(value)
        return out

    def integer_list(self, name: str, default=_REQUIRED) -> List[int]:
        raw = self._fetch(name, default)
        if not isinstance(raw, (list, tuple)):
            raise ConfigError(self.path(name), "must be a list of integers")
        out = []
        for i, item in enumerate(raw):
            if isinstance(item, bool) or not isinstance(item, int):
                raise ConfigError(f"{self.path(name)}[{i}]", "must be an integer")
            out.append(int(item))
        return out


def _load_config(path: Optional[str], mode: str) -> Section:
    if path is None:
        raise ConfigError("config", f"mode {mode!r} requires --config")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"invalid YAML: {exc}") from exc
    root = Section(data if data is not None else {}, "")
    version = root.integer("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"must be {SCHEMA_VERSION}, got {version}")
    declared = root.string("mode", default=mode)
    if declared != mode:
        raise ConfigError("mode", f"config declares {declared!r} but subcommand is {mode!r}")
    return root


# ---------------------------------------------------------------------------
# shared builders


def _agents(root: Section) -> AgentPair:
    sec = root.section("agents")
    sec.require_keys({"gamma", "c"})
    gamma = sec.number("gamma", minimum=0.0)
    c = sec.number("c", minimum=0.0, exclusive_min=True, allow_inf=True)
    return AgentPair(gamma=gamma, c=c)


def _levy_model(root: Section):
    sec = root.section("model")
    family = sec.string("family", choices=("brownian", "gamma", "stable"))
    if family == "brownian":
        sec.require_keys({"family", "b", "sigma"})
        return Brownian(b=sec.number("b"), sigma=sec.number("sigma", minimum=0.0))
    if family == "gamma":
        sec.require_keys({"family", "alpha", "beta"})
        return GammaProcess(
            alpha=sec.number("alpha", minimum=0.0, exclusive_min=True),
            beta=sec.number("beta", minimum=0.0, exclusive_min=True),
        )
    sec.require_keys({"family", "r", "alpha"})
    return OneSidedStable(
        r=sec.number("r", minimum=0.0, exclusive_min=True),
        alpha=sec.number(
            "alpha", minimum=0.0, maximum=1.0, exclusive_min=True, exclusive_max=True
        ),
    )


def _schedule(root: Section) -> ShockSchedule:
    sec = root.section("schedule", required=False)
    sec.require_keys({"initial_value", "h", "shocks"})
    initial = sec.number("initial_value", default=0.0)
    h = sec.number("h", default=0.0)
    raw = sec.data.get("shocks", [])
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(sec.path("shocks"), "must be a list of [time, jump] pairs")
    shocks = []
    last = 0.0
    for i, item in enumerate(raw):
        field = f"{sec.path('shocks')}[{i}]"
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ConfigError(field, "must be a [time, jump] pair")
        time, jump = item
        for label, value in (("time", time), ("jump", jump)):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(field, f"{label} must be a number")
        time, jump = float(time), float(jump)
        if not (0.0 < time < 1.0):
            raise ConfigError(field, "shock time must lie strictly inside (0, 1)")
        if time <= last:
            raise ConfigError(field, "shock times must be strictly increasing")
        if not math.isfinite(jump):
            raise ConfigError(field, "shock jump must be finite")
        last = time
        shocks.append((time, jump))
    return ShockSchedule(initial_value=initial, shocks=tuple(shocks), h=h)


def _quadratic_model(sec: Section, agents: AgentPair) -> QuadraticModel:
    sec.require_keys({"kind", "g_load", "mu", "sigma", "a_lin", "b_quad", "h_const"})
    b_quad = sec.number("b_quad", default=0.0)
    abar = agents.aggregate_aversion
    if 1.0 + abar * b_quad <= 0.0:
        raise ConfigError(
            sec.path("b_quad"),
            f"needs 1 + abar*b_quad > 0 at aggregate aversion {abar}",
        )
    return QuadraticModel(
        g_load=sec.number("g_load", default=0.0),
        mu=sec.number("mu", default=0.0),
        sigma=sec.number("sigma", nonzero=True),
        a_lin=sec.number("a_lin", default=0.0),
        b_quad=b_quad,
        agents=agents,
        h_const=sec.number("h_const", default=0.0),
    )


def _shockwave_model(sec: Section, agents: AgentPair) -> ShockWaveModel:
    sec.require_keys({"kind", "mu", "sigma", "w_c", "offset"})
    if agents.aggregate_aversion <= 0.0:
        raise ConfigError(
            "agents.gamma", "shock-wave model needs strictly positive aggregate aversion"
        )
    return ShockWaveModel(
        mu=sec.number("mu", default=0.0),
        sigma=sec.number("sigma", minimum=0.0, exclusive_min=True),
        w_c=sec.number("w_c"),
        agents=agents,
        offset=sec.number("offset", default=0.0),
    )


def _black_scholes_payoffs(sec: Section, agents: AgentPair) -> MarkovPayoffs:
    sec.require_keys({"kind", "zeta", "sigma", "alpha", "mu"})
    zeta = sec.number("zeta", minimum=0.0, exclusive_min=True)
    sigma = sec.number("sigma", minimum=0.0, exclusive_min=True)
    alpha = sec.number("alpha")
    mu = sec.number("mu", default=0.0)
    gamma, c = agents.gamma, agents.c
    # the total book G + H is alpha*sigma*W_1; the split puts gamma/(c+gamma)
    # of it plus a -mu/(c+gamma) security leg on the demander side, which
    # makes the constant y* = mu/(c+gamma) the proportional-endowment root
    frac = 0.0 if math.isinf(c) else gamma / (c + gamma)
    lever = 0.0 if math.isinf(c) else mu / (c + gamma)

    def s_fn(w):
        return zeta * np.exp(sigma * np.asarray(w, dtype=float))

    def h_fn(w):
        w = np.asarray(w, dtype=float)
        return frac * alpha * sigma * w - lever * zeta * np.exp(sigma * w)

    def g_fn(w):
        w = np.asarray(w, dtype=float)
        return alpha * sigma * w - h_fn(w)

    return MarkovPayoffs(s_fn=s_fn, g_fn=g_fn, h_fn=h_fn, agents=agents)


def _dp_payoffs(root: Section, agents: AgentPair, kinds) -> MarkovPayoffs:
    sec = root.section("model")
    kind = sec.string("kind", choices=kinds)
    if kind == "quadratic":
        return _quadratic_model(sec, agents).payoffs()
    if kind == "shockwave":
        return _shockwave_model(sec, agents).payoffs()
    return _black_scholes_payoffs(sec, agents)


def _dp_scenario(root: Section, agents: AgentPair, lattice_n: int) -> DpScenario:
    adm = root.section("admissible")
    adm.require_keys({"lo", "hi"})
    lo = adm.number("lo")
    hi = adm.number("hi")
    if not lo < hi:
        raise ConfigError("admissible.hi", "must exceed admissible.lo")
    if not lo <= 0.0 <= hi:
        raise ConfigError("admissible.lo", "interval must contain 0")
    resolution = root.number("y_resolution", default=1e-3, minimum=0.0, exclusive_min=True)
    if (hi - lo) / resolution > 2e6:
        raise ConfigError("y_resolution", "scan grid would exceed 2e6 points")
    payoffs = _dp_payoffs(root, agents, ("quadratic", "shockwave", "black-scholes"))
    return DpScenario(Lattice(lattice_n), payoffs, (lo, hi), resolution)


def _quad_order(root: Section) -> int:
    order = root.integer("order", default=128, minimum=2)
    try:
        from .markov import _rules

        _rules(order)
    except QuadratureError as exc:
        raise ConfigError("order", str(exc)) from exc
    return order


# ---------------------------------------------------------------------------
# CSV emission


def _csv_field(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            value = 0.0  # fold -0.0
        return format(value, ".17g")
    return str(value)


def emit_csv(path: Path, header: Sequence[str], rows) -> None:
    """Header + rows, 17 significant digits, LF endings, byte-stable."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_csv_field(v) for v in row])


def _note(quiet: bool, message: str) -> None:
    if not quiet:
        print(message)


def _out_dir(root: Section, args) -> Path:
    configured = root.string("out", default=".")
    out = Path(args.out) if args.out is not None else Path(configured)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _path_width(n_paths: int) -> int:
    return max(3, len(str(n_paths - 1)))


def _int_setting(flag_value, flag_name, root, field, default, minimum) -> int:
    """Command-line override if given, else the config field."""
    if flag_value is not None:
        if flag_value < minimum:
            raise ConfigError(flag_name, f"must be >= {minimum}")
        return int(flag_value)
    return root.integer(field, default=default, minimum=minimum)


# ---------------------------------------------------------------------------
# mode runners


def _run_levy_sim(args) -> int:
    root = _load_config(args.config, "levy-sim")
    root.require_keys(
        {"schema_version", "mode", "seed", "paths", "grid", "out", "agents",
         "loading", "model", "schedule"}
    )
    agents = _agents(root)
    model = _levy_model(root)
    schedule = _schedule(root)
    loading = root.number("loading")
    seed = _int_setting(args.seed, "--seed", root, "seed", _REQUIRED, 0)
    n_paths = _int_setting(args.paths, "--paths", root, "paths", 1, 1)
    n_steps = _int_setting(args.grid, "--grid", root, "grid", 256, 1)

    gamma, abar = agents.gamma, agents.aggregate_aversion
    if gamma > 0.0 and not model.domain_contains(gamma * loading):
        raise ConfigError(
            "loading", f"gamma*loading = {gamma * loading} leaves the cumulant domain"
        )
    for i, level in enumerate(schedule.levels()):
        if abar > 0.0 and not model.domain_contains(abar * (loading + level)):
            field = "schedule.initial_value" if i == 0 else f"schedule.shocks[{i - 1}]"
            raise ConfigError(
                field,
                f"aggregate exposure {abar * (loading + level)} leaves the cumulant domain",
            )

    grid = PathGrid(n_steps)
    try:
        schedule.series(grid)
    except ScheduleError as exc:
        raise ConfigError("schedule.shocks", str(exc)) from exc
    scenario = LevyScenario(model, agents, loading, schedule, grid)

    out = _out_dir(root, args)
    width = _path_width(n_paths)
    batch = simulate_batch(model, grid, schedule, seed, n_paths)
    alloc = allocation_value(scenario)
    summary = []
    for k, path in enumerate(batch):
        record = efficient_path_record(scenario, path)
        target = out / f"levy_path_{k:0{width}d}.csv"
        emit_csv(
            target,
            ("t", "x", "h_prime", "y_star", "s_star", "risk_premium", "convexity"),
            zip(
                record.times,
                record.x,
                record.h_prime,
                record.y_star,
                record.s_star,
                record.risk_premium,
                record.convexity,
            ),
        )
        _note(args.quiet, f"wrote {target}")
        summary.append(
            (k, record.endowment_payoff, record.trading_pnl, record.terminal_wealth, alloc)
        )
    target = out / "levy_summary.csv"
    emit_csv(
        target,
        ("path", "endowment_payoff", "trading_pnl", "terminal_wealth", "allocation_value"),
        summary,
    )
    _note(args.quiet, f"wrote {target}")
    return 0


def _run_markov_fields(args) -> int:
    root = _load_config(args.config, "markov-fields")
    root.require_keys(
        {"schema_version", "mode", "out", "agents", "model", "times", "w",
         "order", "inventory"}
    )
    agents = _agents(root)
    order = _quad_order(root)
    inventory = root.number("inventory", default=0.0)
    times = root.number_list("times")
    if not times:
        raise ConfigError("times", "must not be empty")
    for i, t in enumerate(times):
        if not 0.0 <= t < 1.0:
            raise ConfigError(f"times[{i}]", "must lie in [0, 1)")
    wsec = root.section("w")
    wsec.require_keys({"min", "max", "count"})
    w_min = wsec.number("min")
    w_max = wsec.number("max")
    if w_min > w_max:
        raise ConfigError("w.max", "must be >= w.min")
    count = _int_setting(args.grid, "--grid", wsec, "count", _REQUIRED, 1)

    sec = root.section("model")
    kind = sec.string("kind", choices=("quadratic", "shockwave"))
    if kind == "quadratic":
        model = _quadratic_model(sec, agents)
        payoffs = model.payoffs()

        def closed(t, w):
            forms = quadratic_closed_forms(model, t, w)
            return forms.y_star, forms.s_star

    else:
        model = _shockwave_model(sec, agents)
        payoffs = model.payoffs()

        def closed(t, w):
            return float(shockwave_strategy(model, t, w)), float(shockwave_price(model, t, w))

    rows = []
    for t in times:
        for w in np.linspace(w_min, w_max, count):
            w = float(w)
            y_star, s_star = closed(t, w)
            rows.append(
                (
                    t,
                    w,
                    field_v(payoffs, t, w, order),
                    field_u(payoffs, t, w, order),
                    field_p(payoffs, t, w, inventory, order),
                    field_q(payoffs, t, w, inventory, order),
                    y_star,
                    s_star,
                )
            )
    out = _out_dir(root, args)
    target = out / "markov_fields.csv"
    emit_csv(target, ("t", "w", "v", "u", "p", "q", "y_star", "s_star"), rows)
    _note(args.quiet, f"wrote {target}")
    return 0


def _run_shockwave(args) -> int:
    root = _load_config(args.config, "shockwave")
    root.require_keys(
        {"schema_version", "mode", "seed", "paths", "grid", "out", "agents", "model"}
    )
    agents = _agents(root)
    sec = root.section("model")
    if "kind" in sec.data and sec.string("kind") != "shockwave":
        raise ConfigError("model.kind", "must be 'shockwave' in shockwave mode")
    sec.data.setdefault("kind", "shockwave")
    model = _shockwave_model(sec, agents)
    seed = _int_setting(args.seed, "--seed", root, "seed", _REQUIRED, 0)
    n_paths = _int_setting(args.paths, "--paths", root, "paths", 1, 1)
    n_steps = _int_setting(args.grid, "--grid", root, "grid", 1000, 1)

    grid = PathGrid(n_steps)
    driver = Brownian(b=0.0, sigma=1.0)
    out = _out_dir(root, args)
    width = _path_width(n_paths)
    for k, path in enumerate(simulate_batch(driver, grid, ShockSchedule(), seed, n_paths)):
        record = shockwave_path(model, path, grid)
        target = out / f"shockwave_path_{k:0{width}d}.csv"
        emit_csv(
            target,
            ("t", "W", "S_star", "Y_star", "wave_position"),
            zip(record.times, record.w, record.s_star, record.y_star, record.wave_position),
        )
        _note(args.quiet, f"wrote {target}")
    return 0


def _run_dp_value(args) -> int:
    root = _load_config(args.config, "dp-value")
    root.require_keys(
        {"schema_version", "mode", "out", "agents", "model", "lattice_n",
         "admissible", "y_resolution", "refine", "buy_and_hold", "emm_root"}
    )
    agents = _agents(root)
    lattice_n = _int_setting(args.grid, "--grid", root, "lattice_n", _REQUIRED, 1)
    refine = root.boolean("refine", default=True)
    scenario = _dp_scenario(root, agents, lattice_n)

    result = value_recursion(scenario, refine=refine)
    out = _out_dir(root, args)
    target = out / "dp_value.csv"
    emit_csv(
        target,
        ("n", "value", "root_policy", "pi0_g"),
        [(lattice_n, result.value, float(result.policies[0][0]), result.pi0_g)],
    )
    _note(args.quiet, f"wrote {target}")

    if root.boolean("buy_and_hold", default=False):
        report = no_rebalance_check(scenario, refine=refine)
        target = out / "dp_buy_and_hold.csv"
        emit_csv(
            target,
            ("y_star", "is_buy_and_hold", "value_gap", "max_policy_deviation"),
            [(report.y_star, report.is_buy_and_hold, report.value_gap,
              report.max_policy_deviation)],
        )
        _note(args.quiet, f"wrote {target}")

    if root.boolean("emm_root", default=False):
        target = out / "dp_emm.csv"
        emit_csv(target, ("n", "s_star_root"), [(lattice_n, emm_eipu(scenario, 0, 0))])
        _note(args.quiet, f"wrote {target}")
    return 0


def _run_convergence(args) -> int:
    root = _load_config(args.config, "convergence")
    root.require_keys(
        {"schema_version", "mode", "out", "agents", "model", "n_list",
         "admissible", "y_resolution", "refine", "order", "limit"}
    )
    agents = _agents(root)
    n_list = root.integer_list("n_list")
    if not n_list:
        raise ConfigError("n_list", "must not be empty")
    for i, n in enumerate(n_list):
        if n < 1:
            raise ConfigError(f"n_list[{i}]", "must be >= 1")
        if i > 0 and n <= n_list[i - 1]:
            raise ConfigError(f"n_list[{i}]", "must be strictly increasing")
    order = _quad_order(root)
    refine = root.boolean("refine", default=True)
    limit = None
    if root.data.get("limit") is not None:
        limit = root.number("limit")
    scenario = _dp_scenario(root, agents, n_list[0])

    table = convergence_study(scenario, n_list, limit=limit, refine=refine, order=order)
    out = _out_dir(root, args)
    target = out / "convergence.csv"
    emit_csv(target, ("n", "value", "error"), [(r.n, r.value, r.error) for r in table])
    _note(args.quiet, f"wrote {target}")
    return 0


def _run_verify(args) -> int:
    passed, failed = run_all(quiet=args.quiet)
    return 0 if failed == 0 else 1


_RUNNERS = {
    "levy-sim": _run_levy_sim,
    "markov-fields": _run_markov_fields,
    "shockwave": _run_shockwave,
    "dp-value": _run_dp_value,
    "convergence": _run_convergence,
    "verify": _run_verify,
}

_MODE_HELP = {
    "levy-sim": "simulate factor paths and the closed-form efficient market along them",
    "markov-fields": "tabulate the quadrature value/price fields on a (t, w) grid",
    "shockwave": "emit traveling-wave market paths (t, W, S_star, Y_star, wave_position)",
    "dp-value": "run the lattice value recursion for one scenario",
    "convergence": "lattice-vs-closed-form convergence table over several n",
    "verify": "run the built-in invariant suite",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impactlab",
        description="Deterministic scenario runner for the impactlab library.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, help_text in _MODE_HELP.items():
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("--config", help="YAML scenario config (schema_version: 1)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--paths", type=int, help="override the path count")
        p.add_argument("--grid", type=int, help="override the grid/lattice size")
        p.add_argument("--quiet", action="store_true", help="suppress progress lines")
    return parser


def _error_record(exc: Exception) -> dict:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        record["field"] = exc.field
    return record


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _RUNNERS[args.mode](args)
    except ConfigError as exc:
        json.dump(_error_record(exc), sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return 2
    except _MODULE_ERRORS as exc:
        json.dump(_error_record(exc), sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return 3
    except OSError as exc:
        json.dump(_error_record(exc), sys.stderr, sort_keys=True)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
