"""YAML experiment configuration with line-numbered diagnostics.

Every section is validated before any computation starts and unknown keys
are rejected.  A minimal configuration::

    system:
      id: impulsive_circle
    potential:
      kind: fourier
      terms: [[1, 0.0, 1.0]]
      jump_compatible: true
    schedule:
      T_list: [20, 40, 80]
      eps_list: [0.05, 0.02]
      delta_list: [0.1, 0.05]
      grid: {kind: regular, n: 800}
    kinds: [bar_s, bar_r, hat_s, hat_r]
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ImpulsivePressureError, InvalidInputError
from .flows import OdeField, RotationCircle, SuspensionDoubling, TranslationInterval
from .geometry import Space, regular_grid, section_grid
from .impulsive import ImpulsiveSystem
from .potentials import Constant, FourierCircle, Potential, Tabulated
from .pressure import EstimatorKind, Schedule
from .systems import SHIPPED_SYSTEMS, get_system

SUITES = ("continuous-coincidence", "inequalities", "variational", "quotient", "conditions")


class ConfigError(InvalidInputError):
    """Invalid configuration; the message carries file, line and field."""


class _Doc:
    """Plain data plus the source line of every node, keyed by field path."""

    def __init__(self, path: str, text: str):
        self.path = path
        self.lines: dict[tuple, int] = {}
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"{path}:{mark.line + 1}" if mark is not None else path
            raise ConfigError(f"{where}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
        if node is not None:
            self._index(node, ())
        if self.data is None:
            self.data = {}

    def _index(self, node, key):
        self.lines[key] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            seen = set()
            for k, v in node.value:
                if k.value in seen:
                    raise ConfigError(f"{self.path}:{k.start_mark.line + 1}: duplicate key {k.value!r}")
                seen.add(k.value)
                self._index(v, key + (k.value,))
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._index(v, key + (i,))

    def error(self, key: tuple, msg: str) -> ConfigError:
        probe = key
        while probe not in self.lines and probe:
            probe = probe[:-1]
        line = self.lines.get(probe, 1)
        name = ".".join(str(k) for k in key) or "<root>"
        return ConfigError(f"{self.path}:{line}: field '{name}': {msg}")


class _Reader:
    def __init__(self, doc: _Doc):
        self.doc = doc

    def section(self, data, key, allowed, required=()):
        if not isinstance(data, dict):
            raise self.doc.error(key, "expected a mapping")
        for k in data:
            if k not in allowed:
                raise self.doc.error(key + (k,), f"unknown key (allowed: {', '.join(allowed)})")
        for k in required:
            if k not in data:
                raise self.doc.error(key, f"missing required key {k!r}")
        return data

    def number(self, data, key, name, default=None, positive=False, integer=False):
        if name not in data or data[name] is None:
            if default is None:
                raise self.doc.error(key, f"missing required key {name!r}")
            return default
        v = data[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise self.doc.error(key + (name,), f"expected a number, got {v!r}")
        if integer and int(v) != v:
            raise self.doc.error(key + (name,), f"expected an integer, got {v!r}")
        if positive and not v > 0:
            raise self.doc.error(key + (name,), f"must be positive, got {v!r}")
        return int(v) if integer else float(v)

    def numbers(self, data, key, name, required=True):
        if name not in data:
            if required:
                raise self.doc.error(key, f"missing required key {name!r}")
            return None
        v = data[name]
        if not isinstance(v, list):
            v = [v]
        for i, x in enumerate(v):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise self.doc.error(key + (name, i), f"expected a number, got {x!r}")
        return [float(x) for x in v]

    def string(self, data, key, name, choices=None, default=None):
        if name not in data:
            if default is None:
                raise self.doc.error(key, f"missing required key {name!r}")
            return default
        v = data[name]
        if not isinstance(v, str):
            raise self.doc.error(key + (name,), f"expected a string, got {v!r}")
        if choices is not None and v not in choices:
            raise self.doc.error(key + (name,), f"{v!r} is not one of {', '.join(choices)}")
        return v


@dataclass
class SimulateSpec:
    x0: list
    T: float
    dt: float


@dataclass
class ExperimentConfig:
    system: ImpulsiveSystem
    system_id: str | None
    potential: Potential
    schedule_spec: dict | None
    kinds: list
    simulate: SimulateSpec | None
    seed: int = 0
    threads: int = 1
    outputs: dict = field(default_factory=dict)
    verify: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)
    source: str = "<defaults>"

    def schedule(self) -> Schedule:
        if self.schedule_spec is None:
            raise ConfigError(f"{self.source}: field 'schedule': required for this command")
        s = self.schedule_spec
        space = self.system.space
        grid = (section_grid if s["grid_kind"] == "section" else regular_grid)(space, s["grid_n"])
        try:
            return Schedule(tuple(s["T_list"]), tuple(s["eps_list"]), tuple(s["delta_list"]), grid,
                            m=s["m"], dt=s["dt"])
        except InvalidInputError as exc:
            raise ConfigError(f"{self.source}: field 'schedule': {exc}") from None

    def header(self) -> dict:
        """Everything needed to reproduce an output, for comment headers."""
        return {"config": json.dumps(self.raw, sort_keys=True), "seed": self.seed,
                "system": json.dumps(self.system.describe(), sort_keys=True),
                "potential": json.dumps(self.potential.to_dict(), sort_keys=True)}


DEFAULT_OUTPUTS = {"trajectory": "trajectory.csv", "table": "pressure.csv",
                   "summary": "summary.json", "plotdata": "plotdata.csv"}


def _space(r: _Reader, d, key) -> Space:
    r.section(d, key, ("kind", "low", "high", "roof"), ("kind",))
    kind = r.string(d, key, "kind", ("circle", "interval", "torus2", "suspension_doubling"))
    if kind == "interval":
        lo, hi = r.number(d, key, "low", 0.0), r.number(d, key, "high", 1.0)
        if not hi > lo:
            raise r.doc.error(key, "interval needs high > low")
        return Space.interval(lo, hi)
    if kind == "suspension_doubling":
        return Space.suspension(r.number(d, key, "roof", 1.0, positive=True))
    return Space(kind)


def _flow(r: _Reader, d, key, space: Space):
    r.section(d, key, ("kind", "speed", "field", "params", "step"), ("kind",))
    kind = r.string(d, key, "kind", ("rotation", "translation", "suspension", "ode"))
    try:
        if kind == "rotation":
            if space.kind.value != "circle":
                raise r.doc.error(key + ("kind",), "rotation flows live on the circle")
            return RotationCircle(r.number(d, key, "speed", 1.0), space)
        if kind == "translation":
            return TranslationInterval(r.number(d, key, "speed", 1.0), space)
        if kind == "suspension":
            return SuspensionDoubling(space)
        params = d.get("params", {}) or {}
        if not isinstance(params, dict):
            raise r.doc.error(key + ("params",), "expected a mapping")
        return OdeField(r.string(d, key, "field", default="constant"), params,
                        r.number(d, key, "step", 0.01, positive=True), space)
    except ConfigError:
        raise
    except InvalidInputError as exc:
        raise r.doc.error(key, str(exc)) from None


def _system(r: _Reader, d, key):
    if not isinstance(d, dict):
        raise r.doc.error(key, "expected a mapping")
    if "id" in d:
        r.section(d, key, ("id", "params"))
        sid = r.string(d, key, "id", tuple(SHIPPED_SYSTEMS))
        params = d.get("params") or {}
        if not isinstance(params, dict):
            raise r.doc.error(key + ("params",), "expected a mapping")
        try:
            return get_system(sid, **params), sid
        except TypeError as exc:
            raise r.doc.error(key + ("params",), str(exc)) from None
        except InvalidInputError as exc:
            raise r.doc.error(key + ("params",), str(exc)) from None
    r.section(d, key, ("name", "space", "flow", "jumps", "xi", "event_tol", "capture_radius"),
              ("space", "flow"))
    space = _space(r, d["space"], key + ("space",))
    flow = _flow(r, d["flow"], key + ("flow",), space)
    jumps = d.get("jumps") or []
    if not isinstance(jumps, list):
        raise r.doc.error(key + ("jumps",), "expected a list of {at, to} entries")
    at, to = [], []
    for i, j in enumerate(jumps):
        jk = key + ("jumps", i)
        r.section(j, jk, ("at", "to"), ("at", "to"))
        for name, dest in (("at", at), ("to", to)):
            v = r.numbers(j, jk, name)
            try:
                dest.append(space.normalize(v))
            except InvalidInputError as exc:
                raise r.doc.error(jk + (name,), str(exc)) from None
    xi = r.number(d, key, "xi", 0.1, positive=True)
    tol = r.number(d, key, "event_tol", xi / 4, positive=True)
    cap = d.get("capture_radius")
    if cap is not None:
        cap = r.number(d, key, "capture_radius", positive=True)
    name = r.string(d, key, "name", default="custom")
    try:
        sys = ImpulsiveSystem.build(flow, at or None, to or None, xi=xi, event_tol=tol,
                                    capture_radius=cap, name=name)
    except InvalidInputError as exc:
        raise r.doc.error(key, str(exc)) from None
    return sys, (name if name in SHIPPED_SYSTEMS else None)


def _potential(r: _Reader, d, key) -> Potential:
    if d is None:
        return Constant(0.0)
    r.section(d, key, ("kind", "c", "terms", "constant", "jump_compatible", "nodes", "values", "periodic"),
              ("kind",))
    kind = r.string(d, key, "kind", ("constant", "fourier", "tabulated"))
    jc = d.get("jump_compatible", False)
    if not isinstance(jc, bool):
        raise r.doc.error(key + ("jump_compatible",), "expected true or false")
    if kind == "constant":
        r.section(d, key, ("kind", "c"))
        return Constant(r.number(d, key, "c", 0.0))
    if kind == "fourier":
        r.section(d, key, ("kind", "terms", "constant", "jump_compatible"))
        terms = d.get("terms", [])
        if not isinstance(terms, list):
            raise r.doc.error(key + ("terms",), "expected a list of [k, a, b] triples")
        out = []
        for i, t in enumerate(terms):
            if (not isinstance(t, list) or len(t) != 3
                    or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in t)):
                raise r.doc.error(key + ("terms", i), "expected a [k, a, b] triple of numbers")
            if int(t[0]) != t[0] or t[0] < 1:
                raise r.doc.error(key + ("terms", i, 0), "frequency must be an integer >= 1")
            out.append((int(t[0]), float(t[1]), float(t[2])))
        return FourierCircle(tuple(out), r.number(d, key, "constant", 0.0), jc)
    r.section(d, key, ("kind", "nodes", "values", "periodic", "jump_compatible"), ("nodes", "values"))
    periodic = d.get("periodic", True)
    if not isinstance(periodic, bool):
        raise r.doc.error(key + ("periodic",), "expected true or false")
    try:
        return Tabulated(np.array(r.numbers(d, key, "nodes")), np.array(r.numbers(d, key, "values")),
                         periodic, jc)
    except InvalidInputError as exc:
        raise r.doc.error(key, str(exc)) from None


def _schedule(r: _Reader, d, key) -> dict:
    r.section(d, key, ("T_list", "eps_list", "delta_list", "grid", "m", "dt"),
              ("T_list", "eps_list", "delta_list", "grid"))
    spec = {}
    for name, inc in (("T_list", True), ("eps_list", False), ("delta_list", False)):
        v = r.numbers(d, key, name)
        if not v:
            raise r.doc.error(key + (name,), "must not be empty")
        if any(not x > 0 for x in v):
            raise r.doc.error(key + (name,), "entries must be positive")
        ok = all(a < b for a, b in zip(v, v[1:])) if inc else all(a > b for a, b in zip(v, v[1:]))
        if not ok:
            raise r.doc.error(key + (name,), f"must be strictly {'increasing' if inc else 'decreasing'}")
        spec[name] = v
    g = r.section(d["grid"], key + ("grid",), ("kind", "n"), ("n",))
    spec["grid_kind"] = r.string(g, key + ("grid",), "kind", ("regular", "section"), default="regular")
    spec["grid_n"] = r.number(g, key + ("grid",), "n", integer=True)
    if spec["grid_n"] < 2:
        raise r.doc.error(key + ("grid", "n"), "must be >= 2")
    spec["m"] = r.number(d, key, "m", 32, integer=True)
    if spec["m"] < 2:
        raise r.doc.error(key + ("m",), "must be >= 2")
    spec["dt"] = r.number(d, key, "dt", positive=True) if d.get("dt") is not None else None
    return spec


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    doc = _Doc(source, text)
    r = _Reader(doc)
    data = doc.data
    if not isinstance(data, dict):
        raise doc.error((), "top level must be a mapping")
    r.section(data, (), ("system", "potential", "schedule", "kinds", "simulate", "seed", "threads",
                         "output", "verify"), ("system",))
    system, sid = _system(r, data["system"], ("system",))
    potential = _potential(r, data.get("potential"), ("potential",))
    schedule = _schedule(r, data["schedule"], ("schedule",)) if "schedule" in data else None
    kinds = data.get("kinds", [k.value for k in EstimatorKind])
    if not isinstance(kinds, list) or not kinds:
        raise doc.error(("kinds",), "expected a nonempty list of estimator kinds")
    for i, k in enumerate(kinds):
        if k not in [e.value for e in EstimatorKind]:
            raise doc.error(("kinds", i), f"unknown estimator kind {k!r}")
    sim = None
    if "simulate" in data:
        s = r.section(data["simulate"], ("simulate",), ("x0", "T", "dt"), ("x0", "T", "dt"))
        x0 = r.numbers(s, ("simulate",), "x0")
        try:
            system.space.normalize(x0)
        except InvalidInputError as exc:
            raise doc.error(("simulate", "x0"), str(exc)) from None
        T = r.number(s, ("simulate",), "T", positive=True)
        dt = r.number(s, ("simulate",), "dt", positive=True)
        if dt > T:
            raise doc.error(("simulate", "dt"), "must not exceed T")
        sim = SimulateSpec(x0, T, dt)
    seed = r.number(data, (), "seed", 0, integer=True)
    threads = r.number(data, (), "threads", 1, integer=True)
    if threads < 1:
        raise doc.error(("threads",), "must be >= 1")
    outputs = dict(DEFAULT_OUTPUTS)
    if "output" in data:
        o = r.section(data["output"], ("output",), tuple(DEFAULT_OUTPUTS))
        for k in o:
            outputs[k] = r.string(o, ("output",), k)
    verify = data.get("verify", [])
    if not isinstance(verify, list):
        raise doc.error(("verify",), "expected a list of suite names")
    for i, v in enumerate(verify):
        if v not in SUITES:
            raise doc.error(("verify", i), f"unknown suite {v!r} (known: {', '.join(SUITES)})")
    cfg = ExperimentConfig(system, sid, potential, schedule, list(kinds), sim, seed, threads, outputs,
                           list(verify), data, source)
    if schedule is not None:
        cfg.schedule()  # step-multiple checks, before any computation
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path))


__all__ = ["ConfigError", "ExperimentConfig", "SimulateSpec", "SUITES", "load_config", "parse_config",
           "ImpulsivePressureError"]
