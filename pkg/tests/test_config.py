import textwrap
from pathlib import Path

import pytest

from impulsive_pressure.config import ConfigError, load_config, parse_config
from impulsive_pressure.potentials import Constant, FourierCircle, Tabulated

CONFIGS = sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.yaml"))

BASE = """\
system:
  id: impulsive_circle
potential:
  kind: fourier
  terms: [[1, 0.0, 1.0]]
  jump_compatible: true
schedule:
  T_list: [2, 4]
  eps_list: [0.2, 0.1]
  delta_list: [0.2, 0.1]
  grid: {kind: regular, n: 40}
"""


def _err(text):
    with pytest.raises(ConfigError) as info:
        parse_config(textwrap.dedent(text), "cfg.yaml")
    return str(info.value)


@pytest.mark.parametrize("path", CONFIGS, ids=[p.stem for p in CONFIGS])
def test_shipped_configs_parse(path):
    cfg = load_config(path)
    assert cfg.verify
    if cfg.schedule_spec is not None:
        cfg.schedule()


def test_base_parses():
    cfg = parse_config(BASE)
    assert cfg.system_id == "impulsive_circle"
    assert isinstance(cfg.potential, FourierCircle) and cfg.potential.jump_compatible
    assert len(cfg.kinds) == 6
    assert cfg.schedule().m == 32


def test_default_potential_is_zero():
    cfg = parse_config("system: {id: rotation_circle}\n")
    assert cfg.potential == Constant(0.0)


def test_tabulated_and_constant():
    cfg = parse_config(BASE.replace("kind: fourier\n  terms: [[1, 0.0, 1.0]]\n  jump_compatible: true",
                                    "kind: tabulated\n  nodes: [0.0, 0.5]\n  values: [1.0, 2.0]"))
    assert isinstance(cfg.potential, Tabulated)
    cfg = parse_config("system: {id: rotation_circle}\npotential: {kind: constant, c: 0.5}\n")
    assert cfg.potential.c == 0.5


def test_unknown_key_with_line():
    msg = _err(BASE + "bogus: 1\n")
    assert "cfg.yaml:12" in msg and "bogus" in msg


def test_non_monotone_eps():
    msg = _err(BASE.replace("eps_list: [0.2, 0.1]", "eps_list: [0.1, 0.2]"))
    assert "schedule.eps_list" in msg and ":9:" in msg


def test_delta_not_multiple_of_step():
    assert "delta" in _err(BASE.replace("delta_list: [0.2, 0.1]", "delta_list: [0.2, 0.07]"))


def test_duplicate_key():
    assert "duplicate" in _err(BASE + "system: {id: rotation_circle}\n")


def test_yaml_syntax_error():
    assert "YAML syntax" in _err("system: [unclosed\n")


def test_bad_values():
    assert "simulate.T" in _err("system: {id: impulsive_circle}\nsimulate: {x0: [0.0], T: 0, dt: 0.1}\n")
    assert "kinds.0" in _err("system: {id: impulsive_circle}\nkinds: [nope]\n")
    assert "verify.0" in _err("system: {id: impulsive_circle}\nverify: [nope]\n")
    assert "system.id" in _err("system: {id: nope}\n")
    assert "terms.0" in _err("system: {id: rotation_circle}\npotential: {kind: fourier, terms: [[0, 1, 1]]}\n")
    assert "event_tol" in _err("""\
        system:
          space: {kind: circle}
          flow: {kind: rotation}
          jumps: [{at: [0.5], to: [0.0]}]
          xi: 0.1
          event_tol: 0.05
        """)


def test_custom_system_fields():
    cfg = parse_config("""\
system:
  name: two_jumps
  space: {kind: circle}
  flow: {kind: rotation, speed: 2.0}
  jumps:
    - {at: [0.5], to: [0.0]}
    - {at: [0.9], to: [0.7]}
  xi: 0.05
""")
    assert cfg.system.has_impulses and len(cfg.system.jumps) == 2
    assert cfg.system.flow.speed == 2.0
    assert cfg.system_id is None


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.yaml")
