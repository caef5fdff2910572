"""Scenario configuration: strict JSON parsing, defaults and canonical form."""

import json
import re
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, DomainError
from .fock import ThermalModel
from .xstate import PHASE_SCAN_PHASES, XParams, XState, validate

SCENARIOS = ("fig2", "fig3", "fig4", "steady_table", "sweep")

# scenario -> default values; a key missing here is not accepted for that scenario
DEFAULTS = {
    "fig2": dict(xi=0.5, passes=30, stride=1, pass_map="exact"),
    "fig3": dict(xi=0.5, passes=30, stride=1, pass_map="exact",
                 phases=PHASE_SCAN_PHASES, xstate=None),
    "fig4": dict(xi=0.5, passes=30, stride=1, pass_map="exact",
                 phases=PHASE_SCAN_PHASES, xstate=None),
    "steady_table": dict(xi=0.01, passes=10**6, stride=200, tol=4e-5, pass_map="weak",
                         phases=(0.0, np.pi / 2, np.pi), xstate=None, samples=0, seed=0),
    "sweep": dict(passes=50000, stride=10, tol=1e-8, pass_map="exact",
                  phases=tuple(float(p) for p in np.linspace(0.0, np.pi, 5)), xis=(0.05, 0.1, 0.2, 0.5),
                  xstate=None),
}
COMMON = ("scenario", "output_path", "thermal_model", "max_dim")
XSTATE_ENTRIES = ("a11", "a22", "a33", "a44", "a14", "a23")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    xi: Optional[float] = None
    passes: int = 30
    phases: Tuple[float, ...] = ()
    thermal_model: ThermalModel = ThermalModel.GEOMETRIC
    output_path: str = "out"
    seed: Optional[int] = None
    xstate: Optional[Union[XParams, XState]] = None
    xis: Tuple[float, ...] = ()
    samples: int = 0
    stride: int = 1
    tol: Optional[float] = None
    pass_map: str = "exact"
    max_dim: Optional[int] = None

    @property
    def allowed_keys(self):
        return COMMON + tuple(DEFAULTS[self.scenario])


def default_config(scenario: str) -> ScenarioConfig:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
    model = ThermalModel.EXPONENTIAL if scenario == "fig4" else ThermalModel.GEOMETRIC
    return ScenarioConfig(scenario=scenario, thermal_model=model, **DEFAULTS[scenario])


# ---- parsing -----------------------------------------------------------------

def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _locate(text, key):
    """Line and column of the first ``"key":`` in ``text``, else (None, None)."""
    hit = re.search(r'"%s"\s*:' % re.escape(key), text)
    return _position(text, hit.start()) if hit else (None, None)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


class _Reader:
    """Typed access to a decoded JSON object with positions for errors."""

    def __init__(self, text):
        self.text = text

    def fail(self, key, message, cls=ConfigError):
        line, col = _locate(self.text, key)
        if cls is ConfigError:
            raise ConfigError(message, line, col)
        where = f"line {line}, column {col}: " if line else ""
        raise cls(where + message)

    def real(self, key, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(key, f"{key!r} must be a number, got {json.dumps(v)}")
        if not np.isfinite(v):
            self.fail(key, f"{key!r} must be finite")
        return float(v)

    def integer(self, key, v):
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(key, f"{key!r} must be an integer, got {json.dumps(v)}")
        return v

    def complex_(self, key, v):
        if isinstance(v, list):
            if len(v) != 2:
                self.fail(key, f"{key!r} must be a number or [re, im]")
            return complex(self.real(key, v[0]), self.real(key, v[1]))
        return complex(self.real(key, v))

    def reals(self, key, v):
        if not isinstance(v, list) or not v:
            self.fail(key, f"{key!r} must be a nonempty list of numbers")
        return tuple(self.real(key, x) for x in v)

    def obj(self, key, v):
        if not isinstance(v, dict):
            self.fail(key, f"{key!r} must be an object")
        return v


def _read_xstate(r: _Reader, v):
    v = r.obj("xstate", v)
    if set(v) not in ({"params"}, {"entries"}):
        r.fail("xstate", "'xstate' must hold exactly one of 'params' or 'entries'")
    if "params" in v:
        body = r.obj("params", v["params"])
        names = [f.name for f in fields(XParams)]
        for k in body:
            if k not in names:
                r.fail(k, f"unknown XParams field {k!r}; expected {', '.join(names)}")
        missing = [k for k in ("alpha", "r1", "r2", "theta1", "theta2") if k not in body]
        if missing:
            r.fail("params", f"XParams missing {', '.join(missing)}")
        params = XParams(**{k: r.real(k, x) for k, x in body.items()})
        try:
            params.check()
        except DomainError as exc:
            name = str(exc).split("=", 1)[0]
            r.fail(name, str(exc), DomainError)
        return params
    body = r.obj("entries", v["entries"])
    for k in body:
        if k not in XSTATE_ENTRIES:
            r.fail(k, f"unknown X-state entry {k!r}; expected {', '.join(XSTATE_ENTRIES)}")
    missing = [k for k in XSTATE_ENTRIES[:4] if k not in body]
    if missing:
        r.fail("entries", f"X-state entries missing {', '.join(missing)}")
    state = XState(*(r.real(k, body[k]) for k in XSTATE_ENTRIES[:4]),
                   *(r.complex_(k, body.get(k, 0.0)) for k in XSTATE_ENTRIES[4:]))
    if not validate(state).valid:
        r.fail("entries", f"entries do not form a valid X-state: {validate(state)}", DomainError)
    return state


def parse_config(text: str, scenario: Optional[str] = None) -> ScenarioConfig:
    """Parse a JSON scenario description into a fully defaulted config.

    Unknown or duplicated keys, wrong types and keys that do not apply to the
    chosen scenario raise ``ConfigError`` with line and column.  Physically
    invalid reservoirs raise ``DomainError`` naming the offending field.
    ``scenario`` overrides the scenario named in the text.
    """
    if not text.strip():
        raise ConfigError("configuration is empty", 1, 1)
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        key = str(exc).split("'")[1]
        line, col = _locate(text, key)
        raise ConfigError(str(exc), line, col) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", 1, 1)
    r = _Reader(text)
    if scenario is not None:
        data["scenario"] = scenario
    scenario = data.get("scenario")
    if scenario is None:
        raise ConfigError("missing required key 'scenario'", 1, 1)
    if scenario not in SCENARIOS:
        r.fail("scenario", f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
    cfg = default_config(scenario)
    known = {f.name for f in fields(ScenarioConfig)}
    updates = {}
    for key, v in data.items():
        if key not in known:
            r.fail(key, f"unknown key {key!r}")
        if key not in cfg.allowed_keys:
            r.fail(key, f"key {key!r} does not apply to scenario {scenario!r}")
        if key == "scenario":
            continue
        if key in ("xi", "tol"):
            updates[key] = r.real(key, v)
        elif key in ("passes", "samples", "stride", "seed"):
            updates[key] = r.integer(key, v)
        elif key == "max_dim":
            updates[key] = None if v is None else r.integer(key, v)
        elif key in ("phases", "xis"):
            updates[key] = r.reals(key, v)
        elif key == "thermal_model":
            try:
                updates[key] = ThermalModel(v)
            except ValueError:
                r.fail(key, f"thermal_model must be one of "
                       f"{', '.join(m.value for m in ThermalModel)}, got {json.dumps(v)}")
        elif key == "output_path":
            if not isinstance(v, str) or not v:
                r.fail(key, "'output_path' must be a nonempty string")
            updates[key] = v
        elif key == "pass_map":
            if v not in ("exact", "weak"):
                r.fail(key, f"pass_map must be 'exact' or 'weak', got {json.dumps(v)}")
            updates[key] = v
        elif key == "xstate":
            updates[key] = None if v is None else _read_xstate(r, v)
    cfg = replace(cfg, **updates)
    _check_ranges(cfg, r)
    return cfg


def _check_ranges(cfg: ScenarioConfig, r: _Reader):
    for key, ok in (("xi", cfg.xi is None or cfg.xi >= 0),
                    ("passes", cfg.passes >= 1),
                    ("stride", cfg.stride >= 1),
                    ("samples", cfg.samples >= 0),
                    ("tol", cfg.tol is None or cfg.tol > 0),
                    ("max_dim", cfg.max_dim is None or cfg.max_dim >= 3),
                    ("xis", all(x >= 0 for x in cfg.xis))):
        if not ok:
            r.fail(key, f"{key!r} is out of range", DomainError)


# ---- canonical form ----------------------------------------------------------

def _xstate_json(x):
    if isinstance(x, XParams):
        return {"params": {f.name: getattr(x, f.name) for f in fields(XParams)}}
    out = {k: getattr(x, k) for k in XSTATE_ENTRIES[:4]}
    for k in XSTATE_ENTRIES[4:]:
        z = complex(getattr(x, k))
        out[k] = [z.real, z.imag]
    return {"entries": out}


def to_dict(cfg: ScenarioConfig) -> dict:
    """Every applicable field, explicit, in JSON-ready form."""
    out = {}
    for key in cfg.allowed_keys:
        v = getattr(cfg, key)
        if isinstance(v, ThermalModel):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        elif isinstance(v, (XParams, XState)):
            v = _xstate_json(v)
        out[key] = v
    return out


def serialize(cfg: ScenarioConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True) + "\n"


def normalize(text: str) -> str:
    """Canonical text of a configuration: defaults filled, keys sorted."""
    return serialize(parse_config(text))
