"""Run configuration: a flat YAML document validated against a per-command schema."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml
from jsonschema import Draft202012Validator

from ..errors import SchemaViolation

COMMANDS = ("flow", "lpa", "expand")
MODELS = ("two_scalar", "msr", "dirac")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

COUPLINGS = {
    "two_scalar": ("U0", "m1_sq", "m2_sq", "lambda1", "lambda2", "lambda3", "mu_sq"),
    "msr": ("U0", "m_sq", "lambda", "D", "mu_sq"),
    "dirac": ("U0", "m", "lambda"),
}
DIMENSIONS = {"two_scalar": ["d4"], "msr": ["d4", "d3"], "dirac": ["d2"]}

_K_RANGE = {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2}
_COMMON = {
    "command": {"enum": list(COMMANDS)},
    "model": {"enum": list(MODELS)},
    "out": {"type": "string"},
}
_FLOW = {
    "k": _K_RANGE,
    "rtol": _POS,
    "atol": _POS,
    "eps_sing": _POS,
}
_POINTS = {"type": "integer", "minimum": 5}
_LPA = {
    "k": _K_RANGE,
    "points": {"type": ["integer", "array"], "minimum": 5, "items": _POINTS, "minItems": 2, "maxItems": 2},
    "bounds": {"type": "array", "minItems": 2, "maxItems": 2,
               "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
    "safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "min_step": _POS,
    "max_step": _POS,
    "k_ratio_cap": _POS,
    "eps_sing": _POS,
    "checkpoint_every": _POS,
    "boundary": {"enum": ["ode", "frozen"]},
    "ode_rtol": _POS,
}
_EXPAND = {
    "observable": {"type": "string", "minLength": 1},
    "operation": {"enum": ["product", "smatrix", "smatrix_inverse", "bogoliubov"]},
    "order": {"type": "integer", "minimum": 0, "maximum": 4},
    "vacuum": {"type": "boolean"},
    "oriented": {"type": "boolean"},
}

DEFAULTS = {
    "flow": {"rtol": 1e-10, "atol": 1e-12, "eps_sing": 1e-8},
    "lpa": {"points": 41, "bounds": [[-0.5, 0.5], [-0.5, 0.5]], "safety": 0.2, "min_step": 1e-9,
            "k_ratio_cap": 0.5, "eps_sing": 1e-8, "boundary": "ode", "ode_rtol": 1e-12},
    "expand": {"operation": "product", "order": 2, "vacuum": False, "oriented": False},
}
_COUPLING_DEFAULTS = {"mu_sq": 1.0}


def _schema(command: str | None, model: str | None) -> dict:
    props = dict(_COMMON)
    required = ["command", "model"]
    if command == "flow" or command == "lpa":
        props.update(_FLOW if command == "flow" else _LPA)
        required.append("k")
        if model in COUPLINGS:
            props.update({name: _NUM for name in COUPLINGS[model]})
            if "mu_sq" in props:
                props["mu_sq"] = _POS
    elif command == "expand":
        props.update(_EXPAND)
        required.append("observable")
    if model in DIMENSIONS:
        props["dimension"] = {"enum": DIMENSIONS[model]}
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


def _messages(err, command, model) -> list[str]:
    loc = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        allowed = set(err.schema.get("properties", {}))
        where = f"command={command}, model={model}"
        return [f"{(loc + '/') if loc else ''}{key}: unknown key for {where}"
                for key in sorted(set(err.instance) - allowed)]
    return [f"{loc or '<root>'}: {err.message}"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    settings: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.settings[key]

    def get(self, key, default=None):
        return self.settings.get(key, default)

    def as_dict(self) -> dict:
        return {"command": self.command, "model": self.model, **self.settings}


def validate(data) -> list[str]:
    """Every schema violation as 'path: message', sorted for stable reporting."""
    if not isinstance(data, dict):
        return [f"<root>: expected a mapping, got {type(data).__name__}"]
    command, model = data.get("command"), data.get("model")
    validator = Draft202012Validator(_schema(command if command in COMMANDS else None,
                                             model if model in MODELS else None))
    out = []
    for err in validator.iter_errors(data):
        out.extend(_messages(err, command, model))
    k = data.get("k")
    if command in ("flow", "lpa") and isinstance(k, list) and len(k) == 2 and k[0] == k[1]:
        out.append("k: start and end scale coincide")
    if command == "lpa" and isinstance(k, list) and len(k) == 2 and not k[1] > k[0]:
        out.append("k: lpa solves march upward, end must exceed start")
    if command == "lpa" and model == "dirac":
        out.append("model: the grid solver supports two_scalar and msr only")
    bounds = data.get("bounds")
    if isinstance(bounds, list):
        for i, b in enumerate(bounds):
            if isinstance(b, list) and len(b) == 2 and all(isinstance(v, (int, float)) for v in b) and not b[1] > b[0]:
                out.append(f"bounds/{i}: empty interval {b}")
    return sorted(set(out))


def _normalize(data: dict) -> RunConfig:
    command, model = data["command"], data["model"]
    settings = dict(DEFAULTS[command])
    if command in ("flow", "lpa"):
        settings.update({name: 0.0 for name in COUPLINGS[model]})
        settings.update({n: v for n, v in _COUPLING_DEFAULTS.items() if n in COUPLINGS[model]})
    settings["dimension"] = DIMENSIONS[model][0]
    settings.update({key: value for key, value in data.items() if key not in ("command", "model")})
    for key, value in list(settings.items()):
        if isinstance(value, int) and not isinstance(value, bool) and key in COUPLINGS.get(model, ()):
            settings[key] = float(value)
    if command == "lpa" and isinstance(settings["points"], int):
        settings["points"] = [settings["points"], settings["points"]]
    settings["k"] = [float(v) for v in settings["k"]] if "k" in settings else settings.get("k")
    if settings.get("k") is None:
        settings.pop("k")
    return RunConfig(command, model, dict(sorted(settings.items())))


def parse_config(source) -> RunConfig:
    """Parse a path, YAML text or mapping; raise SchemaViolation listing every problem."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if "\n" not in text and os.path.exists(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SchemaViolation([f"<root>: not valid YAML ({exc})"]) from exc
    problems = validate(data)
    if problems:
        raise SchemaViolation(problems)
    return _normalize(data)


def serialize(config: RunConfig) -> str:
    return yaml.safe_dump(config.as_dict(), sort_keys=True, default_flow_style=None)
