"""Experiment configuration: JSON schema, defaults and the canonical hash.

The config hash is the SHA-256 hex digest of the defaults-filled config,
minus ``output_dir``, serialised as JSON with sorted keys, ``(",", ":")`` separators and ASCII
escaping. Command-line overrides are applied before hashing, so the hash
identifies exactly what ran.
"""

from __future__ import annotations

import copy
import hashlib
import json
from importlib import resources
from pathlib import Path

import jsonschema

from .fitting import FAMILY_PARAMS
from .states import FAMILIES

_NUM = {"type": "number"}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "extent", "spacing"],
    "properties": {
        "kind": {"enum": ["full_square", "half_plane", "positive_quadrant", "axis_scan_re", "axis_scan_im"]},
        "extent": {"type": "number", "exclusiveMinimum": 0},
        "spacing": {"type": "number", "exclusiveMinimum": 0},
        "extent_im": {"type": "number", "exclusiveMinimum": 0},
    },
}
_PARAMS = {"type": "object", "additionalProperties": _NUM}
_STATE_PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        **{k: _NUM for k in ("r", "theta", "re_delta", "im_delta", "re_alpha", "im_alpha", "re_l", "im_l")},
        "components": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"anyOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]},
            },
        },
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "chartomo experiment",
    "type": "object",
    "additionalProperties": False,
    "required": ["state", "grid"],
    "properties": {
        "name": {"type": "string"},
        "state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "properties": {"family": {"enum": list(FAMILIES)}, "params": _STATE_PARAMS},
        },
        "grid": _GRID,
        "output_grid": _GRID,
        "shots": {"type": "integer", "minimum": 1},
        "quadratures": {"type": "array", "items": _NUM, "minItems": 1},
        "bias": {"type": "number", "exclusiveMinimum": -0.5, "exclusiveMaximum": 0.5},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "pipeline": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "subtract_bias": {"type": "boolean"},
                "bias_source": {"enum": ["config", "fit"]},
                "mirror": {"enum": ["auto", "hermitian", "quadrant_mirror", "none"]},
                "pad_factor": {"type": "number", "minimum": 1},
                "dft_method": {"enum": ["separable", "direct", "fft"]},
                "oracle": {"type": "boolean"},
                "fit": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["model"],
                    "properties": {
                        "model": {"enum": list(FAMILY_PARAMS)},
                        "free": {"type": "array", "items": {"type": "string"}, "uniqueItems": True},
                        "fixed": _PARAMS,
                        "initial": _PARAMS,
                        "calibrated": _PARAMS,
                    },
                },
            },
        },
    },
}

DEFAULTS = {
    "name": "experiment",
    "shots": 200,
    "bias": 0.0,
    "seed": 0,
    "output_dir": "out",
    "pipeline": {
        "subtract_bias": True,
        "bias_source": "config",
        "mirror": "auto",
        "pad_factor": 4.0,
        "dft_method": "separable",
        "oracle": True,
    },
}

BUNDLED = ("fig2_squeezed", "fig2_displaced", "fig3_cat", "fig4_gkp")


class ConfigError(ValueError):
    """The configuration does not satisfy the schema."""


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate(config: dict) -> dict:
    """Schema-check ``config`` and return it with defaults filled in."""
    try:
        jsonschema.validate(config, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    full = _merge(DEFAULTS, config)
    fit = full["pipeline"].get("fit")
    if fit:
        names = set(FAMILY_PARAMS[fit["model"]])
        for key in ("free", "fixed", "initial", "calibrated"):
            given = set(fit.get(key, ()))
            if given - names:
                raise ConfigError(f"config invalid at pipeline/fit/{key}: unknown parameters {sorted(given - names)}")
    if full["state"]["family"] == "custom" and "components" not in full["state"].get("params", {}):
        raise ConfigError("config invalid at state/params: custom state needs components")
    return full


def load(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return validate(raw)


def load_bundled(name: str) -> dict:
    if name not in BUNDLED:
        raise ConfigError(f"unknown bundled config {name!r}; choose from {BUNDLED}")
    text = resources.files("chartomo.configs").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return validate(json.loads(text))


def resolve(spec: str) -> dict:
    """A bundled config name or a path to a JSON file."""
    if spec in BUNDLED:
        return load_bundled(spec)
    return load(spec)


def canonical_json(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON, ignoring ``output_dir`` (where results go is not what ran)."""
    body = {k: v for k, v in config.items() if k != "output_dir"}
    return hashlib.sha256(canonical_json(body).encode("ascii")).hexdigest()


def with_overrides(config: dict, seed=None, shots=None, pad_factor=None, output_dir=None) -> dict:
    over = {}
    if seed is not None:
        over["seed"] = int(seed)
    if shots is not None:
        over["shots"] = int(shots)
    if output_dir is not None:
        over["output_dir"] = str(output_dir)
    if pad_factor is not None:
        over["pipeline"] = {"pad_factor": float(pad_factor)}
    return validate(_merge(config, over))
