"""Build experiment configs from plain dicts (e.g. parsed JSON).

Nested dataclass fields are built recursively, unknown keys are rejected
with the full dotted path, and tuples declared on the dataclass stay tuples
even when JSON hands us lists.
"""

import json
from dataclasses import fields, is_dataclass

from .errors import ConfigError


def config_from_dict(cls, data, path=""):
    """Construct dataclass `cls` from `data`, recursing into nested configs."""
    if not is_dataclass(cls):
        raise ConfigError(f"{cls!r} is not a config class")
    if not isinstance(data, dict):
        where = path or cls.__name__
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    by_name = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        full = f"{path}.{key}" if path else key
        if key not in by_name:
            raise ConfigError(f"unknown config key: {full}")
        f = by_name[key]
        if is_dataclass(f.type) and isinstance(value, dict):
            value = config_from_dict(f.type, value, path=full)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_json(cls, text):
    """Parse JSON text and build a config from it."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return config_from_dict(cls, data)
