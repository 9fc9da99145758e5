"""Strict dataclass <-> dict conversion for JSON configs.

Unknown keys are rejected and errors carry JSON-pointer-style paths so a
bad run config points at the offending entry.
"""

import dataclasses
import enum
import typing

from .errors import ConfigError


def from_dict(cls, obj, path=""):
    """Build a (possibly nested) dataclass from a plain dict, strictly."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{path or '/'}: expected an object, got {type(obj).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(obj) - names
    if unknown:
        raise ConfigError(f"{path or '/'}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in obj:
            continue
        kwargs[f.name] = _convert(hints.get(f.name, None), obj[f.name], f"{path}/{f.name}")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path or '/'}: {e}") from e


def _convert(ftype, value, path):
    origin = typing.get_origin(ftype)
    if dataclasses.is_dataclass(ftype):
        return from_dict(ftype, value, path)
    if isinstance(ftype, type) and issubclass(ftype, enum.Enum):
        try:
            return ftype(value)
        except ValueError:
            valid = [m.value for m in ftype]
            raise ConfigError(f"{path}: expected one of {valid}, got {value!r}") from None
    if ftype is tuple or origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list")
        return tuple(value)
    if ftype is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        return float(value)
    if ftype is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer")
        return value
    if ftype is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean")
        return value
    return value


def to_dict(obj):
    """Canonical JSON-ready dict of a (possibly nested) config dataclass."""
    if dataclasses.is_dataclass(obj):
        return {f.name: to_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, tuple):
        return [to_dict(v) for v in obj]
    return obj
