"""Tiny structural JSON-schema checker covering the subset the shipped schemas use."""

from __future__ import annotations

import re

_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "boolean": bool,
    "null": type(None),
}


def _type_ok(value, type_name: str) -> bool:
    if type_name == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_name == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, _TYPES[type_name])


def validate(value, schema: dict, path: str = "$") -> list[str]:
    """Return a list of violations (empty means valid)."""
    errors: list[str] = []
    if "const" in schema:
        if value != schema["const"]:
            errors.append(f"{path}: expected const {schema['const']!r}, got {value!r}")
        return errors
    if "enum" in schema:
        if value not in schema["enum"]:
            errors.append(f"{path}: {value!r} not in enum {schema['enum']}")
        return errors
    if "oneOf" in schema:
        candidates = [validate(value, sub, path) for sub in schema["oneOf"]]
        if not any(not errs for errs in candidates):
            errors.append(f"{path}: {value!r} matches none of the oneOf branches")
        return errors
    declared = schema.get("type")
    if declared is not None and not _type_ok(value, declared):
        errors.append(f"{path}: expected {declared}, got {type(value).__name__}")
        return errors
    if declared == "object" or "properties" in schema or "required" in schema:
        for key in schema.get("required", []):
            if key not in value:
                errors.append(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                errors.extend(validate(value[key], sub, f"{path}.{key}"))
    if declared == "array" and "items" in schema:
        for index, item in enumerate(value):
            errors.extend(validate(item, schema["items"], f"{path}[{index}]"))
    if declared in ("number", "integer") and "minimum" in schema and not errors:
        if value < schema["minimum"]:
            errors.append(f"{path}: {value} below minimum {schema['minimum']}")
    if declared == "string" and "pattern" in schema and not errors:
        if not re.search(schema["pattern"], value):
            errors.append(f"{path}: {value!r} does not match {schema['pattern']!r}")
    return errors


def assert_valid(value, schema: dict) -> None:
    errors = validate(value, schema)
    assert not errors, "schema violations:\n" + "\n".join(errors)
