"""Parsing and shape validation for structured model output."""
from __future__ import annotations

import json
import re
from typing import Any

_FENCE_RE = re.compile(r"^```[a-zA-Z0-9_-]*\s*\n?|```\s*$", re.MULTILINE)


def strip_code_fences(text: str) -> str:
    return _FENCE_RE.sub("", text).strip()


def parse_json_payload(text: str) -> Any:
    """Extract the first JSON value from model text, tolerating code fences.

    Raises ValueError when no JSON value can be parsed.
    """
    cleaned = strip_code_fences(text)
    try:
        return json.loads(cleaned)
    except json.JSONDecodeError:
        pass
    # fall back to the first balanced-looking object or array in the text
    for opener, closer in (("{", "}"), ("[", "]")):
        start = cleaned.find(opener)
        while start != -1:
            end = cleaned.rfind(closer)
            while end > start:
                try:
                    return json.loads(cleaned[start : end + 1])
                except json.JSONDecodeError:
                    end = cleaned.rfind(closer, start, end)
            start = cleaned.find(opener, start + 1)
    raise ValueError("no JSON value found in model output")


# Shapes are small dicts: {"kind": "str" | "number" | "bool" | "scalar" | "any"}
# {"kind": "list", "item": shape, "min_len": int}
# {"kind": "object", "required": {name: shape}, "extra": "allow" | "forbid"}
# {"kind": "flat_record"} - object whose values are all scalars


def validate_shape(value: Any, shape: dict[str, Any], path: str = "$") -> list[str]:
    """Return a list of human-readable validation errors (empty when valid)."""
    kind = shape.get("kind", "any")
    errors: list[str] = []
    if kind == "any":
        return errors
    if kind == "str":
        if not isinstance(value, str):
            errors.append(f"{path}: expected string, got {type(value).__name__}")
    elif kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{path}: expected number, got {type(value).__name__}")
    elif kind == "bool":
        if not isinstance(value, bool):
            errors.append(f"{path}: expected boolean, got {type(value).__name__}")
    elif kind == "scalar":
        if isinstance(value, (dict, list)) or value is None:
            errors.append(f"{path}: expected a scalar value, got {type(value).__name__}")
    elif kind == "list":
        if not isinstance(value, list):
            errors.append(f"{path}: expected list, got {type(value).__name__}")
            return errors
        min_len = shape.get("min_len", 0)
        if len(value) < min_len:
            errors.append(f"{path}: expected at least {min_len} items, got {len(value)}")
        item_shape = shape.get("item")
        if item_shape:
            for i, item in enumerate(value):
                errors.extend(validate_shape(item, item_shape, f"{path}[{i}]"))
    elif kind == "object":
        if not isinstance(value, dict):
            errors.append(f"{path}: expected object, got {type(value).__name__}")
            return errors
        required = shape.get("required", {})
        for name, sub in required.items():
            if name not in value:
                errors.append(f"{path}: missing key '{name}'")
            else:
                errors.extend(validate_shape(value[name], sub, f"{path}.{name}"))
        if shape.get("extra") == "forbid":
            for name in value:
                if name not in required:
                    errors.append(f"{path}: unexpected key '{name}'")
    elif kind == "flat_record":
        if not isinstance(value, dict):
            errors.append(f"{path}: expected object, got {type(value).__name__}")
            return errors
        if not value:
            errors.append(f"{path}: record has no columns")
        for name, cell in value.items():
            if isinstance(cell, (dict, list)):
                errors.append(f"{path}.{name}: nested values are not allowed")
    else:
        raise ValueError(f"unknown shape kind '{kind}'")
    return errors


def repair_prompt(original_prompt: str, raw_response: str, errors: list[str]) -> str:
    """Re-prompt carrying the validation failures back to the model."""
    joined = "\n".join(f"- {e}" for e in errors)
    return (
        f"{original_prompt}\n\n"
        f"Your previous response could not be used. Problems found:\n{joined}\n\n"
        f"Previous response:\n{raw_response}\n\n"
        "Respond again, following the required format exactly, with no extra commentary."
    )
