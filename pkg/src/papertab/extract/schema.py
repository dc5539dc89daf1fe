"""Question-driven table schema inference and the direct attribute form."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import SchemaError, UsageError
from ..gateway import Gateway, ModelClass
from ..gateway.structured import parse_json_payload, repair_prompt

_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_NON_WORD_RE = re.compile(r"[^0-9a-zA-Z]+")

DECLARED_KINDS = ("string", "float", "int", "bool", "date")

_KIND_ALIASES = {
    "string": "string",
    "str": "string",
    "text": "string",
    "float": "float",
    "number": "float",
    "numeric": "float",
    "numerical": "float",
    "double": "float",
    "real": "float",
    "int": "int",
    "integer": "int",
    "bool": "bool",
    "boolean": "bool",
    "date": "date",
    "datetime": "date",
}


def to_snake_case(name: str) -> str:
    name = _CAMEL_RE.sub("_", name.strip())
    name = _NON_WORD_RE.sub("_", name)
    return re.sub(r"_+", "_", name).strip("_").lower()


def declared_kind_of(description: str) -> str:
    """Kind declared by a "Float: ..." style description prefix."""
    head, sep, _ = description.partition(":")
    if not sep:
        return "string"
    return _KIND_ALIASES.get(head.strip().casefold(), "string")


@dataclass(frozen=True)
class SchemaColumn:
    name: str
    value_description: str
    declared_kind: str = "string"


@dataclass
class TableSchema:
    columns: list[SchemaColumn]
    source_question: str = ""

    def __post_init__(self) -> None:
        if not self.columns:
            raise SchemaError("schema must have at least one column")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate column names: {names}")
        for col in self.columns:
            if not col.name:
                raise SchemaError("column name is empty")
            if not col.value_description.strip():
                raise SchemaError(f"column {col.name!r} has no value description")
            if col.declared_kind not in DECLARED_KINDS:
                raise SchemaError(f"unknown declared kind {col.declared_kind!r}")

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def to_dict(self) -> dict:
        return {
            "source_question": self.source_question,
            "columns": [
                {
                    "name": c.name,
                    "value_description": c.value_description,
                    "declared_kind": c.declared_kind,
                }
                for c in self.columns
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TableSchema":
        return cls(
            columns=[
                SchemaColumn(
                    name=c["name"],
                    value_description=c["value_description"],
                    declared_kind=c.get("declared_kind", "string"),
                )
                for c in data.get("columns", [])
            ],
            source_question=data.get("source_question", ""),
        )


def _columns_from_mapping(mapping: dict, errors: list[str]) -> list[SchemaColumn]:
    columns: list[SchemaColumn] = []
    seen: set[str] = set()
    for raw_name, raw_desc in mapping.items():
        if isinstance(raw_desc, (dict, list)):
            errors.append(
                f"column {raw_name!r} has a nested value; every column must map to "
                "a flat string description"
            )
            continue
        name = to_snake_case(str(raw_name))
        if not name:
            errors.append(f"column name {raw_name!r} is empty after normalization")
            continue
        if name in seen:
            errors.append(f"column name {name!r} appears more than once")
            continue
        desc = str(raw_desc).strip()
        if not desc:
            errors.append(f"column {name!r} has an empty description")
            continue
        seen.add(name)
        columns.append(SchemaColumn(name, desc, declared_kind_of(desc)))
    return columns


def _schema_from_raw(raw: str, question: str) -> tuple[TableSchema | None, list[str]]:
    try:
        value = parse_json_payload(raw)
    except ValueError as exc:
        return None, [str(exc)]
    if isinstance(value, list):
        if not value:
            return None, ["the list is empty; expected one record object"]
        value = value[0]
    if not isinstance(value, dict) or not value:
        return None, ["expected a nonempty JSON object mapping column names to descriptions"]
    errors: list[str] = []
    columns = _columns_from_mapping(value, errors)
    if errors or not columns:
        return None, errors or ["no usable columns"]
    return TableSchema(columns=columns, source_question=question), []


def infer_schema(gateway: Gateway, question: str) -> TableSchema:
    """Flat record schema for a question, with one repair round on bad output."""
    if not question.strip():
        raise UsageError("question is empty")
    prompt = gateway.render("schema_design", {"question": question})
    raw = gateway.complete_prompt(prompt, ModelClass.REASONER)
    schema, errors = _schema_from_raw(raw, question)
    if schema is not None:
        return schema
    retry = repair_prompt(prompt, raw, errors)
    raw = gateway.complete_prompt(retry, ModelClass.REASONER)
    schema, errors = _schema_from_raw(raw, question)
    if schema is not None:
        return schema
    raise SchemaError(
        "could not derive a usable schema from the model: " + "; ".join(errors[:4])
    )


def schema_from_attributes(attributes: dict[str, str], question: str = "") -> TableSchema:
    """Schema built directly from a {name: description} attribute mapping."""
    if not isinstance(attributes, dict) or not attributes:
        raise UsageError("attributes must be a nonempty name→description mapping")
    errors: list[str] = []
    columns = _columns_from_mapping(attributes, errors)
    if errors:
        raise SchemaError("invalid attributes: " + "; ".join(errors[:4]))
    source = question or json.dumps(attributes)
    return TableSchema(columns=columns, source_question=source)
