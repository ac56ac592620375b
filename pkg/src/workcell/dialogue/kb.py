"""Declarative knowledge base: intents, conversational forms, lexicon.

The on-disk format is one JSON document with ``intents``, ``forms`` and
``lexicon`` arrays (see docs/file_formats.md).  The loader applies the
structural invariants and reports violations with the JSON path of the
offending element.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path


class KbError(ValueError):
    """Knowledge-base document rejected; message names the offending path."""


@dataclass(frozen=True)
class IntentDef:
    id: str
    trigger_phrases: tuple[tuple[str, ...], ...]
    linked_form: str | None = None


@dataclass(frozen=True)
class FieldDef:
    name: str
    prompt: str
    allowed: tuple[str, ...] | None = None  # None means free text
    required: bool = True


@dataclass(frozen=True)
class FormSchema:
    id: str
    fields: tuple[FieldDef, ...]
    endpoint: str

    def field_named(self, name: str) -> FieldDef:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def required_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields if f.required)


@dataclass(frozen=True)
class LexiconEntry:
    phrase: tuple[str, ...]
    field: str
    value: str


@dataclass(frozen=True)
class KnowledgeBase:
    intents: tuple[IntentDef, ...]
    forms: tuple[FormSchema, ...]
    lexicon: tuple[LexiconEntry, ...] = field(default_factory=tuple)

    def intent(self, intent_id: str) -> IntentDef:
        for it in self.intents:
            if it.id == intent_id:
                return it
        raise KeyError(intent_id)

    def form(self, form_id: str) -> FormSchema:
        for f in self.forms:
            if f.id == form_id:
                return f
        raise KeyError(form_id)


def validate_kb(kb: KnowledgeBase) -> KnowledgeBase:
    """Check the cross-references and shape rules; raises KbError."""
    seen_intents: set[str] = set()
    for i, intent in enumerate(kb.intents):
        where = f"intents[{i}]"
        if not intent.id:
            raise KbError(f"{where}.id: empty")
        if intent.id in seen_intents:
            raise KbError(f"{where}.id: duplicate intent id {intent.id!r}")
        seen_intents.add(intent.id)
        if not intent.trigger_phrases:
            raise KbError(f"{where}.trigger_phrases: at least one phrase required")
        for j, phrase in enumerate(intent.trigger_phrases):
            if not phrase:
                raise KbError(f"{where}.trigger_phrases[{j}]: empty phrase")
            for tok in phrase:
                if not tok or tok != tok.lower():
                    raise KbError(
                        f"{where}.trigger_phrases[{j}]: token {tok!r} not normalized"
                    )
    form_ids: set[str] = set()
    for i, form in enumerate(kb.forms):
        where = f"forms[{i}]"
        if form.id in form_ids:
            raise KbError(f"{where}.id: duplicate form id {form.id!r}")
        form_ids.add(form.id)
        if not form.endpoint:
            raise KbError(f"{where}.endpoint: empty")
        names: set[str] = set()
        for j, fdef in enumerate(form.fields):
            fwhere = f"{where}.fields[{j}]"
            if fdef.name in names:
                raise KbError(f"{fwhere}.name: duplicate field name {fdef.name!r}")
            names.add(fdef.name)
            if not fdef.prompt:
                raise KbError(f"{fwhere}.prompt: empty")
            if fdef.allowed is not None and not fdef.allowed:
                raise KbError(f"{fwhere}.allowed: empty list (omit for free text)")
        if not any(f.required for f in form.fields):
            raise KbError(f"{where}.fields: at least one required field")
    for i, intent in enumerate(kb.intents):
        if intent.linked_form is not None and intent.linked_form not in form_ids:
            raise KbError(f"intents[{i}].linked_form: unknown form {intent.linked_form!r}")
    for i, entry in enumerate(kb.lexicon):
        where = f"lexicon[{i}]"
        if not entry.phrase:
            raise KbError(f"{where}.phrase: empty")
        for tok in entry.phrase:
            if not tok or tok != tok.lower():
                raise KbError(f"{where}.phrase: token {tok!r} not lowercase")
        if not entry.field:
            raise KbError(f"{where}.field: empty")
    return kb


def _phrase(value, where: str) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(value.split())
    raise KbError(f"{where}: expected a phrase string")


def kb_from_dict(doc: dict) -> KnowledgeBase:
    if not isinstance(doc, dict):
        raise KbError("document root must be an object")
    intents = []
    for i, rec in enumerate(doc.get("intents", [])):
        where = f"intents[{i}]"
        if "id" not in rec:
            raise KbError(f"{where}: missing 'id'")
        if "trigger_phrases" not in rec:
            raise KbError(f"{where}: missing 'trigger_phrases'")
        intents.append(
            IntentDef(
                id=str(rec["id"]),
                trigger_phrases=tuple(
                    _phrase(p, f"{where}.trigger_phrases[{j}]")
                    for j, p in enumerate(rec["trigger_phrases"])
                ),
                linked_form=rec.get("linked_form"),
            )
        )
    forms = []
    for i, rec in enumerate(doc.get("forms", [])):
        where = f"forms[{i}]"
        for key in ("id", "fields", "endpoint"):
            if key not in rec:
                raise KbError(f"{where}: missing '{key}'")
        fields = []
        for j, fd in enumerate(rec["fields"]):
            fwhere = f"{where}.fields[{j}]"
            for key in ("name", "prompt"):
                if key not in fd:
                    raise KbError(f"{fwhere}: missing '{key}'")
            allowed = fd.get("allowed")
            fields.append(
                FieldDef(
                    name=str(fd["name"]),
                    prompt=str(fd["prompt"]),
                    allowed=tuple(str(v) for v in allowed) if allowed is not None else None,
                    required=bool(fd.get("required", True)),
                )
            )
        forms.append(FormSchema(id=str(rec["id"]), fields=tuple(fields), endpoint=str(rec["endpoint"])))
    lexicon = []
    for i, rec in enumerate(doc.get("lexicon", [])):
        where = f"lexicon[{i}]"
        for key in ("phrase", "field", "value"):
            if key not in rec:
                raise KbError(f"{where}: missing '{key}'")
        lexicon.append(
            LexiconEntry(
                phrase=_phrase(rec["phrase"], f"{where}.phrase"),
                field=str(rec["field"]),
                value=str(rec["value"]),
            )
        )
    return validate_kb(KnowledgeBase(tuple(intents), tuple(forms), tuple(lexicon)))


def load_kb(path: str | os.PathLike) -> KnowledgeBase:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise KbError(f"{path}: invalid JSON: {exc}") from None
    try:
        return kb_from_dict(doc)
    except KbError as exc:
        raise KbError(f"{path}: {exc}") from None
