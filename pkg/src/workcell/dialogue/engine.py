"""Intent recognition and conversational-form slot filling.

All operations are pure transformations: ``handle_turn`` maps a
(session, utterance) pair to a new session plus a reply, so identical
inputs always produce identical outputs and distinct sessions can be
processed in parallel.  Turn order within one session is the caller's
responsibility (the gateway serializes per session).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .kb import FieldDef, FormSchema, KnowledgeBase, LexiconEntry

DEFAULT_INTENT_THRESHOLD = 0.2

_WORD = re.compile(r"[a-z0-9]+")


class UnresolvableAnswer(ValueError):
    """The utterance matches no allowed value; caller should re-prompt."""


class FormIncomplete(RuntimeError):
    pass


@dataclass(frozen=True)
class IntentScore:
    intent_id: str
    score: float


@dataclass(frozen=True)
class FormState:
    schema_id: str
    filled: tuple[tuple[str, str], ...] = ()

    def value(self, name: str) -> str | None:
        for key, val in self.filled:
            if key == name:
                return val
        return None

    def as_dict(self) -> dict[str, str]:
        return dict(self.filled)

    def with_value(self, name: str, value: str) -> "FormState":
        return replace(self, filled=self.filled + ((name, value),))

    def cursor(self, schema: FormSchema) -> FieldDef | None:
        """First required unfilled field in schema order; None = completed."""
        done = {k for k, _ in self.filled}
        for fdef in schema.fields:
            if fdef.required and fdef.name not in done:
                return fdef
        return None

    def is_complete(self, schema: FormSchema) -> bool:
        return self.cursor(schema) is None


@dataclass(frozen=True)
class Prompt:
    field: str
    text: str


COMPLETED = "completed"


@dataclass(frozen=True)
class DispatchRecord:
    endpoint: str
    params: dict[str, str]
    form_id: str


@dataclass(frozen=True)
class Reply:
    text: str
    kind: str  # prompt | reprompt | completed | ack | fallback
    dispatch: DispatchRecord | None = None
    prompt_field: str | None = None


@dataclass(frozen=True)
class Session:
    session_id: str
    active_form: FormState | None = None
    history: tuple[tuple[str, str], ...] = ()
    dispatches: tuple[DispatchRecord, ...] = ()
    created_tick: int = 0
    updated_tick: int = 0


@dataclass(frozen=True)
class DialogueConfig:
    intent_threshold: float = DEFAULT_INTENT_THRESHOLD
    fallback_reply: str = "Sorry, I did not catch that. Could you rephrase?"
    ack_reply: str = "Noted."
    reprompt_prefix: str = "I did not get that. "
    completed_reply: str = "All set, sending your request now."


def normalize_utterance(text: str) -> list[str]:
    """Lowercase alphanumeric tokens in input order; punctuation dropped."""
    return _WORD.findall(text.lower())


def _multiset_overlap(phrase: tuple[str, ...], tokens: list[str]) -> int:
    counts: dict[str, int] = {}
    for tok in tokens:
        counts[tok] = counts.get(tok, 0) + 1
    matched = 0
    for tok in phrase:
        if counts.get(tok, 0) > 0:
            counts[tok] -= 1
            matched += 1
    return matched


def recognize_intent(tokens: list[str], kb: KnowledgeBase,
                     threshold: float = DEFAULT_INTENT_THRESHOLD) -> list[IntentScore]:
    """Rank intents by overlap with their trigger phrases.

    Per phrase: (matched tokens / phrase length) * (matched tokens /
    utterance length); an intent scores its best phrase.  Results are
    sorted by score descending with lexicographic ids breaking ties, and
    scores below ``threshold`` are omitted.
    """
    if not tokens:
        return []
    results = []
    for intent in kb.intents:
        best = 0.0
        for phrase in intent.trigger_phrases:
            matched = _multiset_overlap(phrase, tokens)
            score = (matched / len(phrase)) * (matched / len(tokens))
            best = max(best, min(1.0, score))
        if best >= threshold:
            results.append(IntentScore(intent_id=intent.id, score=best))
    results.sort(key=lambda r: (-r.score, r.intent_id))
    return results


def _occurrences(tokens: list[str], lexicon: tuple[LexiconEntry, ...]):
    """Contiguous lexicon matches as (start, -len, phrase, entry), sorted.

    Sorting makes the leftmost match win a field conflict, preferring the
    longer phrase when two matches start at the same token.
    """
    hits = []
    for entry in lexicon:
        n = len(entry.phrase)
        for start in range(len(tokens) - n + 1):
            if tuple(tokens[start : start + n]) == entry.phrase:
                hits.append((start, -n, entry.phrase, entry))
    hits.sort(key=lambda h: (h[0], h[1], h[2]))
    return hits


def auto_fill(schema: FormSchema, tokens: list[str],
              lexicon: tuple[LexiconEntry, ...]) -> FormState:
    """Pre-fill form fields from lexicon phrases found in the utterance."""
    state = FormState(schema_id=schema.id)
    names = {f.name: f for f in schema.fields}
    for _, _, _, entry in _occurrences(tokens, lexicon):
        fdef = names.get(entry.field)
        if fdef is None or state.value(entry.field) is not None:
            continue
        if fdef.allowed is not None and entry.value not in fdef.allowed:
            continue
        state = state.with_value(entry.field, entry.value)
    return state


def next_prompt(state: FormState, schema: FormSchema) -> Prompt | str:
    """The cursor field's prompt, or COMPLETED when nothing required is open."""
    cursor = state.cursor(schema)
    if cursor is None:
        return COMPLETED
    return Prompt(field=cursor.name, text=cursor.prompt)


def answer_field(state: FormState, schema: FormSchema, utterance: str,
                 lexicon: tuple[LexiconEntry, ...] = ()) -> FormState:
    """Fill the cursor field from a direct answer.

    Resolution order: lexicon phrases mapping to the cursor field, then a
    verbatim match against the allowed values.  Free-text fields store
    the stripped utterance as-is.  Raises UnresolvableAnswer (state
    unchanged) when nothing matches.
    """
    cursor = state.cursor(schema)
    if cursor is None:
        raise FormIncomplete("no open field: form already completed")
    tokens = normalize_utterance(utterance)
    if cursor.allowed is None:
        text = utterance.strip()
        if not text:
            raise UnresolvableAnswer(f"empty answer for field {cursor.name!r}")
        return state.with_value(cursor.name, text)
    for _, _, _, entry in _occurrences(tokens, lexicon):
        if entry.field == cursor.name and entry.value in cursor.allowed:
            return state.with_value(cursor.name, entry.value)
    verbatim = " ".join(tokens)
    for value in cursor.allowed:
        if verbatim == value.lower():
            return state.with_value(cursor.name, value)
    raise UnresolvableAnswer(
        f"{utterance!r} matches no allowed value of field {cursor.name!r}"
    )


def dispatch_form(state: FormState, schema: FormSchema) -> DispatchRecord:
    """Collected field values as call parameters; requires a completed form."""
    if not state.is_complete(schema):
        open_field = state.cursor(schema)
        raise FormIncomplete(f"field {open_field.name!r} still open")
    return DispatchRecord(endpoint=schema.endpoint, params=state.as_dict(), form_id=schema.id)


def handle_turn(session: Session, utterance: str, kb: KnowledgeBase,
                config: DialogueConfig = DialogueConfig(),
                tick: int = 0) -> tuple[Session, Reply]:
    """One conversational turn; returns the updated session and the reply.

    Without an active form, the top-scoring intent may open its linked
    form, auto-filled from the same utterance.  With an active form the
    utterance answers the cursor field.  A completed form dispatches
    immediately and the session's active form is cleared.
    """
    tokens = normalize_utterance(utterance)
    if session.active_form is None:
        ranked = recognize_intent(tokens, kb, config.intent_threshold)
        if not ranked:
            reply = Reply(text=config.fallback_reply, kind="fallback")
            return _record(session, utterance, reply, tick), reply
        intent = kb.intent(ranked[0].intent_id)
        if intent.linked_form is None:
            reply = Reply(text=config.ack_reply, kind="ack")
            return _record(session, utterance, reply, tick), reply
        schema = kb.form(intent.linked_form)
        state = auto_fill(schema, tokens, kb.lexicon)
        return _advance(session, utterance, state, schema, config, tick)
    schema = kb.form(session.active_form.schema_id)
    try:
        state = answer_field(session.active_form, schema, utterance, kb.lexicon)
    except UnresolvableAnswer:
        prompt = next_prompt(session.active_form, schema)
        assert isinstance(prompt, Prompt)
        reply = Reply(
            text=config.reprompt_prefix + prompt.text,
            kind="reprompt",
            prompt_field=prompt.field,
        )
        return _record(session, utterance, reply, tick), reply
    return _advance(session, utterance, state, schema, config, tick)


def _advance(session: Session, utterance: str, state: FormState, schema: FormSchema,
             config: DialogueConfig, tick: int) -> tuple[Session, Reply]:
    prompt = next_prompt(state, schema)
    if prompt == COMPLETED:
        record = dispatch_form(state, schema)
        reply = Reply(text=config.completed_reply, kind="completed", dispatch=record)
        session = replace(
            session,
            active_form=None,
            dispatches=session.dispatches + (record,),
        )
        return _record(session, utterance, reply, tick), reply
    assert isinstance(prompt, Prompt)
    reply = Reply(text=prompt.text, kind="prompt", prompt_field=prompt.field)
    session = replace(session, active_form=state)
    return _record(session, utterance, reply, tick), reply


def _record(session: Session, utterance: str, reply: Reply, tick: int) -> Session:
    return replace(
        session,
        history=session.history + ((utterance, reply.text),),
        updated_tick=tick,
    )
