"""Conversational layer: intent recognition and form slot filling."""

from .engine import (
    COMPLETED,
    DEFAULT_INTENT_THRESHOLD,
    DialogueConfig,
    DispatchRecord,
    FormIncomplete,
    FormState,
    IntentScore,
    Prompt,
    Reply,
    Session,
    UnresolvableAnswer,
    answer_field,
    auto_fill,
    dispatch_form,
    handle_turn,
    next_prompt,
    normalize_utterance,
    recognize_intent,
)
from .kb import (
    FieldDef,
    FormSchema,
    IntentDef,
    KbError,
    KnowledgeBase,
    LexiconEntry,
    kb_from_dict,
    load_kb,
    validate_kb,
)

__all__ = [
    "COMPLETED",
    "DEFAULT_INTENT_THRESHOLD",
    "DialogueConfig",
    "DispatchRecord",
    "FieldDef",
    "FormIncomplete",
    "FormSchema",
    "FormState",
    "IntentDef",
    "IntentScore",
    "KbError",
    "KnowledgeBase",
    "LexiconEntry",
    "Prompt",
    "Reply",
    "Session",
    "UnresolvableAnswer",
    "answer_field",
    "auto_fill",
    "dispatch_form",
    "handle_turn",
    "kb_from_dict",
    "load_kb",
    "next_prompt",
    "normalize_utterance",
    "recognize_intent",
    "validate_kb",
]
