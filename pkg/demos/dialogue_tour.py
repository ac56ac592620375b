"""Conversational form filling over the coffee knowledge base.

An utterance is tokenized and matched against intent trigger phrases;
the winning intent opens its linked form, which is auto-filled from the
same utterance.  Whatever is still missing is prompted for, one field at
a time, and a completed form dispatches its values to the endpoint.
"""
from workcell.dialogue import Session, handle_turn, load_kb, normalize_utterance, recognize_intent
from workcell.scenarios import data_path

kb = load_kb(data_path("kb", "coffee.json"))

utterance = "i want a strong coffee with no sugar"
tokens = normalize_utterance(utterance)
print("tokens:", tokens)
print("intent ranking:", [(r.intent_id, round(r.score, 3)) for r in recognize_intent(tokens, kb)])


def chat(turns):
    session = Session("demo")
    for tick, text in enumerate(turns, start=1):
        session, reply = handle_turn(session, text, kb, tick=tick)
        print(f"  you> {text}")
        print(f"  bot> {reply.text}")
        if reply.dispatch:
            print(f"  === dispatched to {reply.dispatch.endpoint}: {reply.dispatch.params}")
    return session


print("\n-- order with two missing fields (two prompts expected) --")
chat(["i want a strong coffee with no sugar", "balanced", "short"])

print("\n-- everything in one utterance (no prompts) --")
chat(["make me a short strong coffee with balanced aroma and no sugar"])

print("\n-- invalid answer triggers a re-prompt, state is kept --")
chat(["make me a coffee", "purple", "mild", "light", "1", "long"])
