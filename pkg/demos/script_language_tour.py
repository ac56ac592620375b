"""The motion-script language: parse, pretty-print, execute, trace.

Programs are plain text, one instruction per line (MOVEJ, MOVEL, OPEN,
CLOSE, WAIT, LABEL, JMP, CALLWS); see docs/tp_language.md for the
grammar.  Execution is tick-based and fully deterministic.
"""
from workcell.robot import ParseError, default_model, home_state, parse_tp, pretty_print, run_program
from workcell.vision.scene import Scene, SceneObject

SCRIPT = """
; pick the pod at (0.34, 0.0) and drop it near the cell edge
MOVEL 0.34 0.0  0.07 3.141592653589793 0 0   ; approach from above
MOVEL 0.34 0.0  0.02 3.141592653589793 0 0   ; descend
CLOSE
MOVEL 0.34 0.0  0.07 3.141592653589793 0 0   ; lift
MOVEL 0.26 -0.1 0.02 3.141592653589793 0 0   ; carry to the drop zone
OPEN
"""

# Inline comments are not part of the grammar: strip them first.
text = "\n".join(line.split(";")[0].rstrip() for line in SCRIPT.splitlines())
program = parse_tp(text)
print(f"parsed {len(program)} instructions; canonical form:\n")
print(pretty_print(program))

model = default_model()
scene = Scene(
    extent=((0.22, -0.12), (0.46, 0.12)),
    objects=[SceneObject("pod-1", "pod_dark", (0.34, 0.0), 0.03, "pod_dark")],
)
trace = run_program(model, home_state(model), program, scene)
print(f"executed in {trace[-1].tick} ticks")
print("pod ended at:", scene.get("pod-1").position)

events = [(e.tick, e.event) for e in trace if e.event]
print("events:", events)

# Parse errors carry the line and column of the first offense.
try:
    parse_tp("MOVEJ 0 0 0 0 0 0\nJMP nowhere\n")
except ParseError as exc:
    print(f"\nrejected bad script -> line {exc.line}, col {exc.col}: {exc}")
