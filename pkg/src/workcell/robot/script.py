"""The motion-script language: parser, validator and pretty-printer.

One instruction per line, case-insensitive mnemonics, ``;`` comment
lines, blank lines ignored.  The eight instructions:

    MOVEJ q1 q2 q3 q4 q5 q6      joint-space move (radians)
    MOVEL x y z [rx ry rz]       straight-line TCP move (meters; optional
                                 rotation-vector orientation, radians)
    OPEN                         open the gripper / release
    CLOSE                        close the gripper / grasp
    WAIT n                       hold still for n ticks (n >= 1)
    LABEL name                   jump target
    JMP name                     unconditional jump
    CALLWS endpoint              emit a web-service call event

Grammar details live in docs/tp_language.md.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass


class ParseError(ValueError):
    """Script rejected; carries the 1-based line and column of the offense."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class MoveJ:
    joints: tuple[float, float, float, float, float, float]


@dataclass(frozen=True)
class MoveL:
    x: float
    y: float
    z: float
    orientation: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class Open:
    pass


@dataclass(frozen=True)
class Close:
    pass


@dataclass(frozen=True)
class Wait:
    ticks: int


@dataclass(frozen=True)
class Label:
    name: str


@dataclass(frozen=True)
class Jmp:
    name: str


@dataclass(frozen=True)
class CallWs:
    endpoint: str


Instruction = MoveJ | MoveL | Open | Close | Wait | Label | Jmp | CallWs


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    labels: dict[str, int]

    def __len__(self):
        return len(self.instructions)


_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^\d+$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
_TOKEN = re.compile(r"\S+")

_ARITY = {"MOVEJ": (6, 6), "MOVEL": (3, 6), "OPEN": (0, 0), "CLOSE": (0, 0),
          "WAIT": (1, 1), "LABEL": (1, 1), "JMP": (1, 1), "CALLWS": (1, 1)}


def _number(token: str, line: int, col: int) -> float:
    if not _NUMBER.match(token):
        raise ParseError(f"expected a number, got {token!r}", line, col)
    value = float(token)
    if not math.isfinite(value):
        raise ParseError(f"number out of range: {token!r}", line, col)
    return value


def _name(token: str, line: int, col: int) -> str:
    if not _NAME.match(token):
        raise ParseError(f"expected a name, got {token!r}", line, col)
    return token


def parse_tp(text: str) -> Program:
    """Parse script text, raising ParseError at the first offense."""
    instructions: list[Instruction] = []
    labels: dict[str, int] = {}
    jumps: list[tuple[str, int, int]] = []  # name, line, col
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith(";") or not raw.strip():
            continue
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(raw)]
        word, col = tokens[0]
        mnemonic = word.upper()
        if mnemonic not in _ARITY:
            raise ParseError(f"unknown instruction {word!r}", lineno, col)
        args = tokens[1:]
        lo, hi = _ARITY[mnemonic]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo} or {hi}"
            at = args[hi][1] if len(args) > hi else len(raw) + 1
            raise ParseError(
                f"{mnemonic} takes {want} argument(s), got {len(args)}", lineno, at
            )
        if mnemonic == "MOVEJ":
            joints = tuple(_number(t, lineno, c) for t, c in args)
            instructions.append(MoveJ(joints=joints))
        elif mnemonic == "MOVEL":
            if len(args) not in (3, 6):
                raise ParseError(
                    f"MOVEL takes 3 or 6 arguments, got {len(args)}", lineno, args[3][1]
                )
            values = [_number(t, lineno, c) for t, c in args]
            orientation = tuple(values[3:]) if len(values) == 6 else None
            instructions.append(MoveL(values[0], values[1], values[2], orientation))
        elif mnemonic == "OPEN":
            instructions.append(Open())
        elif mnemonic == "CLOSE":
            instructions.append(Close())
        elif mnemonic == "WAIT":
            token, tcol = args[0]
            if not _INTEGER.match(token) or int(token) < 1:
                raise ParseError(f"WAIT takes a positive integer, got {token!r}", lineno, tcol)
            instructions.append(Wait(ticks=int(token)))
        elif mnemonic == "LABEL":
            token, tcol = args[0]
            name = _name(token, lineno, tcol)
            if name in labels:
                raise ParseError(f"duplicate label {name!r}", lineno, tcol)
            labels[name] = len(instructions)
            instructions.append(Label(name=name))
        elif mnemonic == "JMP":
            token, tcol = args[0]
            name = _name(token, lineno, tcol)
            jumps.append((name, lineno, tcol))
            instructions.append(Jmp(name=name))
        elif mnemonic == "CALLWS":
            token, tcol = args[0]
            instructions.append(CallWs(endpoint=_name(token, lineno, tcol)))
    for name, lineno, col in jumps:
        if name not in labels:
            raise ParseError(f"undefined label {name!r}", lineno, col)
    return Program(instructions=tuple(instructions), labels=labels)


def _fmt(value: float) -> str:
    # repr round-trips floats exactly, which pretty-print relies on
    return repr(float(value))


def pretty_print(program: Program) -> str:
    """Canonical text form; reparses to an equal Program."""
    lines = []
    for instr in program.instructions:
        if isinstance(instr, MoveJ):
            lines.append("MOVEJ " + " ".join(_fmt(v) for v in instr.joints))
        elif isinstance(instr, MoveL):
            parts = [_fmt(instr.x), _fmt(instr.y), _fmt(instr.z)]
            if instr.orientation is not None:
                parts.extend(_fmt(v) for v in instr.orientation)
            lines.append("MOVEL " + " ".join(parts))
        elif isinstance(instr, Open):
            lines.append("OPEN")
        elif isinstance(instr, Close):
            lines.append("CLOSE")
        elif isinstance(instr, Wait):
            lines.append(f"WAIT {instr.ticks}")
        elif isinstance(instr, Label):
            lines.append(f"LABEL {instr.name}")
        elif isinstance(instr, Jmp):
            lines.append(f"JMP {instr.name}")
        elif isinstance(instr, CallWs):
            lines.append(f"CALLWS {instr.endpoint}")
        else:  # pragma: no cover
            raise TypeError(f"unknown instruction {instr!r}")
    return "\n".join(lines) + ("\n" if lines else "")
