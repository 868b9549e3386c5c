"""Reader and writer for the small QASM dialect used by the solver listings.

Statements end with ``;`` and newlines are plain whitespace, so a statement may
wrap across lines.  Comments start with ``#`` or ``//`` and run to the end of
the line.  Supported statements::

    qreg q[N];   creg c[M];
    h q[0];   cry(-pi/8) q[1],q[2];   ccx q[0],q[1],q[2];
    swap q[1],q[4];   barrier q[5];   measure q[3] -> c[3];

Angles are ``[-] (pi | number) [ / integer | * number ]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .gates import Circuit, CircuitError, GateKind, GateOp

__all__ = ["ParseError", "ParseErrorKind", "parse", "serialize", "GATE_NAMES"]


class ParseErrorKind(enum.Enum):
    UNKNOWN_GATE = "UnknownGate"
    BAD_ARITY = "BadArity"
    BAD_EXPRESSION = "BadExpression"
    BAD_REGISTER = "BadRegister"
    SYNTAX = "Syntax"


class ParseError(Exception):
    def __init__(self, kind: ParseErrorKind, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {kind.value}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column


GATE_NAMES = {
    "h": GateKind.H,
    "x": GateKind.X,
    "rx": GateKind.RX,
    "ry": GateKind.RY,
    "rz": GateKind.RZ,
    "p": GateKind.P,
    "u1": GateKind.P,
    "swap": GateKind.SWAP,
    "cx": GateKind.CX,
    "ch": GateKind.CH,
    "cry": GateKind.CRY,
    "crz": GateKind.CRZ,
    "cp": GateKind.CP,
    "cu1": GateKind.CP,
    "ccx": GateKind.CCX,
}

_MAX_REGISTER = 64


@dataclass(frozen=True)
class _Token:
    kind: str  # "id", "num", "sym", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("id", text[i:j], line, start_col))
        elif ch.isascii() and (ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit())):
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isascii() and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isascii() and text[k].isdigit():
                    while k < n and text[k].isascii() and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(_Token("num", text[i:j], line, start_col))
        elif text.startswith("->", i):
            j = i + 2
            tokens.append(_Token("sym", "->", line, start_col))
        elif ch in ";,()[]-/*":
            j = i + 1
            tokens.append(_Token("sym", ch, line, start_col))
        else:
            raise ParseError(ParseErrorKind.SYNTAX, f"unexpected character {ch!r}", line, col)
        col += j - i
        i = j
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qreg: Optional[tuple[str, int]] = None
        self.creg: Optional[tuple[str, int]] = None
        self.ops: list[GateOp] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, kind, message, tok=None):
        tok = tok or self.tok
        return ParseError(kind, message, tok.line, tok.col)

    def advance(self) -> _Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind not in ("sym", "id"):
            found = self.tok.text or "end of input"
            raise self.error(ParseErrorKind.SYNTAX, f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self) -> Circuit:
        while self.tok.kind != "eof":
            self.statement()
        if self.qreg is None:
            raise self.error(ParseErrorKind.BAD_REGISTER, "no qreg declared")
        return Circuit(self.qreg[1], self.creg[1] if self.creg else 0, tuple(self.ops))

    def statement(self):
        tok = self.tok
        if tok.kind != "id":
            raise self.error(ParseErrorKind.SYNTAX, f"expected a statement, found {tok.text or 'end of input'!r}")
        name = tok.text
        if name in ("qreg", "creg"):
            self.declaration(name)
        elif name == "measure":
            self.measure()
        elif name == "barrier":
            self.barrier()
        elif name in GATE_NAMES:
            self.gate(GATE_NAMES[name])
        else:
            raise self.error(ParseErrorKind.UNKNOWN_GATE, f"unknown gate {name!r}")

    def declaration(self, which: str):
        tok = self.advance()
        name_tok = self.tok
        if name_tok.kind != "id":
            raise self.error(ParseErrorKind.SYNTAX, "expected a register name")
        self.advance()
        self.expect("[")
        size_tok = self.tok
        if size_tok.kind != "num" or not size_tok.text.isdigit():
            raise self.error(ParseErrorKind.BAD_REGISTER, "register size must be an integer")
        self.advance()
        size = int(size_tok.text)
        self.expect("]")
        self.expect(";")
        if which == "qreg":
            if self.qreg is not None:
                raise self.error(ParseErrorKind.BAD_REGISTER, "only one qreg is supported", tok)
            if not 1 <= size <= _MAX_REGISTER:
                raise self.error(ParseErrorKind.BAD_REGISTER, f"qreg size {size} not in 1..{_MAX_REGISTER}", size_tok)
            self.qreg = (name_tok.text, size)
        else:
            if self.creg is not None:
                raise self.error(ParseErrorKind.BAD_REGISTER, "only one creg is supported", tok)
            if size > _MAX_REGISTER:
                raise self.error(ParseErrorKind.BAD_REGISTER, f"creg size {size} exceeds {_MAX_REGISTER}", size_tok)
            self.creg = (name_tok.text, size)

    def reference(self, register: Optional[tuple[str, int]], what: str) -> int:
        tok = self.tok
        if register is None:
            raise self.error(ParseErrorKind.BAD_REGISTER, f"no {what} declared")
        if tok.kind != "id":
            raise self.error(ParseErrorKind.SYNTAX, f"expected a {what} reference")
        if tok.text != register[0]:
            raise self.error(ParseErrorKind.BAD_REGISTER, f"unknown register {tok.text!r}")
        self.advance()
        self.expect("[")
        idx_tok = self.tok
        if idx_tok.kind != "num" or not idx_tok.text.isdigit():
            raise self.error(ParseErrorKind.BAD_REGISTER, "register index must be an integer")
        self.advance()
        self.expect("]")
        index = int(idx_tok.text)
        if index >= register[1]:
            raise self.error(
                ParseErrorKind.BAD_REGISTER,
                f"index {index} out of range for {register[0]}[{register[1]}]", idx_tok)
        return index

    def qubit_list(self) -> list[int]:
        qubits = [self.reference(self.qreg, "qreg")]
        while self.tok.text == "," and self.tok.kind == "sym":
            self.advance()
            qubits.append(self.reference(self.qreg, "qreg"))
        return qubits

    def make(self, tok: _Token, kind: GateKind, qubits, angle=None, clbit=None) -> GateOp:
        try:
            return GateOp(kind, tuple(qubits), angle, clbit)
        except CircuitError as exc:
            raise self.error(ParseErrorKind.BAD_ARITY, str(exc), tok) from None

    def gate(self, kind: GateKind):
        name_tok = self.advance()
        angle = None
        if self.tok.kind == "sym" and self.tok.text == "(":
            if not kind.parameterized:
                raise self.error(ParseErrorKind.BAD_ARITY, f"{name_tok.text} takes no angle")
            self.advance()
            angle = self.expression()
            self.expect(")")
        elif kind.parameterized:
            raise self.error(ParseErrorKind.BAD_ARITY, f"{name_tok.text} needs an angle")
        qubits = self.qubit_list()
        self.expect(";")
        if len(qubits) != kind.arity:
            raise self.error(
                ParseErrorKind.BAD_ARITY,
                f"{name_tok.text} acts on {kind.arity} qubit(s), got {len(qubits)}", name_tok)
        self.ops.append(self.make(name_tok, kind, qubits, angle))

    def barrier(self):
        tok = self.advance()
        if self.qreg is not None and self.tok.kind == "id" and self.tok.text == self.qreg[0] \
                and self.tokens[self.pos + 1].text != "[":
            self.advance()
            qubits = list(range(self.qreg[1]))
        else:
            qubits = self.qubit_list()
        self.expect(";")
        self.ops.append(self.make(tok, GateKind.BARRIER, qubits))

    def measure(self):
        tok = self.advance()
        qubit = self.reference(self.qreg, "qreg")
        self.expect("->")
        clbit = self.reference(self.creg, "creg")
        self.expect(";")
        self.ops.append(self.make(tok, GateKind.MEASURE, [qubit], clbit=clbit))

    def number(self) -> float:
        tok = self.tok
        if tok.kind == "id" and tok.text == "pi":
            self.advance()
            return math.pi
        if tok.kind == "num":
            self.advance()
            return float(tok.text)
        raise self.error(ParseErrorKind.BAD_EXPRESSION, f"expected pi or a number, found {tok.text or 'end of input'!r}")

    def expression(self) -> float:
        start = self.tok
        sign = 1.0
        if self.tok.kind == "sym" and self.tok.text == "-":
            self.advance()
            sign = -1.0
        value = self.number()
        if self.tok.kind == "sym" and self.tok.text == "/":
            self.advance()
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                raise self.error(ParseErrorKind.BAD_EXPRESSION, "divisor must be an integer")
            self.advance()
            divisor = int(tok.text)
            if divisor == 0:
                raise self.error(ParseErrorKind.BAD_EXPRESSION, "division by zero", tok)
            value = value / divisor
        elif self.tok.kind == "sym" and self.tok.text == "*":
            self.advance()
            value = value * self.number()
        value = sign * value
        if not math.isfinite(value):
            raise self.error(ParseErrorKind.BAD_EXPRESSION, "angle is not finite", start)
        if self.tok.kind == "sym" and self.tok.text not in (")",):
            raise self.error(ParseErrorKind.BAD_EXPRESSION, f"unexpected {self.tok.text!r} in angle")
        return value


def parse(source: Union[str, bytes]) -> Circuit:
    """Parse dialect text into a :class:`Circuit`.

    Raises :class:`ParseError` carrying the line and column of the offending
    token.  Byte input is decoded as UTF-8 with replacement characters.
    """
    if isinstance(source, (bytes, bytearray)):
        source = bytes(source).decode("utf-8", errors="replace")
    try:
        return _Parser(source).parse()
    except RecursionError:  # pragma: no cover - parser is iterative
        raise ParseError(ParseErrorKind.SYNTAX, "input too deeply nested", 1, 1) from None


def format_angle(angle: float) -> str:
    """Shortest dialect expression for ``angle`` that parses back exactly."""
    if angle == 0.0:
        return "0"
    sign = "-" if angle < 0 else ""
    ratio = Fraction(abs(angle) / math.pi).limit_denominator(4096)
    if ratio.numerator == 1:
        candidate = "pi" if ratio.denominator == 1 else f"pi/{ratio.denominator}"
        if math.pi / ratio.denominator == abs(angle):
            return sign + candidate
    return sign + repr(abs(angle))


def serialize(circuit: Circuit) -> str:
    """Render a circuit in the dialect; ``parse(serialize(c))`` reproduces ``c``."""
    lines = [f"qreg q[{circuit.num_qubits}];", f"creg c[{circuit.num_clbits}];"]
    for op in circuit.ops:
        name = op.kind.value
        if op.kind is GateKind.MEASURE:
            lines.append(f"measure q[{op.qubits[0]}] -> c[{op.clbit}];")
            continue
        if op.angle is not None:
            name += f"({format_angle(op.angle)})"
        lines.append(name + " " + ",".join(f"q[{q}]" for q in op.qubits) + ";")
    return "\n".join(lines)
