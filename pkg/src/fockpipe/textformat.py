"""Line-oriented text format for circuits.

::

    # comment
    mode a = coherent(1.2, 0)
    mode b = vacuum
    mode c = fock(1)
    bs(pi/4, 3*pi/2) a b
    kerr(pi/2) a
    tmsq(0.05, first) a c
    addphoton b
    detect c in {0, 1}

Numeric arguments are arithmetic expressions over literals and ``pi`` using
``+ - * /`` and parentheses. Photon counts are plain non-negative integers.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass

from .circuit import Circuit, Coherent, Detection, Element, Fock, ModeDecl, Vacuum
from .fock import (
    FIRST_ORDER_G_LIMIT,
    BeamSplitter,
    Kerr,
    PhotonAdd,
    SqueezerOrder,
    TwoModeSqueezer,
)

SYNTAX = "SYNTAX"
UNKNOWN_DIRECTIVE = "UNKNOWN_DIRECTIVE"
UNKNOWN_MODE = "UNKNOWN_MODE"
BAD_NUMBER = "BAD_NUMBER"
BAD_PARAMETER = "BAD_PARAMETER"
DUPLICATE_MODE = "DUPLICATE_MODE"
REPEATED_MODE = "REPEATED_MODE"
USE_AFTER_DETECT = "USE_AFTER_DETECT"
DUPLICATE_DETECT = "DUPLICATE_DETECT"

NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
COUNT = re.compile(r"[0-9]+")
MAX_COUNT = 10**6


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


class CircuitParseError(ValueError):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic

    @property
    def code(self) -> str:
        return self.diagnostic.code


class _Fail(Exception):
    def __init__(self, code, message, col):
        self.code, self.message, self.col = code, message, col


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_node(node, col0):
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _eval_node(node.left, col0)
        right = _eval_node(node.right, col0)
        if isinstance(node.op, ast.Div) and right == 0.0:
            raise _Fail(BAD_NUMBER, "division by zero", col0 + node.col_offset)
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_node(node.operand, col0))
    raise _Fail(BAD_NUMBER, "only numbers, pi, + - * / and parentheses are allowed",
                col0 + getattr(node, "col_offset", 0))


def eval_number(text: str, col: int = 0) -> float:
    """Evaluate a ``pi`` expression such as ``3*pi/2``; ``col`` is the 0-based offset of ``text``."""
    stripped = text.strip()
    lead = col + len(text) - len(text.lstrip())
    if not stripped:
        raise _Fail(BAD_NUMBER, "missing number", lead)
    try:
        tree = ast.parse(stripped, mode="eval")
    except SyntaxError as exc:
        offset = (exc.offset or 1) - 1
        raise _Fail(BAD_NUMBER, f"malformed number {stripped!r}", lead + max(offset, 0)) from None
    except Exception:
        raise _Fail(BAD_NUMBER, f"malformed number {stripped!r}", lead) from None
    try:
        value = _eval_node(tree.body, lead)
    except _Fail:
        raise
    except Exception:
        raise _Fail(BAD_NUMBER, f"cannot evaluate {stripped!r}", lead) from None
    if not math.isfinite(value):
        raise _Fail(BAD_NUMBER, f"{stripped!r} is not finite", lead)
    return value


class _Line:
    """Cursor over one source line; columns are 0-based internally."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\f\v":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str):
        if self.peek() != char:
            found = self.peek() or "end of line"
            raise _Fail(SYNTAX, f"expected {char!r}, found {found!r}", self.pos)
        self.pos += 1

    def name(self, what: str = "name") -> tuple[str, int]:
        self.skip()
        m = NAME.match(self.text, self.pos)
        if not m:
            raise _Fail(SYNTAX, f"expected {what}", self.pos)
        self.pos = m.end()
        return m.group(), m.start()

    def count(self) -> int:
        self.skip()
        m = COUNT.match(self.text, self.pos)
        if not m:
            raise _Fail(BAD_NUMBER, "expected a non-negative integer", self.pos)
        if len(m.group()) > 7 or int(m.group()) > MAX_COUNT:
            raise _Fail(BAD_NUMBER, f"photon count {m.group()} is too large", m.start())
        self.pos = m.end()
        return int(m.group())

    def args(self) -> list[tuple[str, int]]:
        """Parenthesized comma-separated arguments as ``(text, col)`` pairs."""
        self.expect("(")
        out, depth, start = [], 0, self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    out.append((self.text[start:self.pos], start))
                    self.pos += 1
                    return out
                depth -= 1
            elif ch == "," and depth == 0:
                out.append((self.text[start:self.pos], start))
                start = self.pos + 1
            self.pos += 1
        raise _Fail(SYNTAX, "unclosed '('", self.pos)

    def finish(self):
        if not self.at_end():
            raise _Fail(SYNTAX, f"unexpected text {self.text[self.pos:]!r}", self.pos)


def _nargs(args, n, what, col):
    if len(args) != n:
        raise _Fail(SYNTAX, f"{what} takes {n} argument(s), got {len(args)}", col)


class _Parser:
    def __init__(self):
        self.modes: list[ModeDecl] = []
        self.elements: list[Element] = []
        self.detections: list[Detection] = []
        self.detected: set[str] = set()

    def known(self, name, col, *, for_element=True):
        if name not in {m.name for m in self.modes}:
            raise _Fail(UNKNOWN_MODE, f"mode {name!r} is not declared", col)
        if for_element and name in self.detected:
            raise _Fail(USE_AFTER_DETECT, f"mode {name!r} is used after its detection", col)

    def targets(self, cur: _Line, n: int):
        names = []
        for _ in range(n):
            name, col = cur.name("mode name")
            self.known(name, col)
            if name in names:
                raise _Fail(REPEATED_MODE, f"mode {name!r} appears twice", col)
            names.append(name)
        cur.finish()
        return tuple(names)

    def statement(self, cur: _Line, lineno: int):
        word, col = cur.name("directive")
        if word == "mode":
            self.mode_decl(cur)
        elif word == "bs":
            args = cur.args()
            _nargs(args, 2, "bs", col)
            theta, phi = (eval_number(t, c) for t, c in args)
            self.elements.append(Element(BeamSplitter(theta, phi), self.targets(cur, 2), lineno))
        elif word == "kerr":
            args = cur.args()
            _nargs(args, 1, "kerr", col)
            chi = eval_number(*args[0])
            self.elements.append(Element(Kerr(chi), self.targets(cur, 1), lineno))
        elif word == "tmsq":
            self.squeezer(cur, col, lineno)
        elif word == "addphoton":
            self.elements.append(Element(PhotonAdd(), self.targets(cur, 1), lineno))
        elif word == "detect":
            self.detection(cur, lineno)
        else:
            raise _Fail(UNKNOWN_DIRECTIVE, f"unknown directive {word!r}", col)

    def mode_decl(self, cur: _Line):
        name, col = cur.name("mode name")
        if name in {m.name for m in self.modes}:
            raise _Fail(DUPLICATE_MODE, f"mode {name!r} is already declared", col)
        cur.expect("=")
        kind, kcol = cur.name("initial state")
        if kind == "vacuum":
            init = Vacuum()
        elif kind == "coherent":
            args = cur.args()
            _nargs(args, 2, "coherent", kcol)
            re_, im_ = (eval_number(t, c) for t, c in args)
            init = Coherent(complex(re_, im_))
        elif kind == "fock":
            cur.expect("(")
            n = cur.count()
            cur.expect(")")
            init = Fock(n)
        else:
            raise _Fail(SYNTAX, f"unknown initial state {kind!r}", kcol)
        cur.finish()
        self.modes.append(ModeDecl(name, init))

    def squeezer(self, cur: _Line, col: int, lineno: int):
        args = cur.args()
        if len(args) not in (1, 2):
            raise _Fail(SYNTAX, f"tmsq takes 1 or 2 arguments, got {len(args)}", col)
        g = eval_number(*args[0])
        order = SqueezerOrder.FIRST
        if len(args) == 2:
            text, acol = args[1]
            word = text.strip()
            if word not in ("first", "exact"):
                lead = acol + len(text) - len(text.lstrip())
                raise _Fail(SYNTAX, f"squeezer order must be 'first' or 'exact', got {word!r}", lead)
            order = SqueezerOrder(word)
        if order is SqueezerOrder.FIRST and abs(g) >= FIRST_ORDER_G_LIMIT:
            lead = args[0][1] + len(args[0][0]) - len(args[0][0].lstrip())
            raise _Fail(BAD_PARAMETER, f"|g| must be below {FIRST_ORDER_G_LIMIT} at first order", lead)
        self.elements.append(Element(TwoModeSqueezer(g, order), self.targets(cur, 2), lineno))

    def detection(self, cur: _Line, lineno: int):
        name, col = cur.name("mode name")
        self.known(name, col, for_element=False)
        if name in self.detected:
            raise _Fail(DUPLICATE_DETECT, f"mode {name!r} is already detected", col)
        word, wcol = cur.name("'in'")
        if word != "in":
            raise _Fail(SYNTAX, "expected 'in'", wcol)
        cur.expect("{")
        counts = [cur.count()]
        while cur.peek() == ",":
            cur.pos += 1
            counts.append(cur.count())
        cur.expect("}")
        cur.finish()
        self.detected.add(name)
        self.detections.append(Detection(name, tuple(sorted(set(counts))), lineno))


def parse_circuit(text: str) -> Circuit:
    """Parse circuit text.

    Raises:
        CircuitParseError: with a :class:`Diagnostic` carrying a code and a
            1-based line and column.
    """
    parser = _Parser()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        cur = _Line(line)
        if cur.at_end():
            continue
        try:
            parser.statement(cur, lineno)
        except _Fail as fail:
            raise CircuitParseError(Diagnostic(fail.code, fail.message, lineno, fail.col + 1)) from None
    return Circuit(tuple(parser.modes), tuple(parser.elements), tuple(parser.detections))


def _num(x: float) -> str:
    return repr(float(x))


def unparse(circuit: Circuit) -> str:
    """Canonical text for ``circuit``; ``parse_circuit(unparse(c)) == c``."""
    lines = []
    for decl in circuit.modes:
        init = decl.initial
        if isinstance(init, Coherent):
            rhs = f"coherent({_num(init.alpha.real)}, {_num(init.alpha.imag)})"
        elif isinstance(init, Fock):
            rhs = f"fock({init.n})"
        else:
            rhs = "vacuum"
        lines.append(f"mode {decl.name} = {rhs}")
    for el in circuit.elements:
        op, targets = el.op, " ".join(el.modes)
        if isinstance(op, BeamSplitter):
            lines.append(f"bs({_num(op.theta)}, {_num(op.phi)}) {targets}")
        elif isinstance(op, Kerr):
            lines.append(f"kerr({_num(op.chi)}) {targets}")
        elif isinstance(op, TwoModeSqueezer):
            lines.append(f"tmsq({_num(op.g)}, {op.order.value}) {targets}")
        elif isinstance(op, PhotonAdd):
            lines.append(f"addphoton {targets}")
        else:
            raise TypeError(f"cannot unparse {op!r}")
    for det in circuit.detections:
        lines.append(f"detect {det.mode} in {{{', '.join(str(n) for n in det.outcomes)}}}")
    return "\n".join(lines) + ("\n" if lines else "")
