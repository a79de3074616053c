"""Text syntax for ring descriptions.

    spec := term { "+" term }
    term := atom { "^" t }
    atom := "F(" q ")" | "M(" n "," q ")" | "Id(" q [ "," lam ] ")"
          | "A(" n "," q1 "," q2 ")" | "Z(" p "," k ")"

Integers are decimal and whitespace is ignored. F(q)^t is t copies of F_q;
any other term raised to t is the direct sum of t copies.
"""

from __future__ import annotations

from .arith import ArithError, MixedCharacteristic, is_prime_power
from .families import ARing, DirectSum, FieldSum, Idealization, MatrixRing, ZeroMult

# Parsed integers are capped so hostile input cannot request astronomically large rings.
MAX_INT_DIGITS = 40
MAX_REPEAT = 10**6


class SpecError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message, self.offset = message, offset


class SpecSyntaxError(SpecError):
    pass


class NotAPrimePower(SpecError):
    def __init__(self, token: str, offset: int):
        super().__init__(f"{token} is not a prime power", offset)
        self.token = token


class SpecMixedCharacteristic(SpecError, MixedCharacteristic):
    pass


_ARITY = {"F": (1, 1), "M": (2, 2), "Id": (1, 2), "A": (3, 3), "Z": (2, 2)}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise SpecSyntaxError(f"expected {ch!r}, found {found}", self.pos)
        self.pos += 1

    def integer(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in "0123456789":
            self.pos += 1
        tok = self.text[start : self.pos]
        if not tok:
            raise SpecSyntaxError("expected an integer", start)
        if len(tok) > MAX_INT_DIGITS:
            raise SpecSyntaxError("integer too large", start)
        return int(tok), start

    def spec(self):
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        if self.peek():
            raise SpecSyntaxError(f"unexpected {self.peek()!r}", self.pos)
        parts = []
        for t in terms:
            parts.extend(t.parts if isinstance(t, DirectSum) else [t])
        return parts[0] if len(parts) == 1 else DirectSum(tuple(parts))

    def term(self):
        node = self.atom()
        while self.peek() == "^":
            self.pos += 1
            t, at = self.integer()
            if t < 1 or t > MAX_REPEAT:
                raise SpecSyntaxError(f"repetition count must be between 1 and {MAX_REPEAT}", at)
            size = node.t if isinstance(node, FieldSum) else len(getattr(node, "parts", (node,)))
            if size * t > MAX_REPEAT:
                raise SpecSyntaxError(f"more than {MAX_REPEAT} repeated summands", at)
            node = _repeat(node, t)
        return node

    def atom(self):
        self.skip()
        start = self.pos
        name = ""
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            name += self.text[self.pos]
            self.pos += 1
        if name not in _ARITY:
            raise SpecSyntaxError(f"unknown ring constructor {name!r}" if name else "expected a ring term", start)
        self.expect("(")
        args = [self.integer()]
        while self.peek() == ",":
            self.pos += 1
            args.append(self.integer())
        self.expect(")")
        lo, hi = _ARITY[name]
        if not lo <= len(args) <= hi:
            raise SpecSyntaxError(f"{name} takes {lo if lo == hi else f'{lo} or {hi}'} arguments, got {len(args)}", start)
        return _make(name, args, start)


def _pp(value, offset):
    pp = is_prime_power(value)
    if pp is None:
        raise NotAPrimePower(str(value), offset)
    return pp


def _positive(value, offset, what):
    if value < 1:
        raise SpecSyntaxError(f"{what} must be at least 1", offset)
    return value


def _make(name, args, start):
    vals = [v for v, _ in args]
    offs = [o for _, o in args]
    if name == "F":
        return FieldSum(_pp(vals[0], offs[0]), 1)
    if name == "M":
        return MatrixRing(_positive(vals[0], offs[0], "n"), _pp(vals[1], offs[1]))
    if name == "Id":
        lam = _positive(vals[1], offs[1], "module length") if len(vals) > 1 else 2
        return Idealization(_pp(vals[0], offs[0]), lam)
    if name == "A":
        n = _positive(vals[0], offs[0], "n")
        q1, q2 = _pp(vals[1], offs[1]), _pp(vals[2], offs[2])
        if q1.p != q2.p:
            raise SpecMixedCharacteristic(f"A({n},{q1},{q2}): {q1} and {q2} differ in characteristic", start)
        return ARing(n, q1, q2)
    if name == "Z":
        pp = _pp(vals[0], offs[0])
        if pp.d != 1:
            raise NotAPrimePower(f"{vals[0]} (Z needs a prime)", offs[0])
        return ZeroMult(pp.p, _positive(vals[1], offs[1], "k"))
    raise AssertionError(name)


def _repeat(node, t):
    if isinstance(node, FieldSum):
        return FieldSum(node.q, node.t * t)
    parts = node.parts if isinstance(node, DirectSum) else (node,)
    return DirectSum(parts * t)


def parse(text) -> object:
    """Parse a ring description. Every failure is a SpecError subclass carrying an offset."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecSyntaxError("input is not valid UTF-8", exc.start) from None
    if not isinstance(text, str):
        raise TypeError("parse expects text")
    try:
        return _Parser(text).spec()
    except SpecError:
        raise
    except (ArithError, ValueError, OverflowError) as exc:  # pragma: no cover - defensive
        raise SpecSyntaxError(str(exc), 0) from None


def format_spec(spec) -> str:
    """Canonical text; parse(format_spec(x)) == x."""
    if isinstance(spec, DirectSum):
        return "+".join(format_spec(p) for p in spec.parts)
    if isinstance(spec, FieldSum):
        return f"F({spec.q})" + (f"^{spec.t}" if spec.t > 1 else "")
    if isinstance(spec, MatrixRing):
        return f"M({spec.n},{spec.q})"
    if isinstance(spec, Idealization):
        return f"Id({spec.q})" if spec.lam == 2 else f"Id({spec.q},{spec.lam})"
    if isinstance(spec, ARing):
        return f"A({spec.n},{spec.q1},{spec.q2})"
    if isinstance(spec, ZeroMult):
        return f"Z({spec.p},{spec.k})"
    raise TypeError(f"not a ring description: {spec!r}")


format = format_spec
