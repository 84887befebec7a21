"""Concrete ASCII syntax.

::

    formula := iff
    iff     := imp ("<->" imp)*                 left associative
    imp     := or ("->" imp)?                   right associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := ("~" | "G" | "H" | "F" | "P" | "box" | "dia") unary
             | ("forall" | "exists") VAR "." formula
             | NAME "(" [term ("," term)*] ")"    predicate atom
             | term "=" term
             | "(" formula ")"
    term    := prod ("+" prod)*
    prod    := prim ("*" prim)*
    prim    := "0" | NAME | NAME "(" term ("," term)* ")" | "(" term ")"

A quantifier's scope extends as far right as possible. A bare name is a
constant when the signature declares it, otherwise a variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    App, And, Box, Const, Dia, Eq, Exists, F, Forall, Formula, G, H, Iff, Implies,
    Not, Or, P, Pred, Signature, SignatureError, SyntaxError_, Term, Var,
)

KEYWORDS = {"G", "H", "F", "P", "box", "dia", "forall", "exists"}
_PREFIX = {"~": Not, "G": G, "H": H, "F": F, "P": P, "box": Box, "dia": Dia}
_INFIX_FN = {"+": 1, "*": 2}

_TOKEN = re.compile(r"\s*(?:(<->|->|[()~&|,.=+*])|([A-Za-z_][A-Za-z0-9_']*)|(0))")


class ParseError(SyntaxError_):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass
class _Tok:
    kind: str  # "sym", "name", "zero", "end"
    text: str
    pos: int


def tokenize(text: str) -> list:
    out, i = [], 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            out.append(_Tok("end", "", i))
            return out
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        sym, name, zero = m.groups()
        start = m.start(m.lastindex)
        if sym:
            out.append(_Tok("sym", sym, start))
        elif name:
            out.append(_Tok("name", name, start))
        else:
            out.append(_Tok("zero", "0", start))
        i = m.end()


class _Parser:
    def __init__(self, text, sig, constants=()):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        # inferred arities when no signature is given
        self.funcs, self.preds = {}, {}
        self.constants = frozenset(constants)

    def save(self):
        return self.i, dict(self.funcs), dict(self.preds)

    def restore(self, state):
        self.i, self.funcs, self.preds = state[0], dict(state[1]), dict(state[2])

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text):
        return self.tok.kind in ("sym", "name") and self.tok.text == text

    def expect(self, text):
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        self.i += 1

    # formulas

    def formula(self):
        left = self.imp()
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.tok
        if tok.kind in ("sym", "name") and tok.text in _PREFIX:
            self.i += 1
            return _PREFIX[tok.text](self.unary())
        if tok.kind == "name" and tok.text in ("forall", "exists"):
            self.i += 1
            var = self.tok
            if var.kind != "name" or var.text in KEYWORDS:
                raise ParseError("expected a variable after quantifier", var.pos)
            if self.is_constant(var.text):
                raise ParseError(f"cannot quantify the constant {var.text}", var.pos)
            self.i += 1
            self.expect(".")
            body = self.formula()
            return (Forall if tok.text == "forall" else Exists)(var.text, body)
        if tok.kind == "name" and self.peek().text == "(" and self.is_predicate(tok.text):
            if self.sig is not None:
                return self.predicate()
            state = self.save()
            try:
                atom = self.predicate()
                if not (self.at("=") or self.at("+") or self.at("*")):
                    return atom
            except ParseError:
                pass
            self.restore(state)
            return self.equation()
        if self.at("("):
            state = self.save()
            try:
                return self.equation()
            except ParseError:
                self.restore(state)
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.pos)
        return self.equation()

    def equation(self):
        start = self.tok
        left = self.term()
        if not self.at("="):
            raise ParseError("term where formula expected", start.pos)
        self.i += 1
        return Eq(left, self.term())

    def predicate(self):
        name = self.tok
        self.i += 1
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.i += 1
                args.append(self.term())
        self.expect(")")
        self.check_arity("predicate", name, len(args))
        return Pred(name.text, tuple(args))

    # terms

    def term(self):
        left = self.prod()
        while self.at("+"):
            self.i += 1
            self.check_arity("function", _Tok("sym", "+", self.tok.pos), 2)
            left = App("+", (left, self.prod()))
        return left

    def prod(self):
        left = self.prim()
        while self.at("*"):
            self.i += 1
            self.check_arity("function", _Tok("sym", "*", self.tok.pos), 2)
            left = App("*", (left, self.prim()))
        return left

    def prim(self):
        tok = self.tok
        if tok.kind == "zero":
            self.i += 1
            if self.sig is not None and "0" not in self.sig.constants:
                raise ParseError("unknown constant 0", tok.pos)
            return Const("0")
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)
        self.i += 1
        if self.at("("):
            if self.sig is not None and tok.text in self.sig.predicates:
                raise ParseError(f"predicate {tok.text} used as a term", tok.pos)
            self.i += 1
            args = [self.term()]
            while self.at(","):
                self.i += 1
                args.append(self.term())
            self.expect(")")
            self.check_arity("function", tok, len(args))
            return App(tok.text, tuple(args))
        if self.is_constant(tok.text):
            return Const(tok.text)
        if self.sig is not None and (tok.text in self.sig.functions or tok.text in self.sig.predicates):
            raise ParseError(f"{tok.text} is not a constant or variable", tok.pos)
        return Var(tok.text)

    # signature handling

    def is_constant(self, name):
        if self.sig is None:
            return name in self.constants
        return name in self.sig.constants

    def is_predicate(self, name):
        if self.sig is not None:
            return name in self.sig.predicates
        return name not in self.funcs and name != "succ"

    def check_arity(self, kind, tok, n):
        if self.sig is None:
            table = self.funcs if kind == "function" else self.preds
            other = self.preds if kind == "function" else self.funcs
            if tok.text in other or tok.text in self.constants:
                raise ParseError(f"{tok.text} used both as function and predicate", tok.pos)
            if table.setdefault(tok.text, n) != n:
                raise ParseError(f"{kind} {tok.text} used with arities {table[tok.text]} and {n}", tok.pos)
            return
        table = self.sig.functions if kind == "function" else self.sig.predicates
        if tok.text not in table:
            raise ParseError(f"unknown {kind} {tok.text}", tok.pos)
        if table[tok.text] != n:
            raise ParseError(f"{kind} {tok.text} expects {table[tok.text]} arguments, got {n}", tok.pos)


def parse_formula(text: str, sig: Signature | None = None, expand: bool = False,
                  constants=()) -> Formula:
    """Parse ``text``; with ``sig=None`` the signature is inferred from usage.

    In inference mode only ``constants`` (and ``0``) are read as constants.
    ``expand=True`` returns the sugar-free core form.
    """
    p = _Parser(text, sig, constants)
    out = p.formula()
    if p.tok.kind != "end":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    if expand:
        from .syntax import normalize
        out = normalize(out)
    return out


def parse_term(text: str, sig: Signature | None = None, constants=()) -> Term:
    p = _Parser(text, sig, constants)
    out = p.term()
    if p.tok.kind != "end":
        raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return out


def infer_signature(text: str, constants=()) -> Signature:
    """Signature read off a formula, treating ``constants`` as declared constants."""
    from .syntax import symbols
    phi = parse_formula(text, None, constants=constants)
    try:
        return symbols(phi).union(Signature(frozenset(constants)))
    except SignatureError as exc:
        raise ParseError(str(exc), 0) from None


# --- printing --------------------------------------------------------------

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OP = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_PREFIX_TEXT = {Not: "~", G: "G ", H: "H ", F: "F ", P: "P ", Box: "box ", Dia: "dia "}


def print_term(t: Term, level: int = 0) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if t.fn in _INFIX_FN and len(t.args) == 2:
        mine = _INFIX_FN[t.fn]
        text = f"{print_term(t.args[0], mine)} {t.fn} {print_term(t.args[1], mine + 1)}"
        return f"({text})" if mine < level else text
    return f"{t.fn}({', '.join(print_term(a) for a in t.args)})"


def print_formula(phi: Formula, level: int = 0) -> str:
    """Canonical text with the fewest parentheses that still reparse to ``phi``."""
    if isinstance(phi, Pred):
        return f"{phi.name}({', '.join(print_term(a) for a in phi.args)})"
    if isinstance(phi, Eq):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if type(phi) in _PREFIX_TEXT:
        return _PREFIX_TEXT[type(phi)] + print_formula(phi.body, 5)
    if isinstance(phi, (Forall, Exists)):
        kw = "forall" if isinstance(phi, Forall) else "exists"
        text = f"{kw} {phi.var}. {print_formula(phi.body)}"
        return f"({text})" if level > 0 else text
    mine = _LEVEL[type(phi)]
    if isinstance(phi, Implies):
        left_level, right_level = mine + 1, mine
    else:
        left_level, right_level = mine, mine + 1
    left = print_formula(phi.left, left_level)
    right = print_formula(phi.right, right_level)
    text = f"{left} {_OP[type(phi)]} {right}"
    return f"({text})" if mine < level else text
