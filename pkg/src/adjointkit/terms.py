"""Symbolic terms, the assumption vocabulary, and the term grammar.

Terms use the same infix syntax everywhere (scenario files, CLI output,
structured proofs):

    t ::= name | bot | top | ~t | t /\\ t | t \\/ t
        | f[A](t) | fi[A](t) | K[A](t) | B[A](t) | CK[A,B](t) | CK[A,B:4](t)
        | upd[a](t) | after[a](t)

Action positions inside upd/after admit f'[A](a): the appearance of action
a to agent A, introduced by the no-miracle rule and resolved against the
assumption set. Binary operators associate to the left; ~ binds tightest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError


# -- action references ----------------------------------------------------

@dataclass(frozen=True)
class ActName:
    name: str


@dataclass(frozen=True)
class ActApp:
    """f'[agent](ref): how an action looks to an agent."""

    agent: str
    ref: "ActionRef"


ActionRef = ActName | ActApp


def render_action(ref: ActionRef) -> str:
    if isinstance(ref, ActName):
        return ref.name
    return f"f'[{ref.agent}]({render_action(ref.ref)})"


# -- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Or:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class And:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Not:
    arg: "Term"


@dataclass(frozen=True)
class App:
    """f[A](t): appearance of t to agent A."""

    agent: str
    arg: "Term"


@dataclass(frozen=True)
class Info:
    """fi[A](t): agent A is informed that t."""

    agent: str
    arg: "Term"


@dataclass(frozen=True)
class Know:
    agent: str
    arg: "Term"


@dataclass(frozen=True)
class Believe:
    agent: str
    arg: "Term"


@dataclass(frozen=True)
class CK:
    """Common knowledge in a group; depth bounds symbolic unfolding.

    depth None means the exact fixpoint (semantic evaluation only).
    """

    agents: tuple[str, ...]
    arg: "Term"
    depth: int | None = None


@dataclass(frozen=True)
class Upd:
    """upd[a](t): update of t along action a."""

    action: ActionRef
    arg: "Term"


@dataclass(frozen=True)
class After:
    """after[a](t): after action a, t holds."""

    action: ActionRef
    arg: "Term"


Term = Atom | Bot | Top | Or | And | Not | App | Info | Know | Believe | CK | Upd | After


@dataclass(frozen=True)
class Sequent:
    lhs: Term
    rhs: Term

    def render(self) -> str:
        return f"{render_term(self.lhs)} |= {render_term(self.rhs)}"


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (Or, And)):
        return (t.left, t.right)
    if isinstance(t, (Not, App, Info, Know, Believe, CK, Upd, After)):
        return (t.arg,)
    return ()


def or_spine(t: Term) -> tuple[Term, ...]:
    """Maximal flattening of a term along Or."""
    if isinstance(t, Or):
        return or_spine(t.left) + or_spine(t.right)
    return (t,)


def and_spine(t: Term) -> tuple[Term, ...]:
    if isinstance(t, And):
        return and_spine(t.left) + and_spine(t.right)
    return (t,)


# -- rendering ----------------------------------------------------------------

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def _prec(t: Term) -> int:
    if isinstance(t, Or):
        return _PREC_OR
    if isinstance(t, And):
        return _PREC_AND
    if isinstance(t, Not):
        return _PREC_UNARY
    return 4


def render_term(t: Term) -> str:
    def rec(t, parent_prec):
        p = _prec(t)
        if isinstance(t, Atom):
            s = t.name
        elif isinstance(t, Bot):
            s = "bot"
        elif isinstance(t, Top):
            s = "top"
        elif isinstance(t, Or):
            s = f"{rec(t.left, _PREC_OR)} \\/ {rec(t.right, _PREC_OR + 1)}"
        elif isinstance(t, And):
            s = f"{rec(t.left, _PREC_AND)} /\\ {rec(t.right, _PREC_AND + 1)}"
        elif isinstance(t, Not):
            s = f"~{rec(t.arg, _PREC_UNARY + 1)}"
        elif isinstance(t, App):
            s = f"f[{t.agent}]({rec(t.arg, 0)})"
        elif isinstance(t, Info):
            s = f"fi[{t.agent}]({rec(t.arg, 0)})"
        elif isinstance(t, Know):
            s = f"K[{t.agent}]({rec(t.arg, 0)})"
        elif isinstance(t, Believe):
            s = f"B[{t.agent}]({rec(t.arg, 0)})"
        elif isinstance(t, CK):
            agents = ",".join(t.agents)
            depth = f":{t.depth}" if t.depth is not None else ""
            s = f"CK[{agents}{depth}]({rec(t.arg, 0)})"
        elif isinstance(t, Upd):
            s = f"upd[{render_action(t.action)}]({rec(t.arg, 0)})"
        elif isinstance(t, After):
            s = f"after[{render_action(t.action)}]({rec(t.arg, 0)})"
        else:
            raise TypeError(f"not a term: {t!r}")
        return f"({s})" if p < parent_prec else s

    return rec(t, 0)


# -- assumptions --------------------------------------------------------------

@dataclass(frozen=True)
class Assumptions:
    """Symbolic hypotheses the derivation engine may cite.

    appearance_defs maps (agent, atom) to the defining term of f_A(atom);
    action_appearance maps (agent, action) to the appeared action name;
    kernels maps an action to the atoms it annihilates; facts and
    communication list fact atoms and communication actions.
    """

    appearance_defs: dict = field(default_factory=dict)
    action_appearance: dict = field(default_factory=dict)
    kernels: dict = field(default_factory=dict)
    facts: frozenset = frozenset()
    communication: frozenset = frozenset()
    agents: frozenset = frozenset()
    actions: frozenset = frozenset()
    atoms: frozenset = frozenset()

    def kernel_atoms(self, action: str) -> frozenset:
        return self.kernels.get(action, frozenset())


# -- parsing --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*'?|[0-9]+)|(?P<op>\\/|/\\|\|=|->|[()\[\],:~]))"
)

_MODALS = {"f", "fi", "K", "B", "CK", "upd", "after"}


@dataclass(frozen=True)
class _Token:
    kind: str   # "name" | "op" | "end"
    text: str
    column: int


class _TermParser:
    def __init__(self, text: str, line: int = 1, column_offset: int = 0):
        self.text = text
        self.line = line
        self.offset = column_offset
        self.tokens = self._tokenize()
        self.pos = 0

    def _tokenize(self):
        out, i = [], 0
        while i < len(self.text):
            m = _TOKEN_RE.match(self.text, i)
            if m is None:
                stripped = self.text[i:].lstrip()
                if not stripped:
                    break
                col = self.offset + len(self.text) - len(stripped) + 1
                raise ParseError(self.line, col, f"unexpected character {stripped[0]!r}")
            kind = "name" if m.group("name") else "op"
            out.append(_Token(kind, m.group(kind), self.offset + m.start(kind) + 1))
            i = m.end()
        out.append(_Token("end", "", self.offset + len(self.text) + 1))
        return out

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            got = repr(tok.text) if tok.kind != "end" else "end of input"
            raise ParseError(self.line, tok.column, f"found {got}", expected=repr(text))
        return tok

    def fail(self, message: str, expected=None):
        raise ParseError(self.line, self.peek().column, message, expected=expected)

    # grammar

    def parse_term(self) -> Term:
        t = self.parse_and()
        while self.peek().text == "\\/":
            self.next()
            t = Or(t, self.parse_and())
        return t

    def parse_and(self) -> Term:
        t = self.parse_unary()
        while self.peek().text == "/\\":
            self.next()
            t = And(t, self.parse_unary())
        return t

    def parse_unary(self) -> Term:
        if self.peek().text == "~":
            self.next()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Term:
        tok = self.peek()
        if tok.text == "(":
            self.next()
            t = self.parse_term()
            self.expect(")")
            return t
        if tok.kind != "name":
            self.fail("expected a term", expected="name, '~' or '('")
        self.next()
        head = tok.text
        if head == "bot":
            return Bot()
        if head == "top":
            return Top()
        if head in _MODALS and self.peek().text == "[":
            return self._parse_modal(head)
        if self.peek().text == "[":
            raise ParseError(self.line, tok.column, f"unknown operator {head!r}")
        return Atom(head)

    def _parse_name(self) -> str:
        tok = self.next()
        if tok.kind != "name":
            raise ParseError(self.line, tok.column, "expected a name")
        return tok.text

    def _parse_action_ref(self) -> ActionRef:
        tok = self.next()
        if tok.kind != "name":
            raise ParseError(self.line, tok.column, "expected an action")
        if tok.text == "f'":
            self.expect("[")
            agent = self._parse_name()
            self.expect("]")
            self.expect("(")
            inner = self._parse_action_ref()
            self.expect(")")
            return ActApp(agent, inner)
        return ActName(tok.text)

    def _parse_modal(self, head: str) -> Term:
        self.expect("[")
        if head in ("upd", "after"):
            ref = self._parse_action_ref()
            self.expect("]")
            self.expect("(")
            arg = self.parse_term()
            self.expect(")")
            return Upd(ref, arg) if head == "upd" else After(ref, arg)
        if head == "CK":
            agents = [self._parse_name()]
            while self.peek().text == ",":
                self.next()
                agents.append(self._parse_name())
            depth = None
            if self.peek().text == ":":
                self.next()
                tok = self.next()
                if tok.kind != "name" or not tok.text.isdigit():
                    raise ParseError(self.line, tok.column, "expected a depth bound")
                depth = int(tok.text)
            self.expect("]")
            self.expect("(")
            arg = self.parse_term()
            self.expect(")")
            return CK(tuple(agents), arg, depth)
        agent = self._parse_name()
        self.expect("]")
        self.expect("(")
        arg = self.parse_term()
        self.expect(")")
        ctor = {"f": App, "fi": Info, "K": Know, "B": Believe}[head]
        return ctor(agent, arg)

    def parse_entailment(self) -> Sequent:
        lhs = self.parse_term()
        self.expect("|=")
        rhs = self.parse_term()
        return Sequent(lhs, rhs)

    def finish(self):
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(self.line, tok.column, f"trailing input {tok.text!r}")


def parse_term(text: str, line: int = 1, column_offset: int = 0) -> Term:
    p = _TermParser(text, line, column_offset)
    t = p.parse_term()
    p.finish()
    return t


def parse_entailment(text: str, line: int = 1, column_offset: int = 0) -> Sequent:
    p = _TermParser(text, line, column_offset)
    s = p.parse_entailment()
    p.finish()
    return s
