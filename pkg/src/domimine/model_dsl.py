"""A small modelling language for itemset mining with solution dominance.

A model is a sequence of statements::

    such that
      (sum item in itemset . values[item]) >= min_value,
      (sum item in itemset . costs[item]) <= max_cost
    dominance_relation (fromSolution(itemset) subsetEq itemset)
                        -> (support != fromSolution(support))
    incomparability_function ascending |itemset|

The decision variables are ``itemset`` (a set of item ids) and ``support``
(its number of covering transactions). ``fromSolution(x)`` refers to the value
of ``x`` in a previously found solution and may only occur in a dominance
relation. Bare identifiers such as ``min_value`` are instance parameters
resolved at evaluation time; ``values`` and ``costs`` are the item weight
arrays and can only be indexed inside a ``sum``.

Operator precedence, loosest first: ``->`` (right associative), ``\\/``,
``/\\``, ``!``, comparisons, ``+``/``-``, unary minus. ``$`` starts a comment
running to the end of the line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, Iterator, Mapping, NamedTuple, Sequence

__all__ = [
    "DslError",
    "DslSyntaxError",
    "DslTypeError",
    "MissingIncomparability",
    "UnboundVariable",
    "UnboundSolutionVariable",
    "Expr",
    "Var",
    "FromSolution",
    "IntLit",
    "SetLit",
    "BoolLit",
    "Ident",
    "Card",
    "Sum",
    "Arith",
    "Neg",
    "Compare",
    "Not",
    "BoolOp",
    "Implies",
    "DominanceRelation",
    "IncomparabilityFn",
    "ModelSpec",
    "BlockingConstraint",
    "EvalContext",
    "parse_model",
    "parse_expr",
    "builtin_model",
    "BUILTIN_TASKS",
    "format_expr",
    "format_model",
    "type_of",
    "substitute_solution",
    "eval_expr",
    "compile_expr",
    "walk",
]


# -- errors ------------------------------------------------------------------


class DslError(ValueError):
    pass


class Pos(NamedTuple):
    line: int
    col: int

    def __str__(self):
        return f"line {self.line}, col {self.col}"


class DslSyntaxError(DslError):
    def __init__(self, message: str, pos: Pos, expected: Sequence[str] = ()):
        self.pos = pos
        self.expected = tuple(expected)
        self.detail = message
        text = f"{pos}: {message}"
        if self.expected:
            text += f" (expected {' or '.join(self.expected)})"
        super().__init__(text)

    @property
    def line(self) -> int:
        return self.pos.line

    @property
    def col(self) -> int:
        return self.pos.col


class DslTypeError(DslError):
    def __init__(self, message: str, pos: Pos | None = None):
        self.pos = pos
        super().__init__(f"{pos}: {message}" if pos else message)


class MissingIncomparability(DslError):
    pass


class UnboundVariable(DslError):
    pass


class UnboundSolutionVariable(UnboundVariable):
    pass


# -- syntax tree -------------------------------------------------------------

DECISION_VARS = ("itemset", "support")
SET_OPS = ("subsetEq", "subset", "supsetEq", "supset")
INT_OPS = ("<", "<=", ">", ">=")
EQ_OPS = ("=", "!=")


@dataclass(frozen=True)
class Expr:
    pos: Pos | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class FromSolution(Expr):
    name: str


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class SetLit(Expr):
    items: frozenset[int]


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class Card(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sum(Expr):
    """``sum var in over . array[var]``."""

    var: str
    over: Expr
    array: str


@dataclass(frozen=True)
class Arith(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Compare(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class BoolOp(Expr):
    op: str  # "/\\" or "\\/"
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Implies(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class DominanceRelation:
    body: Expr


@dataclass(frozen=True)
class IncomparabilityFn:
    direction: str  # "ascending" | "descending"
    body: Expr


@dataclass(frozen=True)
class ModelSpec:
    side_constraints: tuple[Expr, ...] = ()
    dominance: DominanceRelation | None = None
    incomparability: IncomparabilityFn | None = None

    def require_incomparability(self) -> IncomparabilityFn:
        if self.dominance is None:
            raise MissingIncomparability("model has no dominance_relation statement")
        if self.incomparability is None:
            raise MissingIncomparability("model has no incomparability_function statement")
        return self.incomparability


@dataclass(frozen=True)
class BlockingConstraint:
    body: Expr
    origin: Any = field(default=None, compare=False)


def children(e: Expr) -> Iterator[Expr]:
    for f in fields(e):
        v = getattr(e, f.name)
        if isinstance(v, Expr):
            yield v


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from walk(c)


def _rebuild(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    changes = {f.name: fn(getattr(e, f.name)) for f in fields(e) if isinstance(getattr(e, f.name), Expr)}
    return replace(e, **changes) if changes else e


# -- lexer -------------------------------------------------------------------

KEYWORDS = {
    "such", "that", "dominance_relation", "incomparability_function", "ascending", "descending",
    "sum", "in", "fromSolution", "true", "false", "itemset", "support", *SET_OPS,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\$[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|/\\|\\/|!=|<=|>=|[=<>!+\-|()\[\]{},.])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # "int", "name", "kw", "op", "eof"
    text: str
    pos: Pos


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        pos = Pos(line, i - line_start + 1)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[i]!r}", pos)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "name":
            tokens.append(Token("kw" if m.group() in KEYWORDS else "name", m.group(), pos))
        elif kind in ("int", "op"):
            tokens.append(Token(kind, m.group(), pos))
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected: Sequence[str]):
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        raise DslSyntaxError(f"unexpected {found}", self.tok.pos, expected)

    def expect(self, *texts: str) -> Token:
        if not self.at(*texts):
            self.fail([repr(t) for t in texts])
        return self.advance()

    # statements

    def model(self) -> ModelSpec:
        side: list[Expr] = []
        dominance = incomparability = None
        while self.tok.kind != "eof":
            start = self.tok
            if self.at("such"):
                self.advance()
                self.expect("that")
                side.append(self.expr())
                while self.at(","):
                    self.advance()
                    side.append(self.expr())
            elif self.at("dominance_relation"):
                self.advance()
                if dominance is not None:
                    raise DslSyntaxError("duplicate dominance_relation statement", start.pos)
                dominance = DominanceRelation(self.expr())
            elif self.at("incomparability_function"):
                self.advance()
                if incomparability is not None:
                    raise DslSyntaxError("duplicate incomparability_function statement", start.pos)
                if not self.at("ascending", "descending"):
                    self.fail(["'ascending'", "'descending'"])
                direction = self.advance().text
                incomparability = IncomparabilityFn(direction, self.expr())
            else:
                self.fail(["'such that'", "'dominance_relation'", "'incomparability_function'"])
        spec = ModelSpec(tuple(side), dominance, incomparability)
        check_model(spec)
        return spec

    # expressions, loosest binding first

    def expr(self) -> Expr:
        left = self.disjunction()
        if self.at("->"):
            pos = self.advance().pos
            return Implies(left, self.expr(), pos=pos)
        return left

    def disjunction(self) -> Expr:
        left = self.conjunction()
        while self.at("\\/"):
            pos = self.advance().pos
            left = BoolOp("\\/", left, self.conjunction(), pos=pos)
        return left

    def conjunction(self) -> Expr:
        left = self.negation()
        while self.at("/\\"):
            pos = self.advance().pos
            left = BoolOp("/\\", left, self.negation(), pos=pos)
        return left

    def negation(self) -> Expr:
        if self.at("!"):
            pos = self.advance().pos
            return Not(self.negation(), pos=pos)
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.additive()
        if self.at(*EQ_OPS, *INT_OPS, *SET_OPS):
            tok = self.advance()
            right = self.additive()
            if self.at(*EQ_OPS, *INT_OPS, *SET_OPS):
                raise DslSyntaxError("comparisons do not chain; add parentheses", self.tok.pos)
            return Compare(tok.text, left, right, pos=tok.pos)
        return left

    def additive(self) -> Expr:
        left = self.unary()
        while self.at("+", "-"):
            tok = self.advance()
            left = Arith(tok.text, left, self.unary(), pos=tok.pos)
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            pos = self.advance().pos
            return Neg(self.unary(), pos=pos)
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text), pos=tok.pos)
        if tok.kind == "name":
            self.advance()
            return Ident(tok.text, pos=tok.pos)
        if self.at("true", "false"):
            self.advance()
            return BoolLit(tok.text == "true", pos=tok.pos)
        if self.at(*DECISION_VARS):
            self.advance()
            return Var(tok.text, pos=tok.pos)
        if self.at("fromSolution"):
            self.advance()
            self.expect("(")
            if not self.at(*DECISION_VARS):
                self.fail(["'itemset'", "'support'"])
            name = self.advance().text
            self.expect(")")
            return FromSolution(name, pos=tok.pos)
        if self.at("|"):
            self.advance()
            inner = self.additive()
            self.expect("|")
            return Card(inner, pos=tok.pos)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("{"):
            self.advance()
            items = []
            if not self.at("}"):
                items.append(self._int())
                while self.at(","):
                    self.advance()
                    items.append(self._int())
            self.expect("}")
            return SetLit(frozenset(items), pos=tok.pos)
        if self.at("sum"):
            self.advance()
            var = self._name()
            self.expect("in")
            over = self.atom()
            self.expect(".")
            array = self._name()
            self.expect("[")
            index = self.tok
            if self._name() != var:
                raise DslSyntaxError(f"sum body must index by {var!r}", index.pos)
            self.expect("]")
            return Sum(var, over, array, pos=tok.pos)
        self.fail(["an integer", "an identifier", "'itemset'", "'support'", "'fromSolution'", "'|'", "'('", "'sum'"])

    def _name(self) -> str:
        if self.tok.kind != "name":
            self.fail(["an identifier"])
        return self.advance().text

    def _int(self) -> int:
        if self.tok.kind != "int":
            self.fail(["an integer"])
        return int(self.advance().text)


BUILTIN_TASKS: dict[str, str] = {
    "frequent": """\
such that
  (sum item in itemset . values[item]) >= min_value,
  (sum item in itemset . costs[item]) <= max_cost
""",
    "generator": """\
such that
  (sum item in itemset . values[item]) >= min_value,
  (sum item in itemset . costs[item]) <= max_cost
dominance_relation (fromSolution(itemset) subsetEq itemset)
                    -> (support != fromSolution(support))
incomparability_function ascending |itemset|
""",
    "closed": """\
such that
  (sum item in itemset . values[item]) >= min_value,
  (sum item in itemset . costs[item]) <= max_cost
dominance_relation (itemset subsetEq fromSolution(itemset))
                    -> (support != fromSolution(support))
incomparability_function descending |itemset|
""",
}


def parse_model(text: str) -> ModelSpec:
    """Parse model text, or expand a built-in task name (``generator``, ``closed``, ``frequent``)."""
    name = text.strip()
    if name in BUILTIN_TASKS:
        return builtin_model(name)
    return _Parser(text).model()


def builtin_model(task: str) -> ModelSpec:
    try:
        return _Parser(BUILTIN_TASKS[task]).model()
    except KeyError:
        raise DslError(f"unknown task {task!r}; choose from {', '.join(BUILTIN_TASKS)}") from None


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(["end of input"])
    return e


# -- types -------------------------------------------------------------------


def type_of(e: Expr, allow_from_solution: bool = True) -> str:
    """Infer ``"int"``, ``"set"`` or ``"bool"``; raise DslTypeError on ill-typed input."""

    def need(sub: Expr, want: str, what: str) -> None:
        got = type_of(sub, allow_from_solution)
        if got != want:
            article = "an" if want == "int" else "a"
            raise DslTypeError(f"{what} needs {article} {want} operand, got {got}", sub.pos or e.pos)

    match e:
        case Var(name) | FromSolution(name):
            if isinstance(e, FromSolution) and not allow_from_solution:
                raise DslTypeError("fromSolution(...) is only allowed in a dominance relation", e.pos)
            return "set" if name == "itemset" else "int"
        case IntLit() | Ident():
            return "int"
        case SetLit():
            return "set"
        case BoolLit():
            return "bool"
        case Card(arg):
            need(arg, "set", "|...|")
            return "int"
        case Sum(_, over, _):
            need(over, "set", "sum")
            return "int"
        case Arith(op, left, right):
            need(left, "int", f"'{op}'")
            need(right, "int", f"'{op}'")
            return "int"
        case Neg(arg):
            need(arg, "int", "unary '-'")
            return "int"
        case Compare(op, left, right):
            if op in SET_OPS:
                need(left, "set", op)
                need(right, "set", op)
            elif op in INT_OPS:
                need(left, "int", f"'{op}'")
                need(right, "int", f"'{op}'")
            else:
                lt = type_of(left, allow_from_solution)
                rt = type_of(right, allow_from_solution)
                if lt != rt or lt == "bool":
                    raise DslTypeError(f"'{op}' compares {lt} with {rt}", e.pos)
            return "bool"
        case Not(arg):
            need(arg, "bool", "'!'")
            return "bool"
        case BoolOp(op, left, right):
            need(left, "bool", f"'{op}'")
            need(right, "bool", f"'{op}'")
            return "bool"
        case Implies(left, right):
            need(left, "bool", "'->'")
            need(right, "bool", "'->'")
            return "bool"
    raise DslTypeError(f"unknown node {type(e).__name__}", e.pos)


def check_model(spec: ModelSpec) -> None:
    for c in spec.side_constraints:
        if type_of(c, allow_from_solution=False) != "bool":
            raise DslTypeError("side constraint must be boolean", c.pos)
    if spec.dominance is not None:
        body = spec.dominance.body
        if type_of(body) != "bool":
            raise DslTypeError("dominance relation must be boolean", body.pos)
        nodes = list(walk(body))
        if not any(isinstance(n, FromSolution) for n in nodes):
            raise DslTypeError("dominance relation must reference fromSolution(...)", body.pos)
        if not any(isinstance(n, Var) for n in nodes):
            raise DslTypeError("dominance relation must reference the candidate's itemset or support", body.pos)
    if spec.incomparability is not None:
        body = spec.incomparability.body
        if type_of(body, allow_from_solution=False) != "int":
            raise DslTypeError("incomparability function must be integer-valued", body.pos)
        if spec.dominance is None:
            raise DslTypeError("incomparability_function requires a dominance_relation")


# -- printing ----------------------------------------------------------------


def format_expr(e: Expr) -> str:
    def sub(x: Expr) -> str:
        s = format_expr(x)
        return s if isinstance(x, (Var, FromSolution, IntLit, SetLit, BoolLit, Ident, Card)) else f"({s})"

    match e:
        case Var(name) | Ident(name):
            return name
        case FromSolution(name):
            return f"fromSolution({name})"
        case IntLit(value):
            return str(value)
        case SetLit(items):
            return "{" + ", ".join(map(str, sorted(items))) + "}"
        case BoolLit(value):
            return "true" if value else "false"
        case Card(arg):
            return f"|{format_expr(arg)}|"
        case Sum(var, over, array):
            return f"sum {var} in {sub(over)} . {array}[{var}]"
        case Arith(op, left, right) | Compare(op, left, right) | BoolOp(op, left, right):
            return f"{sub(left)} {op} {sub(right)}"
        case Implies(left, right):
            return f"{sub(left)} -> {sub(right)}"
        case Neg(arg):
            return f"-{sub(arg)}"
        case Not(arg):
            return f"!{sub(arg)}"
    raise TypeError(f"cannot format {e!r}")


def format_model(spec: ModelSpec) -> str:
    out = []
    if spec.side_constraints:
        out.append("such that\n" + ",\n".join(f"  {format_expr(c)}" for c in spec.side_constraints))
    if spec.dominance is not None:
        out.append(f"dominance_relation {format_expr(spec.dominance.body)}")
    if spec.incomparability is not None:
        inc = spec.incomparability
        out.append(f"incomparability_function {inc.direction} {format_expr(inc.body)}")
    return "\n".join(out) + "\n"


# -- substitution and evaluation ---------------------------------------------


def substitute_solution(rel: DominanceRelation, sol: Any) -> BlockingConstraint:
    """Replace every ``fromSolution(x)`` by the constant value ``x`` has in ``sol``.

    The result must hold for every later solution; candidates on which it
    evaluates false are dominated by ``sol``.
    """

    def sub(e: Expr) -> Expr:
        if isinstance(e, FromSolution):
            value = getattr(sol, e.name, None)
            if value is None:
                raise UnboundSolutionVariable(f"solution does not bind {e.name!r}")
            if e.name == "itemset":
                return SetLit(frozenset(value), pos=e.pos)
            return IntLit(int(value), pos=e.pos)
        return _rebuild(e, sub)

    return BlockingConstraint(sub(rel.body), sol)


@dataclass(frozen=True)
class EvalContext:
    """Instance data an expression may consult: weight arrays, parameters, a support oracle."""

    arrays: Mapping[str, Sequence[int]] = field(default_factory=dict)
    constants: Mapping[str, int | float] = field(default_factory=dict)
    support_of: Callable[[frozenset[int]], int] | None = None

    @classmethod
    def from_instance(cls, instance) -> EvalContext:
        from .dataset import support

        db = instance.db
        return cls(
            arrays={"values": instance.meta.values, "costs": instance.meta.costs},
            constants={
                "min_value": instance.min_value,
                "max_cost": math.inf if instance.max_cost is None else instance.max_cost,
                "theta": instance.theta,
                "n_transactions": db.n_transactions,
                "n_items": db.n_items,
            },
            support_of=lambda s: support(db, s),
        )


_CMP: dict[str, Callable[[Any, Any], bool]] = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "subsetEq": lambda a, b: a <= b,
    "subset": lambda a, b: a < b,
    "supsetEq": lambda a, b: a >= b,
    "supset": lambda a, b: a > b,
}


def eval_expr(e: Expr, binding: Mapping[str, Any], ctx: EvalContext | None = None, solution: Any = None) -> Any:
    """Evaluate ``e`` directly on the syntax tree.

    ``binding`` supplies ``itemset`` and optionally ``support`` (computed from
    the context's support oracle when absent); ``solution`` supplies the
    values read by ``fromSolution(...)``.
    """
    ctx = ctx or EvalContext()

    def ev(x: Expr) -> Any:
        match x:
            case Var(name):
                if name in binding:
                    return frozenset(binding[name]) if name == "itemset" else binding[name]
                if name == "support" and "itemset" in binding and ctx.support_of is not None:
                    return ctx.support_of(frozenset(binding["itemset"]))
                raise UnboundVariable(f"variable {name!r} is not bound")
            case FromSolution(name):
                value = None
                if solution is not None:
                    value = solution.get(name) if isinstance(solution, Mapping) else getattr(solution, name, None)
                if value is None:
                    raise UnboundSolutionVariable(f"fromSolution({name}) is not bound")
                return frozenset(value) if name == "itemset" else value
            case IntLit(value) | BoolLit(value):
                return value
            case SetLit(items):
                return items
            case Ident(name):
                if name in ctx.constants:
                    return ctx.constants[name]
                if name in binding:
                    return binding[name]
                raise UnboundVariable(f"parameter {name!r} is not bound")
            case Card(arg):
                return len(ev(arg))
            case Sum(_, over, array):
                if array not in ctx.arrays:
                    raise UnboundVariable(f"array {array!r} is not bound")
                weights = ctx.arrays[array]
                return sum(weights[i] for i in ev(over))
            case Arith(op, left, right):
                return ev(left) + ev(right) if op == "+" else ev(left) - ev(right)
            case Neg(arg):
                return -ev(arg)
            case Compare(op, left, right):
                return _CMP[op](ev(left), ev(right))
            case Not(arg):
                return not ev(arg)
            case BoolOp("/\\", left, right):
                return ev(left) and ev(right)
            case BoolOp(_, left, right):
                return ev(left) or ev(right)
            case Implies(left, right):
                return (not ev(left)) or ev(right)
        raise TypeError(f"cannot evaluate {x!r}")

    return ev(e)


def compile_expr(e: Expr, ctx: EvalContext | None = None) -> Callable[[frozenset[int], int], Any]:
    """Turn a fully substituted expression into ``f(itemset, support)``.

    Arrays and parameters are resolved once, at compile time.
    """
    ctx = ctx or EvalContext()

    def comp(x: Expr) -> Callable[[frozenset[int], int], Any]:
        match x:
            case Var("itemset"):
                return lambda s, n: s
            case Var(_):
                return lambda s, n: n
            case FromSolution(name):
                raise UnboundSolutionVariable(f"fromSolution({name}) must be substituted before compiling")
            case IntLit(value) | BoolLit(value) | SetLit(value):
                return lambda s, n: value
            case Ident(name):
                if name not in ctx.constants:
                    raise UnboundVariable(f"parameter {name!r} is not bound")
                value = ctx.constants[name]
                return lambda s, n: value
            case Card(arg):
                f = comp(arg)
                return lambda s, n: len(f(s, n))
            case Sum(_, over, array):
                if array not in ctx.arrays:
                    raise UnboundVariable(f"array {array!r} is not bound")
                w = ctx.arrays[array]
                f = comp(over)
                return lambda s, n: sum(w[i] for i in f(s, n))
            case Arith("+", left, right):
                f, g = comp(left), comp(right)
                return lambda s, n: f(s, n) + g(s, n)
            case Arith(_, left, right):
                f, g = comp(left), comp(right)
                return lambda s, n: f(s, n) - g(s, n)
            case Neg(arg):
                f = comp(arg)
                return lambda s, n: -f(s, n)
            case Compare(op, left, right):
                f, g, cmp = comp(left), comp(right), _CMP[op]
                return lambda s, n: cmp(f(s, n), g(s, n))
            case Not(arg):
                f = comp(arg)
                return lambda s, n: not f(s, n)
            case BoolOp("/\\", left, right):
                f, g = comp(left), comp(right)
                return lambda s, n: f(s, n) and g(s, n)
            case BoolOp(_, left, right):
                f, g = comp(left), comp(right)
                return lambda s, n: f(s, n) or g(s, n)
            case Implies(left, right):
                f, g = comp(left), comp(right)
                return lambda s, n: (not f(s, n)) or g(s, n)
        raise TypeError(f"cannot compile {x!r}")

    return comp(e)
