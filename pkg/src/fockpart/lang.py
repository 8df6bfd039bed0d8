"""A small language for writing down Fock states and classifying them.

Example::

    # truncated two-mode squeezed vacuum
    let tmsv = sum n=0..8: 0.5^n * fock(n, n);
    classify tmsv stats=dist;

Grammar::

    program  := stmt+
    stmt     := "let" IDENT "=" expr ";"
              | "classify" (IDENT | gallery) option* ";"
    option   := IDENT "=" value
    expr     := term (("+" | "-") term)*
    term     := unary ("*" unary)*
    unary    := "-" unary | power
    power    := atom ("^" index)?
    atom     := NUMBER | "i" | IDENT | "|vac>" | "(" expr ")"
              | "sqrt" "(" expr ")" | "ket" "(" index ")"
              | "fock" "(" index ("," index)* ")"
              | "adag" "(" expr ")" ("^" index)? power?
              | "sum" IDENT "=" INT ".." INT ":" expr
              | ("otimes" | "vee" | "wedge" | "fprod") "(" expr ("," expr)* ")"
              | gallery
    gallery  := "gallery" "(" IDENT ("," IDENT "=" value)* ")"
    index    := INT | IDENT

Values are scalars, single-particle vectors or Fock states.  The particle
statistics are chosen per ``classify`` directive (option ``stats``), and
products and powers are interpreted under them: ``v^k`` is the k-fold
``(x)``, ``v`` or ``^`` power of a vector, ``s^k`` the k-fold field
product of a Fock state.  ``adag(v)`` without a target acts on the vacuum.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .classify import ClassifyConfig, Report, classify
from .core import (
    FockState,
    SinglePartVec,
    Statistics,
    basis_vector,
    embed,
    field_product,
    occupation_state,
    state_from_tensor,
    superpose,
    vacuum,
)
from .errors import (
    DuplicateBinding,
    FockError,
    ProgramSyntaxError,
    TypeMismatch,
    UnboundName,
)
from .gallery import gallery_state
from .ladder import create
from .tensor import factor_power, otimes_all, vee_all, wedge_all

# -- tokens ------------------------------------------------------------------------

KEYWORDS = {"let", "classify", "sum", "sqrt", "ket", "fock", "adag", "gallery", "i",
            "otimes", "vee", "wedge", "fprod"}
PRODUCTS = ("otimes", "vee", "wedge", "fprod")
OPTIONS = ("stats", "nmax", "tol", "seed")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<vac>\|vac>)
  | (?P<num>\d+(?:\.(?!\.)\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\.\.|[=;(),+\-*^:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "kw", "op", "vac", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind, value = m.lastgroup, m.group()
        col = pos - start + 1
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if value in KEYWORDS else "ident", value, line, col))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


# -- syntax tree ---------------------------------------------------------------------

Index = Union[int, str]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Sqrt:
    arg: object


@dataclass(frozen=True)
class Ket:
    index: Index


@dataclass(frozen=True)
class Fock:
    occ: tuple


@dataclass(frozen=True)
class Vac:
    pass


@dataclass(frozen=True)
class Adag:
    op: object
    power: Index | None = None
    target: object | None = None


@dataclass(frozen=True)
class Sum:
    var: str
    lo: int
    hi: int
    body: object


@dataclass(frozen=True)
class Gallery:
    name: str
    params: tuple = ()


@dataclass(frozen=True)
class Add:
    terms: tuple  # ((sign, expr), ...), first sign is +1


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: Index


@dataclass(frozen=True)
class Product:
    kind: str
    operands: tuple


@dataclass(frozen=True)
class Let:
    name: str
    expr: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ClassifyStmt:
    target: object  # Name or Gallery
    options: tuple = ()
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Program:
    statements: tuple

    def bindings(self) -> dict:
        return {s.name: s.expr for s in self.statements if isinstance(s, Let)}


# -- parser --------------------------------------------------------------------------

_ATOM_START = {"num", "ident", "vac"}
_ATOM_KW = {"i", "sqrt", "ket", "fock", "adag", "sum", "gallery", *PRODUCTS}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, expected, tok: Token | None = None):
        tok = tok or self.tok
        found = repr(tok.text) if tok.kind != "eof" else "end of input"
        raise ProgramSyntaxError(f"unexpected {found}", tok.line, tok.col, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw", "vac") and self.tok.text == text

    def take(self, text: str) -> Token:
        if not self.at(text):
            self.error([repr(text)])
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error(["IDENT"])
        self.pos += 1
        return self.toks[self.pos - 1].text

    def integer(self) -> int:
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            self.error(["INT"])
        self.pos += 1
        return int(tok.text)

    def index(self) -> Index:
        if self.tok.kind == "ident":
            return self.ident()
        return self.integer()

    def starts_atom(self) -> bool:
        t = self.tok
        return t.kind in _ATOM_START or (t.kind == "kw" and t.text in _ATOM_KW) \
            or (t.kind == "op" and t.text == "(")

    # statements
    def program(self) -> Program:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
        if not stmts:
            self.error(["'classify'", "'let'"])
        return Program(tuple(stmts))

    def statement(self):
        tok = self.tok
        if self.at("let"):
            self.pos += 1
            name = self.ident()
            self.take("=")
            expr = self.expr()
            self.take(";")
            return Let(name, expr, tok.line, tok.col)
        if self.at("classify"):
            self.pos += 1
            target = self.gallery() if self.at("gallery") else Name(self.ident())
            options = []
            while self.tok.kind == "ident":
                opt = self.tok
                key = self.ident()
                if key not in OPTIONS:
                    self.error([repr(o) for o in OPTIONS], opt)
                self.take("=")
                options.append((key, self.value()))
            if not self.at(";"):
                self.error(["';'", "option"])
            self.pos += 1
            return ClassifyStmt(target, tuple(options), tok.line, tok.col)
        self.error(["'classify'", "'let'"])

    def value(self):
        tok = self.tok
        if tok.kind == "ident":
            self.pos += 1
            return tok.text
        sign = 1
        if self.at("-"):
            self.pos += 1
            sign = -1
        if self.tok.kind != "num":
            self.error(["IDENT", "NUMBER"])
        self.pos += 1
        return sign * _number(self.toks[self.pos - 1].text)

    def gallery(self) -> Gallery:
        self.take("gallery")
        self.take("(")
        name = self.ident()
        params = []
        while self.at(","):
            self.pos += 1
            key = self.ident()
            self.take("=")
            params.append((key, self.value()))
        self.take(")")
        return Gallery(name, tuple(params))

    # expressions
    def expr(self):
        terms = [(1, self.term())]
        while self.at("+") or self.at("-"):
            sign = 1 if self.tok.text == "+" else -1
            self.pos += 1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Add(tuple(terms))

    def term(self):
        factors = [self.unary()]
        while self.at("*"):
            self.pos += 1
            factors.append(self.unary())
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self):
        if self.at("-"):
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.pos += 1
            return Pow(base, self.index())
        return base

    def args(self) -> list:
        self.take("(")
        out = [self.expr()]
        while self.at(","):
            self.pos += 1
            out.append(self.expr())
        self.take(")")
        return out

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return Num(_number(tok.text))
        if tok.kind == "ident":
            self.pos += 1
            return Name(tok.text)
        if tok.kind == "vac":
            self.pos += 1
            return Vac()
        if self.at("("):
            self.pos += 1
            inner = self.expr()
            self.take(")")
            return inner
        if tok.kind == "kw":
            kw = tok.text
            if kw == "i":
                self.pos += 1
                return Imag()
            if kw == "sqrt":
                self.pos += 1
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Sqrt(arg)
            if kw == "ket":
                self.pos += 1
                self.take("(")
                j = self.index()
                self.take(")")
                return Ket(j)
            if kw == "fock":
                self.pos += 1
                self.take("(")
                occ = [self.index()]
                while self.at(","):
                    self.pos += 1
                    occ.append(self.index())
                self.take(")")
                return Fock(tuple(occ))
            if kw == "adag":
                self.pos += 1
                self.take("(")
                op = self.expr()
                self.take(")")
                power = None
                if self.at("^"):
                    self.pos += 1
                    power = self.index()
                target = self.power() if self.starts_atom() else None
                return Adag(op, power, target)
            if kw == "sum":
                self.pos += 1
                var = self.ident()
                self.take("=")
                lo = self.integer()
                self.take("..")
                hi = self.integer()
                self.take(":")
                return Sum(var, lo, hi, self.expr())
            if kw == "gallery":
                return self.gallery()
            if kw in PRODUCTS:
                self.pos += 1
                return Product(kw, tuple(self.args()))
        self.error(["'('", "IDENT", "NUMBER", "'|vac>'", *(repr(k) for k in sorted(_ATOM_KW))])


def _number(text: str):
    if re.fullmatch(r"\d+", text):
        return int(text)
    return float(text)


# -- static checks -------------------------------------------------------------------

SCALAR, VECTOR, STATE = "scalar", "vector", "state"

_FORBIDDEN = {
    Statistics.BOSON: {"otimes", "wedge"},
    Statistics.FERMION: {"otimes", "vee"},
    Statistics.DISTINGUISHABLE: set(),
}


class _Checker:
    """Name resolution and value-kind inference; ``loc`` is the statement."""

    def __init__(self):
        self.kinds: dict = {}

    def fail(self, exc_type, msg, stmt):
        raise exc_type(f"{msg} (line {stmt.line})")

    def index(self, idx, scope, stmt):
        if isinstance(idx, str) and idx not in scope:
            self.fail(UnboundName, f"unbound index variable {idx!r}", stmt)

    def kind(self, e, scope, stmt) -> str:
        k = lambda x: self.kind(x, scope, stmt)  # noqa: E731
        if isinstance(e, (Num, Imag)):
            return SCALAR
        if isinstance(e, Name):
            if e.id in scope:
                return SCALAR
            if e.id not in self.kinds:
                self.fail(UnboundName, f"name {e.id!r} is not bound", stmt)
            return self.kinds[e.id]
        if isinstance(e, Sqrt):
            if k(e.arg) != SCALAR:
                self.fail(TypeMismatch, "sqrt needs a scalar", stmt)
            return SCALAR
        if isinstance(e, Ket):
            self.index(e.index, scope, stmt)
            return VECTOR
        if isinstance(e, Fock):
            for i in e.occ:
                self.index(i, scope, stmt)
            return STATE
        if isinstance(e, Vac):
            return STATE
        if isinstance(e, Adag):
            if k(e.op) != VECTOR:
                self.fail(TypeMismatch, "adag needs a single-particle vector", stmt)
            if e.power is not None:
                self.index(e.power, scope, stmt)
            if e.target is not None and k(e.target) == SCALAR:
                self.fail(TypeMismatch, "adag acts on a state or vector, not a scalar", stmt)
            return STATE
        if isinstance(e, Sum):
            if e.var in self.kinds or e.var in scope:
                self.fail(DuplicateBinding, f"sum variable {e.var!r} shadows a name", stmt)
            return self.kind(e.body, scope | {e.var}, stmt)
        if isinstance(e, Gallery):
            return STATE
        if isinstance(e, Add):
            kinds = {k(t) for _, t in e.terms}
            if SCALAR in kinds and len(kinds) > 1:
                self.fail(TypeMismatch, "cannot add a scalar to a vector or state", stmt)
            return SCALAR if kinds == {SCALAR} else VECTOR if kinds == {VECTOR} else STATE
        if isinstance(e, Mul):
            kinds = [k(f) for f in e.factors]
            rest = [x for x in kinds if x != SCALAR]
            if len(rest) > 1:
                self.fail(TypeMismatch, "product of two non-scalars; use otimes/vee/wedge/fprod",
                          stmt)
            return rest[0] if rest else SCALAR
        if isinstance(e, Neg):
            return k(e.arg)
        if isinstance(e, Pow):
            self.index(e.exp, scope, stmt)
            return SCALAR if k(e.base) == SCALAR else STATE
        if isinstance(e, Product):
            if any(k(x) == SCALAR for x in e.operands):
                self.fail(TypeMismatch, f"{e.kind} needs vectors or states", stmt)
            return STATE
        raise TypeError(f"unknown node {e!r}")


def _walk(e, bindings, seen=None) -> Iterator:
    """All nodes reachable from ``e``, following name references."""
    seen = set() if seen is None else seen
    yield e
    if isinstance(e, Name):
        if e.id in bindings and e.id not in seen:
            seen.add(e.id)
            yield from _walk(bindings[e.id], bindings, seen)
        return
    for value in vars(e).values():
        children = value if isinstance(value, tuple) else (value,)
        for c in children:
            if isinstance(c, tuple):
                c = c[1]
            if hasattr(c, "__dataclass_fields__"):
                yield from _walk(c, bindings, seen)


def _gallery_statistics(g: Gallery) -> Statistics:
    state, _ = gallery_state(g.name, dict(g.params))
    return state.statistics


def directive_statistics(stmt: ClassifyStmt, bindings: dict,
                         default: Statistics | None = None) -> Statistics:
    """Option ``stats``, else the first referenced gallery state's statistics,
    else ``default`` (distinguishable when not given)."""
    opts = dict(stmt.options)
    if "stats" in opts:
        return Statistics.parse(str(opts["stats"]))
    for node in _walk(stmt.target, bindings):
        if isinstance(node, Gallery):
            return _gallery_statistics(node)
    return default or Statistics.DISTINGUISHABLE


def check(program: Program) -> None:
    """Static checks: names, rebinding, value kinds and statistics."""
    checker = _Checker()
    bindings: dict = {}
    for stmt in program.statements:
        if isinstance(stmt, Let):
            if stmt.name in checker.kinds:
                raise DuplicateBinding(f"name {stmt.name!r} is already bound (line {stmt.line})")
            checker.kinds[stmt.name] = checker.kind(stmt.expr, frozenset(), stmt)
            bindings[stmt.name] = stmt.expr
            continue
        if checker.kind(stmt.target, frozenset(), stmt) == SCALAR:
            raise TypeMismatch(f"cannot classify a scalar (line {stmt.line})")
        try:
            stats = directive_statistics(stmt, bindings)
        except (ValueError, KeyError) as exc:
            raise TypeMismatch(f"{exc} (line {stmt.line})") from None
        for node in _walk(stmt.target, bindings):
            if isinstance(node, Product) and node.kind in _FORBIDDEN[stats]:
                raise TypeMismatch(
                    f"{node.kind} is not a {stats.value} product (line {stmt.line})")
            if isinstance(node, Gallery) and _gallery_statistics(node) is not stats:
                raise TypeMismatch(
                    f"gallery({node.name}) holds {_gallery_statistics(node).value} states, "
                    f"classified as {stats.value} (line {stmt.line})")


def parse(text: str, checked: bool = True) -> Program:
    """Parse a program; ``checked`` also runs the static checks."""
    program = _Parser(text).program()
    if checked:
        check(program)
    return program


def parse_expr(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return e


# -- pretty printer ------------------------------------------------------------------

_PREC_SUM, _PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = range(6)


def _prec(e) -> int:
    if isinstance(e, Sum):
        return _PREC_SUM
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, (Pow, Adag)):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e, minimum: int) -> str:
    s = to_source(e)
    return f"({s})" if _prec(e) < minimum else s


def _fmt_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def to_source(e) -> str:
    """Source text of an expression or program that parses back to ``e``."""
    if isinstance(e, Program):
        return "\n".join(to_source(s) for s in e.statements) + "\n"
    if isinstance(e, Let):
        return f"let {e.name} = {to_source(e.expr)};"
    if isinstance(e, ClassifyStmt):
        opts = "".join(f" {k}={_fmt_value(v)}" for k, v in e.options)
        return f"classify {to_source(e.target)}{opts};"
    if isinstance(e, Num):
        return _fmt_value(e.value)
    if isinstance(e, Imag):
        return "i"
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Sqrt):
        return f"sqrt({to_source(e.arg)})"
    if isinstance(e, Ket):
        return f"ket({e.index})"
    if isinstance(e, Fock):
        return f"fock({', '.join(str(i) for i in e.occ)})"
    if isinstance(e, Vac):
        return "|vac>"
    if isinstance(e, Adag):
        s = f"adag({to_source(e.op)})"
        if e.power is not None:
            s += f"^{e.power}"
        if e.target is not None:
            s += " " + _wrap(e.target, _PREC_POW)
        return s
    if isinstance(e, Sum):
        return f"sum {e.var}={e.lo}..{e.hi}: {to_source(e.body)}"
    if isinstance(e, Gallery):
        params = "".join(f", {k}={_fmt_value(v)}" for k, v in e.params)
        return f"gallery({e.name}{params})"
    if isinstance(e, Add):
        out = _wrap(e.terms[0][1], _PREC_MUL)
        for sign, t in e.terms[1:]:
            out += (" + " if sign > 0 else " - ") + _wrap(t, _PREC_MUL)
        return out
    if isinstance(e, Mul):
        return " * ".join(_wrap(f, _PREC_NEG) for f in e.factors)
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC_NEG)
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{e.exp}"
    if isinstance(e, Product):
        return f"{e.kind}({', '.join(to_source(x) for x in e.operands)})"
    raise TypeError(f"cannot print {e!r}")


# -- evaluation ------------------------------------------------------------------------

def _pad_vec(v: SinglePartVec, dim: int) -> SinglePartVec:
    return v if v.dim == dim else v.padded(dim)


class _Evaluator:
    def __init__(self, bindings: dict, stats: Statistics, nmax: int | None):
        self.bindings = bindings
        self.stats = stats
        self.nmax = nmax
        self.cache: dict = {}

    # conversions
    def as_state(self, v) -> FockState:
        if isinstance(v, FockState):
            if v.statistics is not self.stats:
                raise TypeMismatch(f"a {v.statistics.value} state used under "
                                   f"{self.stats.value} statistics")
            return v
        if isinstance(v, SinglePartVec):
            return state_from_tensor(v.as_tensor(self.stats.symmetry), self.stats)
        raise TypeMismatch("expected a vector or state, got a scalar")

    def same_dim(self, values) -> list:
        dim = max(v.dim for v in values)
        return [_pad_vec(v, dim) if isinstance(v, SinglePartVec) else embed(v, dim)
                for v in values]

    def idx(self, i, env) -> int:
        return env[i] if isinstance(i, str) else i

    def tensor_of(self, v):
        if isinstance(v, SinglePartVec):
            return v.as_tensor(self.stats.symmetry)
        state = self.as_state(v)
        if len(state.components) != 1:
            raise TypeMismatch("product operands must have a single particle number")
        return state.component(state.particle_numbers[0])

    def power_of_vector(self, v: SinglePartVec, k: int) -> FockState:
        t = factor_power(v, k, self.stats.symmetry).retagged(self.stats.symmetry)
        return FockState(v.dim, self.stats, {k: t} if not t.is_zero else {})

    def ev(self, e, env):
        if isinstance(e, Num):
            return complex(e.value)
        if isinstance(e, Imag):
            return 1j
        if isinstance(e, Name):
            if e.id in env:
                return complex(env[e.id])
            if e.id not in self.cache:
                self.cache[e.id] = self.ev(self.bindings[e.id], {})
            return self.cache[e.id]
        if isinstance(e, Sqrt):
            return complex(self.ev(e.arg, env)) ** 0.5
        if isinstance(e, Ket):
            j = self.idx(e.index, env)
            return basis_vector(j, j + 1)
        if isinstance(e, Fock):
            return occupation_state([self.idx(i, env) for i in e.occ], self.stats)
        if isinstance(e, Vac):
            return vacuum(1, self.stats)
        if isinstance(e, Adag):
            op = self.ev(e.op, env)
            if not isinstance(op, SinglePartVec):
                raise TypeMismatch("adag needs a single-particle vector")
            target = vacuum(1, self.stats) if e.target is None \
                else self.as_state(self.ev(e.target, env))
            dim = max(op.dim, target.dim)
            op, target = _pad_vec(op, dim), embed(target, dim)
            k = 1 if e.power is None else self.idx(e.power, env)
            for _ in range(k):
                target = create(op, target)
            return target
        if isinstance(e, Sum):
            terms = [self.ev(e.body, {**env, e.var: n}) for n in range(e.lo, e.hi + 1)]
            return self.add([(1, t) for t in terms])
        if isinstance(e, Gallery):
            params = dict(e.params)
            if self.nmax is not None and "nmax" not in params and _takes_nmax(e.name):
                params["nmax"] = self.nmax
            return self.as_state(gallery_state(e.name, params)[0])
        if isinstance(e, Add):
            return self.add([(s, self.ev(t, env)) for s, t in e.terms])
        if isinstance(e, Mul):
            acc = 1 + 0j
            other = None
            for f in e.factors:
                v = self.ev(f, env)
                if isinstance(v, complex):
                    acc *= v
                elif other is None:
                    other = v
                else:
                    raise TypeMismatch("product of two non-scalars")
            if other is None:
                return acc
            if isinstance(other, SinglePartVec):
                return SinglePartVec(acc * other.amps)
            return other.scaled(acc)
        if isinstance(e, Neg):
            return self.add([(-1, self.ev(e.arg, env))])
        if isinstance(e, Pow):
            base = self.ev(e.base, env)
            k = self.idx(e.exp, env)
            if isinstance(base, complex):
                return base ** k
            if isinstance(base, SinglePartVec):
                return self.power_of_vector(base, k)
            if k == 0:
                return vacuum(1, self.stats)
            return field_product(*([self.as_state(base)] * k))
        if isinstance(e, Product):
            ops = [self.ev(x, env) for x in e.operands]
            if e.kind == "fprod":
                return field_product(*(self.as_state(v) for v in ops))
            if e.kind in _FORBIDDEN[self.stats]:
                raise TypeMismatch(f"{e.kind} is not a {self.stats.value} product")
            tensors = [self.tensor_of(v) for v in self.same_dim(ops)]
            fn = {"otimes": otimes_all, "vee": vee_all, "wedge": wedge_all}[e.kind]
            t = fn(tensors).retagged(self.stats.symmetry) if len(tensors) > 1 else tensors[0]
            return FockState(t.dim, self.stats, {t.n: t} if not t.is_zero else {})
        raise TypeError(f"unknown node {e!r}")

    def add(self, terms):
        values = [v for _, v in terms]
        if all(isinstance(v, complex) for v in values):
            return sum(s * v for s, v in terms)
        if any(isinstance(v, complex) for v in values):
            raise TypeMismatch("cannot add a scalar to a vector or state")
        values = self.same_dim(values)
        if all(isinstance(v, SinglePartVec) for v in values):
            return SinglePartVec(sum(s * v.amps for (s, _), v in zip(terms, values)))
        states = [self.as_state(v) for v in values]
        return superpose([(s, v) for (s, _), v in zip(terms, states)])


def _takes_nmax(name: str) -> bool:
    from .gallery import CATALOG
    return "nmax" in CATALOG[name].defaults


@dataclass(frozen=True)
class Outcome:
    """Result of one ``classify`` directive."""

    name: str
    statement: int
    state: FockState
    report: Report
    gallery: object = None  # GallerySpec for gallery targets


def _located(exc: Exception, index: int, stmt) -> Exception:
    new = copy.copy(exc)
    new.args = (f"statement {index} (line {stmt.line}): {exc}",)
    new.statement = index
    new.line = stmt.line
    return new


def directive_config(stmt: ClassifyStmt, config: ClassifyConfig) -> ClassifyConfig:
    opts = dict(stmt.options)
    updates = {}
    if "nmax" in opts:
        updates["nmax"] = int(opts["nmax"])
    if "tol" in opts:
        updates["tol_rel"] = float(opts["tol"])
    if "seed" in opts:
        updates["seed"] = int(opts["seed"])
    return replace(config, **updates)


def run_program(program: Program, config: ClassifyConfig | None = None,
                statistics: Statistics | str | None = None) -> list:
    """Evaluate every ``classify`` directive; returns :class:`Outcome` records.

    Directive options override ``config`` and ``statistics``.  Errors are
    re-raised with their type preserved and the statement index (0-based)
    and line attached as ``.statement`` / ``.line``.
    """
    config = config or ClassifyConfig()
    default = Statistics.parse(statistics) if statistics is not None else None
    bindings = program.bindings()
    out = []
    for index, stmt in enumerate(program.statements):
        if not isinstance(stmt, ClassifyStmt):
            continue
        try:
            stats = directive_statistics(stmt, bindings, default)
            cfg = directive_config(stmt, config)
            ev = _Evaluator(bindings, stats, cfg.nmax)
            state = ev.as_state(ev.ev(stmt.target, {}))
            spec = None
            if isinstance(stmt.target, Gallery):
                params = dict(stmt.target.params)
                if cfg.nmax is not None and "nmax" not in params and _takes_nmax(stmt.target.name):
                    params["nmax"] = cfg.nmax
                spec = gallery_state(stmt.target.name, params)[1]
            name = stmt.target.id if isinstance(stmt.target, Name) else stmt.target.name
            out.append(Outcome(name, index, state, classify(state, cfg), spec))
        except (FockError, ValueError, KeyError, TypeError) as exc:
            raise _located(exc, index, stmt) from exc
    return out


def evaluate(program: Program, config: ClassifyConfig | None = None,
             statistics: Statistics | str | None = None) -> list:
    """``[(name, Report), ...]`` for every ``classify`` directive."""
    return [(o.name, o.report) for o in run_program(program, config, statistics)]
