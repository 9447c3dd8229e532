"""Propositional formulas, proof terms, a type checker, and their FinSet semantics.

Formulas are interpreted as finite sets (∧ as product, ∨ as coproduct, → as
exponential, ¬φ as maps into a dualizing set D, empty by default). A typing
derivation Γ ⊢ t : φ compiles to a single map ⟦Γ⟧ → ⟦φ⟧, where contexts are
products seeded with the one-point set and extended on the right.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import finset as fs
from .errors import CatsemError, MissingAtom, ParseError, TypeMismatch, UnboundVariable
from .report import Report


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Meta:
    """A unification variable; never survives type checking."""

    n: int


Formula = Atom | Top | Bot | And | Or | Imp | Not

_PREC = {Imp: 1, Or: 2, And: 3, Not: 4}
_SYM = {Imp: "->", Or: "|", And: "&"}


def _fprec(f) -> int:
    return _PREC.get(type(f), 5)


def show_formula(f) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Meta):
        return f"?{f.n}"
    if isinstance(f, Not):
        inner = show_formula(f.body)
        return "~" + (inner if _fprec(f.body) >= 4 else f"({inner})")
    p = _fprec(f)
    left, right = show_formula(f.left), show_formula(f.right)
    if isinstance(f, Imp):
        lpar, rpar = _fprec(f.left) <= p, _fprec(f.right) < p
    else:
        lpar, rpar = _fprec(f.left) < p, _fprec(f.right) <= p
    left = f"({left})" if lpar else left
    right = f"({right})" if rpar else right
    return f"{left} {_SYM[type(f)]} {right}"


def atoms(f) -> list[str]:
    if isinstance(f, Atom):
        return [f.name]
    if isinstance(f, Not):
        return atoms(f.body)
    if isinstance(f, (And, Or, Imp)):
        return list(dict.fromkeys(atoms(f.left) + atoms(f.right)))
    return []


_FTOKEN = re.compile(r"\s*(->|[~&|()]|[a-z][a-z0-9_]*)")


def _tokens(text: str, pattern) -> list[tuple[str, int]]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            return out
        m = pattern.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()


class _Stream:
    def __init__(self, toks, text):
        self.toks, self.i, self.end = toks, 0, len(text)

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end

    def next(self):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", self.end)
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos())
        self.i += 1

    def done(self):
        if self.i != len(self.toks):
            raise ParseError(f"unexpected {self.peek()!r}", self.pos())


def parse_formula(text: str) -> Formula:
    """Precedence from tightest: ~, &, |, -> (right-associative)."""
    s = _Stream(_tokens(text, _FTOKEN), text)
    f = _imp(s)
    s.done()
    return f


def _imp(s):
    left = _or(s)
    if s.peek() == "->":
        s.next()
        return Imp(left, _imp(s))
    return left


def _or(s):
    f = _and(s)
    while s.peek() == "|":
        s.next()
        f = Or(f, _and(s))
    return f


def _and(s):
    f = _not(s)
    while s.peek() == "&":
        s.next()
        f = And(f, _not(s))
    return f


def _not(s):
    if s.peek() == "~":
        s.next()
        return Not(_not(s))
    tok, pos = s.peek(), s.pos()
    if tok == "(":
        s.next()
        f = _imp(s)
        s.expect(")")
        return f
    if tok is None or not re.fullmatch(r"[a-z][a-z0-9_]*", tok):
        raise ParseError(f"expected a formula, found {tok!r}", pos)
    s.next()
    return Top() if tok == "top" else Bot() if tok == "bot" else Atom(tok)


# ---------------------------------------------------------------- proof terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Fst:
    term: "Term"


@dataclass(frozen=True)
class Snd:
    term: "Term"


@dataclass(frozen=True)
class Inl:
    term: "Term"


@dataclass(frozen=True)
class Inr:
    term: "Term"


@dataclass(frozen=True)
class Case:
    scrutinee: "Term"
    left_var: str
    left: "Term"
    right_var: str
    right: "Term"


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Abort:
    term: "Term"


Term = Var | Lam | App | Pair | Fst | Snd | Inl | Inr | Case | Unit | Abort
_PREFIX = {"fst": Fst, "snd": Snd, "inl": Inl, "inr": Inr, "abort": Abort}
KEYWORDS = frozenset(_PREFIX) | {"case", "of", "unit"}
_TTOKEN = re.compile(r"\s*(=>|[\\.(),|]|[A-Za-z_][A-Za-z0-9_']*)")


def parse_term(text: str, scope: Sequence[str] | None = None) -> Term:
    """Parse a proof term; with ``scope`` given, free variables outside it raise UnboundVariable."""
    s = _Stream(_tokens(text, _TTOKEN), text)
    t = _term(s)
    s.done()
    if scope is not None:
        missing = [x for x in free_vars(t) if x not in scope]
        if missing:
            raise UnboundVariable(f"unbound variable {missing[0]!r}")
    return t


def _ident(s):
    tok, pos = s.peek(), s.pos()
    if tok is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok in KEYWORDS:
        raise ParseError(f"expected a variable, found {tok!r}", pos)
    s.next()
    return tok


def _term(s):
    tok = s.peek()
    if tok == "\\":
        s.next()
        x = _ident(s)
        s.expect(".")
        return Lam(x, _term(s))
    if tok == "case":
        s.next()
        t = _term(s)
        s.expect("of")
        s.expect("inl")
        x = _ident(s)
        s.expect("=>")
        u = _term(s)
        s.expect("|")
        s.expect("inr")
        y = _ident(s)
        s.expect("=>")
        v = _term(s)
        return Case(t, x, u, y, v)
    t = _prefix(s)
    while _starts_arg(s.peek()):
        if s.peek() in ("\\", "case"):
            return App(t, _term(s))
        t = App(t, _prefix(s))
    return t


def _starts_arg(tok):
    return tok is not None and (tok in ("(", "\\", "case", "unit") or tok in _PREFIX
                                or (re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) is not None and tok not in KEYWORDS))


def _prefix(s):
    tok = s.peek()
    if tok in _PREFIX:
        s.next()
        return _PREFIX[tok](_atom(s))
    return _atom(s)


def _atom(s):
    tok, pos = s.peek(), s.pos()
    if tok == "(":
        s.next()
        t = _term(s)
        if s.peek() == ",":
            s.next()
            u = _term(s)
            s.expect(")")
            return Pair(t, u)
        s.expect(")")
        return t
    if tok == "unit":
        s.next()
        return Unit()
    if tok is None:
        raise ParseError("unexpected end of input", pos)
    return Var(_ident(s))


def _is_atomic(t) -> bool:
    return isinstance(t, (Var, Unit, Pair))


def show_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Unit):
        return "unit"
    if isinstance(t, Lam):
        return f"\\{t.var}. {show_term(t.body)}"
    if isinstance(t, Pair):
        return f"({show_term(t.left)}, {show_term(t.right)})"
    if isinstance(t, Case):
        u = show_term(t.left)
        if isinstance(t.left, Case):
            u = f"({u})"
        return (f"case {show_term(t.scrutinee)} of inl {t.left_var} => {u} "
                f"| inr {t.right_var} => {show_term(t.right)}")
    if isinstance(t, App):
        fn = show_term(t.fn)
        if isinstance(t.fn, (Lam, Case)):
            fn = f"({fn})"
        arg = show_term(t.arg)
        if not (_is_atomic(t.arg) or type(t.arg) in _PREFIX.values()):
            arg = f"({arg})"
        return f"{fn} {arg}"
    name = next(k for k, v in _PREFIX.items() if isinstance(t, v))
    inner = show_term(t.term)
    return f"{name} {inner if _is_atomic(t.term) else f'({inner})'}"


def free_vars(t) -> list[str]:
    if isinstance(t, Var):
        return [t.name]
    if isinstance(t, Unit):
        return []
    if isinstance(t, Lam):
        return [x for x in free_vars(t.body) if x != t.var]
    if isinstance(t, (App, Pair)):
        a, b = (t.fn, t.arg) if isinstance(t, App) else (t.left, t.right)
        return list(dict.fromkeys(free_vars(a) + free_vars(b)))
    if isinstance(t, Case):
        out = free_vars(t.scrutinee)
        out += [x for x in free_vars(t.left) if x != t.left_var]
        out += [x for x in free_vars(t.right) if x != t.right_var]
        return list(dict.fromkeys(out))
    return free_vars(t.term)


def depth(t) -> int:
    if isinstance(t, (Var, Unit)):
        return 1
    if isinstance(t, Lam):
        return 1 + depth(t.body)
    if isinstance(t, App):
        return 1 + max(depth(t.fn), depth(t.arg))
    if isinstance(t, Pair):
        return 1 + max(depth(t.left), depth(t.right))
    if isinstance(t, Case):
        return 1 + max(depth(t.scrutinee), depth(t.left), depth(t.right))
    return 1 + depth(t.term)


def _fresh(base: str, avoid) -> str:
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand


def substitute(t, x: str, s) -> Term:
    """Capture-avoiding t[s/x]."""
    fv = set(free_vars(s))

    def binder(var, body):
        if var == x:
            return var, body, False
        if var in fv and x in free_vars(body):
            new = _fresh(var, fv | set(free_vars(body)) | {x})
            return new, substitute(body, var, Var(new)), True
        return var, body, True

    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, Unit):
        return t
    if isinstance(t, Lam):
        v, body, go = binder(t.var, t.body)
        return Lam(v, substitute(body, x, s) if go else body)
    if isinstance(t, App):
        return App(substitute(t.fn, x, s), substitute(t.arg, x, s))
    if isinstance(t, Pair):
        return Pair(substitute(t.left, x, s), substitute(t.right, x, s))
    if isinstance(t, Case):
        lv, lb, lgo = binder(t.left_var, t.left)
        rv, rb, rgo = binder(t.right_var, t.right)
        return Case(substitute(t.scrutinee, x, s), lv, substitute(lb, x, s) if lgo else lb,
                    rv, substitute(rb, x, s) if rgo else rb)
    return type(t)(substitute(t.term, x, s))


# ---------------------------------------------------------------- type checking

Context = Sequence[tuple[str, Formula]]


@dataclass
class Derivation:
    rule: str
    context: tuple[tuple[str, Formula], ...]
    term: Term
    formula: Formula
    premises: list["Derivation"] = field(default_factory=list)

    def nodes(self) -> Iterator[Derivation]:
        yield self
        for p in self.premises:
            yield from p.nodes()

    def judgment(self) -> str:
        ctx = ", ".join(f"{x} : {show_formula(a)}" for x, a in self.context)
        return f"{ctx} ⊢ {show_term(self.term)} : {show_formula(self.formula)}".lstrip()

    def to_dict(self) -> dict:
        return {"rule": self.rule, "judgment": self.judgment(), "premises": [p.to_dict() for p in self.premises]}


class _Checker:
    def __init__(self):
        self.subst: dict[int, Formula] = {}
        self.count = 0

    def fresh(self) -> Meta:
        self.count += 1
        return Meta(self.count)

    def resolve(self, f):
        while isinstance(f, Meta) and f.n in self.subst:
            f = self.subst[f.n]
        return f

    def zonk(self, f, default=True):
        f = self.resolve(f)
        if isinstance(f, Meta):
            return Top() if default else f
        if isinstance(f, Not):
            return Not(self.zonk(f.body, default))
        if isinstance(f, (And, Or, Imp)):
            return type(f)(self.zonk(f.left, default), self.zonk(f.right, default))
        return f

    def occurs(self, n, f):
        f = self.resolve(f)
        if isinstance(f, Meta):
            return f.n == n
        if isinstance(f, Not):
            return self.occurs(n, f.body)
        if isinstance(f, (And, Or, Imp)):
            return self.occurs(n, f.left) or self.occurs(n, f.right)
        return False

    def unify(self, expected, actual, term):
        a, b = self.resolve(expected), self.resolve(actual)
        if a == b:
            return
        for m, other in ((a, b), (b, a)):
            if isinstance(m, Meta):
                if self.occurs(m.n, other):
                    self._mismatch(expected, actual, term)
                self.subst[m.n] = other
                return
        if isinstance(a, Not) and isinstance(b, Not):
            return self.unify(a.body, b.body, term)
        if isinstance(a, Not):
            a = Imp(a.body, Bot())
        if isinstance(b, Not):
            b = Imp(b.body, Bot())
        if type(a) is type(b) and isinstance(a, (And, Or, Imp)):
            try:
                self.unify(a.left, b.left, term)
                self.unify(a.right, b.right, term)
            except TypeMismatch:
                self._mismatch(expected, actual, term)
            return
        self._mismatch(expected, actual, term)

    def _mismatch(self, expected, actual, term):
        e, a = show_formula(self.zonk(expected, False)), show_formula(self.zonk(actual, False))
        raise TypeMismatch(f"expected {e}, got {a} at {show_term(term)}", e, a, show_term(term))

    def check(self, ctx, t, ty) -> Derivation:
        node = lambda rule, *prem: Derivation(rule, tuple(ctx), t, ty, list(prem))
        if isinstance(t, Var):
            for x, a in reversed(ctx):
                if x == t.name:
                    self.unify(ty, a, t)
                    return node("hyp")
            raise UnboundVariable(f"unbound variable {t.name!r}")
        if isinstance(t, Lam):
            a, b = self.fresh(), self.fresh()
            self.unify(ty, Imp(a, b), t)
            return node("→I", self.check(list(ctx) + [(t.var, a)], t.body, b))
        if isinstance(t, App):
            a = self.fresh()
            d1 = self.check(ctx, t.fn, Imp(a, ty))
            return node("→E", d1, self.check(ctx, t.arg, a))
        if isinstance(t, Pair):
            a, b = self.fresh(), self.fresh()
            self.unify(ty, And(a, b), t)
            return node("∧I", self.check(ctx, t.left, a), self.check(ctx, t.right, b))
        if isinstance(t, (Fst, Snd)):
            other = self.fresh()
            want = And(ty, other) if isinstance(t, Fst) else And(other, ty)
            return node("∧E1" if isinstance(t, Fst) else "∧E2", self.check(ctx, t.term, want))
        if isinstance(t, (Inl, Inr)):
            a, b = self.fresh(), self.fresh()
            self.unify(ty, Or(a, b), t)
            return node("∨I1" if isinstance(t, Inl) else "∨I2", self.check(ctx, t.term, a if isinstance(t, Inl) else b))
        if isinstance(t, Case):
            a, b = self.fresh(), self.fresh()
            d0 = self.check(ctx, t.scrutinee, Or(a, b))
            d1 = self.check(list(ctx) + [(t.left_var, a)], t.left, ty)
            d2 = self.check(list(ctx) + [(t.right_var, b)], t.right, ty)
            return node("∨E", d0, d1, d2)
        if isinstance(t, Unit):
            self.unify(ty, Top(), t)
            return node("⊤I")
        if isinstance(t, Abort):
            return node("⊥E", self.check(ctx, t.term, Bot()))
        raise CatsemError(f"not a proof term: {t!r}")

    def finish(self, d: Derivation) -> Derivation:
        return Derivation(d.rule, tuple((x, self.zonk(a)) for x, a in d.context), d.term,
                          self.zonk(d.formula), [self.finish(p) for p in d.premises])


def type_check(ctx: Context, t: Term, phi: Formula) -> Derivation:
    """Check Γ ⊢ t : φ and return the full derivation (unconstrained types default to top)."""
    c = _Checker()
    return c.finish(c.check(list(ctx), t, phi))


# ---------------------------------------------------------------- semantics

Valuation = Mapping[str, fs.FinSetObj]


def interpret_formula(phi: Formula, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY) -> fs.FinSetObj:
    if isinstance(phi, Atom):
        if phi.name not in v:
            raise MissingAtom(f"valuation has no set for atom {phi.name!r}")
        return v[phi.name]
    if isinstance(phi, Top):
        return fs.ONE
    if isinstance(phi, Bot):
        return fs.EMPTY
    if isinstance(phi, Not):
        return fs.exponential(interpret_formula(phi.body, v, dualizing), dualizing)[0]
    a, b = interpret_formula(phi.left, v, dualizing), interpret_formula(phi.right, v, dualizing)
    if isinstance(phi, And):
        return fs.product(a, b)[0]
    if isinstance(phi, Or):
        return fs.coproduct(a, b)[0]
    if isinstance(phi, Imp):
        return fs.exponential(a, b)[0]
    raise CatsemError(f"not a formula: {phi!r}")


def interpret_context(ctx: Context, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY) -> fs.FinSetObj:
    out = fs.ONE
    for _, a in ctx:
        out = fs.product(out, interpret_formula(a, v, dualizing))[0]
    return out


def _lookup(ctx, x, v, dualizing) -> fs.FinSetMap:
    """Projection chain ⟦Γ⟧ → ⟦A⟧ for the rightmost binding of x."""
    objs = [fs.ONE]
    for _, a in ctx:
        objs.append(fs.product(objs[-1], interpret_formula(a, v, dualizing))[0])
    chain = fs.identity(objs[-1])
    for i in range(len(ctx) - 1, -1, -1):
        _, pl, pr = fs.product(objs[i], interpret_formula(ctx[i][1], v, dualizing))
        if ctx[i][0] == x:
            return fs.compose(pr, chain)
        chain = fs.compose(pl, chain)
    raise UnboundVariable(x)


def _post(h: fs.FinSetMap, a: fs.FinSetObj) -> fs.FinSetMap:
    """h^A : X^A → Y^A, post-composition with h: X → Y."""
    e, ev = fs.exponential(a, h.dom)
    return fs.curry(fs.compose(h, ev), e, a)


def _coerce(m: fs.FinSetMap, target: fs.FinSetObj, dualizing: fs.FinSetObj) -> fs.FinSetMap:
    """Identify Imp(φ, bot) with Not(φ): post-compose with ∅ ↪ D where the two differ."""
    if m.cod == target:
        return m
    e = m.cod
    if e.parts and e.parts[0] == "exponential" and target.parts and target.parts[0] == "exponential":
        a, x = e.parts[1], e.parts[2]
        if target.parts[1] == a and x == fs.EMPTY and target.parts[2] == dualizing:
            return fs.compose(_post(fs.initial_map(dualizing), a), m)
    raise CatsemError(f"cannot interpret a map into {e.label} as one into {target.label}; "
                      "eliminating a negation needs an empty dualizing set")


def interpret_term(d: Derivation, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY,
                   _memo: dict | None = None) -> fs.FinSetMap:
    """Compile a derivation to a map ⟦Γ⟧ → ⟦φ⟧."""
    memo = {} if _memo is None else _memo
    if id(d) in memo:
        return memo[id(d)]
    sub = lambda p: interpret_term(p, v, dualizing, memo)
    g = interpret_context(d.context, v, dualizing)
    target = interpret_formula(d.formula, v, dualizing)
    t = d.term
    if d.rule == "hyp":
        m = _lookup(d.context, t.name, v, dualizing)
    elif d.rule == "→I":
        body = d.premises[0]
        a = interpret_formula(body.context[-1][1], v, dualizing)
        m = fs.curry(sub(body), g, a)
    elif d.rule == "→E":
        f, u = sub(d.premises[0]), sub(d.premises[1])
        _, ev = fs.exponential(*fs.exponential_factors(f.cod))
        m = fs.compose(ev, fs.pair(f, u))
    elif d.rule == "∧I":
        m = fs.pair(sub(d.premises[0]), sub(d.premises[1]))
    elif d.rule in ("∧E1", "∧E2"):
        p = sub(d.premises[0])
        _, pa, pb = fs.product(*fs.product_factors(p.cod))
        m = fs.compose(pa if d.rule == "∧E1" else pb, p)
    elif d.rule in ("∨I1", "∨I2"):
        p = sub(d.premises[0])
        a, b = (interpret_formula(x, v, dualizing) for x in (_or_parts(d.formula)))
        _, ia, ib = fs.coproduct(a, b)
        m = fs.compose(ia if d.rule == "∨I1" else ib, p)
    elif d.rule == "∨E":
        s, u, w = (sub(p) for p in d.premises)
        a, b = (interpret_formula(x[1], v, dualizing) for x in (d.premises[1].context[-1], d.premises[2].context[-1]))
        dist = fs.distribute(g, a, b)
        m = fs.compose(fs.copair(_coerce(u, target, dualizing), _coerce(w, target, dualizing)),
                       fs.compose(dist, fs.pair(fs.identity(g), s)))
    elif d.rule == "⊤I":
        m = fs.terminal_map(g)
    elif d.rule == "⊥E":
        p = sub(d.premises[0])
        if len(p.cod):
            raise CatsemError("abort needs an empty interpretation of bot")
        m = fs.FinSetMap(g, target, ())
    else:
        raise CatsemError(f"unknown rule {d.rule!r}")
    m = _coerce(m, target, dualizing)
    memo[id(d)] = m
    return m


def _or_parts(f):
    if isinstance(f, Or):
        return f.left, f.right
    raise CatsemError("injection into a non-disjunction")


def verify_currying_diagram(d: Derivation, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY,
                            curried: fs.FinSetMap | None = None) -> Report:
    """At an →I node with body f: Γ×A → B, check ev ∘ (f̃ × id_A) = f exactly.

    ``curried`` overrides f̃ (for fault injection).
    """
    if d.rule != "→I":
        raise CatsemError("the currying diagram lives at an implication introduction")
    body = d.premises[0]
    f = interpret_term(body, v, dualizing)
    g = interpret_context(d.context, v, dualizing)
    a = interpret_formula(body.context[-1][1], v, dualizing)
    ft = fs.curry(f, g, a) if curried is None else curried
    _, ev = fs.exponential(a, f.cod)
    route = fs.compose(ev, fs.product_map(ft, fs.identity(a)))
    rep = Report("currying_diagram", details={"judgment": d.judgment(), "entries": len(f.dom)})
    if route != f:
        diffs = [{"input": x, "f": y, "ev_route": z} for x, y, z in zip(f.dom, f.table, route.table) if y != z]
        rep.fail(judgment=d.judgment(), differences=diffs[:10])
    return rep


def verify_all_lambdas(d: Derivation, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY) -> Report:
    rep = Report("currying_diagrams")
    n = 0
    for node in d.nodes():
        if node.rule == "→I":
            n += 1
            rep.absorb(verify_currying_diagram(node, v, dualizing))
    rep.details["lambda_nodes"] = n
    return rep


# ---------------------------------------------------------------- files

@dataclass
class Theorem:
    name: str
    formula: Formula
    proof: Term


_THEOREM = re.compile(r"^\s*theorem\s+([A-Za-z_][A-Za-z0-9_']*)\s*:(.*)$")


def parse_proof_file(text: str) -> list[Theorem]:
    """``theorem <name> : <formula>`` followed by ``proof <term>`` (which may span lines)."""
    out = []
    name = formula = None
    proof_lines: list[str] | None = None

    def flush():
        if name is None:
            return
        if proof_lines is None:
            raise ParseError(f"theorem {name} has no proof")
        out.append(Theorem(name, formula, parse_term(" ".join(proof_lines), scope=())))

    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("--"):
            continue
        m = _THEOREM.match(line)
        if m:
            flush()
            name, formula, proof_lines = m.group(1), parse_formula(m.group(2)), None
        elif stripped.startswith("proof"):
            if name is None or proof_lines is not None:
                raise ParseError("proof without a preceding theorem")
            proof_lines = [stripped[len("proof"):]]
        elif proof_lines is not None:
            proof_lines.append(stripped)
        else:
            raise ParseError(f"unexpected line {stripped!r}")
    flush()
    if not out:
        raise ParseError("no theorems found")
    return out


def valuation_from_json(data: Mapping) -> dict[str, fs.FinSetObj]:
    """``{"p": {"elements": [...]}}`` or ``{"p": [...]}``."""
    out = {}
    for name, body in data.items():
        elems = body["elements"] if isinstance(body, Mapping) else body
        out[name] = fs.FinSetObj(name, tuple(str(x) for x in elems))
    return out


# ---------------------------------------------------------------- term generation

def type_universe(atom_names: Sequence[str] = ("p", "q")) -> list[Formula]:
    """A small closed family of types for enumerating binders and cut formulas."""
    base = [Atom(a) for a in atom_names] + [Top(), Bot()]
    p = Atom(atom_names[0])
    q = Atom(atom_names[-1])
    ident = Imp(p, p)
    # the last two are inhabited by closed terms, so redexes can project and branch
    return base + [And(p, q), Or(p, q), Imp(p, q), Imp(q, p), ident, Not(p), And(Top(), ident), Or(ident, Top())]


def terms_of(ctx: Context, ty: Formula, max_depth: int, universe: Sequence[Formula]) -> Iterator[Term]:
    """Every term of type ``ty`` with height ≤ max_depth whose intermediate types lie in ``universe``."""
    if max_depth < 1:
        return
    shadowed = set()
    for x, a in reversed(ctx):
        if x not in shadowed and a == ty:
            yield Var(x)
        shadowed.add(x)
    if isinstance(ty, Top):
        yield Unit()
    if max_depth < 2:
        return
    d = max_depth - 1
    if isinstance(ty, Imp):
        x = f"x{len(ctx)}"
        for b in terms_of(list(ctx) + [(x, ty.left)], ty.right, d, universe):
            yield Lam(x, b)
    if isinstance(ty, And):
        lefts = list(terms_of(ctx, ty.left, d, universe))
        for r in terms_of(ctx, ty.right, d, universe):
            for l in lefts:
                yield Pair(l, r)
    if isinstance(ty, Or):
        for l in terms_of(ctx, ty.left, d, universe):
            yield Inl(l)
        for r in terms_of(ctx, ty.right, d, universe):
            yield Inr(r)
    for c in universe:
        for t in terms_of(ctx, And(ty, c), d, universe):
            yield Fst(t)
        for t in terms_of(ctx, And(c, ty), d, universe):
            yield Snd(t)
        args = list(terms_of(ctx, c, d, universe))
        if args:
            for f in terms_of(ctx, Imp(c, ty), d, universe):
                for u in args:
                    yield App(f, u)
    for t in terms_of(ctx, Bot(), d, universe):
        yield Abort(t)
    for c1, c2 in itertools.product(universe, repeat=2):
        scr = list(terms_of(ctx, Or(c1, c2), d, universe))
        if not scr:
            continue
        x, y = f"x{len(ctx)}", f"y{len(ctx)}"
        lefts = list(terms_of(list(ctx) + [(x, c1)], ty, d, universe))
        rights = list(terms_of(list(ctx) + [(y, c2)], ty, d, universe))
        for s in scr:
            for l in lefts:
                for r in rights:
                    yield Case(s, x, l, y, r)


def closed_redexes(max_depth: int = 4, universe: Sequence[Formula] | None = None) -> Iterator[tuple[App, Formula]]:
    """Closed, well-typed (λx.t) s of height ≤ max_depth, with their types."""
    universe = type_universe() if universe is None else universe
    for a, b in itertools.product(universe, repeat=2):
        args = list(terms_of([], a, max_depth - 1, universe))
        if not args:
            continue
        for body in terms_of([("x", a)], b, max_depth - 2, universe):
            for s in args:
                yield App(Lam("x", body), s), b


def check_beta_soundness(redex: App, phi: Formula, v: Valuation, dualizing: fs.FinSetObj = fs.EMPTY) -> Report:
    """⟦(λx.t) s⟧ = ⟦t[s/x]⟧ as exact tables."""
    rep = Report("beta_soundness")
    reduct = substitute(redex.fn.body, redex.fn.var, redex.arg)
    lhs = interpret_term(type_check([], redex, phi), v, dualizing)
    rhs = interpret_term(type_check([], reduct, phi), v, dualizing)
    if lhs != rhs:
        rep.fail(redex=show_term(redex), reduct=show_term(reduct), lhs=list(lhs.table), rhs=list(rhs.table))
    return rep


def valuations(atom_names: Sequence[str] = ("p", "q"), max_size: int = 2) -> list[dict[str, fs.FinSetObj]]:
    """Every assignment of sets {0..n-1}, n ≤ max_size, to the atoms."""
    sets = [fs.FinSetObj(f"S{n}", tuple(str(i) for i in range(n))) for n in range(max_size + 1)]
    out = []
    for pick in itertools.product(range(max_size + 1), repeat=len(atom_names)):
        out.append({a: fs.FinSetObj(a, sets[n].elements) for a, n in zip(atom_names, pick)})
    return out
