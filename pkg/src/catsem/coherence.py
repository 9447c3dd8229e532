"""Formal 1-cell expressions, rewrite paths between bracketings, and their evaluation.

An expression is a tree of generators, identities and binary composites
``Comp(outer, inner)`` (inner applied first). Rewrite steps apply the
associator, the unitors or their inverses at a position, a tuple of 0/1
choices (0 = outer child, 1 = inner child).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence

from .bicat import BicatInstance
from .errors import BudgetZeroPaths, CatsemError, NotParallel, ParseError, ShapeMismatch, UnknownGenerator
from .report import Report


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Generator:
    label: str
    src: str
    tgt: str

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Id:
    obj: str

    @property
    def src(self):
        return self.obj

    @property
    def tgt(self):
        return self.obj

    def __str__(self):
        return f"(id {self.obj})"


@dataclass(frozen=True)
class Comp:
    outer: "OneCellExpr"
    inner: "OneCellExpr"

    def __post_init__(self):
        if self.inner.tgt != self.outer.src:
            raise ShapeMismatch(f"cannot compose {self.outer} after {self.inner}: "
                                f"{self.inner.tgt} ≠ {self.outer.src}")

    @property
    def src(self):
        return self.inner.src

    @property
    def tgt(self):
        return self.outer.tgt

    def __str__(self):
        return f"(comp {self.outer} {self.inner})"


OneCellExpr = Generator | Id | Comp
Position = tuple[int, ...]


def generators(e: OneCellExpr) -> list[Generator]:
    """Generator leaves, left to right (outermost first)."""
    if isinstance(e, Generator):
        return [e]
    if isinstance(e, Id):
        return []
    return generators(e.outer) + generators(e.inner)


def count_ids(e: OneCellExpr) -> int:
    if isinstance(e, Id):
        return 1
    if isinstance(e, Comp):
        return count_ids(e.outer) + count_ids(e.inner)
    return 0


def size(e: OneCellExpr) -> int:
    return 1 if not isinstance(e, Comp) else size(e.outer) + size(e.inner)


def right_fold(gens: Sequence[Generator], obj: str) -> OneCellExpr:
    if not gens:
        return Id(obj)
    out = gens[-1]
    for g in reversed(gens[:-1]):
        out = Comp(g, out)
    return out


def left_fold(gens: Sequence[Generator], obj: str) -> OneCellExpr:
    if not gens:
        return Id(obj)
    out = gens[0]
    for g in gens[1:]:
        out = Comp(out, g)
    return out


def normalize(e: OneCellExpr) -> OneCellExpr:
    """Right-associated, identity-free form (a single Id if no generators remain)."""
    return right_fold(generators(e), e.src)


def bracketings(gens: Sequence[Generator]) -> list[OneCellExpr]:
    """All binary bracketings of a nonempty generator word, in a fixed order."""
    if len(gens) == 1:
        return [gens[0]]
    out = []
    for k in range(1, len(gens)):
        for outer in bracketings(gens[:k]):
            for inner in bracketings(gens[k:]):
                out.append(Comp(outer, inner))
    return out


def with_identities(e: OneCellExpr, n: int = 1) -> list[OneCellExpr]:
    """All expressions obtained from ``e`` by wrapping subtrees in at most n unit composites."""
    if n == 0:
        return [e]
    out = {e: None}
    for x in _insert_one(e):
        out[x] = None
    if n > 1:
        for x in list(out):
            for y in with_identities(x, n - 1):
                out[y] = None
    return list(out)


def _insert_one(e):
    yield Comp(Id(e.tgt), e)
    yield Comp(e, Id(e.src))
    if isinstance(e, Comp):
        for o in _insert_one(e.outer):
            yield Comp(o, e.inner)
        for i in _insert_one(e.inner):
            yield Comp(e.outer, i)


# ---------------------------------------------------------------- rewrite steps

INVERSE = {"assoc": "assocInv", "assocInv": "assoc", "lunit": "lunitInv", "lunitInv": "lunit",
           "runit": "runitInv", "runitInv": "runit"}


@dataclass(frozen=True)
class RewriteStep:
    kind: str
    position: Position = ()

    def __post_init__(self):
        if self.kind not in INVERSE:
            raise CatsemError(f"unknown rewrite kind {self.kind!r}")

    def inverse(self) -> RewriteStep:
        return RewriteStep(INVERSE[self.kind], self.position)

    def __str__(self):
        return f"{self.kind}@{''.join(map(str, self.position)) or 'root'}"


def subterm(e: OneCellExpr, pos: Position) -> OneCellExpr:
    for p in pos:
        if not isinstance(e, Comp):
            raise CatsemError(f"position {pos} leaves the tree")
        e = e.outer if p == 0 else e.inner
    return e


def replace(e: OneCellExpr, pos: Position, new: OneCellExpr) -> OneCellExpr:
    if not pos:
        return new
    if not isinstance(e, Comp):
        raise CatsemError(f"position {pos} leaves the tree")
    if pos[0] == 0:
        return Comp(replace(e.outer, pos[1:], new), e.inner)
    return Comp(e.outer, replace(e.inner, pos[1:], new))


def _apply_root(kind: str, e: OneCellExpr) -> OneCellExpr | None:
    if kind == "assoc" and isinstance(e, Comp) and isinstance(e.outer, Comp):
        return Comp(e.outer.outer, Comp(e.outer.inner, e.inner))
    if kind == "assocInv" and isinstance(e, Comp) and isinstance(e.inner, Comp):
        return Comp(Comp(e.outer, e.inner.outer), e.inner.inner)
    if kind == "lunit" and isinstance(e, Comp) and isinstance(e.outer, Id):
        return e.inner
    if kind == "runit" and isinstance(e, Comp) and isinstance(e.inner, Id):
        return e.outer
    if kind == "lunitInv":
        return Comp(Id(e.tgt), e)
    if kind == "runitInv":
        return Comp(e, Id(e.src))
    return None


def apply_step(e: OneCellExpr, step: RewriteStep) -> OneCellExpr:
    new = _apply_root(step.kind, subterm(e, step.position))
    if new is None:
        raise CatsemError(f"step {step} not applicable to {e}")
    return replace(e, step.position, new)


def applicable_steps(e: OneCellExpr, insert_units: bool = True) -> Iterator[tuple[RewriteStep, OneCellExpr]]:
    """Every step applicable somewhere in ``e`` with its result, in a fixed order."""
    def walk(x, pos):
        for kind in ("assoc", "assocInv", "lunit", "runit") + (("lunitInv", "runitInv") if insert_units else ()):
            new = _apply_root(kind, x)
            if new is not None:
                yield RewriteStep(kind, pos), new
        if isinstance(x, Comp):
            yield from walk(x.outer, pos + (0,))
            yield from walk(x.inner, pos + (1,))

    for step, new in walk(e, ()):
        yield step, replace(e, step.position, new)


def _first_redex(e: OneCellExpr, pos: Position = ()) -> RewriteStep | None:
    """Leftmost-innermost: search outer, then inner, then the node itself."""
    if not isinstance(e, Comp):
        return None
    for child, p in ((e.outer, 0), (e.inner, 1)):
        found = _first_redex(child, pos + (p,))
        if found is not None:
            return found
    for kind in ("lunit", "runit", "assoc"):
        if _apply_root(kind, e) is not None:
            return RewriteStep(kind, pos)
    return None


@dataclass(frozen=True)
class TwoCellPath:
    source: OneCellExpr
    target: OneCellExpr
    steps: tuple[RewriteStep, ...] = ()

    def expressions(self) -> list[OneCellExpr]:
        out = [self.source]
        for s in self.steps:
            out.append(apply_step(out[-1], s))
        if out[-1] != self.target:
            raise CatsemError("path does not end at its target")
        return out

    def inverse(self) -> TwoCellPath:
        return TwoCellPath(self.target, self.source, tuple(s.inverse() for s in reversed(self.steps)))

    def then(self, other: TwoCellPath) -> TwoCellPath:
        if self.target != other.source:
            raise NotParallel("paths do not chain")
        return TwoCellPath(self.source, other.target, self.steps + other.steps)

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return " ; ".join(map(str, self.steps)) or "id"


def normalization_path(e: OneCellExpr) -> TwoCellPath:
    """The deterministic route from ``e`` to its normal form."""
    steps, cur = [], e
    while (step := _first_redex(cur)) is not None:
        steps.append(step)
        cur = apply_step(cur, step)
    return TwoCellPath(e, cur, tuple(steps))


def canonical_path(e1: OneCellExpr, e2: OneCellExpr) -> TwoCellPath:
    _require_parallel(e1, e2)
    return normalization_path(e1).then(normalization_path(e2).inverse())


def _require_parallel(e1, e2):
    if (e1.src, e1.tgt) != (e2.src, e2.tgt) or generators(e1) != generators(e2):
        raise NotParallel(f"{e1} and {e2} have different normal forms")


# ---------------------------------------------------------------- evaluation

class Evaluator:
    """Interprets expressions and paths in a bicategory instance.

    ``env`` maps generator labels to 1-cells of the instance. Step cells are
    cached per (expression, step).
    """

    def __init__(self, inst: BicatInstance, env: Mapping[str, Any]):
        self.inst = inst
        self.env = dict(env)
        self._cells: dict = {}
        self._ones: dict = {}

    def one_cell(self, e: OneCellExpr):
        if e in self._ones:
            return self._ones[e]
        inst = self.inst
        if isinstance(e, Generator):
            if e.label not in self.env:
                raise UnknownGenerator(e.label)
            out = self.env[e.label]
        elif isinstance(e, Id):
            out = inst.id1(e.obj)
        else:
            out = inst.hcomp1(self.one_cell(e.outer), self.one_cell(e.inner))
        self._ones[e] = out
        return out

    def _root_cell(self, kind, x):
        inst, v = self.inst, self.one_cell
        if kind == "assoc":
            return inst.assoc(v(x.inner), v(x.outer.inner), v(x.outer.outer))
        if kind == "assocInv":
            return inst.assoc_inv(v(x.inner.inner), v(x.inner.outer), v(x.outer))
        if kind == "lunit":
            return inst.lunit(v(x.inner))
        if kind == "runit":
            return inst.runit(v(x.outer))
        if kind == "lunitInv":
            return inst.lunit_inv(v(x))
        return inst.runit_inv(v(x))

    def _whiskered(self, kind, x, pos):
        if not pos:
            return self._root_cell(kind, x)
        inner = self._whiskered(kind, x.outer if pos[0] == 0 else x.inner, pos[1:])
        if pos[0] == 0:
            return self.inst.hcomp2(inner, self.inst.id2(self.one_cell(x.inner)))
        return self.inst.hcomp2(self.inst.id2(self.one_cell(x.outer)), inner)

    def step_cell(self, e: OneCellExpr, step: RewriteStep):
        key = (e, step)
        if key not in self._cells:
            self._cells[key] = self._whiskered(step.kind, e, step.position)
        return self._cells[key]

    def path_cell(self, path: TwoCellPath):
        exprs = path.expressions()
        cell = self.inst.id2(self.one_cell(path.source))
        for x, step in zip(exprs, path.steps):
            cell = self.inst.vcomp(self.step_cell(x, step), cell)
        return cell


def canonical_cell(e1: OneCellExpr, e2: OneCellExpr, inst: BicatInstance | Evaluator,
                   env: Mapping[str, Any] | None = None):
    """The 2-cell e1 ⇒ e2 obtained by normalizing e1 and de-normalizing into e2."""
    ev = inst if isinstance(inst, Evaluator) else Evaluator(inst, env or {})
    return ev.path_cell(canonical_path(e1, e2))


# ---------------------------------------------------------------- path enumeration

def enumerate_paths(e1: OneCellExpr, e2: OneCellExpr, budget: int = 5,
                    insert_units: bool = True) -> list[TwoCellPath]:
    """All simple rewrite paths e1 → e2 with at most ``budget`` steps.

    Simple means no expression is visited twice, which rules out trivial
    back-and-forth detours. Each step changes the identity count by at most
    one, which prunes the search.
    """
    _require_parallel(e1, e2)
    return _paths_from(e1, budget, insert_units, {e2}).get(e2, [])


def _paths_from(e1, budget, insert_units, targets=None) -> dict[OneCellExpr, list[TwoCellPath]]:
    """Simple paths from e1 of length ≤ budget, grouped by endpoint."""
    found: dict[OneCellExpr, list[TwoCellPath]] = {}
    target_ids = None if targets is None else {count_ids(t) for t in targets}
    seen = {e1}
    steps: list[RewriteStep] = []

    def visit(x):
        if targets is None or x in targets:
            found.setdefault(x, []).append(TwoCellPath(e1, x, tuple(steps)))
        left = budget - len(steps)
        if left == 0:
            return
        for step, y in applicable_steps(x, insert_units):
            if y in seen:
                continue
            if target_ids is not None and min(abs(count_ids(y) - t) for t in target_ids) > left - 1:
                continue
            seen.add(y)
            steps.append(step)
            visit(y)
            steps.pop()
            seen.discard(y)

    visit(e1)
    return found


def check_all_paths_equal(e1: OneCellExpr, e2: OneCellExpr, inst: BicatInstance | Evaluator,
                          env: Mapping[str, Any] | None = None, budget: int = 5,
                          insert_units: bool = True, paths: Sequence[TwoCellPath] | None = None) -> Report:
    """Evaluate every path e1 → e2 and compare each with the canonical cell."""
    ev = inst if isinstance(inst, Evaluator) else Evaluator(inst, env or {})
    if paths is None:
        paths = enumerate_paths(e1, e2, budget, insert_units)
    if not paths:
        raise BudgetZeroPaths(f"no rewrite path from {e1} to {e2} within {budget} steps")
    rep = Report("all_paths_equal", details={"source": str(e1), "target": str(e2), "paths": len(paths)})
    canon_path = canonical_path(e1, e2)
    canon = ev.path_cell(canon_path)
    for p in paths:
        cell = _path_value(ev, p)
        if not ev.inst.eq2(cell, canon):
            rep.fail(path=str(p), canonical=str(canon_path),
                     path_cell=ev.inst.describe(cell), canonical_cell=ev.inst.describe(canon))
    return rep


def _path_value(ev: Evaluator, path: TwoCellPath):
    cell = ev.inst.id2(ev.one_cell(path.source))
    x = path.source
    for step in path.steps:
        cell = ev.inst.vcomp(ev.step_cell(x, step), cell)
        x = apply_step(x, step)
    return cell


def coherence_sweep(inst: BicatInstance, env: Mapping[str, Any], words: Sequence[Sequence[Generator]],
                    budget: int = 5, insert_units: bool = True, identities: int = 0,
                    max_witnesses: int = 20) -> Report:
    """check_all_paths_equal over every parallel pair of bracketings of each word.

    With ``identities`` > 0 the expressions also include up to that many unit
    composites. One search per source covers all of its targets.
    """
    ev = Evaluator(inst, env)
    rep = Report("coherence_sweep")
    pairs = total = failures = 0
    for word in words:
        exprs = {}
        for b in bracketings(list(word)):
            for x in with_identities(b, identities):
                exprs[x] = None
        targets = set(exprs)
        for e1 in exprs:
            by_target = _paths_from(e1, budget, insert_units, targets)
            for e2 in exprs:
                ps = by_target.get(e2, [])
                if not ps:
                    raise BudgetZeroPaths(f"no rewrite path from {e1} to {e2} within {budget} steps")
                sub = check_all_paths_equal(e1, e2, ev, paths=ps)
                pairs += 1
                total += len(ps)
                failures += len(sub.witnesses)
                if not sub.passed:
                    sub.witnesses = sub.witnesses[:max(max_witnesses - len(rep.witnesses), 0)]
                    rep.absorb(sub, source=str(e1), target=str(e2))
    rep.details.update(pairs=pairs, paths=total, failures=failures, budget=budget)
    return rep


# ---------------------------------------------------------------- s-expressions

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")


def tokenize(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", pos)
        if m.group(1) is None and m.lastindex:
            tok = m.group(m.lastindex)
            out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return out


def read_sexprs(text: str) -> list:
    """Parse s-expressions into nested lists of atoms."""
    toks = tokenize(text)
    i = 0

    def read():
        nonlocal i
        if i >= len(toks):
            raise ParseError("unexpected end of input", len(text))
        tok, pos = toks[i]
        i += 1
        if tok == ")":
            raise ParseError("unbalanced ')'", pos)
        if tok != "(":
            return tok
        items = []
        while True:
            if i >= len(toks):
                raise ParseError("missing ')'", len(text))
            if toks[i][0] == ")":
                i += 1
                return items
            items.append(read())

    out = []
    while i < len(toks):
        out.append(read())
    return out


def expr_from_sexpr(sx, gens: Mapping[str, Generator]) -> OneCellExpr:
    if isinstance(sx, str):
        if sx not in gens:
            raise UnknownGenerator(sx)
        return gens[sx]
    if len(sx) == 2 and sx[0] == "id" and isinstance(sx[1], str):
        return Id(sx[1])
    if len(sx) >= 3 and sx[0] == "comp":
        parts = [expr_from_sexpr(s, gens) for s in sx[1:]]
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Comp(p, out)
        return out
    raise ParseError(f"malformed expression {sx!r}")


def parse_expr(text: str, gens: Mapping[str, Generator]) -> OneCellExpr:
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError("expected a single expression")
    return expr_from_sexpr(forms[0], gens)


@dataclass
class ExpressionFile:
    """``(gen f A B [cell])`` declarations plus ``(source e)`` and ``(target e)``."""

    generators: dict[str, Generator] = field(default_factory=dict)
    bindings: dict[str, str] = field(default_factory=dict)
    source: OneCellExpr | None = None
    target: OneCellExpr | None = None


def parse_expression_file(text: str) -> ExpressionFile:
    out = ExpressionFile()
    for form in read_sexprs(text):
        if not isinstance(form, list) or not form:
            raise ParseError(f"unexpected top-level form {form!r}")
        head = form[0]
        if head == "gen":
            if len(form) not in (4, 5) or not all(isinstance(x, str) for x in form):
                raise ParseError("expected (gen name src tgt [cell])")
            out.generators[form[1]] = Generator(form[1], form[2], form[3])
            out.bindings[form[1]] = form[4] if len(form) == 5 else form[1]
        elif head in ("source", "target") and len(form) == 2:
            setattr(out, head, expr_from_sexpr(form[1], out.generators))
        else:
            raise ParseError(f"unknown form ({head} ...)")
    if out.source is None or out.target is None:
        raise ParseError("expression file needs (source ...) and (target ...)")
    return out


def unparse(e: OneCellExpr) -> str:
    return str(e)


def words_up_to(gens: Sequence[Generator], n: int) -> list[tuple[Generator, ...]]:
    """Composable words of length 1..n over ``gens`` (outermost first)."""
    out = []
    for k in range(1, n + 1):
        for w in itertools.product(gens, repeat=k):
            if all(w[i].src == w[i + 1].tgt for i in range(k - 1)):
                out.append(w)
    return out


def path_to_dict(p: TwoCellPath) -> dict:
    return {"source": str(p.source), "target": str(p.target), "steps": [str(s) for s in p.steps]}


def evaluate_all(ev: Evaluator, paths: Sequence[TwoCellPath], fn: Callable = map) -> list:
    return list(fn(lambda p: _path_value(ev, p), paths))
