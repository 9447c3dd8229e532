"""Strictification by generator strings.

The strict 2-category has composable strings of generators as 1-cells, with
concatenation as composition; its 2-cells are 2-cells of the source instance
between the left-fold evaluations of the strings. ``F`` sends an expression
to its list of generator leaves and ``G`` evaluates a string by left fold.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .bicat import BicatInstance
from .coherence import (
    Comp,
    Evaluator,
    Generator,
    Id,
    OneCellExpr,
    bracketings,
    canonical_cell,
    coherence_sweep,
    generators as leaves,
    left_fold,
    with_identities,
    words_up_to,
)
from .errors import CatsemError, MissingWitness, ShapeMismatch, SizeBudgetExceeded, UnknownGenerator
from .report import Report

FOLD = "left"


@dataclass(frozen=True)
class Word:
    """A composable string of generator labels, outermost first; empty words carry their object."""

    labels: tuple[str, ...]
    src: str
    tgt: str

    def __add__(self, other: Word) -> Word:
        if self.src != other.tgt:
            raise ShapeMismatch(f"cannot concatenate {self} after {other}")
        return Word(self.labels + other.labels, other.src, self.tgt)

    def __len__(self):
        return len(self.labels)

    def __str__(self):
        return "[" + ",".join(self.labels) + "]"


@dataclass(frozen=True)
class StrictCell:
    """A 2-cell s ⇒ t of the strict 2-category: a source 2-cell eval(s) ⇒ eval(t)."""

    source: Word
    target: Word
    cell: Any


class StrictTwoCategory:
    def __init__(self, inst: BicatInstance, gens: Mapping[str, Any], bound: int, max_strings: int = 10_000):
        if bound < 1:
            raise CatsemError("length bound must be at least 1")
        self.inst = inst
        self.cells = dict(gens)
        self.gens = {x: Generator(x, inst.src(c), inst.tgt(c)) for x, c in self.cells.items()}
        self.bound = bound
        self.ev = Evaluator(inst, self.cells)
        words = [Word((), a, a) for a in inst.objects()]
        count = len(words)
        for w in words_up_to(list(self.gens.values()), bound):
            count += 1
            if count > max_strings:
                raise SizeBudgetExceeded(f"more than {max_strings} strings up to length {bound}")
            words.append(Word(tuple(g.label for g in w), w[-1].src, w[0].tgt))
        self.strings = words
        self._mu: dict = {}

    def objects(self):
        return self.inst.objects()

    def identity(self, a: str) -> Word:
        return Word((), a, a)

    def concat(self, s: Word, t: Word) -> Word:
        return s + t

    def expr(self, s: Word) -> OneCellExpr:
        return left_fold([self.gens[x] for x in s.labels], s.src)

    def eval(self, s: Word):
        """G on 1-cells: id1 for the empty word, otherwise the left fold."""
        for x in s.labels:
            if x not in self.gens:
                raise UnknownGenerator(x)
        return self.ev.one_cell(self.expr(s))

    def id2(self, s: Word) -> StrictCell:
        return StrictCell(s, s, self.inst.id2(self.eval(s)))

    def transport(self, s: Word, t: Word, cell) -> StrictCell:
        inst = self.inst
        if inst.cell_dom(cell) != self.eval(s) or inst.cell_cod(cell) != self.eval(t):
            raise ShapeMismatch("2-cell does not lie over the given strings")
        return StrictCell(s, t, cell)

    def two_cells(self, s: Word, t: Word) -> list[StrictCell]:
        return [StrictCell(s, t, c) for c in self.inst.two_cells(self.eval(s), self.eval(t))]

    def vcomp(self, beta: StrictCell, alpha: StrictCell) -> StrictCell:
        if alpha.target != beta.source:
            raise ShapeMismatch("strict 2-cells not vertically composable")
        return StrictCell(alpha.source, beta.target, self.inst.vcomp(beta.cell, alpha.cell))

    def hcomp2(self, beta: StrictCell, alpha: StrictCell) -> StrictCell:
        """β⋆α : s++t ⇒ s'++t', conjugated by the concatenation cells."""
        s, s2, t, t2 = beta.source, beta.target, alpha.source, alpha.target
        inst = self.inst
        mid = inst.hcomp2(beta.cell, alpha.cell)
        cell = inst.vcomp(self.mu(s2, t2), inst.vcomp(mid, self.mu_inv(s, t)))
        return StrictCell(s + t, s2 + t2, cell)

    def mu(self, s: Word, t: Word):
        """Concatenation cell eval(s)∘eval(t) ⇒ eval(s++t)."""
        key = ("mu", s, t)
        if key not in self._mu:
            self._mu[key] = self._build_mu(s, t, inverse=False)
        return self._mu[key]

    def mu_inv(self, s: Word, t: Word):
        key = ("inv", s, t)
        if key not in self._mu:
            self._mu[key] = self._build_mu(s, t, inverse=True)
        return self._mu[key]

    def _build_mu(self, s: Word, t: Word, inverse: bool):
        inst, ev = self.inst, self.eval
        if s.src != t.tgt:
            raise ShapeMismatch(f"cannot concatenate {s} after {t}")
        if not t.labels:
            return inst.runit_inv(ev(s)) if inverse else inst.runit(ev(s))
        if not s.labels:
            return inst.lunit_inv(ev(t)) if inverse else inst.lunit(ev(t))
        if len(t) == 1:
            return inst.id2(ev(s + t))
        # t = t' x with x innermost: s∘(t'∘x) ⇒ (s∘t')∘x ⇒ (s++t')∘x
        x = Word(t.labels[-1:], t.src, self.gens[t.labels[-1]].tgt)
        t1 = Word(t.labels[:-1], x.tgt, t.tgt)
        fx, ft1, fs = ev(x), ev(t1), ev(s)
        if inverse:
            return inst.vcomp(inst.assoc(fx, ft1, fs), inst.hcomp2(self.mu_inv(s, t1), inst.id2(fx)))
        return inst.vcomp(inst.hcomp2(self.mu(s, t1), inst.id2(fx)), inst.assoc_inv(fx, ft1, fs))


@dataclass
class StrictificationWitness:
    strict: StrictTwoCategory
    metadata: dict = field(default_factory=lambda: {"fold": FOLD})

    def __post_init__(self):
        self._unit: dict = {}

    @property
    def inst(self) -> BicatInstance:
        return self.strict.inst

    def F(self, e: OneCellExpr) -> Word:
        labels = tuple(g.label for g in leaves(e))
        return Word(labels, e.src, e.tgt)

    def G(self, s: Word):
        return self.strict.eval(s)

    def one_cell(self, e: OneCellExpr):
        return self.strict.ev.one_cell(e)

    def unit_iso(self, e: OneCellExpr):
        """e ⇒ G(F(e)), assembled from concatenation cells."""
        return self._unit_cell(e, False)

    def unit_inv(self, e: OneCellExpr):
        return self._unit_cell(e, True)

    def _unit_cell(self, e, inverse):
        key = (e, inverse)
        if key in self._unit:
            return self._unit[key]
        inst, st = self.inst, self.strict
        if isinstance(e, (Generator, Id)):
            out = inst.id2(self.one_cell(e))
        else:
            o, i = self.F(e.outer), self.F(e.inner)
            whisk = inst.hcomp2(self._unit_cell(e.outer, inverse), self._unit_cell(e.inner, inverse))
            out = inst.vcomp(whisk, st.mu_inv(o, i)) if inverse else inst.vcomp(st.mu(o, i), whisk)
        self._unit[key] = out
        return out

    def counit_iso(self, s: Word) -> StrictCell:
        """F(G(s)) = s on the nose, so the counit is the identity."""
        return self.strict.id2(s)


def strictify_instance(inst: BicatInstance, gens: Mapping[str, Any], bound: int = 4,
                       max_strings: int = 10_000) -> tuple[StrictTwoCategory, StrictificationWitness]:
    strict = StrictTwoCategory(inst, gens, bound, max_strings)
    return strict, StrictificationWitness(strict)


def eval_string(s: Word | Sequence[str], strict: StrictTwoCategory):
    if not isinstance(s, Word):
        labels = tuple(s)
        if not labels:
            objs = strict.objects()
            if len(objs) != 1:
                raise CatsemError("the empty string needs an object")
            s = Word((), objs[0], objs[0])
        else:
            for x in labels:
                if x not in strict.gens:
                    raise UnknownGenerator(x)
            s = Word(labels, strict.gens[labels[-1]].src, strict.gens[labels[0]].tgt)
    return strict.eval(s)


# ---------------------------------------------------------------- checks

def expressions_within(strict: StrictTwoCategory, bound: int | None = None, identities: bool = True) -> list[OneCellExpr]:
    """Bracketings of composable words with at most ``bound`` leaves, identity leaves included."""
    bound = strict.bound if bound is None else bound
    out: dict[OneCellExpr, None] = {Id(a): None for a in strict.objects()}
    for w in words_up_to(list(strict.gens.values()), bound):
        for b in bracketings(list(w)):
            out[b] = None
            if identities and len(w) < bound:
                for x in with_identities(b, 1):
                    out[x] = None
    return list(out)


def _leaf_cells(strict: StrictTwoCategory, x: Generator, pool: int | None):
    inst = strict.inst
    f = strict.cells[x.label]
    out = []
    for y, g in strict.cells.items():
        if inst.src(g) != x.src or inst.tgt(g) != x.tgt:
            continue
        for c in inst.two_cells(f, g):
            out.append((strict.gens[y], c))
    if pool is None:
        return out
    ident = inst.id2(f)
    rest = [(y, c) for y, c in out if not (y == x and inst.eq2(c, ident))]
    return [(x, ident)] + rest[:pool]


def structural_cells(strict: StrictTwoCategory, e: OneCellExpr, pool: int | None = None):
    """All (e', α: e ⇒ e', leaf cells) with generator 2-cells placed at the leaves of e."""
    inst = strict.inst
    if isinstance(e, Id):
        yield e, inst.id2(inst.id1(e.obj)), ()
    elif isinstance(e, Generator):
        for y, c in _leaf_cells(strict, e, pool):
            yield y, c, (c,)
    else:
        outer = list(structural_cells(strict, e.outer, pool))
        inner = list(structural_cells(strict, e.inner, pool))
        for (o2, a, la), (i2, b, lb) in itertools.product(outer, inner):
            yield Comp(o2, i2), inst.hcomp2(a, b), la + lb


def fold_cells(strict: StrictTwoCategory, cells: Sequence, obj: str):
    """G(F(α)): the leaf cells whiskered together in left-fold shape."""
    inst = strict.inst
    if not cells:
        return inst.id2(inst.id1(obj))
    out = cells[0]
    for c in cells[1:]:
        out = inst.hcomp2(out, c)
    return out


def check_biequivalence(witness: StrictificationWitness, expr_bound: int | None = None,
                        exhaustive_leaves: int = 2, pool: int = 2, max_witnesses: int = 20) -> Report:
    """Unit components are invertible, equal the canonical coherence cells, and are natural.

    Naturality runs over every leaf-wise 2-cell for expressions with at most
    ``exhaustive_leaves`` generators and over a pool of ``pool`` non-identity
    leaf cells (plus identities) beyond that.
    """
    strict, inst = witness.strict, witness.inst
    rep = Report("biequivalence", details={"fold": FOLD})
    exprs = expressions_within(strict, expr_bound)
    counts = {"expressions": len(exprs), "naturality_squares": 0, "strings": len(strict.strings), "failures": 0}

    def fail(**w):
        counts["failures"] += 1
        if len(rep.witnesses) < max_witnesses:
            rep.fail(**w)

    for e in exprs:
        u, ui = witness.unit_iso(e), witness.unit_inv(e)
        gfe = witness.G(witness.F(e))
        if inst.cell_dom(u) != witness.one_cell(e) or inst.cell_cod(u) != gfe:
            fail(law="unit_type", expression=str(e))
            continue
        if not inst.eq2(inst.vcomp(ui, u), inst.id2(witness.one_cell(e))) or not inst.eq2(inst.vcomp(u, ui), inst.id2(gfe)):
            fail(law="unit_invertible", expression=str(e))
        canon = canonical_cell(e, strict.expr(witness.F(e)), strict.ev)
        if not inst.eq2(u, canon):
            fail(law="unit_canonical", expression=str(e), unit=inst.describe(u), canonical=inst.describe(canon))
        n = len(leaves(e))
        for e2, alpha, cells in structural_cells(strict, e, None if n <= exhaustive_leaves else pool):
            counts["naturality_squares"] += 1
            lhs = inst.vcomp(witness.unit_iso(e2), alpha)
            rhs = inst.vcomp(fold_cells(strict, cells, e.src), u)
            if not inst.eq2(lhs, rhs):
                fail(law="unit_naturality", expression=str(e), target=str(e2), alpha=inst.describe(alpha))
    for s in strict.strings:
        c = witness.counit_iso(s)
        if witness.F(strict.expr(s)) != s or not inst.eq2(c.cell, inst.id2(strict.eval(s))):
            fail(law="counit", string=str(s))
    rep.details.update(counts)
    return rep


def check_strict_laws(strict: StrictTwoCategory, samples: Sequence[tuple[StrictCell, StrictCell, StrictCell]]) -> Report:
    """Transported horizontal composition is associative and strictly unital on samples."""
    rep = Report("strict_laws")
    inst = strict.inst
    for a, b, c in samples:
        lhs = strict.hcomp2(strict.hcomp2(c, b), a)
        rhs = strict.hcomp2(c, strict.hcomp2(b, a))
        if lhs.source != rhs.source or not inst.eq2(lhs.cell, rhs.cell):
            rep.fail(law="hcomp_assoc", cells=[str(x.source) + "⇒" + str(x.target) for x in (a, b, c)])
        for x in (a, b, c):
            for idw in (strict.id2(strict.identity(x.source.tgt)),):
                left = strict.hcomp2(idw, x)
                if left.source != x.source or not inst.eq2(left.cell, x.cell):
                    rep.fail(law="hcomp_left_unit", cell=str(x.source))
            right = strict.hcomp2(x, strict.id2(strict.identity(x.source.src)))
            if right.source != x.source or not inst.eq2(right.cell, x.cell):
                rep.fail(law="hcomp_right_unit", cell=str(x.source))
    return rep


def check_quotient(strict: StrictTwoCategory, bound: int | None = None, budget: int = 5) -> Report:
    """No two parallel coherence cells between bracketings differ after evaluation."""
    bound = strict.bound if bound is None else bound
    words = words_up_to(list(strict.gens.values()), bound)
    rep = coherence_sweep(strict.inst, strict.cells, words, budget=budget, insert_units=False)
    rep.check = "quotient"
    return rep


# ---------------------------------------------------------------- universal properties

@dataclass
class HomWitness:
    """A universal object in a hom-category: a product (carrier, pi_A, pi_B) or a terminal object."""

    kind: str
    carrier: Any
    projections: tuple = ()


def check_universal_preservation(witness: StrictificationWitness, product: HomWitness | None,
                                 tests: Sequence[OneCellExpr]) -> Report:
    """For each test expression X, mediators into the universal object correspond under unit conjugation.

    Source side: 2-cells X ⇒ carrier in the instance. Strict side: 2-cells
    F(X) ⇒ [carrier] between strings, i.e. eval(F X) ⇒ carrier. A mediator
    m corresponds to m ∘ unit(X)⁻¹.
    """
    if product is None or (product.kind == "product" and len(product.projections) != 2):
        raise MissingWitness("a product or terminal witness is required")
    if product.kind not in ("product", "terminal"):
        raise MissingWitness(f"unsupported witness kind {product.kind!r}")
    strict, inst = witness.strict, witness.inst
    rep = Report("universal_preservation", details={"kind": product.kind, "tests": {}})
    for X in tests:
        x_cell, fx = witness.one_cell(X), strict.eval(witness.F(X))
        ui = witness.unit_inv(X)
        src_counts, src_map = _mediators(inst, x_cell, product)
        str_counts, str_map = _mediators(inst, fx, product)
        lab = inst.cell_label
        unmatched = []
        for key, ms in src_map.items():
            for cone, m in ms:
                moved = lab(inst.vcomp(m, ui))
                moved_key = tuple(lab(inst.vcomp(c, ui)) for c in cone)
                if moved not in {lab(n) for _, n in str_map.get(moved_key, [])}:
                    unmatched.append(inst.describe(m))
        ok = sorted(src_counts) == sorted(str_counts) and all(c == 1 for c in src_counts + str_counts) \
            and not unmatched
        rep.details["tests"][str(X)] = {"source": _hist(src_counts), "strict": _hist(str_counts)}
        if not ok:
            rep.fail(test=str(X), source_counts=_hist(src_counts), strict_counts=_hist(str_counts),
                     unmatched=unmatched[:5])
    return rep


def _hist(counts):
    out: dict[str, int] = {}
    for c in counts:
        out[str(c)] = out.get(str(c), 0) + 1
    return dict(sorted(out.items()))


def _mediators(inst, x, w: HomWitness):
    """Mediator counts per cone from x, and the mediators grouped by the labels of their cone."""
    cands = inst.two_cells(x, w.carrier)
    if w.kind == "terminal":
        return [len(cands)], {(): [((), m) for m in cands]}
    pa, pb = w.projections
    a, b = inst.cell_cod(pa), inst.cell_cod(pb)
    lab = inst.cell_label
    by_cone: dict = {}
    for m in cands:
        cone = (inst.vcomp(pa, m), inst.vcomp(pb, m))
        by_cone.setdefault(tuple(lab(c) for c in cone), []).append((cone, m))
    counts = []
    for f in inst.two_cells(x, a):
        for g in inst.two_cells(x, b):
            counts.append(len(by_cone.get((lab(f), lab(g)), [])))
    return counts, by_cone
