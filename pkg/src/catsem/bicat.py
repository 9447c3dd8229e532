"""Bicategory instances and exact checks of their coherence laws.

Conventions: ``hcomp1(g, f)`` is g∘f (f first). The associator
``assoc(f, g, h)`` is the 2-cell (h∘g)∘f ⇒ h∘(g∘f); ``lunit(f)`` is
id∘f ⇒ f and ``runit(f)`` is f∘id ⇒ f. ``hcomp2(β, α)`` is β⋆α : g∘f ⇒ g'∘f'
for α: f ⇒ f', β: g ⇒ g'.
"""
from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from typing import Any, Iterable, Mapping, Sequence

from . import finset as fs
from . import fincat as fc
from .config import DEFAULT_BUDGET, Budget
from .errors import CatsemError, CompositionMismatch, ShapeMismatch, SizeBudgetExceeded
from .report import Report


class BicatInstance(ABC):
    name = "bicat"
    strict = False

    @abstractmethod
    def objects(self) -> list: ...

    @abstractmethod
    def src(self, f): ...

    @abstractmethod
    def tgt(self, f): ...

    @abstractmethod
    def one_cells(self, a, b) -> list: ...

    @abstractmethod
    def id1(self, a): ...

    @abstractmethod
    def hcomp1(self, g, f): ...

    @abstractmethod
    def cell_dom(self, alpha): ...

    @abstractmethod
    def cell_cod(self, alpha): ...

    @abstractmethod
    def id2(self, f): ...

    @abstractmethod
    def vcomp(self, beta, alpha): ...

    @abstractmethod
    def hcomp2(self, beta, alpha): ...

    @abstractmethod
    def assoc(self, f, g, h): ...

    @abstractmethod
    def assoc_inv(self, f, g, h): ...

    @abstractmethod
    def lunit(self, f): ...

    @abstractmethod
    def lunit_inv(self, f): ...

    @abstractmethod
    def runit(self, f): ...

    @abstractmethod
    def runit_inv(self, f): ...

    @abstractmethod
    def two_cells(self, f, g) -> list: ...

    @abstractmethod
    def cell_label(self, alpha) -> str: ...

    @abstractmethod
    def one_cell_label(self, f) -> str: ...

    def describe(self, alpha) -> Any:
        return self.cell_label(alpha)

    def eq2(self, alpha, beta) -> bool:
        return alpha == beta

    def all_one_cells(self) -> list:
        return [f for a in self.objects() for b in self.objects() for f in self.one_cells(a, b)]

    def hom_category(self, a, b) -> fc.FinCategory:
        """Hom-category on the registered 1-cells a → b, morphisms all 2-cells."""
        cells = self.one_cells(a, b)
        objs = [self.one_cell_label(f) for f in cells]
        by_label, morphisms = {}, []
        for f in cells:
            for g in cells:
                for alpha in self.two_cells(f, g):
                    lab = self.cell_label(alpha)
                    by_label[lab] = alpha
                    morphisms.append((lab, self.one_cell_label(f), self.one_cell_label(g)))
        ids = {self.one_cell_label(f): self.cell_label(self.id2(f)) for f in cells}
        return fc.from_composition(objs, morphisms, ids,
                                   lambda g, f: self.cell_label(self.vcomp(by_label[g], by_label[f])),
                                   f"Hom({a},{b})", {"cells": by_label})


# ---------------------------------------------------------------- monoidal FinSet

UNIT = fs.FinSetObj("I", ("*",))


class MonoidalFinSetInstance(BicatInstance):
    """One object •; 1-cells finite sets under ×, 2-cells all functions."""

    name = "monoidal_finset"
    OBJ = "•"

    def __init__(self, sets: Sequence[fs.FinSetObj], budget: Budget = DEFAULT_BUDGET):
        self.sets = list(sets)
        self.budget = budget

    def objects(self):
        return [self.OBJ]

    def src(self, f):
        return self.OBJ

    def tgt(self, f):
        return self.OBJ

    def one_cells(self, a, b):
        return list(self.sets)

    def id1(self, a):
        return UNIT

    def hcomp1(self, g, f):
        return fs.product(g, f)[0]

    def cell_dom(self, alpha):
        return alpha.dom

    def cell_cod(self, alpha):
        return alpha.cod

    def id2(self, f):
        return fs.identity(f)

    def vcomp(self, beta, alpha):
        try:
            return fs.compose(beta, alpha)
        except CompositionMismatch as exc:
            raise ShapeMismatch(str(exc)) from None

    def hcomp2(self, beta, alpha):
        return fs.product_map(beta, alpha)

    def assoc(self, f, g, h):
        dom = self.hcomp1(self.hcomp1(h, g), f)
        cod = self.hcomp1(h, self.hcomp1(g, f))
        # ((c,b),a) and (c,(b,a)) enumerate in the same c-b-a order
        table = tuple(fs.pair_label(c, fs.pair_label(b, a)) for c in h for b in g for a in f)
        return fs.FinSetMap(dom, cod, table)

    def assoc_inv(self, f, g, h):
        return self.assoc(f, g, h).inverse()

    def lunit(self, f):
        return fs.FinSetMap(self.hcomp1(UNIT, f), f, f.elements)

    def lunit_inv(self, f):
        return self.lunit(f).inverse()

    def runit(self, f):
        return fs.FinSetMap(self.hcomp1(f, UNIT), f, f.elements)

    def runit_inv(self, f):
        return self.runit(f).inverse()

    def two_cells(self, f, g):
        n = fs.count_maps(f, g)
        if n > self.budget.max_two_cells:
            raise SizeBudgetExceeded(f"{n} maps {f.label}→{g.label} exceed budget {self.budget.max_two_cells}")
        return list(fs.all_maps(f, g))

    def cell_label(self, alpha):
        return fc.finset_map_label(alpha)

    def one_cell_label(self, f):
        return f.label

    def describe(self, alpha):
        return {"dom": alpha.dom.label, "cod": alpha.cod.label, "table": list(alpha.table)}


class FaultyMonoidalFinSet(MonoidalFinSetInstance):
    """Associator precomposed with a transposition whenever its domain has ≥ 2 elements."""

    name = "monoidal_finset_faulty"

    def assoc(self, f, g, h):
        good = super().assoc(f, g, h)
        if len(good.dom) < 2:
            return good
        t = list(good.table)
        t[0], t[1] = t[1], t[0]
        return fs.FinSetMap(good.dom, good.cod, tuple(t))


# ---------------------------------------------------------------- Cat (strict)

class FinCatInstance(BicatInstance):
    """Objects are finite categories, 1-cells functors, 2-cells natural transformations."""

    name = "fincat"
    strict = True

    def __init__(self, categories: Mapping[str, fc.FinCategory], functors: Sequence[fc.Functor] | None = None,
                 budget: Budget = DEFAULT_BUDGET):
        self.categories = dict(categories)
        self._names = {id(c): n for n, c in self.categories.items()}
        self.budget = budget
        self._cells: dict[tuple[str, str], list[fc.Functor]] = {}
        if functors is not None:
            for F in functors:
                key = (self.name_of(F.source), self.name_of(F.target))
                self._cells.setdefault(key, []).append(F)
            for a in self.categories:
                self._cells.setdefault((a, a), [])
        self._registered = functors is not None

    def name_of(self, c: fc.FinCategory) -> str:
        if id(c) in self._names:
            return self._names[id(c)]
        for n, d in self.categories.items():
            if d == c:
                return n
        raise CatsemError("category not registered")

    def objects(self):
        return list(self.categories)

    def src(self, f):
        return self.name_of(f.source)

    def tgt(self, f):
        return self.name_of(f.target)

    def one_cells(self, a, b):
        if (a, b) not in self._cells:
            if self._registered:
                return []
            self._cells[(a, b)] = fc.enumerate_functors(self.categories[a], self.categories[b], self.budget)
        return self._cells[(a, b)]

    def id1(self, a):
        return fc.identity_functor(self.categories[a])

    def hcomp1(self, g, f):
        try:
            return fc.compose_functors(g, f)
        except CatsemError as exc:
            raise ShapeMismatch(str(exc)) from None

    def cell_dom(self, alpha):
        return alpha.source

    def cell_cod(self, alpha):
        return alpha.target

    def id2(self, f):
        return fc.identity_nat(f)

    def vcomp(self, beta, alpha):
        try:
            return fc.vcompose_nat(beta, alpha)
        except CatsemError as exc:
            raise ShapeMismatch(str(exc)) from None

    def hcomp2(self, beta, alpha):
        return fc.hcompose_nat(beta, alpha)

    def assoc(self, f, g, h):
        return self.id2(self.hcomp1(h, self.hcomp1(g, f)))

    assoc_inv = assoc

    def lunit(self, f):
        return self.id2(f)

    lunit_inv = runit = runit_inv = lunit

    def two_cells(self, f, g):
        cells = fc.enumerate_nattrans(f, g)
        if len(cells) > self.budget.max_two_cells:
            raise SizeBudgetExceeded("too many natural transformations")
        return cells

    def cell_label(self, alpha):
        comps = ",".join(f"{a}:{m}" for a, m in alpha.components.items())
        return f"{self.one_cell_label(alpha.source)}⇒{self.one_cell_label(alpha.target)}[{comps}]"

    def one_cell_label(self, f):
        om = ",".join(f"{a}↦{b}" for a, b in f.object_map.items())
        mm = ",".join(f"{a}↦{b}" for a, b in f.morphism_map.items())
        return f"{self.src(f)}→{self.tgt(f)}{{{om}|{mm}}}"

    def describe(self, alpha):
        return {"source": self.one_cell_label(alpha.source), "target": self.one_cell_label(alpha.target),
                "components": dict(alpha.components)}

    def is_identity_cell(self, alpha) -> bool:
        return alpha.source == alpha.target and self.eq2(alpha, self.id2(alpha.source))


# ---------------------------------------------------------------- checks

def _require(cond, msg):
    if not cond:
        raise ShapeMismatch(msg)


def _compare(rep: Report, inst: BicatInstance, lhs, rhs, context):
    """Record a failure; ``context`` is called only then, to keep passing checks cheap."""
    if not inst.eq2(lhs, rhs):
        rep.fail(lhs=inst.describe(lhs), rhs=inst.describe(rhs), **context())


def _lab(inst, *cells):
    return [inst.one_cell_label(c) for c in cells]


def check_associator_naturality(inst: BicatInstance, alpha, beta, gamma) -> Report:
    """a_{f',g',h'} ∘ ((γ⋆β)⋆α) = (γ⋆(β⋆α)) ∘ a_{f,g,h}."""
    f, f2 = inst.cell_dom(alpha), inst.cell_cod(alpha)
    g, g2 = inst.cell_dom(beta), inst.cell_cod(beta)
    h, h2 = inst.cell_dom(gamma), inst.cell_cod(gamma)
    _require(inst.tgt(f) == inst.src(g) and inst.tgt(g) == inst.src(h), "2-cells not horizontally composable")
    rep = Report("associator_naturality")
    lhs = inst.vcomp(inst.assoc(f2, g2, h2), inst.hcomp2(inst.hcomp2(gamma, beta), alpha))
    rhs = inst.vcomp(inst.hcomp2(gamma, inst.hcomp2(beta, alpha)), inst.assoc(f, g, h))
    _compare(rep, inst, lhs, rhs, lambda: {"cells": [inst.cell_label(x) for x in (alpha, beta, gamma)]})
    return rep


def pentagon_routes(inst: BicatInstance, f, g, h, k):
    """The two composites ((k∘h)∘g)∘f ⇒ k∘(h∘(g∘f))."""
    two = inst.vcomp(inst.assoc(inst.hcomp1(g, f), h, k), inst.assoc(f, g, inst.hcomp1(k, h)))
    three = inst.vcomp(
        inst.hcomp2(inst.id2(k), inst.assoc(f, g, h)),
        inst.vcomp(inst.assoc(f, inst.hcomp1(h, g), k), inst.hcomp2(inst.assoc(g, h, k), inst.id2(f))),
    )
    return two, three


def check_pentagon(inst: BicatInstance, f, g, h, k) -> Report:
    _require(inst.tgt(f) == inst.src(g) and inst.tgt(g) == inst.src(h) and inst.tgt(h) == inst.src(k),
             "1-cells not composable")
    rep = Report("pentagon")
    two, three = pentagon_routes(inst, f, g, h, k)
    _compare(rep, inst, two, three, lambda: {"one_cells": _lab(inst, f, g, h, k)})
    return rep


def check_triangle(inst: BicatInstance, f, g) -> Report:
    """(id_g ⋆ l_f) ∘ a_{f,id,g} = r_g ⋆ id_f."""
    _require(inst.tgt(f) == inst.src(g), "1-cells not composable")
    rep = Report("triangle")
    i = inst.id1(inst.tgt(f))
    lhs = inst.vcomp(inst.hcomp2(inst.id2(g), inst.lunit(f)), inst.assoc(f, i, g))
    rhs = inst.hcomp2(inst.runit(g), inst.id2(f))
    _compare(rep, inst, lhs, rhs, lambda: {"one_cells": _lab(inst, f, g)})
    return rep


def check_interchange(inst: BicatInstance, alpha, beta, gamma, delta) -> Report:
    """(β∘α) ⋆ (δ∘γ) = (β⋆δ) ∘ (α⋆γ) with α, β on the outer side."""
    _require(inst.cell_cod(alpha) == inst.cell_dom(beta), "β∘α undefined")
    _require(inst.cell_cod(gamma) == inst.cell_dom(delta), "δ∘γ undefined")
    _require(inst.src(inst.cell_dom(alpha)) == inst.tgt(inst.cell_dom(gamma)), "horizontal shapes incompatible")
    rep = Report("interchange")
    lhs = inst.hcomp2(inst.vcomp(beta, alpha), inst.vcomp(delta, gamma))
    rhs = inst.vcomp(inst.hcomp2(beta, delta), inst.hcomp2(alpha, gamma))
    _compare(rep, inst, lhs, rhs, lambda: {"cells": [inst.cell_label(x) for x in (alpha, beta, gamma, delta)]})
    return rep


def check_unitor_invertibility(inst: BicatInstance, f) -> Report:
    rep = Report("unitors")
    a, b = inst.src(f), inst.tgt(f)
    lf, lfi = inst.lunit(f), inst.lunit_inv(f)
    rf, rfi = inst.runit(f), inst.runit_inv(f)
    left_src = inst.hcomp1(inst.id1(b), f)
    right_src = inst.hcomp1(f, inst.id1(a))
    for name, u, ui, s in (("lunit", lf, lfi, left_src), ("runit", rf, rfi, right_src)):
        if not inst.eq2(inst.vcomp(u, ui), inst.id2(f)):
            rep.fail(unitor=name, side="u∘u⁻¹", one_cell=inst.one_cell_label(f))
        if not inst.eq2(inst.vcomp(ui, u), inst.id2(s)):
            rep.fail(unitor=name, side="u⁻¹∘u", one_cell=inst.one_cell_label(f))
    return rep


def check_identity_whiskering(inst: BicatInstance, f, g) -> Report:
    """id_g ⋆ id_f = id_{g∘f}."""
    rep = Report("identity_whiskering")
    _compare(rep, inst, inst.hcomp2(inst.id2(g), inst.id2(f)), inst.id2(inst.hcomp1(g, f)),
             lambda: {"one_cells": _lab(inst, f, g)})
    return rep


# ---------------------------------------------------------------- exhaustive drivers

def composable_chains(inst: BicatInstance, n: int) -> Iterable[tuple]:
    """All n-tuples (f1, ..., fn) of registered 1-cells with tgt(f_i) = src(f_{i+1})."""
    objs = inst.objects()
    for path in itertools.product(objs, repeat=n + 1):
        pools = [inst.one_cells(path[i], path[i + 1]) for i in range(n)]
        yield from itertools.product(*pools)


def _cells_from(inst, f, identity_only=False):
    if identity_only:
        return [(f, inst.id2(f))]
    return [(g, alpha) for g in inst.one_cells(inst.src(f), inst.tgt(f)) for alpha in inst.two_cells(f, g)]


def exhaustive(inst: BicatInstance, law: str, map_fn=map, max_witnesses: int = 20,
               identity_only: bool = False) -> Report:
    """Run ``law`` over every registered tuple; ``map_fn`` may be a parallel ordered map.

    Only the first ``max_witnesses`` counterexamples are kept; ``details['failures']``
    holds the full count. With ``identity_only`` the 2-cell quantifiers of
    naturality and interchange range over identity cells only, and
    ``details['scope']`` says so.
    """
    rep = Report(f"{law}_exhaustive")
    jobs = list(_jobs(inst, law))
    checks = failures = 0
    rep.details["scope"] = "identity_cells" if identity_only and law in ("naturality", "interchange") else "all"
    for sub in map_fn(_run_job, [(inst, law, job, identity_only) for job in jobs]):
        checks += sub.details.get("checks", 1)
        failures += len(sub.witnesses)
        if not sub.passed:
            room = max_witnesses - len(rep.witnesses)
            sub.witnesses = sub.witnesses[:max(room, 0)]
            rep.absorb(sub)
    rep.details.update(cases=len(jobs), checks=checks, failures=failures)
    return rep


def _jobs(inst, law):
    if law == "pentagon":
        yield from composable_chains(inst, 4)
    elif law == "triangle" or law == "whiskering":
        yield from composable_chains(inst, 2)
    elif law == "unitors":
        yield from ((f,) for f in inst.all_one_cells())
    elif law == "naturality":
        for f, g, h in composable_chains(inst, 3):
            yield (f, g, h)
    elif law == "interchange":
        for inner, outer in composable_chains(inst, 2):
            yield (inner, outer)
    else:
        raise CatsemError(f"unknown coherence law {law!r}")


def _run_job(args) -> Report:
    inst, law, job, ident = args
    if law == "pentagon":
        return check_pentagon(inst, *job)
    if law == "triangle":
        return check_triangle(inst, *job)
    if law == "whiskering":
        return check_identity_whiskering(inst, *job)
    if law == "unitors":
        return check_unitor_invertibility(inst, *job)
    if law == "naturality":
        f, g, h = job
        rep, n = Report("associator_naturality"), 0
        for _, a in _cells_from(inst, f, ident):
            for _, b in _cells_from(inst, g, ident):
                for _, c in _cells_from(inst, h, ident):
                    rep.absorb(check_associator_naturality(inst, a, b, c))
                    n += 1
        rep.details["checks"] = n
        return rep
    if law == "interchange":
        inner, outer = job
        rep = Report("interchange")
        outer_pairs = [(a, b) for _, a in _cells_from(inst, outer, ident)
                       for _, b in _cells_from(inst, inst.cell_cod(a), ident)]
        inner_pairs = [(c, d) for _, c in _cells_from(inst, inner, ident)
                       for _, d in _cells_from(inst, inst.cell_cod(c), ident)]
        for a, b in outer_pairs:
            for c, d in inner_pairs:
                rep.absorb(check_interchange(inst, a, b, c, d))
        rep.details["checks"] = len(outer_pairs) * len(inner_pairs)
        return rep
    raise CatsemError(law)


LAWS = ("pentagon", "triangle", "naturality", "unitors", "interchange")


def coherence_suite(inst: BicatInstance, laws: Sequence[str] = LAWS, map_fn=map) -> Report:
    rep = Report("coherence_suite", details={"instance": inst.name})
    for law in laws:
        sub = exhaustive(inst, law, map_fn)
        rep.details[law] = {k: sub.details[k] for k in ("cases", "checks", "failures")}
        rep.details[law]["status"] = sub.status
        rep.absorb(sub)
    return rep


def strict_cells_are_identities(inst: FinCatInstance) -> Report:
    """Every associator and unitor component of a strict instance is an identity 2-cell."""
    rep = Report("strict_identities")
    for f, g, h in composable_chains(inst, 3):
        a = inst.assoc(f, g, h)
        if not inst.is_identity_cell(a) or inst.hcomp1(inst.hcomp1(h, g), f) != inst.hcomp1(h, inst.hcomp1(g, f)):
            rep.fail(cell="assoc", one_cells=_lab(inst, f, g, h))
    for f in inst.all_one_cells():
        for name in ("lunit", "runit"):
            if not inst.is_identity_cell(getattr(inst, name)(f)):
                rep.fail(cell=name, one_cells=_lab(inst, f))
    return rep


# ---------------------------------------------------------------- instance files

def instance_from_json(data: Mapping, budget: Budget = DEFAULT_BUDGET) -> BicatInstance:
    kind = data.get("instance")
    if kind in ("monoidal_finset", "monoidal_finset_faulty"):
        sets = [fs.set_from_json(s) for s in data["sets"]]
        cls = MonoidalFinSetInstance if kind == "monoidal_finset" else FaultyMonoidalFinSet
        return cls(sets, budget)
    if kind == "fincat":
        cats = {}
        for c in data["categories"]:
            cat = fc.category_from_json(c)
            cats[cat.name] = cat
        functors = None
        if "functors" in data:
            functors = [fc.functor_from_json(F, cats) for F in data["functors"]]
        return FinCatInstance(cats, functors, budget)
    raise CatsemError(f"unknown instance kind {kind!r}")

