"""Finite categories given by explicit tables, with functors, natural
transformations, and the integration constructions (disjoint union, product
category, bifunctors, pseudo-limits over free index categories).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import finset as fs
from .config import DEFAULT_BUDGET, Budget
from .errors import CatsemError, IncoherentCone, MalformedTable, SizeBudgetExceeded
from .report import Report


@dataclass(frozen=True)
class FinCategory:
    objects: tuple[str, ...]
    morphisms: tuple[tuple[str, str, str], ...]
    identities: Mapping[str, str]
    compose_table: Mapping[tuple[str, str], str]
    name: str = field(default="C", compare=False)
    data: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "morphisms", tuple(tuple(m) for m in self.morphisms))
        if len(set(self.objects)) != len(self.objects):
            raise MalformedTable("duplicate object labels")
        labels = [m[0] for m in self.morphisms]
        if len(set(labels)) != len(labels):
            raise MalformedTable("duplicate morphism labels")
        for m, (_, d, c) in zip(labels, self.morphisms):
            if d not in self.object_set or c not in self.object_set:
                raise MalformedTable(f"morphism {m} has unknown endpoint")
        for a in self.objects:
            i = self.identities.get(a)
            if i not in self.ends or self.ends[i] != (a, a):
                raise MalformedTable(f"identity of {a} missing or not an endomorphism")

    __hash__ = None

    @cached_property
    def object_set(self) -> frozenset:
        return frozenset(self.objects)

    @cached_property
    def ends(self) -> dict[str, tuple[str, str]]:
        return {m: (d, c) for m, d, c in self.morphisms}

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(m[0] for m in self.morphisms)

    @cached_property
    def _homs(self) -> dict[tuple[str, str], list[str]]:
        out: dict[tuple[str, str], list[str]] = {(a, b): [] for a in self.objects for b in self.objects}
        for m, d, c in self.morphisms:
            out[(d, c)].append(m)
        return out

    def dom(self, m: str) -> str:
        return self.ends[m][0]

    def cod(self, m: str) -> str:
        return self.ends[m][1]

    def hom(self, a: str, b: str) -> list[str]:
        return self._homs[(a, b)]

    def identity(self, a: str) -> str:
        return self.identities[a]

    def compose(self, g: str, f: str) -> str:
        try:
            return self.compose_table[(g, f)]
        except KeyError:
            raise MalformedTable(f"no composite for {g}∘{f}") from None

    def composable(self, g: str, f: str) -> bool:
        return self.cod(f) == self.dom(g)

    def inverse(self, f: str) -> str | None:
        d, c = self.ends[f]
        for g in self.hom(c, d):
            if self.compose(g, f) == self.identities[d] and self.compose(f, g) == self.identities[c]:
                return g
        return None

    def is_iso(self, f: str) -> bool:
        return self.inverse(f) is not None

    def isos(self, a: str, b: str) -> list[str]:
        return [f for f in self.hom(a, b) if self.is_iso(f)]

    def __len__(self) -> int:
        return len(self.morphisms)


def make_category(objects, morphisms, identities, compose_table, name="C", data=None) -> FinCategory:
    return FinCategory(tuple(objects), tuple(morphisms), dict(identities), dict(compose_table), name, data or {})


def from_composition(objects, morphisms, identities, compose_fn, name="C", data=None) -> FinCategory:
    """Build the composition table by calling ``compose_fn(g, f)`` on every composable pair."""
    ends = {m: (d, c) for m, d, c in morphisms}
    by_dom: dict[str, list[str]] = {a: [] for a in objects}
    for m, d, _ in morphisms:
        by_dom[d].append(m)
    table = {}
    for f, (_, c) in ends.items():
        for g in by_dom[c]:
            table[(g, f)] = compose_fn(g, f)
    return make_category(objects, morphisms, identities, table, name, data)


# ---------------------------------------------------------------- examples

def discrete(objects: Sequence[str], name="Disc") -> FinCategory:
    ids = {a: f"id_{a}" for a in objects}
    return from_composition(objects, [(ids[a], a, a) for a in objects], ids, lambda g, f: g, name)


def terminal_category(name="1") -> FinCategory:
    return discrete(["*"], name)


def empty_category(name="0") -> FinCategory:
    return make_category([], [], {}, {}, name)


def poset(elements: Sequence[str], leq, name="P") -> FinCategory:
    """Thin category with an arrow ``a≤b`` whenever ``leq(a, b)``."""
    arrows = [(f"{a}≤{b}", a, b) for a in elements for b in elements if leq(a, b)]
    ids = {a: f"{a}≤{a}" for a in elements}
    ends = {m: (d, c) for m, d, c in arrows}

    def comp(g, f):
        return f"{ends[f][0]}≤{ends[g][1]}"

    return from_composition(elements, arrows, ids, comp, name)


def boolean_poset(name="Bool") -> FinCategory:
    """The two-element Boolean algebra 0 ≤ 1 as a thin category."""
    return poset(["0", "1"], lambda a, b: a <= b, name)


def walking_iso(name="Iso") -> FinCategory:
    morphisms = [("id_a", "a", "a"), ("id_b", "b", "b"), ("i", "a", "b"), ("j", "b", "a")]
    table = {
        ("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b",
        ("i", "id_a"): "i", ("id_b", "i"): "i", ("j", "id_b"): "j", ("id_a", "j"): "j",
        ("j", "i"): "id_a", ("i", "j"): "id_b",
    }
    return make_category(["a", "b"], morphisms, {"a": "id_a", "b": "id_b"}, table, name)


def finset_map_label(f: fs.FinSetMap) -> str:
    return f"{f.dom.label}→{f.cod.label}:[{','.join(f.table)}]"


def finset_as_category(objects: Sequence[fs.FinSetObj], budget: Budget = DEFAULT_BUDGET, name="FinSet") -> FinCategory:
    """Full subcategory of finite sets on ``objects``; ``data['maps']`` maps labels to FinSetMaps."""
    labels = [a.label for a in objects]
    if len(set(labels)) != len(labels):
        raise CatsemError("finite sets must have distinct labels")
    total = sum(fs.count_maps(a, b) for a in objects for b in objects)
    if total > budget.max_morphisms:
        raise SizeBudgetExceeded(f"{total} morphisms exceed budget {budget.max_morphisms}")
    maps: dict[str, fs.FinSetMap] = {}
    morphisms = []
    for a in objects:
        for b in objects:
            for f in fs.all_maps(a, b):
                lab = finset_map_label(f)
                maps[lab] = f
                morphisms.append((lab, a.label, b.label))
    ids = {a.label: finset_map_label(fs.identity(a)) for a in objects}
    sets = {a.label: a for a in objects}

    def comp(g, f):
        return finset_map_label(fs.compose(maps[g], maps[f]))

    return from_composition(labels, morphisms, ids, comp, name, {"maps": maps, "sets": sets})


# ---------------------------------------------------------------- axioms

def _index_tables(c: FinCategory):
    idx = {m: i for i, m in enumerate(c.labels)}
    n = len(idx)
    obj = {a: i for i, a in enumerate(c.objects)}
    dom = np.array([obj[c.dom(m)] for m in c.labels], dtype=np.int64)
    cod = np.array([obj[c.cod(m)] for m in c.labels], dtype=np.int64)
    table = np.full((n, n), -1, dtype=np.int64)
    for (g, f), h in c.compose_table.items():
        if g not in idx or f not in idx:
            raise MalformedTable(f"composite entry {g}∘{f} names an unknown morphism")
        if h not in idx:
            raise MalformedTable(f"{g}∘{f} = {h} is not a morphism")
        table[idx[g], idx[f]] = idx[h]
    return idx, dom, cod, table


def check_category_axioms(c: FinCategory) -> Report:
    """Typing, identity, and associativity laws, vectorised over the table."""
    rep = Report("category_axioms", details={"objects": len(c.objects), "morphisms": len(c.morphisms)})
    if not c.morphisms:
        return rep
    idx, dom, cod, table = _index_tables(c)
    lab = c.labels
    composable = cod[None, :] == dom[:, None]  # [g, f]
    missing = np.argwhere(composable & (table < 0))
    if len(missing):
        g, f = missing[0]
        raise MalformedTable(f"no composite for composable pair {lab[g]}∘{lab[f]}")
    extra = np.argwhere(~composable & (table >= 0))
    if len(extra):
        g, f = extra[0]
        raise MalformedTable(f"composite given for non-composable pair {lab[g]}∘{lab[f]}")

    gs, fs_ = np.nonzero(composable)
    hs = table[gs, fs_]
    bad = np.nonzero((dom[hs] != dom[fs_]) | (cod[hs] != cod[gs]))[0]
    for k in bad[:10]:
        g, f, h = gs[k], fs_[k], hs[k]
        rep.fail(law="typing", g=lab[g], f=lab[f], composite=lab[h],
                 expected=[c.objects[dom[f]], c.objects[cod[g]]],
                 actual=[c.objects[dom[h]], c.objects[cod[h]]])
    if not rep.passed:
        return rep

    for m in lab:
        i = idx[m]
        left, right = table[idx[c.identity(c.cod(m))], i], table[i, idx[c.identity(c.dom(m))]]
        if left != i:
            rep.fail(law="left_identity", f=m, composite=lab[left])
        if right != i:
            rep.fail(law="right_identity", f=m, composite=lab[right])

    for h in range(len(lab)):
        g_idx = np.nonzero(composable[h])[0]
        if not len(g_idx):
            continue
        mask = composable[g_idx]  # [g, f]
        gf = np.where(mask, table[g_idx], 0)
        lhs = table[h][gf]
        hg = table[h, g_idx]
        rhs = table[hg[:, None], np.arange(len(lab))[None, :]]
        viol = np.argwhere(mask & (lhs != rhs))
        for gi, f in viol[:5]:
            g = g_idx[gi]
            rep.fail(law="associativity", h=lab[h], g=lab[g], f=lab[f],
                     lhs=lab[lhs[gi, f]], rhs=lab[rhs[gi, f]])
        if len(rep.witnesses) > 20:
            break
    return rep


# ---------------------------------------------------------------- functors

@dataclass(frozen=True)
class Functor:
    source: FinCategory
    target: FinCategory
    object_map: Mapping[str, str]
    morphism_map: Mapping[str, str]
    name: str = field(default="F", compare=False)

    __hash__ = None

    def __call__(self, x: str) -> str:
        """Apply to an object or a morphism label."""
        if x in self.object_map and x in self.source.object_set:
            return self.object_map[x]
        return self.morphism_map[x]

    def ob(self, a: str) -> str:
        return self.object_map[a]

    def mor(self, f: str) -> str:
        return self.morphism_map[f]


def identity_functor(c: FinCategory) -> Functor:
    return Functor(c, c, {a: a for a in c.objects}, {m: m for m in c.labels}, f"id_{c.name}")


def constant_functor(c: FinCategory, d: FinCategory, obj: str) -> Functor:
    i = d.identity(obj)
    return Functor(c, d, {a: obj for a in c.objects}, {m: i for m in c.labels}, f"const_{obj}")


def compose_functors(g: Functor, f: Functor) -> Functor:
    if f.target != g.source:
        raise CatsemError(f"cannot compose functors {g.name}∘{f.name}")
    return Functor(
        f.source, g.target,
        {a: g.object_map[b] for a, b in f.object_map.items()},
        {m: g.morphism_map[n] for m, n in f.morphism_map.items()},
        f"{g.name}∘{f.name}",
    )


def check_functor(F: Functor) -> Report:
    rep = Report("functor", details={"functor": F.name})
    s, t = F.source, F.target
    for a in s.objects:
        if F.object_map.get(a) not in t.object_set:
            raise CatsemError(f"object map undefined or invalid on {a}")
    for m in s.labels:
        if F.morphism_map.get(m) not in t.ends:
            raise CatsemError(f"morphism map undefined or invalid on {m}")
    for m in s.labels:
        n = F.mor(m)
        want = (F.ob(s.dom(m)), F.ob(s.cod(m)))
        if t.ends[n] != want:
            rep.fail(law="dom_cod", morphism=m, image=n, expected=list(want), actual=list(t.ends[n]))
    if not rep.passed:
        return rep
    for a in s.objects:
        if F.mor(s.identity(a)) != t.identity(F.ob(a)):
            rep.fail(law="identity", object=a, image=F.mor(s.identity(a)), expected=t.identity(F.ob(a)))
    for (g, f), h in s.compose_table.items():
        lhs, rhs = F.mor(h), t.compose(F.mor(g), F.mor(f))
        if lhs != rhs:
            rep.fail(law="composition", g=g, f=f, lhs=lhs, rhs=rhs)
    return rep


def enumerate_functors(c: FinCategory, d: FinCategory, budget: Budget | None = None) -> list[Functor]:
    """All functors c → d by backtracking over morphism images."""
    out = []
    morph = c.labels
    for obs in itertools.product(d.objects, repeat=len(c.objects)):
        om = dict(zip(c.objects, obs))
        choices = [d.hom(om[c.dom(m)], om[c.cod(m)]) for m in morph]
        forced = {c.identity(a): d.identity(om[a]) for a in c.objects}
        free = [i for i, m in enumerate(morph) if m not in forced]
        for pick in itertools.product(*(choices[i] for i in free)):
            mm = dict(forced)
            mm.update({morph[i]: p for i, p in zip(free, pick)})
            if all(mm[h] == d.compose(mm[g], mm[f]) for (g, f), h in c.compose_table.items()):
                out.append(Functor(c, d, om, mm, f"F{len(out)}"))
                if budget is not None and len(out) > budget.max_morphisms:
                    raise SizeBudgetExceeded("too many functors")
    return out


# ---------------------------------------------------------------- natural transformations

@dataclass(frozen=True)
class NatTrans:
    source: Functor
    target: Functor
    components: Mapping[str, str]
    name: str = field(default="η", compare=False)

    __hash__ = None

    def __getitem__(self, a: str) -> str:
        return self.components[a]


def identity_nat(F: Functor) -> NatTrans:
    return NatTrans(F, F, {a: F.target.identity(F.ob(a)) for a in F.source.objects}, f"id_{F.name}")


def vcompose_nat(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    if alpha.target != beta.source:
        raise CatsemError("natural transformations not vertically composable")
    t = alpha.source.target
    return NatTrans(alpha.source, beta.target,
                    {a: t.compose(beta[a], alpha[a]) for a in alpha.source.source.objects},
                    f"{beta.name}·{alpha.name}")


def hcompose_nat(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    """β ⋆ α : G∘F ⇒ G'∘F' with components β_{F'a} ∘ G(α_a)."""
    F, F2, G, G2 = alpha.source, alpha.target, beta.source, beta.target
    c = G.target
    comps = {a: c.compose(beta[F2.ob(a)], G.mor(alpha[a])) for a in F.source.objects}
    return NatTrans(compose_functors(G, F), compose_functors(G2, F2), comps, f"{beta.name}⋆{alpha.name}")


def check_nattrans(eta: NatTrans) -> Report:
    F, G = eta.source, eta.target
    rep = Report("nattrans", details={"nattrans": eta.name})
    if F.source != G.source or F.target != G.target:
        raise CatsemError("functors are not parallel")
    t = F.target
    for a in F.source.objects:
        comp = eta.components.get(a)
        if comp not in t.ends or t.ends[comp] != (F.ob(a), G.ob(a)):
            rep.fail(law="component_type", object=a, component=comp, expected=[F.ob(a), G.ob(a)])
    if not rep.passed:
        return rep
    s = F.source
    for m in s.labels:
        a, b = s.ends[m]
        lhs, rhs = t.compose(eta[b], F.mor(m)), t.compose(G.mor(m), eta[a])
        if lhs != rhs:
            rep.fail(law="naturality", morphism=m, lhs=lhs, rhs=rhs,
                     square={"top": F.mor(m), "right": eta[b], "left": eta[a], "bottom": G.mor(m)})
    return rep


def enumerate_nattrans(F: Functor, G: Functor, isos_only=False) -> list[NatTrans]:
    t, s = F.target, F.source
    pools = [t.isos(F.ob(a), G.ob(a)) if isos_only else t.hom(F.ob(a), G.ob(a)) for a in s.objects]
    out = []
    for pick in itertools.product(*pools):
        eta = NatTrans(F, G, dict(zip(s.objects, pick)), f"η{len(out)}")
        if check_nattrans(eta).passed:
            out.append(eta)
    return out


def is_nat_iso(eta: NatTrans) -> bool:
    t = eta.source.target
    return all(t.is_iso(m) for m in eta.components.values())


# ---------------------------------------------------------------- integration constructions

def disjoint_union(c: FinCategory, d: FinCategory, name=None) -> FinCategory:
    def tag(side, x):
        return f"{side}:{x}"

    objects = [tag("inl", a) for a in c.objects] + [tag("inr", a) for a in d.objects]
    morphisms = [(tag("inl", m), tag("inl", x), tag("inl", y)) for m, x, y in c.morphisms]
    morphisms += [(tag("inr", m), tag("inr", x), tag("inr", y)) for m, x, y in d.morphisms]
    ids = {tag("inl", a): tag("inl", i) for a, i in c.identities.items()}
    ids.update({tag("inr", a): tag("inr", i) for a, i in d.identities.items()})
    table = {(tag("inl", g), tag("inl", f)): tag("inl", h) for (g, f), h in c.compose_table.items()}
    table.update({(tag("inr", g), tag("inr", f)): tag("inr", h) for (g, f), h in d.compose_table.items()})
    return make_category(objects, morphisms, ids, table, name or f"{c.name}⊔{d.name}")


def _pair(a, b):
    return f"({a},{b})"


def product_category(c: FinCategory, d: FinCategory, name=None) -> FinCategory:
    objects = [_pair(a, b) for a in c.objects for b in d.objects]
    morphisms = [(_pair(f, g), _pair(fa, ga), _pair(fb, gb))
                 for f, fa, fb in c.morphisms for g, ga, gb in d.morphisms]
    ids = {_pair(a, b): _pair(c.identity(a), d.identity(b)) for a in c.objects for b in d.objects}
    table = {(_pair(g1, g2), _pair(f1, f2)): _pair(h1, h2)
             for (g1, f1), h1 in c.compose_table.items() for (g2, f2), h2 in d.compose_table.items()}
    data = {"factors": (c, d),
            "split_objects": {_pair(a, b): (a, b) for a in c.objects for b in d.objects},
            "split_morphisms": {_pair(f, g): (f, g) for f in c.labels for g in d.labels}}
    return make_category(objects, morphisms, ids, table, name or f"{c.name}×{d.name}", data)


def check_bifunctor(F: Functor) -> Report:
    """Identity and interchange-of-composites laws for F: C×D → E."""
    pc = F.source
    if "factors" not in pc.data:
        raise CatsemError("bifunctor source must come from product_category")
    c, d = pc.data["factors"]
    e = F.target
    rep = Report("bifunctor", details={"functor": F.name})
    for m in pc.labels:
        want = (F.ob(pc.dom(m)), F.ob(pc.cod(m)))
        if e.ends[F.mor(m)] != want:
            rep.fail(law="dom_cod", morphism=m, image=F.mor(m), expected=list(want))
    if not rep.passed:
        return rep
    for a in c.objects:
        for b in d.objects:
            img = F.mor(_pair(c.identity(a), d.identity(b)))
            want = e.identity(F.ob(_pair(a, b)))
            if img != want:
                rep.fail(law="identity", objects=[a, b], image=img, expected=want)
    for (f2, f1), f21 in c.compose_table.items():
        for (g2, g1), g21 in d.compose_table.items():
            lhs = F.mor(_pair(f21, g21))
            rhs = e.compose(F.mor(_pair(f2, g2)), F.mor(_pair(f1, g1)))
            if lhs != rhs:
                rep.fail(law="composition", first=[f1, g1], second=[f2, g2], lhs=lhs, rhs=rhs)
    return rep


# ---------------------------------------------------------------- pseudo-limits

@dataclass(frozen=True)
class Diagram:
    """A diagram over the free category on a finite graph.

    ``edges`` are ``(name, source_vertex, target_vertex)``; ``functors[name]``
    interprets each generating edge.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    categories: Mapping[str, FinCategory]
    functors: Mapping[str, Functor]

    __hash__ = None

    def validate(self):
        for u, j, k in self.edges:
            F = self.functors[u]
            if F.source != self.categories[j] or F.target != self.categories[k]:
                raise CatsemError(f"functor for edge {u} has wrong endpoints")

    def paths(self, max_length: int) -> list[tuple[str, ...]]:
        """Composable edge sequences (first edge first) of length 1..max_length."""
        out = [(u,) for u, _, _ in self.edges]
        frontier = list(out)
        tgt = {u: k for u, _, k in self.edges}
        src = {u: j for u, j, _ in self.edges}
        for _ in range(max_length - 1):
            frontier = [p + (u,) for p in frontier for u, j, _ in self.edges if j == tgt[p[-1]]]
            out += frontier
        return [p for p in out if all(tgt[a] == src[b] for a, b in zip(p, p[1:]))]


@dataclass(frozen=True)
class PseudoCone:
    objects: Mapping[str, str]
    thetas: Mapping[str, str]

    __hash__ = None

    def label(self) -> str:
        xs = ",".join(f"{j}={x}" for j, x in self.objects.items())
        ts = ",".join(f"{u}={t}" for u, t in self.thetas.items())
        return f"⟨{xs}|{ts}⟩"


def composite_theta(diagram: Diagram, cone: PseudoCone, path: Sequence[str]) -> str:
    """θ for a composite edge path: θ_v ∘ D(v)(θ_u) iterated."""
    ends = {u: (j, k) for u, j, k in diagram.edges}
    first = path[0]
    theta = cone.thetas[first]
    for u in path[1:]:
        j, k = ends[u]
        theta = diagram.categories[k].compose(cone.thetas[u], diagram.functors[u].mor(theta))
    return theta


def pseudo_limit(diagram: Diagram, budget: Budget = DEFAULT_BUDGET, coherence_length: int = 3) -> FinCategory:
    """Category of pseudo-cones over ``diagram``.

    ``data['cones']`` maps object labels to PseudoCone, ``data['families']``
    maps morphism labels to their component dicts.
    """
    diagram.validate()
    V, E = diagram.vertices, diagram.edges
    cats = diagram.categories
    cones: list[PseudoCone] = []
    for xs in itertools.product(*(cats[j].objects for j in V)):
        obj = dict(zip(V, xs))
        pools = [cats[k].isos(diagram.functors[u].ob(obj[j]), obj[k]) for u, j, k in E]
        for ts in itertools.product(*pools):
            cones.append(PseudoCone(obj, dict(zip((u for u, _, _ in E), ts))))
            if len(cones) > budget.max_morphisms:
                raise SizeBudgetExceeded("pseudo-limit has too many objects")
    paths = [p for p in diagram.paths(coherence_length) if len(p) > 1]
    for cone in cones:
        for p in paths:
            t = composite_theta(diagram, cone, p)
            k = dict((u, kk) for u, _, kk in E)[p[-1]]
            if not cats[k].is_iso(t):
                raise IncoherentCone("composite θ not invertible", {"cone": cone.label(), "path": list(p)})

    labels = {id(c): c.label() for c in cones}
    morphisms, families, ids = [], {}, {}
    for x in cones:
        for y in cones:
            pools = [cats[j].hom(x.objects[j], y.objects[j]) for j in V]
            for ms in itertools.product(*pools):
                fam = dict(zip(V, ms))
                ok = all(
                    cats[k].compose(y.thetas[u], diagram.functors[u].mor(fam[j]))
                    == cats[k].compose(fam[k], x.thetas[u])
                    for u, j, k in E
                )
                if not ok:
                    continue
                lab = f"[{','.join(ms)}]:{labels[id(x)]}→{labels[id(y)]}"
                morphisms.append((lab, labels[id(x)], labels[id(y)]))
                families[lab] = fam
                if x is y and all(fam[j] == cats[j].identity(x.objects[j]) for j in V):
                    ids[labels[id(x)]] = lab
                if len(morphisms) > budget.max_morphisms:
                    raise SizeBudgetExceeded("pseudo-limit has too many morphisms")
    ends = {m: (d, c) for m, d, c in morphisms}
    lookup = {}
    for lab, fam in families.items():
        d, c = ends[lab]
        lookup[(d, c, tuple(fam[j] for j in V))] = lab

    def comp(g, f):
        fam = tuple(cats[j].compose(families[g][j], families[f][j]) for j in V)
        return lookup[(ends[f][0], ends[g][1], fam)]

    by_label = {labels[id(c)]: c for c in cones}
    return from_composition([labels[id(c)] for c in cones], morphisms, ids, comp, "PsLim",
                            {"cones": by_label, "families": families, "diagram": diagram})


def projection(pl: FinCategory, j: str) -> Functor:
    diagram: Diagram = pl.data["diagram"]
    cones, fams = pl.data["cones"], pl.data["families"]
    return Functor(pl, diagram.categories[j], {a: c.objects[j] for a, c in cones.items()},
                   {m: fam[j] for m, fam in fams.items()}, f"π_{j}")


@dataclass(frozen=True)
class ConeOver:
    """A pseudo-cone from a test category: legs f_j and natural isos θ_u: D(u)∘f_j ⇒ f_k."""

    apex: FinCategory
    legs: Mapping[str, Functor]
    thetas: Mapping[str, NatTrans]

    __hash__ = None


def check_cone(diagram: Diagram, cone: ConeOver) -> Report:
    rep = Report("cone")
    for j, leg in cone.legs.items():
        rep.absorb(check_functor(leg), leg=j)
    for u, j, k in diagram.edges:
        theta = cone.thetas[u]
        want_src = compose_functors(diagram.functors[u], cone.legs[j])
        if theta.source != want_src or theta.target != cone.legs[k]:
            rep.fail(law="theta_shape", edge=u)
            continue
        rep.absorb(check_nattrans(theta), edge=u)
        for a, m in theta.components.items():
            if not diagram.categories[k].is_iso(m):
                rep.fail(law="theta_invertible", edge=u, object=a, component=m)
    return rep


def mediate_cone(pl: FinCategory, cone: ConeOver) -> Functor:
    """The functor X → pseudo_limit packaging each object's legs and θ components."""
    diagram: Diagram = pl.data["diagram"]
    rep = check_cone(diagram, cone)
    if not rep.passed:
        raise IncoherentCone("cone is not coherent", rep.witnesses[0])
    V = diagram.vertices
    x = cone.apex
    obj_label = {}
    for a in x.objects:
        pc = PseudoCone({j: cone.legs[j].ob(a) for j in V}, {u: cone.thetas[u][a] for u, _, _ in diagram.edges})
        lab = pc.label()
        if lab not in pl.object_set:
            raise IncoherentCone("cone object missing from pseudo-limit", {"object": a, "cone": lab})
        obj_label[a] = lab
    fams = pl.data["families"]
    index = {(pl.dom(m), pl.cod(m), tuple(fams[m][j] for j in V)): m for m in pl.labels}
    mor = {}
    for m, d, c in x.morphisms:
        key = (obj_label[d], obj_label[c], tuple(cone.legs[j].mor(m) for j in V))
        if key not in index:
            raise IncoherentCone("leg images do not commute with θ", {"morphism": m})
        mor[m] = index[key]
    return Functor(x, pl, obj_label, mor, "⟨cone⟩")


def verify_mediator(pl: FinCategory, mediator: Functor, cone: ConeOver) -> Report:
    rep = Report("mediator")
    rep.absorb(check_functor(mediator))
    for j, leg in cone.legs.items():
        if compose_functors(projection(pl, j), mediator) != leg:
            rep.fail(law="projection", vertex=j)
    return rep


def mediator_isos(m1: Functor, m2: Functor, rho1: Mapping[str, NatTrans] | None = None,
                  rho2: Mapping[str, NatTrans] | None = None) -> list[NatTrans]:
    """Natural isos σ: m1 ⇒ m2 compatible with the leg comparisons:
    rho2_j ∘ π_j(σ) = rho1_j for every vertex j (rho default to identities)."""
    pl = m1.target
    diagram: Diagram = pl.data["diagram"]
    out = []
    for sigma in enumerate_nattrans(m1, m2, isos_only=True):
        ok = True
        for j in diagram.vertices:
            cj = diagram.categories[j]
            pj = projection(pl, j)
            for a in m1.source.objects:
                s = pj.mor(sigma[a])
                r2 = rho2[j][a] if rho2 else cj.identity(cj.cod(s))
                r1 = rho1[j][a] if rho1 else cj.identity(cj.dom(s))
                if cj.compose(r2, s) != r1:
                    ok = False
        if ok:
            out.append(sigma)
    return out


# ---------------------------------------------------------------- JSON

def category_to_json(c: FinCategory) -> dict:
    return {"category": {
        "name": c.name,
        "objects": list(c.objects),
        "morphisms": [{"label": m, "dom": d, "cod": k} for m, d, k in c.morphisms],
        "identities": dict(c.identities),
        "compose": {f"{g}|{f}": h for (g, f), h in sorted(c.compose_table.items())},
    }}


def category_from_json(data: Mapping) -> FinCategory:
    body = data.get("category", data)
    morphisms = [(m["label"], m["dom"], m["cod"]) for m in body["morphisms"]]
    table = {}
    for key, h in body.get("compose", {}).items():
        g, sep, f = key.partition("|")
        if not sep:
            raise MalformedTable(f"compose key {key!r} must be 'g|f'")
        table[(g, f)] = h
    ids = dict(body["identities"])
    ends = {m: (d, k) for m, d, k in morphisms}
    # identity composites may be omitted in files
    for m, (d, k) in ends.items():
        table.setdefault((m, ids.get(d)), m)
        table.setdefault((ids.get(k), m), m)
    table = {key: v for key, v in table.items() if key[0] in ends and key[1] in ends}
    return make_category(body["objects"], morphisms, ids, table, body.get("name", "C"))


def functor_to_json(F: Functor) -> dict:
    return {"functor": {"name": F.name, "source": category_to_json(F.source)["category"],
                        "target": category_to_json(F.target)["category"],
                        "objects": dict(F.object_map), "morphisms": dict(F.morphism_map)}}


def functor_from_json(data: Mapping, categories: Mapping[str, FinCategory] | None = None) -> Functor:
    body = data.get("functor", data)

    def cat(x):
        if isinstance(x, str):
            return categories[x]
        return category_from_json(x)

    return Functor(cat(body["source"]), cat(body["target"]), dict(body["objects"]),
                   dict(body["morphisms"]), body.get("name", "F"))


def nattrans_from_json(data: Mapping, categories=None, functors=None) -> NatTrans:
    body = data.get("nattrans", data)

    def fun(x):
        if isinstance(x, str):
            return functors[x]
        return functor_from_json(x, categories)

    return NatTrans(fun(body["source"]), fun(body["target"]), dict(body["components"]), body.get("name", "η"))


def nattrans_to_json(eta: NatTrans) -> dict:
    return {"nattrans": {"name": eta.name, "source": functor_to_json(eta.source)["functor"],
                         "target": functor_to_json(eta.target)["functor"],
                         "components": dict(eta.components)}}


def diagram_from_json(data: Mapping) -> Diagram:
    body = data.get("diagram", data)
    cats = {j: category_from_json(c) for j, c in body["categories"].items()}
    edges = tuple((e["name"], e["source"], e["target"]) for e in body.get("edges", []))
    functors = {}
    for u, j, k in edges:
        spec = body["functors"][u]
        functors[u] = Functor(cats[j], cats[k], dict(spec["objects"]), dict(spec["morphisms"]), u)
    return Diagram(tuple(body["vertices"]), edges, cats, functors)
