"""Finite sets and total functions between them.

Elements are strings. Constructed objects use fixed encodings so that
equality of elements is equality of labels:

* product elements ``"(a,b)"``, A-major order
* coproduct elements ``"inl:a"`` then ``"inr:b"``
* exponential elements ``"fn[a1↦b1,a2↦b2]"``, entries in the order of the
  exponent's elements, ordered lexicographically by image sequence

Atomic element labels should avoid the characters ``( ) [ ] , ↦``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    CatsemError,
    CodomainMismatch,
    CompositionMismatch,
    DomainMismatch,
    NotAProductDomain,
    NotASubset,
    NotAnExponentialCodomain,
)

MAPSTO = "↦"
_OPEN = "([{"
_CLOSE = ")]}"


def split_top(text: str, sep: str) -> list[str]:
    """Split ``text`` on ``sep`` occurrences outside any brackets."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in _OPEN:
            depth += 1
        elif ch in _CLOSE:
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


def pair_label(a: str, b: str) -> str:
    return f"({a},{b})"


def unpair(label: str) -> tuple[str, str] | None:
    if not (label.startswith("(") and label.endswith(")")):
        return None
    parts = split_top(label[1:-1], ",")
    if len(parts) != 2:
        return None
    return parts[0], parts[1]


def fn_label(entries: Iterable[tuple[str, str]]) -> str:
    return "fn[" + ",".join(f"{a}{MAPSTO}{b}" for a, b in entries) + "]"


def decode_fn(label: str) -> dict[str, str]:
    if not (label.startswith("fn[") and label.endswith("]")):
        raise CatsemError(f"not a function element: {label!r}")
    body = label[3:-1]
    if not body:
        return {}
    out = {}
    for entry in split_top(body, ","):
        parts = split_top(entry, MAPSTO)
        if len(parts) != 2:
            raise CatsemError(f"malformed function entry {entry!r}")
        out[parts[0]] = parts[1]
    return out


@dataclass(frozen=True)
class FinSetObj:
    """A finite set with ordered, distinct element labels.

    ``parts`` records how a canonical construction built the object; it does
    not take part in equality.
    """

    label: str
    elements: tuple[str, ...]
    parts: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        if len(set(self.elements)) != len(self.elements):
            raise CatsemError(f"duplicate elements in set {self.label!r}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __str__(self) -> str:
        return f"{self.label}{{{', '.join(self.elements)}}}"


@dataclass(frozen=True)
class FinSetMap:
    """A total function, stored as the image of each domain element in order."""

    dom: FinSetObj
    cod: FinSetObj
    table: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.table, tuple):
            object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != len(self.dom):
            raise CatsemError(
                f"table has {len(self.table)} entries, domain {self.dom.label} has {len(self.dom)}"
            )
        cod_index = self.cod.index
        for y in self.table:
            if y not in cod_index:
                raise CatsemError(f"image {y!r} not in codomain {self.cod.label}")

    @classmethod
    def from_dict(cls, dom: FinSetObj, cod: FinSetObj, mapping: Mapping[str, str]) -> FinSetMap:
        missing = [x for x in dom if x not in mapping]
        if missing:
            raise CatsemError(f"map undefined on {missing}")
        return cls(dom, cod, tuple(mapping[x] for x in dom))

    @cached_property
    def lookup(self) -> dict[str, str]:
        return dict(zip(self.dom.elements, self.table))

    def __call__(self, x: str) -> str:
        return self.lookup[x]

    def as_dict(self) -> dict[str, str]:
        return dict(self.lookup)

    def is_bijective(self) -> bool:
        return len(self.dom) == len(self.cod) and len(set(self.table)) == len(self.table)

    def inverse(self) -> FinSetMap:
        if not self.is_bijective():
            raise CatsemError("map is not a bijection")
        back = {y: x for x, y in self.lookup.items()}
        return FinSetMap(self.cod, self.dom, tuple(back[y] for y in self.cod))

    def __repr__(self) -> str:
        body = ", ".join(f"{x}{MAPSTO}{y}" for x, y in zip(self.dom, self.table))
        return f"FinSetMap({self.dom.label}→{self.cod.label}: {body})"


EMPTY = FinSetObj("0", ())
ONE = FinSetObj("1", ("*",))


def finset(label: str, elements: Iterable) -> FinSetObj:
    return FinSetObj(label, tuple(str(x) for x in elements))


@lru_cache(maxsize=65536)
def compose(g: FinSetMap, f: FinSetMap) -> FinSetMap:
    """``g ∘ f``; requires cod(f) == dom(g) structurally."""
    if f.cod != g.dom:
        raise CompositionMismatch(f"cannot compose {g.dom.label}←…  with …→{f.cod.label}")
    gl = g.lookup
    return FinSetMap(f.dom, g.cod, tuple(gl[y] for y in f.table))


def identity(a: FinSetObj) -> FinSetMap:
    return FinSetMap(a, a, a.elements)


def all_maps(a: FinSetObj, b: FinSetObj) -> Iterator[FinSetMap]:
    """Every map a→b, ordered lexicographically by image sequence."""
    for images in itertools.product(b.elements, repeat=len(a)):
        yield FinSetMap(a, b, images)


def count_maps(a: FinSetObj, b: FinSetObj) -> int:
    return len(b) ** len(a)


@lru_cache(maxsize=4096)
def product(a: FinSetObj, b: FinSetObj) -> tuple[FinSetObj, FinSetMap, FinSetMap]:
    p = FinSetObj(
        f"({a.label}×{b.label})",
        tuple(pair_label(x, y) for x in a for y in b),
        parts=("product", a, b),
    )
    pi_a = FinSetMap(p, a, tuple(x for x in a for _ in b))
    pi_b = FinSetMap(p, b, tuple(y for _ in a for y in b))
    return p, pi_a, pi_b


def pair(f: FinSetMap, g: FinSetMap) -> FinSetMap:
    """The mediator ⟨f, g⟩: X → A×B."""
    if f.dom != g.dom:
        raise DomainMismatch(f"pair needs a common domain, got {f.dom.label} and {g.dom.label}")
    p, _, _ = product(f.cod, g.cod)
    return FinSetMap(f.dom, p, tuple(pair_label(x, y) for x, y in zip(f.table, g.table)))


@lru_cache(maxsize=65536)
def product_map(f: FinSetMap, g: FinSetMap) -> FinSetMap:
    """f × g : A×B → A'×B'."""
    src, _, _ = product(f.dom, g.dom)
    tgt, _, _ = product(f.cod, g.cod)
    return FinSetMap(src, tgt, tuple(pair_label(x, y) for x in f.table for y in g.table))


@lru_cache(maxsize=4096)
def coproduct(a: FinSetObj, b: FinSetObj) -> tuple[FinSetObj, FinSetMap, FinSetMap]:
    s = FinSetObj(
        f"({a.label}+{b.label})",
        tuple(f"inl:{x}" for x in a) + tuple(f"inr:{y}" for y in b),
        parts=("coproduct", a, b),
    )
    return s, FinSetMap(a, s, tuple(f"inl:{x}" for x in a)), FinSetMap(b, s, tuple(f"inr:{y}" for y in b))


def copair(f: FinSetMap, g: FinSetMap) -> FinSetMap:
    """The mediator [f, g]: A+B → X."""
    if f.cod != g.cod:
        raise CodomainMismatch(f"copair needs a common codomain, got {f.cod.label} and {g.cod.label}")
    s, _, _ = coproduct(f.dom, g.dom)
    return FinSetMap(s, f.cod, f.table + g.table)


@lru_cache(maxsize=4096)
def exponential(a: FinSetObj, b: FinSetObj) -> tuple[FinSetObj, FinSetMap]:
    """B^A with its evaluation map ev: B^A × A → B."""
    images = list(itertools.product(b.elements, repeat=len(a)))
    funcs = tuple(fn_label(zip(a.elements, img)) for img in images)
    e = FinSetObj(f"({b.label}^{a.label})", funcs, parts=("exponential", a, b))
    p, _, _ = product(e, a)
    ev = FinSetMap(p, b, tuple(y for img in images for y in img))
    return e, ev


def _parse_label(label: str, op: str) -> tuple[str, str] | None:
    if not (label.startswith("(") and label.endswith(")")):
        return None
    parts = split_top(label[1:-1], op)
    return (parts[0], parts[1]) if len(parts) == 2 else None


def product_factors(p: FinSetObj) -> tuple[FinSetObj, FinSetObj]:
    """Recover (X, A) with product(X, A) == p, or raise NotAProductDomain."""
    if p.parts is not None and p.parts[0] == "product":
        return p.parts[1], p.parts[2]
    labels = _parse_label(p.label, "×")
    pairs = [unpair(x) for x in p]
    if labels is None or any(q is None for q in pairs) or not pairs:
        raise NotAProductDomain(f"{p.label} is not a canonical product (or is empty)")
    left = tuple(dict.fromkeys(q[0] for q in pairs))
    right = tuple(dict.fromkeys(q[1] for q in pairs))
    x, a = FinSetObj(labels[0], left), FinSetObj(labels[1], right)
    if product(x, a)[0] != p:
        raise NotAProductDomain(f"{p.label} lacks the canonical tuple structure")
    return x, a


def exponential_factors(e: FinSetObj) -> tuple[FinSetObj, FinSetObj]:
    """Recover (A, B) with exponential(A, B) == e, or raise."""
    if e.parts is not None and e.parts[0] == "exponential":
        return e.parts[1], e.parts[2]
    labels = _parse_label(e.label, "^")
    if labels is None or not len(e):
        raise NotAnExponentialCodomain(f"{e.label} is not a canonical exponential (or is empty)")
    try:
        tables = [decode_fn(h) for h in e]
    except CatsemError as exc:
        raise NotAnExponentialCodomain(str(exc)) from None
    a_elems = tuple(tables[0])
    b_elems = tuple(dict.fromkeys(v for t in tables for v in t.values()))
    a, b = FinSetObj(labels[1], a_elems), FinSetObj(labels[0], b_elems)
    if exponential(a, b)[0] != e:
        raise NotAnExponentialCodomain(f"{e.label} is not a canonical exponential")
    return a, b


def curry(f: FinSetMap, x: FinSetObj | None = None, a: FinSetObj | None = None) -> FinSetMap:
    """Transpose f: X×A → B to X → B^A.

    The factors are recovered from dom(f); pass them explicitly when the
    product is empty and therefore cannot be decomposed.
    """
    if x is None or a is None:
        x, a = product_factors(f.dom)
    elif product(x, a)[0] != f.dom:
        raise NotAProductDomain(f"{f.dom.label} is not {x.label}×{a.label}")
    e, _ = exponential(a, f.cod)
    fl = f.lookup
    return FinSetMap(x, e, tuple(fn_label((y, fl[pair_label(xx, y)]) for y in a) for xx in x))


def uncurry(g: FinSetMap) -> FinSetMap:
    """Inverse of curry: g: X → B^A becomes X×A → B."""
    a, b = exponential_factors(g.cod)
    p, _, _ = product(g.dom, a)
    tables = [decode_fn(h) for h in g.table]
    return FinSetMap(p, b, tuple(t[y] for t in tables for y in a))


def complement_negation(a: FinSetObj, universe: FinSetObj) -> tuple[FinSetObj, FinSetMap]:
    """Set-theoretic complement U∖A together with the inclusion A ↪ U."""
    outside = [x for x in a if x not in universe]
    if outside:
        raise NotASubset(f"{outside} not in {universe.label}")
    neg = FinSetObj(f"¬{a.label}", tuple(x for x in universe if x not in a.index))
    return neg, FinSetMap(a, universe, a.elements)


def subset(universe: FinSetObj, elements: Iterable[str], label: str) -> FinSetObj:
    """Subset of ``universe`` in the universe's element order."""
    keep = set(elements)
    return FinSetObj(label, tuple(x for x in universe if x in keep))


def terminal_map(x: FinSetObj, one: FinSetObj = ONE) -> FinSetMap:
    return FinSetMap(x, one, (one.elements[0],) * len(x))


def initial_map(x: FinSetObj, zero: FinSetObj = EMPTY) -> FinSetMap:
    if len(zero):
        raise CatsemError(f"{zero.label} is not empty")
    return FinSetMap(zero, x, ())


def distribute(g: FinSetObj, a: FinSetObj, b: FinSetObj) -> FinSetMap:
    """The canonical iso G×(A+B) → G×A + G×B."""
    s, _, _ = coproduct(a, b)
    src, _, _ = product(g, s)
    ga, _, _ = product(g, a)
    gb, _, _ = product(g, b)
    tgt, _, _ = coproduct(ga, gb)
    table = []
    for x in g:
        for t in s:
            side, _, y = t.partition(":")
            table.append(f"{side}:{pair_label(x, y)}")
    return FinSetMap(src, tgt, tuple(table))


def set_to_json(a: FinSetObj) -> dict:
    return {"set": {"label": a.label, "elements": list(a.elements)}}


def map_to_json(f: FinSetMap) -> dict:
    return {"map": {"dom": f.dom.label, "cod": f.cod.label, "table": dict(sorted(f.lookup.items()))}}


def set_from_json(data: Mapping) -> FinSetObj:
    body = data.get("set", data)
    return FinSetObj(str(body["label"]), tuple(str(x) for x in body["elements"]))


def map_from_json(data: Mapping, sets: Mapping[str, FinSetObj]) -> FinSetMap:
    body = data.get("map", data)
    try:
        dom, cod = sets[body["dom"]], sets[body["cod"]]
    except KeyError as exc:
        raise CatsemError(f"unknown set {exc.args[0]!r}") from None
    return FinSetMap.from_dict(dom, cod, body["table"])


def sets_by_label(objs: Sequence[FinSetObj]) -> dict[str, FinSetObj]:
    return {a.label: a for a in objs}
