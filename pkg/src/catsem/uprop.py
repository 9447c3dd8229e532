"""Exhaustive search for objects with a universal property inside a FinCategory.

Every returned witness carries a certificate: for each test object X, the
list of mediator counts observed (one per cone/cocone/map into the target),
all of which must equal 1.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

from .config import DEFAULT_BUDGET, Budget
from .errors import CatsemError, MissingProducts, NoTerminalForAdjunctionCheck, SizeBudgetExceeded
from .fincat import FinCategory

ChosenProducts = Mapping[tuple[str, str], "UniversalWitness"]


@dataclass
class UniversalWitness:
    kind: str
    carrier: str
    structure: dict[str, str]
    certificate: dict[str, list[int]] = field(default_factory=dict)
    factors: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    def is_certified(self) -> bool:
        return all(n == 1 for counts in self.certificate.values() for n in counts)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "carrier": self.carrier,
            "factors": list(self.factors),
            "structure": dict(self.structure),
            "certificate": {x: {"tests": len(c), "mediator_counts": sorted(set(c))}
                            for x, c in self.certificate.items()},
        }
        if self.extra:
            out["extra"] = self.extra
        return out


def _check_budget(c: FinCategory, budget: Budget):
    if len(c.objects) > budget.max_objects:
        raise SizeBudgetExceeded(f"{len(c.objects)} objects exceed budget {budget.max_objects}")
    if len(c.morphisms) > budget.max_morphisms:
        raise SizeBudgetExceeded(f"{len(c.morphisms)} morphisms exceed budget {budget.max_morphisms}")


def find_terminal(c: FinCategory, budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    _check_budget(c, budget)
    out = []
    for t in c.objects:
        cert = {x: [len(c.hom(x, t))] for x in c.objects}
        if all(v == [1] for v in cert.values()):
            out.append(UniversalWitness("terminal", t, {}, cert))
    return out


def find_initial(c: FinCategory, budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    _check_budget(c, budget)
    out = []
    for t in c.objects:
        cert = {x: [len(c.hom(t, x))] for x in c.objects}
        if all(v == [1] for v in cert.values()):
            out.append(UniversalWitness("initial", t, {}, cert))
    return out


def _product_certificate(c: FinCategory, pa: str, pb: str, a: str, b: str) -> dict[str, list[int]] | None:
    p = c.dom(pa)
    cert = {}
    for x in c.objects:
        hits = Counter((c.compose(pa, m), c.compose(pb, m)) for m in c.hom(x, p))
        counts = [hits.get((f, g), 0) for f in c.hom(x, a) for g in c.hom(x, b)]
        if any(n != 1 for n in counts):
            return None
        cert[x] = counts
    return cert


def find_products(c: FinCategory, a: str, b: str, budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    """All (P, π_A, π_B) through which every pair (f, g) factors exactly once."""
    _check_budget(c, budget)
    out = []
    for p in c.objects:
        for pa in c.hom(p, a):
            for pb in c.hom(p, b):
                cert = _product_certificate(c, pa, pb, a, b)
                if cert is not None:
                    out.append(UniversalWitness("product", p, {"pi_A": pa, "pi_B": pb}, cert, (a, b)))
    return out


def find_coproducts(c: FinCategory, a: str, b: str, budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    _check_budget(c, budget)
    out = []
    for s in c.objects:
        for ia in c.hom(a, s):
            for ib in c.hom(b, s):
                cert = {}
                for x in c.objects:
                    hits = Counter((c.compose(m, ia), c.compose(m, ib)) for m in c.hom(s, x))
                    counts = [hits.get((f, g), 0) for f in c.hom(a, x) for g in c.hom(b, x)]
                    if any(n != 1 for n in counts):
                        cert = None
                        break
                    cert[x] = counts
                if cert is not None:
                    out.append(UniversalWitness("coproduct", s, {"iota_A": ia, "iota_B": ib}, cert, (a, b)))
    return out


def choose_products(c: FinCategory, pairs, budget: Budget = DEFAULT_BUDGET,
                    given: ChosenProducts | None = None) -> dict[tuple[str, str], UniversalWitness]:
    """Pick the first product witness for every pair, or raise MissingProducts."""
    chosen = dict(given or {})
    for pair in pairs:
        if pair in chosen:
            continue
        found = find_products(c, *pair, budget=budget)
        if not found:
            raise MissingProducts(f"no product of {pair[0]} and {pair[1]}")
        chosen[pair] = found[0]
    return chosen


def times_id(c: FinCategory, u: str, a: str, products: ChosenProducts) -> str:
    """u × id_A : X×A → E×A for u: X → E, using the chosen products."""
    x, e = c.dom(u), c.cod(u)
    src, tgt = products[(x, a)], products[(e, a)]
    want = (c.compose(u, src.structure["pi_A"]), src.structure["pi_B"])
    for m in c.hom(src.carrier, tgt.carrier):
        if (c.compose(tgt.structure["pi_A"], m), c.compose(tgt.structure["pi_B"], m)) == want:
            return m
    raise MissingProducts(f"chosen product of {e} and {a} has no mediator")


def _exponential_witnesses(c, a, b, products, kind):
    out = []
    for e in c.objects:
        ea = products[(e, a)].carrier
        for ev in c.hom(ea, b):
            cert = {}
            for x in c.objects:
                xa = products[(x, a)].carrier
                hits = Counter(c.compose(ev, times_id(c, u, a, products)) for u in c.hom(x, e))
                counts = [hits.get(f, 0) for f in c.hom(xa, b)]
                if any(n != 1 for n in counts):
                    cert = None
                    break
                cert[x] = counts
            if cert is not None:
                out.append(UniversalWitness(kind, e, {"ev": ev}, cert, (a, b)))
    return out


def find_exponential(c: FinCategory, a: str, b: str, products: ChosenProducts | None = None,
                     budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    """All (E, ev: E×A → B) such that each f: X×A → B equals ev∘(u×id_A) for exactly one u."""
    _check_budget(c, budget)
    products = choose_products(c, [(x, a) for x in c.objects], budget, products)
    return _exponential_witnesses(c, a, b, products, "exponential")


def find_negation(c: FinCategory, d: str, a: str, eta: str | None = None,
                  products: ChosenProducts | None = None, budget: Budget = DEFAULT_BUDGET) -> list[UniversalWitness]:
    """Negations ¬A relative to the dualizing object D.

    A witness is (N, ν: N×A → D) such that every f: X×A → D factors as
    ν∘(u×id_A) for exactly one u: X → N. When a terminal object 1 exists,
    ``extra['adjunction']`` records whether η ↦ (transpose of η∘π_A) is a
    bijection Hom(A, D) ≅ Hom(1, N); ``extra['eta']`` names the global
    element of N corresponding to a supplied ``eta``.
    """
    _check_budget(c, budget)
    products = choose_products(c, [(x, a) for x in c.objects], budget, products)
    found = _exponential_witnesses(c, a, d, products, "negation")
    terminals = find_terminal(c, budget)
    for w in found:
        w.structure = {"nu": w.structure["ev"]}
        w.factors = (a, d)
        if not terminals:
            w.extra["adjunction"] = {"skipped": NoTerminalForAdjunctionCheck.__name__}
            continue
        one = terminals[0].carrier
        transpose = _transposer(c, a, d, one, w, products)
        etas = c.hom(a, d)
        images = [transpose(h) for h in etas]
        w.extra["adjunction"] = {
            "terminal": one,
            "hom_A_D": len(etas),
            "hom_1_N": len(c.hom(one, w.carrier)),
            "holds": len(set(images)) == len(etas) == len(c.hom(one, w.carrier)),
        }
        if eta is not None:
            if eta not in etas:
                raise CatsemError(f"{eta} is not a morphism {a} → {d}")
            w.extra["eta"] = {"eta": eta, "global_element": transpose(eta)}
    return found


def _transposer(c, a, d, one, w, products):
    """η: A → D ↦ the unique u: 1 → N with ν∘(u×id_A) = η∘π_A."""
    pa = products[(one, a)].structure["pi_B"]
    nu = w.structure["nu"]
    table = {c.compose(nu, times_id(c, u, a, products)): u for u in c.hom(one, w.carrier)}

    def transpose(h):
        return table.get(c.compose(h, pa))

    return transpose


# ---------------------------------------------------------------- comparison isos

def comparison(c: FinCategory, w1: UniversalWitness, w2: UniversalWitness,
               products: ChosenProducts | None = None) -> list[str]:
    """All structure-preserving maps w1.carrier → w2.carrier (should be exactly one iso)."""
    if w1.kind != w2.kind or w1.factors != w2.factors:
        raise CatsemError("witnesses describe different universal properties")
    p, q = w1.carrier, w2.carrier
    cands = c.hom(p, q)
    k = w1.kind
    if k in ("terminal", "initial"):
        return list(cands)
    if k == "product":
        return [m for m in cands
                if c.compose(w2.structure["pi_A"], m) == w1.structure["pi_A"]
                and c.compose(w2.structure["pi_B"], m) == w1.structure["pi_B"]]
    if k == "coproduct":
        return [m for m in cands
                if c.compose(m, w1.structure["iota_A"]) == w2.structure["iota_A"]
                and c.compose(m, w1.structure["iota_B"]) == w2.structure["iota_B"]]
    key = "ev" if k == "exponential" else "nu"
    a = w1.factors[0]
    products = choose_products(c, [(x, a) for x in c.objects], given=products)
    return [m for m in cands
            if c.compose(w2.structure[key], times_id(c, m, a, products)) == w1.structure[key]]
