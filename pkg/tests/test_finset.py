import itertools

import pytest
from hypothesis import given, settings, strategies as st

from catsem import finset as fs

from catsem.errors import (
    CodomainMismatch,
    CompositionMismatch,
    DomainMismatch,
    NotAProductDomain,
    NotASubset,
    NotAnExponentialCodomain,
)
from catsem.finset import (
    EMPTY,
    FinSetMap,
    FinSetObj,
    all_maps,
    complement_negation,
    compose,
    coproduct,
    copair,
    curry,
    distribute,
    exponential,
    finset,
    identity,
    map_from_json,
    map_to_json,
    pair,
    product,
    product_map,
    set_from_json,
    set_to_json,
    uncurry,
)

SETS = [finset(f"S{n}", [f"e{i}" for i in range(n)]) for n in range(5)]
SMALL = SETS[:4]


@st.composite
def maps(draw, dom=None, cod=None, max_size=4):
    sets = SETS[: max_size + 1]
    dom = dom if dom is not None else draw(st.sampled_from(sets))
    cod = cod if cod is not None else draw(st.sampled_from(sets))
    if len(dom) and not len(cod):
        cod = SETS[1]
    table = draw(st.lists(st.sampled_from(cod.elements), min_size=len(dom), max_size=len(dom))) if len(cod) else []
    return FinSetMap(dom, cod, tuple(table))


def test_compose_two_step_lookup():
    x, ab, bits = finset("X", "x"), finset("AB", "ab"), finset("Bits", "01")
    f = FinSetMap(x, ab, ("a",))
    g = FinSetMap.from_dict(ab, bits, {"a": "1", "b": "0"})
    assert compose(g, f).table == ("1",)
    assert compose(identity(ab), f) == f


def test_compose_mismatch():
    f = FinSetMap(SETS[1], SETS[2], ("e0",))
    with pytest.raises(CompositionMismatch):
        compose(f, f)
    # same elements, different label: not the same object
    other = FinSetObj("T2", SETS[2].elements)
    with pytest.raises(CompositionMismatch):
        compose(identity(other), f)


def test_identity():
    assert identity(EMPTY).table == ()
    assert identity(finset("AB", "ab")).as_dict() == {"a": "a", "b": "b"}


@settings(max_examples=200)
@given(st.data())
def test_composition_laws(data):
    a, b, c, d = (data.draw(st.sampled_from(SETS)) for _ in range(4))
    if any(len(s) == 0 for s in (b, c, d)) and len(a):
        a = EMPTY
    f = data.draw(maps(a, b)) if len(b) or not len(a) else None
    if f is None:
        return
    g = data.draw(maps(b, c)) if len(c) or not len(b) else None
    h = data.draw(maps(c, d)) if len(d) or not len(c) else None
    if g is None or h is None:
        return
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(identity(b), f) == f == compose(f, identity(a))


def test_product_shapes():
    a, b = SETS[2], SETS[3]
    p, pa, pb = product(a, b)
    assert len(p) == 6
    assert p.elements[:3] == ("(e0,e0)", "(e0,e1)", "(e0,e2)")
    assert pa("(e1,e2)") == "e1" and pb("(e1,e2)") == "e2"
    p0, pa0, pb0 = product(a, EMPTY)
    assert len(p0) == 0 and pa0.table == () and pb0.table == ()
    p1, pa1, pb1 = product(finset("A", "a"), finset("B", "b"))
    assert p1.elements == ("(a,b)",)


def test_pair():
    x, a, b = finset("X", "x"), finset("A", ["a1", "a2"]), finset("B", ["b1", "b2"])
    f, g = FinSetMap(x, a, ("a1",)), FinSetMap(x, b, ("b2",))
    assert pair(f, g).table == ("(a1,b2)",)
    p, pa, pb = product(a, b)
    assert pair(pa, pb) == identity(p)
    with pytest.raises(DomainMismatch):
        pair(f, identity(b))


@pytest.mark.parametrize("x,a,b", list(itertools.product(SMALL, repeat=3)))
def test_product_mediator_unique_by_enumeration(x, a, b):
    p, pa, pb = product(a, b)
    candidates = list(all_maps(x, p))
    assert len(candidates) == len(p) ** len(x)
    for f in all_maps(x, a):
        for g in all_maps(x, b):
            hits = [m for m in candidates if compose(pa, m) == f and compose(pb, m) == g]
            assert hits == [pair(f, g)]


def test_coproduct_shapes():
    a, b = SETS[2], SETS[3]
    s, ia, ib = coproduct(a, b)
    assert len(s) == 5
    s0, _, ib0 = coproduct(EMPTY, b)
    assert len(s0) == len(b) and ib0.is_bijective()
    s1, ia1, ib1 = coproduct(finset("A", "a"), finset("B", "a"))
    assert s1.elements == ("inl:a", "inr:a")


def test_copair():
    a, b = SETS[2], SETS[1]
    s, ia, ib = coproduct(a, b)
    assert copair(ia, ib) == identity(s)
    x = finset("X", ["x0", "x1"])
    const = copair(FinSetMap(a, x, ("x0",) * 2), FinSetMap(b, x, ("x0",)))
    assert set(const.table) == {"x0"}
    with pytest.raises(CodomainMismatch):
        copair(ia, identity(b))


@pytest.mark.parametrize("a,b,x", list(itertools.product(SMALL, repeat=3)))
def test_coproduct_mediator_unique_by_enumeration(a, b, x):
    s, ia, ib = coproduct(a, b)
    candidates = list(all_maps(s, x))
    for f in all_maps(a, x):
        for g in all_maps(b, x):
            hits = [m for m in candidates if compose(m, ia) == f and compose(m, ib) == g]
            assert hits == [copair(f, g)]


def test_exponential_shapes():
    e, ev = exponential(SETS[2], SETS[3])
    assert len(e) == 9
    e0, _ = exponential(EMPTY, SETS[3])
    assert e0.elements == ("fn[]",)
    e1, _ = exponential(SETS[2], EMPTY)
    assert len(e1) == 0
    bits = finset("B", "01")
    e2, ev2 = exponential(bits, bits)
    assert e2.elements == ("fn[0↦0,1↦0]", "fn[0↦0,1↦1]", "fn[0↦1,1↦0]", "fn[0↦1,1↦1]")
    assert ev2("(fn[0↦1,1↦0],0)") == "1"


def _ev_equation(f, curried):
    x, a = curried.dom, f.dom.parts[2]
    _, ev = exponential(a, f.cod)
    return compose(ev, product_map(curried, identity(a)))


def test_curry_identity_example_by_enumeration():
    x, bits = finset("X", "x"), finset("B", "01")
    p, _, pb = product(x, bits)
    f = pb  # f(x, a) = a
    e, ev = exponential(bits, bits)
    solutions = [m for m in all_maps(x, e) if compose(ev, product_map(m, identity(bits))) == f]
    assert len(solutions) == 1
    assert curry(f) == solutions[0]
    assert curry(f).table == ("fn[0↦0,1↦1]",)


def test_curry_of_ev_is_identity():
    e, ev = exponential(SETS[2], SETS[2])
    assert curry(ev) == identity(e)
    assert uncurry(curry(ev)) == ev


@pytest.mark.parametrize("x,a,b", list(itertools.product(SMALL, repeat=3)))
def test_curry_round_trip_and_ev_equation(x, a, b):
    p, _, _ = product(x, a)
    e, ev = exponential(a, b)
    for f in all_maps(p, b):
        c = curry(f, x, a)
        assert compose(ev, product_map(c, identity(a))) == f
        assert uncurry(c) == f
    for g in all_maps(x, e):
        assert curry(uncurry(g), x, a) == g


def test_uncurry_constant_identity():
    b = SETS[3]
    e, _ = exponential(b, b)
    ident = "fn[" + ",".join(f"{y}↦{y}" for y in b) + "]"
    g = FinSetMap(SETS[2], e, (ident,) * 2)
    u = uncurry(g)
    assert all(u(f"({x},{y})") == y for x in SETS[2] for y in b)


def test_curry_recovers_factors_from_labels_only():
    x, a = finset("X", "xy"), finset("A", "01")
    p, _, pa = product(x, a)
    bare = FinSetObj(p.label, p.elements)
    assert bare.parts is None
    assert curry(FinSetMap(bare, a, pa.table)) == curry(pa)
    with pytest.raises(NotAProductDomain):
        curry(identity(finset("Z", "ab")))
    with pytest.raises(NotAnExponentialCodomain):
        uncurry(identity(finset("Z", "ab")))


def test_complement_negation():
    u = finset("U", "123")
    a = finset("A", "1")
    neg, eta = complement_negation(a, u)
    assert neg.elements == ("2", "3")
    assert eta.table == ("1",)
    assert complement_negation(u, u)[0].elements == ()
    assert complement_negation(EMPTY, u)[0].elements == u.elements
    back, _ = complement_negation(neg, u)
    assert back.elements == a.elements
    with pytest.raises(NotASubset):
        complement_negation(finset("B", "4"), u)


@pytest.mark.parametrize("a,b", list(itertools.product(SETS, repeat=2)))
def test_cardinalities(a, b):
    assert len(product(a, b)[0]) == len(a) * len(b)
    assert len(coproduct(a, b)[0]) == len(a) + len(b)
    assert len(exponential(a, b)[0]) == len(b) ** len(a)


def test_distribute_is_bijection():
    g, a, b = SETS[2], SETS[1], SETS[3]
    d = distribute(g, a, b)
    assert d.is_bijective()
    assert d("(e1,inr:e2)") == "inr:(e1,e2)"


def test_json_round_trip():
    a, b = finset("A", ["a1", "a2"]), finset("B", ["b1", "b2"])
    f = FinSetMap(a, b, ("b2", "b1"))
    assert set_from_json(set_to_json(a)) == a
    assert map_from_json(map_to_json(f), {"A": a, "B": b}) == f


def test_nested_function_labels_round_trip():
    inner, _ = fs.exponential(fs.ONE, fs.ONE)
    e, ev = fs.exponential(inner, fs.finset("B", "xy"))
    for h in e:
        table = fs.decode_fn(h)
        assert list(table) == list(inner.elements)
        assert all(ev(fs.pair_label(h, a)) == table[a] for a in inner)
    assert fs.exponential_factors(e) == (inner, fs.finset("B", "xy"))
