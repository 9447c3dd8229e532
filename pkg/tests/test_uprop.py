import itertools

import pytest

from catsem import finset as fs
from catsem.config import Budget
from catsem.errors import MissingProducts, SizeBudgetExceeded
from catsem.fincat import boolean_poset, discrete, finset_as_category, finset_map_label, poset
from catsem.uprop import (
    comparison,
    find_coproducts,
    find_exponential,
    find_initial,
    find_negation,
    find_products,
    find_terminal,
)

BOOL = boolean_poset()
MEET = {("0", "0"): "0", ("0", "1"): "0", ("1", "0"): "0", ("1", "1"): "1"}
JOIN = {("0", "0"): "0", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "1"}
HEYTING = {("0", "0"): "1", ("0", "1"): "1", ("1", "0"): "0", ("1", "1"): "1"}

S0, S1, S2 = fs.EMPTY, fs.finset("S1", "a"), fs.finset("S2", "xy")


@pytest.fixture(scope="module")
def fin():
    return finset_as_category([S0, S1, S2])


def test_terminal():
    assert [w.carrier for w in find_terminal(BOOL)] == ["1"]
    assert find_terminal(discrete(["x", "y"])) == []
    assert [w.carrier for w in find_initial(BOOL)] == ["0"]


def test_terminal_in_finset(fin):
    assert [w.carrier for w in find_terminal(fin)] == ["S1"]
    assert [w.carrier for w in find_initial(fin)] == ["0"]


@pytest.mark.parametrize("a,b", list(itertools.product("01", repeat=2)))
def test_boolean_lattice_operations(a, b):
    prods = find_products(BOOL, a, b)
    assert [w.carrier for w in prods] == [MEET[(a, b)]]
    coprods = find_coproducts(BOOL, a, b)
    assert [w.carrier for w in coprods] == [JOIN[(a, b)]]
    exps = find_exponential(BOOL, a, b)
    assert [w.carrier for w in exps] == [HEYTING[(a, b)]]
    for w in prods + coprods + exps:
        assert w.is_certified()


def test_product_of_one_with_itself_has_identity_projections():
    (w,) = find_products(BOOL, "1", "1")
    assert w.structure == {"pi_A": "1≤1", "pi_B": "1≤1"}


def test_boolean_negation():
    # D = 0: ¬1 = 0 and ¬0 = 1, so a ∧ ¬a = 0 and a ∨ ¬a = 1
    neg = {a: [w.carrier for w in find_negation(BOOL, "0", a)] for a in "01"}
    assert neg == {"1": ["0"], "0": ["1"]}
    for a in "01":
        n = neg[a][0]
        assert MEET[(a, n)] == "0" and JOIN[(a, n)] == "1"
    (w,) = find_negation(BOOL, "0", "0")
    assert w.extra["adjunction"]["holds"]


def test_negation_of_dualizing_object_itself():
    # D terminal: η = id_D and D is among the candidates for ¬D
    (w,) = find_negation(BOOL, "1", "1", eta="1≤1")
    assert w.carrier == "1"
    assert w.extra["eta"]["global_element"] == "1≤1"


def test_no_products_in_discrete():
    d = discrete(["x", "y"])
    assert find_products(d, "x", "y") == []
    assert find_coproducts(d, "x", "y") == []
    with pytest.raises(MissingProducts):
        find_exponential(d, "x", "y")


def test_finset_product_matches_canonical(fin):
    for a, b in [(S1, S1), (S1, S2), (S0, S2), (S2, S1)]:
        found = find_products(fin, a.label, b.label)
        p, pa, pb = fs.product(a, b)
        # canonical product is isomorphic to one of the registered objects
        assert found and all(w.is_certified() for w in found)
        for w in found:
            assert len(fin.data["sets"][w.carrier]) == len(p)
        for w1, w2 in itertools.product(found, repeat=2):
            (m,) = comparison(fin, w1, w2)
            assert fin.is_iso(m)


def test_finset_canonical_product_found_exactly():
    p, pa, pb = fs.product(S1, S2)
    c = finset_as_category([S1, S2, p], Budget(max_morphisms=400))
    found = find_products(c, "S1", "S2", Budget(max_morphisms=400))
    structures = [w.structure for w in found]
    assert {"pi_A": finset_map_label(pa), "pi_B": finset_map_label(pb)} in structures


def test_finset_coproduct_matches_canonical(fin):
    for a, b in [(S0, S1), (S1, S0), (S0, S2), (S0, S0)]:
        s, ia, ib = fs.coproduct(a, b)
        found = find_coproducts(fin, a.label, b.label)
        assert found
        for w in found:
            assert len(fin.data["sets"][w.carrier]) == len(s)
    s, ia, ib = fs.coproduct(S1, S1)
    c = finset_as_category([S1, s])
    found = find_coproducts(c, "S1", "S1")
    assert {"iota_A": finset_map_label(ia), "iota_B": finset_map_label(ib)} in [w.structure for w in found]
    assert find_coproducts(fin, "S1", "S1")  # S2 ≅ S1+S1
    for w1, w2 in itertools.product(found, repeat=2):
        (m,) = comparison(c, w1, w2)
        assert c.is_iso(m)


def test_finset_exponential_matches_canonical(fin):
    # A of size ≤ 1 keeps every X×A inside {0, 1, 2}
    for a, b in [(S1, S2), (S1, S1), (S0, S2), (S0, S0), (S1, S0)]:
        e, ev = fs.exponential(a, b)
        found = find_exponential(fin, a.label, b.label)
        assert found
        for w in found:
            assert len(fin.data["sets"][w.carrier]) == len(e)
        for w1, w2 in itertools.product(found, repeat=2):
            (m,) = comparison(fin, w1, w2)
            assert fin.is_iso(m)


def test_exponential_into_terminal_is_terminal(fin):
    found = find_exponential(fin, "S1", "S1")
    assert [w.carrier for w in found] == ["S1"]
    assert [w.carrier for w in find_exponential(BOOL, "0", "1")] == ["1"]


def test_finset_negation_with_empty_dualizing(fin):
    # D = ∅: ¬A = ∅ for nonempty A, ¬∅ = singleton (matches ∅^A)
    assert [w.carrier for w in find_negation(fin, "0", "S1")] == ["0"]
    (w,) = find_negation(fin, "0", "0")
    assert w.carrier == "S1"
    assert w.extra["adjunction"]["holds"]
    assert len(fs.exponential(S0, S0)[0]) == 1 and len(fs.exponential(S1, S0)[0]) == 0


def test_negation_without_terminal_reports_skip():
    # V-shaped poset 0 ≤ a, 0 ≤ b: all meets exist but there is no top
    c = poset(["0", "a", "b"], lambda x, y: x == y or x == "0", "V")
    (w,) = find_negation(c, "0", "a")
    assert w.carrier == "b"
    assert w.extra["adjunction"] == {"skipped": "NoTerminalForAdjunctionCheck"}
    d = discrete(["x", "y"])
    with pytest.raises(MissingProducts):
        find_negation(d, "x", "x")


def test_uniqueness_of_witnesses_up_to_iso():
    c = poset(["0", "a", "b", "1"], lambda x, y: x == y or x == "0" or y == "1", "Diamond")
    for a, b in itertools.product(c.objects, repeat=2):
        for finder in (find_products, find_coproducts, find_exponential):
            ws = finder(c, a, b)
            assert len(ws) <= 1 or all(len(comparison(c, u, v)) == 1 for u in ws for v in ws)
    # in a poset, exponentials are Heyting implications: a ⇒ b = b, a ⇒ 0 = b
    assert [w.carrier for w in find_exponential(c, "a", "0")] == ["b"]
    assert [w.carrier for w in find_exponential(c, "a", "b")] == ["b"]


def test_budget_enforced():
    with pytest.raises(SizeBudgetExceeded):
        find_terminal(discrete([str(i) for i in range(7)]))
