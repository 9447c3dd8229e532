"""The eight acceptance criteria, each at its stated scope and time limit.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import itertools
import json
import time
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

from conftest import ACCEPTANCE

from catsem import finset as fs
from catsem.bicat import (
    FaultyMonoidalFinSet,
    FinCatInstance,
    MonoidalFinSetInstance,
    coherence_suite,
    strict_cells_are_identities,
)
from catsem.cli import run
from catsem.coherence import Generator, coherence_sweep
from catsem.fincat import boolean_poset, poset
from catsem.logic import (
    check_beta_soundness,
    closed_redexes,
    interpret_term,
    parse_formula,
    parse_term,
    type_check,
    valuations,
    verify_currying_diagram,
)
from catsem.strictify import (
    HomWitness,
    Word,
    check_biequivalence,
    check_universal_preservation,
    expressions_within,
    strictify_instance,
)
from catsem.uprop import find_coproducts, find_exponential, find_negation, find_products

DATA = Path(__file__).resolve().parent.parent / "data"
SETS = [fs.finset(f"S{n}", [f"e{i}" for i in range(n)]) for n in range(5)]


@contextmanager
def criterion(n: int, title: str, limit: float | None = None):
    start = time.perf_counter()
    ACCEPTANCE[n] = f"[{n}] FAIL  {title}"
    yield
    elapsed = time.perf_counter() - start
    ok = limit is None or elapsed < limit
    budget = f" (limit {limit:.0f}s)" if limit else ""
    ACCEPTANCE[n] = f"[{n}] {'PASS' if ok else 'FAIL'}  {title}  {elapsed:.1f}s{budget}"
    print(ACCEPTANCE[n])
    assert ok, f"took {elapsed:.1f}s"


def test_1_finset_law_suite():
    with criterion(1, "FinSet laws, all objects of size <= 3", 60):
        small = SETS[:4]
        maps = {(a, b): list(fs.all_maps(a, b)) for a in small for b in small}
        for a, b, c, d in itertools.product(small, repeat=4):
            for f in maps[a, b]:
                assert fs.compose(fs.identity(b), f) == f == fs.compose(f, fs.identity(a))
                for g in maps[b, c]:
                    gf = fs.compose(g, f)
                    for h in maps[c, d]:
                        assert fs.compose(h, gf) == fs.compose(fs.compose(h, g), f)
        for x, a, b in itertools.product(small, repeat=3):
            p, pa, pb = fs.product(a, b)
            hits = Counter((fs.compose(pa, m), fs.compose(pb, m)) for m in fs.all_maps(x, p))
            assert all(hits[(f, g)] == 1 for f in maps[x, a] for g in maps[x, b])
            assert sum(hits.values()) == len(maps[x, a]) * len(maps[x, b])
            s, ia, ib = fs.coproduct(a, b)
            hits = Counter((fs.compose(m, ia), fs.compose(m, ib)) for m in fs.all_maps(s, x))
            assert all(hits[(f, g)] == 1 for f in maps[a, x] for g in maps[b, x])
            e, ev = fs.exponential(a, b)
            xa = fs.product(x, a)[0]
            hits = Counter(fs.compose(ev, fs.product_map(u, fs.identity(a))) for u in fs.all_maps(x, e))
            for f in fs.all_maps(xa, b):
                assert hits[f] == 1
                u = fs.curry(f, x, a)
                assert fs.uncurry(u) == f
                assert fs.compose(ev, fs.product_map(u, fs.identity(a))) == f
            for u in fs.all_maps(x, e):
                assert fs.curry(fs.uncurry(u), x, a) == u


def test_2_cardinalities():
    with criterion(2, "cardinality identities, sizes <= 4"):
        for a, b in itertools.product(SETS, repeat=2):
            assert len(fs.product(a, b)[0]) == len(a) * len(b)
            assert len(fs.coproduct(a, b)[0]) == len(a) + len(b)
            assert len(fs.exponential(a, b)[0]) == len(b) ** len(a)


def test_3_boolean_poset_oracle():
    with criterion(3, "Boolean poset: meet, join, Heyting implication, negation into 0"):
        bool_ = boolean_poset()
        le = lambda a, b: a <= b  # noqa: E731
        for a, b in itertools.product("01", repeat=2):
            assert [w.carrier for w in find_products(bool_, a, b)] == [min(a, b)]
            assert [w.carrier for w in find_coproducts(bool_, a, b)] == [max(a, b)]
            heyting = "1" if le(a, b) else b
            assert [w.carrier for w in find_exponential(bool_, a, b)] == [heyting]
        neg = {a: [w.carrier for w in find_negation(bool_, "0", a)] for a in "01"}
        assert neg == {"1": ["0"], "0": ["1"]}
        for a in "01":
            assert min(a, neg[a][0]) == "0" and max(a, neg[a][0]) == "1"


def test_4_coherence_suite():
    with criterion(4, "coherence suite on MonoidalFinSet (sizes 1-3) and FinCat", 300):
        mon = MonoidalFinSetInstance(SETS[1:4])
        rep = coherence_suite(mon)
        assert rep.passed, rep.witnesses[:3]
        for law in ("pentagon", "triangle", "naturality", "unitors", "interchange"):
            assert rep.details[law]["failures"] == 0 and rep.details[law]["cases"] > 0
        assert rep.details["pentagon"]["cases"] == 3 ** 4
        two = poset(["0", "1"], lambda a, b: a <= b, "Two")
        cat = FinCatInstance({"Two": two})
        assert strict_cells_are_identities(cat).passed
        assert coherence_suite(cat).passed


def test_5_multi_path_coherence():
    with criterion(5, "all rewrite paths agree, <= 4 generators, budget 5; fault detected"):
        env = {"f": SETS[1], "g": SETS[2], "h": fs.finset("T2", "uv"), "k": SETS[1]}
        gens = [Generator(x, "•", "•") for x in "fghk"]
        words = [tuple(gens[:n]) for n in range(1, 5)]
        mon = MonoidalFinSetInstance(list(env.values()))
        rep = coherence_sweep(mon, env, words, budget=5)
        assert rep.passed and rep.details["failures"] == 0
        assert rep.details["pairs"] == 1 + 1 + 2 ** 2 + 5 ** 2 and rep.details["paths"] > 10_000
        # a repeated generator and one inserted identity; paths multiply fast here, so budget 4
        mixed = [(gens[0], gens[0]), (gens[1], gens[0])]
        assert coherence_sweep(mon, env, mixed, budget=4, identities=1).passed
        bad = coherence_sweep(FaultyMonoidalFinSet(list(env.values())), env, words, budget=5)
        assert not bad.passed and bad.witnesses[0]["path_cell"] != bad.witnesses[0]["canonical_cell"]


def test_6_strictification():
    with criterion(6, "strictification at bound 4; product preservation, sizes <= 2"):
        a, b = fs.finset("A", "01"), fs.finset("B", "b")
        p, pa, pb = fs.product(a, b)
        inst = MonoidalFinSetInstance([a, b, p])
        strict, w = strictify_instance(inst, {"A": a, "B": b, "P": p}, 4)
        words = strict.strings
        for s, t, u in itertools.product(words, repeat=3):
            assert (s + t) + u == s + (t + u)
        assert all(strict.identity("•") + s == s == s + strict.identity("•") for s in words)
        rep = check_biequivalence(w)
        assert rep.passed, rep.witnesses[:2]
        assert rep.details["expressions"] == len(expressions_within(strict, 4))
        tests = expressions_within(strict, 2)
        products = [fs.product(x, y) for x, y in ((a, b), (b, a), (a, a), (b, b))]
        witnesses = [HomWitness("product", c, (l, r)) for c, l, r in products]
        witnesses.append(HomWitness("terminal", fs.finset("1", "*")))
        for hw in witnesses:
            pres = check_universal_preservation(w, hw, tests)
            assert pres.passed, (hw.carrier.label, pres.witnesses[:2])
            for counts in pres.details["tests"].values():
                assert counts["source"] == counts["strict"]


def test_7_logic_end_to_end():
    with criterion(7, "logic: four derivations, currying at every lambda, beta soundness depth <= 4", 60):
        v = {"p": fs.finset("p", "01"), "q": fs.finset("q", "a")}
        for term, phi in [(r"\x. x", "p -> p"), (r"\x. (snd x, fst x)", "p & q -> q & p"),
                          (r"\x. \y. x", "p -> q -> p"), (r"\x. abort x", "bot -> p")]:
            d = type_check([], parse_term(term), parse_formula(phi))
            interpret_term(d, v)
            lams = [n for n in d.nodes() if n.rule == "→I"]
            assert lams and all(verify_currying_diagram(n, v).passed for n in lams)
        redexes = list(closed_redexes(4))
        assert len(redexes) > 1000
        for (redex, phi), val in itertools.product(redexes, valuations(max_size=2)):
            rep = check_beta_soundness(redex, phi, val)
            assert rep.passed, rep.witnesses


def test_8_cli_determinism(tmp_path):
    with criterion(8, "CLI --json reports are byte-identical across runs"):
        commands = [
            ["check", "category", DATA / "bool.json"],
            ["check", "category", DATA / "bad_category.json"],
            ["check", "functor", DATA / "functor.json"],
            ["check", "nattrans", DATA / "nattrans.json"],
            ["check", "bifunctor", DATA / "bifunctor.json"],
            ["find", "terminal", DATA / "bool.json"],
            ["find", "product", DATA / "bool.json", "0", "1"],
            ["find", "coproduct", DATA / "bool.json", "0", "1"],
            ["find", "exponential", DATA / "finsets.json", "1", "2"],
            ["find", "negation", DATA / "bool.json", "1", "--dualizing", "0"],
            ["check", "bicat", "pentagon", "--instance", DATA / "monfinset.json", "--exhaustive"],
            ["check", "bicat", "triangle", "--instance", DATA / "monfinset_faulty.json", "--exhaustive"],
            ["check", "bicat", "naturality", "--instance", DATA / "fincat.json", "--exhaustive"],
            ["check", "bicat", "unitors", "--instance", DATA / "monfinset.json"],
            ["check", "bicat", "interchange", "--instance", DATA / "monfinset.json"],
            ["coherence", "paths", DATA / "pentagon.sexp", "--instance", DATA / "monfinset_faulty.json"],
            ["strictify", "--instance", DATA / "strictify_ab.json", "--generators", "A,B,(A×B)", "--bound", "3"],
            ["logic", "check", DATA / "case_study.proof", "--valuation", DATA / "valuation.json"],
            ["pseudolimit", DATA / "diagram.json", "--emit-table"],
            ["find", "product", DATA / "bool.json", "0", "1", "--budget-objects", "1"],
        ]
        for argv in commands:
            outs = []
            for _ in range(2):
                lines = []
                code = run(["--json", *map(str, argv)], out=lines.append)
                outs.append((code, "\n".join(lines).encode()))
            assert outs[0] == outs[1], argv
            json.loads(outs[0][1])
        for _ in range(2):
            run(["strictify", "--instance", str(DATA / "strictify_ab.json"), "--generators", "A,B",
                 "--bound", "3", "--out", str(tmp_path / f"run{_}")], out=lambda s: None)
        for name in ("report.json", "strings.json", "witness.json"):
            assert (tmp_path / "run0" / name).read_bytes() == (tmp_path / "run1" / name).read_bytes()
