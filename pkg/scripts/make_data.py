"""Regenerate the sample input files under data/ from library constructions."""
import json
from pathlib import Path

from catsem import fincat as fc
from catsem import finset as fs

OUT = Path(__file__).resolve().parent.parent / "data"


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def sets(*objs):
    return [fs.set_to_json(a)["set"] for a in objs]


def main():
    OUT.mkdir(exist_ok=True)
    boolean = fc.boolean_poset()
    dump("bool.json", fc.category_to_json(boolean))
    broken = fc.category_to_json(boolean)
    broken["category"]["compose"]["0≤1|0≤0"] = "1≤1"
    dump("bad_category.json", broken)
    dump("finsets.json", {"name": "FinSet", "finsets": sets(fs.finset("0", ""), fs.finset("1", "*"),
                                                             fs.finset("2", "ab"))})

    s1, s2, s3 = fs.finset("S1", "a"), fs.finset("S2", "xy"), fs.finset("S3", "pqr")
    dump("monfinset.json", {"instance": "monoidal_finset", "sets": sets(s1, s2, s3)})
    dump("monfinset_faulty.json", {"instance": "monoidal_finset_faulty", "sets": sets(s1, s2, s3)})
    a, b = fs.finset("A", "01"), fs.finset("B", "b")
    p = fs.product(a, b)[0]
    dump("strictify_ab.json", {"instance": "monoidal_finset", "sets": sets(a, b, p)})

    two = fc.boolean_poset("Two")
    dump("fincat.json", {"instance": "fincat", "categories": [fc.category_to_json(two)["category"]]})
    top = fc.constant_functor(two, two, "1")
    ident = fc.identity_functor(two)
    cats = [fc.category_to_json(two)["category"]]
    dump("functor.json", {"categories": cats, "functor": {**fc.functor_to_json(top)["functor"],
                                                          "source": "Two", "target": "Two", "name": "top"}})
    eta = fc.NatTrans(ident, top, {"0": "0≤1", "1": "1≤1"}, "η")
    dump("nattrans.json", {
        "categories": cats,
        "functors": [{**fc.functor_to_json(F)["functor"], "source": "Two", "target": "Two"} for F in (ident, top)],
        "nattrans": {"name": "η", "source": ident.name, "target": top.name, "components": dict(eta.components)},
    })
    pc = fc.product_category(two, two)
    meet = {o: min(x, y) for o, (x, y) in pc.data["split_objects"].items()}
    mors = {m: f"{meet[pc.dom(m)]}≤{meet[pc.cod(m)]}" for m in pc.labels}
    dump("bifunctor.json", {"categories": cats, "bifunctor": {"name": "meet", "left": "Two", "right": "Two",
                                                              "target": "Two", "objects": meet, "morphisms": mors}})
    iso = fc.walking_iso()
    swap = fc.Functor(iso, iso, {"a": "b", "b": "a"}, {"id_a": "id_b", "id_b": "id_a", "i": "j", "j": "i"}, "u")
    dump("diagram.json", {"diagram": {
        "vertices": ["j0", "j1"], "categories": {"j0": fc.category_to_json(iso)["category"],
                                                 "j1": fc.category_to_json(iso)["category"]},
        "edges": [{"name": "u", "source": "j0", "target": "j1"}],
        "functors": {"u": {"objects": dict(swap.object_map), "morphisms": dict(swap.morphism_map)}},
    }})

    (OUT / "pentagon.sexp").write_text(
        "; the two ends of the pentagon, bound to registered sets\n"
        "(gen f • • S1) (gen g • • S2) (gen h • • S3) (gen k • • S2)\n"
        "(source (comp (comp (comp k h) g) f))\n"
        "(target (comp k (comp h (comp g f))))\n", encoding="utf-8")
    (OUT / "id.proof").write_text("theorem id : p -> p\nproof \\x. x\n", encoding="utf-8")
    (OUT / "case_study.proof").write_text(
        "# the four derivations of the currying and deduction case studies\n"
        "theorem id : p -> p\nproof \\x. x\n"
        "theorem swap : p & q -> q & p\nproof \\x. (snd x, fst x)\n"
        "theorem const : p -> q -> p\nproof \\x. \\y. x\n"
        "theorem exfalso : bot -> p\nproof \\x. abort x\n"
        "theorem dni : p -> ~~p\nproof \\x. \\k. k x\n", encoding="utf-8")
    dump("valuation.json", {"p": {"elements": ["0", "1"]}, "q": {"elements": ["a"]}})
    dump("dualizing.json", {"label": "D", "elements": ["d"]})


if __name__ == "__main__":
    main()
