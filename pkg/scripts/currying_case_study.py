"""Compile small proofs to finite-set maps and check the currying square at every lambda."""
import itertools

from catsem import finset as fs
from catsem.logic import (
    check_beta_soundness,
    closed_redexes,
    interpret_term,
    parse_formula,
    parse_term,
    show_formula,
    type_check,
    valuations,
    verify_all_lambdas,
)

PROOFS = [
    (r"\x. x", "p -> p"),
    (r"\x. (snd x, fst x)", "p & q -> q & p"),
    (r"\x. \y. x", "p -> q -> p"),
    (r"\x. abort x", "bot -> p"),
    (r"\x. case x of inl a => inr a | inr b => inl b", "p | q -> q | p"),
    (r"\x. \k. k x", "p -> ~~p"),
]


def main():
    v = {"p": fs.finset("p", "01"), "q": fs.finset("q", "a")}
    for term, phi in PROOFS:
        d = type_check([], parse_term(term), parse_formula(phi))
        m = interpret_term(d, v)
        lam = verify_all_lambdas(d, v)
        print(f"{term} : {show_formula(d.formula)}")
        print(f"  rules {' '.join(n.rule for n in d.nodes())}")
        print(f"  {len(m.cod)} candidate elements, chosen {m.table[0]}")
        print(f"  currying square at {lam.details['lambda_nodes']} lambda node(s): {lam.status}")
    redexes = list(closed_redexes(4))
    vals = valuations(max_size=2)
    bad = sum(not check_beta_soundness(r, phi, val).passed for (r, phi), val in itertools.product(redexes, vals))
    print(f"beta soundness: {len(redexes)} redexes x {len(vals)} valuations, {bad} failures")


if __name__ == "__main__":
    main()
