"""Strictify MonFinSet on generators A, B, A×B and report the biequivalence checks."""
import argparse
import time

from catsem import finset as fs
from catsem.bicat import MonoidalFinSetInstance
from catsem.strictify import (
    HomWitness,
    check_biequivalence,
    check_quotient,
    check_universal_preservation,
    expressions_within,
    strictify_instance,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=4)
    args = ap.parse_args()
    a, b = fs.finset("A", "01"), fs.finset("B", "b")
    p, pa, pb = fs.product(a, b)
    start = time.perf_counter()
    strict, w = strictify_instance(MonoidalFinSetInstance([a, b, p]), {"A": a, "B": b, "P": p}, args.bound)
    print(f"{len(strict.strings)} strings up to length {args.bound}, fold={w.metadata['fold']}")
    rep = check_biequivalence(w)
    print(f"biequivalence: {rep.status}  expressions={rep.details['expressions']} "
          f"naturality squares={rep.details['naturality_squares']}")
    q = check_quotient(strict, min(args.bound, 3))
    print(f"quotient: {q.status}  pairs={q.details['pairs']} paths={q.details['paths']}")
    pres = check_universal_preservation(w, HomWitness("product", p, (pa, pb)), expressions_within(strict, 2))
    print(f"product preservation: {pres.status} over {len(pres.details['tests'])} test expressions")
    print(f"total {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
