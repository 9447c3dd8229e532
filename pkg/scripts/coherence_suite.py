"""Run every bicategory law exhaustively on the bundled instances and print a summary."""
import argparse
import multiprocessing
import time

from catsem import finset as fs
from catsem.bicat import FaultyMonoidalFinSet, FinCatInstance, MonoidalFinSetInstance, coherence_suite
from catsem.fincat import boolean_poset, walking_iso


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-size", type=int, default=3, help="register sets of sizes 1..N")
    ap.add_argument("--parallel", type=int, default=1)
    args = ap.parse_args()
    sets = [fs.finset(f"S{n}", [f"e{i}" for i in range(n)]) for n in range(1, args.max_size + 1)]
    instances = [
        MonoidalFinSetInstance(sets),
        FinCatInstance({"Two": boolean_poset("Two"), "Iso": walking_iso()}),
        FaultyMonoidalFinSet(sets),
    ]
    pool = multiprocessing.Pool(args.parallel) if args.parallel > 1 else None
    map_fn = (lambda f, xs: pool.imap(f, xs, chunksize=16)) if pool else map
    for inst in instances:
        start = time.perf_counter()
        rep = coherence_suite(inst, map_fn=map_fn)
        print(f"{inst.name}: {rep.status.upper()} in {time.perf_counter() - start:.1f}s")
        for law, d in rep.details.items():
            if isinstance(d, dict):
                print(f"  {law:12s} {d['status']:4s} cases={d['cases']} checks={d['checks']} failures={d['failures']}")
    if pool:
        pool.close()


if __name__ == "__main__":
    main()
