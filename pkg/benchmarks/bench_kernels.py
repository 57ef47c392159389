"""Compare the compiled word kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 200000]
"""
import argparse
import importlib
import timeit


def bench(mod, n: int) -> dict:
    words = mod.xorshift_fill(1, n)[1]
    randoms = words[:3]
    return {
        "xorshift_fill": lambda: mod.xorshift_fill(7, n),
        "add_words": lambda: mod.add_words(words, words),
        "xor_words": lambda: mod.xor_words(words, words),
        "split+combine": lambda: [mod.combine_words(mod.split_words(w, randoms, False), False)
                                  for w in words[: n // 10]],
        "binop mul": lambda: [mod.binop(2, w, 3) for w in words[: n // 10]],
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = [importlib.import_module("lsym._kernels_py")]
    try:
        impls.append(importlib.import_module("lsym._kernels_c"))
    except ImportError:
        print("compiled kernels not built; timing the fallback only")
    results = {m.IMPL: {k: min(timeit.repeat(f, number=1, repeat=args.repeat))
                        for k, f in bench(m, args.n).items()} for m in impls}
    names = list(next(iter(results.values())))
    print(f"{'kernel':<16}" + "".join(f"{impl:>12}" for impl in results) + "     speedup")
    for k in names:
        row = [results[i][k] for i in results]
        speed = f"{row[0] / row[-1]:>10.1f}x" if len(row) > 1 else ""
        print(f"{k:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row) + speed)


if __name__ == "__main__":
    main()
