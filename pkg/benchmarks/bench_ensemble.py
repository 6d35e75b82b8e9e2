"""Time the ensemble average on the compiled and pure-Python backends.

Usage: python3 benchmarks/bench_ensemble.py [--repeat N]
"""

import argparse
import timeit
from functools import partial

from qdslow import _backend
from qdslow.ensemble import EnsembleSpec, average_chi
from qdslow.materials import REFERENCE, scheme_params
from qdslow.propagation import coupling_alpha

SPEC = EnsembleSpec("gaussian", REFERENCE.sigma_ih)


def cases():
    for config in ("Xi", "V", "Lambda"):
        p = scheme_params(config)
        for rel in (0.0, 10.0, 300.0):
            yield (f"chi {config:6s} Omega={rel:5.0f} G13",
                   partial(average_chi, SPEC, p, p.g13, 0.0, rel * p.G13))
    yield "coupling alpha V 1e3 W/cm2", partial(coupling_alpha, scheme_params("V"), SPEC, 1e3)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = sorted(_backend.BACKENDS)
    print(f"{'case':34s}" + "".join(f"{n:>12s}" for n in names) + "     speedup")
    for label, fn in cases():
        times = {}
        for name in names:
            number, _ = timeit.Timer(lambda: fn(backend=name)).autorange()
            best = min(timeit.repeat(lambda: fn(backend=name), number=number, repeat=args.repeat))
            times[name] = best / number
        row = "".join(f"{times[n] * 1e3:10.3f}ms" for n in names)
        ratio = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:34s}{row}{ratio:11.1f}x")


if __name__ == "__main__":
    main()
