"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--qubits 16 20] [--repeat 5]

Both backends are imported directly, so the comparison works whichever one
``qoracle.kernels`` picked at import time.
"""

import argparse
import time

import numpy as np

from qoracle.kernels import load_backend


def _state(q, rng):
    psi = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    return psi / np.linalg.norm(psi)


def _cases(q):
    mid = q // 2
    return {
        "h": lambda be, psi: be.apply_h(psi, mid),
        "rz": lambda be, psi: be.apply_rz(psi, mid, 0.3),
        "cx": lambda be, psi: be.apply_cx(psi, 0, q - 1),
        "mcx(3)": lambda be, psi: be.apply_mcx(psi, 0b111, q - 1),
        "mcz(all)": lambda be, psi: be.apply_mcz(psi, (1 << q) - 1),
    }


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[14, 18, 20])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = {"python": load_backend("python")}
    try:
        backends["native"] = load_backend("native")
    except ImportError:
        print("native backend not built; timing the fallback only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'qubits':>7}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for q in args.qubits:
        base = _state(q, rng)
        for name, op in _cases(q).items():
            ms = {}
            for bname, be in backends.items():
                psi = base.copy()
                ms[bname] = _best(lambda: op(be, psi), args.repeat) * 1e3
            speed = f"{ms['python'] / ms['native']:.1f}x" if "native" in ms else "-"
            print(f"{name:<12}{q:>7}" + "".join(f"{ms[b]:>10.3f}ms" for b in backends) + f"{speed:>10}")
        vec = rng.normal(size=1 << q)
        ms = {}
        for bname, be in backends.items():
            ms[bname] = _best(lambda: be.fwht(vec.copy()), args.repeat) * 1e3
        speed = f"{ms['python'] / ms['native']:.1f}x" if "native" in ms else "-"
        print(f"{'fwht':<12}{q:>7}" + "".join(f"{ms[b]:>10.3f}ms" for b in backends) + f"{speed:>10}")


if __name__ == "__main__":
    main()
