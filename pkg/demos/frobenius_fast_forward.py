"""The characteristic-p fast-forward: p**k steps in one sparse pass.

Over a ring of prime characteristic p, the p**k-th iterate of a linear rule
is again a linear rule with the same number of terms: coefficients are raised
to the p**k-th power and offsets are scaled by p**k.  This script checks the
identity structurally, then times fast-forward against naive iteration.
"""

import time

from modshift import (
    LocalRule,
    ModuleSpec,
    WindowConfig,
    WindowSpec,
    ZmodRing,
    apply_poly,
    from_rule,
    frobenius_power,
    poly_pow,
)
from modshift.rng import CounterRng
from modshift.shiftpoly import iterate_rule


def main():
    ring = ZmodRing(3)
    module = ModuleSpec(ring, 1)
    rule = LocalRule(module, (2, 0), ((0, 0), (0, 1), (1, 0)), (1, 2, 1))
    f = from_rule(rule)

    for k in (1, 2, 3):
        fast = frobenius_power(rule, k)
        slow = poly_pow(f, 3**k)
        print(f"k={k}: 3^{k}-th power has {len(slow.terms)} terms; "
              f"fast-forward form equal: {fast == slow}")

    window = WindowSpec((2, 0), (0, 0), (243, 243))
    rng = CounterRng(7, stream=1)
    cfg = WindowConfig(
        window, module, rng.uniform_codes(0, window.extents + (1,), 3), "torus"
    )

    k = 5  # 243 steps
    t0 = time.perf_counter()
    fast_out = apply_poly(frobenius_power(rule, k), cfg)
    t_fast = time.perf_counter() - t0

    t0 = time.perf_counter()
    slow_out = iterate_rule(rule, cfg, 3**k)
    t_slow = time.perf_counter() - t0

    print(f"\n3^{k} = {3**k} steps on a 243x243 torus:")
    print(f"  fast-forward: {t_fast*1e3:8.2f} ms")
    print(f"  naive:        {t_slow*1e3:8.2f} ms   speedup x{t_slow/t_fast:.0f}")
    print("  bit-identical results:", fast_out == slow_out)


if __name__ == "__main__":
    main()
