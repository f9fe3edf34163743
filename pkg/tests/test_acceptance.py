"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  Every tolerance is pinned here; exact comparisons are
integer/rational equality, floating checks use the stated bounds.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from modshift import (
    GFRing,
    LocalRule,
    ModuleSpec,
    SubgroupHaarMeasure,
    WindowConfig,
    WindowSpec,
    ZmodRing,
    all_characters,
    apply_poly,
    block_entropy,
    constant_config,
    coset_haar,
    coset_from_cocycle,
    coset_shift_check,
    decompose_ring,
    conjugacy_check,
    fourier,
    from_rule,
    frobenius_power,
    haar_criterion,
    invariance_and_surjectivity_check,
    kernel_haar,
    kernel_membership,
    mixing_statistic,
    point_mass,
    poly_pow,
    project_measure,
    pushforward,
    recurrent_power_sums,
    scaled_coset_in_kernel,
    submodule_condition_check,
    torsion_free_check,
    uniform_bernoulli,
    window_kernel,
)
from modshift.kernels import enumerate_kernel_words
from modshift.rng import CounterRng

from oracles import brute_kernel_words, zeroth_row_probability

EXACT_TOL = 1e-9


def report(number, description, ok, elapsed, limit):
    status = "PASS" if ok else "FAIL"
    print(f"CRITERION {number:2d} {status}  {description}  [{elapsed:.2f}s/<{limit:.0f}s]")
    assert ok, f"criterion {number} failed: {description}"
    assert elapsed < limit, f"criterion {number} exceeded {limit}s ({elapsed:.2f}s)"


# ---------------------------------------------------------------------- 1 ---


def _random_rule(ring, rng, counter):
    dims = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)][int(rng.uint64(np.array([counter]))[0] % 5)]
    axes = dims[0] + dims[1]
    n_terms = 2 + int(rng.uint64(np.array([counter + 1]))[0] % 2)
    span = 2 if axes == 1 else 1
    raw = rng.uniform_codes(counter * 64 + 2, (8, axes + 1), 1 << 30)
    offsets, coeffs = [], []
    for row in raw:
        off = []
        for i in range(axes):
            x = int(row[i]) % (2 * span + 1) - span
            if i >= dims[0]:
                x = abs(x)
            off.append(x)
        off = tuple(off)
        if off in offsets:
            continue
        offsets.append(off)
        coeffs.append(1 + int(row[-1]) % (ring.size - 1))
        if len(offsets) == n_terms:
            break
    module = ModuleSpec(ring, 1)
    return LocalRule(module, dims, tuple(offsets), tuple(coeffs))


def _naive_batch_iterate(rule, values, steps):
    """Independent torus stepper: roll-and-accumulate per offset, `steps` times."""
    ring = rule.ring
    spatial = tuple(range(1, values.ndim - 1))
    out = values
    for _ in range(steps):
        acc = None
        for off, c in zip(rule.offsets, rule.coeffs):
            rolled = np.roll(out, tuple(-x for x in off), axis=spatial)
            term = ring.mul_arr(np.int64(c), rolled)
            acc = term if acc is None else ring.add_arr(acc, term)
        out = acc
    return out


def test_criterion_1_frobenius_exactness():
    t0 = time.time()
    rings = [ZmodRing(2), ZmodRing(3), ZmodRing(5), GFRing(2, 2)]
    ok = True
    n_configs = 20
    for ring in rings:
        rng = CounterRng(2026, stream=ring.size)
        p = ring.characteristic
        for idx in range(50):
            rule = _random_rule(ring, rng, idx * 1000)
            f = from_rule(rule)
            window = WindowSpec(rule.dims, (0,) * (rule.dims[0] + rule.dims[1]),
                                (32,) * (rule.dims[0] + rule.dims[1]))
            draws = CounterRng(555 + idx, stream=ring.size).uniform_codes(
                0, (n_configs,) + window.extents + (1,), ring.size
            )
            for k in (1, 2, 3):
                frob = frobenius_power(rule, k)
                power = poly_pow(f, p**k)
                if frob != power:
                    ok = False
                naive = _naive_batch_iterate(rule, draws, p**k)
                for i in range(n_configs):
                    cfg = WindowConfig(window, rule.module, draws[i], "torus")
                    fast = apply_poly(frob, cfg)
                    if not np.array_equal(fast.values, naive[i]):
                        ok = False
                    if not np.array_equal(apply_poly(power, cfg).values, naive[i]):
                        ok = False
    report(
        1,
        "Frobenius fast-forward: structural equality and exact torus agreement "
        "(50 rules x {z2,z3,z5,gf4} x k in {1,2,3}, 20 configs each)",
        ok,
        time.time() - t0,
        60.0,
    )


# ---------------------------------------------------------------------- 2 ---


def test_criterion_2_checkerboard_example(cb_system):
    t0 = time.time()
    torus = cb_system.checkerboard(cb_system.window(64, 64), mode="torus")
    fixed = cb_system.rule.apply(torus) == torus
    cb = cb_system.checkerboard(cb_system.window(10, 8))
    coset_ok = coset_shift_check(cb, cb_system.kernel)
    sums = recurrent_power_sums(cb_system.ring, cb_system.rule.coeffs)
    sums_ok = sums == frozenset({0})
    torsion_ok = True
    for window in (cb_system.six_site_window(), cb_system.window(5, 3), cb_system.window(8, 4)):
        basis = window_kernel(cb_system.kernel, window)
        proper = basis.solution_count < cb_system.ring.size**window.n_sites
        if proper and torsion_free_check(cb_system.kernel, window, 0):
            torsion_ok = False
        if not proper:
            torsion_ok = False  # windows were chosen to have proper kernels
    ok = fixed and coset_ok and sums_ok and torsion_ok
    report(
        2,
        "checkerboard example: fixed point on 64x64 torus, coset condition, "
        "recurring sums {0}, zero-scalar torsion fails on proper kernels",
        ok,
        time.time() - t0,
        5.0,
    )


# ---------------------------------------------------------------------- 3 ---


def test_criterion_3_window_kernel(cb_system):
    t0 = time.time()
    w6 = cb_system.six_site_window()
    basis = window_kernel(cb_system.kernel, w6)
    brute = brute_kernel_words(cb_system.kernel, w6)
    count_ok = basis.solution_count == 32 and len(brute) == 32
    words = enumerate_kernel_words(basis)
    set_ok = {tuple(int(v) for v in words[i, :, 0]) for i in range(32)} == set(brute)
    closure_ok = submodule_condition_check(basis, (1, 1, 1))
    ok = count_ok and set_ok and closure_ok
    report(
        3,
        "window kernel: 32 solutions vs exhaustive 64-word enumeration; "
        "submodule condition closed exhaustively",
        ok,
        time.time() - t0,
        1.0,
    )


# ---------------------------------------------------------------------- 4 ---


def test_criterion_4_haar_fourier(cb_system):
    t0 = time.time()
    w6 = cb_system.six_site_window()
    chars = list(all_characters(cb_system.module, w6))
    assert len(chars) == 64
    eta = kernel_haar(cb_system.kernel, w6, seed=11)
    sweep = [fourier(eta, chi) for chi in chars]
    kernel_ok = all(r.root_sum.is_zero() or r.root_sum.is_one() for r in sweep)
    kernel_ok &= all(
        min(abs(r.value), abs(r.value - 1.0)) < EXACT_TOL for r in sweep
    )
    mu_c = coset_haar(cb_system.checkerboard(w6), cb_system.kernel, seed=5)
    csweep = [fourier(mu_c, chi) for chi in chars]
    coset_ok = all(
        r.root_sum.modulus_is_zero() or r.root_sum.modulus_is_one() for r in csweep
    )
    coset_ok &= any(r.root_sum.modulus_is_one() and not r.root_sum.is_one() for r in csweep)
    coset_ok &= haar_criterion(csweep, criterion="coset", tol=EXACT_TOL).consistent
    uni = uniform_bernoulli(cb_system.module, w6, seed=1)
    usweep = [fourier(uni, chi) for chi in chars]
    uniform_ok = usweep[0].root_sum.is_one() and all(
        r.root_sum.is_zero() for r in usweep[1:]
    )
    ok = kernel_ok and coset_ok and uniform_ok
    report(
        4,
        "Haar/Fourier: 64-character sweeps exact in {0,1} (kernel), moduli in "
        "{0,1} with a non-unit phase (coset), (1,0,...,0) (uniform)",
        ok,
        time.time() - t0,
        5.0,
    )


# ---------------------------------------------------------------------- 5 ---


def test_criterion_5_mixing(cb_system):
    t0 = time.time()
    W = WindowSpec((1, 1), (0, 0), (17, 17))
    mu = kernel_haar(cb_system.kernel, W, seed=42)
    site = WindowSpec((1, 1), (0, 0), (1, 1))
    offsets = [(0, 0), (0, 1), (1, 0)]
    schedule = (1, 2, 4, 8, 16)
    ok = True
    prev = None
    for value in (0, 1):
        word = constant_config(cb_system.module, site, value)
        pairs = [(h, word) for h in offsets]
        prev = None
        for n in schedule:
            res = mixing_statistic(mu, pairs, n)
            oracle = zeroth_row_probability(
                {(n * h[0], n * h[1]): (value,) for h in offsets}
            )
            if res.observed_fraction != oracle:
                ok = False
            if prev is not None and abs(res.deviation) > abs(prev) + EXACT_TOL:
                ok = False
            prev = res.deviation
        if abs(prev) >= EXACT_TOL:
            ok = False
    word0 = constant_config(cb_system.module, site, 0)
    pairs = [(h, word0) for h in offsets]
    exact8 = mixing_statistic(mu, pairs, 8)
    mc = mixing_statistic(mu, pairs, 8, budget=100_000)
    if abs(mc.deviation - exact8.deviation) > 4.0 * mc.stderr:
        ok = False
    report(
        5,
        "mixing: exact deviations match the zeroth-row oracle, shrink below "
        "1e-9 along n in {1,2,4,8,16}; Monte Carlo (N=1e5) within 4 stderr",
        ok,
        time.time() - t0,
        60.0,
    )


# ---------------------------------------------------------------------- 6 ---


def test_criterion_6_invariance(cb_system):
    t0 = time.time()
    ok = True
    cases = [
        ("zmod:2", ((0,), (1,)), (1, 1)),
        ("zmod:3", ((0,), (1,)), (1, 2)),
        ("zmod:6", ((0,), (1,)), (1, 5)),
    ]
    from modshift import make_ring

    for desc, offs, coeffs in cases:
        ring = make_ring(desc)
        mod = ModuleSpec(ring, 1)
        rule = LocalRule(mod, (1, 0), offs, coeffs)
        src = WindowSpec((1, 0), (0,), (6,))
        tgt = WindowSpec((1, 0), (0,), (4,))
        pushed = pushforward(uniform_bernoulli(mod, src, seed=1), rule, 1).marginal(tgt)
        if not pushed.same_distribution(SubgroupHaarMeasure.full_space(mod, tgt, seed=1)):
            ok = False
    inv, surj = invariance_and_surjectivity_check(
        cb_system.constraint, cb_system.kernel, cb_system.six_site_window()
    )
    if not (inv and not surj):
        ok = False
    inv2, surj2 = invariance_and_surjectivity_check(
        cb_system.rule, cb_system.kernel, cb_system.six_site_window()
    )
    if not (inv2 and surj2):
        ok = False
    report(
        6,
        "invariance: exact uniform pushforward fixed by unit-coefficient rules "
        "over zmod 2/3/6; constraint rule on its own kernel is non-surjective",
        ok,
        time.time() - t0,
        10.0,
    )


# ---------------------------------------------------------------------- 7 ---


def test_criterion_7_crt():
    t0 = time.time()
    ring = ZmodRing(6)
    deco = decompose_ring(ring)
    ok = [r.descriptor() for r in deco.component_rings] == ["zmod:2", "zmod:3"]
    for a in range(6):
        if deco.inverse(deco.forward(a)) != a:
            ok = False
        for b in range(6):
            fa, fb = deco.forward(a), deco.forward(b)
            fs = deco.forward(ring.add(a, b))
            fp = deco.forward(ring.mul(a, b))
            for j, comp in enumerate(deco.component_rings):
                if fs[j] != comp.add(fa[j], fb[j]) or fp[j] != comp.mul(fa[j], fb[j]):
                    ok = False
    mod6 = ModuleSpec(ring, 1)
    rule = LocalRule(mod6, (1, 0), ((0,), (1,)), (1, 5))
    if not conjugacy_check(rule, deco, trials=100, torus_extents=(32,), seed=9).ok:
        ok = False
    win = WindowSpec((1, 0), (0,), (4,))
    mu = uniform_bernoulli(mod6, win, seed=2)
    p0 = project_measure(mu, deco, 0)
    p1 = project_measure(mu, deco, 1)
    if p0.probs != (Fraction(1, 2),) * 2 or p1.probs != (Fraction(1, 3),) * 3:
        ok = False
    report(
        7,
        "CRT: zmod(6) split bijective+homomorphic on all 36 pairs; conjugacy on "
        "100 random 32-tori with coefficients (1,5); exact uniform projections",
        ok,
        time.time() - t0,
        10.0,
    )


# ---------------------------------------------------------------------- 8 ---


def test_criterion_8_torsion_instance(torsion_system):
    t0 = time.time()
    sys_ = torsion_system
    sums = recurrent_power_sums(sys_.ring, sys_.rule.coeffs)
    ok = sums == frozenset({1})
    windows = [sys_.window(9), sys_.window(12)]
    for w in windows:
        basis = window_kernel(sys_.kernel, w)
        if basis.solution_count >= sys_.ring.size**w.n_sites:
            ok = False  # quotient must be nontrivial
        if not torsion_free_check(sys_.kernel, w, 1):
            ok = False
    w12 = sys_.window(12)
    candidates = {
        "zero": constant_config(sys_.module, w12, 0),
        "constant-1": constant_config(sys_.module, w12, 1),
        "linear": coset_from_cocycle(0, 1, w12, sys_.module),
        "quadratic": WindowConfig(
            w12,
            sys_.module,
            np.array([[(m * (m - 1) // 2) % 3] for m in range(12)], dtype=np.int64),
        ),
    }
    for name, cand in candidates.items():
        if not coset_shift_check(cand, sys_.kernel):
            ok = False  # all four are genuine coset shifts
        passes = scaled_coset_in_kernel(cand, sys_.kernel, 1)
        is_kernel_member = kernel_membership(sys_.kernel, cand)
        if passes != is_kernel_member:
            ok = False  # containment must single out C = S exactly
    if kernel_membership(sys_.kernel, candidates["quadratic"]):
        ok = False  # the quadratic candidate is a nontrivial coset
    report(
        8,
        "unit recurring sum instance over zmod(3): torsion-freeness holds and "
        "only kernel representatives survive the scalar containment",
        ok,
        time.time() - t0,
        10.0,
    )


# ---------------------------------------------------------------------- 9 ---


def test_criterion_9_determinism():
    t0 = time.time()
    from modshift.experiment import (
        bundled_config_path,
        parse_experiment,
        report_bytes,
        run_experiment,
    )

    ok = True
    for name in ("example_checkerboard", "frobenius_suite"):
        text = bundled_config_path(name).read_text()
        config = parse_experiment(text)
        blobs = set()
        for workers in (1, 4, 8):
            blobs.add(report_bytes(run_experiment(config, workers=workers)))
        blobs.add(report_bytes(run_experiment(config, workers=1)))
        if len(blobs) != 1:
            ok = False
        if not run_experiment(config, workers=1)["ok"]:
            ok = False
    report(
        9,
        "determinism: bundled suites produce byte-identical reports across "
        "repeated runs and 1/4/8 workers",
        ok,
        time.time() - t0,
        120.0,
    )


# --------------------------------------------------------------------- 10 ---


def test_criterion_10_entropy():
    t0 = time.time()
    mod2 = ModuleSpec(ZmodRing(2), 1)
    win = WindowSpec((1, 0), (0,), (8,))
    mu = uniform_bernoulli(mod2, win, seed=14)
    block = WindowSpec((1, 0), (0,), (2,))
    h = block_entropy(mu, block, n_samples=100_000)
    ok = abs(h - 1.0) <= 0.02
    pm = point_mass(constant_config(mod2, win, 1))
    ok &= block_entropy(pm, block) == 0.0
    ok &= block_entropy(pm, block, n_samples=1000) == 0.0
    report(
        10,
        "entropy diagnostic: uniform Bernoulli 1.00 +/- 0.02 bits/site at "
        "N=1e5; point mass exactly 0",
        ok,
        time.time() - t0,
        30.0,
    )
