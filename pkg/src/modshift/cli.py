"""Command-line entry points.

Verbs: ``lca step|power|frobenius-check``, ``shift kernel|coset-check|
mixing-check``, ``measure fourier|mixing|entropy``, ``crt split``,
``experiment run``.  Results are printed as JSON on stdout; exit status 0
means every requested check passed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import crt as crt_mod
from .chars import parse_character
from .errors import ModshiftError
from .experiment import run_file
from .kernels import (
    KernelShiftSpec,
    kernel_membership,
    coset_shift_check,
    topological_mixing_check,
    window_kernel,
)
from .lattice import WindowSpec, constant_config, decode_config, encode_config
from .measures import (
    block_entropy,
    coset_haar,
    fourier,
    kernel_haar,
    mixing_statistic,
    uniform_bernoulli,
)
from .rings import ModuleSpec, make_ring
from .shiftpoly import (
    apply_poly,
    frobenius_power,
    from_rule,
    iterate_rule,
    parse_rule,
    poly_pow,
    poly_pow_charp,
)


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True, default=str))


def _read_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return decode_config(fh.read())


def _write_config(path, config):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(encode_config(config))


def _offsets_arg(text):
    out = []
    for piece in text.split(";"):
        piece = piece.strip().strip("()")
        if piece:
            out.append(tuple(int(x) for x in piece.split(",")))
    return out


def _window_arg(args, dims) -> WindowSpec:
    extents = tuple(int(x) for x in args.extents.replace(",", " ").split())
    origin = (
        tuple(int(x) for x in args.origin.replace(",", " ").split())
        if args.origin
        else (0,) * len(extents)
    )
    return WindowSpec(dims, origin, extents)


def cmd_lca_step(args):
    rule = parse_rule(args.rule)
    cfg = _read_config(args.config)
    if args.mode:
        cfg = type(cfg)(cfg.window, cfg.module, cfg.values, args.mode)
    out = iterate_rule(rule, cfg, args.steps)
    if args.out:
        _write_config(args.out, out)
    _emit({"window": str(out.window), "steps": args.steps, "out": args.out})
    return 0


def cmd_lca_power(args):
    rule = parse_rule(args.rule)
    f = from_rule(rule)
    if args.frobenius:
        poly = poly_pow_charp(f, args.t)
    else:
        poly = poly_pow(f, args.t)
    _emit({"t": args.t, "terms": [[list(off), c] for off, c in poly.terms]})
    return 0


def cmd_lca_frobenius_check(args):
    rule = parse_rule(args.rule)
    p = rule.ring.characteristic
    frob = frobenius_power(rule, args.k)
    power = poly_pow(from_rule(rule), p**args.k)
    structural = frob == power
    applied = True
    if args.torus:
        from .lattice import WindowConfig
        from .rng import CounterRng

        extents = tuple(int(x) for x in args.torus.replace(",", " ").split())
        window = WindowSpec(rule.dims, (0,) * len(extents), extents)
        rng = CounterRng(args.seed, stream=71)
        shape = (args.configs,) + window.extents + (rule.module.rank,)
        draws = rng.uniform_codes(0, shape, rule.ring.size)
        for i in range(args.configs):
            cfg = WindowConfig(window, rule.module, draws[i], "torus")
            if apply_poly(frob, cfg) != iterate_rule(rule, cfg, p**args.k):
                applied = False
    ok = structural and applied
    _emit({"k": args.k, "structural": structural, "applied": applied, "pass": ok})
    return 0 if ok else 1


def cmd_shift_kernel(args):
    spec = KernelShiftSpec(parse_rule(args.kernel, expect_prefix="kernel"))
    window = _window_arg(args, spec.dims)
    basis = window_kernel(spec, window)
    _emit(
        {
            "window": str(window),
            "solution_count": basis.solution_count,
            "scalar_dims": list(basis.scalar_dims()),
            "free_sites": [list(f) for f in basis.free_sites],
        }
    )
    return 0


def cmd_shift_coset_check(args):
    spec = KernelShiftSpec(parse_rule(args.kernel, expect_prefix="kernel"))
    cfg = _read_config(args.config)
    ok = coset_shift_check(cfg, spec)
    _emit({"coset_shift": ok, "kernel_member": kernel_membership(spec, cfg)})
    return 0 if ok else 1


def cmd_shift_mixing_check(args):
    spec = KernelShiftSpec(parse_rule(args.kernel, expect_prefix="kernel"))
    offsets = _offsets_arg(args.offsets)
    if args.word:
        word = _read_config(args.word)
    else:
        word_window = WindowSpec(spec.dims, (0,) * (spec.dims[0] + spec.dims[1]), (1,) * (spec.dims[0] + spec.dims[1]))
        word = constant_config(spec.module, word_window, 0)
    pairs = [(h, word) for h in offsets]
    ok = topological_mixing_check(spec, pairs, args.n)
    _emit({"n": args.n, "nonempty": ok})
    return 0 if ok else 1


def _measure_from_args(args):
    if args.measure == "uniform":
        ring = make_ring(args.ring)
        module = ModuleSpec(ring, args.rank)
        dims = tuple(int(x) for x in args.dims.replace(",", " ").split())
        window = _window_arg(args, (dims[0], dims[1]))
        return uniform_bernoulli(module, window, seed=args.seed), module
    spec = KernelShiftSpec(parse_rule(args.kernel, expect_prefix="kernel"))
    window = _window_arg(args, spec.dims)
    if args.measure == "kernel":
        return kernel_haar(spec, window, seed=args.seed), spec.module
    if args.measure == "coset":
        rep = _read_config(args.rep)
        return coset_haar(rep, spec, seed=args.seed), spec.module
    raise ModshiftError(f"unknown measure {args.measure!r}")


def cmd_measure_fourier(args):
    mu, module = _measure_from_args(args)
    chi = parse_character(args.chi, module, mu.window)
    budget = "exact" if args.budget == "exact" else int(args.budget)
    r = fourier(mu, chi, budget)
    _emit(r.row())
    return 0


def cmd_measure_mixing(args):
    mu, module = _measure_from_args(args)
    offsets = _offsets_arg(args.offsets)
    word_window = WindowSpec(mu.window.dims, mu.window.origin, (1,) * mu.window.axes)
    word = constant_config(module, word_window, args.word_value)
    pairs = [(h, word) for h in offsets]
    budget = "exact" if args.budget == "exact" else int(args.budget)
    rows = []
    for n in (int(x) for x in args.n_schedule.replace(",", " ").split()):
        rows.append(mixing_statistic(mu, pairs, n, budget=budget).row())
    _emit({"mixing": rows})
    return 0


def cmd_measure_entropy(args):
    mu, module = _measure_from_args(args)
    block_extents = tuple(int(x) for x in args.block_extents.replace(",", " ").split())
    block = WindowSpec(mu.window.dims, mu.window.origin, block_extents)
    h = block_entropy(mu, block, None if args.samples == "exact" else int(args.samples))
    _emit({"bits_per_site": h})
    return 0


def cmd_crt_split(args):
    import os

    cfg = _read_config(args.config)
    deco = crt_mod.decompose_ring(cfg.module.ring)
    parts = crt_mod.split_config(cfg, deco)
    base, ext = os.path.splitext(args.config)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        base = os.path.join(args.out, os.path.basename(base))
    written = []
    for ring_j, part in zip(deco.component_rings, parts):
        path = f"{base}.p{ring_j.characteristic}{ext or '.cfg'}"
        _write_config(path, part)
        written.append(path)
    _emit({"components": written, "degenerate": deco.degenerate})
    return 0


def cmd_experiment_run(args):
    return run_file(
        args.config, args.out, workers=args.workers, force=args.force, seed=args.seed
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modshift",
        description="Exact linear-CA toolkit over finite commutative rings.",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    lca = sub.add_parser("lca", help="local rules and shift polynomials")
    lca_sub = lca.add_subparsers(dest="verb", required=True)
    s = lca_sub.add_parser("step", help="apply a rule to a configuration file")
    s.add_argument("--rule", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--mode", choices=["exact", "torus"])
    s.add_argument("--out")
    s.set_defaults(fn=cmd_lca_step)
    s = lca_sub.add_parser("power", help="print the t-th power of a rule polynomial")
    s.add_argument("--rule", required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--frobenius", action="store_true", help="use the char-p digit fast path")
    s.set_defaults(fn=cmd_lca_power)
    s = lca_sub.add_parser("frobenius-check", help="verify the p^k fast-forward identity")
    s.add_argument("--rule", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--torus", help="comma-separated torus extents for applied checks")
    s.add_argument("--configs", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_lca_frobenius_check)

    shift = sub.add_parser("shift", help="submodule and coset shifts")
    shift_sub = shift.add_subparsers(dest="verb", required=True)
    s = shift_sub.add_parser("kernel", help="solve the in-window kernel")
    s.add_argument("--kernel", required=True)
    s.add_argument("--origin")
    s.add_argument("--extents", required=True)
    s.set_defaults(fn=cmd_shift_kernel)
    s = shift_sub.add_parser("coset-check", help="test the coset-shift condition")
    s.add_argument("--kernel", required=True)
    s.add_argument("--config", required=True)
    s.set_defaults(fn=cmd_shift_coset_check)
    s = shift_sub.add_parser("mixing-check", help="pinned-word topological mixing check")
    s.add_argument("--kernel", required=True)
    s.add_argument("--offsets", required=True)
    s.add_argument("--word", help="configuration file with the pinned word")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_shift_mixing_check)

    measure = sub.add_parser("measure", help="measures, Fourier, mixing, entropy")
    measure_sub = measure.add_subparsers(dest="verb", required=True)

    def measure_common(p):
        p.add_argument("--measure", choices=["uniform", "kernel", "coset"], required=True)
        p.add_argument("--ring", help="ring descriptor (uniform measure)")
        p.add_argument("--rank", type=int, default=1)
        p.add_argument("--dims", default="1 0", help="D E (uniform measure)")
        p.add_argument("--kernel", help="kernel rule text (kernel/coset measures)")
        p.add_argument("--rep", help="coset representative config file")
        p.add_argument("--origin")
        p.add_argument("--extents", required=True)
        p.add_argument("--seed", type=int, default=0)

    s = measure_sub.add_parser("fourier", help="one Fourier coefficient")
    measure_common(s)
    s.add_argument("--chi", required=True, help="character text, e.g. (0,0):1;(1,0):1")
    s.add_argument("--budget", default="exact")
    s.set_defaults(fn=cmd_measure_fourier)
    s = measure_sub.add_parser("mixing", help="mixing deviations over an n schedule")
    measure_common(s)
    s.add_argument("--offsets", required=True)
    s.add_argument("--word-value", type=int, default=0)
    s.add_argument("--n-schedule", default="1 2 4 8 16")
    s.add_argument("--budget", default="exact")
    s.set_defaults(fn=cmd_measure_mixing)
    s = measure_sub.add_parser("entropy", help="plug-in block entropy")
    measure_common(s)
    s.add_argument("--block-extents", required=True)
    s.add_argument("--samples", default="exact")
    s.set_defaults(fn=cmd_measure_entropy)

    crt = sub.add_parser("crt", help="Chinese-remainder splitting")
    crt_sub = crt.add_subparsers(dest="verb", required=True)
    s = crt_sub.add_parser("split", help="split a configuration into prime components")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="output directory (defaults beside the input)")
    s.set_defaults(fn=cmd_crt_split)

    experiment = sub.add_parser("experiment", help="config-driven experiment runner")
    exp_sub = experiment.add_subparsers(dest="verb", required=True)
    s = exp_sub.add_parser("run", help="run an experiment config (path or bundled name)")
    s.add_argument("config")
    s.add_argument("--out", default="modshift-report")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--force", action="store_true", help="raise exhaustive enumeration caps")
    s.set_defaults(fn=cmd_experiment_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ModshiftError as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
