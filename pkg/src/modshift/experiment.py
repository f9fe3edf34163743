"""Config-driven experiment runner with deterministic reports.

Experiment files are flat key = value sections (no scripting): an
``[experiment]`` header followed by ``[step <name>]`` sections, each with a
``kind`` selecting a registered check.  Reports are byte-stable: identical
configs produce identical report bytes regardless of worker count, with wall
clock metadata segregated into a sidecar file.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .chars import all_characters
from .errors import ConfigParseError, InvalidParameterError, ResourceLimitError
from .kernels import (
    KernelShiftSpec,
    coset_shift_check,
    invariance_and_surjectivity_check,
    kernel_membership,
    submodule_condition_check,
    torsion_free_check,
    window_kernel,
)
from .lattice import WindowSpec, checkerboard_config, constant_config
from .measures import (
    block_entropy,
    coset_haar,
    fourier,
    haar_criterion,
    kernel_haar,
    mixing_statistic,
    pushforward,
    uniform_bernoulli,
    SubgroupHaarMeasure,
)
from .rings import ModuleSpec, make_ring, recurrent_power_sums
from .rng import CounterRng
from .shiftpoly import (
    frobenius_power,
    from_rule,
    iterate_rule,
    parse_rule,
    poly_pow,
)
from . import crt as crt_mod

__all__ = [
    "ExperimentConfig",
    "parse_experiment",
    "run_experiment",
    "write_report",
    "run_file",
    "bundled_config_path",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "modshift-report-v1"


@dataclass
class ExperimentConfig:
    name: str
    seed: int
    steps: list  # of (name, {key: value})
    raw_text: str


def parse_experiment(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigParseError(f"experiment config: {exc}") from None
    if "experiment" not in parser:
        raise ConfigParseError("missing [experiment] section", line=1)
    head = parser["experiment"]
    name = head.get("name", "experiment")
    if "seed" not in head:
        raise ConfigParseError("experiment seed must be explicit")
    seed = int(head["seed"])
    steps = []
    for section in parser.sections():
        if section == "experiment":
            continue
        if not section.startswith("step "):
            raise ConfigParseError(f"unknown section [{section}]")
        params = dict(parser[section])
        if "kind" not in params:
            raise ConfigParseError(f"step [{section}] missing kind")
        steps.append((section[5:].strip(), params))
    return ExperimentConfig(name, seed, steps, text)


def _ints(text: str):
    return [int(tok) for tok in text.replace(",", " ").split()]


def _window_from(params, rule_dims, origin_key="origin", extents_key="extents") -> WindowSpec:
    extents = _ints(params[extents_key])
    origin = _ints(params.get(origin_key, "0 " * len(extents)))
    return WindowSpec(rule_dims, tuple(origin), tuple(extents))


def _pattern_config(pattern: str, module, window, mode):
    if pattern == "checkerboard":
        return checkerboard_config(module, window, mode=mode)
    if pattern.startswith("constant:"):
        return constant_config(module, window, int(pattern.split(":", 1)[1]), mode=mode)
    raise InvalidParameterError(f"unknown pattern {pattern!r}")


def _step_frobenius_check(params, seed):
    rule = parse_rule(params["rule"])
    ks = _ints(params.get("ks", "1 2"))
    torus = _ints(params.get("torus", "32 " * (rule.dims[0] + rule.dims[1])))
    n_configs = int(params.get("configs", "3"))
    window = WindowSpec(rule.dims, (0,) * len(torus), tuple(torus))
    rng = CounterRng(seed, stream=71)
    f = from_rule(rule)
    checks = []
    ok = True
    p = rule.ring.characteristic
    for k in ks:
        frob = frobenius_power(rule, k)
        power = poly_pow(f, p**k)
        structural = frob == power
        applied = True
        shape = (n_configs,) + window.extents + (rule.module.rank,)
        draws = rng.uniform_codes(k * 10_000_000, shape, rule.ring.size)
        from .lattice import WindowConfig
        from .shiftpoly import apply_poly

        for i in range(n_configs):
            cfg = WindowConfig(window, rule.module, draws[i], "torus")
            fast = apply_poly(frob, cfg)
            naive = iterate_rule(rule, cfg, p**k)
            if fast != naive or apply_poly(power, cfg) != naive:
                applied = False
        checks.append({"k": k, "structural": structural, "applied": applied})
        ok = ok and structural and applied
    return {"pass": ok, "checks": checks}


def _step_fixed_point(params, seed):
    rule = parse_rule(params["rule"])
    torus = _ints(params["torus"])
    window = WindowSpec(rule.dims, (0,) * len(torus), tuple(torus))
    cfg = _pattern_config(params["pattern"], rule.module, window, "torus")
    out = rule.apply(cfg)
    ok = out == cfg
    return {"pass": ok, "torus": torus}


def _step_coset_check(params, seed):
    spec = KernelShiftSpec(parse_rule(params["kernel"], expect_prefix="kernel"))
    window = _window_from(params, spec.dims)
    cfg = _pattern_config(params["pattern"], spec.module, window, "exact")
    result = coset_shift_check(cfg, spec)
    member = kernel_membership(spec, cfg)
    expected = params.get("expected", "true") == "true"
    out = {"pass": result == expected, "coset_shift": result, "kernel_member": member}
    if "expected-member" in params:
        out["pass"] = out["pass"] and (member == (params["expected-member"] == "true"))
    return out


def _step_kernel_count(params, seed):
    spec = KernelShiftSpec(parse_rule(params["kernel"], expect_prefix="kernel"))
    window = _window_from(params, spec.dims)
    basis = window_kernel(spec, window)
    count = basis.solution_count
    expected = int(params["expected"])
    out = {"pass": count == expected, "count": count, "expected": expected}
    if params.get("submodule-gens"):
        gens = _ints(params["submodule-gens"])
        closed = submodule_condition_check(basis, gens)
        out["submodule_condition"] = closed
        out["pass"] = out["pass"] and closed
    if params.get("extension-check", "false") == "true":
        from .kernels import extension_certificate

        cert = extension_certificate(spec, window)
        out["extension_certificate"] = cert
        out["pass"] = out["pass"] and cert
    return out


def _step_recurrent_sums(params, seed):
    rule = parse_rule(params["rule"])
    values = recurrent_power_sums(rule.ring, rule.coeffs)
    expected = set(_ints(params["expected"]))
    return {
        "pass": set(values) == expected,
        "values": sorted(values),
        "expected": sorted(expected),
    }


def _step_torsion_check(params, seed):
    spec = KernelShiftSpec(parse_rule(params["kernel"], expect_prefix="kernel"))
    window = _window_from(params, spec.dims)
    scalar = int(params["scalar"])
    result = torsion_free_check(spec, window, scalar)
    expected = params["expected"] == "true"
    return {"pass": result == expected, "torsion_free": result, "scalar": scalar}


def _step_invariance_check(params, seed):
    rule = parse_rule(params["rule"])
    spec = KernelShiftSpec(parse_rule(params["kernel"], expect_prefix="kernel"))
    window = _window_from(params, spec.dims)
    inv, surj = invariance_and_surjectivity_check(rule, spec, window)
    want_inv, want_surj = params.get("expected", "true true").split()
    ok = inv == (want_inv == "true") and surj == (want_surj == "true")
    return {"pass": ok, "invariant": inv, "surjective": surj}


def _build_measure(params, seed):
    kind = params.get("measure", "uniform")
    if kind in ("kernel", "coset"):
        spec = KernelShiftSpec(parse_rule(params["kernel"], expect_prefix="kernel"))
        window = _window_from(params, spec.dims)
        if kind == "kernel":
            return kernel_haar(spec, window, seed=seed), spec.module, window
        rep = _pattern_config(params["pattern"], spec.module, window, "exact")
        return coset_haar(rep, spec, seed=seed), spec.module, window
    if kind == "uniform":
        ring = make_ring(params["ring"])
        rank = int(params.get("rank", "1"))
        module = ModuleSpec(ring, rank)
        dims_d, dims_e = _ints(params.get("dims", "1 0"))
        window = _window_from(params, (dims_d, dims_e))
        return uniform_bernoulli(module, window, seed=seed), module, window
    raise InvalidParameterError(f"unknown measure kind {kind!r}")


def _step_haar_sweep(params, seed):
    mu, module, window = _build_measure(params, seed)
    sweep_window = window
    if "sweep-extents" in params:
        sweep_window = _window_from(
            {"extents": params["sweep-extents"], "origin": params.get("sweep-origin", params.get("origin", "0 " * window.axes))},
            window.dims,
        )
    criterion = params.get("criterion", "subgroup")
    limit = (1 << 24) if params.get("_force") else (1 << 20)
    results = [fourier(mu, chi) for chi in all_characters(module, sweep_window, limit=limit)]
    verdict = haar_criterion(results, criterion=criterion)
    rows = [r.row(t=0) for r in results]
    out = {
        "pass": verdict.consistent,
        "criterion": criterion,
        "n_characters": len(results),
        "violations": verdict.violations,
        "fourier_table": rows,
    }
    if params.get("expect-nonunit-phase", "false") == "true":
        nonunit = any(
            r.root_sum is not None
            and r.root_sum.modulus_is_one()
            and not r.root_sum.is_one()
            for r in results
        )
        out["nonunit_phase"] = nonunit
        out["pass"] = out["pass"] and nonunit
    return out


def _step_mixing(params, seed):
    mu, module, window = _build_measure(params, seed)
    offsets = []
    for piece in params["offsets"].split(";"):
        piece = piece.strip().strip("()")
        offsets.append(tuple(int(x) for x in piece.split(",")))
    word_window = WindowSpec(window.dims, tuple(_ints(params.get("word-origin", "0 " * window.axes))), (1,) * window.axes)
    word = constant_config(module, word_window, int(params.get("word-value", "0")))
    pairs = [(h, word) for h in offsets]
    schedule = _ints(params.get("n-schedule", "1 2 4 8 16"))
    budget = params.get("budget", "exact")
    budget = "exact" if budget == "exact" else int(budget)
    tol = float(params.get("tolerance", "1e-9"))
    rows = []
    ok = True
    prev = None
    for n in schedule:
        res = mixing_statistic(mu, pairs, n, budget=budget)
        rows.append(res.row())
        slack = tol if res.exact else max(tol, 4.0 * res.stderr)
        if n == schedule[-1] and abs(res.deviation) > slack:
            ok = False
        if res.exact and prev is not None and abs(res.deviation) > abs(prev) + tol:
            ok = False
        if res.exact:
            prev = res.deviation
    return {"pass": ok, "mixing_table": rows, "budget": str(budget)}


def _step_entropy(params, seed):
    mu, module, window = _build_measure(params, seed)
    block = _window_from(
        {"extents": params["block-extents"], "origin": params.get("block-origin", "0 " * window.axes)},
        window.dims,
    )
    samples = params.get("samples")
    h = block_entropy(mu, block, None if samples in (None, "exact") else int(samples))
    expected = float(params["expected"])
    tol = float(params.get("tolerance", "0.02"))
    ok = abs(h - expected) <= tol
    return {"pass": ok, "bits_per_site": h, "expected": expected, "tolerance": tol}


def _step_crt_check(params, seed):
    ring = make_ring(params["ring"])
    deco = crt_mod.decompose_ring(ring)
    bijective = True
    hom = True
    for a in range(ring.size):
        if deco.inverse(deco.forward(a)) != a:
            bijective = False
    for a in range(ring.size):
        for b in range(ring.size):
            fa, fb = deco.forward(a), deco.forward(b)
            fsum = deco.forward(ring.add(a, b))
            for j, comp in enumerate(deco.component_rings):
                if fsum[j] != comp.add(fa[j], fb[j]):
                    hom = False
    out = {
        "pass": bijective and hom,
        "components": [r.descriptor() for r in deco.component_rings],
        "bijective": bijective,
        "additive_hom": hom,
    }
    if "rule" in params:
        rule = parse_rule(params["rule"])
        trials = int(params.get("trials", "100"))
        torus = tuple(_ints(params.get("torus", "32")))
        res = crt_mod.conjugacy_check(rule, deco, trials=trials, torus_extents=torus, seed=seed)
        out["conjugacy"] = res.ok
        out["pass"] = out["pass"] and res.ok
    return out


def _step_pushforward_invariance(params, seed):
    rule = parse_rule(params["rule"])
    module = rule.module
    src_window = _window_from(params, rule.dims)
    target = _window_from(
        {"extents": params["target-extents"], "origin": params.get("target-origin", "0 " * src_window.axes)},
        rule.dims,
    )
    uni = uniform_bernoulli(module, src_window, seed=seed)
    pushed = pushforward(uni, rule, int(params.get("t", "1")))
    if not pushed.window.contains_window(target):
        raise InvalidParameterError("pushforward window does not cover the target window")
    got = pushed.marginal(target)
    want = SubgroupHaarMeasure.full_space(module, target, seed=seed)
    ok = got.same_distribution(want)
    return {"pass": ok, "target": str(target)}


STEP_HANDLERS = {
    "frobenius-check": _step_frobenius_check,
    "fixed-point": _step_fixed_point,
    "coset-check": _step_coset_check,
    "kernel-count": _step_kernel_count,
    "recurrent-sums": _step_recurrent_sums,
    "torsion-check": _step_torsion_check,
    "invariance-check": _step_invariance_check,
    "haar-sweep": _step_haar_sweep,
    "mixing": _step_mixing,
    "entropy": _step_entropy,
    "crt-check": _step_crt_check,
    "pushforward-invariance": _step_pushforward_invariance,
}


def _run_step(name, params, seed):
    kind = params["kind"]
    handler = STEP_HANDLERS.get(kind)
    if handler is None:
        raise InvalidParameterError(f"step {name!r}: unknown kind {kind!r}")
    try:
        result = handler(params, seed)
    except ResourceLimitError as exc:
        return {
            "name": name,
            "kind": kind,
            "pass": False,
            "error": f"resource limit: {exc} (use --force to raise caps)",
        }
    result.update({"name": name, "kind": kind})
    return result


def run_experiment(config: ExperimentConfig, workers: int = 1) -> dict:
    """Execute all steps; the report is independent of the worker count."""
    if workers < 1:
        raise InvalidParameterError("workers must be >= 1")
    jobs = [(name, params, config.seed) for name, params in config.steps]
    if workers == 1:
        results = [_run_step(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_step, *job) for job in jobs]
            results = [f.result() for f in futures]
    n_pass = sum(1 for r in results if r.get("pass"))
    return {
        "schema": REPORT_SCHEMA,
        "experiment": config.name,
        "seed": config.seed,
        "steps": results,
        "summary": {
            "total": len(results),
            "passed": n_pass,
            "failed": len(results) - n_pass,
        },
        "ok": n_pass == len(results),
    }


def _json_default(obj):
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)}")


def report_bytes(report: dict) -> bytes:
    return json.dumps(
        report, sort_keys=True, indent=2, ensure_ascii=True, default=_json_default
    ).encode("ascii") + b"\n"


def _csv_bytes(rows, columns) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(row.get(c)) if isinstance(row.get(c), float) else row.get(c, "") for c in columns])
    return buf.getvalue().encode("ascii")


def write_report(report: dict, outdir, raw_text: str) -> dict:
    """Write report.json, CSV tables, config echo, and the timestamp sidecar."""
    import os

    os.makedirs(outdir, exist_ok=True)
    paths = {}

    def emit(name, data: bytes):
        path = os.path.join(outdir, name)
        with open(path, "wb") as fh:
            fh.write(data)
        paths[name] = path

    emit("report.json", report_bytes(report))
    fourier_rows = []
    mixing_rows = []
    for step in report["steps"]:
        for row in step.get("fourier_table", []):
            fourier_rows.append({"step": step["name"], **row})
        for row in step.get("mixing_table", []):
            mixing_rows.append({"step": step["name"], **row})
    emit(
        "fourier.csv",
        _csv_bytes(fourier_rows, ["step", "chi", "t", "re", "im", "modulus", "stderr", "exact"]),
    )
    emit(
        "mixing.csv",
        _csv_bytes(
            mixing_rows,
            ["step", "n", "observed", "product", "deviation", "stderr", "exact"],
        ),
    )
    emit("config_echo.cfg", raw_text.encode("utf-8"))
    sidecar = {"written_unix_time": time.time()}
    emit("run_meta.json", (json.dumps(sidecar) + "\n").encode("ascii"))
    return paths


def bundled_config_path(name: str):
    base = resources.files("modshift").joinpath("configs")
    candidate = base.joinpath(f"{name}.cfg")
    if candidate.is_file():
        return candidate
    raise InvalidParameterError(
        f"no bundled config named {name!r}; available: "
        + ", ".join(sorted(p.name[:-4] for p in base.iterdir() if p.name.endswith(".cfg")))
    )


def run_file(path: str, outdir: str, workers: int = 1, force: bool = False, seed=None) -> int:
    """Run a config (a path or a bundled name); returns the process exit code."""
    import os

    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = bundled_config_path(path).read_text(encoding="utf-8")
    config = parse_experiment(text)
    if seed is not None:
        config.seed = int(seed)
    if force:
        for _, params in config.steps:
            params["_force"] = "true"
    report = run_experiment(config, workers=workers)
    write_report(report, outdir, text)
    if not report["ok"]:
        failures = [
            {"step": s["name"], "kind": s["kind"], "error": s.get("error")}
            for s in report["steps"]
            if not s.get("pass")
        ]
        print(json.dumps({"failed": failures}, sort_keys=True))
        return 1
    return 0
