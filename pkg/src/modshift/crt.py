"""Chinese-remainder splitting of composite-characteristic rings.

A ring of characteristic m = p_1^{s_1} ... p_J^{s_J} decomposes as a direct
product of components of prime-power characteristic; configurations split
sitewise through the component maps, rules split coefficientwise, and the
splitting map commutes with every shift, which is what lets prime-field
machinery serve squarefree moduli.

Supported sources: zmod(m) for any m (components zmod(p^s)); product rings
whose factors each have prime-power characteristic (components regroup the
factors); any prime-characteristic ring (degenerate single component).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError, UnsupportedCharacteristicError
from .lattice import WindowConfig
from .rings import ModuleSpec, ProductRing, Ring, ZmodRing
from .rng import CounterRng
from .shiftpoly import LocalRule, apply_poly, from_rule

__all__ = [
    "CrtDecomposition",
    "decompose_ring",
    "split_config",
    "merge_config",
    "component_rule",
    "ConjugacyResult",
    "conjugacy_check",
    "project_measure",
    "merge_product_bernoulli",
]


def _factorize(n: int):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            s = 0
            while n % p == 0:
                n //= p
                s += 1
            out.append((p, s))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class CrtDecomposition:
    """Forward/inverse maps between a ring and its prime-power components."""

    ring: Ring
    prime_powers: tuple  # ((p, s), ...) in increasing p
    component_rings: tuple
    forward_table: np.ndarray  # (size, J) component codes
    inverse_table: np.ndarray  # mixed-radix component index -> source code
    idempotents: tuple
    cofactors: tuple  # q_j = m / p_j**s_j
    ideals: tuple  # frozensets {r : q_j r = 0}
    degenerate: bool = False

    @property
    def n_components(self):
        return len(self.component_rings)

    def forward(self, code: int):
        return tuple(int(x) for x in self.forward_table[code])

    def inverse(self, comps) -> int:
        idx = 0
        for c, ring in zip(reversed(comps), reversed(self.component_rings)):
            idx = idx * ring.size + int(c)
        return int(self.inverse_table[idx])

    def split_arrays(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.int64)
        return [self.forward_table[values, j] for j in range(self.n_components)]

    def merge_arrays(self, comp_values) -> np.ndarray:
        idx = np.zeros_like(np.asarray(comp_values[0], dtype=np.int64))
        for c, ring in zip(reversed(comp_values), reversed(self.component_rings)):
            idx = idx * ring.size + np.asarray(c, dtype=np.int64)
        return self.inverse_table[idx]


def _degenerate(ring: Ring) -> CrtDecomposition:
    size = ring.size
    fwd = np.arange(size, dtype=np.int64).reshape(size, 1)
    inv = np.arange(size, dtype=np.int64)
    return CrtDecomposition(
        ring,
        ((ring.characteristic, 1),),
        (ring,),
        fwd,
        inv,
        (ring.one,),
        (1,),
        (frozenset(range(size)),),
        degenerate=True,
    )


def _bezout_cofactors(mods):
    """Integers z_j with sum z_j * (m / mods_j) = 1 for pairwise-coprime mods."""
    m = 1
    for x in mods:
        m *= x
    qs = [m // x for x in mods]
    zs = []
    for q, mod in zip(qs, mods):
        zs.append(pow(q % mod, -1, mod))
    assert sum(z * q for z, q in zip(zs, qs)) % m == 1
    return qs, zs


def _verify_bijection(deco: CrtDecomposition):
    ring = deco.ring
    size = ring.size
    if size > 4096:
        return
    seen = set()
    for code in range(size):
        comps = deco.forward(code)
        if deco.inverse(comps) != code:
            raise AssertionError(f"inverse(forward({code})) != {code}")
        seen.add(comps)
    if len(seen) != size:
        raise AssertionError("forward map is not injective")
    # ring homomorphism spot exhaustive check
    for a in range(size):
        for b in range(size):
            fa, fb = deco.forward(a), deco.forward(b)
            fsum = deco.forward(ring.add(a, b))
            fprod = deco.forward(ring.mul(a, b))
            for j, comp in enumerate(deco.component_rings):
                if fsum[j] != comp.add(fa[j], fb[j]) or fprod[j] != comp.mul(fa[j], fb[j]):
                    raise AssertionError(f"component map not a homomorphism at ({a},{b})")
        if size > 64 and a >= 64:
            break


def _ideals(ring: Ring, cofactors):
    ideals = []
    codes = np.arange(ring.size, dtype=np.int64)
    for q in cofactors:
        qr = ring.mul_arr(np.int64(ring.from_int(q)), codes)
        ideals.append(frozenset(int(x) for x in np.nonzero(qr == 0)[0]))
    return ideals


def decompose_ring(ring: Ring) -> CrtDecomposition:
    """Split a ring along the prime factorization of its characteristic.

    Prime characteristic returns a flagged degenerate single component.
    """
    char = ring.characteristic
    factors = _factorize(char)
    if len(factors) <= 1:
        return _degenerate(ring)
    if isinstance(ring, ZmodRing):
        mods = [p**s for p, s in factors]
        comps = tuple(ZmodRing(m) for m in mods)
        qs, zs = _bezout_cofactors(mods)
        size = ring.size
        fwd = np.zeros((size, len(mods)), dtype=np.int64)
        codes = np.arange(size, dtype=np.int64)
        for j, m in enumerate(mods):
            fwd[:, j] = codes % m
        inv = np.zeros(int(np.prod(mods)), dtype=np.int64)
        idx = np.zeros(size, dtype=np.int64)
        for j in reversed(range(len(mods))):
            idx = idx * mods[j] + fwd[:, j]
        inv[idx] = codes
        idem = tuple(ring.from_int(z * q) for z, q in zip(zs, qs))
        deco = CrtDecomposition(
            ring, tuple(factors), comps, fwd, inv, idem, tuple(qs),
            tuple(_ideals(ring, qs)),
        )
        _verify_bijection(deco)
        return deco
    if isinstance(ring, ProductRing):
        groups = {}
        for idx, f in enumerate(ring.factors):
            fchar = _factorize(f.characteristic)
            if len(fchar) != 1:
                raise UnsupportedCharacteristicError(
                    "product factors must each have prime-power characteristic; "
                    f"factor {f.descriptor()} has characteristic {f.characteristic}"
                )
            groups.setdefault(fchar[0][0], []).append(idx)
        primes = sorted(groups)
        comps = []
        for p in primes:
            members = [ring.factors[i] for i in groups[p]]
            comps.append(members[0] if len(members) == 1 else ProductRing(members))
        comps = tuple(comps)
        size = ring.size
        fwd = np.zeros((size, len(primes)), dtype=np.int64)
        for code in range(size):
            parts = ring.decode(code)
            for j, p in enumerate(primes):
                sel = [parts[i] for i in groups[p]]
                comp = comps[j]
                fwd[code, j] = comp.encode(sel) if isinstance(comp, ProductRing) else sel[0]
        sizes = [c.size for c in comps]
        inv = np.zeros(int(np.prod(sizes)), dtype=np.int64)
        idx = np.zeros(size, dtype=np.int64)
        for j in reversed(range(len(comps))):
            idx = idx * sizes[j] + fwd[:, j]
        inv[idx] = np.arange(size, dtype=np.int64)
        qs, zs = _bezout_cofactors([p ** dict(factors)[p] for p in primes])
        idem = tuple(ring.from_int(z * q) for z, q in zip(zs, qs))
        deco = CrtDecomposition(
            ring,
            tuple((p, dict(factors)[p]) for p in primes),
            comps, fwd, inv, idem, tuple(qs), tuple(_ideals(ring, qs)),
        )
        _verify_bijection(deco)
        return deco
    raise UnsupportedCharacteristicError(
        f"cannot decompose {ring.descriptor()} of characteristic {char}"
    )


def split_config(config: WindowConfig, deco: CrtDecomposition):
    """Sitewise forward map; one configuration per component ring."""
    if config.module.ring != deco.ring:
        raise InvalidParameterError("config ring differs from decomposition source")
    out = []
    comp_vals = deco.split_arrays(config.values)
    for ring_j, vals in zip(deco.component_rings, comp_vals):
        module_j = ModuleSpec(ring_j, config.module.rank)
        out.append(WindowConfig(config.window, module_j, vals, config.mode))
    return out


def merge_config(configs, deco: CrtDecomposition) -> WindowConfig:
    if len(configs) != deco.n_components:
        raise InvalidParameterError("component count mismatch")
    first = configs[0]
    for cfg, ring_j in zip(configs, deco.component_rings):
        if cfg.module.ring != ring_j:
            raise InvalidParameterError("component config ring mismatch")
        if cfg.window != first.window or cfg.mode != first.mode:
            raise InvalidParameterError("component configs disagree on window/mode")
        if cfg.module.rank != first.module.rank:
            raise InvalidParameterError("component configs disagree on rank")
    vals = deco.merge_arrays([cfg.values for cfg in configs])
    module = ModuleSpec(deco.ring, first.module.rank)
    return WindowConfig(first.window, module, vals, first.mode)


def component_rule(rule: LocalRule, deco: CrtDecomposition, j: int) -> LocalRule:
    """The rule with every coefficient pushed through the j-th component map."""
    ring_j = deco.component_rings[j]
    module_j = ModuleSpec(ring_j, rule.module.rank)
    coeffs = tuple(int(deco.forward_table[c, j]) for c in rule.coeffs)
    if any(c == 0 for c in coeffs):
        raise InvalidParameterError(
            "a coefficient vanishes in component "
            f"{ring_j.descriptor()}; the component rule is not a valid local rule"
        )
    return LocalRule(module_j, rule.dims, rule.offsets, coeffs)


@dataclass
class ConjugacyResult:
    ok: bool
    trials: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.ok


def conjugacy_check(
    rule: LocalRule,
    deco: CrtDecomposition,
    trials: int = 100,
    torus_extents=(32,),
    seed: int = 0,
) -> ConjugacyResult:
    """split(rule(c)) == component rules applied to split(c), on random tori."""
    module = rule.module
    dims = rule.dims
    if len(torus_extents) != dims[0] + dims[1]:
        raise InvalidParameterError("torus extents arity != rule dims")
    from .lattice import WindowSpec

    window = WindowSpec(dims, (0,) * len(torus_extents), tuple(torus_extents))
    poly = from_rule(rule)
    comp_polys = [
        from_rule(component_rule(rule, deco, j)) for j in range(deco.n_components)
    ]
    rng = CounterRng(seed, stream=57)
    shape = (trials,) + window.extents + (module.rank,)
    draws = rng.uniform_codes(0, shape, module.ring.size)
    for trial in range(trials):
        cfg = WindowConfig(window, module, draws[trial], "torus")
        image = apply_poly(poly, cfg)
        split_image = split_config(image, deco)
        split_src = split_config(cfg, deco)
        for j, comp_poly in enumerate(comp_polys):
            direct = apply_poly(comp_poly, split_src[j])
            if not np.array_equal(direct.values, split_image[j].values):
                diff = np.argwhere(direct.values != split_image[j].values)[0]
                return ConjugacyResult(
                    False,
                    trials,
                    {
                        "trial": trial,
                        "component": j,
                        "site": tuple(int(x) for x in diff[:-1]),
                    },
                )
    return ConjugacyResult(True, trials)


def project_measure(mu, deco: CrtDecomposition, j: int):
    """Component-j marginal of a measure over the source ring."""
    from . import measures

    if not 0 <= j < deco.n_components:
        raise InvalidParameterError(f"component index {j} out of range")
    ring_j = deco.component_rings[j]
    module_j = ModuleSpec(ring_j, mu.module.rank)
    note = f"crt projection to component {j} ({ring_j.descriptor()})"
    if isinstance(mu, measures.BernoulliMeasure):
        probs = [Fraction(0)] * module_j.size
        for code, p in enumerate(mu.probs):
            comps = mu.module.decode(code)
            comp_code = module_j.encode(
                tuple(int(deco.forward_table[c, j]) for c in comps)
            )
            probs[comp_code] += p
        return measures.BernoulliMeasure(
            module_j, mu.window, probs, seed=mu.seed, mode=mu.mode,
            label=f"{mu.label}|p{ring_j.characteristic}",
            provenance=mu.derived(note),
        )
    if isinstance(mu, measures.SubgroupHaarMeasure):
        if mu.decomposition is None:
            if deco.degenerate and j == 0:
                return mu
            raise InvalidParameterError("subgroup measure is not CRT-split")
        span = mu.spans[j]
        return measures.SubgroupHaarMeasure(
            module_j, mu.window, (span,), None, seed=mu.seed, mode=mu.mode,
            label=f"{mu.label}|p{ring_j.characteristic}",
            provenance=mu.derived(note),
        )
    if isinstance(mu, measures.CosetHaarMeasure):
        rep_j = split_config(mu.rep, deco)[j]
        sub_j = project_measure(mu.subgroup, deco, j)
        return measures.CosetHaarMeasure(rep_j, sub_j, provenance=mu.derived(note))
    if isinstance(mu, measures.ExactWordMeasure):
        words = []
        for vals, p in mu.words:
            words.append((deco.forward_table[vals, j], p))
        return measures.ExactWordMeasure(
            module_j, mu.window, words, seed=mu.seed, mode=mu.mode,
            label=f"{mu.label}|p{ring_j.characteristic}",
            provenance=mu.derived(note),
        )

    def transform(batch):
        return deco.forward_table[batch, j]

    return measures.TransformedMeasure(
        mu, transform, mu.window, module_j,
        label=f"{mu.label}|p{ring_j.characteristic}", provenance=mu.derived(note),
    )


def merge_product_bernoulli(components, deco: CrtDecomposition):
    """Product joining of independent Bernoulli components, back over the source."""
    from . import measures

    if len(components) != deco.n_components:
        raise InvalidParameterError("component count mismatch")
    module = ModuleSpec(deco.ring, components[0].module.rank)
    window = components[0].window
    probs = []
    for code in range(module.size):
        comps = module.decode(code)
        p = Fraction(1)
        for jj, comp_mu in enumerate(components):
            comp_code = comp_mu.module.encode(
                tuple(int(deco.forward_table[c, jj]) for c in comps)
            )
            p *= comp_mu.probs[comp_code]
        probs.append(p)
    return measures.BernoulliMeasure(
        module, window, probs, seed=components[0].seed, mode=components[0].mode,
        label="product-joining",
    )
