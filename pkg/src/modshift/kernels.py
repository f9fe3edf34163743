"""Submodule shifts presented as kernels of linear constraint rules.

A constraint rule with stencil offsets b and coefficients psi_b cuts out the
submodule shift ``{a : sum_b psi_b a_{m+b} = 0 for every lattice anchor m}``.
On a finite window we solve the system of all constraints whose full stencil
lies inside the window; this in-window kernel contains the true projection of
the infinite kernel, and `extension_certificate` provides the honest equality
evidence used for the bundled examples.

Composite squarefree moduli are routed through the crt module and solved per
prime component.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import (
    InfeasiblePinError,
    InvalidParameterError,
    ResourceLimitError,
    UnsupportedCharacteristicError,
)
from . import linalg
from .lattice import (
    WindowConfig,
    WindowSpec,
    config_scale,
    config_sub,
    restrict_config,
    shift_config,
)
from .rings import ModuleSpec, Ring, is_prime
from .rng import CounterRng
from .shiftpoly import LocalRule

__all__ = [
    "KernelShiftSpec",
    "Cocycle",
    "WindowBasis",
    "window_kernel",
    "kernel_membership",
    "enumerate_kernel_words",
    "draw_kernel_words",
    "submodule_condition_check",
    "batch_membership",
    "invariance_and_surjectivity_check",
    "coboundary",
    "coset_from_cocycle",
    "coset_shift_check",
    "torsion_free_check",
    "scaled_coset_in_kernel",
    "topological_mixing_check",
    "extension_certificate",
]

ENUMERATION_CAP = 1 << 20


@dataclass(frozen=True)
class KernelShiftSpec:
    """A submodule shift ker(Psi) given by its constraint rule."""

    constraint: LocalRule
    label: str = "kernel"

    @property
    def module(self) -> ModuleSpec:
        return self.constraint.module

    @property
    def ring(self) -> Ring:
        return self.constraint.ring

    @property
    def dims(self):
        return self.constraint.dims


def _stencil_bounds(offsets):
    arr = np.array(offsets, dtype=np.int64)
    return arr.min(axis=0), arr.max(axis=0)


def anchor_window(stencil_offsets, window: WindowSpec):
    """Anchors m in the lattice with m + stencil inside the window; None if empty."""
    lo, hi = _stencil_bounds(stencil_offsets)
    origin = [o - int(l) for o, l in zip(window.origin, lo)]
    extents = [e - int(h - l) for e, h, l in zip(window.extents, hi, lo)]
    D = window.dims[0]
    for i in range(D, window.axes):
        if origin[i] < 0:
            extents[i] += origin[i]
            origin[i] = 0
    if any(e < 1 for e in extents):
        return None
    return WindowSpec(window.dims, tuple(origin), tuple(extents))


def constraint_matrix(spec: KernelShiftSpec, window: WindowSpec) -> np.ndarray:
    """(n_anchors, n_sites) matrix of constraint coefficients on scalar sites."""
    rule = spec.constraint
    anchors = anchor_window(rule.offsets, window)
    n_sites = window.n_sites
    if anchors is None:
        return np.zeros((0, n_sites), dtype=np.int64)
    site_index = {site: i for i, site in enumerate(window.sites())}
    rows = []
    for m in anchors.sites():
        row = np.zeros(n_sites, dtype=np.int64)
        for off, c in zip(rule.offsets, rule.coeffs):
            row[site_index[tuple(a + b for a, b in zip(m, off))]] = c
        rows.append(row)
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class WindowBasis:
    """Echelon basis of the in-window kernel.

    `components` holds one (field ring, scalar basis, free site indices) triple
    per prime factor of the characteristic; a field ring yields exactly one.
    The scalar basis spans per-site solutions; module solutions place one copy
    per component of the free module.
    """

    spec: KernelShiftSpec
    window: WindowSpec
    components: tuple  # of (Ring, ndarray (nb, n_sites), tuple free site idx)
    decomposition: object = None  # CrtDecomposition when composite

    @property
    def module(self) -> ModuleSpec:
        return self.spec.module

    @property
    def solution_count(self) -> int:
        count = 1
        rank = self.module.rank
        for ring, basis, _ in self.components:
            count *= ring.size ** (basis.shape[0] * rank)
        return count

    @property
    def free_sites(self):
        return tuple(free for _, _, free in self.components)

    def scalar_dims(self):
        return tuple(basis.shape[0] for _, basis, _ in self.components)


def window_kernel(spec: KernelShiftSpec, window: WindowSpec) -> WindowBasis:
    """Deterministic echelon basis of all in-window constraints' solutions."""
    ring = spec.ring
    if ring.is_field:
        matrix = constraint_matrix(spec, window)
        basis = linalg.nullspace(matrix, ring)
        _, pivots = linalg.rref(matrix, ring)
        free = tuple(c for c in range(window.n_sites) if c not in set(pivots))
        return WindowBasis(spec, window, ((ring, basis, free),))
    char = ring.characteristic
    if is_prime(char):
        raise UnsupportedCharacteristicError(
            f"{ring.descriptor()} has prime characteristic but is not a field; "
            "only fields and squarefree zmod moduli are supported"
        )
    from . import crt  # lazy: crt depends on this module's callers

    deco = crt.decompose_ring(ring)
    if any(s > 1 for _, s in deco.prime_powers):
        raise UnsupportedCharacteristicError(
            f"characteristic {char} is not squarefree; window kernels unavailable"
        )
    comps = []
    for j, comp_ring in enumerate(deco.component_rings):
        comp_rule = crt.component_rule(spec.constraint, deco, j)
        comp_spec = KernelShiftSpec(comp_rule, label=f"{spec.label}[p={comp_ring.characteristic}]")
        matrix = constraint_matrix(comp_spec, window)
        basis = linalg.nullspace(matrix, comp_ring)
        _, pivots = linalg.rref(matrix, comp_ring)
        free = tuple(c for c in range(window.n_sites) if c not in set(pivots))
        comps.append((comp_ring, basis, free))
    return WindowBasis(spec, window, tuple(comps), decomposition=deco)


def constraint_residual(spec: KernelShiftSpec, config: WindowConfig):
    """Constraint values at every in-window anchor; None when no anchor fits."""
    rule = spec.constraint
    rule.module.check_same(config.module)
    anchors = anchor_window(rule.offsets, config.window)
    if anchors is None:
        return None
    ring = rule.ring
    w = config.window
    out = None
    for off, c in zip(rule.offsets, rule.coeffs):
        src = anchors.translate(off)
        block = config.values[w.relative_slices(src)]
        contrib = ring.mul_arr(np.int64(c), block)
        out = contrib if out is None else ring.add_arr(out, contrib)
    return out


def kernel_membership(spec_or_basis, word: WindowConfig) -> bool:
    """True iff the word satisfies every constraint fully supported in its window."""
    spec = spec_or_basis.spec if isinstance(spec_or_basis, WindowBasis) else spec_or_basis
    if isinstance(spec_or_basis, WindowBasis) and spec_or_basis.window != word.window:
        raise InvalidParameterError("word window differs from basis window")
    residual = constraint_residual(spec, word)
    return residual is None or not residual.any()


def batch_membership(spec: KernelShiftSpec, window: WindowSpec, values: np.ndarray) -> np.ndarray:
    """Vectorized membership for (count, n_sites, rank) word stacks."""
    rule = spec.constraint
    anchors = anchor_window(rule.offsets, window)
    count = values.shape[0]
    if anchors is None:
        return np.ones(count, dtype=bool)
    ring = rule.ring
    site_index = {site: i for i, site in enumerate(window.sites())}
    gather = np.zeros((anchors.n_sites, len(rule.offsets)), dtype=np.int64)
    for ai, m in enumerate(anchors.sites()):
        for oi, off in enumerate(rule.offsets):
            gather[ai, oi] = site_index[tuple(a + b for a, b in zip(m, off))]
    residual = None
    for oi, c in enumerate(rule.coeffs):
        term = ring.mul_arr(np.int64(c), values[:, gather[:, oi], :])
        residual = term if residual is None else ring.add_arr(residual, term)
    return ~residual.reshape(count, -1).any(axis=1)


def _component_words(ring, basis, rank, codes):
    """Module-valued words for given coefficient codes (count, nb*rank)."""
    nb = basis.shape[0]
    n_sites = basis.shape[1]
    count = codes.shape[0]
    out = np.zeros((count, n_sites, rank), dtype=np.int64)
    if nb == 0:
        return out
    coef = codes.reshape(count, rank, nb)
    if ring.kind == "zmod":
        out_t = np.matmul(coef, basis[None, :, :]) % ring.size  # (count, rank, sites)
        out = np.transpose(out_t, (0, 2, 1))
    else:
        for c in range(rank):
            acc = np.zeros((count, n_sites), dtype=np.int64)
            for i in range(nb):
                term = ring.mul_arr(coef[:, c, i][:, None], basis[i][None, :])
                acc = ring.add_arr(acc, term)
            out[:, :, c] = acc
    return out


def _merge_component_values(deco, comp_values):
    return deco.merge_arrays(comp_values)


def enumerate_kernel_words(basis: WindowBasis, limit: int = ENUMERATION_CAP) -> np.ndarray:
    """All kernel words, shape (count, n_sites, rank); deterministic order."""
    if basis.solution_count > limit:
        raise ResourceLimitError(
            f"kernel has {basis.solution_count} words, above the cap {limit}; "
            "pass a larger limit to force enumeration",
            required=basis.solution_count,
        )
    rank = basis.module.rank
    per_comp = []
    for ring, comp_basis, _ in basis.components:
        q = ring.size
        nvars = comp_basis.shape[0] * rank
        count = q**nvars
        codes = np.zeros((count, nvars), dtype=np.int64)
        idx = np.arange(count)
        for v in range(nvars):
            codes[:, v] = (idx // q**v) % q
        per_comp.append(_component_words(ring, comp_basis, rank, codes))
    if basis.decomposition is None:
        return per_comp[0]
    sizes = [w.shape[0] for w in per_comp]
    grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    flat = [g.ravel() for g in grids]
    comp_values = [w[f] for w, f in zip(per_comp, flat)]
    return _merge_component_values(basis.decomposition, comp_values)


def draw_kernel_words(basis: WindowBasis, count: int, seed: int, start: int = 0) -> np.ndarray:
    """Uniform kernel words via uniform free coefficients; pure in (seed, index)."""
    rank = basis.module.rank
    comp_values = []
    for ci, (ring, comp_basis, _) in enumerate(basis.components):
        rng = CounterRng(seed, stream=101 + ci)
        nvars = comp_basis.shape[0] * rank
        codes = rng.uniform_codes(start * max(nvars, 1), (count, nvars), ring.size) if nvars else np.zeros((count, 0), dtype=np.int64)
        comp_values.append(_component_words(ring, comp_basis, rank, codes))
    if basis.decomposition is None:
        return comp_values[0]
    return _merge_component_values(basis.decomposition, comp_values)


def _word_config(basis: WindowBasis, values_flat: np.ndarray) -> WindowConfig:
    vals = values_flat.reshape(basis.window.extents + (basis.module.rank,))
    return WindowConfig(basis.window, basis.module, vals)


def submodule_condition_check(
    window_set,
    gens,
    max_exhaustive: int = 1 << 17,
    samples: int = 10000,
    seed: int = 2024,
) -> bool:
    """Closure of the window set under sum_h r_h * s_h for tuples from the set.

    `window_set` is a WindowBasis (membership = in-window constraints) or an
    explicit (count, n_sites, rank) word array paired with nothing else
    (membership = listed words).  Tiny sets are checked exhaustively, larger
    ones on `samples` seeded random tuples.
    """
    gens = [int(g) for g in gens]
    if not gens:
        raise InvalidParameterError("need at least one generator coefficient")
    if isinstance(window_set, WindowBasis):
        basis = window_set
        ring = basis.module.ring
        count = basis.solution_count
        if count ** len(gens) <= max_exhaustive:
            words = enumerate_kernel_words(basis)
            n = words.shape[0]
            grids = np.meshgrid(*[np.arange(n)] * len(gens), indexing="ij")
            acc = None
            for g, grid in zip(gens, grids):
                term = ring.mul_arr(np.int64(g), words[grid.ravel()])
                acc = term if acc is None else ring.add_arr(acc, term)
            return bool(batch_membership(basis.spec, basis.window, acc).all())
        draws = [
            draw_kernel_words(basis, samples, seed + 7 * h) for h in range(len(gens))
        ]
        acc = None
        for g, block in zip(gens, draws):
            term = ring.mul_arr(np.int64(g), block)
            acc = term if acc is None else ring.add_arr(acc, term)
        return bool(batch_membership(basis.spec, basis.window, acc).all())

    words, module = window_set
    words = np.asarray(words, dtype=np.int64)
    ring = module.ring
    keys = {words[i].tobytes() for i in range(words.shape[0])}
    n = words.shape[0]
    combos = iter_product(range(n), repeat=len(gens))
    if n ** len(gens) > max_exhaustive:
        rng = CounterRng(seed, stream=11)
        picks = rng.uniform_codes(0, (samples, len(gens)), n)
        combos = (tuple(int(x) for x in row) for row in picks)
    for combo in combos:
        acc = None
        for g, wi in zip(gens, combo):
            term = ring.mul_arr(np.int64(g), words[wi])
            acc = term if acc is None else ring.add_arr(acc, term)
        if acc.tobytes() not in keys:
            return False
    return True


def _field_components(spec: KernelShiftSpec):
    """Yield (component spec, component ring, decomposition|None, index)."""
    ring = spec.ring
    if ring.is_field:
        yield spec, ring, None, 0
        return
    from . import crt

    deco = crt.decompose_ring(ring)
    if any(s > 1 for _, s in deco.prime_powers):
        raise UnsupportedCharacteristicError(
            f"characteristic {ring.characteristic} is not squarefree"
        )
    for j, comp_ring in enumerate(deco.component_rings):
        comp_rule = crt.component_rule(spec.constraint, deco, j)
        yield KernelShiftSpec(comp_rule, spec.label), comp_ring, deco, j


def invariance_and_surjectivity_check(
    rule: LocalRule,
    spec: KernelShiftSpec,
    window: WindowSpec,
    samples: int = 5,
    seed: int = 0,
):
    """(invariant, surjective) for the rule acting on the kernel over a window.

    The kernel on the stencil-expanded window is pushed through the rule and
    compared against the kernel on the target window: containment gives
    invariance, image span rank gives surjectivity.  The check runs on scalar
    (rank-1) values; free-module components transform identically.
    """
    rule.module.check_same(spec.module)
    offs = np.array(rule.offsets, dtype=np.int64)
    lo_h = offs.min(axis=0)
    hi_h = offs.max(axis=0)
    expand_lo = [max(0, -int(l)) for l in lo_h]
    expand_hi = [max(0, int(h)) for h in hi_h]
    big = window.expanded(expand_lo, expand_hi)
    scalar_module = ModuleSpec(spec.ring, 1)
    scalar_rule = LocalRule(scalar_module, rule.dims, rule.offsets, rule.coeffs)
    invariant = True
    surjective = True
    from .shiftpoly import apply_poly, from_rule

    for comp_spec, comp_ring, deco, j in _field_components(spec):
        if deco is not None:
            from . import crt

            comp_poly = from_rule(crt.component_rule(scalar_rule, deco, j))
        else:
            comp_poly = from_rule(scalar_rule)
        comp_scalar_module = ModuleSpec(comp_ring, 1)
        big_basis = window_kernel(comp_spec, big)
        ((_, scalar_basis, _),) = big_basis.components
        small_basis = window_kernel(comp_spec, window)
        ((_, small_scalar, _),) = small_basis.components
        nb = scalar_basis.shape[0]
        vectors = [scalar_basis[i] for i in range(nb)]
        if nb:
            rng = CounterRng(seed, stream=5)
            coefs = rng.uniform_codes(0, (samples, nb), comp_ring.size)
            combos = _component_words(comp_ring, scalar_basis, 1, coefs)
            vectors += [combos[i, :, 0] for i in range(samples)]
        images = []
        for vec in vectors:
            cfg = WindowConfig(
                big, comp_scalar_module, vec.reshape(big.extents + (1,))
            )
            out = apply_poly(comp_poly, cfg)
            out_small = restrict_config(out, window)
            if not kernel_membership(comp_spec, out_small):
                invariant = False
            images.append(out_small.values.reshape(-1))
        image_rows = (
            np.array(images[:nb], dtype=np.int64).reshape(nb, -1)
            if nb
            else np.zeros((0, window.n_sites), dtype=np.int64)
        )
        if linalg.row_span_rank(image_rows, comp_ring) != small_scalar.shape[0]:
            surjective = False
    return invariant, surjective


class Cocycle:
    """A configuration-valued cocycle given by its generator-direction images.

    Holds one image per lattice axis (the value at the unit vector e_i); every
    other value follows from the law b^{m+n} = sigma^n(b^m) + b^n.  Derivation
    shrinks windows in exact mode, one generator step at a time.
    """

    def __init__(self, generator_images):
        images = list(generator_images)
        if not images:
            raise InvalidParameterError("need one generator image per axis")
        first = images[0]
        common = first.window
        for img in images:
            first.module.check_same(img.module)
            if img.mode != first.mode:
                raise InvalidParameterError("generator images must share a mode")
            common = common.intersect(img.window)
            if common is None:
                raise InvalidParameterError("generator images have no common window")
        if len(images) != first.window.axes:
            raise InvalidParameterError("need exactly one image per lattice axis")
        self.images = tuple(restrict_config(img, common) for img in images)
        self.window = common
        self.module = first.module

    @staticmethod
    def from_coboundary(config: WindowConfig) -> "Cocycle":
        axes = config.window.axes
        units = [tuple(int(i == j) for j in range(axes)) for i in range(axes)]
        return Cocycle(coboundary(config, units))

    @staticmethod
    def linear(a, window, module, mode="exact") -> "Cocycle":
        """The cocycle b^m = (m_1 + ... + m_k) * a: every generator image is a^M."""
        from .lattice import constant_config

        img = constant_config(module, window, a, mode)
        return Cocycle([img] * window.axes)

    def value_at(self, m) -> WindowConfig:
        """b^m derived by generator steps; m must be componentwise >= 0."""
        m = tuple(int(x) for x in m)
        if any(x < 0 for x in m):
            raise InvalidParameterError("derivation implemented for nonnegative steps")
        from .lattice import config_add, constant_config

        current = constant_config(self.module, self.window, 0, self.images[0].mode)
        for axis, steps in enumerate(m):
            unit = tuple(int(i == axis) for i in range(self.window.axes))
            for _ in range(steps):
                shifted = shift_config(current, unit)
                common = shifted.window.intersect(self.images[axis].window)
                if common is None:
                    raise InvalidParameterError("windows exhausted during derivation")
                current = config_add(
                    restrict_config(shifted, common),
                    restrict_config(self.images[axis], common),
                )
        return current

    def check_law(self, config: WindowConfig, vector_pairs) -> bool:
        """Verify b^{u+v} = sigma^v(b^u) + b^v for the coboundary of config."""
        from .lattice import config_add

        for u, v in vector_pairs:
            (b_u,) = coboundary(config, [u])
            (b_v,) = coboundary(config, [v])
            (b_uv,) = coboundary(config, [tuple(a + b for a, b in zip(u, v))])
            shifted = shift_config(b_u, v)
            common = b_uv.window.intersect(shifted.window)
            common = common.intersect(b_v.window) if common else None
            if common is None:
                raise InvalidParameterError("windows exhausted during law check")
            lhs = restrict_config(b_uv, common)
            rhs = config_add(
                restrict_config(shifted, common), restrict_config(b_v, common)
            )
            if lhs != rhs:
                return False
        return True


def coboundary(config: WindowConfig, vectors) -> list:
    """sigma^v(c) - c for each vector, on the common (shrunken) window."""
    from .errors import DomainExhaustedError

    out = []
    for v in vectors:
        shifted = shift_config(config, v)
        common = config.window.intersect(shifted.window)
        if common is None:
            raise DomainExhaustedError(f"no common window for coboundary along {v}")
        out.append(
            config_sub(restrict_config(shifted, common), restrict_config(config, common))
        )
    return out


def coset_from_cocycle(c0, a, window: WindowSpec, module: ModuleSpec, mode="exact") -> WindowConfig:
    """The configuration c_m = c0 + (m_1 + ... + m_{D+E}) * a on the window."""
    ring = module.ring
    if isinstance(c0, int):
        c0 = (c0,) * module.rank
    if isinstance(a, int):
        a = (a,) * module.rank
    grids = np.meshgrid(
        *[np.arange(o, o + e, dtype=np.int64) for o, e in zip(window.origin, window.extents)],
        indexing="ij",
    )
    coord_sum = np.zeros(window.extents, dtype=np.int64)
    for g in grids:
        coord_sum = coord_sum + g
    images = np.array([ring.from_int(n) for n in range(ring.characteristic)], dtype=np.int64)
    scalars = images[coord_sum % ring.characteristic]
    vals = np.zeros(window.extents + (module.rank,), dtype=np.int64)
    for c in range(module.rank):
        vals[..., c] = ring.add_arr(np.int64(c0[c]), ring.mul_arr(scalars, np.int64(a[c])))
    return WindowConfig(window, module, vals, mode)


def _default_check_vectors(window: WindowSpec, count: int, seed: int):
    axes = window.axes
    vs = []
    for i in range(axes):
        e = [0] * axes
        e[i] = 1
        vs.append(tuple(e))
    rng = CounterRng(seed, stream=23)
    D = window.dims[0]
    raw = rng.uniform_codes(0, (count, axes), 5)
    for row in raw:
        v = []
        for i, x in enumerate(row):
            x = int(x)
            v.append(x - 2 if i < D else x % 3)
        if any(v):
            vs.append(tuple(v))
    return vs


def coset_shift_check(
    config: WindowConfig,
    spec: KernelShiftSpec,
    vectors=None,
    random_vectors: int = 4,
    seed: int = 7,
) -> bool:
    """True iff every tested coboundary sigma^v(c) - c lies in the kernel.

    Default vectors are the lattice generators plus a few seeded random ones;
    defaults that would empty the window are skipped, explicit vectors are not.
    """
    from .errors import DomainExhaustedError

    defaulted = vectors is None
    if defaulted:
        vectors = _default_check_vectors(config.window, random_vectors, seed)
    for v in vectors:
        try:
            (diff,) = coboundary(config, [v])
        except DomainExhaustedError:
            if defaulted:
                continue
            raise
        if not kernel_membership(spec, diff):
            return False
    return True


def torsion_free_check(spec: KernelShiftSpec, window: WindowSpec, scalar: int) -> bool:
    """No word outside the window kernel lands inside it under scalar multiplication.

    Equivalently the scalar acts with trivial kernel on the quotient of the
    full window space by the in-window kernel: the solution spaces of M x = 0
    and (scalar*M) x = 0 must coincide.
    """
    for comp_spec, comp_ring, deco, j in _field_components(spec):
        if deco is None:
            comp_scalar = int(scalar)
        else:
            comp_scalar = int(deco.forward(int(scalar))[j])
        matrix = constraint_matrix(comp_spec, window)
        scaled = comp_ring.mul_arr(np.int64(comp_scalar), matrix)
        base_nullity = window.n_sites - linalg.rank(matrix, comp_ring)
        scaled_nullity = window.n_sites - linalg.rank(scaled, comp_ring)
        if scaled_nullity != base_nullity:
            return False
    return True


def scaled_coset_in_kernel(word: WindowConfig, spec: KernelShiftSpec, scalar: int) -> bool:
    """True iff scalar * word satisfies the in-window constraints."""
    return kernel_membership(spec, config_scale(int(scalar), word))


def topological_mixing_check(spec: KernelShiftSpec, pairs, n: int) -> bool:
    """Can the kernel realize every word simultaneously at separation n?

    `pairs` is a list of (offset h, WindowConfig word); the word windows are
    translated by n*h, pinned, and the kernel's constraints on the bounding
    box are solved with those pins.  Conflicting pins raise InfeasiblePinError;
    a word that is not itself a kernel word is rejected up front.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    module = spec.module
    pins = {}
    for h, word in pairs:
        module.check_same(word.module)
        if not kernel_membership(spec, word):
            raise InvalidParameterError("pinned word is not in the window kernel")
        v = tuple(int(n) * int(x) for x in h)
        for site in word.window.sites():
            target = word.value_at(site)
            abs_site = tuple(s + d for s, d in zip(site, v))
            if abs_site in pins and pins[abs_site] != target:
                raise InfeasiblePinError(
                    f"site {abs_site} pinned to both {pins[abs_site]} and {target}"
                )
            pins[abs_site] = target
    if not pins:
        return True
    sites = list(pins)
    lo = [min(s[i] for s in sites) for i in range(len(sites[0]))]
    hi = [max(s[i] for s in sites) for i in range(len(sites[0]))]
    dims = spec.dims
    box = WindowSpec(dims, tuple(lo), tuple(h - l + 1 for l, h in zip(lo, hi)))
    site_order = list(box.sites())
    site_idx = {s: i for i, s in enumerate(site_order)}
    pin_cols = np.array([site_idx[s] for s in sites], dtype=np.int64)
    free_cols = np.array(
        [i for i in range(box.n_sites) if i not in set(pin_cols.tolist())],
        dtype=np.int64,
    )
    rank_mod = module.rank
    for comp_spec, comp_ring, deco, j in _field_components(spec):
        matrix = constraint_matrix(comp_spec, box)
        if matrix.shape[0] == 0:
            continue
        for c in range(rank_mod):
            if deco is None:
                targets = np.array([pins[s][c] for s in sites], dtype=np.int64)
            else:
                targets = np.array(
                    [deco.forward(pins[s][c])[j] for s in sites], dtype=np.int64
                )
            pinned_part = matrix[:, pin_cols]
            rhs = comp_ring.neg_arr(
                _matvec(comp_ring, pinned_part, targets)
            )
            solution, _ = linalg.solve_affine(matrix[:, free_cols], rhs, comp_ring)
            if solution is None:
                return False
    return True


def _matvec(ring, matrix, vec):
    if matrix.shape[1] == 0:
        return np.zeros(matrix.shape[0], dtype=np.int64)
    if ring.kind == "zmod":
        return (matrix @ vec) % ring.size
    acc = np.zeros(matrix.shape[0], dtype=np.int64)
    for i in range(matrix.shape[1]):
        acc = ring.add_arr(acc, ring.mul_arr(matrix[:, i], np.int64(vec[i])))
    return acc


def extension_certificate(spec: KernelShiftSpec, window: WindowSpec, layers: int = 1) -> bool:
    """Every in-window kernel word extends by `layers` rings of extra sites.

    Certified by comparing the rank of the expanded kernel's projection onto
    the window against the in-window kernel dimension.
    """
    axes = window.axes
    big = window.expanded([layers] * axes, [layers] * axes)
    site_cols = []
    big_sites = {s: i for i, s in enumerate(big.sites())}
    for s in window.sites():
        site_cols.append(big_sites[s])
    site_cols = np.array(site_cols, dtype=np.int64)
    for comp_spec, comp_ring, _, _ in _field_components(spec):
        big_matrix = constraint_matrix(comp_spec, big)
        big_basis = linalg.nullspace(big_matrix, comp_ring)
        small_matrix = constraint_matrix(comp_spec, window)
        small_dim = window.n_sites - linalg.rank(small_matrix, comp_ring)
        projected = big_basis[:, site_cols] if big_basis.size else np.zeros((0, window.n_sites), dtype=np.int64)
        if linalg.row_span_rank(projected, comp_ring) != small_dim:
            return False
    return True
