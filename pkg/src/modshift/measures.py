"""Measures on windowed configuration spaces and their diagnostics.

Handles come in exact and sampled flavors.  Exact handles answer cylinder
probabilities as Fractions and Fourier coefficients as exact root-of-unity
sums; sampled handles draw reproducibly via counter-based streams, so draw i
of seed s is a pure function of (s, i) no matter how work is partitioned.

The subgroup-Haar handle is the workhorse: uniform measures on window
subgroups are closed under linear rule pushforward (transform the generators,
re-echelonize), which keeps exactness available far beyond enumerable sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .chars import CharacterSpec, RootSum, format_character
from .errors import (
    InvalidCosetError,
    InvalidParameterError,
    MissingTrivialCharacterError,
    OutOfWindowError,
    ResourceLimitError,
)
from .kernels import (
    KernelShiftSpec,
    WindowBasis,
    coset_shift_check,
    window_kernel,
)
from .lattice import WindowConfig, WindowSpec
from .rings import ModuleSpec, Ring, is_prime
from .rng import CounterRng, cdf_thresholds
from .shiftpoly import (
    LocalRule,
    ShiftPolynomial,
    from_rule,
    poly_pow,
    poly_pow_charp,
)

__all__ = [
    "MeasureHandle",
    "BernoulliMeasure",
    "SubgroupHaarMeasure",
    "CosetHaarMeasure",
    "ExactWordMeasure",
    "TransformedMeasure",
    "uniform_bernoulli",
    "bernoulli",
    "kernel_haar",
    "coset_haar",
    "point_mass",
    "pushforward",
    "FourierResult",
    "fourier",
    "HaarVerdict",
    "haar_criterion",
    "MixingResult",
    "mixing_statistic",
    "block_entropy",
    "RigidityReport",
    "rigidity_experiment",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 1 << 20
EXACT_TOL = 1e-9


class MeasureHandle:
    """Base interface; see module docstring for the exact/sampled split."""

    module: ModuleSpec
    window: WindowSpec
    mode: str
    label: str
    seed: int
    provenance: tuple

    is_exact = False

    def _init_common(self, module, window, mode, label, seed, provenance=()):
        self.module = module
        self.window = window
        self.mode = mode
        self.label = label
        self.seed = int(seed)
        self.provenance = tuple(provenance)

    # exact interface ------------------------------------------------------
    def cylinder_probability(self, pins: dict) -> Fraction:
        raise InvalidParameterError(f"{self.label}: no exact cylinder probabilities")

    def fourier_root_sum(self, chi: CharacterSpec):
        return None

    def enumerate_words(self, limit: int = ENUMERATION_CAP):
        raise ResourceLimitError(f"{self.label}: not enumerable", required=-1)

    def entropy_bits_per_site(self, site_indices) -> float:
        raise InvalidParameterError(f"{self.label}: no exact entropy")

    # sampled interface ------------------------------------------------------
    def draw_values(self, start: int, count: int, site_indices=None) -> np.ndarray:
        """(count, n_selected_sites, rank) ring codes for draws [start, start+count)."""
        raise NotImplementedError

    def draw(self, index: int) -> WindowConfig:
        vals = self.draw_values(index, 1)[0]
        return WindowConfig(
            self.window,
            self.module,
            vals.reshape(self.window.extents + (self.module.rank,)),
            self.mode,
        )

    # bookkeeping ------------------------------------------------------------
    def _site_selection(self, site_indices):
        if site_indices is None:
            return np.arange(self.window.n_sites, dtype=np.int64)
        return np.asarray(site_indices, dtype=np.int64)

    def site_index(self, site) -> int:
        return self.window.index_of(site)

    def describe(self) -> dict:
        return {
            "kind": type(self).__name__,
            "label": self.label,
            "window": str(self.window),
            "module": f"{self.module.ring.descriptor()}^{self.module.rank}",
            "mode": self.mode,
            "seed": self.seed,
            "exact": self.is_exact,
            "provenance": list(self.provenance),
        }

    def derived(self, note: str):
        return self.provenance + (note,)


def _merge_pins(pin_dicts):
    """Union of pin dicts; None signals a conflicting (empty) intersection."""
    merged = {}
    for pins in pin_dicts:
        for site, val in pins.items():
            if site in merged and merged[site] != val:
                return None
            merged[site] = val
    return merged


def _pins_from_word(word: WindowConfig, translation=None):
    out = {}
    for site in word.window.sites():
        t = site if translation is None else tuple(
            s + v for s, v in zip(site, translation)
        )
        out[t] = word.value_at(site)
    return out


class BernoulliMeasure(MeasureHandle):
    """I.i.d. site values with a shared distribution over module codes."""

    is_exact = True

    def __init__(self, module, window, probs, seed=0, mode="exact", label="bernoulli", provenance=()):
        probs = tuple(Fraction(p) for p in probs)
        if len(probs) != module.size:
            raise InvalidParameterError("need one probability per module code")
        if sum(probs) != 1 or any(p < 0 for p in probs):
            raise InvalidParameterError("probabilities must be nonnegative and sum to 1")
        self.probs = probs
        self._init_common(module, window, mode, label, seed, provenance)
        self._uniform = all(p == probs[0] for p in probs)
        self._thresholds = None if self._uniform else cdf_thresholds(probs)
        self._rng = CounterRng(self.seed, stream=1)

    @property
    def is_uniform(self):
        return self._uniform

    def cylinder_probability(self, pins):
        out = Fraction(1)
        for site, val in pins.items():
            if not self.window.contains_site(site):
                raise OutOfWindowError(f"pin site {site} outside {self.window}")
            out *= self.probs[self.module.encode(val)]
        return out

    def fourier_root_sum(self, chi):
        ring = self.module.ring
        L = ring.char_exponent
        out = RootSum.one(L)
        for site, dual in chi.duals:
            if not self.window.contains_site(site):
                raise OutOfWindowError(f"character site {site} outside {self.window}")
            site_sum = RootSum.zero(L)
            for code, p in enumerate(self.probs):
                if not p:
                    continue
                val = self.module.decode(code)
                e = sum(ring.pair_exponent(d, a) for d, a in zip(dual, val)) % L
                site_sum.add_weight(e, p)
            out = out * site_sum
        return out

    def enumerate_words(self, limit=ENUMERATION_CAP):
        n = self.window.n_sites
        total = self.module.size**n
        if total > limit:
            raise ResourceLimitError(
                f"Bernoulli enumeration of {total} words exceeds cap {limit}",
                required=total,
            )
        support = [c for c, p in enumerate(self.probs) if p]
        from itertools import product as iter_product

        for combo in iter_product(support, repeat=n):
            p = Fraction(1)
            for c in combo:
                p *= self.probs[c]
            vals = self.module.unpack_arr(np.array(combo, dtype=np.int64)).reshape(
                n, self.module.rank
            )
            yield vals, p

    def entropy_bits_per_site(self, site_indices):
        h = 0.0
        for p in self.probs:
            if p:
                h -= float(p) * math.log2(float(p))
        return h

    def draw_values(self, start, count, site_indices=None):
        sel = self._site_selection(site_indices)
        n = self.window.n_sites
        counters = (
            (np.arange(start, start + count, dtype=np.uint64)[:, None]) * np.uint64(n)
            + sel.astype(np.uint64)[None, :]
        )
        raw = self._rng.uint64(counters)
        if self._uniform:
            codes = (raw % np.uint64(self.module.size)).astype(np.int64)
        else:
            codes = np.searchsorted(self._thresholds, raw, side="right").astype(np.int64)
        return self.module.unpack_arr(codes)


@dataclass(frozen=True)
class _FieldSpan:
    """Echelonized F_q span of module-valued window vectors (one prime part)."""

    ring: Ring
    basis: np.ndarray  # (nb, n_sites * rank), RREF rows, read-only

    @property
    def dim(self):
        return self.basis.shape[0]


def _echelonize(ring, rows, nvars):
    if rows.size == 0:
        return np.zeros((0, nvars), dtype=np.int64)
    rref, pivots = linalg.rref(np.asarray(rows, dtype=np.int64), ring)
    return rref[: len(pivots)].copy()


class SubgroupHaarMeasure(MeasureHandle):
    """Uniform measure on a subgroup of module words over a window.

    The subgroup is held as one echelonized span per prime component of the
    characteristic (a single span when the ring is a field).  Canonical RREF
    bases make equality of distributions a plain array comparison.
    """

    is_exact = True

    def __init__(self, module, window, spans, decomposition=None, seed=0, mode="exact",
                 label="subgroup-haar", provenance=(), kernel_spec=None):
        self._init_common(module, window, mode, label, seed, provenance)
        self.spans = tuple(spans)
        self.decomposition = decomposition
        self.kernel_spec = kernel_spec
        for span in self.spans:
            span.basis.setflags(write=False)
        self._rng = [CounterRng(self.seed, stream=31 + i) for i in range(len(self.spans))]

    # constructors ---------------------------------------------------------
    @staticmethod
    def full_space(module, window, seed=0, mode="exact", label="uniform"):
        nvars = window.n_sites * module.rank
        ring = module.ring
        if ring.is_field:
            spans = (_FieldSpan(ring, np.eye(nvars, dtype=np.int64)),)
            deco = None
        else:
            from . import crt

            deco = crt.decompose_ring(ring)
            spans = tuple(
                _FieldSpan(r, np.eye(nvars, dtype=np.int64) * r.one)
                for r in deco.component_rings
            )
            for r in deco.component_rings:
                if not r.is_field:
                    raise InvalidParameterError(
                        "full-space Haar over non-squarefree characteristic unsupported"
                    )
        return SubgroupHaarMeasure(module, window, spans, deco, seed, mode, label)

    @staticmethod
    def from_window_basis(basis: WindowBasis, seed=0, mode="exact", label=None):
        module = basis.module
        rank = module.rank
        n_sites = basis.window.n_sites
        nvars = n_sites * rank
        spans = []
        for ring, scalar_basis, _ in basis.components:
            nb = scalar_basis.shape[0]
            rows = np.zeros((nb * rank, nvars), dtype=np.int64)
            for i in range(nb):
                for c in range(rank):
                    rows[i * rank + c, c::rank] = scalar_basis[i]
            spans.append(_FieldSpan(ring, _echelonize(ring, rows, nvars)))
        return SubgroupHaarMeasure(
            module,
            basis.window,
            spans,
            basis.decomposition,
            seed,
            mode,
            label or f"kernel-haar[{basis.spec.label}]",
            kernel_spec=basis.spec,
        )

    # structure --------------------------------------------------------------
    @property
    def log_sizes(self):
        return tuple((span.ring.size, span.dim) for span in self.spans)

    def subgroup_size(self) -> int:
        out = 1
        for span in self.spans:
            out *= span.ring.size**span.dim
        return out

    def same_distribution(self, other: "SubgroupHaarMeasure") -> bool:
        if self.window != other.window or self.module != other.module:
            return False
        if len(self.spans) != len(other.spans):
            return False
        return all(
            a.ring == b.ring and np.array_equal(a.basis, b.basis)
            for a, b in zip(self.spans, other.spans)
        )

    def marginal(self, sub_window: WindowSpec) -> "SubgroupHaarMeasure":
        """Exact marginal on a sub-window (projection of a subgroup is a subgroup)."""
        if not self.window.contains_window(sub_window):
            raise OutOfWindowError(f"{sub_window} not inside {self.window}")
        rank = self.module.rank
        cols = []
        for site in sub_window.sites():
            base = self.window.index_of(site) * rank
            cols.extend(range(base, base + rank))
        cols = np.array(cols, dtype=np.int64)
        nvars = len(cols)
        spans = [
            _FieldSpan(span.ring, _echelonize(span.ring, span.basis[:, cols], nvars))
            for span in self.spans
        ]
        return SubgroupHaarMeasure(
            self.module, sub_window, spans, self.decomposition,
            seed=self.seed, mode=self.mode, label=self.label,
            provenance=self.derived(f"marginal on {sub_window}"),
        )

    def _component_targets(self, values_by_var, span_index):
        """Map source-ring codes (per var) into the span's field codes."""
        if self.decomposition is None:
            return np.asarray(values_by_var, dtype=np.int64)
        fwd = self.decomposition.forward_table
        return fwd[np.asarray(values_by_var, dtype=np.int64), span_index]

    def merged_generators(self):
        """Subgroup generators as source-ring code vectors (g, nvars)."""
        gens = []
        for si, span in enumerate(self.spans):
            for row in span.basis:
                if self.decomposition is None:
                    gens.append(row)
                else:
                    comps = [
                        np.zeros_like(row) for _ in range(len(self.spans))
                    ]
                    comps[si] = row
                    gens.append(self.decomposition.merge_arrays(comps))
        return gens

    # exact interface ----------------------------------------------------------
    def _pin_vars(self, pins):
        rank = self.module.rank
        cols = []
        vals = []
        for site, val in pins.items():
            if not self.window.contains_site(site):
                raise OutOfWindowError(f"pin site {site} outside {self.window}")
            base = self.window.index_of(site) * rank
            for c in range(rank):
                cols.append(base + c)
                vals.append(val[c])
        return np.array(cols, dtype=np.int64), np.array(vals, dtype=np.int64)

    def cylinder_probability(self, pins):
        if not pins:
            return Fraction(1)
        cols, vals = self._pin_vars(pins)
        out = Fraction(1)
        for si, span in enumerate(self.spans):
            targets = self._component_targets(vals, si)
            A = span.basis[:, cols].T if span.dim else np.zeros((len(cols), 0), dtype=np.int64)
            solution, _ = linalg.solve_affine(A, targets, span.ring)
            if solution is None:
                return Fraction(0)
            r = linalg.rank(A, span.ring)
            out *= Fraction(1, span.ring.size**r)
        return out

    def contains_values(self, flat_values) -> bool:
        cols = np.arange(self.window.n_sites * self.module.rank, dtype=np.int64)
        return self.cylinder_probability_from_flat(flat_values, cols) > 0

    def cylinder_probability_from_flat(self, flat_values, cols):
        for si, span in enumerate(self.spans):
            targets = self._component_targets(np.asarray(flat_values, dtype=np.int64), si)
            A = span.basis[:, cols].T if span.dim else np.zeros((len(cols), 0), dtype=np.int64)
            solution, _ = linalg.solve_affine(A, targets, span.ring)
            if solution is None:
                return Fraction(0)
        return Fraction(1)

    def fourier_root_sum(self, chi):
        ring = self.module.ring
        L = ring.char_exponent
        rank = self.module.rank
        for gen in self.merged_generators():
            total = 0
            for site, dual in chi.duals:
                if not self.window.contains_site(site):
                    raise OutOfWindowError(f"character site {site} outside {self.window}")
                base = self.window.index_of(site) * rank
                for c, d in enumerate(dual):
                    total += ring.pair_exponent(d, int(gen[base + c]))
            if total % L:
                return RootSum.zero(L)
        return RootSum.one(L)

    def enumerate_words(self, limit=ENUMERATION_CAP):
        total = self.subgroup_size()
        if total > limit:
            raise ResourceLimitError(
                f"subgroup of size {total} exceeds enumeration cap {limit}",
                required=total,
            )
        rank = self.module.rank
        n_sites = self.window.n_sites
        p = Fraction(1, total)
        per_span = []
        for span in self.spans:
            q = span.ring.size
            nb = span.dim
            count = q**nb
            codes = np.zeros((count, nb), dtype=np.int64)
            idx = np.arange(count)
            for v in range(nb):
                codes[:, v] = (idx // q**v) % q
            if nb:
                if span.ring.kind == "zmod":
                    vals = (codes @ span.basis) % q
                else:
                    vals = np.zeros((count, span.basis.shape[1]), dtype=np.int64)
                    for i in range(nb):
                        vals = span.ring.add_arr(
                            vals, span.ring.mul_arr(codes[:, i][:, None], span.basis[i][None, :])
                        )
            else:
                vals = np.zeros((1, n_sites * rank), dtype=np.int64)
            per_span.append(vals)
        if self.decomposition is None:
            merged = per_span[0]
        else:
            sizes = [v.shape[0] for v in per_span]
            grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
            flat = [g.ravel() for g in grids]
            merged = self.decomposition.merge_arrays(
                [v[f] for v, f in zip(per_span, flat)]
            )
        for i in range(merged.shape[0]):
            yield merged[i].reshape(n_sites, rank), p

    def entropy_bits_per_site(self, site_indices):
        rank = self.module.rank
        sel = self._site_selection(site_indices)
        cols = np.concatenate([sel * rank + c for c in range(rank)]) if rank > 1 else sel * rank
        cols = np.sort(cols)
        bits = 0.0
        for span in self.spans:
            sub = span.basis[:, cols] if span.dim else np.zeros((0, len(cols)), dtype=np.int64)
            r = linalg.row_span_rank(sub, span.ring)
            bits += r * math.log2(span.ring.size)
        return bits / len(sel)

    # sampled interface ----------------------------------------------------------
    def draw_values(self, start, count, site_indices=None):
        rank = self.module.rank
        n_sites = self.window.n_sites
        sel = self._site_selection(site_indices)
        comp_vals = []
        for si, span in enumerate(self.spans):
            nb = span.dim
            q = span.ring.size
            if nb:
                coefs = self._rng[si].uniform_codes(start * nb, (count, nb), q)
                if span.ring.kind == "zmod":
                    flat = (coefs @ span.basis) % q
                else:
                    flat = np.zeros((count, span.basis.shape[1]), dtype=np.int64)
                    for i in range(nb):
                        flat = span.ring.add_arr(
                            flat, span.ring.mul_arr(coefs[:, i][:, None], span.basis[i][None, :])
                        )
            else:
                flat = np.zeros((count, n_sites * rank), dtype=np.int64)
            comp_vals.append(flat)
        if self.decomposition is None:
            merged = comp_vals[0]
        else:
            merged = self.decomposition.merge_arrays(comp_vals)
        vals = merged.reshape(count, n_sites, rank)
        return vals[:, sel, :]


class CosetHaarMeasure(MeasureHandle):
    """Translate of a subgroup Haar measure by a coset representative."""

    is_exact = True

    def __init__(self, rep: WindowConfig, subgroup: SubgroupHaarMeasure, label=None, provenance=()):
        if rep.window != subgroup.window:
            raise InvalidParameterError("representative window != subgroup window")
        rep.module.check_same(subgroup.module)
        self.rep = rep
        self.subgroup = subgroup
        self._init_common(
            subgroup.module,
            subgroup.window,
            subgroup.mode,
            label or f"coset[{subgroup.label}]",
            subgroup.seed,
            provenance,
        )

    def _shift_pins(self, pins):
        ring = self.module.ring
        out = {}
        for site, val in pins.items():
            rep_val = self.rep.value_at(site)
            out[site] = tuple(
                ring.sub(v, r) for v, r in zip(val, rep_val)
            )
        return out

    def cylinder_probability(self, pins):
        return self.subgroup.cylinder_probability(self._shift_pins(pins))

    def fourier_root_sum(self, chi):
        base = self.subgroup.fourier_root_sum(chi)
        e = chi.exponent_of_config(self.rep)
        return RootSum.monomial(base.L, e) * base

    def enumerate_words(self, limit=ENUMERATION_CAP):
        ring = self.module.ring
        rep_flat = self.rep.flat()
        for vals, p in self.subgroup.enumerate_words(limit):
            yield ring.add_arr(vals, rep_flat), p

    def entropy_bits_per_site(self, site_indices):
        return self.subgroup.entropy_bits_per_site(site_indices)

    def marginal(self, sub_window: WindowSpec) -> "CosetHaarMeasure":
        from .lattice import restrict_config

        return CosetHaarMeasure(
            restrict_config(self.rep, sub_window),
            self.subgroup.marginal(sub_window),
            label=self.label,
            provenance=self.derived(f"marginal on {sub_window}"),
        )

    def draw_values(self, start, count, site_indices=None):
        sel = self._site_selection(site_indices)
        base = self.subgroup.draw_values(start, count, sel)
        rep_sel = self.rep.flat()[sel]
        return self.module.ring.add_arr(base, rep_sel[None, :, :])


class ExactWordMeasure(MeasureHandle):
    """Explicit finite distribution over window words."""

    is_exact = True

    def __init__(self, module, window, word_probs, seed=0, mode="exact", label="exact", provenance=()):
        # word_probs: iterable of (values (n_sites, rank) ndarray, Fraction)
        items = []
        for vals, p in word_probs:
            vals = np.ascontiguousarray(vals, dtype=np.int64)
            items.append((vals.tobytes(), vals, Fraction(p)))
        items.sort(key=lambda kvp: kvp[0])
        merged = []
        for key, vals, p in items:
            if merged and merged[-1][0] == key:
                merged[-1] = (key, vals, merged[-1][2] + p)
            else:
                merged.append((key, vals, p))
        total = sum((p for _, _, p in merged), start=Fraction(0))
        if total != 1:
            raise InvalidParameterError(f"probabilities sum to {total}, not 1")
        self.words = [(vals, p) for _, vals, p in merged if p]
        self._index = {vals.tobytes(): i for i, (vals, _) in enumerate(self.words)}
        self._init_common(module, window, mode, label, seed, provenance)
        self._thresholds = cdf_thresholds([p for _, p in self.words])
        self._rng = CounterRng(self.seed, stream=3)

    @staticmethod
    def from_config(config: WindowConfig, seed=0, label="point-mass"):
        return ExactWordMeasure(
            config.module,
            config.window,
            [(config.flat(), Fraction(1))],
            seed=seed,
            mode=config.mode,
            label=label,
        )

    def cylinder_probability(self, pins):
        rank = self.module.rank
        cols = []
        vals = []
        for site, val in pins.items():
            if not self.window.contains_site(site):
                raise OutOfWindowError(f"pin site {site} outside {self.window}")
            cols.append(self.window.index_of(site))
            vals.append(val)
        out = Fraction(0)
        for word, p in self.words:
            if all(tuple(word[c]) == tuple(v) for c, v in zip(cols, vals)):
                out += p
        return out

    def fourier_root_sum(self, chi):
        L = self.module.ring.char_exponent
        out = RootSum.zero(L)
        for word, p in self.words:
            cfg = WindowConfig(
                self.window, self.module,
                word.reshape(self.window.extents + (self.module.rank,)), self.mode,
            )
            out.add_weight(chi.exponent_of_config(cfg), p)
        return out

    def enumerate_words(self, limit=ENUMERATION_CAP):
        if len(self.words) > limit:
            raise ResourceLimitError("word list exceeds cap", required=len(self.words))
        for word, p in self.words:
            yield word, p

    def entropy_bits_per_site(self, site_indices):
        sel = self._site_selection(site_indices)
        agg = {}
        for word, p in self.words:
            key = word[sel].tobytes()
            agg[key] = agg.get(key, Fraction(0)) + p
        h = 0.0
        for p in agg.values():
            if p:
                h -= float(p) * math.log2(float(p))
        return h / len(sel)

    def draw_values(self, start, count, site_indices=None):
        sel = self._site_selection(site_indices)
        idx = self._rng.uniform_from_cdf(start, (count,), self._thresholds)
        stacked = np.stack([self.words[i][0] for i in range(len(self.words))])
        return stacked[idx][:, sel, :]


class TransformedMeasure(MeasureHandle):
    """Sampled pushforward: draws are a vectorized transform of source draws."""

    is_exact = False

    def __init__(self, source, transform, window, module, label, provenance=()):
        # transform: (count, *source_extents, rank) -> (count, *extents, rank)
        self.source = source
        self.transform = transform
        self._init_common(module, window, source.mode, label, source.seed, provenance)

    def draw_values(self, start, count, site_indices=None):
        sel = self._site_selection(site_indices)
        src = self.source.draw_values(start, count)
        src = src.reshape((count,) + self.source.window.extents + (self.source.module.rank,))
        out = self.transform(src)
        flat = out.reshape(count, self.window.n_sites, self.module.rank)
        return flat[:, sel, :]


# -- factory helpers ----------------------------------------------------------


def uniform_bernoulli(module, window, seed=0, mode="exact") -> BernoulliMeasure:
    p = Fraction(1, module.size)
    return BernoulliMeasure(
        module, window, [p] * module.size, seed=seed, mode=mode, label="uniform-bernoulli"
    )


def bernoulli(module, window, probs, seed=0, mode="exact") -> BernoulliMeasure:
    return BernoulliMeasure(module, window, probs, seed=seed, mode=mode, label="bernoulli")


def kernel_haar(spec: KernelShiftSpec, window: WindowSpec, seed=0, mode="exact") -> SubgroupHaarMeasure:
    basis = window_kernel(spec, window)
    return SubgroupHaarMeasure.from_window_basis(basis, seed=seed, mode=mode)


def coset_haar(rep: WindowConfig, spec: KernelShiftSpec, seed=0, mode="exact") -> CosetHaarMeasure:
    if not coset_shift_check(rep, spec):
        raise InvalidCosetError(
            "representative fails the coset-shift condition (a coboundary leaves the kernel)"
        )
    sub = kernel_haar(spec, rep.window, seed=seed, mode=mode)
    return CosetHaarMeasure(rep, sub)


def point_mass(config: WindowConfig, seed=0) -> ExactWordMeasure:
    return ExactWordMeasure.from_config(config, seed=seed)


# -- pushforward ----------------------------------------------------------------


def _power_poly(rule: LocalRule, t: int) -> ShiftPolynomial:
    f = from_rule(rule)
    if t == 0:
        return poly_pow(f, 0)
    if is_prime(rule.ring.characteristic):
        return poly_pow_charp(f, t)
    return poly_pow(f, t)


def _apply_poly_batch(poly: ShiftPolynomial, window: WindowSpec, values: np.ndarray, mode: str, ring):
    """Batched apply: values (count, *extents, rank) -> (window', values')."""
    axes = window.axes
    spatial = tuple(range(1, 1 + axes))
    if mode == "torus":
        out = None
        for off, c in poly.terms:
            rolled = np.roll(values, tuple(-x for x in off), axis=spatial)
            contrib = ring.mul_arr(np.int64(c), rolled)
            out = contrib if out is None else ring.add_arr(out, contrib)
        if out is None:
            out = np.zeros_like(values)
        return window, out
    from .shiftpoly import apply_poly

    # Exact mode: derive the output window once via a probe, then slice batched.
    probe = WindowConfig(
        window,
        ModuleSpec(ring, values.shape[-1]),
        values[0],
        "exact",
    )
    out_probe = apply_poly(poly, probe)
    out_window = out_probe.window
    out = None
    for off, c in poly.terms:
        src = out_window.translate(off)
        slc = (slice(None),) + window.relative_slices(src) + (slice(None),)
        contrib = ring.mul_arr(np.int64(c), values[slc])
        out = contrib if out is None else ring.add_arr(out, contrib)
    if out is None:
        out = np.zeros((values.shape[0],) + out_window.extents + (values.shape[-1],), dtype=np.int64)
    return out_window, out


def _transform_span(span: _FieldSpan, poly, window, rank, comp_ring):
    vals = span.basis.reshape(span.dim, window.n_sites, rank)
    vals = vals.reshape((span.dim,) + window.extents + (rank,))
    if span.dim == 0:
        vals = np.zeros((1,) + window.extents + (rank,), dtype=np.int64)
    out_window, out_vals = _apply_poly_batch(poly, window, vals, "exact", comp_ring)
    nvars = out_window.n_sites * rank
    rows = out_vals.reshape(-1, nvars)[: span.dim]
    return out_window, _FieldSpan(comp_ring, _echelonize(comp_ring, rows, nvars))


def pushforward(mu: MeasureHandle, rule: LocalRule, t: int, limit: int = ENUMERATION_CAP) -> MeasureHandle:
    """Distribution of t rule applications of draws from mu.

    t = 0 returns mu itself.  Subgroup and coset Haar handles transform
    exactly at any size; other exact handles push by enumeration when within
    `limit`; everything else becomes a sampled handle using the fast
    (base-p Frobenius) polynomial power.
    """
    if t < 0:
        raise InvalidParameterError(f"t must be >= 0, got {t}")
    if t == 0:
        return mu
    rule.module.check_same(mu.module)
    poly = _power_poly(rule, t)
    note = f"pushforward by {rule.offsets}/{rule.coeffs}, t={t}"

    source = mu
    if isinstance(source, BernoulliMeasure) and source.is_uniform and source.mode == "exact":
        source = SubgroupHaarMeasure.full_space(
            mu.module, mu.window, seed=mu.seed, mode=mu.mode, label=mu.label
        )
    if isinstance(source, SubgroupHaarMeasure) and source.mode == "exact":
        new_spans = []
        out_window = None
        for si, span in enumerate(source.spans):
            if source.decomposition is None:
                comp_poly = poly
            else:
                from . import crt

                comp_rule = crt.component_rule(rule, source.decomposition, si)
                comp_poly = _power_poly(comp_rule, t)
            w, new_span = _transform_span(span, comp_poly, source.window, mu.module.rank, span.ring)
            out_window = w
            new_spans.append(new_span)
        return SubgroupHaarMeasure(
            mu.module,
            out_window,
            new_spans,
            source.decomposition,
            seed=mu.seed,
            mode=mu.mode,
            label=mu.label,
            provenance=mu.derived(note),
        )
    if isinstance(source, CosetHaarMeasure) and source.mode == "exact":
        sub = pushforward(source.subgroup, rule, t, limit)
        rep_vals = source.rep.values[None, ...]
        out_window, rep_out = _apply_poly_batch(poly, source.window, rep_vals, "exact", rule.ring)
        rep_cfg = WindowConfig(out_window, mu.module, rep_out[0], "exact")
        return CosetHaarMeasure(rep_cfg, sub, label=mu.label, provenance=mu.derived(note))
    if mu.is_exact:
        try:
            words = list(mu.enumerate_words(limit))
        except ResourceLimitError:
            words = None
        if words is not None:
            pushed = []
            out_window = None
            for vals, p in words:
                shaped = vals.reshape((1,) + mu.window.extents + (mu.module.rank,))
                out_window, out_vals = _apply_poly_batch(poly, mu.window, shaped, mu.mode, rule.ring)
                pushed.append((out_vals[0].reshape(-1, mu.module.rank), p))
            return ExactWordMeasure(
                mu.module, out_window, pushed, seed=mu.seed, mode=mu.mode,
                label=mu.label, provenance=mu.derived(note),
            )
    # sampled fallback
    def transform(batch):
        _, out = _apply_poly_batch(poly, mu.window, batch, mu.mode, rule.ring)
        return out

    if mu.mode == "torus":
        out_window = mu.window
    else:
        probe = np.zeros((1,) + mu.window.extents + (mu.module.rank,), dtype=np.int64)
        out_window, _ = _apply_poly_batch(poly, mu.window, probe, "exact", rule.ring)
    return TransformedMeasure(
        mu, transform, out_window, mu.module,
        label=f"{mu.label}->t{t}", provenance=mu.derived(note),
    )


# -- Fourier -----------------------------------------------------------------


@dataclass
class FourierResult:
    chi: CharacterSpec
    value: complex
    stderr: float
    root_sum: RootSum | None = None
    n_samples: int | None = None

    @property
    def is_exact(self):
        return self.root_sum is not None

    @property
    def modulus(self):
        return abs(self.value)

    def row(self, **extra) -> dict:
        out = {
            "chi": format_character(self.chi),
            "re": self.value.real,
            "im": self.value.imag,
            "modulus": self.modulus,
            "stderr": self.stderr,
            "exact": self.is_exact,
        }
        out.update(extra)
        return out


def fourier(mu: MeasureHandle, chi: CharacterSpec, budget="exact", start: int = 0) -> FourierResult:
    """Integral of the character against the measure.

    budget='exact' uses the handle's exact path (or enumeration); an integer
    budget estimates from that many reproducible draws with stderr 1/sqrt(N).
    """
    for site in chi.sites():
        if not mu.window.contains_site(site):
            raise OutOfWindowError(f"character site {site} outside measure window")
    if budget == "exact":
        rs = mu.fourier_root_sum(chi)
        if rs is None:
            if mu.is_exact:
                L = mu.module.ring.char_exponent
                rs = RootSum.zero(L)
                for vals, p in mu.enumerate_words():
                    cfg = WindowConfig(
                        mu.window, mu.module,
                        vals.reshape(mu.window.extents + (mu.module.rank,)), mu.mode,
                    )
                    rs.add_weight(chi.exponent_of_config(cfg), p)
            else:
                raise InvalidParameterError(
                    f"{mu.label} has no exact Fourier path; pass a sample budget"
                )
        return FourierResult(chi, rs.to_complex(), 0.0, root_sum=rs)
    n = int(budget)
    if n < 1:
        raise InvalidParameterError(f"sample budget must be >= 1, got {budget}")
    sites = chi.sites()
    if sites:
        sel = [mu.window.index_of(s) for s in sites]
        positions = {s: i for i, s in enumerate(sites)}
        draws = mu.draw_values(start, n, sel)
        exps = chi.exponents_of_values(draws, positions)
    else:
        exps = np.zeros(n, dtype=np.int64)
    L = chi.order
    angles = 2.0 * np.pi * exps.astype(np.float64) / L
    value = complex(np.mean(np.cos(angles)), np.mean(np.sin(angles)))
    return FourierResult(chi, value, 1.0 / math.sqrt(n), n_samples=n)


@dataclass
class HaarVerdict:
    consistent: bool
    criterion: str
    n_checked: int
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "consistent": self.consistent,
            "criterion": self.criterion,
            "n_checked": self.n_checked,
            "violations": self.violations,
        }


def haar_criterion(results, criterion="subgroup", tol=EXACT_TOL) -> HaarVerdict:
    """Check a Fourier sweep for the subgroup-Haar signature.

    criterion='subgroup' demands every coefficient be 0 or 1; 'coset' demands
    every modulus be 0 or 1.  Exact results are tested exactly; sampled ones
    within max(tol, 4*stderr).  The trivial character must be present.
    """
    results = list(results)
    if not any(r.chi.is_trivial for r in results):
        raise MissingTrivialCharacterError("sweep does not include the trivial character")
    violations = []
    for r in results:
        if r.is_exact:
            if criterion == "subgroup":
                ok = r.root_sum.is_zero() or r.root_sum.is_one()
            else:
                ok = r.root_sum.modulus_is_zero() or r.root_sum.modulus_is_one()
        else:
            v = abs(r.value) if criterion == "coset" else r.value
            dist = min(abs(v - 0.0), abs(v - 1.0))
            ok = dist <= max(tol, 4.0 * r.stderr)
        if r.chi.is_trivial:
            if r.is_exact:
                ok = ok and r.root_sum.is_one()
            else:
                ok = ok and abs(r.value - 1.0) <= max(tol, 4.0 * r.stderr)
        if not ok:
            violations.append(r.row())
    return HaarVerdict(not violations, criterion, len(results), violations)


# -- mixing -----------------------------------------------------------------


@dataclass
class MixingResult:
    n: int
    observed: float
    product: float
    deviation: float
    stderr: float
    exact: bool
    observed_fraction: Fraction | None = None
    product_fraction: Fraction | None = None

    def row(self, **extra):
        out = {
            "n": self.n,
            "observed": self.observed,
            "product": self.product,
            "deviation": self.deviation,
            "stderr": self.stderr,
            "exact": self.exact,
        }
        out.update(extra)
        return out


def mixing_statistic(mu: MeasureHandle, pairs, n: int, budget="exact", start: int = 0) -> MixingResult:
    """Joint cylinder probability at separation n against the marginal product.

    `pairs` is a list of (offset h, word); the joint event pins every word on
    its window translated by n*h, the marginals pin the untranslated words.
    """
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n}")
    marg_pins = []
    trans_pins = []
    for h, word in pairs:
        mu.module.check_same(word.module)
        v = tuple(int(n) * int(x) for x in h)
        marg_pins.append(_pins_from_word(word))
        trans_pins.append(_pins_from_word(word, v))
    for pins in marg_pins + trans_pins:
        for site in pins:
            if not mu.window.contains_site(site):
                raise OutOfWindowError(
                    f"translated window site {site} exceeds measure window {mu.window}"
                )
    joint = _merge_pins(trans_pins)
    if budget == "exact":
        if not mu.is_exact:
            raise InvalidParameterError(f"{mu.label} has no exact mixing path")
        observed = mu.cylinder_probability(joint) if joint is not None else Fraction(0)
        product = Fraction(1)
        for pins in marg_pins:
            product *= mu.cylinder_probability(pins)
        dev = observed - product
        return MixingResult(
            n, float(observed), float(product), float(dev), 0.0, True, observed, product
        )
    count = int(budget)
    needed = sorted({site for pins in marg_pins + trans_pins for site in pins})
    sel = [mu.window.index_of(s) for s in needed]
    pos = {s: i for i, s in enumerate(needed)}
    draws = mu.draw_values(start, count, sel)

    def indicator(pins):
        ok = np.ones(count, dtype=bool)
        for site, val in pins.items():
            col = pos[site]
            for c, v in enumerate(val):
                ok &= draws[:, col, c] == v
        return ok

    if joint is None:
        obs_hat = 0.0
    else:
        obs_hat = float(np.mean(indicator(joint)))
    marg_hats = [float(np.mean(indicator(pins))) for pins in marg_pins]
    product_hat = float(np.prod(marg_hats))
    deviation = obs_hat - product_hat
    var = obs_hat * (1.0 - obs_hat) / count
    for i, ph in enumerate(marg_hats):
        others = product_hat / ph if ph > 0 else 0.0
        var += (others**2) * ph * (1.0 - ph) / count
    return MixingResult(n, obs_hat, product_hat, deviation, math.sqrt(var), False)


# -- entropy -----------------------------------------------------------------


def block_entropy(mu: MeasureHandle, block: WindowSpec, n_samples=None, start: int = 0) -> float:
    """Plug-in block entropy in bits per site.

    This is an empirical diagnostic of block frequencies, not the dynamical
    entropy; exact handles can compute the block marginal exactly by passing
    n_samples=None.
    """
    if not mu.window.contains_window(block):
        raise OutOfWindowError(f"block {block} not inside measure window {mu.window}")
    sel = [mu.window.index_of(s) for s in block.sites()]
    if n_samples is None:
        if not mu.is_exact:
            raise InvalidParameterError("sampled handle needs an explicit n_samples")
        return mu.entropy_bits_per_site(sel)
    draws = mu.draw_values(start, int(n_samples), sel)
    flat = draws.reshape(draws.shape[0], -1)
    _, counts = np.unique(flat, axis=0, return_counts=True)
    freqs = counts.astype(np.float64) / float(n_samples)
    h = float(-(freqs * np.log2(freqs)).sum())
    return h / len(sel)


# -- rigidity experiment ----------------------------------------------------


@dataclass
class RigidityReport:
    rule: dict
    measure: dict
    all_units: bool
    budget: object
    fourier_rows: list
    verdicts: list
    mixing_rows: list
    classification: str
    tested_scope: dict

    def to_dict(self):
        return {
            "rule": self.rule,
            "measure": self.measure,
            "all_units": self.all_units,
            "budget": self.budget if self.budget == "exact" else int(self.budget),
            "fourier": self.fourier_rows,
            "verdicts": self.verdicts,
            "mixing": self.mixing_rows,
            "classification": self.classification,
            "tested_scope": self.tested_scope,
        }


def default_t_schedule(ring: Ring):
    p = ring.characteristic
    base = [0, 1, 2, 4, 8]
    for extra in (p, p * p):
        if extra not in base:
            base.append(extra)
    return sorted(base)


DEFAULT_N_SCHEDULE = (1, 2, 4, 8, 16)


def rigidity_experiment(
    rule: LocalRule,
    mu0: MeasureHandle,
    characters,
    t_schedule=None,
    n_schedule=None,
    budget="exact",
    mixing_pairs=None,
    tol=EXACT_TOL,
) -> RigidityReport:
    """Fourier sweeps of pushforwards plus mixing deviations, classified.

    Gathers evidence that mu0 is (or is not) the Haar measure of an invariant
    coset shift: per-t sweeps must have all moduli in {0,1}, and mixing
    deviations at the largest tested n must vanish within tolerance.  The
    verdict is evidence at the tested scope only.
    """
    from .shiftpoly import format_rule

    characters = list(characters)
    t_schedule = list(t_schedule if t_schedule is not None else default_t_schedule(rule.ring))
    n_schedule = list(n_schedule if n_schedule is not None else DEFAULT_N_SCHEDULE)
    fourier_rows = []
    verdicts = []
    classification = "consistent-with-coset-haar"
    any_inconclusive = False
    for t in t_schedule:
        mu_t = pushforward(mu0, rule, t)
        results = []
        for chi_t in characters:
            use_budget = budget if (budget == "exact" and mu_t.is_exact) else (
                budget if budget != "exact" else 10000
            )
            r = fourier(mu_t, chi_t, use_budget)
            results.append(r)
            fourier_rows.append(r.row(t=t))
        verdict = haar_criterion(results, criterion="coset", tol=tol)
        verdicts.append({"t": t, **verdict.to_dict()})
        if not verdict.consistent:
            exact_violation = any(v["exact"] for v in verdict.violations)
            classification = "inconsistent" if exact_violation or budget == "exact" else classification
            if not exact_violation and budget != "exact":
                any_inconclusive = True
    mixing_rows = []
    if mixing_pairs:
        for n in n_schedule:
            res = mixing_statistic(mu0, mixing_pairs, n, budget)
            mixing_rows.append(res.row())
        final = mixing_rows[-1]
        slack = max(tol, 4.0 * final["stderr"])
        if abs(final["deviation"]) > slack:
            classification = "inconsistent"
    if classification != "inconsistent" and any_inconclusive:
        classification = "inconclusive"
    return RigidityReport(
        rule={"text": format_rule(rule)},
        measure=mu0.describe(),
        all_units=rule.all_units(),
        budget=budget,
        fourier_rows=fourier_rows,
        verdicts=verdicts,
        mixing_rows=mixing_rows,
        classification=classification,
        tested_scope={
            "t_schedule": t_schedule,
            "n_schedule": n_schedule if mixing_pairs else [],
            "n_characters": len(characters),
            "note": "finite window/schedule evidence only; no extrapolation claim",
        },
    )
