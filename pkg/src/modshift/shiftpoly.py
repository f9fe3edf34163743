"""The Laurent-polynomial-of-shifts calculus for linear cellular automata.

A local rule with neighbourhood offsets h and nonzero coefficients c_h acts as
``a -> sum_h c_h * shift(a, h)``; composing rules multiplies their polynomials,
and iterating t times raises to the t-th power.  Over a ring of prime
characteristic p, the p**k-th power collapses to one sparse pass:

    sum_h c_h**(p**k) * shift(a, p**k * h)

which this module exposes both as a structural identity on term maps
(`frobenius_power`) and as the fast path for large iteration counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigParseError,
    DomainExhaustedError,
    InvalidParameterError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)
from .lattice import WindowConfig, WindowSpec
from .rings import ModuleSpec, Ring, is_prime, parse_ring

__all__ = [
    "LocalRule",
    "ShiftPolynomial",
    "from_rule",
    "poly_mul",
    "poly_pow",
    "poly_pow_charp",
    "frobenius_power",
    "apply_poly",
    "parse_rule",
    "format_rule",
]


def _validate_offsets(offsets, dims):
    D, E = dims
    n = D + E
    seen = set()
    for h in offsets:
        h = tuple(int(x) for x in h)
        if len(h) != n:
            raise InvalidParameterError(f"offset {h} has arity {len(h)}, want {n}")
        if h in seen:
            raise InvalidParameterError(f"duplicate offset {h}")
        seen.add(h)
        for i in range(D, n):
            if h[i] < 0:
                raise InvalidParameterError(
                    f"offset {h} has negative N-axis component (axis {i})"
                )
    return [tuple(int(x) for x in h) for h in offsets]


@dataclass(frozen=True)
class LocalRule:
    """Finite neighbourhood plus one nonzero ring coefficient per offset."""

    module: ModuleSpec
    dims: tuple
    offsets: tuple
    coeffs: tuple

    def __post_init__(self):
        offs = _validate_offsets(self.offsets, self.dims)
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(offs) != len(coeffs):
            raise InvalidParameterError("offsets and coeffs length differ")
        if not offs:
            raise InvalidParameterError("neighbourhood must be nonempty")
        ring = self.module.ring
        for c in coeffs:
            if not 0 < c < ring.size:
                raise InvalidParameterError(f"coefficient {c} is zero or out of range")
        object.__setattr__(self, "offsets", tuple(offs))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def ring(self) -> Ring:
        return self.module.ring

    def apply(self, config: WindowConfig) -> WindowConfig:
        return apply_poly(from_rule(self), config)

    def all_units(self) -> bool:
        return all(self.ring.is_unit(c) for c in self.coeffs)


@dataclass(frozen=True)
class ShiftPolynomial:
    """Finitely supported offset -> nonzero coefficient map over a ring."""

    ring: Ring
    dims: tuple
    terms: tuple  # sorted tuple of (offset, coeff); canonical form

    @staticmethod
    def from_terms(ring, dims, mapping) -> "ShiftPolynomial":
        items = []
        for off, c in mapping.items() if isinstance(mapping, dict) else mapping:
            c = int(c)
            if c == 0:
                continue
            if not 0 < c < ring.size:
                raise InvalidParameterError(f"coefficient {c} out of range")
            items.append((tuple(int(x) for x in off), c))
        items.sort()
        for (a, _), (b, _) in zip(items, items[1:]):
            if a == b:
                raise InvalidParameterError(f"duplicate offset {a}")
        return ShiftPolynomial(ring, (int(dims[0]), int(dims[1])), tuple(items))

    @property
    def support(self):
        return tuple(off for off, _ in self.terms)

    def term_map(self) -> dict:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __mul__(self, other):
        return poly_mul(self, other)

    def __pow__(self, t):
        return poly_pow(self, t)

    def scaled_offsets(self, factor: int) -> "ShiftPolynomial":
        return ShiftPolynomial.from_terms(
            self.ring,
            self.dims,
            {tuple(factor * x for x in off): c for off, c in self.terms},
        )


def identity_poly(ring, dims) -> ShiftPolynomial:
    n = dims[0] + dims[1]
    return ShiftPolynomial.from_terms(ring, dims, {(0,) * n: ring.one})


def from_rule(rule: LocalRule) -> ShiftPolynomial:
    return ShiftPolynomial.from_terms(
        rule.ring, rule.dims, dict(zip(rule.offsets, rule.coeffs))
    )


def _terms_to_array(poly: ShiftPolynomial):
    """Dense coefficient box plus the box's minimum corner."""
    offs = np.array([off for off, _ in poly.terms], dtype=np.int64)
    lo = offs.min(axis=0)
    hi = offs.max(axis=0)
    shape = tuple((hi - lo + 1).tolist())
    box = np.zeros(shape, dtype=np.int64)
    for off, c in poly.terms:
        box[tuple(o - l for o, l in zip(off, lo.tolist()))] = c
    return box, tuple(lo.tolist())


def _array_to_terms(ring, dims, box, lo) -> ShiftPolynomial:
    nz = np.argwhere(box)
    mapping = {}
    for idx in nz:
        off = tuple(int(i + l) for i, l in zip(idx, lo))
        mapping[off] = int(box[tuple(idx)])
    return ShiftPolynomial.from_terms(ring, dims, mapping)


def poly_mul(a: ShiftPolynomial, b: ShiftPolynomial) -> ShiftPolynomial:
    """Product: convolution of term maps with ring-coefficient products."""
    if not isinstance(b, ShiftPolynomial):
        raise RingMismatchError(f"cannot multiply polynomial by {type(b).__name__}")
    if a.ring != b.ring:
        raise RingMismatchError("polynomial rings differ")
    if a.dims != b.dims:
        raise RingMismatchError("polynomial lattice dims differ")
    if a.is_zero or b.is_zero:
        return ShiftPolynomial.from_terms(a.ring, a.dims, {})
    box_a, lo_a = _terms_to_array(a)
    box_b, lo_b = _terms_to_array(b)
    box_c = a.ring.convolve_codes(box_a, box_b)
    lo_c = tuple(x + y for x, y in zip(lo_a, lo_b))
    return _array_to_terms(a.ring, a.dims, box_c, lo_c)


def poly_pow(f: ShiftPolynomial, t: int) -> ShiftPolynomial:
    """f**t by exponentiation-by-squaring (t >= 0; f**0 is the identity shift)."""
    if t < 0:
        raise InvalidParameterError(f"exponent must be >= 0, got {t}")
    result = identity_poly(f.ring, f.dims)
    base = f
    while t:
        if t & 1:
            result = poly_mul(result, base)
        base_needed = t > 1
        if base_needed:
            base = poly_mul(base, base)
        t >>= 1
    return result


def frobenius_power(rule: LocalRule, k: int) -> ShiftPolynomial:
    """The p**k-th power of the rule's polynomial, written directly.

    Requires prime characteristic p; the result is
    sum_h c_h**(p**k) at offset p**k * h, with no polynomial multiplication.
    It must (and does, structurally) equal poly_pow(from_rule(rule), p**k).
    """
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    ring = rule.ring
    p = ring.characteristic
    if not is_prime(p):
        raise UnsupportedCharacteristicError(
            f"characteristic {p} is not prime; Frobenius fast-forward unavailable"
        )
    q = p**k
    mapping = {}
    for off, c in zip(rule.offsets, rule.coeffs):
        mapping[tuple(q * x for x in off)] = ring.pow(c, q)
    return ShiftPolynomial.from_terms(ring, rule.dims, mapping)


def poly_pow_charp(f: ShiftPolynomial, t: int) -> ShiftPolynomial:
    """f**t over a prime-characteristic ring via base-p digits.

    Writes t = sum d_j p**j and multiplies the (sparse) p**j-th Frobenius
    images raised to their digits; for sparse f this needs O(|terms| * digits)
    term operations instead of repeated large convolutions.
    """
    p = f.ring.characteristic
    if not is_prime(p):
        raise UnsupportedCharacteristicError(
            f"characteristic {p} is not prime"
        )
    if t < 0:
        raise InvalidParameterError(f"exponent must be >= 0, got {t}")
    result = identity_poly(f.ring, f.dims)
    if f.is_zero:
        return result if t == 0 else ShiftPolynomial.from_terms(f.ring, f.dims, {})
    frob = f  # f**(p**j) at digit position j
    while t:
        d = t % p
        if d:
            small = poly_pow_naive_small(frob, d)
            result = poly_mul(result, small)
        t //= p
        if t:
            frob = ShiftPolynomial.from_terms(
                f.ring,
                f.dims,
                {
                    tuple(p * x for x in off): f.ring.pow(c, p)
                    for off, c in frob.terms
                },
            )
    return result


def poly_pow_naive_small(f: ShiftPolynomial, d: int) -> ShiftPolynomial:
    result = identity_poly(f.ring, f.dims)
    for _ in range(d):
        result = poly_mul(result, f)
    return result


def apply_poly(poly: ShiftPolynomial, config: WindowConfig) -> WindowConfig:
    """Evaluate the polynomial of shifts on a windowed configuration.

    Exact mode: the output window is every site whose full stencil stays inside
    the stored window (clipped to the lattice); torus mode wraps all axes.
    """
    if poly.ring != config.module.ring:
        raise RingMismatchError("polynomial/config ring mismatch")
    ring = config.module.ring
    n_axes = config.window.axes
    if poly.dims[0] + poly.dims[1] != n_axes:
        raise RingMismatchError("polynomial/config lattice arity mismatch")
    if config.mode == "torus":
        out = None
        for off, c in poly.terms:
            shifted = np.roll(
                config.values, tuple(-x for x in off), axis=tuple(range(n_axes))
            )
            contrib = ring.mul_arr(np.int64(c), shifted)
            out = contrib if out is None else ring.add_arr(out, contrib)
        if out is None:
            out = np.zeros_like(config.values)
        return config.with_values(out)

    if poly.is_zero:
        return config.with_values(np.zeros_like(config.values))
    offs = np.array([off for off, _ in poly.terms], dtype=np.int64)
    lo = offs.min(axis=0)
    hi = offs.max(axis=0)
    w = config.window
    out_origin = [o - int(l) for o, l in zip(w.origin, lo)]
    out_extents = [e - int(h - l) for e, h, l in zip(w.extents, hi, lo)]
    if any(e < 1 for e in out_extents):
        raise DomainExhaustedError(
            f"stencil span exceeds window extents {w.extents}"
        )
    D = w.dims[0]
    for i in range(D, n_axes):
        if out_origin[i] < 0:
            out_extents[i] += out_origin[i]
            out_origin[i] = 0
            if out_extents[i] < 1:
                raise DomainExhaustedError("output window left the lattice")
    out_window = WindowSpec(w.dims, tuple(out_origin), tuple(out_extents))
    out = None
    for off, c in poly.terms:
        src = out_window.translate(off)
        block = config.values[w.relative_slices(src)]
        contrib = ring.mul_arr(np.int64(c), block)
        out = contrib if out is None else ring.add_arr(out, contrib)
    return WindowConfig(out_window, config.module, out, config.mode)


def iterate_rule(rule: LocalRule, config: WindowConfig, t: int) -> WindowConfig:
    """t-fold naive application (the reference path for fast-forward checks)."""
    poly = from_rule(rule)
    out = config
    for _ in range(t):
        out = apply_poly(poly, out)
    return out


def format_rule(rule: LocalRule, prefix: str = "rule") -> str:
    terms = ";".join(
        "(" + ",".join(str(x) for x in off) + f"):{c}"
        for off, c in zip(rule.offsets, rule.coeffs)
    )
    return (
        f"{prefix} ring={rule.ring.descriptor()} rank={rule.module.rank} "
        f"dims={rule.dims[0]},{rule.dims[1]} H={terms}"
    )


def parse_rule(text: str, expect_prefix: str = "rule") -> LocalRule:
    """Parse the rule text format.

    ``<prefix> ring=<desc> rank=<n> [dims=D,E] H=(h11,..):c1;(..):c2;..``
    A missing dims field defaults to all-Z axes.
    """
    toks = text.strip().split()
    if not toks or toks[0] != expect_prefix:
        raise ConfigParseError(
            f"rule text must start with {expect_prefix!r}: {text!r}", line=1, column=1
        )
    fields = {}
    for tok in toks[1:]:
        if "=" not in tok:
            raise ConfigParseError(f"bad token {tok!r} in rule text", line=1)
        key, val = tok.split("=", 1)
        fields[key] = val
    for req in ("ring", "rank", "H"):
        if req not in fields:
            raise ConfigParseError(f"rule text missing {req}=", line=1)
    ring = parse_ring(fields["ring"])
    try:
        rank = int(fields["rank"])
    except ValueError:
        raise ConfigParseError(f"bad rank {fields['rank']!r}", line=1) from None
    module = ModuleSpec(ring, rank)
    offsets, coeffs = [], []
    for piece in fields["H"].split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if not piece.startswith("(") or "):" not in piece:
            raise ConfigParseError(f"bad H term {piece!r}", line=1)
        body, cstr = piece[1:].split("):", 1)
        try:
            off = tuple(int(x) for x in body.split(","))
            c = int(cstr)
        except ValueError:
            raise ConfigParseError(f"bad H term {piece!r}", line=1) from None
        offsets.append(off)
        coeffs.append(c)
    if not offsets:
        raise ConfigParseError("rule has empty neighbourhood", line=1)
    arity = len(offsets[0])
    if "dims" in fields:
        try:
            d_str, e_str = fields["dims"].split(",")
            dims = (int(d_str), int(e_str))
        except ValueError:
            raise ConfigParseError(f"bad dims {fields['dims']!r}", line=1) from None
    else:
        dims = (arity, 0)
    return LocalRule(module, dims, tuple(offsets), tuple(coeffs))
