"""Finite commutative rings and free modules over them.

Every ring element is encoded as a canonical nonnegative integer code:

* ``zmod:m``   -- residues 0..m-1;
* ``gf:p:k``   -- base-p digits of the polynomial representative, little-endian;
* ``prod:[..]``-- mixed-radix tuple code, first factor least significant.

All arithmetic is total over the code range, and every ring offers both scalar
(Python int) and vectorized (numpy int64 array) operations.  Rings are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from functools import reduce
from itertools import product as iter_product
from math import gcd

import numpy as np

from .errors import (
    InvalidParameterError,
    ReducibleModulusError,
    RingMismatchError,
    UnsupportedCharacteristicError,
)

__all__ = [
    "Ring",
    "ZmodRing",
    "GFRing",
    "ProductRing",
    "ModuleSpec",
    "make_ring",
    "parse_ring",
    "is_prime",
    "subring_closure",
    "stable_power_subring",
    "recurrent_power_sums",
    "GF_DEFAULT_MODULI",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


# Default irreducible moduli (little-endian coefficients, monic) used when a
# field is requested by order alone.  Chosen once and frozen for
# reproducibility; construction re-verifies irreducibility regardless.
GF_DEFAULT_MODULI = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (5, 4): (2, 0, 1, 0, 1),
}


class Ring:
    """Common interface; concrete rings fill in the arithmetic."""

    kind = "abstract"
    size: int
    characteristic: int
    one: int
    zero = 0

    # -- scalar arithmetic -------------------------------------------------
    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg(self, a: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            raise InvalidParameterError("negative exponent; use unit_inverse first")
        result = self.one
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def from_int(self, n: int) -> int:
        """The image of the integer n, i.e. n * 1 in this ring."""
        n %= self.characteristic
        result = self.zero
        addend = self.one
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return result

    # -- vectorized arithmetic (int64 code arrays) -------------------------
    def add_arr(self, a, b):
        raise NotImplementedError

    def neg_arr(self, a):
        raise NotImplementedError

    def mul_arr(self, a, b):
        raise NotImplementedError

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    # -- units --------------------------------------------------------------
    def unit_inverse(self, a: int):
        """Multiplicative inverse of a, or None when a is not a unit."""
        raise NotImplementedError

    def is_unit(self, a: int) -> bool:
        return self.unit_inverse(a) is not None

    def inverse(self, a: int) -> int:
        inv = self.unit_inverse(a)
        if inv is None:
            raise InvalidParameterError(f"{a} is not a unit in {self.descriptor()}")
        return inv

    # -- structure ----------------------------------------------------------
    def elements(self):
        return range(self.size)

    @property
    def is_field(self) -> bool:
        return False

    def descriptor(self) -> str:
        raise NotImplementedError

    # -- character pairing --------------------------------------------------
    # char_exponent L and pair_exponent(u, a) in Z/L define the self-duality
    # pairing used to build characters of the additive group.
    char_exponent: int

    def pair_exponent(self, u: int, a: int) -> int:
        raise NotImplementedError

    def pair_exponent_arr(self, u, a):
        raise NotImplementedError

    # -- convolution of coefficient arrays (see shiftpoly) -------------------
    def convolve_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Ring) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(self.descriptor())

    def __repr__(self):
        return f"<Ring {self.descriptor()}>"

    def check_same(self, other: "Ring"):
        if self != other:
            raise RingMismatchError(
                f"ring mismatch: {self.descriptor()} vs {other.descriptor()}"
            )


def _exact_convolve_int(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer convolution of nonnegative arrays via big-int packing.

    Both inputs are embedded in the output-shaped box, flattened C-order, and
    packed 64 bits per slot; the single big multiply then performs the full
    multi-dimensional convolution with no slot carries, provided every output
    value stays below 2**63 (asserted from an a priori bound).
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    out_shape = tuple(sa + sb - 1 for sa, sb in zip(a.shape, b.shape))
    amax = int(a.max(initial=0))
    bmax = int(b.max(initial=0))
    bound = amax * bmax * min(a.size, b.size)
    if bound >= 1 << 63:
        raise InvalidParameterError("convolution values would overflow packing")
    pa = np.zeros(out_shape, dtype=np.uint64)
    pb = np.zeros(out_shape, dtype=np.uint64)
    pa[tuple(slice(0, s) for s in a.shape)] = a.astype(np.uint64)
    pb[tuple(slice(0, s) for s in b.shape)] = b.astype(np.uint64)
    n = pa.size
    big_a = int.from_bytes(pa.astype("<u8").tobytes(), "little")
    big_b = int.from_bytes(pb.astype("<u8").tobytes(), "little")
    big_c = big_a * big_b
    buf = big_c.to_bytes(8 * n + 16, "little")
    flat = np.frombuffer(buf[: 8 * n], dtype="<u8")
    return flat.astype(np.int64).reshape(out_shape)


class ZmodRing(Ring):
    """The ring of integers modulo m."""

    kind = "zmod"

    def __init__(self, m: int):
        if m < 2:
            raise InvalidParameterError(f"zmod modulus must be >= 2, got {m}")
        if m > 1 << 16:
            raise InvalidParameterError(f"zmod modulus capped at 2**16, got {m}")
        self.m = m
        self.size = m
        self.characteristic = m
        self.one = 1 % m
        self.char_exponent = m

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def from_int(self, n):
        return n % self.m

    def add_arr(self, a, b):
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.m

    def neg_arr(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.m

    def mul_arr(self, a, b):
        return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.m

    def unit_inverse(self, a):
        a %= self.m
        if gcd(a, self.m) != 1:
            return None
        return pow(a, -1, self.m)

    @property
    def is_field(self):
        return is_prime(self.m)

    def descriptor(self):
        return f"zmod:{self.m}"

    def pair_exponent(self, u, a):
        return (u * a) % self.m

    def pair_exponent_arr(self, u, a):
        return (np.asarray(u, dtype=np.int64) * np.asarray(a, dtype=np.int64)) % self.m

    def convolve_codes(self, a, b):
        return _exact_convolve_int(a, b) % self.m


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(num, den, p):
    num = [x % p for x in num]
    den = _poly_trim([x % p for x in den])
    if not den:
        raise InvalidParameterError("division by zero polynomial")
    inv = pow(den[-1], -1, p)
    q = [0] * max(len(num) - len(den) + 1, 0)
    num = _poly_trim(num)
    while len(num) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] * inv % p
        q[shift] = factor
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - factor * c) % p
        num = _poly_trim(num)
    return q, num


class GFRing(Ring):
    """The finite field GF(p**k) with an explicit irreducible modulus.

    Elements are polynomials over Z/p modulo the given degree-k modulus;
    the code of an element is the base-p value of its coefficient digits
    (little-endian).  Add/multiply tables are precomputed (size <= 256).
    """

    kind = "gf"
    MAX_ORDER = 256

    def __init__(self, p: int, k: int, modulus=None):
        if not is_prime(p):
            raise InvalidParameterError(f"gf base {p} is not prime")
        if k < 1:
            raise InvalidParameterError(f"gf degree must be >= 1, got {k}")
        if p**k > self.MAX_ORDER:
            raise InvalidParameterError(f"gf order {p**k} exceeds cap {self.MAX_ORDER}")
        if modulus is None:
            try:
                modulus = GF_DEFAULT_MODULI[(p, k)]
            except KeyError:
                raise InvalidParameterError(
                    f"no bundled modulus for gf({p},{k}); pass one explicitly"
                ) from None
        modulus = [c % p for c in modulus]
        if len(modulus) != k + 1 or modulus[-1] == 0:
            raise InvalidParameterError(
                f"gf modulus must have degree exactly {k}: {modulus}"
            )
        self._verify_irreducible(modulus, p, k)
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)
        self.size = p**k
        self.characteristic = p
        self.one = 1
        self.char_exponent = p
        self._digits = self._all_digits()
        self._build_tables()

    @staticmethod
    def _verify_irreducible(modulus, p, k):
        # Trial division over every lower-degree monic polynomial.
        if k == 1:
            return
        for deg in range(1, k):
            for tail in iter_product(range(p), repeat=deg):
                cand = list(tail) + [1]
                _, rem = _poly_divmod(modulus, cand, p)
                if not rem:
                    raise ReducibleModulusError(modulus, cand, p)

    def _all_digits(self):
        digits = np.zeros((self.size, self.k), dtype=np.int64)
        codes = np.arange(self.size)
        for i in range(self.k):
            digits[:, i] = (codes // self.p**i) % self.p
        return digits

    def _digits_to_codes(self, digits):
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        return (np.asarray(digits, dtype=np.int64) @ weights).astype(np.int64)

    def _reduction_rows(self):
        # x**d mod modulus as digit vectors, for d in [k, 2k-2].
        rows = {}
        for d in range(self.k, 2 * self.k - 1):
            poly = [0] * d + [1]
            _, rem = _poly_divmod(poly, list(self.modulus), self.p)
            rem = rem + [0] * (self.k - len(rem))
            rows[d] = np.array(rem[: self.k], dtype=np.int64)
        return rows

    def _build_tables(self):
        q, k, p = self.size, self.k, self.p
        d = self._digits
        self._add_table = self._digits_to_codes((d[:, None, :] + d[None, :, :]) % p)
        self._neg_table = self._digits_to_codes((-d) % p)
        conv = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                conv[:, :, i + j] += d[:, None, i] * d[None, :, j]
        red = self._reduction_rows()
        low = conv[:, :, :k].copy()
        for deg in range(k, 2 * k - 1):
            low += conv[:, :, deg, None] * red[deg][None, None, :]
        self._mul_table = self._digits_to_codes(low % p)
        self._inv_table = np.full(q, -1, dtype=np.int64)
        for a in range(1, q):
            hits = np.nonzero(self._mul_table[a] == self.one)[0]
            if hits.size:
                self._inv_table[a] = hits[0]
        # Absolute trace to the prime field: Tr(x) = x + x**p + ... + x**(p**(k-1)).
        self._trace_table = np.zeros(q, dtype=np.int64)
        for a in range(q):
            acc, t = 0, a
            for _ in range(k):
                acc = self._add_table[acc, t]
                t = self._pow_code(t, p)
            self._trace_table[a] = acc % p  # trace lies in the prime subfield
        self._conv_red = red

    def _pow_code(self, a, n):
        result = self.one
        base = a
        while n:
            if n & 1:
                result = int(self._mul_table[result, base])
            base = int(self._mul_table[base, base])
            n >>= 1
        return result

    def add(self, a, b):
        return int(self._add_table[a, b])

    def neg(self, a):
        return int(self._neg_table[a])

    def mul(self, a, b):
        return int(self._mul_table[a, b])

    def add_arr(self, a, b):
        return self._add_table[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]

    def neg_arr(self, a):
        return self._neg_table[np.asarray(a, dtype=np.int64)]

    def mul_arr(self, a, b):
        return self._mul_table[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]

    def unit_inverse(self, a):
        inv = int(self._inv_table[a])
        return None if inv < 0 else inv

    @property
    def is_field(self):
        return True

    def descriptor(self):
        return f"gf:{self.p}:{self.k}:" + ",".join(str(c) for c in self.modulus)

    def pair_exponent(self, u, a):
        return int(self._trace_table[self.mul(u, a)])

    def pair_exponent_arr(self, u, a):
        return self._trace_table[self.mul_arr(u, a)]

    def convolve_codes(self, a, b):
        # Convolve digit planes (one extra trailing axis of length k), then
        # reduce the digit-degree axis by the modulus.
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        da = self._digits[a]
        db = self._digits[b]
        k = self.k
        out_spatial = tuple(sa + sb - 1 for sa, sb in zip(a.shape, b.shape))
        conv = np.zeros(out_spatial + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                conv[..., i + j] += _exact_convolve_int(da[..., i], db[..., j])
        low = conv[..., :k].copy()
        for deg in range(k, 2 * k - 1):
            low += conv[..., deg, None] * self._conv_red[deg]
        return self._digits_to_codes(low % self.p)


class ProductRing(Ring):
    """Direct product of rings with componentwise operations."""

    kind = "prod"

    def __init__(self, factors):
        factors = tuple(factors)
        if len(factors) < 2:
            raise InvalidParameterError("product ring needs at least 2 factors")
        self.factors = factors
        self.size = int(np.prod([f.size for f in factors]))
        if self.size > 1 << 16:
            raise InvalidParameterError("product ring size capped at 2**16")
        self.characteristic = reduce(
            lambda a, b: a * b // gcd(a, b), (f.characteristic for f in factors)
        )
        self._strides = []
        s = 1
        for f in factors:
            self._strides.append(s)
            s *= f.size
        self.one = self.encode([f.one for f in factors])
        self.char_exponent = reduce(
            lambda a, b: a * b // gcd(a, b), (f.char_exponent for f in factors)
        )

    def encode(self, comps) -> int:
        return sum(c * s for c, s in zip(comps, self._strides))

    def decode(self, code: int):
        return tuple(
            (code // s) % f.size for f, s in zip(self.factors, self._strides)
        )

    def _split_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        return [
            (a // s) % f.size for f, s in zip(self.factors, self._strides)
        ]

    def _join_arr(self, comps):
        out = np.zeros_like(np.asarray(comps[0], dtype=np.int64))
        for c, s in zip(comps, self._strides):
            out = out + np.asarray(c, dtype=np.int64) * s
        return out

    def _map2(self, op, a, b):
        ca = self.decode(a)
        cb = self.decode(b)
        return self.encode([op(f, x, y) for f, x, y in zip(self.factors, ca, cb)])

    def add(self, a, b):
        return self._map2(lambda f, x, y: f.add(x, y), a, b)

    def mul(self, a, b):
        return self._map2(lambda f, x, y: f.mul(x, y), a, b)

    def neg(self, a):
        return self.encode([f.neg(x) for f, x in zip(self.factors, self.decode(a))])

    def add_arr(self, a, b):
        return self._join_arr(
            [f.add_arr(x, y) for f, x, y in zip(self.factors, self._split_arr(a), self._split_arr(b))]
        )

    def neg_arr(self, a):
        return self._join_arr(
            [f.neg_arr(x) for f, x in zip(self.factors, self._split_arr(a))]
        )

    def mul_arr(self, a, b):
        return self._join_arr(
            [f.mul_arr(x, y) for f, x, y in zip(self.factors, self._split_arr(a), self._split_arr(b))]
        )

    def unit_inverse(self, a):
        invs = []
        for f, x in zip(self.factors, self.decode(a)):
            inv = f.unit_inverse(x)
            if inv is None:
                return None
            invs.append(inv)
        return self.encode(invs)

    def descriptor(self):
        return "prod:[" + ";".join(f.descriptor() for f in self.factors) + "]"

    def pair_exponent(self, u, a):
        L = self.char_exponent
        total = 0
        for f, x, y in zip(self.factors, self.decode(u), self.decode(a)):
            total += (L // f.char_exponent) * f.pair_exponent(x, y)
        return total % L

    def pair_exponent_arr(self, u, a):
        L = self.char_exponent
        us = self._split_arr(u)
        as_ = self._split_arr(a)
        total = np.zeros_like(np.asarray(u, dtype=np.int64))
        for f, x, y in zip(self.factors, us, as_):
            total = total + (L // f.char_exponent) * f.pair_exponent_arr(x, y)
        return total % L

    def convolve_codes(self, a, b):
        comps = [
            f.convolve_codes(x, y)
            for f, x, y in zip(self.factors, self._split_arr(a), self._split_arr(b))
        ]
        return self._join_arr(comps)


def parse_ring(text: str) -> Ring:
    """Parse a ring descriptor: zmod:m | gf:p:k:c0,c1,..,ck | prod:[d1;d2;..]."""
    text = text.strip()
    if text.startswith("zmod:"):
        try:
            m = int(text[5:])
        except ValueError:
            raise InvalidParameterError(f"bad zmod descriptor: {text!r}") from None
        return ZmodRing(m)
    if text.startswith("gf:"):
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise InvalidParameterError(f"bad gf descriptor: {text!r}")
        try:
            p, k = int(parts[1]), int(parts[2])
            modulus = None
            if len(parts) == 4:
                modulus = [int(c) for c in parts[3].split(",")]
        except ValueError:
            raise InvalidParameterError(f"bad gf descriptor: {text!r}") from None
        return GFRing(p, k, modulus)
    if text.startswith("prod:[") and text.endswith("]"):
        inner = text[6:-1]
        parts, depth, cur = [], 0, []
        for ch in inner:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            if ch == ";" and depth == 0:
                parts.append("".join(cur))
                cur = []
            else:
                cur.append(ch)
        parts.append("".join(cur))
        return ProductRing([parse_ring(p) for p in parts])
    raise InvalidParameterError(f"unrecognized ring descriptor: {text!r}")


def make_ring(spec) -> Ring:
    """Construct a ring from a descriptor string or pass a Ring through."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, str):
        return parse_ring(spec)
    raise InvalidParameterError(f"cannot build a ring from {spec!r}")


class ModuleSpec:
    """The free module R**n with componentwise ring action.

    Module elements are length-n tuples of ring codes; their packed single-code
    form (mixed radix, base |R|, little-endian) is used in file formats.
    """

    def __init__(self, ring: Ring, rank: int = 1):
        if rank < 1:
            raise InvalidParameterError(f"module rank must be >= 1, got {rank}")
        self.ring = ring
        self.rank = rank
        self.size = ring.size**rank

    def encode(self, comps) -> int:
        comps = tuple(comps)
        if len(comps) != self.rank:
            raise InvalidParameterError("component count != rank")
        code = 0
        for c in reversed(comps):
            if not 0 <= c < self.ring.size:
                raise InvalidParameterError(f"ring code {c} out of range")
            code = code * self.ring.size + c
        return code

    def decode(self, code: int):
        if not 0 <= code < self.size:
            raise InvalidParameterError(f"module code {code} out of range")
        out = []
        for _ in range(self.rank):
            out.append(code % self.ring.size)
            code //= self.ring.size
        return tuple(out)

    def pack_arr(self, comps: np.ndarray) -> np.ndarray:
        """(.., rank) component array -> (..) packed module codes."""
        weights = self.ring.size ** np.arange(self.rank, dtype=np.int64)
        return (np.asarray(comps, dtype=np.int64) * weights).sum(axis=-1)

    def unpack_arr(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.zeros(codes.shape + (self.rank,), dtype=np.int64)
        for i in range(self.rank):
            out[..., i] = (codes // self.ring.size**i) % self.ring.size
        return out

    def __eq__(self, other):
        return (
            isinstance(other, ModuleSpec)
            and self.ring == other.ring
            and self.rank == other.rank
        )

    def __hash__(self):
        return hash((self.ring, self.rank))

    def __repr__(self):
        return f"<Module {self.ring.descriptor()}^{self.rank}>"

    def check_same(self, other: "ModuleSpec"):
        if self != other:
            raise RingMismatchError(f"module mismatch: {self} vs {other}")


def subring_closure(ring: Ring, gens) -> frozenset:
    """Smallest subset of the ring containing gens and closed under + and *.

    The generators alone are closed over (no unity adjoined); 0 always appears
    because the finite characteristic wraps the additive orbit.  Runs as a
    worklist fixed point over the finite carrier.
    """
    gens = sorted(set(int(g) for g in gens))
    if not gens:
        raise InvalidParameterError("subring_closure needs at least one generator")
    for g in gens:
        if not 0 <= g < ring.size:
            raise InvalidParameterError(f"generator {g} out of range")
    members = np.zeros(ring.size, dtype=bool)
    current = np.array(gens, dtype=np.int64)
    members[current] = True
    while current.size:
        base = np.nonzero(members)[0]
        sums = ring.add_arr(current[:, None], base[None, :]).ravel()
        prods = ring.mul_arr(current[:, None], base[None, :]).ravel()
        batch = np.concatenate([sums, prods])
        fresh = np.unique(batch[~members[batch]])
        members[fresh] = True
        current = fresh
    return frozenset(int(x) for x in np.nonzero(members)[0])


def _require_prime_characteristic(ring: Ring, p):
    char = ring.characteristic
    if p is None:
        p = char
    if p != char:
        raise InvalidParameterError(f"p={p} does not match characteristic {char}")
    if not is_prime(char):
        raise UnsupportedCharacteristicError(
            f"characteristic {char} is not prime; decompose the ring first"
        )
    return p


def stable_power_subring(ring: Ring, coeffs, p: int | None = None) -> frozenset:
    """Stabilized subring generated by iterated p-th powers of the coefficients.

    Computes the subring generated by {c**(p**j)} for j = 0, 1, 2, ... and
    returns the first one equal to its successor.  The chain is verified to be
    descending at every step.
    """
    p = _require_prime_characteristic(ring, p)
    coeffs = [int(c) for c in coeffs]
    if not coeffs or any(c == 0 for c in coeffs):
        raise InvalidParameterError("coefficients must be nonzero")
    gens = coeffs
    previous = subring_closure(ring, gens)
    while True:
        gens = [ring.pow(c, p) for c in gens]
        nxt = subring_closure(ring, gens)
        if not nxt <= previous:
            raise AssertionError("power subring chain failed to descend")
        if nxt == previous:
            return previous
        previous = nxt


def recurrent_power_sums(ring: Ring, coeffs, p: int | None = None) -> frozenset:
    """Values (sum of p**k-th powers of the coefficients) - 1 that recur forever.

    The coefficient power vector evolves by the Frobenius map and is eventually
    periodic; the returned set contains exactly the values attained inside the
    detected cycle (k starts at 1).
    """
    p = _require_prime_characteristic(ring, p)
    coeffs = [int(c) for c in coeffs]
    if not coeffs or any(c == 0 for c in coeffs):
        raise InvalidParameterError("coefficients must be nonzero")
    state = tuple(ring.pow(c, p) for c in coeffs)  # k = 1
    seen = {}
    values = []
    k = 0
    while state not in seen:
        seen[state] = k
        total = ring.zero
        for c in state:
            total = ring.add(total, c)
        values.append(ring.sub(total, ring.one))
        state = tuple(ring.pow(c, p) for c in state)
        k += 1
    cycle_start = seen[state]
    return frozenset(values[cycle_start:])
