"""Finite-window configurations over the lattice Z^D x N^E.

Axes are listed Z-axes first, then N-axes; arrays are row-major with
coordinates increasing along each axis.  Exact mode tracks shrinking domains
under shifts and local rules; torus mode wraps every axis (including N-axes,
as a simulation device for long-horizon statistics).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import (
    ConfigParseError,
    DomainExhaustedError,
    InvalidParameterError,
    OutOfWindowError,
)
from .rings import ModuleSpec, parse_ring

__all__ = [
    "WindowSpec",
    "WindowConfig",
    "shift_config",
    "restrict_config",
    "config_add",
    "config_sub",
    "config_scale",
    "constant_config",
    "config_from_function",
    "checkerboard_config",
    "encode_config",
    "decode_config",
]

CONFIG_MAGIC = "MODSHIFT-CFG v1"


@dataclass(frozen=True)
class WindowSpec:
    """A rectangular window: origin plus positive extents on each axis."""

    dims: tuple  # (D, E)
    origin: tuple
    extents: tuple

    def __post_init__(self):
        D, E = self.dims
        if D < 0 or E < 0 or D + E < 1:
            raise InvalidParameterError(f"bad dims {self.dims}")
        n = D + E
        if len(self.origin) != n or len(self.extents) != n:
            raise InvalidParameterError("origin/extents length != D+E")
        if any(e < 1 for e in self.extents):
            raise InvalidParameterError(f"extents must be positive: {self.extents}")
        for i in range(D, n):
            if self.origin[i] < 0:
                raise InvalidParameterError(
                    f"N-axis coordinate {i} has negative origin {self.origin[i]}"
                )
        object.__setattr__(self, "origin", tuple(int(x) for x in self.origin))
        object.__setattr__(self, "extents", tuple(int(x) for x in self.extents))
        object.__setattr__(self, "dims", (int(D), int(E)))

    @property
    def axes(self) -> int:
        return self.dims[0] + self.dims[1]

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.extents))

    def sites(self):
        """All sites, row-major."""
        for rel in iter_product(*(range(e) for e in self.extents)):
            yield tuple(o + r for o, r in zip(self.origin, rel))

    def contains_site(self, site) -> bool:
        return all(
            o <= s < o + e for s, o, e in zip(site, self.origin, self.extents)
        )

    def contains_window(self, other: "WindowSpec") -> bool:
        return all(
            so <= oo and oo + oe <= so + se
            for so, se, oo, oe in zip(
                self.origin, self.extents, other.origin, other.extents
            )
        )

    def index_of(self, site) -> int:
        idx = 0
        for s, o, e in zip(site, self.origin, self.extents):
            r = s - o
            if not 0 <= r < e:
                raise OutOfWindowError(f"site {site} not in window {self}")
            idx = idx * e + r
        return idx

    def relative_slices(self, sub: "WindowSpec"):
        return tuple(
            slice(oo - so, oo - so + oe)
            for so, oo, oe in zip(self.origin, sub.origin, sub.extents)
        )

    def translate(self, v) -> "WindowSpec":
        return WindowSpec(
            self.dims,
            tuple(o + x for o, x in zip(self.origin, v)),
            self.extents,
        )

    def intersect(self, other: "WindowSpec"):
        """Common sub-window, or None when disjoint."""
        origin = tuple(
            max(a, b) for a, b in zip(self.origin, other.origin)
        )
        top = tuple(
            min(a + ea, b + eb)
            for a, ea, b, eb in zip(self.origin, self.extents, other.origin, other.extents)
        )
        extents = tuple(t - o for o, t in zip(origin, top))
        if any(e < 1 for e in extents):
            return None
        return WindowSpec(self.dims, origin, extents)

    def clipped_to_lattice(self):
        """Intersect with Z^D x N^E; None when empty."""
        D, _ = self.dims
        origin, extents = list(self.origin), list(self.extents)
        for i in range(D, self.axes):
            if origin[i] < 0:
                extents[i] += origin[i]
                origin[i] = 0
            if extents[i] < 1:
                return None
        return WindowSpec(self.dims, tuple(origin), tuple(extents))

    def expanded(self, lo, hi) -> "WindowSpec":
        """Grow by lo (per axis, towards -inf) and hi (towards +inf), clipped to the lattice."""
        origin = [o - l for o, l in zip(self.origin, lo)]
        extents = [e + l + h for e, l, h in zip(self.extents, lo, hi)]
        D = self.dims[0]
        for i in range(D, self.axes):
            if origin[i] < 0:
                extents[i] += origin[i]
                origin[i] = 0
        return WindowSpec(self.dims, tuple(origin), tuple(extents))

    def __str__(self):
        return (
            f"win(dims={self.dims[0]},{self.dims[1]} origin="
            + ",".join(map(str, self.origin))
            + " extents="
            + ",".join(map(str, self.extents))
            + ")"
        )


@dataclass(frozen=True)
class WindowConfig:
    """Module values on a window.

    `values` has shape extents + (rank,) holding ring element codes; the mode
    tag selects exact (shrinking-domain) or torus (wrapping) evaluation.
    """

    window: WindowSpec
    module: ModuleSpec
    values: np.ndarray
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "torus"):
            raise InvalidParameterError(f"mode must be exact|torus: {self.mode!r}")
        vals = np.ascontiguousarray(self.values, dtype=np.int64)
        expected = self.window.extents + (self.module.rank,)
        if vals.shape != expected:
            raise InvalidParameterError(
                f"values shape {vals.shape} != extents+(rank,) {expected}"
            )
        if vals.size and (vals.min() < 0 or vals.max() >= self.module.ring.size):
            bad = np.argwhere((vals < 0) | (vals >= self.module.ring.size))[0]
            raise InvalidParameterError(
                f"element code out of range at index {tuple(int(x) for x in bad)}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def value_at(self, site):
        """The module element (tuple of ring codes) stored at an absolute site."""
        rel = tuple(s - o for s, o in zip(site, self.window.origin))
        if not all(0 <= r < e for r, e in zip(rel, self.window.extents)):
            raise OutOfWindowError(f"site {site} outside {self.window}")
        return tuple(int(x) for x in self.values[rel])

    def flat(self) -> np.ndarray:
        """(n_sites, rank) view, row-major."""
        return self.values.reshape(self.window.n_sites, self.module.rank)

    def word_key(self) -> bytes:
        return self.values.tobytes()

    def with_values(self, values) -> "WindowConfig":
        return WindowConfig(self.window, self.module, values, self.mode)

    def __eq__(self, other):
        return (
            isinstance(other, WindowConfig)
            and self.window == other.window
            and self.module == other.module
            and self.mode == other.mode
            and np.array_equal(self.values, other.values)
        )


def constant_config(module, window, element, mode="exact") -> WindowConfig:
    """Every site holds `element` (a module code tuple or single ring code)."""
    if isinstance(element, int):
        element = (element,) * module.rank
    vals = np.tile(np.array(element, dtype=np.int64), window.extents + (1,))
    return WindowConfig(window, module, vals, mode)


def config_from_function(module, window, fn, mode="exact") -> WindowConfig:
    """Build a config by evaluating fn(site) -> module element at every site."""
    vals = np.zeros(window.extents + (module.rank,), dtype=np.int64)
    for rel in iter_product(*(range(e) for e in window.extents)):
        site = tuple(o + r for o, r in zip(window.origin, rel))
        v = fn(site)
        if isinstance(v, int):
            v = (v,) * module.rank
        vals[rel] = v
    return WindowConfig(window, module, vals, mode)


def checkerboard_config(module, window, mode="exact") -> WindowConfig:
    """c_site = (sum of coordinates) * 1 in the ring, on every component."""
    ring = module.ring
    return config_from_function(
        module, window, lambda site: ring.from_int(sum(site)), mode=mode
    )


def shift_config(config: WindowConfig, v) -> WindowConfig:
    """Read the configuration displaced by v: out_m = c_{m+v}.

    Exact mode shrinks (and clips to the lattice); torus mode wraps per axis.
    """
    v = tuple(int(x) for x in v)
    if len(v) != config.window.axes:
        raise InvalidParameterError(f"vector {v} has wrong arity")
    if config.mode == "torus":
        shifts = tuple(-x for x in v)
        vals = np.roll(config.values, shifts, axis=tuple(range(len(v))))
        return config.with_values(vals)
    w = config.window
    origin = [o - x for o, x in zip(w.origin, v)]
    extents = list(w.extents)
    for i in range(w.dims[0], w.axes):
        if origin[i] < 0:
            extents[i] += origin[i]
            origin[i] = 0
    if any(e < 1 for e in extents):
        raise DomainExhaustedError(f"shift by {v} empties the window")
    out_window = WindowSpec(w.dims, tuple(origin), tuple(extents))
    src = out_window.translate(v)
    vals = config.values[config.window.relative_slices(src)]
    return WindowConfig(out_window, config.module, vals, config.mode)


def restrict_config(config: WindowConfig, sub: WindowSpec) -> WindowConfig:
    if not config.window.contains_window(sub):
        raise OutOfWindowError(f"{sub} not contained in {config.window}")
    vals = config.values[config.window.relative_slices(sub)]
    return WindowConfig(sub, config.module, vals, config.mode)


def _check_compatible(a: WindowConfig, b: WindowConfig):
    a.module.check_same(b.module)
    if a.window != b.window:
        raise OutOfWindowError("configs live on different windows")


def config_add(a: WindowConfig, b: WindowConfig) -> WindowConfig:
    _check_compatible(a, b)
    return a.with_values(a.module.ring.add_arr(a.values, b.values))


def config_sub(a: WindowConfig, b: WindowConfig) -> WindowConfig:
    _check_compatible(a, b)
    return a.with_values(a.module.ring.sub_arr(a.values, b.values))


def config_scale(scalar: int, c: WindowConfig) -> WindowConfig:
    ring = c.module.ring
    return c.with_values(ring.mul_arr(np.int64(scalar), c.values))


def encode_config(config: WindowConfig) -> str:
    """Bit-exact text form; one line per row, packed module codes per site."""
    w = config.window
    lines = [
        CONFIG_MAGIC,
        config.module.ring.descriptor(),
        f"rank {config.module.rank}",
        f"dims {w.dims[0]} {w.dims[1]}",
        "origin " + " ".join(str(o) for o in w.origin),
        "extents " + " ".join(str(e) for e in w.extents),
        f"mode {config.mode}",
    ]
    packed = config.module.pack_arr(config.values)
    rows = packed.reshape(-1, w.extents[-1]) if w.axes > 1 else packed.reshape(1, -1)
    for row in rows:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def _parse_header_line(lines, idx, prefix):
    if idx >= len(lines):
        raise ConfigParseError(f"missing {prefix!r} line", line=idx + 1)
    line = lines[idx]
    if not line.startswith(prefix + " "):
        raise ConfigParseError(f"expected {prefix!r} line, got {line!r}", line=idx + 1)
    try:
        return [int(tok) for tok in line[len(prefix) + 1 :].split()]
    except ValueError:
        raise ConfigParseError(f"bad integers in {line!r}", line=idx + 1) from None


def decode_config(text: str) -> WindowConfig:
    lines = text.splitlines()
    if not lines or lines[0] != CONFIG_MAGIC:
        raise ConfigParseError(f"bad magic; expected {CONFIG_MAGIC!r}", line=1)
    if len(lines) < 7:
        raise ConfigParseError("truncated header", line=len(lines))
    try:
        ring = parse_ring(lines[1])
    except InvalidParameterError as e:
        raise ConfigParseError(str(e), line=2) from None
    (rank,) = _parse_header_line(lines, 2, "rank")
    dims = _parse_header_line(lines, 3, "dims")
    if len(dims) != 2:
        raise ConfigParseError("dims line needs exactly D and E", line=4)
    origin = _parse_header_line(lines, 4, "origin")
    extents = _parse_header_line(lines, 5, "extents")
    mode_line = lines[6]
    if mode_line not in ("mode exact", "mode torus"):
        raise ConfigParseError(f"bad mode line {mode_line!r}", line=7)
    mode = mode_line.split()[1]
    module = ModuleSpec(ring, rank)
    window = WindowSpec((dims[0], dims[1]), tuple(origin), tuple(extents))
    n_rows = window.n_sites // window.extents[-1] if window.axes > 1 else 1
    row_len = window.extents[-1] if window.axes > 1 else window.n_sites
    body = lines[7:]
    if len(body) != n_rows:
        raise ConfigParseError(
            f"expected {n_rows} value rows, found {len(body)}", line=8
        )
    packed = np.zeros((n_rows, row_len), dtype=np.int64)
    for r, line in enumerate(body):
        toks = line.split(" ")
        if toks == [""]:
            toks = []
        if len(toks) != row_len:
            raise ConfigParseError(
                f"row has {len(toks)} values, expected {row_len}", line=8 + r
            )
        for cidx, tok in enumerate(toks):
            try:
                val = int(tok)
            except ValueError:
                raise ConfigParseError(
                    f"bad value {tok!r}", line=8 + r, column=cidx + 1
                ) from None
            if not 0 <= val < module.size:
                offset = r * row_len + cidx
                raise ConfigParseError(
                    f"code {val} out of range [0,{module.size}) at flat offset {offset}",
                    line=8 + r,
                    column=cidx + 1,
                )
            packed[r, cidx] = val
    comps = module.unpack_arr(packed.reshape(window.extents))
    return WindowConfig(window, module, comps, mode)
