"""Ready-made systems used by the demos, bundled experiment configs, and tests.

The centerpiece is a two-axis (one Z axis, one N axis) system over Z/2: the
submodule shift cut out by the four-site parity constraint whose members are
exactly the space-time diagrams of the three-cell XOR rule, the three-term
rule that fixes it, and the checkerboard configuration whose coset is a
nontrivial invariant coset shift.
"""

from __future__ import annotations

from .kernels import KernelShiftSpec
from .lattice import WindowSpec, checkerboard_config
from .rings import ModuleSpec, ZmodRing
from .shiftpoly import LocalRule

__all__ = [
    "checkerboard_system",
    "CheckerboardSystem",
    "torsion_demo_system",
    "TorsionDemoSystem",
]


class CheckerboardSystem:
    """Parity-kernel shift, its fixing rule, and the checkerboard coset over Z/2."""

    def __init__(self):
        self.ring = ZmodRing(2)
        self.module = ModuleSpec(self.ring, 1)
        self.dims = (1, 1)  # lattice Z x N, axes listed Z first
        # Constraint stencil: left, center, right on one row plus the site above.
        self.constraint = LocalRule(
            self.module,
            self.dims,
            offsets=((-1, 0), (0, 0), (1, 0), (0, 1)),
            coeffs=(1, 1, 1, 1),
        )
        self.kernel = KernelShiftSpec(self.constraint, label="parity-kernel")
        # The rule that fixes the checkerboard: site + right neighbour + site above.
        self.rule = LocalRule(
            self.module,
            self.dims,
            offsets=((0, 0), (0, 1), (1, 0)),
            coeffs=(1, 1, 1),
        )

    def six_site_window(self) -> WindowSpec:
        """Three columns, two rows: exactly one in-window constraint, 32 solutions."""
        return WindowSpec(self.dims, (0, 0), (3, 2))

    def window(self, cols: int, rows: int, origin=(0, 0)) -> WindowSpec:
        return WindowSpec(self.dims, tuple(origin), (cols, rows))

    def checkerboard(self, window: WindowSpec, mode="exact"):
        return checkerboard_config(self.module, window, mode=mode)


def checkerboard_system() -> CheckerboardSystem:
    return CheckerboardSystem()


class TorsionDemoSystem:
    """One-axis system over Z/3 whose recurring coefficient sums are {1}.

    The two-term all-ones rule has sum of p**k-th powers 1+1, so the recurring
    value is 1, a unit: the torsion-freeness hypothesis holds and only the
    kernel itself can be an invariant mixing coset.
    """

    def __init__(self):
        self.ring = ZmodRing(3)
        self.module = ModuleSpec(self.ring, 1)
        self.dims = (1, 0)
        self.rule = LocalRule(self.module, self.dims, offsets=((0,), (1,)), coeffs=(1, 1))
        # Kernel of the three-term sum: nontrivial quotient on any window >= 3 sites.
        self.constraint = LocalRule(
            self.module, self.dims, offsets=((0,), (1,), (2,)), coeffs=(1, 1, 1)
        )
        self.kernel = KernelShiftSpec(self.constraint, label="threesum-kernel")

    def window(self, length: int, origin: int = 0) -> WindowSpec:
        return WindowSpec(self.dims, (origin,), (length,))


def torsion_demo_system() -> TorsionDemoSystem:
    return TorsionDemoSystem()
