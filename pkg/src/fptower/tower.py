"""Exact arithmetic for the surface tower.

Triple-cover invariant formulas, closed-form tower invariants, and
diagnostics against the K^2 = 9*chi line.  Everything is unbounded-integer
or exact-rational arithmetic: the statements being checked are identities,
not approximations, so no floating point appears anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SurfaceInvariants:
    """K^2 and chi of a smooth projective surface; c2 and c1^2 are derived
    (c2 via Noether's formula), never stored independently."""
    K2: int
    chi: int

    @property
    def c2(self) -> int:
        return 12 * self.chi - self.K2

    @property
    def c1sq(self) -> int:
        return self.K2


@dataclass(frozen=True)
class CoverBranchData:
    """Branch data of a Z/3-cover: n triples of ordinary cusps (3n cusps
    total downstairs) and m triples of 1/3(1,1)-points."""
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("branch counts must be nonnegative")


def triple_cover_invariants(base: SurfaceInvariants,
                            branch: CoverBranchData) -> SurfaceInvariants:
    """Invariants of the Z/3-cover: chi -> 3*chi - 2n - m, K^2 -> 3*K^2 + 3m."""
    return SurfaceInvariants(3 * base.K2 + 3 * branch.m,
                             3 * base.chi - 2 * branch.n - branch.m)


# level-1 base values; the n > 1 closed forms deliberately exclude them
XTILDE_LEVEL1 = SurfaceInvariants(2, 2)
S_LEVEL1 = SurfaceInvariants(9, 1)


def xtilde_invariants(level: int) -> SurfaceInvariants:
    """Closed form (3^n, 3^{n-2} + 2) for n > 1; level 1 is the base case."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if level == 1:
        return XTILDE_LEVEL1
    return SurfaceInvariants(3 ** level, 3 ** (level - 2) + 2)


def s_invariants(level: int) -> SurfaceInvariants:
    """Closed form (3^{n+1}, 3^{n-1}) for n > 1; level 1 is the base case."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if level == 1:
        return S_LEVEL1
    return SurfaceInvariants(3 ** (level + 1), 3 ** (level - 1))


@dataclass(frozen=True)
class TowerRow:
    """One tower level: the minimal-model invariants, the covering-surface
    invariants, and the two line residuals (both exactly zero where the
    tower theory says so)."""
    level: int
    xtilde: SurfaceInvariants
    s: SurfaceInvariants
    residual_xtilde: int             # 9*chi - 18 - K^2 of the minimal model
    residual_s: int                  # K^2 - 9*chi of the covering surface
    ratio: Fraction                  # K^2 / chi of the minimal model


def tower_row(level: int) -> TowerRow:
    x = xtilde_invariants(level)
    s = s_invariants(level)
    return TowerRow(level, x, s,
                    9 * x.chi - 18 - x.K2,
                    s.K2 - 9 * s.chi,
                    Fraction(x.K2, x.chi))


def tower_table(levels: int) -> list[TowerRow]:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return [tower_row(n) for n in range(1, levels + 1)]


def bmy_diagnostics(inv: SurfaceInvariants):
    """(K^2 - 9*chi, c2, c1^2 - 3*c2 + 72, K^2/chi as an exact rational)."""
    if inv.chi == 0:
        raise ValueError("chi = 0: ratio undefined")
    return (inv.K2 - 9 * inv.chi, inv.c2,
            inv.c1sq - 3 * inv.c2 + 72, Fraction(inv.K2, inv.chi))


def verify_tower_identities(max_level: int = 40) -> list[str]:
    """Cross-check closed forms against iterated triple-cover recurrences
    for levels 2..max_level.  Returns a list of failure descriptions
    (empty = everything holds exactly).

    Recurrences: the next minimal model is the (2,0)-cover of the current
    one, and each covering surface is the (3,0)-cover of its minimal
    model; induction base is level 2 = the (1,1)-cover of level 1.
    """
    failures = []
    x = triple_cover_invariants(xtilde_invariants(1), CoverBranchData(1, 1))
    for n in range(2, max_level + 1):
        row = tower_row(n)
        if x != row.xtilde:
            failures.append(f"level {n}: recurrence {x} != closed form {row.xtilde}")
        s = triple_cover_invariants(x, CoverBranchData(3, 0))
        if s != row.s:
            failures.append(f"level {n}: cover recurrence {s} != closed form {row.s}")
        if row.residual_xtilde != 0:
            failures.append(f"level {n}: 9*chi - 18 - K^2 = {row.residual_xtilde}")
        if row.residual_s != 0:
            failures.append(f"level {n}: K^2 - 9*chi = {row.residual_s} on the cover")
        _, _, bmy, _ = bmy_diagnostics(row.xtilde)
        if bmy != 0:
            failures.append(f"level {n}: c1^2 - 3*c2 + 72 = {bmy}")
        x = triple_cover_invariants(x, CoverBranchData(2, 0))
    return failures
