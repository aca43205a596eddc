"""Homology catalog for the manifolds the scenarios use.

Spheres and real projective spaces come from closed-form tables; real
projective space is additionally implemented as a cellular chain complex
(one cell per dimension, boundary alternating 0 and 2) so the table can
be cross-checked by an independent oracle.  Products go through the
Kunneth formula

    H_n(X x Y) = sum_{i+j=n} H_i (x) H_j  +  sum_{i+j=n-1} Tor(H_i, H_j).

The Z_2 Mayer-Vietoris check encodes the rank argument that forces the
first two Stiefel-Whitney classes of a glued space to vanish when its
two pieces are spin: if the restriction to the intersection is
surjective in degrees 0..2, exactness makes the pullback to the pieces
injective there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .abgroup import (FgAbGroup, GroupHom, IntMatrix, Z, ZERO, cyclic,
                      direct_sum, homology_at, tensor, tor)
from .graded import GradedGroup


class TopologyError(ValueError):
    """Raised on malformed space or Lagrangian data."""


# ---------------------------------------------------------------------------
# Space expressions


@dataclass(frozen=True)
class Sphere:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise TopologyError("sphere dimension must be nonnegative")


@dataclass(frozen=True)
class RealProjective:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise TopologyError("projective space dimension must be nonnegative")


@dataclass(frozen=True)
class Circle:
    pass


@dataclass(frozen=True)
class Product:
    left: "SpaceExpr"
    right: "SpaceExpr"


@dataclass(frozen=True)
class Explicit:
    """A space given directly by its integral homology."""

    homology: GradedGroup
    dimension: int

    def __post_init__(self):
        if self.dimension < 0:
            raise TopologyError("dimension must be nonnegative")
        if self.homology.period is not None:
            raise TopologyError("explicit homology must be a finite table")
        if any(d < 0 for d in self.homology.support()):
            raise TopologyError("homology must live in nonnegative degrees")


SpaceExpr = Sphere | RealProjective | Circle | Product | Explicit


def dimension(space: SpaceExpr) -> int:
    if isinstance(space, Sphere):
        return space.n
    if isinstance(space, RealProjective):
        return space.n
    if isinstance(space, Circle):
        return 1
    if isinstance(space, Product):
        return dimension(space.left) + dimension(space.right)
    return space.dimension


# ---------------------------------------------------------------------------
# Homology


def _sphere_homology(n: int) -> dict[int, FgAbGroup]:
    if n == 0:
        return {0: FgAbGroup(2)}
    return {0: Z, n: Z}


def _rp_homology_table(n: int) -> dict[int, FgAbGroup]:
    """Closed form: H_0 = Z, H_k = Z/2 for odd k < n, H_n = Z for odd n."""
    out = {0: Z}
    for k in range(1, n):
        if k % 2 == 1:
            out[k] = cyclic(2)
    if n >= 1 and n % 2 == 1:
        out[n] = Z
    return out


def rp_boundary_matrices(n: int) -> list[IntMatrix]:
    """Cellular boundary maps of RP^n: one cell per dimension 0..n,
    d_k = multiplication by 1 + (-1)^k.  Entry k is d_k: C_k -> C_{k-1}."""
    mats = [IntMatrix(0, 1, ())]  # d_0: C_0 -> 0
    for k in range(1, n + 1):
        mats.append(IntMatrix.from_rows([[1 + (-1) ** k]]))
    return mats


def cellular_homology(boundaries: list[IntMatrix]) -> dict[int, FgAbGroup]:
    """Homology of a chain complex given by boundary matrices
    d_k: C_k -> C_{k-1} (entry k of the list); an independent oracle
    built on kernels and images only."""
    out = {}
    top = len(boundaries) - 1
    for k in range(top + 1):
        d_k = boundaries[k]
        free_k = FgAbGroup(d_k.cols)
        outgoing = None
        if d_k.rows > 0:
            outgoing = GroupHom(free_k, FgAbGroup(d_k.rows), d_k)
        incoming = None
        if k + 1 <= top and boundaries[k + 1].cols > 0:
            incoming = GroupHom(FgAbGroup(boundaries[k + 1].cols), free_k, boundaries[k + 1])
        grp = homology_at(incoming, outgoing, free_k)
        if not grp.is_trivial():
            out[k] = grp
    return out


def rp_homology_cellular(n: int) -> dict[int, FgAbGroup]:
    return cellular_homology(rp_boundary_matrices(n))


def kunneth(hx: GradedGroup, hy: GradedGroup) -> GradedGroup:
    out: dict[int, FgAbGroup] = {}
    for i, gi in hx.entries:
        for j, gj in hy.entries:
            t = tensor(gi, gj)
            if not t.is_trivial():
                out[i + j] = direct_sum(out.get(i + j, ZERO), t)
            tt = tor(gi, gj)
            if not tt.is_trivial():
                out[i + j + 1] = direct_sum(out.get(i + j + 1, ZERO), tt)
    return GradedGroup.from_dict(out)


@lru_cache(maxsize=None)
def homology(space: SpaceExpr) -> GradedGroup:
    """Integral homology of a catalog space.

    >>> str(homology(Sphere(3)))
    '{0: Z, 3: Z}'
    >>> homology(Product(RealProjective(3), Sphere(3))).entry(3)
    FgAbGroup(free_rank=2, torsion=())
    """
    if isinstance(space, Sphere):
        return GradedGroup.from_dict(_sphere_homology(space.n))
    if isinstance(space, RealProjective):
        return GradedGroup.from_dict(_rp_homology_table(space.n))
    if isinstance(space, Circle):
        return GradedGroup.from_dict(_sphere_homology(1))
    if isinstance(space, Product):
        return kunneth(homology(space.left), homology(space.right))
    return space.homology


def euler_characteristic(h: GradedGroup) -> int:
    return sum((-1) ** deg * grp.free_rank for deg, grp in h.entries)


def z2_cohomology_dims(h: GradedGroup, degrees) -> dict[int, int]:
    """dim_F2 H^k(X; Z_2) from integral homology via universal
    coefficients: rank H_k plus the 2-torsion counts of H_k and
    H_(k-1)."""

    def two_torsion_count(g: FgAbGroup) -> int:
        return sum(1 for d in g.torsion if d % 2 == 0)

    out = {}
    for k in degrees:
        hk, hk1 = h.entry(k), h.entry(k - 1) if k >= 1 else ZERO
        out[k] = hk.free_rank + two_torsion_count(hk) + two_torsion_count(hk1)
    return out


# ---------------------------------------------------------------------------
# Lagrangian data


@dataclass(frozen=True)
class LagrangianDescriptor:
    """Declared data of a monotone Lagrangian in CP^ambient_dim.

    maslov is the minimal Maslov number; None means unknown but even
    (the descriptor must then be orientable), which is all a surgery
    product needs.  space is None when no homology data is declared.
    """

    name: str
    space: SpaceExpr | None
    ambient_dim: int
    maslov: int | None
    orientable: bool = True
    spin: bool = True
    monotone: bool = True

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise TopologyError(f"{self.name}: ambient dimension must be positive")
        if self.spin and not self.orientable:
            raise TopologyError(f"{self.name}: spin requires orientable")
        if self.maslov is not None:
            if self.maslov < 0:
                raise TopologyError(f"{self.name}: Maslov number must be nonnegative")
            if self.orientable and self.maslov % 2 != 0:
                raise TopologyError(
                    f"{self.name}: orientable Lagrangians have even Maslov number")
        elif not self.orientable:
            raise TopologyError(f"{self.name}: unknown Maslov number requires orientable")


def pair_maslov(a: LagrangianDescriptor, b: LagrangianDescriptor) -> int:
    """Minimal Maslov number of a pair: gcd of the two numbers, with
    gcd(x, 0) = x.  Both Lagrangians must be monotone with known
    numbers."""
    if not (a.monotone and b.monotone):
        raise TopologyError("pair Maslov number needs monotone Lagrangians")
    if a.maslov is None or b.maslov is None:
        raise TopologyError("pair Maslov number needs declared Maslov numbers")
    return gcd(a.maslov, b.maslov)


@dataclass(frozen=True)
class MonotonicityConstant:
    """The exact constant 2(n+1)/pi, stored as a rational multiple of
    1/pi; never a float."""

    over_pi: Fraction

    def __str__(self) -> str:
        return f"{self.over_pi}/pi"


def monotonicity_constant(ambient_dim: int) -> MonotonicityConstant:
    """tau = 2(n+1)/pi for CP^n.

    >>> str(monotonicity_constant(7))
    '16/pi'
    """
    if ambient_dim < 1:
        raise TopologyError("ambient dimension must be positive")
    return MonotonicityConstant(Fraction(2 * (ambient_dim + 1)))


# ---------------------------------------------------------------------------
# Mayer-Vietoris spin check


def mayer_vietoris_spin_check(l1: GradedGroup, l2: GradedGroup, s: GradedGroup,
                              restriction_ranks: dict[int, int]) -> bool:
    """Rank check over Z_2 for a space glued from two pieces along s.

    Inputs are Z_2-cohomology dimension tables (entries are elementary
    abelian 2-groups) for the pieces and the intersection, plus the
    declared ranks of the degreewise restriction from the first piece
    to s.  Returns True when the declared restriction is surjective in
    degrees 1 and 2, which by Mayer-Vietoris exactness forces the
    pullback to the pieces to be injective in degrees 1 and 2; with
    spin pieces that pins w_1 and w_2 of the glued space to zero.
    Degree 0 surjectivity is automatic for connected pieces.

    Returns False (inconclusive) when the surjectivity hypothesis
    fails; raises on missing or impossible rank data.
    """

    def dim_at(table: GradedGroup, k: int) -> int:
        grp = table.entry(k)
        if not grp.is_elementary_two():
            raise TopologyError(f"degree {k}: expected an elementary abelian 2-group")
        return len(grp.torsion)

    for k in (1, 2):
        if k not in restriction_ranks:
            raise TopologyError(f"missing restriction rank in degree {k}")
        rank = restriction_ranks[k]
        if rank < 0 or rank > min(dim_at(l1, k), dim_at(s, k)):
            raise TopologyError(
                f"degree {k}: restriction rank {rank} exceeds the possible range")
    return all(restriction_ranks[k] == dim_at(s, k) for k in (1, 2))
