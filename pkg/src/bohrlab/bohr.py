"""(delta,K)-Bohr neighborhoods from unitary homomorphisms.

A Bohr neighborhood is the preimage under a homomorphism tau: G -> U(n) of
the open identity ball of radius delta in the operator-norm metric. This
module constructs them, measures covering numbers, tests subgroup structure,
and refines them through a diagonal normal subgroup of the image when one
exists in the stored basis.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .groups import FiniteGroup, Subset, inverse_set
from .reps import UnitaryRep, direct_sum_hom, irreps_of

logger = logging.getLogger("bohrlab.bohr")

BOUNDARY_TOL = 1e-12
IMAGE_MATCH_TOL = 1e-6
DIAGONAL_TOL = 1e-8
DEFAULT_DELTA_GRID = (2.0, 1.0, 0.5, 0.25, 0.15, 0.1, 0.05)


class NoDiagonalRefinementError(ValueError):
    """The image has no diagonal normal subgroup in the stored basis."""


@dataclass(frozen=True)
class BohrSpec:
    """A realized Bohr neighborhood: homomorphism, radius, and element set.

    ``kind`` is ``torus`` when every matrix of tau is diagonal, ``nm`` for a
    refinement through a diagonal normal image subgroup (then ``m`` is its
    index and ``nm_subgroup`` the subgroup inside the image group), and
    ``unitary`` otherwise.
    """

    tau: UnitaryRep
    delta: float
    kind: str
    realized: Subset
    m: int = 1
    nm_subgroup: Optional[Subset] = None
    boundary_excluded: tuple[int, ...] = field(default=())

    @property
    def group(self) -> FiniteGroup:
        return self.tau.group

    def to_json_dict(self) -> dict:
        return {
            "descriptor": self.group.descriptor,
            "irrep_multiset": self.tau.label.split("+"),
            "delta": self.delta,
            "kind": self.kind,
            "m": self.m,
            "realized_members": [int(i) for i in self.realized.indices],
        }


def bohr_set(group: FiniteGroup, tau: UnitaryRep, delta: float) -> BohrSpec:
    """The (delta, U(n))-Bohr neighborhood {g : ||tau(g) - I||_op < delta}.

    Membership is strict (open ball); elements whose distance sits within
    1e-12 of delta are excluded and logged as boundary cases.
    """
    if tau.group is not group:
        raise ValueError("tau is not a representation of the given group")
    if not 0.0 < delta <= 2.0:
        raise ValueError(f"delta must lie in (0, 2], got {delta}")
    dist = tau.identity_distances()
    boundary = np.flatnonzero(np.abs(dist - delta) <= BOUNDARY_TOL)
    mask = dist < delta - BOUNDARY_TOL
    if boundary.size:
        logger.debug("bohr_set %s delta=%g: excluded boundary elements %s",
                     tau.label, delta, boundary.tolist())
    kind = "torus" if tau.is_diagonal else "unitary"
    return BohrSpec(tau=tau, delta=float(delta), kind=kind,
                    realized=Subset(group, mask),
                    boundary_excluded=tuple(int(b) for b in boundary))


def greedy_cover(group: FiniteGroup, b: Subset) -> tuple[int, list[int]]:
    """Cover G by left translates of B, greedily.

    Each step picks the translate covering the most uncovered elements, ties
    broken by smallest translating element; the count upper-bounds the true
    covering number.
    """
    if b.group is not group:
        raise ValueError("subset belongs to a different group")
    if len(b) == 0:
        raise ValueError("cannot cover with an empty set")
    translate_rows = group.table[:, b.indices]  # row g = elements of gB
    uncovered = np.ones(group.order, dtype=bool)
    picks: list[int] = []
    while uncovered.any():
        gains = uncovered[translate_rows].sum(axis=1)
        g = int(np.argmax(gains))
        picks.append(g)
        uncovered[translate_rows[g]] = False
    return len(picks), picks


def subgroup_test(b: Subset) -> tuple[bool, bool]:
    """Exhaustive closure and conjugation checks.

    Returns (is_subgroup, is_normal) where normality means gBg^-1 = B for
    every g (checked whether or not B is a subgroup).
    """
    grp = b.group
    idx = b.indices
    if idx.size == 0:
        return False, False
    closed = bool(b.mask[grp.table[np.ix_(idx, idx)]].all())
    has_identity = grp.identity in b
    has_inverses = bool(b.mask[grp.inverse[idx]].all())
    is_subgroup = closed and has_identity and has_inverses

    is_normal = True
    for g in grp.elements():
        conj = grp.table[grp.table[g, idx], grp.inverse[g]]
        if not b.mask[conj].all():
            is_normal = False
            break
    return is_subgroup, is_normal


# ---------------------------------------------------------------------------
# Image groups and (delta, n, m) refinement


def image_group(tau: UnitaryRep) -> tuple[FiniteGroup, np.ndarray, np.ndarray]:
    """Enumerate tau(G) as a finite matrix group.

    Matrices are identified within 1e-6 entrywise. Returns the image as a
    validated FiniteGroup, the element -> image-index map, and the stack of
    representative matrices.
    """
    grp = tau.group
    reps_list: list[np.ndarray] = []
    elem_to_img = np.zeros(grp.order, dtype=np.int64)
    for g in grp.elements():
        m = tau.matrices[g]
        for i, r in enumerate(reps_list):
            if np.max(np.abs(m - r)) < IMAGE_MATCH_TOL:
                elem_to_img[g] = i
                break
        else:
            elem_to_img[g] = len(reps_list)
            reps_list.append(m)
    k = len(reps_list)
    stack = np.stack(reps_list)
    table = np.zeros((k, k), dtype=np.int32)
    for a in range(k):
        prods = np.einsum("ij,bjk->bik", stack[a], stack)
        for b in range(k):
            diffs = np.max(np.abs(stack - prods[b]), axis=(1, 2))
            j = int(np.argmin(diffs))
            if diffs[j] >= IMAGE_MATCH_TOL:
                raise RuntimeError("image not closed under multiplication")
            table[a, b] = j
    img = FiniteGroup(table, descriptor=f"image:{tau.label}")
    return img, elem_to_img, stack


def nm_refine(group: FiniteGroup, tau: UnitaryRep,
              delta: float) -> tuple[BohrSpec, int]:
    """Refine a Bohr set through the diagonal part of the image.

    Finds K = the diagonal matrices of tau(G) in the stored basis; when K is
    a normal subgroup of the image, returns the (delta, n, m)-Bohr set
    tau^-1(U intersect K) with m the index of K, contained in the plain
    Bohr set. Raises NoDiagonalRefinementError otherwise.
    """
    base = bohr_set(group, tau, delta)
    img, elem_to_img, stack = image_group(tau)
    d = tau.dim
    off_diag = stack * (1.0 - np.eye(d))
    diag_mask = np.max(np.abs(off_diag), axis=(1, 2)) <= DIAGONAL_TOL
    k_sub = Subset(img, diag_mask)
    is_sub, is_norm = subgroup_test(k_sub)
    if not (is_sub and is_norm):
        raise NoDiagonalRefinementError("no diagonal refinement in given basis")
    m = img.order // len(k_sub)
    realized = Subset(group, base.realized.mask & diag_mask[elem_to_img])
    spec = BohrSpec(tau=tau, delta=float(delta), kind="nm", realized=realized,
                    m=m, nm_subgroup=k_sub,
                    boundary_excluded=base.boundary_excluded)
    return spec, m


def cover_bound_check(spec: BohrSpec, ell: int | None = None) -> tuple[int, int, bool]:
    """Check the measured cover count against m * ceil(2*pi/delta)^n.

    Requires an nm-kind spec. Returns (bound, actual, ok).
    """
    if spec.kind != "nm":
        raise ValueError("cover_bound_check requires an nm-kind Bohr spec")
    if ell is None:
        ell = math.ceil(2.0 * math.pi / spec.delta)
    bound = spec.m * ell ** spec.tau.dim
    actual, _ = greedy_cover(spec.group, spec.realized)
    return bound, actual, actual <= bound


# ---------------------------------------------------------------------------
# Candidate enumeration shared by the search operations


@dataclass(frozen=True)
class SearchSpace:
    """Budgeted enumeration space over direct sums of computed irreducibles."""

    delta_grid: tuple[float, ...] = DEFAULT_DELTA_GRID
    max_dim: int = 8
    max_summands: int = 3
    max_candidates: int = 5000
    seed: int = 0


def enumerate_bohr_candidates(group: FiniteGroup,
                              space: SearchSpace = SearchSpace()) -> Iterator[BohrSpec]:
    """Yield candidate Bohr specs in preference order.

    Order: smaller total dimension n first, then larger delta, then fewer
    irrep summands, then lexicographic irrep indices. Stops after
    ``space.max_candidates`` yields.
    """
    irreps = irreps_of(group, space.seed)
    dims = [ir.dim for ir in irreps]
    grid = tuple(sorted(set(space.delta_grid), reverse=True))

    combos_by_n: dict[int, list[tuple[int, ...]]] = {}
    for count in range(1, space.max_summands + 1):
        for combo in itertools.combinations(range(len(irreps)), count):
            n = sum(dims[i] for i in combo)
            if n <= space.max_dim:
                combos_by_n.setdefault(n, []).append(combo)
    # within each n paragraph, fewer summands first, then lex order
    for n in combos_by_n:
        combos_by_n[n].sort(key=lambda c: (len(c), c))

    rep_cache: dict[tuple[int, ...], UnitaryRep] = {}
    yielded = 0
    for n in sorted(combos_by_n):
        for delta in grid:
            for combo in combos_by_n[n]:
                if yielded >= space.max_candidates:
                    return
                rep = rep_cache.get(combo)
                if rep is None:
                    rep = direct_sum_hom([irreps[i].rep for i in combo])
                    rep_cache[combo] = rep
                yield bohr_set(group, rep, delta)
                yielded += 1


def is_symmetric(subset: Subset) -> bool:
    """True when A = A^-1."""
    return subset == inverse_set(subset)
