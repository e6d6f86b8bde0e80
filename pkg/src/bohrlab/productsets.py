"""Bohr neighborhoods inside product sets, covering lemmas, quasirandom
products, and shift almost-invariance.

Every probabilistic-sounding claim here is checked with exact counting; set
containments are verified exhaustively and re-verifiable from the returned
flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .bohr import (BohrSpec, SearchSpace, bohr_set, enumerate_bohr_candidates,
                   is_symmetric)
from .convolve import _lp, convolve, overlap_function
from .groups import FiniteGroup, GroupFunction, Subset, inverse_set, product_set
from .regularity import ZetaRule
from .reps import direct_sum_hom, min_nontrivial_dim


@dataclass(frozen=True)
class SeparatedCover:
    """Greedy separated set F and high-overlap set S with G = F.S."""

    threshold: float
    s_set: Subset
    f_elements: tuple[int, ...]
    covers: bool

    @property
    def count(self) -> int:
        return len(self.f_elements)


def separated_cover(a: Subset, alpha: float) -> SeparatedCover:
    """Build S = {x : mu(A intersect xA) > alpha^2/2} and a maximal separated
    set F (mu(gA intersect hA) <= alpha^2/2 for distinct g, h in F), scanning
    elements in index order. Verifies G = F.S and |F| <= 2/alpha.
    """
    grp = a.group
    alpha_fr = Fraction(alpha)
    if Fraction(len(a), grp.order) < alpha_fr:
        raise ValueError(f"mu(A) = {len(a)}/{grp.order} < alpha = {alpha}")
    eps_fr = alpha_fr ** 2 / 2
    counts = overlap_function(a).values * grp.order  # |A intersect xA|, integral
    counts = np.rint(counts).astype(np.int64)
    s_mask = np.array([Fraction(int(c), grp.order) > eps_fr for c in counts])
    f_elems: list[int] = []
    for g in grp.elements():
        # mu(gA intersect hA) = overlap(g^-1 h)
        if all(Fraction(int(counts[grp.table[grp.inverse[g], h]]), grp.order) <= eps_fr
               for h in f_elems):
            f_elems.append(g)
    if Fraction(len(f_elems)) * alpha_fr > 2:
        raise RuntimeError("separated set exceeds the 2/alpha bound")
    covered = np.zeros(grp.order, dtype=bool)
    s_idx = np.flatnonzero(s_mask)
    for g in f_elems:
        covered[grp.table[g, s_idx]] = True
    if not covered.all():
        raise RuntimeError("F.S failed to cover the group")
    return SeparatedCover(threshold=float(eps_fr), s_set=Subset(grp, s_mask),
                          f_elements=tuple(f_elems), covers=True)


@dataclass(frozen=True)
class CoveringCheck:
    mode: str
    hypothesis_met: bool
    conclusion_holds: Optional[bool]
    witness: dict


def covering_containment_check(mode: str, *, x: Subset | None = None,
                               y: Subset | None = None, c: Subset | None = None,
                               d: Subset | None = None,
                               k: int | None = None) -> CoveringCheck:
    """Verify one of the two covering lemmas exhaustively.

    symmetric mode (x, y): if 1 in X and mu(X^2 \\ Y) < mu(X)/2 then the
    conclusion X <= Y Y^-1 is checked. translate mode (c, x, d, k): if
    X = X^-1, G is covered by <= k left translates of X (certified by the
    greedy cover), and |X^2 \\ D| < |C|/k, then C D^-1 must contain a left
    translate of X. When hypotheses fail the check reports that instead of a
    conclusion; a hypothesis-holding violation is a hard failure upstream.
    """
    if mode == "symmetric":
        if x is None or y is None:
            raise ValueError("symmetric mode requires x and y")
        grp = x.group
        if len(x) == 0 or grp.identity not in x:
            return CoveringCheck(mode, False, None, {"reason": "identity not in X"})
        xx = product_set(x, x)
        gap = len(xx.difference(y))
        if 2 * gap >= len(x):
            return CoveringCheck(mode, False, None,
                                 {"reason": "mu(X^2\\Y) >= mu(X)/2", "gap": gap})
        target = product_set(y, inverse_set(y))
        ok = x.is_subset_of(target)
        witness = {}
        if not ok:
            witness["violator"] = int(x.difference(target).indices[0])
        return CoveringCheck(mode, True, ok, witness)

    if mode == "translate":
        if c is None or x is None or d is None or k is None:
            raise ValueError("translate mode requires c, x, d, k")
        grp = x.group
        if len(x) == 0 or not is_symmetric(x):
            return CoveringCheck(mode, False, None, {"reason": "X not symmetric"})
        from .bohr import greedy_cover
        count, _ = greedy_cover(grp, x)
        if count > k:
            return CoveringCheck(mode, False, None,
                                 {"reason": "greedy cover exceeds k", "count": count})
        xx = product_set(x, x)
        if k * len(xx.difference(d)) >= len(c):
            return CoveringCheck(mode, False, None,
                                 {"reason": "|X^2\\D| >= |C|/k"})
        target = product_set(c, inverse_set(d))
        x_idx = x.indices
        rows = grp.table[:, x_idx]
        hit = target.mask[rows].all(axis=1)
        ok = bool(hit.any())
        witness = {"translate": int(np.argmax(hit))} if ok else {}
        return CoveringCheck(mode, True, ok, witness)

    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Bogolyubov-type searches


@dataclass(frozen=True)
class BogolyubovResult:
    alpha: float
    status: str  # "ok" | "none-within-budget"
    spec: Optional[BohrSpec]
    contained: dict = field(default_factory=dict)
    g_best: Optional[int] = None
    defect_count: Optional[int] = None
    claim1: Optional[dict] = None
    candidates_scored: int = 0


def _require_density(a: Subset, alpha: float, name: str = "A") -> Fraction:
    alpha_fr = Fraction(alpha)
    if Fraction(len(a), a.group.order) < alpha_fr:
        raise ValueError(f"mu({name}) = {len(a)}/{a.group.order} < alpha = {alpha}")
    return alpha_fr


def _first_contained_spec(group: FiniteGroup, target: Subset,
                          space: SearchSpace) -> tuple[Optional[BohrSpec], int]:
    scored = 0
    for spec in enumerate_bohr_candidates(group, space):
        scored += 1
        if len(spec.realized) and spec.realized.is_subset_of(target):
            return spec, scored
    return None, scored


def bogolyubov_search(a: Subset, alpha: float,
                      space: SearchSpace = SearchSpace()) -> BogolyubovResult:
    """First Bohr spec with realized set inside (A A^-1)^2, exhaustively
    verified; none-within-budget status otherwise."""
    _require_density(a, alpha)
    diff = product_set(a, inverse_set(a))
    target = product_set(diff, diff)
    spec, scored = _first_contained_spec(a.group, target, space)
    if spec is None:
        return BogolyubovResult(alpha, "none-within-budget", None,
                                candidates_scored=scored)
    return BogolyubovResult(alpha, "ok", spec,
                            contained={"(AA^-1)^2": True},
                            candidates_scored=scored)


def two_set_bogolyubov(a: Subset, b: Subset, alpha: float, zeta: ZetaRule,
                       space: SearchSpace = SearchSpace()) -> BogolyubovResult:
    """Two-set Bogolyubov: find U with (i) |gU \\ AB| < zeta(delta,n)|G| for
    the best g, (ii) A B A^-1 containing a translate of U, and (iii)
    U <= AB (AB)^-1, all verified exhaustively.

    First asserts, in exact integer arithmetic, that
    S = {x : (1_A * 1_B)(x) > alpha^2/2} has |S| >= (alpha^2/2)|G|.
    """
    grp = a.group
    if b.group is not grp:
        raise ValueError("A and B must live on the same group")
    alpha_fr = _require_density(a, alpha, "A")
    _require_density(b, alpha, "B")
    eps_fr = alpha_fr ** 2 / 2

    # integer counts c(x) = |A intersect x B^-1| = |G| (1_A * 1_B)(x)
    binv_rows = b.mask[grp.table[grp.inverse, :]]
    counts = (a.mask.astype(np.int64) @ binv_rows).astype(np.int64)
    assert int(counts.sum()) == len(a) * len(b)  # Fubini, exact
    s_size = sum(1 for cx in counts if Fraction(int(cx), grp.order) > eps_fr)
    if Fraction(s_size, grp.order) < eps_fr:
        raise RuntimeError("level-set lower bound failed (should be impossible)")
    claim1 = {"s_size": s_size, "bound": float(eps_fr) * grp.order}

    ab = product_set(a, b)
    aba = product_set(ab, inverse_set(a))
    quad = product_set(ab, inverse_set(ab))

    scored = 0
    for spec in enumerate_bohr_candidates(grp, space):
        scored += 1
        u_idx = spec.realized.indices
        if u_idx.size == 0:
            continue
        rows = grp.table[:, u_idx]
        out_counts = (~ab.mask[rows]).sum(axis=1)
        g_best = int(np.argmin(out_counts))
        defect = int(out_counts[g_best])
        cond_i = defect < zeta.value(spec.delta, spec.tau.dim) * grp.order
        cond_ii = bool(aba.mask[rows].all(axis=1).any())
        cond_iii = spec.realized.is_subset_of(quad)
        if cond_i and cond_ii and cond_iii:
            return BogolyubovResult(
                alpha, "ok", spec,
                contained={"i": True, "ii": True, "iii": True},
                g_best=g_best, defect_count=defect, claim1=claim1,
                candidates_scored=scored)
    return BogolyubovResult(alpha, "none-within-budget", None, claim1=claim1,
                            candidates_scored=scored)


@dataclass(frozen=True)
class FourProductResult:
    status: str
    spec: Optional[BohrSpec]
    per_product: tuple
    contained: bool


def four_product_bohr(a: Subset, alpha: float,
                      space: SearchSpace = SearchSpace()) -> FourProductResult:
    """Find one Bohr spec inside all four product sets
    (AA^-1)^2, (A^-1 A)^2, A^2 A^-2, A^-2 A^2, by combining per-product specs
    block-diagonally at the smallest of their radii."""
    _require_density(a, alpha)
    grp = a.group
    ainv = inverse_set(a)
    targets = {
        "(AA^-1)^2": product_set(product_set(a, ainv), product_set(a, ainv)),
        "(A^-1A)^2": product_set(product_set(ainv, a), product_set(ainv, a)),
        "A^2A^-2": product_set(product_set(a, a), product_set(ainv, ainv)),
        "A^-2A^2": product_set(product_set(ainv, ainv), product_set(a, a)),
    }
    found: list[BohrSpec] = []
    for name, target in targets.items():
        spec, _ = _first_contained_spec(grp, target, space)
        if spec is None:
            return FourProductResult("none-within-budget", None,
                                     tuple(found), False)
        found.append(spec)
    combined_tau = direct_sum_hom([s.tau for s in found])
    delta = min(s.delta for s in found)
    combined = bohr_set(grp, combined_tau, delta)
    contained = all(combined.realized.is_subset_of(t) for t in targets.values())
    if not contained:
        raise RuntimeError("combined Bohr set escaped the intersection")
    return FourProductResult("ok", combined, tuple(found), True)


@dataclass(frozen=True)
class QuasirandomCheck:
    ab_density: float
    abc_covers: bool
    d: int


def quasirandom_check(a: Subset, b: Subset, c: Subset, alpha: float,
                      seed: int = 0) -> QuasirandomCheck:
    """Exact |AB|/|G| and whether ABC = G, with the quasirandomness degree d
    (minimum nontrivial irreducible dimension) reported alongside."""
    grp = a.group
    for name, s in (("A", a), ("B", b), ("C", c)):
        _require_density(s, alpha, name)
    ab = product_set(a, b)
    abc = product_set(ab, c)
    return QuasirandomCheck(ab_density=len(ab) / grp.order,
                            abc_covers=len(abc) == grp.order,
                            d=min_nontrivial_dim(grp, seed))


@dataclass(frozen=True)
class ShiftInvarianceResult:
    status: str
    spec: Optional[BohrSpec]
    sup_norm: Optional[float]
    degenerate: bool = False
    candidates_scored: int = 0


def shift_invariance_search(f: GroupFunction, p: float, eps: float,
                            space: SearchSpace = SearchSpace(),
                            min_size: int = 1) -> ShiftInvarianceResult:
    """First Bohr spec B with sup over t in B of ||f_t - f||_p < eps.

    The singleton Bohr set trivially passes and is flagged degenerate;
    ``min_size`` can exclude it (and other small sets).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    grp = f.group
    scored = 0
    for spec in enumerate_bohr_candidates(grp, space):
        scored += 1
        members = spec.realized.indices
        if members.size < max(1, min_size):
            continue
        sup = 0.0
        ok = True
        for t in members:
            shifted = f.values[grp.table[t, :]]
            nrm = _lp(shifted - f.values, p)
            sup = max(sup, nrm)
            if sup >= eps:
                ok = False
                break
        if ok:
            return ShiftInvarianceResult("ok", spec, sup,
                                         degenerate=members.size == 1,
                                         candidates_scored=scored)
    return ShiftInvarianceResult("none-within-budget", None, None,
                                 candidates_scored=scored)
