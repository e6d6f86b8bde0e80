"""Almost-constancy measurement and the regular-Bohr-neighborhood search.

A function is eps-constant on B when its values there span an open interval
of length eps; it is zeta-almost eps-constant when this holds after removing
a set of measure at most zeta (the absolute-defect convention
mu(B') >= mu(B) - zeta). The search enumerates Bohr candidates and accepts
the first whose worst translate defect fits the zeta budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bohr import BohrSpec, SearchSpace, enumerate_bohr_candidates
from .groups import FiniteGroup, GroupFunction, Subset

WINDOW_GUARD = 1e-12


@dataclass(frozen=True)
class ZetaRule:
    """A defect budget zeta(delta, n), supplied as a constant, the power form
    gamma * (delta / c)^(n^2), or an explicit table."""

    kind: str
    params: tuple = ()
    table_values: Optional[dict] = None

    @classmethod
    def constant(cls, value: float) -> "ZetaRule":
        if value <= 0:
            raise ValueError("zeta values must be positive")
        return cls("const", (float(value),))

    @classmethod
    def power(cls, gamma: float, c: float) -> "ZetaRule":
        if gamma <= 0 or c <= 0:
            raise ValueError("zeta parameters must be positive")
        return cls("power", (float(gamma), float(c)))

    @classmethod
    def table(cls, mapping: dict) -> "ZetaRule":
        if any(v <= 0 for v in mapping.values()):
            raise ValueError("zeta values must be positive")
        return cls("table", (), dict(mapping))

    def value(self, delta: float, n: int) -> float:
        if self.kind == "const":
            return self.params[0]
        if self.kind == "power":
            gamma, c = self.params
            return gamma * (delta / c) ** (n * n)
        return self.table_values[(delta, n)]

    def describe(self) -> str:
        if self.kind == "const":
            return f"const:{self.params[0]!r}"
        if self.kind == "power":
            return f"power:{self.params[0]!r},{self.params[1]!r}"
        return "table"

    @classmethod
    def parse(cls, text: str) -> "ZetaRule":
        head, _, rest = text.partition(":")
        if head == "const":
            return cls.constant(float(rest))
        if head == "power":
            gamma, c = rest.split(",")
            return cls.power(float(gamma), float(c))
        raise ValueError(f"cannot parse zeta rule {text!r}")


@dataclass(frozen=True)
class RegularityBudget:
    """Search parameters: zeta budget, target eps, and enumeration caps."""

    zeta: ZetaRule
    eps: float
    space: SearchSpace = field(default_factory=SearchSpace)


@dataclass(frozen=True)
class TranslateDefect:
    """Almost-constancy data for one translate gB."""

    rep_element: int
    defect: float
    value_range: float
    subset_indices: tuple[int, ...]


@dataclass(frozen=True)
class RegularityCertificate:
    """Per-translate defects of f against a Bohr spec at a given eps."""

    spec: BohrSpec
    epsilon: float
    per_translate: tuple[TranslateDefect, ...]
    max_defect: float
    zeta_budget: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {
            "bohr_spec": self.spec.to_json_dict(),
            "epsilon": self.epsilon,
            "zeta_value": self.zeta_budget,
            "max_defect": self.max_defect,
            "per_translate": [
                {"rep_element": t.rep_element, "defect": t.defect,
                 "range": t.value_range}
                for t in self.per_translate
            ],
        }


@dataclass(frozen=True)
class RegularitySearchResult:
    status: str  # "ok" | "none-within-budget"
    certificate: Optional[RegularityCertificate]
    candidates_scored: int


def largest_eps_constant_subset(f: GroupFunction, b: Subset, eps: float) -> Subset:
    """A maximum-cardinality B' <= B on which f has value range < eps.

    Exact: sort the values on B and slide a window of range < eps (with a
    1e-12 guard against float-boundary flips); ties break toward the
    earliest window in sorted order.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if f.group is not b.group:
        raise ValueError("function and subset live on different groups")
    idx = b.indices
    if idx.size == 0:
        return Subset.empty(b.group)
    vals = f.values[idx]
    order = np.lexsort((idx, vals))
    svals = vals[order]
    best_lo, best_len = 0, 1
    lo = 0
    for hi in range(len(svals)):
        while svals[hi] - svals[lo] >= eps - WINDOW_GUARD:
            lo += 1
        if hi - lo + 1 > best_len:
            best_lo, best_len = lo, hi - lo + 1
    chosen = idx[order[best_lo:best_lo + best_len]]
    return Subset.from_indices(b.group, chosen)


def translate_defect(f: GroupFunction, spec: BohrSpec,
                     eps: float) -> RegularityCertificate:
    """Defect mu(gB) - mu(B') on a transversal of the distinct translates gB."""
    grp = f.group
    b_idx = spec.realized.indices
    if b_idx.size == 0:
        raise ValueError("Bohr set is empty")
    seen: dict[bytes, int] = {}
    entries: list[TranslateDefect] = []
    for g in grp.elements():
        mask = np.zeros(grp.order, dtype=bool)
        mask[grp.table[g, b_idx]] = True
        key = mask.tobytes()
        if key in seen:
            continue
        seen[key] = g
        translate = Subset(grp, mask)
        sub = largest_eps_constant_subset(f, translate, eps)
        vals_on_sub = f.values[sub.indices]
        rng = float(vals_on_sub.max() - vals_on_sub.min()) if len(sub) else 0.0
        entries.append(TranslateDefect(
            rep_element=g,
            defect=translate.measure - sub.measure,
            value_range=rng,
            subset_indices=tuple(int(i) for i in sub.indices)))
    max_defect = max(e.defect for e in entries)
    return RegularityCertificate(spec=spec, epsilon=eps,
                                 per_translate=tuple(entries),
                                 max_defect=max_defect)


def search_regular_bohr(f: GroupFunction,
                        budget: RegularityBudget) -> RegularitySearchResult:
    """First Bohr spec (in preference order) whose max translate defect is
    within zeta(delta, n); explicit none-within-budget status otherwise."""
    scored = 0
    for spec in enumerate_bohr_candidates(f.group, budget.space):
        scored += 1
        if len(spec.realized) == 0:
            continue
        cert = translate_defect(f, spec, budget.eps)
        allowance = budget.zeta.value(spec.delta, spec.tau.dim)
        if cert.max_defect <= allowance:
            cert = RegularityCertificate(
                spec=cert.spec, epsilon=cert.epsilon,
                per_translate=cert.per_translate,
                max_defect=cert.max_defect, zeta_budget=allowance)
            return RegularitySearchResult("ok", cert, scored)
    return RegularitySearchResult("none-within-budget", None, scored)


# ---------------------------------------------------------------------------
# Subgroup obstruction


@dataclass(frozen=True)
class SubgroupDefectRow:
    members: tuple[int, ...]
    index: int
    max_defect: float
    passes: bool


@dataclass(frozen=True)
class ObstructionReport:
    epsilon: float
    zeta: float
    index_cap: int
    rows: tuple[SubgroupDefectRow, ...]

    @property
    def any_pass(self) -> bool:
        return any(r.passes for r in self.rows)


def _closure(group: FiniteGroup, seed_elems: frozenset[int]) -> frozenset[int]:
    elems = set(seed_elems) | {group.identity}
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(elems):
                for c in (group.mul(a, b), group.mul(b, a)):
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(elems)


def _all_subgroups(group: FiniteGroup) -> list[frozenset[int]]:
    """Every subgroup, by join-closure of the cyclic subgroups (order <= 60)."""
    if group.order > 60:
        raise ValueError("subgroup enumeration caps at order 60")
    cyclics = set()
    for g in group.elements():
        cyc, x = {group.identity}, g
        while x != group.identity:
            cyc.add(x)
            x = group.mul(x, g)
        cyclics.add(frozenset(cyc))
    subgroups = set(cyclics)
    worklist = list(cyclics)
    while worklist:
        h = worklist.pop()
        for other in list(subgroups):
            joined = _closure(group, h | other)
            if joined not in subgroups:
                subgroups.add(joined)
                worklist.append(joined)
    return sorted(subgroups, key=lambda s: (len(s), sorted(s)))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(math.isqrt(n)) + 1))


def subgroup_obstruction_check(f: GroupFunction, eps: float, index_cap: int,
                               zeta: Optional[float] = None) -> ObstructionReport:
    """Per-subgroup defect table for all subgroups of index <= index_cap.

    A subgroup passes when f is zeta-almost eps-constant on all of its cosets
    (zeta defaults to eps). Cyclic groups of prime order shortcut to {G};
    otherwise subgroups are enumerated by brute force for order <= 60.
    """
    grp = f.group
    if zeta is None:
        zeta = eps
    if _is_prime(grp.order):
        candidates = [frozenset(grp.elements())]
        if index_cap >= grp.order:
            candidates.append(frozenset({grp.identity}))
    else:
        candidates = [h for h in _all_subgroups(grp)
                      if grp.order // len(h) <= index_cap]
    rows = []
    for h in candidates:
        h_sub = Subset.from_indices(grp, h)
        seen: set[bytes] = set()
        worst = 0.0
        for g in grp.elements():
            mask = np.zeros(grp.order, dtype=bool)
            mask[grp.table[g, h_sub.indices]] = True
            key = mask.tobytes()
            if key in seen:
                continue
            seen.add(key)
            coset = Subset(grp, mask)
            sub = largest_eps_constant_subset(f, coset, eps)
            worst = max(worst, coset.measure - sub.measure)
        rows.append(SubgroupDefectRow(
            members=tuple(sorted(h)), index=grp.order // len(h),
            max_defect=worst, passes=worst <= zeta))
    return ObstructionReport(epsilon=eps, zeta=zeta, index_cap=index_cap,
                             rows=tuple(rows))
