"""Finite groups as validated Cayley tables, with subsets and bounded functions.

Elements are dense indices 0..order-1 and every higher layer addresses them
only by index. Each constructor validates the table (Latin square,
associativity, identity, inverses) before returning, so downstream code may
assume a genuine group. The measure is always normalized counting:
mu(A) = |A| / order.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce

import numpy as np

MAX_ORDER = 2048
EXHAUSTIVE_ASSOC_CAP = 256
SAMPLED_ASSOC_TRIPLES = 1_000_000
VALUE_TOL = 1e-12


class GroupValidationError(ValueError):
    """A Cayley table failed validation; ``witness`` localizes the failure."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class FiniteGroup:
    """A finite group on elements 0..order-1 backed by a Cayley table.

    Immutable after construction. ``table[a, b]`` is the product a*b,
    ``inverse[a]`` the inverse of a, ``identity`` the identity index.
    """

    def __init__(self, table, descriptor: str = "table", *,
                 assoc_cap: int = EXHAUSTIVE_ASSOC_CAP, sample_seed: int = 0):
        table = np.array(table, dtype=np.int32, order="C")
        _validate_table(table, assoc_cap=assoc_cap, sample_seed=sample_seed)
        self.table = table
        self.order = int(table.shape[0])
        self.identity = _find_identity(table)
        self.inverse = np.ascontiguousarray(
            np.argmax(table == self.identity, axis=1).astype(np.int32))
        self.descriptor = descriptor
        self.table.setflags(write=False)
        self.inverse.setflags(write=False)
        self._abelian: bool | None = None
        self._exponent: int | None = None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conjugate(self, g: int, a: int) -> int:
        """Return g * a * g^-1."""
        return int(self.table[self.table[g, a], self.inverse[g]])

    def elements(self) -> range:
        return range(self.order)

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = bool(np.array_equal(self.table, self.table.T))
        return self._abelian

    def element_order(self, a: int) -> int:
        k, x = 1, int(a)
        while x != self.identity:
            x = int(self.table[x, a])
            k += 1
        return k

    def exponent(self) -> int:
        if self._exponent is None:
            self._exponent = reduce(
                math.lcm, (self.element_order(a) for a in self.elements()), 1)
        return self._exponent

    def __repr__(self) -> str:
        return f"FiniteGroup({self.descriptor!r}, order={self.order})"


def _validate_table(table: np.ndarray, *, assoc_cap: int, sample_seed: int) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise GroupValidationError(f"table must be square, got shape {table.shape}")
    n = table.shape[0]
    if n < 1:
        raise GroupValidationError("group order must be positive")
    if n > MAX_ORDER:
        raise GroupValidationError(f"order {n} exceeds cap {MAX_ORDER}")
    if table.min() < 0 or table.max() >= n:
        bad = np.argwhere((table < 0) | (table >= n))[0]
        raise GroupValidationError(
            f"entry out of range at {tuple(bad)}", witness=tuple(int(x) for x in bad))

    ident = np.arange(n, dtype=np.int32)
    for axis, name in ((1, "row"), (0, "column")):
        sorted_lines = np.sort(table, axis=axis)
        ok = (sorted_lines == (ident[None, :] if axis == 1 else ident[:, None])).all(axis=axis)
        if not ok.all():
            bad = int(np.argmin(ok))
            raise GroupValidationError(
                f"not a Latin square: {name} {bad} is not a permutation", witness=bad)

    if _find_identity(table, required=False) is None:
        raise GroupValidationError("no identity element")

    if n <= assoc_cap:
        for a in range(n):
            lhs = table[table[a, :], :]          # (a*b)*c
            rhs = table[a, :][table]             # a*(b*c)
            if not np.array_equal(lhs, rhs):
                b, c = (int(x) for x in np.argwhere(lhs != rhs)[0])
                raise GroupValidationError(
                    f"not associative at ({a},{b},{c})", witness=(a, b, c))
    else:
        rng = np.random.default_rng(sample_seed)
        m = SAMPLED_ASSOC_TRIPLES
        a = rng.integers(0, n, m)
        b = rng.integers(0, n, m)
        c = rng.integers(0, n, m)
        lhs = table[table[a, b], c]
        rhs = table[a, table[b, c]]
        if not np.array_equal(lhs, rhs):
            i = int(np.argmin(lhs == rhs))
            raise GroupValidationError(
                f"not associative at ({a[i]},{b[i]},{c[i]})",
                witness=(int(a[i]), int(b[i]), int(c[i])))


def _find_identity(table: np.ndarray, required: bool = True) -> int | None:
    n = table.shape[0]
    ident = np.arange(n, dtype=table.dtype)
    rows = (table == ident[None, :]).all(axis=1)
    cols = (table == ident[:, None]).all(axis=0)
    hits = np.flatnonzero(rows & cols)
    if hits.size == 0:
        if required:
            raise GroupValidationError("no identity element")
        return None
    return int(hits[0])


class Subset:
    """Immutable subset of a FiniteGroup, stored as a boolean mask."""

    def __init__(self, group: FiniteGroup, mask):
        mask = np.array(mask, dtype=bool, order="C")
        if mask.shape != (group.order,):
            raise ValueError(f"mask length {mask.shape} != order {group.order}")
        self.group = group
        self.mask = mask
        self.mask.setflags(write=False)
        self._indices: np.ndarray | None = None

    @classmethod
    def from_indices(cls, group: FiniteGroup, indices) -> "Subset":
        mask = np.zeros(group.order, dtype=bool)
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= group.order):
            raise ValueError("subset index out of range")
        mask[idx] = True
        return cls(group, mask)

    @classmethod
    def full(cls, group: FiniteGroup) -> "Subset":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def empty(cls, group: FiniteGroup) -> "Subset":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def singleton(cls, group: FiniteGroup, g: int) -> "Subset":
        return cls.from_indices(group, [g])

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = np.flatnonzero(self.mask)
            self._indices.setflags(write=False)
        return self._indices

    @property
    def measure(self) -> float:
        return len(self) / self.group.order

    def union(self, other: "Subset") -> "Subset":
        self._check_group(other)
        return Subset(self.group, self.mask | other.mask)

    def intersection(self, other: "Subset") -> "Subset":
        self._check_group(other)
        return Subset(self.group, self.mask & other.mask)

    def difference(self, other: "Subset") -> "Subset":
        self._check_group(other)
        return Subset(self.group, self.mask & ~other.mask)

    def complement(self) -> "Subset":
        return Subset(self.group, ~self.mask)

    def is_subset_of(self, other: "Subset") -> bool:
        self._check_group(other)
        return bool((~self.mask | other.mask).all())

    def _check_group(self, other: "Subset") -> None:
        if other.group is not self.group:
            raise ValueError("subsets belong to different groups")

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, g: int) -> bool:
        return bool(self.mask[g])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subset) and other.group is self.group
                and np.array_equal(other.mask, self.mask))

    def __hash__(self) -> int:
        return hash((id(self.group), self.mask.tobytes()))

    def __repr__(self) -> str:
        return f"Subset({self.group.descriptor}, {sorted(int(i) for i in self.indices)})"


class GroupFunction:
    """A function G -> [-1, 1] stored as a dense real vector over indices."""

    def __init__(self, group: FiniteGroup, values):
        values = np.array(values, dtype=np.float64, order="C")
        if values.shape != (group.order,):
            raise ValueError(f"values length {values.shape} != order {group.order}")
        top = float(np.max(np.abs(values))) if values.size else 0.0
        if top > 1.0 + VALUE_TOL:
            raise ValueError(f"values exceed [-1,1] bound: max |v| = {top}")
        self.group = group
        self.values = values
        self.values.setflags(write=False)

    @classmethod
    def constant(cls, group: FiniteGroup, value: float) -> "GroupFunction":
        return cls(group, np.full(group.order, float(value)))

    @classmethod
    def indicator(cls, subset: Subset) -> "GroupFunction":
        return cls(subset.group, subset.mask.astype(np.float64))

    def __call__(self, g: int) -> float:
        return float(self.values[g])

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def __repr__(self) -> str:
        return f"GroupFunction({self.group.descriptor}, n={self.group.order})"


# ---------------------------------------------------------------------------
# Subset algebra


def product_set(a: Subset, b: Subset) -> Subset:
    """Return the exact product set {x*y : x in A, y in B}."""
    if a.group is not b.group:
        raise ValueError("product_set requires subsets of the same group")
    g = a.group
    ai, bi = a.indices, b.indices
    mask = np.zeros(g.order, dtype=bool)
    if ai.size and bi.size:
        mask[np.unique(g.table[np.ix_(ai, bi)])] = True
    return Subset(g, mask)


def inverse_set(a: Subset) -> Subset:
    """Return {x^-1 : x in A}; an involution."""
    mask = np.zeros(a.group.order, dtype=bool)
    mask[a.group.inverse[a.indices]] = True
    return Subset(a.group, mask)


def translate_set(g: int, a: Subset, side: str = "left") -> Subset:
    """Return gA (side='left') or Ag (side='right'); measure is preserved."""
    grp = a.group
    mask = np.zeros(grp.order, dtype=bool)
    if side == "left":
        mask[grp.table[g, a.indices]] = True
    elif side == "right":
        mask[grp.table[a.indices, g]] = True
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return Subset(grp, mask)


# ---------------------------------------------------------------------------
# Constructors


def _cyclic_table(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.int32)
    return (idx[:, None] + idx[None, :]) % n


def _product_table(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    n1, n2 = t1.shape[0], t2.shape[0]
    big = (t1[:, None, :, None].astype(np.int64) * n2 + t2[None, :, None, :])
    return big.reshape(n1 * n2, n1 * n2).astype(np.int32)


def _dihedral_table(n: int) -> np.ndarray:
    # index i < n: rotation x -> x+i; index n+a: reflection x -> a-x
    order = 2 * n
    table = np.zeros((order, order), dtype=np.int32)
    for i in range(n):
        for j in range(n):
            table[i, j] = (i + j) % n                       # rot . rot
            table[i, n + j] = n + (i + j) % n               # rot . refl
            table[n + i, j] = n + (i - j) % n               # refl . rot
            table[n + i, n + j] = (i - j) % n               # refl . refl
    return table


_QUAT_UNITS = ("1", "i", "j", "k")
_QUAT_MULT = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def _quaternion_table() -> np.ndarray:
    # element 2u + (0 if sign +1 else 1) for unit index u: 1,-1,i,-i,j,-j,k,-k
    elems = [(s, u) for u in _QUAT_UNITS for s in (1, -1)]
    index = {e: i for i, e in enumerate(elems)}
    table = np.zeros((8, 8), dtype=np.int32)
    for a, (sa, ua) in enumerate(elems):
        for b, (sb, ub) in enumerate(elems):
            sm, um = _QUAT_MULT[(ua, ub)]
            table[a, b] = index[(sa * sb * sm, um)]
    return table


def _permutation_table(perms: list[tuple[int, ...]]) -> np.ndarray:
    index = {p: i for i, p in enumerate(perms)}
    order = len(perms)
    table = np.zeros((order, order), dtype=np.int32)
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            table[a, b] = index[tuple(pa[x] for x in pb)]   # left action: (a.b)(x)=a(b(x))
    return table


def _perm_parity(p: tuple[int, ...]) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def build_group(descriptor: str, **kwargs) -> FiniteGroup:
    """Build a validated catalog group from a descriptor string.

    Supported forms: ``zmod:n``, ``product:<d1>,<d2>,...`` (comma-separated
    atomic descriptors), ``dihedral:n``, ``quaternion:8``, ``sym:n`` and
    ``alt:n`` for n <= 5, and ``file:<path>`` for a Cayley-table text file.
    """
    descriptor = descriptor.strip()
    head, _, rest = descriptor.partition(":")
    if head == "zmod":
        n = _parse_count(rest, descriptor, 1, MAX_ORDER)
        return FiniteGroup(_cyclic_table(n), descriptor, **kwargs)
    if head == "product":
        parts = [p for p in rest.split(",") if p]
        if not parts:
            raise ValueError(f"empty product descriptor {descriptor!r}")
        tables = [build_group(p).table for p in parts]
        table = reduce(_product_table, tables)
        if table.shape[0] > MAX_ORDER:
            raise ValueError(f"product order {table.shape[0]} exceeds cap {MAX_ORDER}")
        return FiniteGroup(table, descriptor, **kwargs)
    if head == "dihedral":
        n = _parse_count(rest, descriptor, 1, MAX_ORDER // 2)
        return FiniteGroup(_dihedral_table(n), descriptor, **kwargs)
    if head == "quaternion":
        if rest != "8":
            raise ValueError(f"only quaternion:8 is in the catalog, got {descriptor!r}")
        return FiniteGroup(_quaternion_table(), descriptor, **kwargs)
    if head in ("sym", "alt"):
        n = _parse_count(rest, descriptor, 1, 5)
        perms = [tuple(p) for p in itertools.permutations(range(n))]
        if head == "alt":
            perms = [p for p in perms if _perm_parity(p) == 0]
        return FiniteGroup(_permutation_table(perms), descriptor, **kwargs)
    if head == "file":
        text = open(rest, "r", encoding="utf-8").read()
        return from_cayley_table(text, descriptor=descriptor, **kwargs)
    raise ValueError(f"unknown group descriptor {descriptor!r}")


def _parse_count(text: str, descriptor: str, lo: int, hi: int) -> int:
    try:
        n = int(text)
    except ValueError:
        raise ValueError(f"bad group descriptor {descriptor!r}") from None
    if not lo <= n <= hi:
        raise ValueError(f"{descriptor!r}: size {n} outside catalog range [{lo},{hi}]")
    return n


def from_cayley_table(text: str, descriptor: str = "table", **kwargs) -> FiniteGroup:
    """Parse and validate a Cayley table.

    Format: first line is the order n, then n lines of n whitespace-separated
    element indices, row a listing the products a*b.
    """
    tokens = text.split()
    if not tokens:
        raise GroupValidationError("empty table text")
    try:
        n = int(tokens[0])
        entries = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise GroupValidationError(f"non-integer token in table: {exc}") from None
    if len(entries) != n * n:
        raise GroupValidationError(
            f"expected {n * n} entries for order {n}, got {len(entries)}")
    table = np.asarray(entries, dtype=np.int32).reshape(n, n)
    return FiniteGroup(table, descriptor, **kwargs)


def format_cayley_table(group: FiniteGroup) -> str:
    lines = [str(group.order)]
    lines += [" ".join(str(int(x)) for x in row) for row in group.table]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Text formats for subsets and functions


def parse_subset(group: FiniteGroup, text: str) -> Subset:
    """Parse one line of whitespace-separated element indices."""
    return Subset.from_indices(group, (int(t) for t in text.split()))


def format_subset(subset: Subset) -> str:
    return " ".join(str(int(i)) for i in subset.indices) + "\n"


def parse_function(group: FiniteGroup, text: str) -> GroupFunction:
    """Parse n lines holding one decimal real in [-1,1] per element index."""
    vals = [float(t) for t in text.split()]
    if len(vals) != group.order:
        raise ValueError(f"expected {group.order} values, got {len(vals)}")
    return GroupFunction(group, vals)


def format_function(fn: GroupFunction) -> str:
    return "\n".join(repr(float(v)) for v in fn.values) + "\n"


# ---------------------------------------------------------------------------
# Catalog


_CATALOG: tuple[tuple[str, int], ...] = (
    ("zmod:2", 2), ("zmod:3", 3), ("zmod:4", 4), ("zmod:5", 5), ("zmod:6", 6),
    ("zmod:7", 7), ("zmod:8", 8), ("zmod:9", 9), ("zmod:10", 10), ("zmod:12", 12),
    ("zmod:15", 15), ("zmod:16", 16), ("zmod:20", 20), ("zmod:24", 24),
    ("zmod:30", 30), ("zmod:36", 36), ("zmod:48", 48), ("zmod:60", 60),
    ("zmod:100", 100),
    ("product:zmod:2,zmod:2", 4), ("product:zmod:2,zmod:4", 8),
    ("product:zmod:2,zmod:2,zmod:2", 8), ("product:zmod:3,zmod:3", 9),
    ("product:zmod:4,zmod:4", 16),
    ("dihedral:2", 4), ("dihedral:3", 6), ("dihedral:4", 8), ("dihedral:5", 10),
    ("dihedral:6", 12), ("dihedral:9", 18), ("dihedral:10", 20), ("dihedral:12", 24),
    ("dihedral:15", 30),
    ("dihedral:30", 60), ("dihedral:50", 100),
    ("quaternion:8", 8),
    ("sym:3", 6), ("sym:4", 24),
    ("alt:4", 12), ("alt:5", 60),
)


def catalog_descriptors(max_order: int) -> list[str]:
    """Descriptors of the fixed test catalog with order <= max_order."""
    return [d for d, o in _CATALOG if o <= max_order]
