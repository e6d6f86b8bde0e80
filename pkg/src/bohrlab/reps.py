"""Numerical unitary representation theory for small finite groups.

Provides exact characters for abelian groups, a randomized decomposition of
the regular representation into irreducibles for any group of order <= 256,
block-diagonal direct sums, and operator-norm diagnostics. Every stored
homomorphism carries measured residuals so downstream consumers can trust
(and re-check) it numerically.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup

DEFAULT_TOL = 1e-9
CHAR_MATCH_TOL = 1e-6
EXHAUSTIVE_PAIR_CAP = 64
SAMPLED_PAIRS = 100_000
DECOMPOSE_ORDER_CAP = 256
_CLUSTER_GAP = 1e-7
_COMMUTE_TOL = 1e-8


class RepDecompositionError(RuntimeError):
    """Raised when irreducible decomposition fails after all reseeds."""


def operator_distance(mat: np.ndarray) -> float:
    """Distance ||M - I||_op, the largest singular value of M - I."""
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    delta = mat - np.eye(mat.shape[0])
    return float(np.linalg.svd(delta, compute_uv=False)[0])


def _op_norms(batch: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a (..., d, d) batch."""
    if batch.shape[-1] == 1:
        return np.abs(batch[..., 0, 0])
    return np.linalg.svd(batch, compute_uv=False)[..., 0]


class UnitaryRep:
    """A map g -> U(n) stored as one n x n complex matrix per element.

    ``hom_residual`` is the measured maximum of ||t(ab) - t(a)t(b)||_op over
    element pairs (exhaustive for order <= 64, sampled above), and
    ``unitarity_residual`` the maximum of ||t(g)* t(g) - I||_op. The identity
    matrix is snapped to exact I so Bohr membership at the identity is exact.
    """

    def __init__(self, group: FiniteGroup, matrices, label: str = "rep", *,
                 hom_residual: float | None = None,
                 unitarity_residual: float | None = None):
        matrices = np.array(matrices, dtype=np.complex128, order="C")
        if matrices.ndim != 3 or matrices.shape[0] != group.order \
                or matrices.shape[1] != matrices.shape[2]:
            raise ValueError(f"bad matrices shape {matrices.shape}")
        matrices[group.identity] = np.eye(matrices.shape[1])
        self.group = group
        self.dim = int(matrices.shape[1])
        self.matrices = matrices
        self.label = label
        self.matrices.setflags(write=False)
        self.hom_residual = (measure_hom_residual(self) if hom_residual is None
                             else float(hom_residual))
        self.unitarity_residual = (measure_unitarity_residual(self)
                                   if unitarity_residual is None
                                   else float(unitarity_residual))
        self._distances: np.ndarray | None = None
        self._diagonal: bool | None = None

    def matrix(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)

    def identity_distances(self) -> np.ndarray:
        """Per-element ||t(g) - I||_op, cached."""
        if self._distances is None:
            delta = self.matrices - np.eye(self.dim)
            d = _op_norms(delta)
            d[self.group.identity] = 0.0
            d.setflags(write=False)
            self._distances = d
        return self._distances

    @property
    def is_diagonal(self) -> bool:
        """True when every stored matrix is diagonal (torus-valued)."""
        if self._diagonal is None:
            off = self.matrices * (1.0 - np.eye(self.dim))
            self._diagonal = bool(np.max(np.abs(off)) < 1e-9)
        return self._diagonal

    def kernel_indices(self, tol: float = 1e-9) -> np.ndarray:
        return np.flatnonzero(self.identity_distances() <= tol)

    def __repr__(self) -> str:
        return (f"UnitaryRep({self.label}, dim={self.dim}, "
                f"group={self.group.descriptor})")


@dataclass(frozen=True)
class IrrepData:
    """An irreducible representation with its character data."""

    rep: UnitaryRep
    character: np.ndarray
    multiplicity_in_regular: int

    @property
    def dim(self) -> int:
        return self.rep.dim


def measure_hom_residual(rep: UnitaryRep, *, sample_seed: int = 0) -> float:
    """Max over pairs of ||t(ab) - t(a) t(b)||_op.

    Exhaustive for order <= 64 and 1e5 sampled pairs above.
    """
    g, mats = rep.group, rep.matrices
    n = g.order
    if n <= EXHAUSTIVE_PAIR_CAP:
        a = np.repeat(np.arange(n), n)
        b = np.tile(np.arange(n), n)
    else:
        rng = np.random.default_rng(sample_seed)
        a = rng.integers(0, n, SAMPLED_PAIRS)
        b = rng.integers(0, n, SAMPLED_PAIRS)
    worst = 0.0
    for lo in range(0, len(a), 4096):
        ai, bi = a[lo:lo + 4096], b[lo:lo + 4096]
        prod = np.einsum("pij,pjk->pik", mats[ai], mats[bi])
        diff = mats[g.table[ai, bi]] - prod
        worst = max(worst, float(np.max(_op_norms(diff))))
    return worst


def measure_unitarity_residual(rep: UnitaryRep) -> float:
    mats = rep.matrices
    gram = np.einsum("pji,pjk->pik", mats.conj(), mats)
    return float(np.max(_op_norms(gram - np.eye(rep.dim))))


# ---------------------------------------------------------------------------
# Abelian characters


def cyclic_decomposition(group: FiniteGroup) -> tuple[list[int], list[int], np.ndarray]:
    """Decompose an abelian group as a direct product of cyclic factors.

    Greedily picks generators of maximal element order whose cyclic span meets
    the current span only in the identity; for abelian groups this always
    terminates with a direct-product decomposition. Returns (generators,
    factor orders, coords) where coords[x] holds the exponent tuple of x.
    """
    if not group.is_abelian:
        raise ValueError("cyclic decomposition requires an abelian group")
    n = group.order
    orders = np.array([group.element_order(a) for a in group.elements()])
    by_order = sorted(group.elements(), key=lambda a: (-orders[a], a))

    gens: list[int] = []
    gen_orders: list[int] = []
    span = {group.identity: ()}
    while len(span) < n:
        pick = None
        for cand in by_order:
            if cand in span:
                continue
            cyc, x = [group.identity], cand
            while x != group.identity:
                cyc.append(x)
                x = group.mul(x, cand)
            if all(c == group.identity or c not in span for c in cyc):
                pick = (cand, cyc)
                break
        if pick is None:  # cannot happen for a genuine abelian group
            raise RuntimeError("greedy cyclic decomposition failed")
        cand, cyc = pick
        new_span = {}
        for elem, coord in span.items():
            for e, c in enumerate(cyc):
                new_span[group.mul(elem, c)] = coord + (e,)
        span = new_span
        gens.append(cand)
        gen_orders.append(len(cyc))

    coords = np.zeros((n, max(1, len(gens))), dtype=np.int64)
    for elem, coord in span.items():
        if coord:
            coords[elem, :] = coord
    return gens, gen_orders, coords


def abelian_characters(group: FiniteGroup) -> list[IrrepData]:
    """All |G| one-dimensional characters of an abelian group.

    For each cyclic factor of order m the fundamental character sends the
    generator to exp(2*pi*i/m); products are indexed mixed-radix so that on
    zmod:n the k-th character is x -> exp(2*pi*i*k*x/n).
    """
    if not group.is_abelian:
        raise ValueError("abelian_characters requires an abelian group")
    gens, gen_orders, coords = cyclic_decomposition(group)
    n = group.order
    t = len(gen_orders) if gens else 1
    radices = gen_orders if gens else [1]

    irreps = []
    for k in range(n):
        digits, rem = [], k
        for m in reversed(radices):
            digits.append(rem % m)
            rem //= m
        digits.reverse()
        phase = np.zeros(n)
        for j, m in enumerate(radices):
            phase += digits[j] * coords[:, j] / m
        values = np.exp(2j * np.pi * phase)
        values[group.identity] = 1.0
        rep = UnitaryRep(group, values.reshape(n, 1, 1), label=f"chi{k}")
        irreps.append(IrrepData(rep=rep, character=values.copy(),
                                multiplicity_in_regular=1))
    return irreps


# ---------------------------------------------------------------------------
# Regular-representation decomposition


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2.0


def _eig_clusters(w: np.ndarray) -> list[np.ndarray]:
    """Split sorted eigenvalues into clusters merged at gaps < 1e-7 * scale."""
    order = np.argsort(w)
    ws = w[order]
    scale = max(1.0, float(np.max(np.abs(w))))
    breaks = np.flatnonzero(np.diff(ws) > _CLUSTER_GAP * scale)
    clusters, start = [], 0
    for b in list(breaks) + [len(ws) - 1]:
        clusters.append(order[start:b + 1])
        start = b + 1
    return clusters


def _split_invariant(mats: np.ndarray, rng: np.random.Generator,
                     depth: int = 0) -> list[np.ndarray]:
    """Recursively split a unitary rep (dense (n,d,d) stack) into irreducibles.

    Returns a list of (d, d_i) basis matrices whose columns span invariant
    irreducible subspaces. Irreducibility is detected by <chi,chi> = 1.
    """
    n, d = mats.shape[0], mats.shape[1]
    chi = np.trace(mats, axis1=1, axis2=2)
    norm = float(np.mean(np.abs(chi) ** 2))
    if abs(norm - 1.0) < 1e-6:
        return [np.eye(d, dtype=np.complex128)]
    if depth > 12:
        raise RepDecompositionError("splitting recursion failed to converge")

    for _ in range(4):
        h = _random_hermitian(d, rng)
        avg = np.einsum("gij,jk,glk->il", mats, h, mats.conj()) / n
        w, v = np.linalg.eigh(avg)
        clusters = _eig_clusters(w)
        if len(clusters) > 1:
            bases = []
            for idx in clusters:
                q = np.linalg.qr(v[:, idx])[0]
                sub = np.einsum("ji,gjk,kl->gil", q.conj(), mats, q)
                for inner in _split_invariant(sub, rng, depth + 1):
                    bases.append(q @ inner)
            return bases
    raise RepDecompositionError("eigenvalue clustering failed to separate")


def _diagonal_friendly(mats: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rebase an irrep so a maximal commuting family of images is diagonal.

    Picks, in element-index order, a maximal pairwise-commuting subfamily of
    the stored matrices and jointly diagonalizes it via a generic Hermitian
    combination. Column phases are normalized for determinism.
    """
    d = mats.shape[1]
    if d == 1:
        return mats
    chosen: list[np.ndarray] = []
    for g in range(mats.shape[0]):
        m = mats[g]
        if all(np.max(np.abs(m @ c - c @ m)) < _COMMUTE_TOL for c in chosen):
            chosen.append(m)
    h = np.zeros((d, d), dtype=np.complex128)
    for c in chosen:
        x, y = rng.standard_normal(2)
        h += x * (c + c.conj().T) + y * 1j * (c - c.conj().T)
    _, v = np.linalg.eigh(h)
    for col in range(d):
        pivot = int(np.argmax(np.abs(v[:, col])))
        p = v[pivot, col]
        if abs(p) > 0:
            v[:, col] *= np.conj(p) / abs(p)
    return np.einsum("ji,gjk,kl->gil", v.conj(), mats, v)


def _char_sort_key(character: np.ndarray, dim: int):
    rounded = tuple((round(float(z.real), 8), round(float(z.imag), 8))
                    for z in character)
    return (dim, rounded)


def decompose_regular(group: FiniteGroup, seed: int = 0,
                      tol: float = DEFAULT_TOL, max_retries: int = 5) -> list[IrrepData]:
    """Complete list of inequivalent irreducibles of the regular representation.

    Algorithm: average a random Hermitian matrix over conjugation by the
    regular representation (a projection onto its commutant), split the
    averaged matrix's eigenspaces into invariant subspaces, recurse until
    each carries an irreducible, then deduplicate by character. Verifies
    sum(dim^2) = |G| exactly and residuals <= tol, reseeding on failure.
    """
    n = group.order
    if n > DECOMPOSE_ORDER_CAP:
        raise ValueError(f"decompose_regular caps at order {DECOMPOSE_ORDER_CAP}")
    last_err: Exception | None = None
    for attempt in range(max_retries + 1):
        rng = np.random.default_rng(seed + attempt)
        try:
            return _decompose_once(group, rng, tol)
        except RepDecompositionError as exc:
            last_err = exc
    raise RepDecompositionError(
        f"decomposition failed after {max_retries + 1} seeds: {last_err}")


def _decompose_once(group: FiniteGroup, rng: np.random.Generator,
                    tol: float) -> list[IrrepData]:
    n = group.order
    left_inv = group.table[group.inverse, :]  # row g: h -> g^-1 h

    if n == 1:
        rep = UnitaryRep(group, np.ones((1, 1, 1)), label="irrep0")
        return [IrrepData(rep, rep.character(), 1)]

    # Project a random Hermitian onto the commutant of the regular rep.
    h = _random_hermitian(n, rng)
    avg = np.zeros_like(h)
    for g in group.elements():
        pre = left_inv[g]
        avg += h[np.ix_(pre, pre)]
    avg /= n

    w, v = np.linalg.eigh(avg)
    clusters = _eig_clusters(w)
    if len(clusters) == 1 and n > 1:
        raise RepDecompositionError("top-level eigenvalues did not separate")

    found: list[tuple[np.ndarray, np.ndarray]] = []  # (character, matrices)
    for idx in clusters:
        q = np.linalg.qr(v[:, idx])[0]
        # sigma(g) = Q^H rho(g) Q with rho(g) the left-multiplication permutation
        sub = np.einsum("ji,gjk->gik", q.conj(), q[left_inv, :])
        for basis in _split_invariant(sub, rng):
            mats = np.einsum("ji,gjk,kl->gil", basis.conj(), sub, basis)
            chi = np.trace(mats, axis1=1, axis2=2)
            if any(np.max(np.abs(chi - c0)) < CHAR_MATCH_TOL for c0, _ in found):
                continue
            found.append((chi, mats))

    if sum(m.shape[1] ** 2 for _, m in found) != n:
        raise RepDecompositionError(
            f"dimension check failed: sum dim^2 = "
            f"{sum(m.shape[1] ** 2 for _, m in found)} != {n}")

    found.sort(key=lambda cm: _char_sort_key(cm[0], cm[1].shape[1]))
    irreps = []
    for i, (chi, mats) in enumerate(found):
        mats = _diagonal_friendly(mats, rng)
        rep = UnitaryRep(group, mats, label=f"irrep{i}")
        if rep.hom_residual > tol or rep.unitarity_residual > tol:
            raise RepDecompositionError(
                f"residuals exceed tol: hom={rep.hom_residual:.3g} "
                f"unit={rep.unitarity_residual:.3g}")
        irreps.append(IrrepData(rep, rep.character(),
                                multiplicity_in_regular=int(round(chi[group.identity].real))))

    gram = np.array([[np.vdot(a.character, b.character) / n for b in irreps]
                     for a in irreps])
    if np.max(np.abs(gram - np.eye(len(irreps)))) > CHAR_MATCH_TOL:
        raise RepDecompositionError("character orthogonality failed")
    return irreps


# ---------------------------------------------------------------------------
# Direct sums, caching, quasirandomness degree


def direct_sum_hom(reps: list[UnitaryRep]) -> UnitaryRep:
    """Block-diagonal direct sum of homomorphisms over one group.

    The operator distance to the identity of a block-diagonal matrix is the
    max over blocks, so residuals of the sum are the max of the inputs'.
    """
    if not reps:
        raise ValueError("direct_sum_hom needs at least one representation")
    group = reps[0].group
    if any(r.group is not group for r in reps):
        raise ValueError("direct_sum_hom requires representations of one group")
    if len(reps) == 1:
        return reps[0]
    dim = sum(r.dim for r in reps)
    mats = np.zeros((group.order, dim, dim), dtype=np.complex128)
    at = 0
    for r in reps:
        mats[:, at:at + r.dim, at:at + r.dim] = r.matrices
        at += r.dim
    label = "+".join(r.label for r in reps)
    return UnitaryRep(group, mats, label=label,
                      hom_residual=max(r.hom_residual for r in reps),
                      unitarity_residual=max(r.unitarity_residual for r in reps))


_IRREP_CACHE: "weakref.WeakKeyDictionary[FiniteGroup, dict[int, list[IrrepData]]]" = \
    weakref.WeakKeyDictionary()


def irreps_of(group: FiniteGroup, seed: int = 0) -> list[IrrepData]:
    """Cached irreducibles: exact characters when abelian, else decomposition."""
    per_group = _IRREP_CACHE.setdefault(group, {})
    key = -1 if group.is_abelian else seed
    if key not in per_group:
        per_group[key] = (abelian_characters(group) if group.is_abelian
                          else decompose_regular(group, seed=seed))
    return per_group[key]


def min_nontrivial_dim(group: FiniteGroup, seed: int = 0) -> int:
    """Minimum dimension of an irreducible with non-constant character."""
    irreps = irreps_of(group, seed)
    dims = [ir.dim for ir in irreps
            if np.max(np.abs(ir.character - ir.character[group.identity])) > 1e-6]
    if not dims:
        raise ValueError("group has no nontrivial irreducible (trivial group)")
    return min(dims)


# ---------------------------------------------------------------------------
# Export format


def export_rep(rep: UnitaryRep) -> str:
    """Serialize: header 'dim n order m', then per element one line of
    n^2 're im' pairs in row-major order."""
    lines = [f"dim {rep.dim} order {rep.group.order}"]
    for g in rep.group.elements():
        flat = rep.matrices[g].reshape(-1)
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in flat))
    return "\n".join(lines) + "\n"


def parse_rep(text: str, group: FiniteGroup, label: str = "imported") -> UnitaryRep:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 4 or head[0] != "dim" or head[2] != "order":
        raise ValueError(f"bad rep header {lines[0]!r}")
    dim, order = int(head[1]), int(head[3])
    if order != group.order:
        raise ValueError(f"rep order {order} != group order {group.order}")
    if len(lines) != order + 1:
        raise ValueError(f"expected {order} element lines, got {len(lines) - 1}")
    mats = np.zeros((order, dim, dim), dtype=np.complex128)
    for g in range(order):
        vals = [float(t) for t in lines[g + 1].split()]
        if len(vals) != 2 * dim * dim:
            raise ValueError(f"element {g}: expected {2 * dim * dim} floats")
        arr = np.asarray(vals).reshape(dim * dim, 2)
        mats[g] = (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)
    return UnitaryRep(group, mats, label=label)
