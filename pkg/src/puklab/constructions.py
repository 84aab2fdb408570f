"""Shift gadgets, truncated tensor-product automorphisms, and their certified identities.

The gadget on ``M_n`` pairs the diagonal masa with the circulant masa
generated by the cyclic shift ``w``; the unitary ``v = Σ_i w^i ⊗ f_i`` lifts
the shift one tensor slot at a time.  The product automorphisms built from
copies of ``v`` only ever act through finitely many slots on any fixed
element, so depth-``k`` truncations on ``M_n^{⊗(k+1)}`` reproduce them
exactly where it matters.  The check routines here certify, numerically and
to stated tolerances, the inner-product, spanning, and intertwining
identities that the multiplicity analysis of the conjugated masa pair rests
on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_GNS_CAP, as_matrix, tensor
from .errors import InvalidLambdaError, ResourceGuardError
from .nsets import INF, NSet, is_valid_value, tensor_mixed, tensor_mixed_infinite


def _guard(hilbert_dim: int, cap: int):
    if hilbert_dim > cap:
        raise ResourceGuardError(
            f"workspace of Hilbert dimension {hilbert_dim} exceeds the cap {cap}"
        )


@dataclass(frozen=True, eq=False)
class ShiftGadget:
    """The cyclic shift ``w`` on ``M_n`` with both masas it ties together.

    ``e[i]`` are the diagonal minimal projections, ``f[i]`` the spectral
    projections of ``w`` (Fourier averages ``f_i = n^{-1} Σ_k ω^{-ik} w^k``),
    and ``v = Σ_i w^i ⊗ f_i`` is the step unitary in ``M_n ⊗ M_n``, built on
    first use since it is quadratically larger than everything else.
    """

    n: int
    w: np.ndarray
    e: np.ndarray  # (n, n, n)
    f: np.ndarray  # (n, n, n)

    def __post_init__(self):
        for arr in (self.w, self.e, self.f):
            arr.flags.writeable = False

    @property
    def v(self) -> np.ndarray:
        cached = self.__dict__.get("_v")
        if cached is None:
            cached = sum(
                tensor(np.linalg.matrix_power(self.w, i), self.f[i]) for i in range(self.n)
            )
            cached = np.asarray(cached)
            cached.flags.writeable = False
            object.__setattr__(self, "_v", cached)
        return cached


def build_gadget(n: int) -> ShiftGadget:
    """Construct the shift gadget on ``M_n`` for ``n ≥ 2``."""
    if n < 2:
        raise ValueError("the gadget needs n >= 2")
    w = np.roll(np.eye(n, dtype=complex), -1, axis=0)
    e = np.stack([np.diag(np.eye(n, dtype=complex)[i]) for i in range(n)])
    omega = np.exp(2j * np.pi / n)
    powers = [np.linalg.matrix_power(w, k) for k in range(n)]
    f = np.stack(
        [sum(omega ** (-i * k) * powers[k] for k in range(n)) / n for i in range(n)]
    )
    return ShiftGadget(n, w, e, f)


def step_unitary(gadget: ShiftGadget, r: int, depth: int) -> np.ndarray:
    """``v`` placed in tensor slots ``r, r+1`` of ``M_n^{⊗(depth+1)}``."""
    n = gadget.n
    if not 1 <= r <= depth:
        raise ValueError(f"slot {r} does not fit depth {depth}")
    left = np.eye(n ** (r - 1), dtype=complex)
    right = np.eye(n ** (depth - r), dtype=complex)
    return tensor(tensor(left, gadget.v), right)


@dataclass(frozen=True, eq=False)
class TruncatedAutomorphism:
    """Conjugation by a finite product of commuting step unitaries.

    ``kind="theta"`` multiplies the steps at every slot up to the depth,
    ``kind="phi"`` only the odd ones.  The implementing unitary lives in
    ``M_n^{⊗(depth+1)}`` and has order ``n``; conjugation preserves the
    normalized trace.
    """

    gadget: ShiftGadget
    depth: int
    kind: str
    unitary: np.ndarray

    def __post_init__(self):
        self.unitary.flags.writeable = False

    @classmethod
    def build(cls, gadget: ShiftGadget, depth: int, kind: str = "theta",
              cap: int = DEFAULT_GNS_CAP) -> "TruncatedAutomorphism":
        if kind not in ("theta", "phi"):
            raise ValueError(f"kind must be 'theta' or 'phi', got {kind!r}")
        if depth < 0:
            raise ValueError("depth must be non-negative")
        n = gadget.n
        dim = n ** (depth + 1)
        _guard(dim * dim, cap)
        slots = range(1, depth + 1) if kind == "theta" else range(1, depth + 1, 2)
        unitary = np.eye(dim, dtype=complex)
        for r in slots:
            unitary = unitary @ step_unitary(gadget, r, depth)
        return cls(gadget, depth, kind, unitary)

    @property
    def ambient_dim(self) -> int:
        return self.gadget.n ** (self.depth + 1)

    def apply(self, x) -> np.ndarray:
        m = as_matrix(x)
        if m.shape[0] != self.ambient_dim:
            raise ValueError(f"element of dimension {m.shape[0]} does not fit {self.ambient_dim}")
        return self.unitary @ m @ self.unitary.conj().T


def _theta_unitary(gadget: ShiftGadget, depth: int, cap: int) -> np.ndarray:
    if depth == 0:
        return np.eye(gadget.n, dtype=complex)
    return TruncatedAutomorphism.build(gadget, depth, "theta", cap).unitary


def _selected_columns_projection(unitary: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """``U P U*`` for the diagonal projection onto the given basis columns."""
    sel = unitary[:, columns]
    return sel @ sel.conj().T


def keyclaim_check(n: int, m: int, cap: int = DEFAULT_GNS_CAP) -> float:
    """Max deviation of the conjugated inner products from ``δ_{r,s} n^{-(2m+1)}``.

    Sweeps every tuple ``(i_1..i_m, j_1..j_m, r, s)``: the inner product of
    ``(e_{i_1}⊗…⊗e_{i_m}) ξ_r θ(e_{j_1}⊗…⊗e_{j_m})`` against ``ξ_s`` in the
    trace inner product of ``M_n^{⊗(m+1)}``, where ``ξ_r`` is the first-slot
    spectral projection ``f_r`` and ``θ`` conjugates by the depth-``m``
    product unitary.
    """
    if n < 2 or m < 0:
        raise ValueError("need n >= 2 and m >= 0")
    N = n ** (m + 1)
    _guard(N * N, cap)
    gadget = build_gadget(n)
    expected = float(n) ** (-(2 * m + 1))
    if m == 0:
        flat = gadget.f.reshape(n, -1)
        gram = (flat @ flat.conj().T) / n
        return float(np.max(np.abs(gram - expected * np.eye(n))))
    theta_u = _theta_unitary(gadget, m, cap)
    eye_rest = np.eye(n**m, dtype=complex)
    f_ops = [tensor(gadget.f[r], eye_rest) for r in range(n)]
    worst = 0.0
    for j_flat in range(n**m):
        columns = np.arange(j_flat * n, (j_flat + 1) * n)
        theta_b = _selected_columns_projection(theta_u, columns)
        for r in range(n):
            for s in range(n):
                diag = np.diagonal(f_ops[r] @ theta_b @ f_ops[s])
                values = diag.reshape(n**m, n).sum(axis=1) / N
                target = expected if r == s else 0.0
                worst = max(worst, float(np.max(np.abs(values - target))))
    return worst


@dataclass(frozen=True)
class FamilySpanReport:
    """Gram statistics of the orthogonal family spanning a full tensor power."""

    count: int
    min_gram_diag: float
    max_offdiag: float
    rank: int


def family_span_check(n: int, m: int, cap: int = DEFAULT_GNS_CAP) -> FamilySpanReport:
    """Certify the ``n^{2m}`` products as orthogonal, non-zero, and spanning.

    The family ``(e_{i_1}⊗…⊗e_{i_m}) f_r θ(e_{j_1}⊗…⊗e_{j_{m-1}}⊗1)`` sits in
    ``M_n^{⊗m}``; with all index tuples it has exactly the dimension of the
    whole matrix space, so orthogonality plus full rank certify the span.
    """
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    N = n**m
    _guard(N * N, cap)
    gadget = build_gadget(n)
    theta_u = _theta_unitary(gadget, m - 1, cap)
    eye_rest = np.eye(n ** (m - 1), dtype=complex)
    f_ops = [tensor(gadget.f[r], eye_rest) for r in range(n)]
    rows = []
    for j_flat in range(n ** (m - 1)):
        columns = np.arange(j_flat * n, (j_flat + 1) * n)
        theta_b = _selected_columns_projection(theta_u, columns)
        for r in range(n):
            prod = f_ops[r] @ theta_b
            for i_flat in range(N):
                x = np.zeros((N, N), dtype=complex)
                x[i_flat] = prod[i_flat]
                rows.append(x.reshape(-1))
    stack = np.stack(rows)
    gram = (stack @ stack.conj().T) / N
    diag = np.abs(np.diagonal(gram))
    off = gram - np.diag(np.diagonal(gram))
    sing = np.linalg.svd(stack, compute_uv=False)
    rank = int(np.sum(sing > 1e-9 * sing[0]))
    return FamilySpanReport(len(rows), float(diag.min()), float(np.max(np.abs(off))), rank)


def intertwiner_grams(n: int, m: int, r: int, s: int, cap: int = DEFAULT_GNS_CAP):
    """Gram matrices of the relabelled families with ``f_r`` and ``f_s`` in the middle."""
    if n < 2 or m < 0:
        raise ValueError("need n >= 2 and m >= 0")
    if r == s or not (0 <= r < n and 0 <= s < n):
        raise ValueError("need distinct r, s in range(n)")
    N = n ** (m + 1)
    _guard(N * N, cap)
    gadget = build_gadget(n)
    theta_u = _theta_unitary(gadget, m, cap)
    eye_rest = np.eye(n**m, dtype=complex)
    grams = []
    for t in (r, s):
        f_op = tensor(gadget.f[t], eye_rest)
        rows = []
        for j_flat in range(n**m):
            columns = np.arange(j_flat * n, (j_flat + 1) * n)
            theta_b = _selected_columns_projection(theta_u, columns)
            prod = f_op @ theta_b
            for i_flat in range(n**m):
                x = np.zeros((N, N), dtype=complex)
                block = slice(i_flat * n, (i_flat + 1) * n)
                x[block] = prod[block]
                rows.append(x.reshape(-1))
        stack = np.stack(rows)
        grams.append((stack @ stack.conj().T) / N)
    return grams[0], grams[1]


def intertwiner_check(n: int, m: int, r: int, s: int, cap: int = DEFAULT_GNS_CAP) -> float:
    """Max disagreement between the two Gram matrices (the isometry defect).

    Relabelling ``f_r`` to ``f_s`` inside the span of the mixed products
    extends to a partial isometry exactly when all pairwise inner products
    agree; this returns the largest entrywise difference.
    """
    gram_r, gram_s = intertwiner_grams(n, m, r, s, cap)
    return float(np.max(np.abs(gram_r - gram_s)))


def truncated_masa_pair(n: int, k: int, kind: str = "theta", cap: int = DEFAULT_GNS_CAP):
    """Generators of the diagonal masa of ``M_n^{⊗k}`` and its conjugate.

    Returns ``(a_gens, b_gens)``: the diagonal matrix units, and their images
    under conjugation by the depth-``(k−1)`` truncated automorphism of the
    requested kind.  Both generate masas in ``M_n^{⊗k}``.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    N = n**k
    _guard(N * N, cap)
    gadget = build_gadget(n)
    a_gens = [np.diag(np.eye(N, dtype=complex)[p]) for p in range(N)]
    if k == 1:
        return a_gens, [g.copy() for g in a_gens]
    auto = TruncatedAutomorphism.build(gadget, k - 1, kind, cap)
    b_gens = [auto.apply(g) for g in a_gens]
    return a_gens, b_gens


# ---------------------------------------------------------------------------
# assembling families of masas with prescribed pairwise mixed invariants


@dataclass(frozen=True)
class GadgetAssignment:
    """One tensor factor of the family: a gadget handling a single pair.

    The two members of ``pair`` play the conjugated roles (A and B) with
    parameter ``n``; every other family member takes the bystander role C,
    whose mixed invariant against either is ``{1}``.  ``n == inf`` stands for
    the infinite tensor power of the ``n = 2`` gadget.
    """

    pair: tuple[int, int]
    n: object  # int >= 2 or math.inf
    roles: tuple[str, ...]

    def contribution(self, a: int, b: int) -> NSet:
        if (a, b) != self.pair and (b, a) != self.pair:
            return NSet.of(1)
        if self.n == INF:
            return tensor_mixed_infinite([NSet.of(2)], tail_all_ones=False)
        return NSet.of(self.n)


@dataclass(frozen=True)
class FamilyPlan:
    """Role table realizing a symmetric target matrix of pairwise invariants."""

    size: int
    matrix: tuple[tuple[object, ...], ...]
    assignments: tuple[GadgetAssignment, ...]

    def pairwise_invariant(self, a: int, b: int) -> NSet:
        """Symbolic mixed invariant of family members ``a`` and ``b``."""
        if a == b:
            return NSet.of(1)
        return tensor_mixed(g.contribution(a, b) for g in self.assignments)

    def pairwise_table(self) -> tuple[tuple[NSet, ...], ...]:
        return tuple(
            tuple(self.pairwise_invariant(a, b) for b in range(self.size))
            for a in range(self.size)
        )

    def direct_sum_union(self) -> NSet:
        """Invariant of the block-diagonal sum of the family: {1} plus all pairs."""
        out = NSet.of(1)
        for a in range(self.size):
            for b in range(a + 1, self.size):
                out = out | self.pairwise_invariant(a, b)
        return out


def countable_family_plan(matrix) -> FamilyPlan:
    """Plan a family of masas whose pairwise mixed invariants match ``matrix``.

    ``matrix`` is a symmetric square array over positive integers and ``inf``
    with ones on the diagonal.  Each off-diagonal entry above 1 gets its own
    gadget; the symbolic evaluation of the plan returns exactly the singleton
    of the requested entry for every pair.
    """
    rows = [tuple(row) for row in matrix]
    k = len(rows)
    if any(len(row) != k for row in rows):
        raise InvalidLambdaError("matrix must be square")
    for a in range(k):
        if rows[a][a] != 1:
            raise InvalidLambdaError("diagonal entries must all be 1")
        for b in range(k):
            if not is_valid_value(rows[a][b]):
                raise InvalidLambdaError(f"entry ({a},{b}) is not in N ∪ {{inf}}")
            if rows[a][b] != rows[b][a]:
                raise InvalidLambdaError("matrix must be symmetric")
    assignments = []
    for a in range(k):
        for b in range(a + 1, k):
            value = rows[a][b]
            if value == 1:
                continue
            roles = tuple("A" if t == a else "B" if t == b else "C" for t in range(k))
            assignments.append(GadgetAssignment((a, b), value, roles))
    return FamilyPlan(k, tuple(rows), tuple(assignments))
