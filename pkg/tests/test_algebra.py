import itertools

import numpy as np
import pytest

from puklab.algebra import (
    commutant,
    cutdown_spectrum,
    finite_puk_spectrum,
    generate_algebra,
    minimal_projections,
    mixed_spectrum,
    orthonormalize_span,
)
from puklab.core import GnsSpace, TracedAlgebraShape, adjoint
from puklab.errors import (
    NotAbelianError,
    NotInAlgebraError,
    NotMasaError,
    ResourceGuardError,
)
from puklab.nsets import NSet


def diag_units(n):
    return [np.diag(np.eye(n, dtype=complex)[i]) for i in range(n)]


def matrix_units(n):
    out = []
    for i in range(n):
        for j in range(n):
            u = np.zeros((n, n), dtype=complex)
            u[i, j] = 1.0
            out.append(u)
    return out


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def span_rank(mats):
    """Independent rank oracle on a list of matrices."""
    stack = np.stack([np.asarray(m).reshape(-1) for m in mats])
    s = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(s > 1e-9 * s[0]))


def word_span_rank(generators, max_length):
    """Brute-force span of all words in the generators and their adjoints."""
    alphabet = list(generators) + [adjoint(g) for g in generators]
    D = alphabet[0].shape[0]
    words = [np.eye(D, dtype=complex)]
    for length in range(1, max_length + 1):
        for picks in itertools.product(alphabet, repeat=length):
            w = np.eye(D, dtype=complex)
            for p in picks:
                w = w @ p
            words.append(w)
    return span_rank(words)


class TestGenerateAlgebra:
    def test_identity_alone(self):
        assert generate_algebra([np.eye(2)]).dim == 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_diagonal_masa(self, n):
        assert generate_algebra(diag_units(n)).dim == n

    def test_left_right_diagonal_on_gns(self):
        # oracle: brute-force word span of the four generators
        space = GnsSpace(TracedAlgebraShape.full_matrix(2))
        gens = [space.left(u) for u in diag_units(2)]
        gens += [space.right(u) for u in diag_units(2)]
        alg = generate_algebra(gens)
        assert alg.dim == 4
        assert word_span_rank(gens, 3) == 4
        # spanned by the rank-one products of left and right units
        products = [space.left(a) @ space.right(b) for a in diag_units(2) for b in diag_units(2)]
        assert span_rank(products + list(alg.basis)) == 4

    def test_full_matrix_algebra(self):
        rng = np.random.default_rng(0)
        gens = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))]
        assert generate_algebra(gens).dim == 9

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        gens = [rng.standard_normal((4, 4)) for _ in range(2)]
        alg = generate_algebra(gens)
        again = generate_algebra(list(alg.basis))
        assert again.dim == alg.dim

    def test_basis_invariants(self):
        rng = np.random.default_rng(2)
        gens = [rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))]
        alg = generate_algebra(gens)
        assert alg.gram_defect() < 1e-10
        assert alg.adjoint_defect() < 1e-9
        assert alg.span_residual(np.eye(4)) < 1e-9

    def test_non_unital(self):
        p = np.diag([1.0, 0.0]).astype(complex)
        alg = generate_algebra([p], unital=False)
        assert alg.dim == 1
        assert alg.span_residual(np.eye(2)) > 0.5


class TestCommutant:
    def test_full_algebra_gives_scalars(self):
        alg = generate_algebra(matrix_units(3))
        assert commutant(alg).dim == 1

    def test_scalars_give_everything(self):
        alg = generate_algebra([np.eye(4)])
        assert commutant(alg).dim == 16

    @pytest.mark.parametrize("n", [2, 3])
    def test_left_commutant_is_right_action(self, n):
        # finite commutation theorem; oracle checks span equality both ways
        space = GnsSpace(TracedAlgebraShape.full_matrix(n))
        left = generate_algebra([space.left(u) for u in matrix_units(n)])
        comm = commutant(left)
        rights = [space.right(u) for u in matrix_units(n)]
        assert comm.dim == n * n
        assert span_rank(rights) == n * n
        assert span_rank(list(comm.basis) + rights) == n * n

    def test_commutant_is_unital_and_star_closed(self):
        rng = np.random.default_rng(3)
        alg = generate_algebra([rng.standard_normal((4, 4)) for _ in range(1)])
        comm = commutant(alg)
        assert comm.span_residual(np.eye(4)) < 1e-9
        assert comm.adjoint_defect() < 1e-9

    def test_bicommutant_random_generators(self):
        rng = np.random.default_rng(4)
        for _ in range(8):
            dim = int(rng.integers(2, 17))
            count = int(rng.integers(1, 3))
            gens = [
                rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
                for _ in range(count)
            ]
            alg = generate_algebra(gens)
            assert commutant(commutant(alg)).dim == alg.dim


class TestMinimalProjections:
    def test_scalars(self):
        rep = minimal_projections(generate_algebra([np.eye(4)]), seed=0)
        assert rep.multiset == (4,)

    def test_left_right_diagonal(self):
        # oracle: the four explicit rank-one cutdown projections
        space = GnsSpace(TracedAlgebraShape.full_matrix(2))
        gens = [space.left(u) for u in diag_units(2)] + [space.right(u) for u in diag_units(2)]
        rep = minimal_projections(generate_algebra(gens), seed=0)
        assert rep.multiset == (1, 1, 1, 1)
        expected = [space.left(a) @ space.right(b) for a in diag_units(2) for b in diag_units(2)]
        for q in rep.block_projections:
            assert min(np.max(np.abs(q - p)) for p in expected) < 1e-8

    def test_diagonal_masa_on_column_space(self):
        rep = minimal_projections(generate_algebra(diag_units(3)), seed=0)
        assert rep.multiset == (1, 1, 1)

    def test_multiplicities_sum_to_dimension(self):
        rng = np.random.default_rng(5)
        for seed in range(5):
            dim = int(rng.integers(2, 9))
            parts = []
            left = dim
            while left:
                take = int(rng.integers(1, left + 1))
                parts.append(take)
                left -= take
            u = random_unitary(rng, dim)
            projs, start = [], 0
            for p in parts:
                d = np.zeros(dim)
                d[start : start + p] = 1.0
                projs.append(u @ np.diag(d).astype(complex) @ u.conj().T)
                start += p
            rep = minimal_projections(generate_algebra(projs), seed=seed)
            assert rep.total == dim
            assert rep.multiset == tuple(sorted(parts))

    def test_not_abelian(self):
        with pytest.raises(NotAbelianError):
            minimal_projections(generate_algebra(matrix_units(2)), seed=0)

    def test_deterministic_for_seed(self):
        alg = generate_algebra(diag_units(4))
        a = minimal_projections(alg, seed=11)
        b = minimal_projections(alg, seed=11)
        assert a.multiplicities == b.multiplicities
        assert np.max(np.abs(a.block_projections - b.block_projections)) < 1e-10

    def test_projection_quality(self):
        rep = minimal_projections(generate_algebra(diag_units(3)), seed=1)
        for q in rep.block_projections:
            assert np.max(np.abs(q @ q - q)) < 1e-8
            assert np.max(np.abs(q - adjoint(q))) < 1e-8


class TestMixedSpectrum:
    def test_diagonal_pair_m2(self):
        shape = TracedAlgebraShape.full_matrix(2)
        rep = mixed_spectrum(diag_units(2), diag_units(2), shape)
        assert rep.multiset == (1, 1, 1, 1)
        assert rep.as_set == NSet.of(1)

    def test_degenerate_scalars(self):
        shape = TracedAlgebraShape.full_matrix(2)
        rep = mixed_spectrum([np.eye(2)], [np.eye(2)], shape)
        assert rep.multiset == (4,)

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        shape = TracedAlgebraShape.full_matrix(3)
        u = random_unitary(rng, 3)
        a = diag_units(3)
        b = [u @ x @ u.conj().T for x in diag_units(3)]
        assert mixed_spectrum(a, b, shape).as_set == mixed_spectrum(b, a, shape).as_set

    def test_unitary_invariance(self):
        rng = np.random.default_rng(7)
        shape = TracedAlgebraShape.full_matrix(2)
        a, b = diag_units(2), diag_units(2)
        base = mixed_spectrum(a, b, shape)
        for _ in range(3):
            u, v = random_unitary(rng, 2), random_unitary(rng, 2)
            moved = mixed_spectrum(
                [u @ x @ u.conj().T for x in a], [v @ x @ v.conj().T for x in b], shape
            )
            assert moved.multiset == base.multiset

    def test_resource_guard(self):
        shape = TracedAlgebraShape.full_matrix(8)
        with pytest.raises(ResourceGuardError):
            mixed_spectrum(diag_units(8), diag_units(8), shape, cap=32)

    def test_not_abelian_propagates(self):
        shape = TracedAlgebraShape.full_matrix(2)
        with pytest.raises(NotAbelianError):
            mixed_spectrum(matrix_units(2), diag_units(2), shape)


class TestFinitePukSpectrum:
    @pytest.mark.parametrize("n,blocks", [(2, 2), (3, 6)])
    def test_diagonal_masa(self, n, blocks):
        rep = finite_puk_spectrum(diag_units(n), TracedAlgebraShape.full_matrix(n))
        assert rep.as_set == NSet.of(1)
        assert rep.block_count == blocks

    def test_not_masa(self):
        with pytest.raises(NotMasaError):
            finite_puk_spectrum([np.eye(2)], TracedAlgebraShape.full_matrix(2))

    def test_masa_subspace_has_full_rank(self):
        # the retained blocks miss exactly n dimensions: the span of the masa
        rep = finite_puk_spectrum(diag_units(3), TracedAlgebraShape.full_matrix(3))
        assert rep.total == 9 - 3


class TestCutdownSpectrum:
    def setup_method(self):
        self.space = GnsSpace(TracedAlgebraShape.full_matrix(2))
        gens = [self.space.left(u) for u in diag_units(2)]
        gens += [self.space.right(u) for u in diag_units(2)]
        self.alg = generate_algebra(gens)

    def test_unit_cutdown_is_everything(self):
        rep = cutdown_spectrum(self.alg, np.eye(4))
        assert rep.multiset == minimal_projections(self.alg, seed=0).multiset

    def test_single_corner(self):
        p = self.space.left(diag_units(2)[0]) @ self.space.right(diag_units(2)[1])
        rep = cutdown_spectrum(self.alg, p)
        assert rep.multiset == (1,)

    def test_zero_projection(self):
        rep = cutdown_spectrum(self.alg, np.zeros((4, 4)))
        assert rep.multiset == ()
        assert rep.as_set.is_empty

    def test_rejects_outside_projection(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[1] = 1 / np.sqrt(2)
        with pytest.raises(NotInAlgebraError):
            cutdown_spectrum(self.alg, np.outer(v, v.conj()))

    def test_rejects_non_projection(self):
        with pytest.raises(ValueError):
            cutdown_spectrum(self.alg, 2 * np.eye(4))


class TestOrthonormalize:
    def test_rank_detection(self):
        a = np.eye(2, dtype=complex)
        basis = orthonormalize_span([a, 2 * a, a + 1e-12 * a])
        assert basis.shape[0] == 1

    def test_algebra_basis_frozen(self):
        alg = generate_algebra(diag_units(2))
        with pytest.raises(ValueError):
            alg.basis[0, 0, 0] = 5.0
