import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvmodels.corpus import (
    einstein_sum,
    null_pseudo_einstein_block,
    perturbed,
    random_basis_change,
    random_isometry,
)
from pvmodels.errors import ClusterAmbiguity, NotDecomposable, SignatureMismatch
from pvmodels.linalg import admissible_signatures, make_space, same_span_distance
from pvmodels.model import Model0, change_basis, constant_curvature_model, direct_sum, ricci, zero_tensor
from pvmodels.pv import (
    Einstein,
    Neither,
    PseudoEinstein,
    check_commuting_on_grassmannian,
    classify_ricci,
    decompose_pv,
    eq2d_vanishing_check,
    is_puffini_videv,
    ricci_block_split,
)


class TestDeterministic:
    def test_constant_curvature_is_pv(self):
        for p, q in [(0, 3), (1, 3), (2, 2)]:
            assert is_puffini_videv(constant_curvature_model(make_space(p, q), -1.3)).verdict

    def test_zero_model(self):
        r = is_puffini_videv(Model0(make_space(1, 2), zero_tensor(3)))
        assert r.verdict and r.max_commutator_norm == 0.0

    def test_einstein_sums_are_pv(self):
        rng = np.random.default_rng(1)
        for k in range(20):
            m, _ = einstein_sum(3 + k % 4, bool(k % 2), rng)
            m = change_basis(m, random_basis_change(m.dim, rng))
            assert is_puffini_videv(m).verdict

    def test_null_block_is_pv(self):
        r = is_puffini_videv(null_pseudo_einstein_block(2.5))
        assert r.verdict
        rho = ricci(null_pseudo_einstein_block(2.5))
        assert np.abs(rho @ rho).max() < 1e-14 and np.abs(rho).max() > 1.0

    def test_non_pv_example(self, non_pv_model):
        r = is_puffini_videv(non_pv_model)
        assert not r.verdict
        assert r.witness is not None and r.max_commutator_norm > 1e-2

    def test_perturbed_sums_mostly_fail(self):
        rng = np.random.default_rng(2)
        verdicts = [is_puffini_videv(perturbed(einstein_sum(4, False, rng)[0], rng)).verdict for _ in range(10)]
        assert sum(verdicts) == 0

    def test_invariant_under_isometry(self):
        rng = np.random.default_rng(3)
        for pv in (True, False):
            m, _ = einstein_sum(5, True, rng)
            if not pv:
                m = perturbed(m, rng)
            q = random_isometry(m.space, rng)
            assert is_puffini_videv(change_basis(m, q)).verdict == pv


class TestSampled:
    def test_agrees_with_deterministic(self):
        rng = np.random.default_rng(4)
        for k in range(8):
            m, _ = einstein_sum(4, bool(k % 2), rng)
            if k % 3 == 0:
                m = perturbed(m, rng)
            det = is_puffini_videv(m).verdict
            for sig in admissible_signatures(m.space):
                assert check_commuting_on_grassmannian(m, sig, 10, seed=k).verdict == det

    def test_reproducible(self, non_pv_model):
        a = check_commuting_on_grassmannian(non_pv_model, (0, 1), 20, seed=5)
        b = check_commuting_on_grassmannian(non_pv_model, (0, 1), 20, seed=5)
        assert a.max_commutator_norm == b.max_commutator_norm
        assert np.array_equal(a.witness, b.witness)

    def test_zero_samples_vacuous(self, non_pv_model):
        r = check_commuting_on_grassmannian(non_pv_model, (0, 1), 0)
        assert r.verdict and r.n_samples == 0 and r.note

    def test_inadmissible_signature(self, non_pv_model):
        with pytest.raises(SignatureMismatch):
            check_commuting_on_grassmannian(non_pv_model, (1, 0))
        with pytest.raises(SignatureMismatch):
            check_commuting_on_grassmannian(non_pv_model, (0, 3))


class TestClassify:
    def test_einstein(self):
        assert classify_ricci(2.0 * np.eye(3)) == Einstein(2.0)

    def test_nilpotent(self):
        c = classify_ricci(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert isinstance(c, PseudoEinstein) and c.value == 0 and not c.is_pair

    def test_complex_pair(self):
        c = classify_ricci(np.array([[1.0, -2.0], [2.0, 1.0]]))
        assert isinstance(c, PseudoEinstein) and c.is_pair
        assert c.value == pytest.approx(1 + 2j)

    def test_neither(self):
        c = classify_ricci(np.diag([1.0, 3.0]))
        assert isinstance(c, Neither)
        assert c.witness == (3.0, 1.0)


class TestDecompose:
    def test_two_blocks(self, two_block_model):
        dec = decompose_pv(two_block_model)
        assert sorted(dec.dims) == [2, 2]
        assert sorted(b.eigenvalue.real for b in dec.blocks) == [1.0, 2.0]
        assert all(isinstance(b.classification, Einstein) for b in dec.blocks)
        assert dec.orthogonality_max < 1e-12

    def test_recovers_factor_spans(self, two_block_model):
        dec = decompose_pv(two_block_model)
        by_value = {round(b.eigenvalue.real): b.subspace.basis for b in dec.blocks}
        assert same_span_distance(by_value[1], np.eye(4)[:, :2]) < 1e-12
        assert same_span_distance(by_value[2], np.eye(4)[:, 2:]) < 1e-12

    def test_null_block(self):
        dec = decompose_pv(null_pseudo_einstein_block(1.0))
        assert dec.dims == [3]
        assert isinstance(dec.blocks[0].classification, PseudoEinstein)

    def test_not_decomposable(self, non_pv_model):
        with pytest.raises(NotDecomposable) as info:
            decompose_pv(non_pv_model)
        err = info.value
        # Ricci eigenvalues are 3, 1, 2 on e1, e2, e3: A(e1, e2, e2, e1) = 1 couples 3 and 1
        assert err.witness == (0, 1, 1, 0)
        assert err.value == pytest.approx(1.0)
        assert err.pv_verdict is False
        assert "A(1,2,2,1)" in str(err) and "not Puffini-Videv" in str(err)

    def test_split_reports_without_raising(self, non_pv_model):
        dec = ricci_block_split(non_pv_model)
        assert not dec.valid
        assert dec.cross_term_max == pytest.approx(2.0)

    def test_cluster_ambiguity(self):
        a = constant_curvature_model(make_space(0, 2), 1.0)
        b = constant_curvature_model(make_space(0, 2), 1.0 + 3e-6)
        with pytest.raises(ClusterAmbiguity):
            decompose_pv(direct_sum(a, b))

    def test_vanishing_identities(self):
        rng = np.random.default_rng(7)
        m, _ = einstein_sum(6, True, rng, constants=[1.0, -2.0, 0.5])
        m = change_basis(m, random_isometry(m.space, rng))
        dec = decompose_pv(m)
        rep = eq2d_vanishing_check(m, dec, tol=1e-10)
        assert rep.passes or len(dec.blocks) == 1

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.sampled_from([(0, 5), (1, 4), (2, 3)]))
    def test_block_span_equivariant(self, seed, pq):
        # decomposing Q^* M recovers Q^{-1} of the blocks of M
        rng = np.random.default_rng(seed)
        p, q = pq
        a = constant_curvature_model(make_space(p, 2), 1.0)
        b = constant_curvature_model(make_space(0, q - 2 + 1), -2.0) if q > 1 else None
        m = direct_sum(a, b)
        dec = decompose_pv(m)
        qmap = random_isometry(m.space, rng, scale=0.3)
        dec2 = decompose_pv(change_basis(m, qmap))
        for blk in dec.blocks:
            match = min(dec2.blocks, key=lambda b2: abs(b2.eigenvalue - blk.eigenvalue))
            assert same_span_distance(np.linalg.solve(qmap, blk.subspace.basis), match.subspace.basis) < 1e-8


class TestCorpusProperties:
    def test_decomposable_iff_pv(self):
        from pvmodels.corpus import equivalence_corpus

        for model, _ in equivalence_corpus(40, seed=5):
            pv = is_puffini_videv(model).verdict
            try:
                decompose_pv(model)
                decomposable = True
            except NotDecomposable as err:
                decomposable = False
                assert err.pv_verdict is False
            except ClusterAmbiguity:
                continue
            assert decomposable == pv

    def test_jacobi_commutators_agree_on_orthonormal_basis(self):
        # for Riemannian PV models [rho, J(e_i)] is the same (zero) for every unit e_i
        from pvmodels.model import jacobi

        rng = np.random.default_rng(8)
        for _ in range(10):
            m, _ = einstein_sum(5, False, rng)
            m = change_basis(m, random_isometry(m.space, rng))
            rho = ricci(m)
            comms = [rho @ jacobi(m, e) - jacobi(m, e) @ rho for e in np.eye(5)]
            assert max(np.linalg.norm(a - b) for a in comms for b in comms) < 1e-9
