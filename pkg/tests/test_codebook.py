import math

import numpy as np
import pytest

from gdstbc.codebook import (
    Codebook,
    Codeword,
    average_scale,
    check_scaled_unitary,
    coding_gain,
    verify_full_diversity,
)
from gdstbc.design import construct_design, evaluate
from gdstbc.signalset import (
    GroupSignalSet,
    SignalSet,
    construct_signal_set,
    hyperbola_signal_set,
    preset_signal_set,
)

from oracles import assemble_real_vector


@pytest.fixture(scope="module")
def cb16():
    return Codebook(construct_design(2), construct_signal_set(2, 16))


@pytest.fixture(scope="module")
def cb_alamouti():
    return Codebook(construct_design(1), construct_signal_set(1, 16))


class TestCodewordAssembly:
    def test_all_ones_index(self, cb16):
        cw = cb16.codeword_at((0, 0, 0, 0))
        # group point (1, 0) everywhere: x1 = 1+j, x2 = 0, x3 = 1+j, x4 = 0
        assert cw.scale_sq == pytest.approx(4.0, abs=1e-12)
        gram = cw.matrix.conj().T @ cw.matrix
        assert np.allclose(gram, 4 * np.eye(4), atol=1e-12)
        x1 = cw.matrix[0, 0]
        assert x1 == pytest.approx(1 + 1j)
        assert cw.matrix[0, 1] == 0 and cw.matrix[1, 1] == x1

    def test_matches_design_evaluation(self, cb16):
        pts = [g.points for g in cb16.sset.groups]
        grp = cb16.grouping
        d = cb16.design
        for idx in ((0, 0, 0, 0), (1, 0, 1, 1), (0, 1, 0, 1)):
            x = assemble_real_vector(grp, pts, idx)
            expected = evaluate(d, x)
            cw = cb16.codeword_at(idx)
            assert np.allclose(cw.matrix, expected, atol=1e-12)
            assert cw.scale_sq == pytest.approx(float(x @ x), abs=1e-12)

    def test_stack_consistent_with_codeword_at(self, cb16):
        for lin in range(cb16.M):
            idx = cb16.unravel_index(lin)
            assert np.array_equal(cb16.matrices[lin], cb16.codeword_at(idx).matrix)
            assert cb16.scales[lin] == pytest.approx(cb16.codeword_at(idx).scale_sq)

    def test_no_zero_codeword(self, cb16):
        assert float(cb16.scales.min()) > 0

    def test_index_out_of_range(self, cb16):
        with pytest.raises(IndexError):
            cb16.codeword_at((2, 0, 0, 0))
        with pytest.raises(ValueError):
            cb16.codeword_at((0, 0, 0))

    def test_alamouti_codewords_are_qam_scaled_unitary(self, cb_alamouti):
        assert cb_alamouti.M == 16
        for lin in range(16):
            cw = cb_alamouti.codeword_at(cb_alamouti.unravel_index(lin))
            ok, measured = check_scaled_unitary(cw)
            assert ok and measured == pytest.approx(4.0, abs=1e-12)
            # entries are +-1 +- j QAM points
            x1 = cw.matrix[0, 0]
            assert abs(x1.real) == 1.0 and abs(x1.imag) == 1.0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Codebook(construct_design(3), construct_signal_set(2, 16))


class TestScaledUnitarity:
    def test_identity_codeword(self):
        cw = Codeword(matrix=np.eye(3, dtype=complex), scale_sq=1.0, index=(0, 0, 0, 0))
        assert check_scaled_unitary(cw) == (True, pytest.approx(1.0))

    def test_perturbed_hyperbola_codeword_fails(self):
        cb = Codebook(construct_design(2), hyperbola_signal_set([1.0], 0.25))
        cw = cb.codeword_at((0, 0, 0, 0))
        bad = cw.matrix.copy()
        bad[0, 0] += 0.1  # pull one symbol off the hyperbola
        ok, _ = check_scaled_unitary(
            Codeword(matrix=bad, scale_sq=cw.scale_sq, index=cw.index)
        )
        assert ok is False

    def test_whole_codebook_residual(self, cb16):
        assert cb16.max_unitarity_residual() <= 1e-12


class TestFullDiversity:
    def test_lambda2_exhaustive(self, cb16):
        rep = verify_full_diversity(cb16)
        assert rep.all_full_rank and rep.pairs_checked == 120
        assert rep.min_abs_det > 0
        assert rep.bound_holds and rep.min_bound_margin >= -1e-6
        assert rep.claim == "full diversity verified (exhaustive)"

    def test_lambda3_two_points_per_group(self):
        cb = Codebook(construct_design(3), construct_signal_set(3, 16))
        rep = verify_full_diversity(cb)
        assert rep.all_full_rank and rep.pairs_checked == 120
        assert rep.bound_holds

    def test_rejected_hyperbola_branch_pair_fails(self):
        cb = Codebook(construct_design(2), hyperbola_signal_set([1.0], 0.25, branch="AB"))
        rep = verify_full_diversity(cb)
        assert not rep.all_full_rank
        assert rep.num_rank_deficient > 0
        assert rep.first_deficient_pair is not None
        assert rep.min_abs_det == pytest.approx(0.0, abs=1e-9)
        assert "rank-deficient" in rep.claim

    def test_sampled_mode_claim(self, cb16):
        rep = verify_full_diversity(cb16, mode="sampled", count=500, seed=3)
        assert rep.all_full_rank
        assert rep.claim == "no counterexample found (sampled)"

    def test_exhaustive_cap(self):
        cb = Codebook(construct_design(2), construct_signal_set(2, 10000))
        with pytest.raises(ValueError):
            verify_full_diversity(cb, mode="exhaustive")


class TestCodingGain:
    def test_alamouti_bpsk_value(self, cb_alamouti):
        # independent enumeration oracle over all 120 pairs
        mats = cb_alamouti.matrices
        gains = []
        for i in range(16):
            for j in range(i + 1, 16):
                d = mats[j] - mats[i]
                gains.append(np.linalg.det(d.conj().T @ d).real ** 0.5)
        assert min(gains) == pytest.approx(4.0, abs=1e-9)
        assert coding_gain(cb_alamouti) == pytest.approx(4.0, abs=1e-9)

    def test_repeated_codeword_gives_zero(self):
        g = GroupSignalSet(dim=2, points=np.array([[1.0, 0.0], [1.0, 0.0]]),
                           radii=(1.0,), family="custom")
        cb = Codebook(construct_design(2), SignalSet(groups=(g, g, g, g)))
        assert coding_gain(cb) == pytest.approx(0.0, abs=1e-12)

    def test_lambda2_regression_value(self, cb16):
        # frozen regression baseline, computed by exhaustive enumeration
        gain = coding_gain(cb16)
        mats = cb16.matrices
        oracle = min(
            np.linalg.det((mats[j] - mats[i]).conj().T @ (mats[j] - mats[i])).real
            ** (1 / 4)
            for i in range(16) for j in range(i + 1, 16)
        )
        assert gain == pytest.approx(oracle, rel=1e-9)
        assert gain > 0


class TestAverageScale:
    def test_lambda2_equals_antenna_count(self, cb16):
        assert average_scale(cb16) == pytest.approx(4.0, abs=1e-9)

    def test_group_marginal_oracle(self):
        # exhaustive mean equals the sum of per-group mean norms
        cb = Codebook(construct_design(3), preset_signal_set("paper-8ant-rate2"))
        oracle = sum(float(np.mean(g.norms_sq())) for g in cb.sset.groups)
        assert average_scale(cb) == pytest.approx(oracle, abs=1e-9)
        # four unit-power groups: the mean scale is 4 regardless of lam
        assert average_scale(cb) == pytest.approx(4.0, abs=1e-9)

    def test_closed_form_path(self, cb16):
        assert average_scale(cb16, exhaustive_limit=1) == pytest.approx(4.0, abs=1e-12)

    def test_single_unitary_codeword(self):
        half = math.sqrt(0.5)
        g_i = GroupSignalSet(dim=1, points=np.array([[half]]), radii=(half,), family="custom")
        g_z = GroupSignalSet(dim=1, points=np.array([[0.0]]), radii=(), family="custom")
        cb = Codebook(construct_design(1), SignalSet(groups=(g_i, g_i, g_z, g_z)))
        assert cb.M == 1
        cw = cb.codeword_at((0, 0, 0, 0))
        ok, measured = check_scaled_unitary(cw)
        assert ok and measured == pytest.approx(1.0, abs=1e-12)
        assert average_scale(cb) == pytest.approx(1.0, abs=1e-12)


class TestCodebookInvariants:
    @pytest.mark.parametrize("lam,m", [(1, 16), (2, 16), (2, 256), (3, 16)])
    def test_injectivity(self, lam, m):
        cb = Codebook(construct_design(lam), construct_signal_set(lam, m))
        keys = {cb.matrices[i].round(9).tobytes() for i in range(cb.M)}
        assert len(keys) == cb.M

    def test_block_bound_holds_on_pairs(self, cb16):
        # det(dS^H dS) >= max(|det dA|^2, |det dB|^2)^2 - 1e-6 on every pair
        mats = cb16.matrices
        for i in range(16):
            for j in range(i + 1, 16):
                d = mats[j] - mats[i]
                lhs = np.linalg.det(d.conj().T @ d).real
                da = abs(np.linalg.det(d[:2, :2])) ** 2
                db = abs(np.linalg.det(d[2:, :2])) ** 2
                assert lhs >= max(da, db) ** 2 - 1e-6

    def test_rate(self):
        cb = Codebook(construct_design(3), preset_signal_set("paper-8ant-rate2"))
        assert cb.M == 16**4
        assert cb.rate_bits_per_use == pytest.approx(2.0, abs=1e-12)

    def test_size_is_product_of_groups(self, cb16):
        assert cb16.M == int(np.prod(cb16.sizes)) == 16

    def test_group_decodable_flag(self, cb16):
        assert cb16.group_decodable is True

    def test_linear_index_roundtrip(self, cb16):
        for lin in range(cb16.M):
            assert cb16.linear_index(cb16.unravel_index(lin)) == lin
