import warnings

import numpy as np
import pytest

from config import Settings
from errors import ImkitError, InsufficientMoments, NonRealMoment, NotMUB
from imaginarity import y_twirl
from kd_distribution import extended_kd, kd
from moment_detector import (
    classify,
    closed_form_dets,
    closed_form_moments,
    detect,
    detect_over_bases,
    hankel,
    HankelMatrix,
    hankel_det,
    kd_moments,
    moments,
    qubit_example_state,
    vandermonde_hankel,
)
from quantum_core import (
    computational_basis,
    fourier_mub,
    make_basis,
    qubit_beta_basis,
    random_density,
    random_diagonal_density,
    random_real_density,
)
from schema import VERDICT_DETECTED, VERDICT_INCONCLUSIVE


def _worked(alpha, beta, n_max=7):
    tensor = extended_kd(y_twirl(qubit_example_state(alpha)), computational_basis(2), qubit_beta_basis(beta))
    return moments(tensor, n_max)


class TestMoments:

    @pytest.mark.parametrize("alpha", np.linspace(0, 2 * np.pi, 7))
    @pytest.mark.parametrize("beta", [0.0, np.pi / 4, np.pi / 2, 1.0, 3.0])
    def test_closed_form(self, alpha, beta):
        ms = _worked(alpha, beta)
        assert ms.values == pytest.approx(closed_form_moments(alpha, beta), abs=1e-12)

    def test_sixth_moment_sign(self):
        # X = 1, beta = 0: r_6 = (1 - cos 0) / 1024
        assert _worked(np.pi / 2, 0.0).r(6) == pytest.approx(0.0, abs=1e-14)
        assert _worked(np.pi / 2, np.pi / 2).r(6) == pytest.approx(2 / 1024, abs=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_real_state_moments(self, d):
        a = computational_basis(d)
        tensor = extended_kd(y_twirl(random_real_density(d, seed=d)), a, fourier_mub(a))
        ms = moments(tensor, 5)
        expected = [d ** (2 - 2 * n) for n in range(1, 6)]
        assert ms.values == pytest.approx(expected, rel=1e-10)

    def test_non_real_moment(self):
        with pytest.raises(NonRealMoment) as exc:
            moments(np.array([0.5, 0.5j]), 3)
        assert exc.value.n == 1

    def test_first_moment_must_be_one(self):
        with pytest.raises(ImkitError, match="r_1"):
            moments(np.array([0.2, 0.3]), 2)

    def test_imag_residual_per_order(self):
        ms = moments(np.array([0.5 + 1e-11j, 0.5]), 3)
        assert ms.imag_residual(1) == pytest.approx(1e-11, rel=1e-6)
        assert ms.imag_residual(2) == pytest.approx(1e-11, rel=1e-6)
        assert ms.imag_residual(3) == pytest.approx(7.5e-12, rel=1e-6)
        assert ms.max_imag_residual == pytest.approx(1e-11, rel=1e-6)

    def test_kd_moments(self):
        a = computational_basis(3)
        tensor = kd(y_twirl(random_density(3, seed=12)), a, fourier_mub(a))
        values = kd_moments(tensor, 4)
        assert np.iscomplexobj(values)
        assert values[0] == pytest.approx(1.0, abs=1e-12)
        assert values[2] == pytest.approx(np.sum(tensor.values**3), abs=1e-15)

    def test_kd_moments_agree_with_extended_for_qubit_second_order(self):
        rho = y_twirl(qubit_example_state(np.pi / 2))
        a, b = computational_basis(2), qubit_beta_basis(np.pi / 2)
        two_index = kd_moments(kd(rho, a, b), 3)
        assert two_index[1] == pytest.approx(0.5, abs=1e-12)
        assert two_index[1].real == pytest.approx(moments(extended_kd(rho, a, b), 3).r(2), abs=1e-12)


class TestHankel:

    def test_layout(self):
        ms = _worked(np.pi / 2, np.pi / 4)
        h = hankel(ms, 2)
        r = ms.values
        assert h.entries.shape == (3, 3)
        assert h.entries[0, 0] == r[0]
        assert h.entries[1, 2] == r[3]
        assert h.entries[2, 2] == r[4]
        assert np.array_equal(h.entries, h.entries.T)

    def test_insufficient_moments(self):
        ms = _worked(np.pi / 2, 0.0, n_max=4)
        with pytest.raises(InsufficientMoments):
            hankel(ms, 2)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_det_matches_numpy(self, m):
        ms = _worked(1.2, 0.7)
        h = hankel(ms, m)
        assert hankel_det(h) == pytest.approx(np.linalg.det(h.entries), abs=1e-16)

    def test_singular_matrix_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert hankel_det(HankelMatrix(order=2, entries=np.ones((3, 3)))) == 0.0

    @pytest.mark.parametrize("alpha", np.linspace(0, 2 * np.pi, 9))
    @pytest.mark.parametrize("beta", [0.0, np.pi / 4, np.pi / 2, 2.5])
    def test_det_closed_form(self, alpha, beta):
        ms = _worked(alpha, beta)
        dets = [hankel_det(hankel(ms, m)) for m in (1, 2, 3)]
        assert dets == pytest.approx(list(closed_form_dets(alpha, beta)), abs=1e-14)

    def test_reference_values(self):
        assert closed_form_dets(np.pi / 2, np.pi / 2)[0] == pytest.approx(-3 / 16, abs=1e-15)
        assert closed_form_dets(np.pi / 2, 0.0)[1] == pytest.approx(-1 / 1024, abs=1e-15)
        assert closed_form_dets(np.pi / 2, np.pi / 4)[2] == pytest.approx(-3 / 2**24, abs=1e-18)

    @pytest.mark.parametrize("seed", range(5))
    def test_positive_distribution_is_vandermonde(self, seed):
        rho = random_diagonal_density(3, seed=seed)
        a = computational_basis(3)
        tensor = extended_kd(rho, a, a)
        ms = moments(tensor, 7)
        nodes = tensor.values.real.ravel()
        for m in (1, 2, 3):
            h = hankel(ms, m)
            assert np.abs(vandermonde_hankel(nodes, m).entries - h.entries).max() < 1e-12
            assert hankel_det(h) >= -1e-13

    def test_classify(self):
        assert classify(-1e-3) == "negative"
        assert classify(1e-3) == "nonnegative"
        assert classify(5e-13) == "within-tolerance-of-zero"
        assert classify(-5e-13) == "within-tolerance-of-zero"
        assert classify(-5e-13, tol_det=1e-14) == "negative"


class TestDetect:

    @pytest.mark.parametrize(
        "beta,order",
        [(np.pi / 2, 1), (0.0, 2), (np.pi / 4, 2)],
    )
    def test_minimal_order(self, beta, order):
        report = detect(qubit_example_state(np.pi / 2), computational_basis(2), qubit_beta_basis(beta))
        assert report.detected
        assert report.verdict == VERDICT_DETECTED
        assert report.minimal_order == order
        assert report.determinants[order - 1].classification == "negative"
        assert report.reference_M_l1 == pytest.approx(1.0)

    def test_report_fields(self):
        settings = Settings(seed=7)
        report = detect(random_density(3, seed=3), computational_basis(3), fourier_mub(computational_basis(3)), 2, settings)
        assert report.m_max == 2
        assert [r.m for r in report.determinants] == [1, 2]
        assert [r.n for r in report.moments] == list(range(1, 6))
        assert report.moments[0].value == pytest.approx(1.0)
        assert report.seed == 7
        assert report.tolerances["tol_det"] == settings.tol_det
        assert report.basis_b == "fourier"

    def test_moment_records_carry_imag_residuals(self):
        report = detect(random_density(3, seed=5), computational_basis(3), fourier_mub(computational_basis(3)), 2, Settings())
        residuals = [r.imag_residual for r in report.moments]
        assert all(r >= 0.0 for r in residuals)
        assert max(residuals) == pytest.approx(report.max_imag_residual, abs=1e-18)

    @pytest.mark.parametrize("seed", range(10))
    def test_real_states_are_not_detected(self, seed):
        d = 2 + seed % 2
        a = computational_basis(d)
        report = detect(random_real_density(d, seed=seed), a, fourier_mub(a))
        assert not report.detected
        assert report.minimal_order is None
        assert report.verdict == "Not detected up to order 3"

    def test_inconclusive_for_tiny_imaginarity(self):
        report = detect(qubit_example_state(1e-3), computational_basis(2), qubit_beta_basis(0.0))
        assert not report.detected
        assert report.verdict == VERDICT_INCONCLUSIVE

    def test_not_mub(self):
        a = computational_basis(2)
        b = make_basis([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
        with pytest.raises(NotMUB):
            detect(random_density(2, seed=1), a, b)

    def test_m_max_positive(self):
        a = computational_basis(2)
        with pytest.raises(ValueError):
            detect(random_density(2, seed=1), a, fourier_mub(a), 0)

    def test_over_bases(self):
        rho = qubit_example_state(np.pi / 2)
        a = computational_basis(2)
        # beta = pi/4 with m_max = 1 misses; beta = pi/2 catches it at order 1
        result = detect_over_bases(rho, a, [qubit_beta_basis(np.pi / 4), qubit_beta_basis(np.pi / 2)], m_max=1)
        assert result.detected
        assert [r.detected for r in result.reports] == [False, True]
