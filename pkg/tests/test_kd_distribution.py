import json

import numpy as np
import pytest

from errors import DimensionMismatch, ImkitError, ZeroOverlap
from imaginarity import l1_coherence
from kd_distribution import (
    dump_tensor_json,
    extended_kd,
    extended_kd_general,
    kd,
    kd_reconstruct_general,
    nonpositivity,
    reconstruct,
)
from moment_detector import qubit_example_extended_kd, qubit_example_state
from imaginarity import y_twirl
from quantum_core import computational_basis, fourier_mub, make_basis, qubit_beta_basis, random_density


class TestKD:

    def test_marginals_are_born_probabilities(self):
        rho = random_density(3, seed=21)
        a = computational_basis(3)
        b = fourier_mub(a)
        q = kd(rho, a, b).values
        born_a = np.real(np.diag(rho.matrix))
        born_b = np.real(np.diag(b.vectors.conj().T @ rho.matrix @ b.vectors))
        assert q.sum(axis=1) == pytest.approx(born_a, abs=1e-12)
        assert q.sum(axis=0) == pytest.approx(born_b, abs=1e-12)

    def test_read_only(self):
        a = computational_basis(2)
        tensor = kd(random_density(2, seed=1), a, fourier_mub(a))
        with pytest.raises(ValueError):
            tensor.values[0, 0] = 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kd(random_density(2, seed=1), computational_basis(2), computational_basis(3))


class TestExtendedKD:

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_normalized_and_flags_mub(self, d):
        a = computational_basis(d)
        tensor = extended_kd(random_density(d, seed=d), a, fourier_mub(a))
        assert tensor.values.shape == (d, d, d)
        assert tensor.values.sum() == pytest.approx(1.0, abs=1e-12)
        assert tensor.is_mub
        assert tensor.mub_deviation < 1e-12

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_mub_modulus_factorizes(self, d):
        a = computational_basis(d)
        rho = random_density(d, seed=60 + d)
        tensor = extended_kd(rho, a, fourier_mub(a))
        expected = np.abs(rho.matrix)[:, :, None] / d
        assert np.abs(np.abs(tensor.values) - expected).max() < 1e-14

    def test_non_mub_pair_is_recorded(self):
        a = computational_basis(2)
        theta = 0.3
        b = make_basis([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        tensor = extended_kd(random_density(2, seed=4), a, b)
        assert not tensor.is_mub
        assert tensor.values.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(np.pi / 2, 0.0), (np.pi / 3, np.pi / 4), (1.1, 2.0)])
    def test_worked_qubit_family(self, alpha, beta):
        tensor = extended_kd(y_twirl(qubit_example_state(alpha)), computational_basis(2), qubit_beta_basis(beta))
        assert np.abs(tensor.values - qubit_example_extended_kd(alpha, beta)).max() < 1e-12

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_nonpositivity_equals_l1_coherence(self, d):
        a = computational_basis(d)
        rho = random_density(d, seed=40 + d)
        assert nonpositivity(extended_kd(rho, a, fourier_mub(a))) == pytest.approx(l1_coherence(rho, a), abs=1e-11)

    def test_dump_order(self):
        a = computational_basis(2)
        tensor = extended_kd(random_density(2, seed=2), a, fourier_mub(a))
        entries = json.loads(dump_tensor_json(tensor))["entries"]
        assert len(entries) == 8
        assert [(e["i"], e["j"], e["k"]) for e in entries[:3]] == [(0, 0, 0), (0, 0, 1), (0, 1, 0)]
        assert entries[5]["re"] == pytest.approx(tensor.values[1, 0, 1].real)


class TestReconstruction:

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_roundtrip(self, d):
        a = computational_basis(d)
        rho = random_density(d, seed=60 + d)
        back = reconstruct(extended_kd(rho, a, fourier_mub(a)))
        assert np.abs(back.matrix - rho.matrix).max() < 1e-10

    def test_zero_overlap(self):
        a = computational_basis(2)
        with pytest.raises(ZeroOverlap) as exc:
            reconstruct(extended_kd(random_density(2, seed=3), a, a))
        assert (exc.value.i, exc.value.k) == (0, 1)
        assert isinstance(exc.value, ImkitError)


class TestGeneralChain:

    def test_two_bases_reduce_to_kd(self):
        a = computational_basis(3)
        b = fourier_mub(a)
        rho = random_density(3, seed=8)
        assert np.abs(extended_kd_general(rho, [a, b]) - kd(rho, a, b).values).max() < 1e-14

    def test_extended_kd_is_a_b_a_chain(self):
        a = computational_basis(3)
        b = fourier_mub(a)
        rho = random_density(3, seed=9)
        chain = extended_kd_general(rho, [a, b, a])
        assert np.abs(chain.transpose(0, 2, 1) - extended_kd(rho, a, b).values).max() < 1e-14

    def test_four_bases_normalized_and_reconstructs(self):
        a = computational_basis(2)
        bases = [a, qubit_beta_basis(0.4), qubit_beta_basis(np.pi / 2), fourier_mub(a)]
        rho = random_density(2, seed=10)
        values = extended_kd_general(rho, bases)
        assert values.shape == (2, 2, 2, 2)
        assert values.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(kd_reconstruct_general(values, bases).matrix - rho.matrix).max() < 1e-10

    def test_needs_two_bases(self):
        with pytest.raises(ValueError):
            extended_kd_general(random_density(2, seed=1), [computational_basis(2)])
