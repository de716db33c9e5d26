import math
import random
from fractions import Fraction

import numpy as np
import pytest

from permutent.entropy import asymptotic_entropy
from permutent.gaussian import (
    build_gaussian,
    composition_moments,
    gaussian_entropy,
    gaussian_log2_weight,
    gaussian_model_to_json_obj,
)
from permutent.spectrum import SectorConfig, exact_spectrum, thermo_spectrum

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


def random_simplex(rng, d, floor=0.02):
    while True:
        raw = [rng.random() for _ in range(d)]
        total = sum(raw)
        p = [x / total for x in raw]
        if min(p) >= floor:
            return tuple(p)


class TestCompositionMoments:
    def test_fair_coin_block(self):
        mean, cov = composition_moments(thermo_spectrum((HALF, HALF), 10))
        assert mean.tolist() == [5.0, 5.0]
        assert cov.tolist() == [[2.5, -2.5], [-2.5, 2.5]]

    def test_three_level_block(self):
        mean, cov = composition_moments(thermo_spectrum((THIRD, THIRD, THIRD), 9))
        assert mean.tolist() == [3.0, 3.0, 3.0]
        assert np.allclose(np.diag(cov), 2.0, atol=1e-14)
        off = cov[~np.eye(3, dtype=bool)]
        assert np.allclose(off, -1.0, atol=1e-14)

    def test_multinomial_moment_formulas_exact(self):
        densities = (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))
        n = 14
        mean, cov = composition_moments(thermo_spectrum(densities, n))
        p = [float(x) for x in densities]
        for i in range(3):
            assert mean[i] == pytest.approx(n * p[i], abs=1e-12)
            assert cov[i, i] == pytest.approx(n * p[i] * (1.0 - p[i]), abs=1e-12)
            for j in range(3):
                if i != j:
                    assert cov[i, j] == pytest.approx(-n * p[i] * p[j], abs=1e-12)

    def test_hypergeometric_variance(self):
        # finite-L moments carry the (L-n)/(L-1) correction factor
        mean, cov = composition_moments(exact_spectrum(SectorConfig.finite((2, 2)), 2))
        assert mean.tolist() == [1.0, 1.0]
        expected_var = 2.0 * 0.25 * (4 - 2) / (4 - 1)
        assert cov[0, 0] == pytest.approx(expected_var, abs=1e-15)
        assert cov[0, 0] == pytest.approx(float(Fraction(1, 3)), abs=1e-15)

    def test_float_path_agrees_with_exact_path(self):
        exact_spec = thermo_spectrum((Fraction(1, 6), THIRD, HALF), 12)
        float_spec = thermo_spectrum((1 / 6, 1 / 3, 1 / 2), 12)
        assert not float_spec.is_exact
        m1, c1 = composition_moments(exact_spec)
        m2, c2 = composition_moments(float_spec)
        assert np.allclose(m1, m2, atol=1e-9)
        assert np.allclose(c1, c2, atol=1e-9)

    def test_empty_spectrum_rejected(self):
        from permutent.spectrum import Spectrum, SpectrumSource

        empty = Spectrum([], 3, 2, SpectrumSource.THERMODYNAMIC)
        with pytest.raises(ValueError):
            composition_moments(empty)


class TestBuildGaussian:
    def test_three_equal_levels_determinant(self):
        for n in (1, 10, 100):
            model = build_gaussian((THIRD, THIRD, THIRD), n)
            assert 1.0 / model.det_A == pytest.approx(n**2 / 27.0, rel=1e-9)

    def test_two_level_scalar_variance(self):
        model = build_gaussian((Fraction(3, 10), Fraction(7, 10)), 50)
        assert model.dim == 1
        assert model.covariance[0, 0] == pytest.approx(50 * 0.7 * 0.3, rel=1e-12)
        assert 1.0 / model.det_A == pytest.approx(50 * 0.7 * 0.3, rel=1e-12)

    def test_four_equal_levels_determinant(self):
        model = build_gaussian((Fraction(1, 4),) * 4, 16)
        assert 1.0 / model.det_A == pytest.approx(16**3 * 0.25**4, rel=1e-9)

    def test_determinant_identity_random(self):
        rng = random.Random(42)
        for d in (2, 3, 4, 5):
            for _ in range(10):
                p = random_simplex(rng, d)
                for n in (1, 10, 100):
                    model = build_gaussian(p, n)
                    expected = n ** (d - 1) * math.prod(p)
                    assert 1.0 / model.det_A == pytest.approx(expected, rel=1e-8)

    def test_precision_inverts_covariance(self):
        model = build_gaussian((0.1, 0.2, 0.3, 0.4), 25)
        identity = model.precision @ model.covariance
        assert np.abs(identity - np.eye(model.dim)).max() < 1e-9

    def test_mean_vector(self):
        model = build_gaussian((0.2, 0.3, 0.5), 40)
        assert np.allclose(model.mean, [12.0, 20.0])

    def test_zero_density_rejected(self):
        with pytest.raises(ValueError, match="effective_spin"):
            build_gaussian((0.5, 0.5, 0.0), 10)

    def test_bad_inputs_rejected(self):
        with pytest.raises(ValueError):
            build_gaussian((0.6, 0.6), 10)
        with pytest.raises(ValueError):
            build_gaussian((1.0,), 10)
        with pytest.raises(ValueError):
            build_gaussian((0.5, 0.5), 0)


class TestGaussianEntropy:
    def test_three_level_value(self):
        model = build_gaussian((THIRD, THIRD, THIRD), 100)
        assert gaussian_entropy(model) == pytest.approx(8.360603609054273, abs=1e-9)

    def test_two_level_value(self):
        model = build_gaussian((HALF, HALF), 100)
        assert gaussian_entropy(model) == pytest.approx(4.369023680068003, abs=1e-9)

    def test_identical_to_infinite_asymptotic(self):
        rng = random.Random(9)
        for d in (2, 3, 4, 5):
            for _ in range(5):
                p = random_simplex(rng, d)
                cfg = SectorConfig.infinite(p)
                for n in (1, 17, 400):
                    model = build_gaussian(p, n)
                    assert gaussian_entropy(model) == pytest.approx(
                        asymptotic_entropy(cfg, n), abs=1e-9
                    )

    def test_elimination_invariance(self):
        # permuting the densities changes which level the sum constraint removes
        base = (0.15, 0.25, 0.6)
        n = 64
        reference = gaussian_entropy(build_gaussian(base, n))
        for permuted in ((0.6, 0.25, 0.15), (0.25, 0.6, 0.15)):
            model = build_gaussian(permuted, n)
            assert gaussian_entropy(model) == pytest.approx(reference, abs=1e-9)
            assert 1.0 / model.det_A == pytest.approx(
                1.0 / build_gaussian(base, n).det_A, rel=1e-9
            )


class TestLocalLimit:
    def test_density_approaches_weights(self):
        # scaled deviation at the max-weight composition shrinks with n
        densities = (THIRD, THIRD, THIRD)
        sigma = 1.0
        deviations = []
        for n in (50, 100, 200, 400):
            spec = thermo_spectrum(densities, n, exact=False)
            top = max(spec.entries, key=lambda e: e.log2_weight)
            model = build_gaussian(densities, n)
            approx = 2.0 ** gaussian_log2_weight(model, top.parts)
            deviations.append(abs(top.weight - approx) * n**sigma)
        assert deviations[0] < 1.0
        assert deviations[0] > deviations[1] > deviations[2] > deviations[3]


def test_serialization_keys():
    model = build_gaussian((0.5, 0.5), 10)
    obj = gaussian_model_to_json_obj(model)
    assert set(obj) == {"dim", "n", "densities", "mean", "covariance", "det_A"}
    assert obj["covariance"] == [2.5]
