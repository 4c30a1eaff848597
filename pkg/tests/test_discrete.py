import math

import numpy as np
import pytest

import raodist as rd
from raodist.discrete import negative_multinomial_hemisphere_points
from raodist.oracle import numeric_fisher_expectation, relative_error

P_CAT = (0.7, 0.2, 0.1)
Q_CAT = (0.1, 0.3, 0.6)
DISCRETE = [
    ("binomial", {"n": 1}), ("binomial", {"n": 7}), ("poisson", {}), ("geometric", {}),
    ("negative_binomial", {"r": 4}), ("categorical", {"categories": 3}),
    ("categorical", {"categories": 5}), ("multinomial", {"categories": 3, "trials": 3}),
    ("negative_multinomial", {"categories": 3, "x_n": 1}),
    ("negative_multinomial", {"categories": 4, "x_n": 3}),
]


class TestFisher:
    def test_binomial(self):
        np.testing.assert_allclose(rd.fisher(rd.point("binomial", [0.5])), [[4.0]])

    def test_binomial_trials(self):
        fam = rd.get_family("binomial", n=6)
        np.testing.assert_allclose(rd.fisher(rd.point(fam, [0.3])), [[6 / 0.21]])

    def test_categorical_uniform(self):
        g = rd.fisher(rd.point("categorical", [1 / 3, 1 / 3, 1 / 3]))
        np.testing.assert_allclose(g, [[6, 3], [3, 6]], rtol=1e-14)

    def test_poisson(self):
        np.testing.assert_allclose(rd.fisher(rd.point("poisson", [2.0])), [[0.5]])

    def test_geometric(self):
        theta = 0.4
        np.testing.assert_allclose(rd.fisher(rd.point("geometric", [theta])),
                                   [[1 / (theta ** 2 * (1 - theta))]], rtol=1e-14)

    def test_negative_multinomial(self):
        fam = rd.get_family("negative_multinomial", categories=3, x_n=2)
        p = np.array([0.2, 0.3, 0.5])
        expected = 2 / p[2] * (np.diag(1 / p[:2]) + 1 / p[2])
        np.testing.assert_allclose(rd.fisher(rd.point(fam, p)), expected, rtol=1e-14)

    @pytest.mark.parametrize("name,hyper", DISCRETE)
    def test_oracle(self, name, hyper, rng):
        fam = rd.get_family(name, **hyper)
        for _ in range(3):
            p = rd.sample_point(fam, rng)
            assert relative_error(numeric_fisher_expectation(p), rd.fisher(p)) <= 1e-9


class TestDistance:
    def test_categorical_example(self):
        d = rd.distance(rd.point("categorical", P_CAT), rd.point("categorical", Q_CAT))
        assert d == pytest.approx(1.431890810637962, rel=1e-13)
        assert d == pytest.approx(2 * math.acos(0.7544730796630945), rel=1e-12)

    def test_negative_multinomial_example(self):
        fam = rd.get_family("negative_multinomial", categories=3, x_n=1)
        d = rd.distance(rd.point(fam, P_CAT), rd.point(fam, Q_CAT))
        assert d == pytest.approx(2.636638117471909, rel=1e-13)

    def test_binomial_example(self):
        fam = rd.get_family("binomial", n=4)
        d = rd.distance(rd.point(fam, [0.25]), rd.point(fam, [0.75]))
        assert d == pytest.approx(2 * math.pi / 3, rel=1e-14)

    def test_geometric_example(self):
        d = rd.distance(rd.point("geometric", [0.75]), rd.point("geometric", [0.19]))
        assert d == pytest.approx(2 * abs(math.atanh(0.5) - math.atanh(0.9)), rel=1e-14)
        assert d == pytest.approx(1.8458266904983307, rel=1e-14)

    def test_binomial_scaling(self, rng):
        one = rd.get_family("binomial", n=1)
        nine = rd.get_family("binomial", n=9)
        for _ in range(50):
            p, q = rd.sample_point(one, rng), rd.sample_point(one, rng)
            d9 = rd.distance(rd.point(nine, p.coords), rd.point(nine, q.coords))
            assert d9 == pytest.approx(3 * rd.distance(p, q), rel=1e-15)

    def test_negative_multinomial_is_hemisphere_distance(self, rng):
        fam = rd.get_family("negative_multinomial", categories=4, x_n=3)
        for _ in range(50):
            p, q = rd.sample_point(fam, rng), rd.sample_point(fam, rng)
            P, Q = negative_multinomial_hemisphere_points(p.array, q.array)
            expected = 2 * math.sqrt(3) * rd.hemisphere_distance(P, Q, r=2.0)
            assert rd.distance(p, q) == pytest.approx(expected, rel=1e-10)
            # and the half-space distance of the projected points
            yp, yq = rd.central_projection(P, 2.0), rd.central_projection(Q, 2.0)
            assert rd.distance(p, q) == pytest.approx(2 * math.sqrt(3) * rd.halfspace_distance(yp, yq), rel=1e-10)

    def test_categorical_arccos_form(self, rng):
        fam = rd.get_family("categorical", categories=5)
        for _ in range(50):
            p, q = rd.sample_point(fam, rng), rd.sample_point(fam, rng)
            assert rd.distance(p, q) == pytest.approx(rd.categorical_sphere_distance(p, q), rel=1e-12)

    def test_categorical_near_points_keep_precision(self):
        p = rd.point("categorical", [0.5, 0.3, 0.2])
        q = rd.point("categorical", [0.5 + 1e-10, 0.3 - 1e-10, 0.2])
        # local metric length sqrt(dx^T G dx)
        dx = np.array([1e-10, -1e-10])
        expected = math.sqrt(dx @ rd.fisher(p) @ dx)
        assert rd.distance(p, q) == pytest.approx(expected, rel=1e-5)


class TestEmbedding:
    def test_quarter_half(self):
        np.testing.assert_allclose(rd.simplex_sphere_embedding((0.25, 0.25, 0.5)), [1, 1, math.sqrt(2)])

    def test_uniform_four(self):
        np.testing.assert_allclose(rd.simplex_sphere_embedding((0.25,) * 4), [1, 1, 1, 1])

    def test_norm_two(self, rng):
        for _ in range(50):
            s = rng.dirichlet(np.ones(6))
            assert np.linalg.norm(rd.simplex_sphere_embedding(s)) == pytest.approx(2.0, abs=1e-12)

    def test_rejects_unnormalised(self):
        with pytest.raises(rd.DomainError):
            rd.simplex_sphere_embedding((0.5, 0.6))


class TestHellinger:
    def test_identity(self):
        assert rd.hellinger_distance(P_CAT, P_CAT) == 0.0

    def test_example(self):
        assert rd.hellinger_distance(P_CAT, Q_CAT) == pytest.approx(math.sqrt(2 - 2 * 0.7544731), abs=1e-7)
        assert rd.bhattacharyya_coefficient(P_CAT, Q_CAT) == pytest.approx(0.7544731, abs=1e-7)

    def test_complementary_limit(self):
        h = rd.hellinger_distance((1 - 1e-12, 1e-12), (1e-12, 1 - 1e-12))
        assert h == pytest.approx(math.sqrt(2), abs=1e-5)

    def test_chord_bound(self, rng):
        fam = rd.get_family("categorical", categories=4)
        for _ in range(100):
            p, q = rd.sample_point(fam, rng), rd.sample_point(fam, rng)
            assert 2 * rd.hellinger_distance(p, q) < rd.distance(p, q)


class TestDomain:
    @pytest.mark.parametrize("name,coords", [
        ("binomial", [0.0]), ("binomial", [1.0]), ("poisson", [0.0]), ("geometric", [1.5]),
        ("categorical", [0.6, 0.5]), ("categorical", [0.0, 0.5, 0.5]),
    ])
    def test_rejects(self, name, coords):
        with pytest.raises(rd.DomainError):
            rd.point(name, coords)

    def test_log_density_multinomial(self):
        fam = rd.get_family("multinomial", categories=3, trials=3)
        p = rd.point(fam, [0.2, 0.3, 0.5])
        assert rd.log_density(p, [1, 1, 1]) == pytest.approx(math.log(6 * 0.2 * 0.3 * 0.5))
        with pytest.raises(rd.SupportError):
            rd.log_density(p, [1, 1, 2])

    def test_log_density_sums_to_one(self):
        fam = rd.get_family("negative_binomial", r=3)
        p = rd.point(fam, [0.4])
        total = sum(math.exp(rd.log_density(p, k)) for k in range(400))
        assert total == pytest.approx(1.0, abs=1e-12)
