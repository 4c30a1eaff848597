import math
import threading

import numpy as np
import pytest

import raodist as rd
from raodist.core import clamped_acos, clamped_acosh, clamped_atanh
from raodist.oracle import path_length


class TestValidateParams:
    def test_accepts_in_domain(self):
        p = rd.validate_params("gaussian", [2, 0.5])
        assert p.coords == (2.0, 0.5)
        assert p.family == rd.get_family("gaussian")

    def test_sigma_zero(self):
        with pytest.raises(rd.DomainError, match="sigma must be positive"):
            rd.validate_params("gaussian", [2, 0])

    def test_categorical_implicit_last(self):
        p = rd.validate_params(rd.get_family("categorical", categories=3), [0.7, 0.2])
        assert p.coords == pytest.approx((0.7, 0.2))

    def test_categorical_infers_categories(self):
        assert rd.point("categorical", [0.5, 0.3, 0.2]).family.hyperparams == {"categories": 3}

    def test_full_probabilities_must_sum_to_one(self):
        fam = rd.get_family("categorical", categories=3)
        with pytest.raises(rd.DomainError):
            rd.point(fam, [0.5, 0.3, 0.3])

    @pytest.mark.parametrize("coords", [[float("nan"), 1.0], [0.0, float("inf")], ["a", 1]])
    def test_non_finite(self, coords):
        with pytest.raises(rd.DomainError):
            rd.point("gaussian", coords)

    def test_wrong_length(self):
        with pytest.raises(rd.DomainError, match="expects 2"):
            rd.point("gaussian", [1.0, 2.0, 3.0])

    def test_unknown_family(self):
        with pytest.raises(rd.UnknownFamilyError):
            rd.get_family("gamma")

    def test_unknown_hyper(self):
        with pytest.raises(rd.DomainError):
            rd.get_family("poisson", n=3)

    @pytest.mark.parametrize("name,hyper", [
        ("binomial", {"n": 0}), ("binomial", {"n": 2.5}), ("erlang", {"k": -1}),
        ("negative_binomial", {"r": 1.5}), ("generalised_gaussian", {"beta": 0.5}),
        ("student_t", {"nu": 0.0}), ("wishart", {"m": 2, "n": 1.5}),
    ])
    def test_invalid_hyper(self, name, hyper):
        with pytest.raises(rd.DomainError):
            rd.get_family(name, **hyper)

    def test_name_normalisation(self):
        assert rd.get_family("Negative-Binomial", r=2) == rd.get_family("negative_binomial", r=2)

    def test_student_t_real_nu(self):
        assert rd.get_family("student_t", nu=2.5).hyperparams == {"nu": 2.5}


class TestDescriptors:
    def test_hyper_distinguishes_manifolds(self):
        assert rd.get_family("binomial", n=3) != rd.get_family("binomial", n=4)
        assert hash(rd.get_family("binomial", n=3)) == hash(rd.get_family("binomial", n=3))

    def test_mismatch(self):
        p = rd.point(rd.get_family("binomial", n=3), [0.5])
        q = rd.point(rd.get_family("binomial", n=4), [0.5])
        with pytest.raises(rd.MismatchError):
            rd.distance(p, q)

    def test_label(self):
        assert rd.get_family("binomial", n=4).label == "binomial(n=4)"
        assert rd.get_family("poisson").label == "poisson"

    def test_registry_complete(self):
        assert len(rd.family_names()) == 26


class TestLogDensity:
    def test_poisson(self):
        assert rd.log_density(rd.point("poisson", [1.0]), 0) == pytest.approx(-1.0, abs=1e-15)

    def test_exponential(self):
        assert rd.log_density(rd.point("exponential", [2.0]), 0.0) == pytest.approx(math.log(2))

    def test_pareto_support(self):
        with pytest.raises(rd.SupportError):
            rd.log_density(rd.point("pareto", [1.0, 2.0]), 1.0)

    @pytest.mark.parametrize("name,x", [("poisson", -1), ("poisson", 1.5), ("binomial", 2),
                                        ("exponential", -0.1), ("power_function", 2.5)])
    def test_outside_support(self, name, x):
        fam = rd.get_family(name)
        with pytest.raises(rd.SupportError):
            rd.log_density(rd.point(fam, fam.canonical[0]), x)

    def test_normalised_gaussian(self):
        from scipy import integrate
        p = rd.point("gaussian", [1.0, 2.0])
        val, _ = integrate.quad(lambda x: math.exp(rd.log_density(p, x)), -np.inf, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)


class TestDistanceExamples:
    def test_gaussian(self):
        d = rd.distance(rd.point("gaussian", [2, 0.5]), rd.point("gaussian", [5, 1]))
        assert d == pytest.approx(3.443183448602137, rel=1e-14)

    def test_identity(self, family, rng):
        p = rd.sample_point(family, rng)
        assert rd.distance(p, p) == 0.0

    def test_poisson(self):
        assert rd.distance(rd.point("poisson", [1]), rd.point("poisson", [4])) == pytest.approx(2.0, abs=1e-15)


class TestFisherExamples:
    def test_binomial(self):
        assert rd.fisher(rd.point("binomial", [0.5])) == pytest.approx(np.array([[4.0]]))

    def test_gaussian(self):
        assert rd.fisher(rd.point("gaussian", [0, 1])) == pytest.approx(np.diag([1.0, 2.0]))

    def test_cauchy(self):
        assert rd.fisher(rd.point("cauchy", [0, 2])) == pytest.approx(np.diag([1 / 8, 1 / 8]))

    def test_symmetric_positive_definite(self, family, rng):
        for _ in range(10):
            g = rd.fisher(rd.sample_point(family, rng))
            assert np.array_equal(g, g.T)
            assert np.all(np.linalg.eigvalsh(g) > 0)

    def test_batched_metric_matches_pointwise(self, family, rng):
        pts = [rd.sample_point(family, rng) for _ in range(4)]
        batch = family.metric(np.stack([p.array for p in pts]))
        for p, g in zip(pts, batch):
            np.testing.assert_allclose(g, rd.fisher(p), rtol=1e-14)


class TestGeodesicPath:
    def test_vertical_gaussian(self):
        pts = rd.geodesic_path(rd.point("gaussian", [0, 1]), rd.point("gaussian", [0, 2]), 2)
        assert [pt.coords for pt in pts][0] == (0.0, 1.0)
        assert pts[1].coords == pytest.approx((0.0, math.sqrt(2)), abs=1e-15)
        assert pts[2].coords == (0.0, 2.0)

    def test_one_step_is_endpoints(self, family, rng):
        p, q = rd.sample_point(family, rng), rd.sample_point(family, rng)
        assert rd.geodesic_path(p, q, 1) == [p, q]

    def test_laplace_midpoint(self):
        p, q = rd.point("laplace", [-1, 1]), rd.point("laplace", [1, 1])
        mid = rd.geodesic_path(p, q, 2)[1]
        assert mid.coords == pytest.approx((0.0, math.sqrt(2)), abs=1e-12)
        # the midpoint splits the distance in half
        assert rd.distance(p, mid) == pytest.approx(rd.distance(p, q) / 2, rel=1e-12)

    @pytest.mark.parametrize("steps", [0, -1, 2.5, True])
    def test_bad_steps(self, steps):
        p = rd.point("poisson", [1])
        with pytest.raises(rd.DomainError):
            rd.geodesic_path(p, p, steps)

    def test_points_in_domain(self, family, rng):
        p, q = rd.sample_point(family, rng), rd.sample_point(family, rng)
        for pt in rd.geodesic_path(p, q, 20):
            assert family.domain(pt.array)

    def test_length_consistency(self, family, rng):
        p, q = rd.sample_point(family, rng), rd.sample_point(family, rng)
        d = rd.distance(p, q)
        assert path_length(rd.geodesic_path(p, q, 1000)) == pytest.approx(d, rel=1e-4)

    def test_constant_speed_split(self, family, rng):
        # points on a minimising geodesic split the distance additively
        p, q = rd.sample_point(family, rng), rd.sample_point(family, rng)
        pts = rd.geodesic_path(p, q, 3)
        total = sum(rd.distance(a, b) for a, b in zip(pts, pts[1:]))
        assert total == pytest.approx(rd.distance(p, q), rel=1e-9)


class TestClamps:
    def test_acosh(self):
        assert clamped_acosh(1 - 1e-16) == 0.0
        assert clamped_acosh(math.cosh(2.0)) == pytest.approx(2.0)

    def test_acos(self):
        assert clamped_acos(1 + 2e-16) == 0.0
        assert clamped_acos(-1 - 2e-16) == pytest.approx(math.pi)

    def test_atanh(self):
        assert clamped_atanh(-1e-17) == 0.0
        assert clamped_atanh(1.0) == math.inf
        assert clamped_atanh(0.5) == pytest.approx(math.atanh(0.5))

    def test_boundary_distance_is_finite_or_inf(self):
        p, q = rd.point("gaussian", [0, 1e-300]), rd.point("gaussian", [1, 1])
        d = rd.distance(p, q)
        assert 900 < d < math.inf


def test_concurrent_calls_agree(rng):
    fam = rd.get_family("inverse_gaussian")
    pairs = [(rd.sample_point(fam, rng), rd.sample_point(fam, rng)) for _ in range(200)]
    expected = [rd.distance(p, q) for p, q in pairs]
    results = [None] * 4

    def work(k):
        results[k] = [rd.distance(p, q) for p, q in pairs]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)
