import math

import numpy as np
import pytest
import scipy.linalg

import raodist as rd
from raodist.matrix import vec
from raodist.oracle import path_length


def random_spd(rng, m, cond=10.0):
    q, _ = np.linalg.qr(rng.normal(size=(m, m)))
    return q @ np.diag(np.exp(rng.uniform(0, math.log(cond), m))) @ q.T


class TestDuplication:
    def test_one(self):
        np.testing.assert_array_equal(rd.duplication_matrix(1), [[1.0]])

    def test_two(self):
        np.testing.assert_array_equal(rd.duplication_matrix(2), [[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]])

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 6])
    def test_defining_property(self, rng, m):
        a = rng.normal(size=(m, m))
        a = a + a.T
        np.testing.assert_array_equal(rd.duplication_matrix(m) @ rd.vech(a), vec(a))

    def test_shape(self):
        assert rd.duplication_matrix(5).shape == (25, 15)

    def test_vech_roundtrip(self, rng):
        a = random_spd(rng, 4)
        np.testing.assert_allclose(rd.unvech(rd.vech(a)), a, rtol=1e-15, atol=1e-15)

    def test_unvech_bad_length(self):
        with pytest.raises(rd.DimensionError):
            rd.unvech(np.ones(4))


class TestFisher:
    def test_scalar(self):
        np.testing.assert_allclose(rd.wishart_fisher([[3.0]], 5), [[5 / 18]])

    def test_identity(self):
        np.testing.assert_allclose(rd.wishart_fisher(np.eye(2), 2), np.diag([1.0, 2.0, 1.0]))

    def test_kronecker_form(self, rng):
        s = random_spd(rng, 3)
        d = rd.duplication_matrix(3)
        si = np.linalg.inv(s)
        expected = 0.5 * 4.0 * d.T @ np.kron(si, si) @ d
        np.testing.assert_allclose(rd.wishart_fisher(s, 4.0), expected, rtol=1e-12)

    def test_inverse_wishart_same_matrix(self, rng):
        w = rd.get_family("wishart", m=3, n=5)
        iw = rd.get_family("inverse_wishart", m=3, n=5)
        for _ in range(5):
            c = rd.sample_point(w, rng).array
            np.testing.assert_array_equal(w.metric(c), iw.metric(c))

    @pytest.mark.parametrize("m", range(1, 7))
    def test_positive_definite(self, rng, m):
        g = rd.wishart_fisher(random_spd(rng, m, cond=100.0), m + 0.5)
        assert np.all(np.linalg.eigvalsh(g) > 0)

    def test_family_metric(self, rng):
        fam = rd.get_family("wishart", m=2, n=3)
        p = rd.sample_point(fam, rng)
        np.testing.assert_allclose(rd.fisher(p), rd.wishart_fisher(rd.unvech(p.array), 3), rtol=1e-14)


class TestEigenvalues:
    def test_example(self):
        np.testing.assert_allclose(np.sort(rd.spd_geodesic_eigenvalues(np.eye(2), np.diag([2, 0.5]))), [0.5, 2.0])

    def test_same(self, rng):
        s = random_spd(rng, 4)
        np.testing.assert_allclose(rd.spd_geodesic_eigenvalues(s, s), np.ones(4), rtol=1e-12)

    def test_generalised_eigensolve(self, rng):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        ref = scipy.linalg.eigh(s2, s1, eigvals_only=True)
        np.testing.assert_allclose(np.sort(rd.spd_geodesic_eigenvalues(s1, s2)), np.sort(ref), rtol=1e-10)

    def test_reciprocal(self, rng):
        s1, s2 = random_spd(rng, 4), random_spd(rng, 4)
        a = np.sort(rd.spd_geodesic_eigenvalues(s1, s2))
        b = np.sort(1.0 / rd.spd_geodesic_eigenvalues(s2, s1))
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_not_spd(self):
        with pytest.raises(rd.DomainError):
            rd.spd_geodesic_eigenvalues(np.eye(2), np.diag([1.0, -1.0]))

    def test_not_symmetric(self):
        with pytest.raises(rd.DomainError):
            rd.spd_geodesic_eigenvalues(np.eye(2), [[1.0, 0.5], [0.0, 1.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(rd.DimensionError):
            rd.spd_geodesic_eigenvalues(np.eye(2), np.eye(3))


class TestDistance:
    def test_scaled_identity(self):
        s = np.array([[2.0, 0.3], [0.3, 1.0]])
        assert rd.wishart_distance(s, math.e * s, 4) == pytest.approx(2.0, rel=1e-14)

    def test_example(self):
        d = rd.wishart_distance(np.eye(2), np.diag([2.0, 0.5]), 3)
        assert d == pytest.approx(math.sqrt(1.5 * 2 * math.log(2) ** 2), rel=1e-14)
        assert d == pytest.approx(1.2005661338529434, rel=1e-14)

    def test_family_default_dof(self):
        fam = rd.get_family("wishart")
        p, q = (rd.point(fam, c) for c in fam.canonical)
        assert rd.distance(p, q) == pytest.approx(0.980258143469, rel=1e-11)

    def test_identity(self, rng):
        s = random_spd(rng, 3)
        assert rd.wishart_distance(s, s, 4) == 0.0

    def test_symmetry(self, rng):
        for _ in range(20):
            s1, s2 = random_spd(rng, 4), random_spd(rng, 4)
            assert rd.wishart_distance(s1, s2, 5) == pytest.approx(rd.wishart_distance(s2, s1, 5), rel=1e-12)

    def test_inversion_invariance(self, rng):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        d = rd.wishart_distance(s1, s2, 4)
        assert rd.wishart_distance(np.linalg.inv(s1), np.linalg.inv(s2), 4) == pytest.approx(d, rel=1e-10)

    def test_matrix_input(self):
        fam = rd.get_family("wishart", m=2, n=3)
        p = rd.point(fam, np.eye(2))
        q = rd.point(fam, [[2.0, 0.0], [0.0, 0.5]])
        assert rd.distance(p, q) == pytest.approx(1.2005661338529434, rel=1e-14)

    def test_dof_below_dimension(self):
        with pytest.raises(rd.DomainError):
            rd.get_family("wishart", m=3, n=2)


class TestGeodesic:
    def test_endpoints(self, rng):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        path = rd.spd_geodesic(s1, s2, [0.0, 1.0])
        np.testing.assert_allclose(path[0], s1, atol=1e-12)
        np.testing.assert_allclose(path[1], s2, atol=1e-12)

    def test_midpoint_commuting(self):
        mid = rd.spd_geodesic(np.eye(2), np.diag([4.0, 0.25]), [0.5])[0]
        np.testing.assert_allclose(mid, np.diag([2.0, 0.5]), rtol=1e-14)

    def test_length(self, rng):
        fam = rd.get_family("wishart", m=3, n=4)
        p, q = rd.sample_point(fam, rng), rd.sample_point(fam, rng)
        assert path_length(rd.geodesic_path(p, q, 1000)) == pytest.approx(rd.distance(p, q), rel=1e-4)


class TestDensity:
    def test_wishart_matches_scipy(self, rng):
        from scipy import stats
        s, x = random_spd(rng, 3), random_spd(rng, 3)
        p = rd.point(rd.get_family("wishart", m=3, n=5), s)
        assert rd.log_density(p, x) == pytest.approx(stats.wishart(df=5, scale=s).logpdf(x), rel=1e-12)

    def test_inverse_wishart_matches_scipy(self, rng):
        from scipy import stats
        s, x = random_spd(rng, 3), random_spd(rng, 3)
        p = rd.point(rd.get_family("inverse_wishart", m=3, n=5), s)
        ref = stats.invwishart(df=5, scale=s).logpdf(x)
        assert rd.log_density(p, x) == pytest.approx(ref, rel=1e-12)

    def test_support(self):
        p = rd.point(rd.get_family("wishart", m=2, n=3), np.eye(2))
        with pytest.raises(rd.SupportError):
            rd.log_density(p, np.diag([1.0, -1.0]))
