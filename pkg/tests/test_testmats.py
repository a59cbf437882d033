import numpy as np
import pytest

from blockgs.densela import cond2, frobenius_norm
from blockgs.testmats import (
    GluedParams,
    LaeuchliParams,
    MonomialParams,
    generate,
    glued,
    laeuchli,
    monomial,
    monomial_eigenvalues,
)


class TestLaeuchli:
    def test_small_example(self):
        x = laeuchli(LaeuchliParams(3, 1, 2, 0.5), np.float64)
        assert np.array_equal(x, [[1, 1], [0.5, 0], [0, 0.5]])

    def test_structure(self):
        prm = LaeuchliParams(40, 6, 5, 1e-3)
        x = laeuchli(prm)
        n = 30
        assert x.shape == (40, n) and x.dtype == np.float32
        assert np.all(x[0] == 1)
        eta32 = np.float32(1e-3)
        assert np.array_equal(x[1:n + 1], eta32 * np.eye(n, dtype=np.float32))
        assert np.all(x[n + 1:] == 0)
        g = x.astype(np.float64).T @ x.astype(np.float64)
        off = g[~np.eye(n, dtype=bool)]
        assert np.all(off == 1.0)
        assert np.allclose(np.diag(g), 1 + float(eta32) ** 2, rtol=0, atol=0)

    def test_condition_number_matches_closed_form(self):
        eta, n = 1e-3, 500
        x = laeuchli(LaeuchliParams(1000, 100, 5, eta), np.float64)
        expected = np.sqrt(n + eta**2) / eta
        assert cond2(x) == pytest.approx(expected, rel=1e-8)
        assert expected == pytest.approx(22360.68, rel=1e-6)

    @pytest.mark.parametrize("bad", [dict(eta=0.0), dict(eta=1.0), dict(m=10)])
    def test_validation(self, bad):
        kw = dict(m=50, p=4, s=3, eta=0.1) | bad
        with pytest.raises(ValueError):
            LaeuchliParams(**kw)


class TestMonomial:
    def test_eigenvalues(self):
        lam = monomial_eigenvalues(4)
        assert np.allclose(lam, [1.3375, 3.8125, 6.2875, 8.7625])
        assert lam[0] > 0.1 and lam[-1] < 10

    def test_unit_first_columns(self):
        prm = MonomialParams(200, 10, 1, seed=4)
        x = monomial(prm, np.float64)
        assert np.allclose(np.linalg.norm(x, axis=0), 1, atol=1e-14)
        assert np.all(x > 0)

    def test_powers(self):
        x = monomial(MonomialParams(50, 2, 3, seed=1), np.float64)
        lam = monomial_eigenvalues(50)
        assert np.allclose(x[:, 1], lam * x[:, 0], rtol=1e-15)
        assert np.allclose(x[:, 2], lam**2 * x[:, 0], rtol=1e-14)

    def test_deterministic(self):
        prm = MonomialParams(100, 5, 3, seed=7)
        assert np.array_equal(generate(prm), generate(prm))
        assert not np.array_equal(generate(prm), generate(MonomialParams(100, 5, 3, seed=8)))

    def test_condition_grows_with_block_width(self):
        kappas = [cond2(generate(MonomialParams(300, 24 // s, s))) for s in (2, 6, 12)]
        assert kappas[0] < kappas[1] < kappas[2]

    def test_validation(self):
        with pytest.raises(ValueError):
            MonomialParams(10, 4, 3)


class TestGlued:
    def test_trivial_parameters_give_orthonormal(self):
        x = glued(GluedParams(60, 1, 5, 0.0, 0.0), np.float64)
        assert cond2(x) == pytest.approx(1.0, abs=1e-10)

    def test_first_block_has_condition_10_c1(self):
        x = glued(GluedParams(80, 3, 4, 2.0, 1.0), np.float64)
        assert cond2(x[:, :4]) == pytest.approx(100.0, rel=1e-10)

    def test_deterministic(self):
        prm = GluedParams.from_svec(100, 5, 4, 4, seed=3)
        assert np.array_equal(generate(prm), generate(prm))

    def test_svec_mapping(self):
        prm = GluedParams.from_svec(100, 5, 4, 6, seed=0)
        assert (prm.c1, prm.c2, prm.sweep_param) == (3.0, 3.0, 6.0)

    def test_perturbation_unit_frobenius(self):
        # with c2 = 0 every block has no scaling, so X_j - B = E_j
        x = glued(GluedParams(50, 3, 2, 1.0, 0.0, seed=2), np.float64)
        for j in (1, 2):
            diff = x[:, 2 * j:2 * j + 2] - x[:, :2]
            assert frobenius_norm(diff) == pytest.approx(1.0, rel=1e-12)

    def test_condition_monotone_over_sweep(self):
        kappas = [cond2(generate(GluedParams.from_svec(300, 20, 4, v, seed=0))) for v in range(1, 13)]
        assert all(a < b for a, b in zip(kappas, kappas[1:]))
        assert np.log10(kappas[-1] / kappas[0]) >= 6

    def test_validation(self):
        with pytest.raises(ValueError):
            GluedParams(50, 3, 2, -1.0, 0.0)
