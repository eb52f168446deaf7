import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from hcs.errors import ConfigurationError, TruncationError
from hcs.weights import (
    WeightFamily,
    builtin_family,
    family_from_dict,
    family_from_file,
    tabulated_family,
    validate_family,
)


@pytest.fixture(scope="module")
def exponential():
    return builtin_family("exponential")


@pytest.fixture(scope="module")
def sqrt_exponential():
    return builtin_family("sqrt-exponential")


class TestBuiltinFamilies:
    def test_unknown_name(self):
        with pytest.raises(ConfigurationError):
            builtin_family("gaussian")

    def test_exponential_moments_are_factorials(self, exponential):
        assert exponential.moment(0) == 1.0
        assert exponential.moment(4) == 24.0
        assert exponential.moment(5) == 120.0

    def test_sqrt_exponential_moments(self, sqrt_exponential):
        assert sqrt_exponential.moment(2) == 120.0
        assert sqrt_exponential.moment(3) == 5040.0

    def test_sqrt_exponential_m_squared(self, sqrt_exponential):
        assert sqrt_exponential.M_squared(4.0) == pytest.approx(2.0 / math.sinh(2.0), rel=1e-14)
        assert sqrt_exponential.M_squared(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_moments_match_adaptive_quadrature_oracle(self, exponential, sqrt_exponential):
        # scipy adaptive quadrature is independent of the Gauss-Laguerre path
        for fam in (exponential, sqrt_exponential):
            for n in (1, 3, 6):
                oracle, _ = quad(lambda u: u**n * fam.rho(u), 0, np.inf)
                assert fam.moment(n) == pytest.approx(oracle, rel=1e-9)

    def test_quadrature_vs_closed_form(self, exponential, sqrt_exponential):
        for fam in (exponential, sqrt_exponential):
            for n in range(13):
                closed = fam.moment(n)
                assert abs(fam.moment_by_quadrature(n) - closed) / closed <= 1e-9

    def test_moment_log_convexity(self, exponential, sqrt_exponential):
        for fam in (exponential, sqrt_exponential):
            ratios = [fam.moment(n + 1) / fam.moment(n) for n in range(12)]
            assert all(b >= a for a, b in zip(ratios, ratios[1:]))

    def test_negative_order_rejected(self, exponential):
        with pytest.raises(ValueError):
            exponential.moment(-1)


class TestNormalization:
    def test_vacuum_limit(self, exponential):
        assert exponential.normalization_m(0.0) == 1.0

    def test_exponential_closed_form(self, exponential):
        assert exponential.normalization_m(4.0) == pytest.approx(math.exp(-2.0), rel=1e-12)

    def test_sqrt_exponential_value(self, sqrt_exponential):
        # sum u^n/(2n+1)! = sinh(sqrt u)/sqrt u
        assert sqrt_exponential.normalization_m(1.0) == pytest.approx(
            0.9224522362915716, rel=1e-12
        )

    def test_series_agrees_with_closed_form(self, exponential, sqrt_exponential):
        for fam in (exponential, sqrt_exponential):
            for u in (0.3, 1.0, 4.0, 9.0):
                series = fam.normalization_m(u)
                assert series**2 == pytest.approx(float(fam.M_squared(u)), rel=1e-10)

    def test_self_consistency(self, exponential):
        # M^2 * sum = 1 by construction
        u = 2.7
        n = np.arange(65)
        total = float(np.sum(u**n / np.array([exponential.moment(int(k)) for k in n])))
        assert exponential.normalization_m(u, 64) ** 2 * total == pytest.approx(1.0, rel=1e-12)

    def test_unconverged_tail_raises(self, exponential):
        with pytest.raises(TruncationError):
            exponential.normalization_m(100.0, n_max=5)

    def test_negative_argument_rejected(self, exponential):
        with pytest.raises(ValueError):
            exponential.normalization_m(-1.0)


class TestKWeight:
    def test_exponential_is_flat(self, exponential):
        for u in (0.0, 0.5, 3.0, 20.0):
            assert float(exponential.k_weight(u)) == 1.0

    def test_sqrt_exponential_value(self, sqrt_exponential):
        expected = math.exp(-1.0) * math.sinh(1.0) / 2.0
        assert float(sqrt_exponential.k_weight(1.0)) == pytest.approx(expected, rel=1e-12)

    def test_nonnegative_on_grid(self, sqrt_exponential):
        u = np.geomspace(1e-3, 50, 64)
        assert np.all(sqrt_exponential.k_weight(u) >= 0)


class TestValidateFamily:
    def test_builtins_pass(self, exponential, sqrt_exponential):
        for fam in (exponential, sqrt_exponential):
            report = validate_family(fam, n_max=10, tol=1e-9)
            assert report.passed, report.failures()

    def test_corrupted_moment_detected(self):
        moments = [float(math.factorial(n)) for n in range(11)]
        moments[3] *= 1.01
        fam = WeightFamily(
            "corrupted",
            rho=lambda u: np.exp(-np.asarray(u, dtype=float)),
            m_squared_closed=lambda u: np.exp(-np.asarray(u, dtype=float)),
            k_closed=lambda u: np.ones_like(np.asarray(u, dtype=float)),
            declared_moments=moments,
            subst_power=1,
        )
        report = validate_family(fam, n_max=10, tol=1e-9)
        failed = report.failures()
        assert failed and failed[0].name == "moments"
        assert "n=3" in failed[0].detail

    def test_inconsistent_factorization_detected(self):
        fam = WeightFamily(
            "skewed",
            rho=lambda u: np.exp(-np.asarray(u, dtype=float)),
            moment_closed=lambda n: float(math.factorial(n)),
            log_moment_closed=lambda n: math.lgamma(n + 1),
            m_squared_closed=lambda u: np.exp(-1.5 * np.asarray(u, dtype=float)),
            k_closed=lambda u: np.ones_like(np.asarray(u, dtype=float)),
        )
        report = validate_family(fam, n_max=4, tol=1e-9)
        names = [c.name for c in report.failures()]
        assert "factorization" in names


class TestTabulatedFamily:
    def _exponential_table(self, n_max=6, moments=None):
        grid = np.linspace(0.0, 60.0, 600)
        return tabulated_family("tab-exp", grid, np.exp(-grid), n_max, moments=moments)

    def test_moments_close_to_factorials(self):
        fam = self._exponential_table()
        for n in range(7):
            assert fam.moment(n) == pytest.approx(math.factorial(n), rel=1e-5)

    def test_series_normalization_usable_at_small_u(self):
        fam = self._exponential_table()
        assert fam.normalization_m(0.01, n_max=6) == pytest.approx(math.exp(-0.005), rel=1e-4)

    def test_series_tail_guard_with_few_moments(self):
        # six moments cannot converge the series at u = 1
        fam = self._exponential_table()
        with pytest.raises(TruncationError):
            fam.normalization_m(1.0, n_max=6)

    def test_json_round_trip(self, tmp_path):
        grid = np.linspace(1e-4, 40.0, 300)
        payload = {
            "name": "custom",
            "grid_u": list(grid),
            "rho": list(np.exp(-grid)),
            "n_max": 4,
        }
        path = tmp_path / "family.json"
        path.write_text(json.dumps(payload))
        fam = family_from_file(path)
        assert fam.name == "custom"
        assert fam.moment(2) == pytest.approx(2.0, rel=1e-5)

    def test_missing_keys_rejected(self):
        with pytest.raises(ConfigurationError):
            family_from_dict({"name": "broken", "grid_u": [0, 1]})

    def test_bad_grid_rejected(self):
        with pytest.raises(ConfigurationError):
            tabulated_family("bad", [1.0, 0.5], [1.0, 1.0], 2)

    def test_declared_moment_length_enforced(self):
        with pytest.raises(ConfigurationError):
            self._exponential_table(n_max=3, moments=[1.0, 1.0])
