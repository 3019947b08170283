import numpy as np
import pytest

from bpmap.errors import (
    AlignmentError,
    CollinearityError,
    DegenerateControlError,
    DegenerateSeriesError,
)
from bpmap.stats import partial_corr, pearson, skill


def two_pass_pearson(a, b):
    """Textbook oracle: center, then normalized cross product."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    da, db = a - a.mean(), b - b.mean()
    return float(np.sum(da * db) / np.sqrt(np.sum(da * da) * np.sum(db * db)))


def residual_regression_pcorr(a, b, c):
    """Oracle: regress a and b on [1, c] by least squares, correlate residuals."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    C = np.asarray(c, float)
    if C.ndim == 1:
        C = C[:, None]
    design = np.column_stack([np.ones(len(a)), C])
    ra = a - design @ np.linalg.lstsq(design, a, rcond=None)[0]
    rb = b - design @ np.linalg.lstsq(design, b, rcond=None)[0]
    return two_pass_pearson(ra, rb)


class TestPearson:
    def test_exact_positive(self):
        assert pearson([1, 2, 3], [2, 4, 6]).value == pytest.approx(1.0, abs=1e-15)

    def test_exact_negative(self):
        assert pearson([1, 2, 3], [3, 2, 1]).value == pytest.approx(-1.0, abs=1e-15)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a = rng.standard_normal(100)
            b = rng.standard_normal(100) + 0.3 * a
            got = pearson(a, b).value
            assert got == pytest.approx(two_pass_pearson(a, b), abs=1e-12)
            assert abs(got) <= 1.0 + 1e-12

    def test_constant_input(self):
        with pytest.raises(DegenerateSeriesError):
            pearson([1.0, 1.0, 1.0], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(AlignmentError):
            pearson([1, 2], [1, 2, 3])

    def test_reports_n(self):
        assert pearson([1, 2, 4], [0, 1, 5]).n == 3


class TestPartialCorr:
    def test_independent_control_reduces_to_pearson(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal(200)
        b = rng.standard_normal(200) + 0.5 * a
        c = rng.standard_normal(200)
        # orthogonalize c against 1, a, b so r_ac = r_bc = 0 numerically
        design = np.column_stack([np.ones(200), a, b])
        c = c - design @ np.linalg.lstsq(design, c, rcond=None)[0]
        assert partial_corr(a, b, c).value == pytest.approx(
            pearson(a, b).value, abs=1e-12
        )

    def test_control_equal_to_argument_is_collinear(self):
        a = np.random.default_rng(2).standard_normal(50)
        b = np.random.default_rng(3).standard_normal(50)
        with pytest.raises(CollinearityError):
            partial_corr(a, b, a)

    def test_matches_residual_regression_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            n = 200
            c = rng.standard_normal(n)
            a = rng.standard_normal(n) + rng.uniform(-2, 2) * c
            b = rng.standard_normal(n) + rng.uniform(-2, 2) * c + 0.4 * a
            got = partial_corr(a, b, c).value
            assert got == pytest.approx(residual_regression_pcorr(a, b, c),
                                        abs=1e-10)

    def test_symmetric_in_first_two_arguments(self):
        rng = np.random.default_rng(5)
        a, b, c = rng.standard_normal((3, 80))
        assert partial_corr(a, b, c).value == partial_corr(b, a, c).value

    def test_affine_invariance(self):
        rng = np.random.default_rng(6)
        a, b, c = rng.standard_normal((3, 120))
        base = partial_corr(a, b, c).value
        assert partial_corr(3.0 * a + 1.0, b, c).value == pytest.approx(
            base, abs=1e-12
        )
        assert partial_corr(a, 0.5 * b - 7.0, c).value == pytest.approx(
            base, abs=1e-12
        )
        assert partial_corr(a, b, 10.0 * c + 2.0).value == pytest.approx(
            base, abs=1e-12
        )

    def test_bounded(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a, b, c = rng.standard_normal((3, 30))
            assert abs(partial_corr(a, b, c).value) <= 1.0 + 1e-12

    def test_constant_control(self):
        rng = np.random.default_rng(8)
        a, b = rng.standard_normal((2, 20))
        with pytest.raises(DegenerateControlError, match="control"):
            partial_corr(a, b, np.full(20, 0.25))

    def test_too_short(self):
        with pytest.raises(AlignmentError):
            partial_corr([1, 2], [2, 1], [1, 1])


class TestPartialCorrMultiControl:
    def test_matches_multivariate_residual_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n = 150
            C = rng.standard_normal((n, 3))
            a = rng.standard_normal(n) + C @ rng.uniform(-1, 1, 3)
            b = rng.standard_normal(n) + C @ rng.uniform(-1, 1, 3) + 0.3 * a
            got = partial_corr(a, b, C).value
            assert got == pytest.approx(residual_regression_pcorr(a, b, C),
                                        abs=1e-10)

    def test_duplicate_columns_equal_single_control(self):
        rng = np.random.default_rng(10)
        c = rng.standard_normal(100)
        a = rng.standard_normal(100) + c
        b = rng.standard_normal(100) - 0.5 * c
        single = partial_corr(a, b, c).value
        dup = partial_corr(a, b, np.column_stack([c, c, c])).value
        assert dup == pytest.approx(single, abs=1e-12)

    def test_constant_column_rejected(self):
        rng = np.random.default_rng(11)
        a, b, c = rng.standard_normal((3, 40))
        C = np.column_stack([c, np.zeros(40)])
        with pytest.raises(DegenerateControlError):
            partial_corr(a, b, C)

    def test_periodic_phase_fully_removed_by_lag_controls(self):
        # a 4-phase drive observed through 3 consecutive wrapped values spans
        # every function of the phase, so phase-determined structure vanishes
        rng = np.random.default_rng(12)
        n = 400
        th = np.arange(n) * 0.75 % 1.0
        C = np.column_stack([th, np.roll(th, 1), np.roll(th, 2)])
        phase_effect = np.select(
            [th == 0.0, th == 0.25, th == 0.5], [1.3, -0.7, 0.4], default=-2.0
        )
        noise_a = rng.standard_normal(n)
        noise_b = rng.standard_normal(n)
        a = phase_effect + 0.05 * noise_a
        b = phase_effect + 0.05 * noise_b
        assert abs(pearson(a, b).value) > 0.99
        assert abs(partial_corr(a, b, C).value) < 0.2


class TestSkill:
    def test_pearson_when_no_control(self):
        a = np.array([0.1, 0.5, 0.9, 0.2])
        assert skill(a, a).value == pytest.approx(1.0, abs=1e-15)

    def test_control_component_removed(self):
        rng = np.random.default_rng(13)
        n = 300
        x = rng.standard_normal(n)
        c = rng.standard_normal(n)
        actual = x + 2.0 * c
        estimate = x + 2.0 * c
        got = skill(estimate, actual, c).value
        assert got == pytest.approx(
            residual_regression_pcorr(estimate, actual, c), abs=1e-9
        )
        assert got == pytest.approx(1.0, abs=1e-9)

    def test_constant_control_errors(self):
        rng = np.random.default_rng(14)
        a = rng.standard_normal(30)
        b = rng.standard_normal(30)
        with pytest.raises(DegenerateControlError):
            skill(a, b, np.full(30, 3.3))
