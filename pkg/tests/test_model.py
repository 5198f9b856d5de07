import math

import numpy as np
import pytest

from swnehari.model import (
    ModelParams,
    PotentialSpec,
    critical_exponents,
    eval_potential,
    integrability_indices,
    sample_potential,
    sobolev_exponent,
    validate_hypotheses,
)

from conftest import P0


def params(**kw) -> ModelParams:
    base = dict(dim_n=3, alpha=0.25, mu=1.0, p=2.5, q=1.5, lam=0.5,
                v0=1.0, v_inf=1.0, gamma1=2.0, gamma2=2.0, beta=10.0)
    base.update(kw)
    return ModelParams(**base)


class TestCriticalExponents:
    def test_reference_point(self):
        lo, hi = critical_exponents(params())
        assert lo == pytest.approx(1.5, abs=1e-15)
        assert hi == pytest.approx(4.5, abs=1e-15)

    def test_classical_limit(self):
        lo, hi = critical_exponents(params(alpha=0.0, mu=0.0))
        assert (lo, hi) == (2.0, 6.0)

    def test_dim_four(self):
        lo, hi = critical_exponents(params(dim_n=4, alpha=0.5, mu=1.0))
        assert lo == pytest.approx(1.5)
        assert hi == pytest.approx(3.0)

    def test_rejects_low_dimension(self):
        with pytest.raises(ValueError):
            critical_exponents(params(dim_n=2))

    def test_ordering_under_h1(self):
        # for N in {3, 4}, 0 < 2*alpha + mu < N forces lo < 2 < hi
        # (the upper exponent exceeds 2 iff 2*alpha + mu < 4)
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(3, 5))
            s = rng.uniform(1e-3, n - 1e-3)  # 2*alpha + mu
            alpha = rng.uniform(0, s / 2)
            lo, hi = critical_exponents(params(dim_n=n, alpha=alpha, mu=s - 2 * alpha))
            assert 0 < lo < 2 < hi

    def test_upper_exponent_below_two_in_high_dimension(self):
        # counterexample to lo < 2 < hi in general: N = 6, 2*alpha + mu = 5
        _, hi = critical_exponents(params(dim_n=6, alpha=1.0, mu=3.0))
        assert hi == pytest.approx(1.75)


class TestIntegrabilityIndices:
    def test_reference_point(self):
        r, sigma = integrability_indices(params())
        assert r == pytest.approx(4.0 / 3.0, rel=1e-15)
        assert sigma == pytest.approx(3.0, rel=1e-15)

    def test_small_q_limit(self):
        r, _ = integrability_indices(params(q=1e-12))
        assert r == pytest.approx(1.0, abs=1e-10)

    def test_sigma_blows_up_at_upper_exponent(self):
        _, hi = critical_exponents(params())
        _, sigma = integrability_indices(params(p=hi - 1e-10))
        assert sigma > 1e8
        with pytest.raises(ValueError):
            integrability_indices(params(p=hi))


class TestValidateHypotheses:
    def test_reference_point_passes(self):
        report = validate_hypotheses(P0)
        assert report.passed, report.failures()
        h3 = next(c for c in report.checks if c.name == "H3")
        assert h3.detail["gamma1_threshold"] == pytest.approx(1.125, abs=1e-12)

    def test_q_two_fails_h2(self):
        report = validate_hypotheses(params(q=2.0))
        assert "H2" in report.failures()

    def test_p_below_lower_exponent_fails_h2(self):
        report = validate_hypotheses(params(p=1.4))
        assert "H2" in report.failures()

    def test_large_beta_fails_h4_p_floor(self):
        # the regularity floor p > 2(N-2a-mu)/(N-2) - 2*/beta tightens with
        # beta; at the reference point it reads p > 2.8 for beta = 30
        report = validate_hypotheses(params(beta=30.0))
        assert report.failures() == ["H4"]
        h4 = next(c for c in report.checks if c.name == "H4")
        assert h4.detail["p_floor"] == pytest.approx(2.8, abs=1e-12)

    def test_alpha_zero_fails_h1(self):
        report = validate_hypotheses(params(alpha=0.0))
        assert "H1" in report.failures()

    @pytest.mark.parametrize("key", ["gamma1", "gamma2"])
    def test_monotone_in_decay_rates(self, key):
        # enlarging a decay rate never turns a pass into a fail
        grid = [0.3, 0.6, 0.9, 1.2, 2.0, 4.0, 8.0]
        for other in (0.4, 1.0, 3.0):
            passed = [
                validate_hypotheses(params(**{key: g, ("gamma2" if key == "gamma1" else "gamma1"): other})).passed
                for g in grid
            ]
            # once true, stays true
            seen = False
            for ok in passed:
                if seen:
                    assert ok
                seen = seen or ok

    def test_report_serializes(self):
        doc = validate_hypotheses(P0).to_dict()
        assert doc["passed"] is True
        assert {c["name"] for c in doc["checks"]} == {"H1", "H2", "H3", "H4"}
        validate_hypotheses(P0).to_json()


class TestPotentials:
    def test_decay_at_origin(self):
        spec = PotentialSpec("inverse-quadratic-decay", 1.0, 2.0)
        assert eval_potential(spec, [0.0, 0.0, 0.0]) == 1.0

    def test_decay_at_unit_radius(self):
        spec = PotentialSpec("inverse-quadratic-decay", 1.0, 2.0)
        assert eval_potential(spec, [1.0, 0.0, 0.0]) == pytest.approx(0.25, rel=1e-15)

    def test_constant_everywhere(self):
        spec = PotentialSpec("constant", 0.7)
        for x in ([0.0], [1.0, 2.0], [3.0, -4.0, 1.0]):
            assert eval_potential(spec, x) == 0.7

    def test_radially_nonincreasing(self):
        spec = PotentialSpec("inverse-quadratic-decay", 2.0, 1.3)
        radii = np.linspace(0, 10, 100)
        vals = [eval_potential(spec, [r]) for r in radii]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(v > 0 for v in vals)

    def test_sample_matches_pointwise(self):
        spec = PotentialSpec("inverse-quadratic-decay", 1.0, 2.0)
        r2 = np.array([0.0, 1.0, 4.0])
        np.testing.assert_allclose(
            sample_potential(spec, r2),
            [eval_potential(spec, [math.sqrt(v)]) for v in r2],
            rtol=1e-15,
        )

    def test_rejects_bad_spec(self):
        with pytest.raises(ValueError):
            PotentialSpec("constant", 0.0)
        with pytest.raises(ValueError):
            PotentialSpec("inverse-quadratic-decay", 1.0, -1.0)
        with pytest.raises(ValueError):
            PotentialSpec("gaussian", 1.0)


def test_sobolev_exponent():
    assert sobolev_exponent(3) == 6.0
    assert sobolev_exponent(4) == 4.0
    with pytest.raises(ValueError):
        sobolev_exponent(2)
