import math

import numpy as np
import pytest

from plapt import (
    DomainError,
    PlAptParams,
    Sample,
    fit_mle,
    fit_mle_profile,
    lindley_family,
    log_likelihood,
    model_compare,
    pdf,
    pl_apt_family,
    pseudo_lindley_family,
    sample,
    score,
)
from plapt.inference import FamilySpec


def _fd_score(alpha, theta, beta, data):
    h_t = 1e-6 * max(1.0, abs(theta))
    h_b = min(1e-6 * max(1.0, abs(beta)), 0.4 * (beta - 1.0))
    d_t = (
        log_likelihood(alpha, theta + h_t, beta, data)
        - log_likelihood(alpha, theta - h_t, beta, data)
    ) / (2.0 * h_t)
    d_b = (
        log_likelihood(alpha, theta, beta + h_b, data)
        - log_likelihood(alpha, theta, beta - h_b, data)
    ) / (2.0 * h_b)
    return d_t, d_b


class TestLogLikelihood:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_equals_sum_of_log_pdf(self, alpha):
        p = PlAptParams(alpha, 2.5, 0.6)
        data = sample(p, 100, seed=11)
        direct = float(np.sum(np.log(pdf(p, data.values))))
        got = log_likelihood(alpha, 0.6, 2.5, data)
        assert got == pytest.approx(direct, rel=1e-10)

    def test_alpha_below_one_at_origin(self):
        # density at 0 is theta * (log a/(a-1)) * (beta-1)/beta, real for 0<a<1
        got = log_likelihood(0.5, 1.0, 2.0, Sample([0.0]))
        expected = math.log((math.log(0.5) / (0.5 - 1.0)) * 1.0 * 0.5)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_parameter_validation(self):
        data = Sample([1.0, 2.0])
        for bad in (dict(alpha=-1.0), dict(theta=0.0), dict(beta=1.0)):
            kwargs = dict(alpha=2.0, theta=1.0, beta=2.0) | bad
            with pytest.raises(DomainError):
                log_likelihood(kwargs["alpha"], kwargs["theta"], kwargs["beta"], data)


class TestScore:
    def test_finite_difference_sweep(self):
        rng = np.random.default_rng(42)
        alphas = [0.3, 0.9, 1.0, 1.5, 4.0]
        for trial in range(40):
            alpha = alphas[trial % len(alphas)]
            theta = float(rng.uniform(0.1, 10.0))
            beta = float(rng.uniform(1.05, 10.0))
            data = sample(PlAptParams(max(alpha, 0.3), beta, theta), 50, seed=trial)
            got = score(alpha, theta, beta, data)
            fd = _fd_score(alpha, theta, beta, data)
            for g, f in zip(got, fd):
                assert abs(g - f) <= 1e-5 * max(1.0, abs(f))

    def test_alpha_one_reduction(self):
        data = sample(PlAptParams(1.0, 1.5, 3.0), 200, seed=5)
        theta, beta = 2.8, 1.6
        _, d_beta = score(1.0, theta, beta, data)
        direct = -data.n / beta + float(np.sum(1.0 / (beta - 1.0 + theta * data.values)))
        assert d_beta == pytest.approx(direct, rel=1e-14)

    def test_zero_at_fitted_maximum(self):
        data = sample(PlAptParams(2.0, 2.5, 0.6), 2000, seed=3)
        fit = fit_mle(2.0, data)
        assert fit.converged
        s = score(2.0, fit.params.theta, fit.params.beta, data)
        assert math.hypot(*s) <= 1e-8 * data.n


class TestFit:
    def test_recovers_truth_roughly(self):
        truth = PlAptParams(2.0, 2.5, 0.6)
        data = sample(truth, 10_000, seed=99)
        fit = fit_mle(2.0, data)
        assert fit.converged
        assert abs(fit.params.theta - truth.theta) <= 4.0 * fit.stderr_theta
        assert abs(fit.params.beta - truth.beta) <= 4.0 * fit.stderr_beta
        assert fit.covariance is not None
        assert np.all(np.linalg.eigvalsh(fit.covariance) >= -1e-12)

    def test_starts_at_stationary_point(self):
        data = sample(PlAptParams(1.0, 1.5, 3.0), 5000, seed=21)
        first = fit_mle(1.0, data)
        again = fit_mle(1.0, data, init=(first.params.theta, first.params.beta))
        assert again.converged
        assert again.iterations <= 2

    def test_restart_invariance(self):
        data = sample(PlAptParams(1.5, 1.8, 1.2), 3000, seed=8)
        rng = np.random.default_rng(0)
        fits = [fit_mle(1.5, data)]
        for _ in range(5):
            init = (float(rng.uniform(0.3, 4.0)), float(rng.uniform(1.2, 6.0)))
            fits.append(fit_mle(1.5, data, init=init))
        logliks = [f.loglik for f in fits if f.converged]
        assert len(logliks) >= 5
        assert max(logliks) - min(logliks) <= 1e-6
        thetas = [f.params.theta for f in fits if f.converged]
        assert (max(thetas) - min(thetas)) / max(thetas) <= 1e-4

    def test_scale_equivariance(self):
        data = sample(PlAptParams(2.0, 2.5, 0.6), 2000, seed=5)
        c = 3.0
        base = fit_mle(2.0, data)
        scaled = fit_mle(2.0, Sample(data.values * c))
        assert scaled.params.theta == pytest.approx(base.params.theta / c, rel=1e-6)
        assert scaled.params.beta == pytest.approx(base.params.beta, rel=1e-6)

    def test_non_convergence_is_reported_not_raised(self):
        data = sample(PlAptParams(2.0, 2.5, 0.6), 500, seed=1)
        fit = fit_mle(2.0, data, init=(5.0, 9.0), max_iter=1)
        assert not fit.converged
        assert fit.iterations == 1

    def test_too_small_sample_rejected(self):
        with pytest.raises(DomainError):
            fit_mle(2.0, Sample([1.0]))

    def test_profile_prefers_higher_likelihood(self):
        data = sample(PlAptParams(2.0, 2.5, 0.6), 3000, seed=17)
        best, fits = fit_mle_profile([0.5, 1.0, 2.0, 4.0], data)
        assert len(fits) == 4
        assert best.loglik == max(f.loglik for f in fits if f.converged)


class TestModelCompare:
    def test_nested_ordering(self):
        data = sample(PlAptParams(1.0, 2.0, 1.0), 1500, seed=2)
        rows = model_compare(
            data,
            [pseudo_lindley_family(), pl_apt_family(alpha_grid=[0.5, 1.0, 2.0])],
        )
        by_name = {r.name: r for r in rows}
        assert by_name["pl_apt"].loglik >= by_name["pseudo_lindley"].loglik - 1e-6

    def test_failed_candidate_flagged_others_intact(self):
        data = sample(PlAptParams(1.0, 2.0, 1.0), 500, seed=4)
        rows = model_compare(
            data, [lindley_family(), FamilySpec(name="broken", kind="not_a_kind")]
        )
        assert rows[0].error is None and math.isfinite(rows[0].aic)
        assert rows[1].error is not None and math.isnan(rows[1].aic)

    def test_aic_bic_definitions(self):
        data = sample(PlAptParams(1.0, 2.0, 1.0), 400, seed=6)
        row = model_compare(data, [pseudo_lindley_family()])[0]
        assert row.aic == pytest.approx(2 * row.n_free - 2 * row.loglik, rel=1e-15)
        assert row.bic == pytest.approx(
            row.n_free * math.log(data.n) - 2 * row.loglik, rel=1e-15
        )

    def test_lindley_parsimony_on_lindley_data(self):
        # data from the one-parameter sub-family: the parsimonious candidate
        # should win or nearly win AIC in at least 90% of replications
        theta = 1.0
        truth = PlAptParams(1.0, 1.0 + theta, theta)
        wins = 0
        reps = 200
        for rep in range(reps):
            data = sample(truth, 500, seed=10_000 + rep)
            rows = model_compare(
                data,
                [lindley_family(), pl_apt_family(alpha_grid=[0.5, 1.0, 2.0, 4.0])],
            )
            by_name = {r.name: r for r in rows}
            if by_name["lindley"].aic <= by_name["pl_apt"].aic + 2.0:
                wins += 1
        assert wins >= 0.9 * reps
