#include <cmath>
#include <numbers>

#include "doctest.h"

#include "ccp/evt.hpp"
#include "ccp/inference.hpp"
#include "ccp/rng.hpp"
#include "ccp/simulate.hpp"
#include "helpers.hpp"

using namespace ccp;

TEST_SUITE_BEGIN("inference");

TEST_CASE("cauchy scale MLE anchors") {
    CHECK(cauchy_scale_mle(std::vector<double>{-1.0, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cauchy_scale_mle(std::vector<double>{2.5, -2.5, 2.5}) ==
          doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(cauchy_scale_mle(std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cauchy_scale_mle(std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("MLE estimating-equation residual and consistency") {
    Rng rng(11);
    const double c0 = 0.7;
    std::vector<double> y(10000);
    for (auto& v : y) v = c0 * rng.cauchy();
    const double c = cauchy_scale_mle(y);
    double s = 0.0;
    for (double v : y) s += c * c / (c * c + v * v);
    CHECK(std::abs(s - 0.5 * y.size()) < 1e-8 * y.size());
    CHECK(std::abs(c / c0 - 1.0) < 0.05);
}

TEST_CASE("median scale estimator") {
    CHECK(cauchy_scale_median(std::vector<double>{-3.0, 0.5, 1.0, -2.0}) == 1.5);
    CHECK(cauchy_scale_median(std::vector<double>{-4.2}) == 4.2);
    CHECK_THROWS_AS(cauchy_scale_median(std::vector<double>{}),
                    std::invalid_argument);
}

TEST_CASE("median is less efficient than the MLE by roughly 20 percent") {
    Rng rng(21);
    std::vector<double> mle, med;
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> y(2000);
        for (auto& v : y) v = rng.cauchy();
        mle.push_back(cauchy_scale_mle(y));
        med.push_back(cauchy_scale_median(y));
    }
    const double ratio = testutil::variance(med) / testutil::variance(mle);
    CHECK(ratio > 1.1);
    CHECK(ratio < 1.4);
}

TEST_CASE("empirical tail dependence") {
    std::vector<double> uj, uk;
    for (int i = 1; i <= 10; ++i) {
        uj.push_back(i / 11.0);
        uk.push_back(i == 10 ? 0.95 : 1.0 - i / 11.0);  // one joint exceedance
    }
    CHECK(empirical_tail_dep(uj, uk, 0.8) == doctest::Approx(0.5));
    CHECK(empirical_tail_dep(uj, uj, 0.8) == doctest::Approx(1.0).epsilon(0.12));
    std::vector<double> anti(10);
    for (int i = 0; i < 10; ++i) anti[i] = 1.0 - uj[i];
    CHECK(empirical_tail_dep(uj, anti, 0.7) == 0.0);
    CHECK_THROWS_AS(empirical_tail_dep(uj, uk, 1.0), std::invalid_argument);
}

TEST_CASE("spearman correlation") {
    const std::vector<double> a{0.1, 0.4, 0.2, 0.9, 0.6};
    std::vector<double> rev(a.rbegin(), a.rend());
    CHECK(spearman(a, a) == doctest::Approx(1.0));
    std::vector<double> neg;
    for (double v : a) neg.push_back(-v);
    CHECK(spearman(a, neg) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(spearman(a, std::vector<double>{1, 1, 1, 1, 1}),
                    std::invalid_argument);

    Rng rng(31);
    std::vector<double> x(10000), y(10000);
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    CHECK(std::abs(spearman(x, y)) < 0.03);
}

TEST_CASE("mixture marginal: cdf/pdf/quantile") {
    const MixtureMarginal cauchy{1.0, 0.0};
    CHECK(mixture_cdf(cauchy, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mixture_cdf(cauchy, 1.0) == doctest::Approx(0.75).epsilon(1e-12));

    const MixtureMarginal m{0.8, 1.7};
    CHECK(mixture_cdf(m, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    for (double w : {0.3, 1.0, 4.0})
        CHECK(mixture_cdf(m, -w) == doctest::Approx(1.0 - mixture_cdf(m, w)).epsilon(1e-10));

    // strictly increasing, quantile inverts to 1e-8
    double prev = 0.0;
    for (double w = -5.0; w <= 5.0; w += 0.25) {
        const double F = mixture_cdf(m, w);
        CHECK(F > prev);
        prev = F;
        CHECK(mixture_quantile(m, F) == doctest::Approx(w).epsilon(1e-8));
    }
    CHECK_THROWS_AS(mixture_quantile(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mixture_quantile(m, 1.2), std::invalid_argument);

    // pdf is the derivative of the cdf
    for (double w : {-1.3, 0.2, 2.0}) {
        const double h = 1e-5;
        const double fd = (mixture_cdf(m, w + h) - mixture_cdf(m, w - h)) / (2 * h);
        CHECK(mixture_pdf(m, w) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("mixture beta MLE recovers the generating scale") {
    Rng rng(41);
    std::vector<double> y(8000);
    const double gamma = 1.0, beta = 1.5;
    for (auto& v : y) v = gamma * rng.cauchy() + beta * rng.normal();
    const double bhat = mixture_beta_mle(gamma, y);
    CHECK(bhat == doctest::Approx(beta).epsilon(0.15));
}

TEST_CASE("model summaries use the radial route for power-compact kernels") {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    for (double delta : {0.05, 0.2}) {
        CHECK(model_cjk(k, delta) ==
              doctest::Approx(cjk_power_compact(1.0, 0.25, delta)).epsilon(1e-10));
        CHECK(model_tail_dep(k, delta) ==
              doctest::Approx(1.0 - model_cjk(k, delta) / 2.0).epsilon(1e-10));
    }
    const Kernel e = Kernel::exponential(0.1);
    CHECK(model_tail_dep(e, 0.2) ==
          doctest::Approx(2.0 - stdf_numeric({e, {{0, 0}, {0.2, 0}}, {1, 1}}))
              .epsilon(1e-4));
}

TEST_CASE("log-parameterization round trip") {
    for (const Kernel& k : {Kernel::power_compact(0.3, 1.7),
                            Kernel::exponential(0.08),
                            Kernel::powered_exponential(0.2, 1.4)}) {
        const Kernel back = kernel_from_log_params(k.family(), log_params_of(k));
        REQUIRE(back.params().size() == k.params().size());
        for (size_t i = 0; i < k.params().size(); ++i)
            CHECK(back.params()[i] == doctest::Approx(k.params()[i]).epsilon(1e-12));
    }
}

TEST_CASE("noiseless fixed points of the matching fitters") {
    const Kernel truth = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(3);
    const Weights w;
    OptimizerConfig cfg;
    cfg.seed = 3;
    cfg.n_starts = 3;
    cfg.max_iter = 600;

    std::vector<double> c_targets, l_targets;
    for (size_t j = 0; j < sites.size(); ++j)
        for (size_t k = j + 1; k < sites.size(); ++k) {
            const double delta = distance(sites[j], sites[k]);
            c_targets.push_back(model_cjk(truth, delta));
            l_targets.push_back(model_tail_dep(truth, delta));
        }

    const FitResult fc = fit_kernel_to_summaries(
        sites, MatchStatistic::CauchyScale, c_targets, truth.family(), w, cfg);
    CHECK(fc.objective < 1e-12);
    CHECK(fc.theta_K[0] == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(fc.theta_K[1] == doctest::Approx(1.0).epsilon(1e-2));

    const FitResult fl = fit_kernel_to_summaries(
        sites, MatchStatistic::TailDep, l_targets, truth.family(), w, cfg);
    CHECK(fl.objective < 1e-12);
    CHECK(fl.theta_K[0] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("noiseless fixed point of the mixture Gaussian step") {
    const GaussianModel truth{1.3, 1.0, 0.0};
    const double beta0 = 2.0;
    std::vector<double> deltas{0.1, 0.25, 0.4, 0.7}, bp, bm, wts;
    for (double d : deltas) {
        const double rho = truth.correlation(d);
        bp.push_back(beta0 * std::sqrt(2.0 + 2.0 * rho));
        bm.push_back(beta0 * std::sqrt(2.0 - 2.0 * rho));
        wts.push_back(1.0);
    }
    OptimizerConfig cfg;
    cfg.seed = 5;
    cfg.max_iter = 600;
    const auto [g, obj] = fit_mixture_gaussian(beta0, deltas, bp, bm, wts, {}, cfg);
    CHECK(obj < 1e-12);
    CHECK(g.rate == doctest::Approx(truth.rate).epsilon(1e-3));
    // beta_plus/minus algebra: rho = 1 and beta0 = 2 gives (4, 0)
    CHECK(beta0 * std::sqrt(2.0 + 2.0 * 1.0) == doctest::Approx(4.0));
    CHECK(beta0 * std::sqrt(2.0 - 2.0 * 1.0) == doctest::Approx(0.0));
}

TEST_CASE("fitters validate their inputs") {
    ReplicateMatrix tiny;
    tiny.n = 5;
    tiny.d = 2;
    tiny.sites = {{0, 0}, {0.2, 0}};
    tiny.values.assign(10, 0.5);
    const OptimizerConfig cfg;
    CHECK_THROWS_AS(
        fit_kernel_by_scales(tiny, KernelFamily::PowerCompact, {}, cfg),
        std::invalid_argument);

    Weights zero;
    zero.scheme = Weights::Scheme::DistanceCutoff;
    zero.delta_max = 0.0;  // kills every pair
    const SiteSet sites = lattice_sites(3);
    CHECK_THROWS_AS(fit_kernel_to_summaries(sites, MatchStatistic::CauchyScale,
                                            std::vector<double>(36, 0.1),
                                            KernelFamily::PowerCompact, zero, cfg),
                    std::invalid_argument);
}

TEST_CASE("simulate-then-fit round trip recovers the kernel") {
    const Kernel truth = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(3);
    const SimGrid grid = SimGrid::default_for(sites, truth, 150);
    const auto z = simulate_cauchy(truth, sites, grid, 500, 77);
    OptimizerConfig cfg;
    cfg.seed = 7;
    cfg.n_starts = 3;
    const FitResult fit =
        fit_kernel_by_scales(to_uniform(z), truth.family(), {}, cfg);
    CHECK(fit.theta_K[0] == doctest::Approx(0.25).epsilon(0.4));
    CHECK(fit.theta_K[1] == doctest::Approx(1.0).epsilon(0.9));
}

TEST_CASE("pair summaries") {
    const Kernel truth = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(2);
    const SimGrid grid = SimGrid::default_for(sites, truth, 100);
    const auto u = to_uniform(simulate_cauchy(truth, sites, grid, 200, 13));
    const auto summaries = compute_pair_summaries(u, 0.9);
    CHECK(summaries.size() == 6);
    for (const auto& s : summaries) {
        CHECK(s.j < s.k);
        CHECK(s.delta > 0.0);
        CHECK(s.c_hat > 0.0);
        CHECK(s.rho_hat >= -1.0);
        CHECK(s.rho_hat <= 1.0);
        CHECK(s.lambda_hat >= 0.0);
    }
}

TEST_CASE("fit result serializes to json") {
    FitResult r;
    r.family = KernelFamily::PowerCompact;
    r.theta_K = {0.25, 1.0};
    r.theta_G = GaussianModel{1.5, 1.0, 0.1};
    r.beta = 2.0;
    r.objective = 0.5;
    r.n_pairs_used = 36;
    r.seed = 9;
    const nlohmann::json j = r;
    CHECK(j.at("family") == "power_compact");
    CHECK(j.at("theta_K").size() == 2);
    CHECK(j.at("theta_G").at("rate") == 1.5);
    CHECK(j.at("beta") == 2.0);
    CHECK(j.at("seed") == 9);
}

TEST_SUITE_END();
