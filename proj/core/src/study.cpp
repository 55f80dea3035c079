#include "ccp/study.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ccp/evt.hpp"
#include "ccp/rng.hpp"

namespace ccp {

namespace {

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 0) jobs = int(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

/// Trapezoid-rule integral of |g_hat - g_0| over x in (0,1), 512 points.
double profile_discrepancy(const Kernel& fitted, const Kernel& truth) {
    constexpr int kPoints = 512;
    double sum = 0.0;
    const double h = 1.0 / (kPoints - 1);
    for (int i = 0; i < kPoints; ++i) {
        const double x = i * h;
        const double diff = std::abs(fitted.radial(x) - truth.radial(x));
        sum += (i == 0 || i == kPoints - 1) ? 0.5 * diff : diff;
    }
    return sum * h;
}

struct RepetitionOutcome {
    std::vector<double> estimates;
    double discrepancy = 0.0;
};

}  // namespace

std::string process_name(ProcessType p) {
    switch (p) {
        case ProcessType::Cauchy: return "cauchy";
        case ProcessType::Mixture: return "mixture";
        case ProcessType::Ev: return "ev";
    }
    throw std::logic_error("unreachable");
}

ProcessType process_from_name(const std::string& name) {
    if (name == "cauchy") return ProcessType::Cauchy;
    if (name == "mixture") return ProcessType::Mixture;
    if (name == "ev") return ProcessType::Ev;
    throw std::invalid_argument("unknown process '" + name + "'");
}

std::vector<std::string> kernel_param_names(KernelFamily family) {
    switch (family) {
        case KernelFamily::Indicator: return {"r"};
        case KernelFamily::PowerCompact: return {"r", "eta"};
        case KernelFamily::Exponential: return {"lambda"};
        case KernelFamily::PoweredExponential: return {"lambda", "alpha"};
        case KernelFamily::GaussianDensity: return {"sigma"};
    }
    throw std::logic_error("unreachable");
}

StudyReport run_study(const StudyConfig& cfg) {
    if (cfg.repetitions < 1) throw std::invalid_argument("run_study: N >= 1");
    if (cfg.lattice_m < 2) throw std::invalid_argument("run_study: lattice m >= 2");
    const auto t0 = std::chrono::steady_clock::now();

    const SiteSet sites = lattice_sites(cfg.lattice_m);
    const SimGrid grid = SimGrid::default_for(sites, cfg.kernel, cfg.grid_m);
    const KernelFamily family = cfg.kernel.family();

    StudyReport report;
    report.param_names = kernel_param_names(family);
    report.truth = cfg.kernel.params();
    if (cfg.process == ProcessType::Mixture) {
        report.param_names.push_back("rate");
        report.param_names.push_back("beta");
        report.truth.push_back(cfg.gaussian.rate);
        report.truth.push_back(cfg.beta);
    }

    auto one_repetition = [&](int rep) -> RepetitionOutcome {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, std::uint64_t(rep) + 1);
        OptimizerConfig opt = cfg.optimizer;
        opt.seed = rep_seed;

        RepetitionOutcome out;
        const Weights weights;  // equal
        switch (cfg.process) {
            case ProcessType::Cauchy: {
                const ReplicateMatrix z = simulate_cauchy(cfg.kernel, sites, grid,
                                                          cfg.n, rep_seed);
                const FitResult fit =
                    fit_kernel_by_scales(to_uniform(z), family, weights, opt);
                out.estimates = fit.theta_K;
                out.discrepancy = profile_discrepancy(
                    Kernel::make(family, fit.theta_K), cfg.kernel);
                break;
            }
            case ProcessType::Mixture: {
                const MixtureModel truth{cfg.kernel, cfg.gaussian, cfg.beta};
                const ReplicateMatrix z = simulate_mixture(truth, sites, grid,
                                                           cfg.n, rep_seed);
                const ReplicateMatrix u = to_uniform(z);
                const FitResult kfit = fit_kernel_by_taildep(
                    u, family, cfg.threshold_u, weights, opt);
                const Kernel fitted_kernel = Kernel::make(family, kfit.theta_K);
                const FitResult mfit =
                    fit_mixture(u, fitted_kernel, cfg.mixture, weights, opt);
                out.estimates = mfit.theta_K;
                out.estimates.push_back(mfit.theta_G->rate);
                out.estimates.push_back(*mfit.beta);
                out.discrepancy = profile_discrepancy(fitted_kernel, cfg.kernel);
                break;
            }
            case ProcessType::Ev: {
                const ReplicateMatrix z = simulate_ev(cfg.kernel, sites, cfg.n,
                                                      rep_seed);
                const ReplicateMatrix u = to_uniform(z);
                // cheap tail-dependence prefit warm-starts the likelihood search
                const FitResult prefit = fit_kernel_by_taildep(
                    u, family, cfg.threshold_u, weights, opt);
                OptimizerConfig warm = opt;
                warm.warm_start = log_params_of(Kernel::make(family, prefit.theta_K));
                warm.n_starts = 1;
                warm.max_iter = std::min(warm.max_iter, 150);
                const FitResult fit = fit_ev_pairwise(u, family, weights, warm);
                out.estimates = fit.theta_K;
                out.discrepancy = profile_discrepancy(
                    Kernel::make(family, fit.theta_K), cfg.kernel);
                break;
            }
        }
        return out;
    };

    std::vector<std::optional<RepetitionOutcome>> results(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.jobs, [&](int rep) {
        try {
            results[rep] = one_repetition(rep);
        } catch (const std::exception& e) {
            std::cerr << "warning: repetition " << rep << " failed: " << e.what()
                      << "\n";
        }
    });

    const size_t n_params = report.truth.size();
    std::vector<double> sq(n_params, 0.0);
    double dmax = 0.0, dsum = 0.0;
    int successes = 0;
    for (const auto& r : results) {
        if (!r) {
            ++report.n_failures;
            continue;
        }
        report.estimates.push_back(r->estimates);
        for (size_t p = 0; p < n_params; ++p) {
            const double e = r->estimates[p] - report.truth[p];
            sq[p] += e * e;
        }
        dmax = std::max(dmax, r->discrepancy);
        dsum += r->discrepancy;
        ++successes;
    }
    if (successes == 0) throw std::runtime_error("run_study: every repetition failed");
    report.rmse.resize(n_params);
    for (size_t p = 0; p < n_params; ++p)
        report.rmse[p] = std::sqrt(sq[p] / successes);
    report.delta_max = dmax;
    report.delta_avg = dsum / successes;

    report.config_echo = {
        {"process", process_name(cfg.process)},
        {"kernel", cfg.kernel},
        {"lattice_m", cfg.lattice_m},
        {"d", cfg.lattice_m * cfg.lattice_m},
        {"n", cfg.n},
        {"repetitions", cfg.repetitions},
        {"seed", cfg.seed},
        {"threshold_u", cfg.threshold_u},
        {"grid_m", cfg.grid_m},
    };
    if (cfg.process == ProcessType::Mixture) {
        report.config_echo["gaussian"] = {{"rate", cfg.gaussian.rate},
                                          {"alpha", cfg.gaussian.alpha},
                                          {"tau", cfg.gaussian.tau}};
        report.config_echo["beta"] = cfg.beta;
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void to_json(nlohmann::json& j, const StudyReport& r) {
    j = nlohmann::json{
        {"param_names", r.param_names},
        {"truth", r.truth},
        {"rmse", r.rmse},
        {"delta_max", r.delta_max},
        {"delta_avg", r.delta_avg},
        {"n_failures", r.n_failures},
        {"wall_seconds", r.wall_seconds},
        {"estimates", r.estimates},
        {"config", r.config_echo},
    };
}

std::vector<CurvePoint> dependence_curves(const MixtureModel& model,
                                          const std::vector<double>& deltas,
                                          int mc_replicates, std::uint64_t seed,
                                          double threshold_u, int grid_m) {
    if (mc_replicates < 2)
        throw std::invalid_argument("dependence_curves: need >= 2 MC replicates");
    std::vector<CurvePoint> out;
    for (size_t i = 0; i < deltas.size(); ++i) {
        const double delta = deltas[i];
        const double lambda_model = model_tail_dep(model.kernel, delta);
        if (delta == 0.0) {
            out.push_back({delta, "spearman", 1.0, "empirical"});
            out.push_back({delta, "tail_dep", 1.0, "empirical"});
        } else {
            const SiteSet pair_sites{{0.0, 0.0}, {delta, 0.0}};
            const SimGrid grid = SimGrid::default_for(pair_sites, model.kernel, grid_m);
            const std::uint64_t s = derive_seed(seed, i + 1);
            const ReplicateMatrix z =
                model.beta > 0.0
                    ? simulate_mixture(model, pair_sites, grid, mc_replicates, s)
                    : simulate_cauchy(model.kernel, pair_sites, grid, mc_replicates, s);
            const ReplicateMatrix u = to_uniform(z);
            const auto c0 = u.column(0), c1 = u.column(1);
            out.push_back({delta, "spearman", spearman(c0, c1), "empirical"});
            out.push_back(
                {delta, "tail_dep", empirical_tail_dep(c0, c1, threshold_u),
                 "empirical"});
        }
        out.push_back({delta, "tail_dep", lambda_model, "model"});
    }
    return out;
}

}  // namespace ccp
