#include "ccp/inference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ccp/evt.hpp"
#include "ccp/optimize.hpp"
#include "ccp/quadrature.hpp"
#include "ccp/rng.hpp"

namespace ccp {

namespace {

constexpr double kPi = std::numbers::pi;

double estimating_equation(double c, std::span<const double> y) {
    double s = 0.0;
    const double c2 = c * c;
    for (double v : y) s += c2 / (c2 + v * v);
    return s - 0.5 * double(y.size());
}

// 64-node Gauss-Hermite table against the standard normal weight:
// int h(z) phi(z) dz ~= sum_i w[i] h(z[i]).
class GaussHermite {
  public:
    static const GaussHermite& instance() {
        static GaussHermite gh(64);
        return gh;
    }
    const std::vector<double>& nodes() const { return z_; }
    const std::vector<double>& weights() const { return w_; }

  private:
    explicit GaussHermite(int n) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const double b = std::sqrt(i / 2.0);
            J(i, i - 1) = b;
            J(i - 1, i) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        z_.resize(n);
        w_.resize(n);
        for (int i = 0; i < n; ++i) {
            z_[i] = std::numbers::sqrt2 * es.eigenvalues()(i);
            w_[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        }
        // enforce exact +- symmetry so F(-w) = 1 - F(w) holds to rounding
        for (int i = 0; i < n / 2; ++i) {
            const int j = n - 1 - i;
            const double zz = 0.5 * (z_[j] - z_[i]);
            const double ww = 0.5 * (w_[i] + w_[j]);
            z_[i] = -zz; z_[j] = zz;
            w_[i] = ww; w_[j] = ww;
        }
    }
    std::vector<double> z_, w_;
};

std::vector<double> cauchy_scores(const ReplicateMatrix& u, int col) {
    std::vector<double> z(u.n);
    for (int i = 0; i < u.n; ++i) z[i] = std::tan(kPi * (u.at(i, col) - 0.5));
    return z;
}

struct PairInfo {
    int j, k;
    double delta;
    double weight;
};

std::vector<PairInfo> make_pairs(const SiteSet& sites, const Weights& w) {
    const int d = static_cast<int>(sites.size());
    std::vector<PairInfo> pairs;
    double total = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            const double delta = distance(sites[j], sites[k]);
            const double wt = w.of(delta);
            pairs.push_back({j, k, delta, wt});
            total += wt;
        }
    if (pairs.empty()) throw std::invalid_argument("fit: need at least one site pair");
    if (total <= 0.0) throw std::invalid_argument("fit: all pair weights are zero");
    return pairs;
}

// Multi-start wrapper: one heuristic center plus seeded jitters in the log box.
SimplexResult multi_start(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> center,
                          const OptimizerConfig& cfg) {
    if (!cfg.warm_start.empty()) center = cfg.warm_start;
    Rng rng(derive_seed(cfg.seed, 0xF17));
    SimplexOptions so;
    so.max_iter = cfg.max_iter;
    SimplexResult best;
    const int starts = std::max(1, cfg.n_starts);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x0 = center;
        if (s > 0)
            for (auto& v : x0)
                v = std::clamp(v + rng.uniform(-1.5, 1.5), cfg.log_lo, cfg.log_hi);
        SimplexResult r = nelder_mead(f, x0, so);
        if (r.fval < best.fval) best = r;
    }
    return best;
}

double logit_to_alpha(double p) { return 2.0 / (1.0 + std::exp(-p)); }
double alpha_to_logit(double a) { return -std::log(2.0 / a - 1.0); }

}  // namespace

double cauchy_scale_mle(std::span<const double> samples) {
    const size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("cauchy_scale_mle: need n >= 2");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    size_t zeros = 0;
    for (double v : samples) {
        const double a = std::abs(v);
        if (a == 0.0) { ++zeros; continue; }
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi == 0.0)
        throw std::invalid_argument("cauchy_scale_mle: degenerate all-zero sample");
    if (2 * zeros >= n)
        throw std::invalid_argument("cauchy_scale_mle: degenerate sample (scale -> 0)");
    if (lo == hi && zeros == 0) return lo;  // equation satisfied exactly
    if (estimating_equation(lo, samples) > 0.0) lo = 0.0;
    // bisection; the equation is strictly increasing in c
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (estimating_equation(mid, samples) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double cauchy_scale_median(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("cauchy_scale_median: empty sample");
    std::vector<double> a(samples.begin(), samples.end());
    for (auto& v : a) v = std::abs(v);
    std::sort(a.begin(), a.end());
    const size_t n = a.size();
    return n % 2 == 1 ? a[n / 2] : 0.5 * (a[n / 2 - 1] + a[n / 2]);
}

double empirical_tail_dep(std::span<const double> u_col_j,
                          std::span<const double> u_col_k, double u) {
    if (u_col_j.size() != u_col_k.size() || u_col_j.empty())
        throw std::invalid_argument("empirical_tail_dep: column size mismatch");
    if (!(u > 0 && u < 1))
        throw std::invalid_argument("empirical_tail_dep: threshold in (0,1)");
    const size_t n = u_col_j.size();
    size_t count = 0;
    for (size_t i = 0; i < n; ++i)
        if (u_col_j[i] > u && u_col_k[i] > u) ++count;
    return double(count) / (double(n) * (1.0 - u));
}

double spearman(std::span<const double> col_j, std::span<const double> col_k) {
    if (col_j.size() != col_k.size() || col_j.size() < 3)
        throw std::invalid_argument("spearman: need equal columns with n >= 3");
    const std::vector<double> rj = midranks({col_j.begin(), col_j.end()});
    const std::vector<double> rk = midranks({col_k.begin(), col_k.end()});
    const size_t n = rj.size();
    double mj = 0, mk = 0;
    for (size_t i = 0; i < n; ++i) { mj += rj[i]; mk += rk[i]; }
    mj /= double(n); mk /= double(n);
    double sjk = 0, sj = 0, sk = 0;
    for (size_t i = 0; i < n; ++i) {
        sjk += (rj[i] - mj) * (rk[i] - mk);
        sj += (rj[i] - mj) * (rj[i] - mj);
        sk += (rk[i] - mk) * (rk[i] - mk);
    }
    if (sj == 0.0 || sk == 0.0)
        throw std::invalid_argument("spearman: zero-variance column");
    return sjk / std::sqrt(sj * sk);
}

double mixture_cdf(const MixtureMarginal& m, double w) {
    if (!(m.gamma > 0)) throw std::invalid_argument("mixture_cdf: gamma > 0");
    if (m.beta < 0) throw std::invalid_argument("mixture_cdf: beta >= 0");
    if (m.beta == 0.0) return 0.5 + std::atan(w / m.gamma) / kPi;
    const auto& gh = GaussHermite::instance();
    double s = 0.0;
    for (size_t i = 0; i < gh.nodes().size(); ++i)
        s += gh.weights()[i] * std::atan((w - m.beta * gh.nodes()[i]) / m.gamma);
    return 0.5 + s / kPi;
}

double mixture_pdf(const MixtureMarginal& m, double w) {
    if (!(m.gamma > 0)) throw std::invalid_argument("mixture_pdf: gamma > 0");
    if (m.beta == 0.0) {
        const double g = m.gamma;
        return g / (kPi * (w * w + g * g));
    }
    const auto& gh = GaussHermite::instance();
    double s = 0.0;
    for (size_t i = 0; i < gh.nodes().size(); ++i) {
        const double t = w - m.beta * gh.nodes()[i];
        s += gh.weights()[i] * m.gamma / (t * t + m.gamma * m.gamma);
    }
    return s / kPi;
}

double mixture_quantile(const MixtureMarginal& m, double q) {
    if (!(q > 0 && q < 1))
        throw std::invalid_argument("mixture_quantile: q must lie in (0,1)");
    double lo = m.gamma * std::tan(kPi * (q - 0.5)) - 6.0 * m.beta - 1.0;
    double hi = m.gamma * std::tan(kPi * (q - 0.5)) + 6.0 * m.beta + 1.0;
    while (mixture_cdf(m, lo) > q) lo = 2.0 * lo - hi;
    while (mixture_cdf(m, hi) < q) hi = 2.0 * hi - lo;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double F = mixture_cdf(m, mid);
        if (std::abs(F - q) < 1e-12 && hi - lo < 1e-10 * (1.0 + std::abs(mid))) break;
        (F < q ? lo : hi) = mid;
    }
    return mid;
}

double mixture_beta_mle(double gamma, std::span<const double> samples,
                        double beta_max) {
    if (samples.empty()) throw std::invalid_argument("mixture_beta_mle: empty sample");
    auto negll = [&](double beta) {
        const MixtureMarginal m{gamma, beta};
        double s = 0.0;
        for (double v : samples) s -= std::log(std::max(mixture_pdf(m, v), 1e-300));
        return s;
    };
    return golden_minimize(negll, 0.0, beta_max, 1e-6);
}

Kernel kernel_from_log_params(KernelFamily family, const std::vector<double>& logp) {
    switch (family) {
        case KernelFamily::Indicator:
            return Kernel::indicator(std::exp(logp.at(0)));
        case KernelFamily::PowerCompact:
            return Kernel::power_compact(std::exp(logp.at(0)), std::exp(logp.at(1)));
        case KernelFamily::Exponential:
            return Kernel::exponential(std::exp(logp.at(0)));
        case KernelFamily::PoweredExponential:
            return Kernel::powered_exponential(std::exp(logp.at(0)),
                                               logit_to_alpha(logp.at(1)));
        case KernelFamily::GaussianDensity:
            return Kernel::gaussian_density(std::exp(logp.at(0)));
    }
    throw std::logic_error("unreachable");
}

std::vector<double> log_params_of(const Kernel& kernel) {
    const auto& p = kernel.params();
    switch (kernel.family()) {
        case KernelFamily::PoweredExponential:
            return {std::log(p[0]), alpha_to_logit(p[1])};
        case KernelFamily::PowerCompact:
            return {std::log(p[0]), std::log(p[1])};
        default: {
            std::vector<double> lp;
            for (double v : p) lp.push_back(std::log(v));
            return lp;
        }
    }
}

double model_cjk(const Kernel& kernel, double delta) {
    if (kernel.family() == KernelFamily::PowerCompact)
        return cjk_power_compact(kernel.params()[1], kernel.params()[0], delta);
    StdfOptions opts;
    opts.abs_tol = 1e-6;
    opts.rel_tol = 1e-6;
    return cjk_numeric(kernel, delta, opts);
}

double model_tail_dep(const Kernel& kernel, double delta) {
    if (kernel.family() == KernelFamily::PowerCompact)
        return tail_dep_power_compact(kernel.params()[1], kernel.params()[0], delta);
    StdfOptions opts;
    opts.abs_tol = 1e-6;
    opts.rel_tol = 1e-6;
    return tail_dep(kernel, delta, opts);
}

namespace {

// Least-squares kernel fit against per-pair targets, with model values cached
// per distinct distance inside each objective evaluation.
FitResult fit_kernel_matching(
    const SiteSet& sites, KernelFamily family, const Weights& weights,
    const OptimizerConfig& cfg, const std::vector<double>& targets,
    const std::vector<PairInfo>& pairs,
    const std::function<double(const Kernel&, double)>& model) {
    auto clampv = [&](std::vector<double> p) {
        for (auto& v : p) v = std::clamp(v, cfg.log_lo, cfg.log_hi);
        return p;
    };
    auto objective = [&](const std::vector<double>& logp) {
        const Kernel k = kernel_from_log_params(family, clampv(logp));
        std::map<long long, double> cache;
        double obj = 0.0;
        for (size_t p = 0; p < pairs.size(); ++p) {
            if (pairs[p].weight == 0.0) continue;
            const long long key = llround(pairs[p].delta * 1e9);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, model(k, pairs[p].delta)).first;
            const double diff = it->second - targets[p];
            obj += pairs[p].weight * diff * diff;
        }
        return obj;
    };

    // heuristic center: scale near the median pair distance, shape neutral
    std::vector<double> deltas;
    for (const auto& p : pairs) deltas.push_back(p.delta);
    std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2, deltas.end());
    const double med = std::max(1e-3, deltas[deltas.size() / 2]);
    std::vector<double> center;
    switch (family) {
        case KernelFamily::PowerCompact: center = {std::log(med), 0.0}; break;
        case KernelFamily::PoweredExponential: center = {std::log(med), 0.0}; break;
        default: center = {std::log(med)}; break;
    }
    for (auto& v : center) v = std::clamp(v, cfg.log_lo, cfg.log_hi);

    const SimplexResult best = multi_start(objective, center, cfg);
    const Kernel fitted = kernel_from_log_params(family, clampv(best.x));

    FitResult res;
    res.family = family;
    res.theta_K = fitted.params();
    res.objective = best.fval;
    res.n_pairs_used = static_cast<int>(pairs.size());
    res.n_starts = cfg.n_starts;
    res.seed = cfg.seed;
    return res;
}

}  // namespace

FitResult fit_kernel_to_summaries(const SiteSet& sites, MatchStatistic stat,
                                  const std::vector<double>& targets,
                                  KernelFamily family, const Weights& weights,
                                  const OptimizerConfig& cfg) {
    const std::vector<PairInfo> pairs = make_pairs(sites, weights);
    if (targets.size() != pairs.size())
        throw std::invalid_argument("fit_kernel_to_summaries: one target per pair");
    std::function<double(const Kernel&, double)> model;
    if (stat == MatchStatistic::CauchyScale)
        model = [](const Kernel& k, double d) { return model_cjk(k, d); };
    else
        model = [](const Kernel& k, double d) { return model_tail_dep(k, d); };
    return fit_kernel_matching(sites, family, weights, cfg, targets, pairs, model);
}

FitResult fit_kernel_by_scales(const ReplicateMatrix& u, KernelFamily family,
                               const Weights& weights, const OptimizerConfig& cfg) {
    if (u.n < 20) throw std::invalid_argument("fit_kernel_by_scales: need n >= 20");
    if (u.d < 3) throw std::invalid_argument("fit_kernel_by_scales: need d >= 3");
    std::vector<PairInfo> pairs = make_pairs(u.sites, weights);

    std::vector<std::vector<double>> z(u.d);
    for (int j = 0; j < u.d; ++j) z[j] = cauchy_scores(u, j);

    std::vector<double> targets;
    std::vector<PairInfo> used;
    for (const auto& p : pairs) {
        std::vector<double> diff(u.n);
        for (int i = 0; i < u.n; ++i) diff[i] = z[p.j][i] - z[p.k][i];
        try {
            targets.push_back(cauchy_scale_mle(diff));
            used.push_back(p);
        } catch (const std::invalid_argument&) {
            std::cerr << "warning: pair (" << p.j << "," << p.k
                      << ") dropped: degenerate scale estimate\n";
        }
    }
    if (used.empty()) throw std::invalid_argument("fit_kernel_by_scales: no usable pairs");
    return fit_kernel_matching(u.sites, family, weights, cfg, targets, used,
                               [](const Kernel& k, double d) { return model_cjk(k, d); });
}

FitResult fit_kernel_by_taildep(const ReplicateMatrix& u, KernelFamily family,
                                double threshold_u, const Weights& weights,
                                const OptimizerConfig& cfg) {
    if (u.n < 20) throw std::invalid_argument("fit_kernel_by_taildep: need n >= 20");
    if (u.d < 3) throw std::invalid_argument("fit_kernel_by_taildep: need d >= 3");
    std::vector<PairInfo> pairs = make_pairs(u.sites, weights);
    std::vector<double> targets;
    for (const auto& p : pairs) {
        const auto cj = u.column(p.j);
        const auto ck = u.column(p.k);
        targets.push_back(empirical_tail_dep(cj, ck, threshold_u));
    }
    return fit_kernel_matching(u.sites, family, weights, cfg, targets, pairs,
                               [](const Kernel& k, double d) { return model_tail_dep(k, d); });
}

namespace {

struct MixtureGridPoint {
    double beta0;
    double objective;
    GaussianModel model;
};

}  // namespace

std::pair<GaussianModel, double> fit_mixture_gaussian(
    double beta0, const std::vector<double>& deltas,
    const std::vector<double>& beta_plus, const std::vector<double>& beta_minus,
    const std::vector<double>& pair_weights, const MixtureFitConfig& mix_cfg,
    const OptimizerConfig& cfg) {
    if (deltas.empty() || deltas.size() != beta_plus.size() ||
        deltas.size() != beta_minus.size() || deltas.size() != pair_weights.size())
        throw std::invalid_argument("fit_mixture_gaussian: size mismatch");

    auto model_of = [&](const std::vector<double>& tp) {
        GaussianModel g;
        g.rate = std::exp(std::clamp(tp[0], cfg.log_lo, cfg.log_hi));
        size_t ix = 1;
        g.alpha = mix_cfg.fit_alpha ? logit_to_alpha(tp[ix++]) : mix_cfg.alpha;
        g.tau = mix_cfg.fit_tau ? 1.0 / (1.0 + std::exp(-tp[ix++])) : mix_cfg.tau;
        return g;
    };
    auto objective = [&](const std::vector<double>& tp) {
        const GaussianModel g = model_of(tp);
        double obj = 0.0;
        for (size_t p = 0; p < deltas.size(); ++p) {
            const double rho = g.correlation(deltas[p]);
            const double bp = beta0 * std::sqrt(2.0 + 2.0 * rho);
            const double bm = beta0 * std::sqrt(2.0 - 2.0 * rho);
            obj += pair_weights[p] * ((bp - beta_plus[p]) * (bp - beta_plus[p]) +
                                      (bm - beta_minus[p]) * (bm - beta_minus[p]));
        }
        return obj;
    };
    std::vector<double> center = {0.0};
    if (mix_cfg.fit_alpha) center.push_back(alpha_to_logit(std::min(1.9, mix_cfg.alpha)));
    if (mix_cfg.fit_tau) center.push_back(-3.0);
    const SimplexResult r = multi_start(objective, center, cfg);
    return {model_of(r.x), r.fval};
}

FitResult fit_mixture(const ReplicateMatrix& u, const Kernel& fitted_kernel,
                      const MixtureFitConfig& mix_cfg, const Weights& weights,
                      const OptimizerConfig& cfg) {
    if (u.n < 20) throw std::invalid_argument("fit_mixture: need n >= 20");
    if (u.d < 3) throw std::invalid_argument("fit_mixture: need d >= 3");
    std::vector<double> beta_grid = mix_cfg.beta_grid;
    if (beta_grid.empty())
        for (double b = 0.0; b <= 4.0 + 1e-12; b += 0.25) beta_grid.push_back(b);
    if (beta_grid.empty()) throw std::invalid_argument("fit_mixture: empty beta grid");

    const std::vector<PairInfo> pairs = make_pairs(u.sites, weights);
    std::vector<double> cjk_model(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p)
        cjk_model[p] = model_cjk(fitted_kernel, pairs[p].delta);

    // distinct score values, so the quantile transform runs once per value
    std::vector<double> uniq;
    uniq.reserve(u.values.size());
    for (double v : u.values) uniq.push_back(v);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    auto evaluate_beta0 = [&](double beta0) -> MixtureGridPoint {
        std::vector<double> quant(uniq.size());
        const MixtureMarginal marg{1.0, beta0};
        for (size_t i = 0; i < uniq.size(); ++i)
            quant[i] = mixture_quantile(marg, uniq[i]);
        auto transform = [&](double v) {
            const size_t idx = std::lower_bound(uniq.begin(), uniq.end(), v) - uniq.begin();
            return quant[idx];
        };
        std::vector<std::vector<double>> zt(u.d, std::vector<double>(u.n));
        for (int j = 0; j < u.d; ++j)
            for (int i = 0; i < u.n; ++i) zt[j][i] = transform(u.at(i, j));

        std::vector<double> beta_plus(pairs.size()), beta_minus(pairs.size());
        std::vector<bool> ok(pairs.size(), true);
        for (size_t p = 0; p < pairs.size(); ++p) {
            if (pairs[p].weight == 0.0) { ok[p] = false; continue; }
            std::vector<double> sums(u.n), diffs(u.n);
            for (int i = 0; i < u.n; ++i) {
                sums[i] = zt[pairs[p].j][i] + zt[pairs[p].k][i];
                diffs[i] = zt[pairs[p].j][i] - zt[pairs[p].k][i];
            }
            try {
                beta_plus[p] = mixture_beta_mle(2.0, sums);
                beta_minus[p] = mixture_beta_mle(std::max(cjk_model[p], 1e-8), diffs);
            } catch (const std::exception&) {
                ok[p] = false;
                std::cerr << "warning: pair (" << pairs[p].j << "," << pairs[p].k
                          << ") dropped from the mixture fit\n";
            }
        }

        std::vector<double> gd, gp, gm, gw;
        for (size_t p = 0; p < pairs.size(); ++p) {
            if (!ok[p]) continue;
            gd.push_back(pairs[p].delta);
            gp.push_back(beta_plus[p]);
            gm.push_back(beta_minus[p]);
            gw.push_back(pairs[p].weight);
        }
        if (gd.empty())
            throw std::invalid_argument("fit_mixture: no usable pairs");
        const auto [g, obj] =
            fit_mixture_gaussian(beta0, gd, gp, gm, gw, mix_cfg, cfg);
        return {beta0, obj, g};
    };

    MixtureGridPoint best{beta_grid[0], std::numeric_limits<double>::infinity(), {}};
    for (double b0 : beta_grid) {
        const MixtureGridPoint gp = evaluate_beta0(b0);
        if (gp.objective < best.objective) best = gp;
    }
    // one refinement pass around the incumbent
    const double step0 = beta_grid.size() > 1 ? beta_grid[1] - beta_grid[0] : 0.25;
    for (double b0 = std::max(0.0, best.beta0 - step0); b0 <= best.beta0 + step0 + 1e-12;
         b0 += mix_cfg.refine_step) {
        const MixtureGridPoint gp = evaluate_beta0(b0);
        if (gp.objective < best.objective) best = gp;
    }

    FitResult res;
    res.family = fitted_kernel.family();
    res.theta_K = fitted_kernel.params();
    res.theta_G = best.model;
    res.beta = best.beta0;
    res.objective = best.objective;
    res.n_pairs_used = static_cast<int>(pairs.size());
    res.n_starts = cfg.n_starts;
    res.seed = cfg.seed;
    return res;
}

FitResult fit_ev_pairwise(const ReplicateMatrix& u, KernelFamily family,
                          const Weights& weights, const OptimizerConfig& cfg,
                          const EvFitConfig& ev_cfg) {
    if (u.n < 20) throw std::invalid_argument("fit_ev_pairwise: need n >= 20");
    if (u.d < 3) throw std::invalid_argument("fit_ev_pairwise: need d >= 3");
    const std::vector<PairInfo> pairs = make_pairs(u.sites, weights);

    // group pairs by distance; pairs at the same delta share one copula
    std::map<long long, std::vector<size_t>> groups;
    for (size_t p = 0; p < pairs.size(); ++p)
        if (pairs[p].weight > 0.0) groups[llround(pairs[p].delta * 1e9)].push_back(p);

    long floored = 0;
    // spline interpolation already limits the Pickands accuracy to ~1e-6,
    // so the node quadrature can stay coarse
    StdfOptions loose;
    loose.abs_tol = 1e-5;
    loose.rel_tol = 1e-4;
    // a tight budget: near-degenerate kernels (eta -> 0) make the integrand
    // almost discontinuous and quadrature cost explodes; treating budget
    // exhaustion as a penalty keeps the optimizer out of those corners
    loose.max_subdivisions = 2500;

    auto clampv = [&](std::vector<double> p) {
        for (auto& v : p) v = std::clamp(v, cfg.log_lo, cfg.log_hi);
        return p;
    };
    auto objective = [&](const std::vector<double>& logp) -> double {
        const Kernel k = kernel_from_log_params(family, clampv(logp));
        double negll = 0.0;
        for (const auto& [key, members] : groups) {
            const double delta = pairs[members.front()].delta;
            std::optional<PickandsCurve> maybe_curve;
            try {
                maybe_curve.emplace(k, delta, ev_cfg.pickands_nodes, loose);
            } catch (const QuadratureFailure&) {
                return 1e100;  // exhausted budget: push the simplex away
            }
            const PickandsCurve& curve = *maybe_curve;
            const BivariateStdf stdf = [&curve](double w1, double w2) {
                return curve(w1, w2);
            };
            for (size_t p : members) {
                double acc = 0.0;
                for (int i = 0; i < u.n; ++i) {
                    double dens = ev_copula_density(stdf, u.at(i, pairs[p].j),
                                                    u.at(i, pairs[p].k));
                    if (dens < ev_cfg.density_floor) {
                        dens = ev_cfg.density_floor;
                        ++floored;
                    }
                    acc += std::log(dens);
                }
                negll -= pairs[p].weight * acc;
            }
        }
        return negll;
    };

    std::vector<double> deltas;
    for (const auto& p : pairs) deltas.push_back(p.delta);
    std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2, deltas.end());
    const double med = std::max(1e-3, deltas[deltas.size() / 2]);
    std::vector<double> center;
    switch (family) {
        case KernelFamily::PowerCompact:
        case KernelFamily::PoweredExponential:
            center = {std::log(med), 0.0};
            break;
        default:
            center = {std::log(med)};
            break;
    }

    const SimplexResult best = multi_start(objective, center, cfg);
    const Kernel fitted = kernel_from_log_params(family, clampv(best.x));

    FitResult res;
    res.family = family;
    res.theta_K = fitted.params();
    res.objective = best.fval;
    res.n_pairs_used = static_cast<int>(pairs.size());
    res.n_starts = cfg.n_starts;
    res.seed = cfg.seed;
    if (floored > 0)
        res.trace.push_back("density floored at " + std::to_string(ev_cfg.density_floor) +
                            " for " + std::to_string(floored) + " evaluations");
    return res;
}

std::vector<PairSummary> compute_pair_summaries(const ReplicateMatrix& u,
                                                double threshold_u) {
    std::vector<PairSummary> out;
    std::vector<std::vector<double>> z(u.d), cols(u.d);
    for (int j = 0; j < u.d; ++j) {
        z[j] = cauchy_scores(u, j);
        cols[j] = u.column(j);
    }
    for (int j = 0; j < u.d; ++j)
        for (int k = j + 1; k < u.d; ++k) {
            PairSummary s;
            s.j = j;
            s.k = k;
            s.delta = distance(u.sites[j], u.sites[k]);
            std::vector<double> diff(u.n);
            for (int i = 0; i < u.n; ++i) diff[i] = z[j][i] - z[k][i];
            try {
                s.c_hat = cauchy_scale_mle(diff);
            } catch (const std::invalid_argument&) {
                s.c_hat = std::numeric_limits<double>::quiet_NaN();
            }
            s.lambda_hat = empirical_tail_dep(cols[j], cols[k], threshold_u);
            s.rho_hat = spearman(cols[j], cols[k]);
            out.push_back(s);
        }
    return out;
}

void to_json(nlohmann::json& j, const FitResult& r) {
    j = nlohmann::json{
        {"family", family_name(r.family)},
        {"theta_K", r.theta_K},
        {"objective", r.objective},
        {"n_pairs_used", r.n_pairs_used},
        {"config", {{"n_starts", r.n_starts}}},
        {"seed", r.seed},
    };
    if (r.theta_G) {
        j["theta_G"] = {{"rate", r.theta_G->rate},
                        {"alpha", r.theta_G->alpha},
                        {"tau", r.theta_G->tau}};
    }
    if (r.beta) j["beta"] = *r.beta;
    if (!r.trace.empty()) j["trace"] = r.trace;
}

}  // namespace ccp
