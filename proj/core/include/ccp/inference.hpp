#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccp/geometry.hpp"
#include "ccp/kernel.hpp"
#include "ccp/simulate.hpp"

namespace ccp {

// --- Scale estimators --------------------------------------------------------

/// Positive root of sum c^2/(c^2 + y_i^2) = n/2: the Cauchy scale MLE.
double cauchy_scale_mle(std::span<const double> samples);

/// median|y_i|, midpoint convention for even n. Robust, ~20% less efficient.
double cauchy_scale_median(std::span<const double> samples);

// --- Empirical dependence summaries ------------------------------------------

/// (1/(n(1-u))) sum 1(u_ij > u, u_ik > u); may exceed 1 in finite samples.
double empirical_tail_dep(std::span<const double> u_col_j,
                          std::span<const double> u_col_k, double u);

/// Sample correlation of midranks.
double spearman(std::span<const double> col_j, std::span<const double> col_k);

// --- Per-pair summaries -------------------------------------------------------

struct PairSummary {
    int j = 0, k = 0;
    double delta = 0.0;
    double c_hat = 0.0;        // Cauchy scale of standardized differences
    double lambda_hat = 0.0;   // empirical tail dependence at the threshold
    double rho_hat = 0.0;      // Spearman
    double beta_plus_hat = 0.0;
    double beta_minus_hat = 0.0;
};

struct Weights {
    enum class Scheme { Equal, DistanceCutoff };
    Scheme scheme = Scheme::Equal;
    double delta_max = 0.0;  // used by DistanceCutoff

    double of(double delta) const {
        if (scheme == Scheme::Equal) return 1.0;
        return delta <= delta_max ? 1.0 : 0.0;
    }
};

// --- Mixture marginal: gamma*W + beta*Z --------------------------------------

struct MixtureMarginal {
    double gamma = 1.0;  // Cauchy scale, > 0
    double beta = 0.0;   // Gaussian scale, >= 0
};

double mixture_cdf(const MixtureMarginal& m, double w);
double mixture_pdf(const MixtureMarginal& m, double w);
double mixture_quantile(const MixtureMarginal& m, double q);

/// One-parameter MLE of beta in F(.; gamma, beta) with gamma held fixed.
double mixture_beta_mle(double gamma, std::span<const double> samples,
                        double beta_max = 20.0);

// --- Fitters ------------------------------------------------------------------

struct OptimizerConfig {
    int n_starts = 5;
    int max_iter = 400;
    std::uint64_t seed = 0;          // jitters the multi-start points
    double log_lo = -2.5;            // box for log-parameters
    double log_hi = 2.5;
    std::vector<double> warm_start;  // log-params; replaces the heuristic center
};

struct FitResult {
    KernelFamily family = KernelFamily::PowerCompact;
    std::vector<double> theta_K;
    std::optional<GaussianModel> theta_G;
    std::optional<double> beta;
    double objective = 0.0;
    int n_pairs_used = 0;
    int n_starts = 0;
    std::vector<std::string> trace;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const FitResult& r);

/// Model c_jk(theta) for a kernel at distance delta: the 1-D radial route for
/// PowerCompact, 2-D quadrature otherwise.
double model_cjk(const Kernel& kernel, double delta);

/// Model tail dependence lambda_jk(theta), same route selection.
double model_tail_dep(const Kernel& kernel, double delta);

enum class MatchStatistic { CauchyScale, TailDep };

/// Least-squares kernel fit against externally supplied per-pair summaries
/// (one target per j < k pair, row-major order).
FitResult fit_kernel_to_summaries(const SiteSet& sites, MatchStatistic stat,
                                  const std::vector<double>& targets,
                                  KernelFamily family, const Weights& weights,
                                  const OptimizerConfig& cfg);

/// Least-squares fit of theta_K matching model c_jk to Cauchy-scale estimates
/// from standardized differences of back-transformed scores.
FitResult fit_kernel_by_scales(const ReplicateMatrix& uniform_scores,
                               KernelFamily family, const Weights& weights,
                               const OptimizerConfig& cfg);

/// Least-squares fit of theta_K matching model lambda_jk to empirical tail
/// dependence at threshold u.
FitResult fit_kernel_by_taildep(const ReplicateMatrix& uniform_scores,
                                KernelFamily family, double threshold_u,
                                const Weights& weights,
                                const OptimizerConfig& cfg);

struct MixtureFitConfig {
    std::vector<double> beta_grid;   // empty -> 0:0.25:4 default
    double refine_step = 0.05;
    double alpha = 1.0;              // correlation smoothness, fixed unless fit
    double tau = 0.0;                // nugget, fixed unless fit
    bool fit_alpha = false;
    bool fit_tau = false;
};

/// Gaussian step of the mixture fit for fixed beta0: least squares of
/// beta0*sqrt(2 +- 2 rho_G(delta)) against per-pair scale summaries.
/// Returns the fitted model and its objective.
std::pair<GaussianModel, double> fit_mixture_gaussian(
    double beta0, const std::vector<double>& deltas,
    const std::vector<double>& beta_plus, const std::vector<double>& beta_minus,
    const std::vector<double>& pair_weights, const MixtureFitConfig& mix_cfg,
    const OptimizerConfig& cfg);

/// Two-step mixture fit: theta_K is taken as given (from the tail-dependence
/// fit); beta and theta_G are found by matching beta+- scale estimates on
/// sums/differences over a beta grid.
FitResult fit_mixture(const ReplicateMatrix& uniform_scores,
                      const Kernel& fitted_kernel, const MixtureFitConfig& mix_cfg,
                      const Weights& weights, const OptimizerConfig& cfg);

struct EvFitConfig {
    int pickands_nodes = 33;
    double density_floor = 1e-300;
};

/// Pairwise log-likelihood fit of theta_K for extreme-value (max) data, with
/// densities from the numeric bivariate EV copula.
FitResult fit_ev_pairwise(const ReplicateMatrix& uniform_scores,
                          KernelFamily family, const Weights& weights,
                          const OptimizerConfig& cfg, const EvFitConfig& ev_cfg = {});

/// Per-pair summary table (distances, c_hat, lambda_hat, Spearman).
std::vector<PairSummary> compute_pair_summaries(const ReplicateMatrix& uniform_scores,
                                                double threshold_u);

/// Kernel built from an unconstrained optimizer vector (log-parameterized).
Kernel kernel_from_log_params(KernelFamily family, const std::vector<double>& logp);
std::vector<double> log_params_of(const Kernel& kernel);

}  // namespace ccp
