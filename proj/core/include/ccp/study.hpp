#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccp/inference.hpp"
#include "ccp/kernel.hpp"
#include "ccp/simulate.hpp"

namespace ccp {

enum class ProcessType { Cauchy, Mixture, Ev };

std::string process_name(ProcessType p);
ProcessType process_from_name(const std::string& name);

/// One simulation-study cell: simulate -> rank transform -> fit -> aggregate.
struct StudyConfig {
    ProcessType process = ProcessType::Cauchy;
    Kernel kernel = Kernel::power_compact(0.25, 1.0);  // truth
    GaussianModel gaussian;  // truth when process == Mixture
    double beta = 2.0;       // truth when process == Mixture
    int lattice_m = 3;       // d = m*m sites on (j/(m+1), k/(m+1))
    int n = 500;             // replicates per repetition
    int repetitions = 100;   // N
    std::uint64_t seed = 0;
    double threshold_u = 0.95;
    int grid_m = 200;        // simulation grid resolution
    int jobs = 0;            // 0 -> hardware concurrency
    OptimizerConfig optimizer;
    MixtureFitConfig mixture;
};

struct StudyReport {
    std::vector<std::string> param_names;
    std::vector<double> truth;
    std::vector<std::vector<double>> estimates;  // successful repetitions only
    std::vector<double> rmse;                    // per parameter
    double delta_max = 0.0;  // max over repetitions of int |k_hat - k_0|
    double delta_avg = 0.0;  // mean over repetitions
    int n_failures = 0;
    double wall_seconds = 0.0;
    nlohmann::json config_echo;
};

void to_json(nlohmann::json& j, const StudyReport& r);

StudyReport run_study(const StudyConfig& cfg);

/// Canonical-order parameter labels of a kernel family.
std::vector<std::string> kernel_param_names(KernelFamily family);

struct CurvePoint {
    double delta = 0.0;
    std::string statistic;  // "spearman" | "tail_dep"
    double value = 0.0;
    std::string source;     // "empirical" | "model"
};

/// Dependence summaries on a distance grid: Spearman and tail dependence of
/// the fitted model by Monte Carlo ("empirical"), tail dependence also by
/// quadrature ("model").
std::vector<CurvePoint> dependence_curves(const MixtureModel& model,
                                          const std::vector<double>& deltas,
                                          int mc_replicates, std::uint64_t seed,
                                          double threshold_u = 0.95,
                                          int grid_m = 200);

}  // namespace ccp
