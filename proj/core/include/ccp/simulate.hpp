#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccp/geometry.hpp"
#include "ccp/kernel.hpp"

namespace ccp {

/// Discretization grid for the kernel-convolution approximation.
struct SimGrid {
    Rect extent;
    int m = 200;  // points per axis

    double cell_width() const { return extent.width() / m; }
    double cell_height() const { return extent.height() / m; }
    double cell_area() const { return cell_width() * cell_height(); }

    /// Bounding box of the sites expanded by the kernel's support radius.
    static SimGrid default_for(const SiteSet& sites, const Kernel& kernel,
                               int m = 200);
};

/// Isotropic powered-exponential correlation with a nugget that applies only
/// to distinct sites: rho(0) = 1, rho(delta) = (1-tau)exp(-rate*delta^alpha).
struct GaussianModel {
    double rate = 1.0;
    double alpha = 1.0;
    double tau = 0.0;

    double correlation(double delta) const;
    void validate() const;
};

struct MixtureModel {
    Kernel kernel;
    GaussianModel gaussian;
    double beta = 0.0;
};

enum class Scale { Raw, Uniform, StandardCauchy };

std::string scale_name(Scale s);
Scale scale_from_name(const std::string& name);

/// n x d matrix of process values (row-major), one replicate per row.
struct ReplicateMatrix {
    std::vector<double> values;
    int n = 0;
    int d = 0;
    SiteSet sites;
    Scale scale = Scale::Raw;

    double& at(int i, int j) { return values[size_t(i) * d + j]; }
    double at(int i, int j) const { return values[size_t(i) * d + j]; }
    std::vector<double> column(int j) const;
};

/// Grid approximation of the Cauchy convolution field: each replicate is
/// sum over cells of k(s_j, cell) * cell_area * W_cell, W iid Cauchy(1).
ReplicateMatrix simulate_cauchy(const Kernel& kernel, const SiteSet& sites,
                                const SimGrid& grid, int n, std::uint64_t seed);

/// The exact Cauchy scale of the one-site grid approximation, sum k * area.
double grid_marginal_scale(const Kernel& kernel, const Site& site,
                           const SimGrid& grid);

ReplicateMatrix simulate_gaussian(const GaussianModel& model,
                                  const SiteSet& sites, int n,
                                  std::uint64_t seed);

ReplicateMatrix simulate_mixture(const MixtureModel& model, const SiteSet& sites,
                                 const SimGrid& grid, int n, std::uint64_t seed);

struct EvOptions {
    long max_points = 10'000'000;  // per-replicate Poisson point cap
};

/// Exact moving-maximum simulation of the EV limit; unit Frechet margins.
ReplicateMatrix simulate_ev(const Kernel& kernel, const SiteSet& sites, int n,
                            std::uint64_t seed, const EvOptions& opts = {});

/// Columnwise midranks divided by (n+1).
ReplicateMatrix to_uniform(const ReplicateMatrix& m);

/// Midranks of one column (ties averaged), values in 1..n.
std::vector<double> midranks(const std::vector<double>& col);

}  // namespace ccp
