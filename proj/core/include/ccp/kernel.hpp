#pragma once

#include <string>

#include "json.hpp"

#include "ccp/geometry.hpp"

namespace ccp {

enum class KernelFamily {
    Indicator,            // 1{t < r}
    PowerCompact,         // (1 - t/r)_+^eta
    Exponential,          // exp(-t/lambda)
    PoweredExponential,   // exp{-(t/lambda)^alpha}, 0 < alpha <= 2
    GaussianDensity,      // bivariate isotropic normal density, scale sigma
};

std::string family_name(KernelFamily f);
KernelFamily family_from_name(const std::string& name);

/// Isotropic nonnegative kernel g(||s - s*||) with a nonincreasing radial
/// profile. Immutable after construction; parameters are validated here and
/// nowhere else.
class Kernel {
  public:
    static Kernel indicator(double r);
    static Kernel power_compact(double r, double eta);
    static Kernel exponential(double lambda);
    static Kernel powered_exponential(double lambda, double alpha);
    static Kernel gaussian_density(double sigma);

    /// Build from a family and the family's parameter vector in canonical
    /// order: Indicator(r), PowerCompact(r, eta), Exponential(lambda),
    /// PoweredExponential(lambda, alpha), GaussianDensity(sigma).
    static Kernel make(KernelFamily family, const std::vector<double>& params);

    KernelFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

    /// Radial profile g(t).
    double radial(double t) const;

    double eval(const Site& s, const Site& s_star) const {
        return radial(distance(s, s_star));
    }

    /// c = integral of k over the plane; closed form for every family.
    double normalizing_constant() const { return norm_const_; }

    /// Normalized kernel zeta = k / c.
    double zeta(const Site& s, const Site& s_star) const {
        return eval(s, s_star) / norm_const_;
    }
    double zeta_radial(double t) const { return radial(t) / norm_const_; }

    /// Exact radius for compact families; for infinite-support families the
    /// distance at which g drops to 5e-5 of g(0) (used for domain expansion).
    double support_radius() const { return support_radius_; }

    double max_value() const { return radial(0.0); }

    /// g evaluated on an equispaced grid of x in (0,1): x_i = i/(n+1).
    struct Profile {
        std::vector<double> distances;
        std::vector<double> values;
    };
    Profile profile(int n_points) const;

  private:
    Kernel(KernelFamily family, std::vector<double> params);

    KernelFamily family_;
    std::vector<double> params_;
    double norm_const_ = 0.0;
    double support_radius_ = 0.0;
};

/// Radial quadrature 2*pi*int t*g(t) dt; an independent route to the closed
/// forms, kept public for cross-checks.
double normalizing_constant_quadrature(const Kernel& k);

void to_json(nlohmann::json& j, const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

/// Relative level below which an infinite-support kernel is treated as zero.
inline constexpr double kSupportCutoff = 5e-5;

}  // namespace ccp
