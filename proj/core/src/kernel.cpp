#include "ccp/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ccp/quadrature.hpp"

namespace ccp {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument("Kernel: " + msg);
}

}  // namespace

std::string family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Indicator: return "indicator";
        case KernelFamily::PowerCompact: return "power_compact";
        case KernelFamily::Exponential: return "exponential";
        case KernelFamily::PoweredExponential: return "powered_exponential";
        case KernelFamily::GaussianDensity: return "gaussian_density";
    }
    throw std::logic_error("unknown kernel family");
}

KernelFamily family_from_name(const std::string& name) {
    if (name == "indicator") return KernelFamily::Indicator;
    if (name == "power_compact") return KernelFamily::PowerCompact;
    if (name == "exponential") return KernelFamily::Exponential;
    if (name == "powered_exponential") return KernelFamily::PoweredExponential;
    if (name == "gaussian_density") return KernelFamily::GaussianDensity;
    throw std::invalid_argument("unknown kernel family '" + name + "'");
}

Kernel::Kernel(KernelFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    for (double p : params_) require(std::isfinite(p), "parameters must be finite");
    switch (family_) {
        case KernelFamily::Indicator: {
            require(params_.size() == 1, "Indicator takes (r)");
            const double r = params_[0];
            require(r > 0, "r must be positive");
            norm_const_ = kPi * r * r;
            support_radius_ = r;
            break;
        }
        case KernelFamily::PowerCompact: {
            require(params_.size() == 2, "PowerCompact takes (r, eta)");
            const double r = params_[0], eta = params_[1];
            require(r > 0, "r must be positive");
            require(eta > 0, "eta must be positive");
            norm_const_ = 2.0 * kPi * r * r / ((eta + 1.0) * (eta + 2.0));
            support_radius_ = r;
            break;
        }
        case KernelFamily::Exponential: {
            require(params_.size() == 1, "Exponential takes (lambda)");
            const double lam = params_[0];
            require(lam > 0, "lambda must be positive");
            norm_const_ = 2.0 * kPi * lam * lam;
            support_radius_ = lam * std::log(1.0 / kSupportCutoff);
            break;
        }
        case KernelFamily::PoweredExponential: {
            require(params_.size() == 2, "PoweredExponential takes (lambda, alpha)");
            const double lam = params_[0], alpha = params_[1];
            require(lam > 0, "lambda must be positive");
            require(alpha > 0 && alpha <= 2.0, "alpha must be in (0, 2]");
            // 2*pi*int_0^inf t*exp(-(t/lam)^alpha) dt = 2*pi*lam^2*Gamma(2/alpha)/alpha
            norm_const_ = 2.0 * kPi * lam * lam * std::tgamma(2.0 / alpha) / alpha;
            support_radius_ = lam * std::pow(std::log(1.0 / kSupportCutoff), 1.0 / alpha);
            break;
        }
        case KernelFamily::GaussianDensity: {
            require(params_.size() == 1, "GaussianDensity takes (sigma)");
            const double sigma = params_[0];
            require(sigma > 0, "sigma must be positive");
            norm_const_ = 1.0;
            support_radius_ = sigma * std::sqrt(2.0 * std::log(1.0 / kSupportCutoff));
            break;
        }
    }
}

Kernel Kernel::indicator(double r) { return Kernel(KernelFamily::Indicator, {r}); }
Kernel Kernel::power_compact(double r, double eta) {
    return Kernel(KernelFamily::PowerCompact, {r, eta});
}
Kernel Kernel::exponential(double lambda) {
    return Kernel(KernelFamily::Exponential, {lambda});
}
Kernel Kernel::powered_exponential(double lambda, double alpha) {
    return Kernel(KernelFamily::PoweredExponential, {lambda, alpha});
}
Kernel Kernel::gaussian_density(double sigma) {
    return Kernel(KernelFamily::GaussianDensity, {sigma});
}
Kernel Kernel::make(KernelFamily family, const std::vector<double>& params) {
    return Kernel(family, params);
}

double Kernel::radial(double t) const {
    switch (family_) {
        case KernelFamily::Indicator:
            return t < params_[0] ? 1.0 : 0.0;
        case KernelFamily::PowerCompact: {
            const double u = 1.0 - t / params_[0];
            return u > 0.0 ? std::pow(u, params_[1]) : 0.0;
        }
        case KernelFamily::Exponential:
            return std::exp(-t / params_[0]);
        case KernelFamily::PoweredExponential:
            return std::exp(-std::pow(t / params_[0], params_[1]));
        case KernelFamily::GaussianDensity: {
            const double s2 = params_[0] * params_[0];
            return std::exp(-0.5 * t * t / s2) / (2.0 * kPi * s2);
        }
    }
    return 0.0;
}

Kernel::Profile Kernel::profile(int n_points) const {
    if (n_points < 2) throw std::invalid_argument("Kernel::profile: n_points must be >= 2");
    Profile p;
    p.distances.reserve(n_points);
    p.values.reserve(n_points);
    for (int i = 1; i <= n_points; ++i) {
        const double x = double(i) / (n_points + 1);
        p.distances.push_back(x);
        p.values.push_back(radial(x));
    }
    return p;
}

double normalizing_constant_quadrature(const Kernel& k) {
    const double R = k.support_radius();
    QuadOptions opts;
    opts.abs_tol = 1e-10;
    opts.rel_tol = 1e-10;
    const double v = integrate_1d_or_throw(
        [&](double t) { return t * k.radial(t); }, 0.0, R, opts,
        "normalizing_constant");
    return 2.0 * std::numbers::pi * v;
}

void to_json(nlohmann::json& j, const Kernel& k) {
    nlohmann::json params;
    switch (k.family()) {
        case KernelFamily::Indicator:
            params["r"] = k.params()[0];
            break;
        case KernelFamily::PowerCompact:
            params["r"] = k.params()[0];
            params["eta"] = k.params()[1];
            break;
        case KernelFamily::Exponential:
            params["lambda"] = k.params()[0];
            break;
        case KernelFamily::PoweredExponential:
            params["lambda"] = k.params()[0];
            params["alpha"] = k.params()[1];
            break;
        case KernelFamily::GaussianDensity:
            params["sigma"] = k.params()[0];
            break;
    }
    j = nlohmann::json{{"family", family_name(k.family())}, {"params", params}};
}

Kernel kernel_from_json(const nlohmann::json& j) {
    if (!j.contains("family")) throw std::invalid_argument("kernel config: missing 'family'");
    if (!j.contains("params")) throw std::invalid_argument("kernel config: missing 'params'");
    const KernelFamily fam = family_from_name(j.at("family").get<std::string>());
    const auto& p = j.at("params");
    auto get = [&](const char* name) {
        if (!p.contains(name))
            throw std::invalid_argument(std::string("kernel config: missing param '") + name + "'");
        return p.at(name).get<double>();
    };
    switch (fam) {
        case KernelFamily::Indicator: return Kernel::indicator(get("r"));
        case KernelFamily::PowerCompact: return Kernel::power_compact(get("r"), get("eta"));
        case KernelFamily::Exponential: return Kernel::exponential(get("lambda"));
        case KernelFamily::PoweredExponential:
            return Kernel::powered_exponential(get("lambda"), get("alpha"));
        case KernelFamily::GaussianDensity: return Kernel::gaussian_density(get("sigma"));
    }
    throw std::logic_error("unreachable");
}

}  // namespace ccp
