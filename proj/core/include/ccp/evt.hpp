#pragma once

#include <functional>
#include <vector>

#include "ccp/geometry.hpp"
#include "ccp/kernel.hpp"
#include "ccp/quadrature.hpp"

namespace ccp {

/// Stable tail dependence function query for d >= 2 sites sharing one kernel.
struct StdfQuery {
    Kernel kernel;
    SiteSet sites;
    std::vector<double> weights;
};

struct StdfOptions {
    double abs_tol = 1e-7;
    double rel_tol = 1e-6;
    long max_subdivisions = 400000;
};

/// l(w) = int max_j w_j * zeta(s_j, s*) ds*, by 2-D adaptive quadrature over
/// the union of effective supports. For two sites the domain is rotated so
/// the kink locus (the perpendicular bisector, for equal weights) lies on a
/// box edge.
double stdf_numeric(const StdfQuery& q, const StdfOptions& opts = {});

/// lambda = 2 - l(1,1) for two sites at distance delta.
double tail_dep(const Kernel& kernel, double delta, const StdfOptions& opts = {});

/// c_jk = int |zeta_1 - zeta_2| ds* = 2(l(1,1) - 1), by direct 2-D quadrature.
double cjk_numeric(const Kernel& kernel, double delta, const StdfOptions& opts = {});

/// Radial reduction of c_jk for the (1 - t/r)_+^eta family: a 1-D integral
/// over the angle phi in [pi, 2*pi].
double cjk_power_compact(double eta, double r, double delta);

/// lambda for the power-compact family through the 1-D radial route.
inline double tail_dep_power_compact(double eta, double r, double delta) {
    return 1.0 - 0.5 * cjk_power_compact(eta, r, delta);
}

// --- Bivariate closed-form oracles -----------------------------------------

/// 1-D Gaussian-density kernel (Smith model): the Husler-Reiss form.
double stdf_husler_reiss(double sigma, double delta, double w1, double w2);

/// 1-D Laplace kernel: piecewise form with a restricted-support wedge,
/// G(delta) = exp(delta/lambda).
double stdf_laplace(double lambda, double delta, double w1, double w2);

/// 2-D indicator kernel of radius r: the Marshall-Olkin form via lens areas.
double stdf_marshall_olkin(double r, double delta, double w1, double w2);

/// 1-D numeric harness matching the two 1-D oracles above.
enum class Kernel1D { GaussianDensity, Laplace };
double stdf_numeric_1d(Kernel1D kind, double param, double delta, double w1,
                       double w2, const StdfOptions& opts = {});

/// G(delta) of the restricted-support corollary: exact exp(delta/lambda) for
/// the exponential kernel, the bound exp((delta/lambda)^alpha) for powered
/// exponential with alpha <= 1, infinity otherwise.
double support_bound(const Kernel& kernel, double delta);

// --- EV copula --------------------------------------------------------------

using BivariateStdf = std::function<double(double, double)>;

/// C(u1,u2) = exp{-l(-log u1, -log u2)}.
double ev_copula_cdf(const BivariateStdf& stdf, double u1, double u2);

/// d2C/du1du2 by central finite differences of l in w-space (step 1e-4,
/// Richardson-extrapolated), clipped at zero. Regions where the copula is
/// singular in one argument come out as density zero, not an error.
double ev_copula_density(const BivariateStdf& stdf, double u1, double u2);

/// Pickands function A(t) = l(1-t, t) of the bivariate EV copula at distance
/// delta, tabulated once by quadrature and interpolated by a cubic spline.
/// Exposes the homogeneous extension l(w1,w2) = (w1+w2) A(w2/(w1+w2)), so it
/// can stand in as a cheap BivariateStdf inside likelihood loops.
class PickandsCurve {
  public:
    PickandsCurve(const Kernel& kernel, double delta, int n_nodes = 33,
                  const StdfOptions& opts = {});

    double pickands(double t) const;
    double operator()(double w1, double w2) const;

  private:
    std::vector<double> t_, a_, m_;  // nodes, values, spline second derivatives
};

}  // namespace ccp
