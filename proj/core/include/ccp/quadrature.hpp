#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccp/geometry.hpp"

namespace ccp {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // achieved error estimate
    long evals = 0;
    bool converged = false;
};

/// Thrown when an adaptive rule exhausts its budget before meeting tolerance.
class QuadratureFailure : public std::runtime_error {
  public:
    QuadratureFailure(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " +
                             std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

struct QuadOptions {
    double abs_tol = 1e-8;
    double rel_tol = 0.0;
    long max_subdivisions = 20000;
};

/// Adaptive Gauss-Kronrod (G7/K15) on [a,b].
QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, const QuadOptions& opts);

/// Adaptive 2-D integration over a union of axis-aligned boxes, using a
/// tensor G7/K15 rule and greedy worst-box refinement. The initial boxes let
/// the caller pre-split along known kinks of the integrand.
QuadResult integrate_2d(const std::function<double(double, double)>& f,
                        const std::vector<Rect>& initial_boxes,
                        const QuadOptions& opts);

inline double integrate_1d_or_throw(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadOptions& opts,
                                    const std::string& context) {
    QuadResult r = integrate_1d(f, a, b, opts);
    if (!r.converged) throw QuadratureFailure(context + ": 1-D quadrature tolerance not met", r.error);
    return r.value;
}

inline double integrate_2d_or_throw(const std::function<double(double, double)>& f,
                                    const std::vector<Rect>& boxes,
                                    const QuadOptions& opts,
                                    const std::string& context) {
    QuadResult r = integrate_2d(f, boxes, opts);
    if (!r.converged) throw QuadratureFailure(context + ": 2-D quadrature tolerance not met", r.error);
    return r.value;
}

}  // namespace ccp
