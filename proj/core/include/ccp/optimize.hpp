#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace ccp {

struct SimplexResult {
    std::vector<double> x;
    double fval = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

struct SimplexOptions {
    int max_iter = 400;
    double f_tol = 1e-13;
    double x_tol = 1e-10;
    double initial_step = 0.4;
};

/// Derivative-free Nelder-Mead simplex minimization. Objectives here involve
/// quadrature and are only piecewise smooth, so no gradients are assumed.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x0,
                                 const SimplexOptions& opts = {}) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i < n; ++i) pts[i + 1][i] += opts.initial_step;
    for (size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    SimplexResult res;
    std::vector<size_t> idx(n + 1);
    for (int it = 0; it < opts.max_iter; ++it) {
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t best = idx[0], worst = idx[n], second = idx[n - 1];

        double spread = 0.0;
        for (size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::abs(pts[worst][i] - pts[best][i]));
        if (std::abs(fv[worst] - fv[best]) <= opts.f_tol && spread <= opts.x_tol) {
            res.converged = true;
            res.iterations = it;
            break;
        }
        res.iterations = it + 1;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / double(n);
        }
        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
            return p;
        };

        std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[idx[0]]) {
            std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) { pts[worst] = xe; fv[worst] = fe; }
            else { pts[worst] = xr; fv[worst] = fr; }
        } else if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            std::vector<double> xc = blend(fr < fv[worst] ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t k = 0; k < n; ++k)
                        pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    size_t best = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pts[best];
    res.fval = fv[best];
    return res;
}

/// Golden-section minimization of a unimodal 1-D function on [a,b].
inline double golden_minimize(const std::function<double(double)>& f, double a,
                              double b, double tol = 1e-8, int max_iter = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace ccp
