#include "ccp/evt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccp {

namespace {

constexpr double kPi = std::numbers::pi;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Truncation radius for EVT quadrature. Tighter than the simulation cutoff:
// the stdf bound checks allow only ~1e-5 slack, so the discarded tail mass
// must sit well below that.
double integration_radius(const Kernel& k) {
    constexpr double level = 1e-9;
    const double lnl = std::log(1.0 / level);
    switch (k.family()) {
        case KernelFamily::Indicator:
        case KernelFamily::PowerCompact:
            return k.support_radius();
        case KernelFamily::Exponential:
            return k.params()[0] * lnl;
        case KernelFamily::PoweredExponential:
            return k.params()[0] * std::pow(lnl, 1.0 / k.params()[1]);
        case KernelFamily::GaussianDensity:
            return k.params()[0] * std::sqrt(2.0 * lnl);
    }
    return k.support_radius();
}

// Boxes covering the two-site union of supports in the canonical frame
// (s1 at the origin, s2 at (delta, 0)), pre-split along the perpendicular
// bisector x = delta/2 where the max/|diff| integrands kink.
std::vector<Rect> two_site_boxes(double delta, double R) {
    std::vector<Rect> boxes;
    if (delta >= 2.0 * R) {
        boxes.push_back({-R, -R, R, R});
        boxes.push_back({delta - R, -R, delta + R, R});
    } else {
        boxes.push_back({-R, -R, delta / 2.0, R});
        boxes.push_back({delta / 2.0, -R, delta + R, R});
    }
    return boxes;
}

QuadOptions to_quad(const StdfOptions& o) {
    QuadOptions q;
    q.abs_tol = o.abs_tol;
    q.rel_tol = o.rel_tol;
    q.max_subdivisions = o.max_subdivisions;
    return q;
}

}  // namespace

double stdf_numeric(const StdfQuery& q, const StdfOptions& opts) {
    const size_t d = q.sites.size();
    if (d < 2) throw std::invalid_argument("stdf_numeric: need at least two sites");
    if (q.weights.size() != d)
        throw std::invalid_argument("stdf_numeric: weights/sites size mismatch");
    bool any_positive = false;
    for (double w : q.weights) {
        if (w < 0 || !std::isfinite(w))
            throw std::invalid_argument("stdf_numeric: weights must be finite and nonnegative");
        if (w > 0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("stdf_numeric: all weights zero");

    const double R = integration_radius(q.kernel);
    const double c = q.kernel.normalizing_constant();

    if (d == 2) {
        // canonical frame, valid by isotropy
        const double delta = distance(q.sites[0], q.sites[1]);
        const double w1 = q.weights[0], w2 = q.weights[1];
        auto f = [&](double x, double y) {
            const double g1 = q.kernel.radial(std::hypot(x, y));
            const double g2 = q.kernel.radial(std::hypot(x - delta, y));
            return std::max(w1 * g1, w2 * g2) / c;
        };
        return integrate_2d_or_throw(f, two_site_boxes(delta, R), to_quad(opts),
                                     "stdf_numeric");
    }

    Rect bb = bounding_box(q.sites, R);
    std::vector<Rect> boxes;
    const int splits = 4;
    for (int i = 0; i < splits; ++i)
        for (int j = 0; j < splits; ++j)
            boxes.push_back({bb.x0 + bb.width() * i / splits,
                             bb.y0 + bb.height() * j / splits,
                             bb.x0 + bb.width() * (i + 1) / splits,
                             bb.y0 + bb.height() * (j + 1) / splits});
    auto f = [&](double x, double y) {
        double best = 0.0;
        for (size_t j = 0; j < d; ++j) {
            if (q.weights[j] == 0.0) continue;
            const double g = q.kernel.radial(std::hypot(x - q.sites[j].x, y - q.sites[j].y));
            best = std::max(best, q.weights[j] * g);
        }
        return best / c;
    };
    return integrate_2d_or_throw(f, boxes, to_quad(opts), "stdf_numeric");
}

double tail_dep(const Kernel& kernel, double delta, const StdfOptions& opts) {
    StdfQuery q{kernel, {{0.0, 0.0}, {delta, 0.0}}, {1.0, 1.0}};
    return 2.0 - stdf_numeric(q, opts);
}

double cjk_numeric(const Kernel& kernel, double delta, const StdfOptions& opts) {
    const double R = integration_radius(kernel);
    const double c = kernel.normalizing_constant();
    auto f = [&](double x, double y) {
        const double g1 = kernel.radial(std::hypot(x, y));
        const double g2 = kernel.radial(std::hypot(x - delta, y));
        return std::abs(g1 - g2) / c;
    };
    return integrate_2d_or_throw(f, two_site_boxes(delta, R), to_quad(opts),
                                 "cjk_numeric");
}

double cjk_power_compact(double eta, double r, double delta) {
    if (eta <= 0 || r <= 0) throw std::invalid_argument("cjk_power_compact: eta, r > 0");
    if (delta < 0) throw std::invalid_argument("cjk_power_compact: delta >= 0");
    if (delta == 0.0) return 0.0;
    if (delta >= 2.0 * r) return 2.0;
    auto integrand = [&](double phi) {
        const double g = 1.0 - std::max(0.0, 1.0 + delta / (2.0 * r * std::sin(phi)));
        return std::pow(g, eta + 1.0) / (eta + 1.0) -
               std::pow(g, eta + 2.0) / (eta + 2.0);
    };
    QuadOptions qo;
    qo.abs_tol = 1e-12;
    qo.rel_tol = 1e-10;
    // the max() kink sits at sin(phi) = -delta/(2r)
    const double s = std::asin(std::min(1.0, delta / (2.0 * r)));
    double v = 0.0;
    v += integrate_1d_or_throw(integrand, kPi, kPi + s, qo, "cjk_power_compact");
    v += integrate_1d_or_throw(integrand, kPi + s, 2.0 * kPi - s, qo, "cjk_power_compact");
    v += integrate_1d_or_throw(integrand, 2.0 * kPi - s, 2.0 * kPi, qo, "cjk_power_compact");
    return 2.0 * (eta + 1.0) * (eta + 2.0) / kPi * v;
}

double stdf_husler_reiss(double sigma, double delta, double w1, double w2) {
    if (sigma <= 0) throw std::invalid_argument("stdf_husler_reiss: sigma > 0");
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("stdf_husler_reiss: weights >= 0");
    if (w1 == 0.0) return w2;
    if (w2 == 0.0) return w1;
    if (delta == 0.0) return std::max(w1, w2);
    const double lam = delta / sigma;
    return w1 * norm_cdf(lam / 2.0 + std::log(w1 / w2) / lam) +
           w2 * norm_cdf(lam / 2.0 + std::log(w2 / w1) / lam);
}

double stdf_laplace(double lambda, double delta, double w1, double w2) {
    if (lambda <= 0) throw std::invalid_argument("stdf_laplace: lambda > 0");
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("stdf_laplace: weights >= 0");
    if (w1 == 0.0) return w2;
    if (w2 == 0.0) return w1;
    const double g = std::exp(delta / lambda);
    const double ratio = w1 / w2;
    if (ratio > g) return w1;
    if (ratio < 1.0 / g) return w2;
    return w1 + w2 - std::sqrt(w1 * w2 / g);
}

double stdf_marshall_olkin(double r, double delta, double w1, double w2) {
    if (r <= 0) throw std::invalid_argument("stdf_marshall_olkin: r > 0");
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("stdf_marshall_olkin: weights >= 0");
    const double disc = kPi * r * r;
    double lens = 0.0;
    if (delta < 2.0 * r) {
        lens = 2.0 * r * r * std::acos(delta / (2.0 * r)) -
               0.5 * delta * std::sqrt(4.0 * r * r - delta * delta);
    }
    return (disc - lens) / disc * (w1 + w2) + lens / disc * std::max(w1, w2);
}

double stdf_numeric_1d(Kernel1D kind, double param, double delta, double w1,
                       double w2, const StdfOptions& opts) {
    if (param <= 0) throw std::invalid_argument("stdf_numeric_1d: parameter > 0");
    if (w1 < 0 || w2 < 0 || (w1 == 0 && w2 == 0))
        throw std::invalid_argument("stdf_numeric_1d: invalid weights");
    const double lnl = std::log(1e12);
    double R;
    std::function<double(double)> zeta;
    if (kind == Kernel1D::GaussianDensity) {
        const double s = param;
        R = s * std::sqrt(2.0 * lnl);
        zeta = [s](double t) {
            return std::exp(-0.5 * t * t / (s * s)) / (s * std::sqrt(2.0 * kPi));
        };
    } else {
        const double lam = param;
        R = lam * lnl;
        zeta = [lam](double t) { return std::exp(-std::abs(t) / lam) / (2.0 * lam); };
    }
    auto f = [&](double t) { return std::max(w1 * zeta(t), w2 * zeta(t - delta)); };
    QuadOptions qo = {opts.abs_tol, opts.rel_tol, opts.max_subdivisions};
    // pre-split at the site centers and the midpoint, where kinks can sit
    std::vector<double> knots = {-R, 0.0, delta / 2.0, delta, delta + R};
    std::sort(knots.begin(), knots.end());
    double v = 0.0;
    for (size_t i = 0; i + 1 < knots.size(); ++i)
        if (knots[i + 1] > knots[i])
            v += integrate_1d_or_throw(f, knots[i], knots[i + 1], qo, "stdf_numeric_1d");
    return v;
}

double support_bound(const Kernel& kernel, double delta) {
    if (delta < 0) throw std::invalid_argument("support_bound: delta >= 0");
    if (delta == 0.0) return 1.0;
    switch (kernel.family()) {
        case KernelFamily::Exponential:
            return std::exp(delta / kernel.params()[0]);
        case KernelFamily::PoweredExponential: {
            const double alpha = kernel.params()[1];
            if (alpha <= 1.0)
                return std::exp(std::pow(delta / kernel.params()[0], alpha));
            return std::numeric_limits<double>::infinity();
        }
        default:
            return std::numeric_limits<double>::infinity();
    }
}

double ev_copula_cdf(const BivariateStdf& stdf, double u1, double u2) {
    if (!(u1 > 0 && u1 < 1 && u2 > 0 && u2 < 1))
        throw std::invalid_argument("ev_copula_cdf: u in (0,1) required");
    return std::exp(-stdf(-std::log(u1), -std::log(u2)));
}

double ev_copula_density(const BivariateStdf& stdf, double u1, double u2) {
    if (!(u1 > 0 && u1 < 1 && u2 > 0 && u2 < 1))
        throw std::invalid_argument("ev_copula_density: u in (0,1) required");
    const double w1 = -std::log(u1), w2 = -std::log(u2);
    const double h = 1e-4;
    auto d1 = [&](double step) {
        return (stdf(w1 + step, w2) - stdf(w1 - step, w2)) / (2.0 * step);
    };
    auto d2 = [&](double step) {
        return (stdf(w1, w2 + step) - stdf(w1, w2 - step)) / (2.0 * step);
    };
    auto d12 = [&](double step) {
        return (stdf(w1 + step, w2 + step) - stdf(w1 + step, w2 - step) -
                stdf(w1 - step, w2 + step) + stdf(w1 - step, w2 - step)) /
               (4.0 * step * step);
    };
    const double l1 = (4.0 * d1(h / 2) - d1(h)) / 3.0;
    const double l2 = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    const double l12 = (4.0 * d12(h / 2) - d12(h)) / 3.0;
    const double cdf = std::exp(-stdf(w1, w2));
    const double dens = cdf * (l1 * l2 - l12) / (u1 * u2);
    return std::max(0.0, dens);
}

PickandsCurve::PickandsCurve(const Kernel& kernel, double delta, int n_nodes,
                             const StdfOptions& opts) {
    if (n_nodes < 5) throw std::invalid_argument("PickandsCurve: need >= 5 nodes");
    t_.resize(n_nodes);
    a_.resize(n_nodes);
    const SiteSet sites{{0.0, 0.0}, {delta, 0.0}};
    for (int i = 0; i < n_nodes; ++i) {
        const double t = double(i) / (n_nodes - 1);
        t_[i] = t;
        if (i == 0 || i == n_nodes - 1) {
            a_[i] = 1.0;
        } else {
            StdfQuery q{kernel, sites, {1.0 - t, t}};
            a_[i] = stdf_numeric(q, opts);
        }
    }
    // natural cubic spline second derivatives (uniform nodes)
    const int n = n_nodes;
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0);
    const double hgrid = t_[1] - t_[0];
    for (int i = 1; i < n - 1; ++i) {
        diag[i] = 2.0 * (2.0 * hgrid);
        rhs[i] = 6.0 * ((a_[i + 1] - a_[i]) / hgrid - (a_[i] - a_[i - 1]) / hgrid);
    }
    // Thomas algorithm on the interior block
    std::vector<double> cprime(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const double denom = diag[i] - (i > 1 ? hgrid * cprime[i - 1] : 0.0);
        cprime[i] = hgrid / denom;
        rhs[i] = (rhs[i] - (i > 1 ? hgrid * rhs[i - 1] : 0.0)) / denom;
    }
    for (int i = n - 2; i >= 1; --i) m_[i] = rhs[i] - cprime[i] * m_[i + 1];
}

double PickandsCurve::pickands(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const int n = static_cast<int>(t_.size());
    const double hgrid = t_[1] - t_[0];
    int i = std::min(n - 2, static_cast<int>(t / hgrid));
    const double x0 = t_[i], x1 = t_[i + 1];
    const double A = (x1 - t) / hgrid, B = (t - x0) / hgrid;
    return A * a_[i] + B * a_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * hgrid * hgrid / 6.0;
}

double PickandsCurve::operator()(double w1, double w2) const {
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("PickandsCurve: weights >= 0");
    const double s = w1 + w2;
    if (s == 0.0) return 0.0;
    return s * pickands(w2 / s);
}

}  // namespace ccp
