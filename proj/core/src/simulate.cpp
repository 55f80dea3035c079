#include "ccp/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ccp/rng.hpp"

namespace ccp {

namespace {

// stream tags for deriving independent sub-seeds from one master seed
constexpr std::uint64_t kStreamCauchy = 0x10;
constexpr std::uint64_t kStreamGaussian = 0x20;
constexpr std::uint64_t kStreamEv = 0x30;

void check_n(int n) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
}

void check_grid(const SimGrid& grid, const SiteSet& sites, const Kernel& kernel) {
    if (grid.m < 2) throw std::invalid_argument("simulate: grid.m must be >= 2");
    if (grid.m < 50)
        std::cerr << "warning: simulation grid m=" << grid.m
                  << " is below the recommended minimum of 50\n";
    const double r = kernel.support_radius();
    const Rect need = bounding_box(sites, r);
    const double eps = 1e-9;
    if (grid.extent.x0 > need.x0 + eps || grid.extent.y0 > need.y0 + eps ||
        grid.extent.x1 < need.x1 - eps || grid.extent.y1 < need.y1 - eps) {
        std::ostringstream os;
        os << "simulate: grid extent [" << grid.extent.x0 << "," << grid.extent.x1
           << "]x[" << grid.extent.y0 << "," << grid.extent.y1
           << "] does not cover the sites expanded by the support radius " << r;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

SimGrid SimGrid::default_for(const SiteSet& sites, const Kernel& kernel, int m) {
    SimGrid g;
    g.extent = bounding_box(sites, kernel.support_radius());
    g.m = m;
    return g;
}

double GaussianModel::correlation(double delta) const {
    if (delta == 0.0) return 1.0;
    return (1.0 - tau) * std::exp(-rate * std::pow(delta, alpha));
}

void GaussianModel::validate() const {
    if (!(rate > 0)) throw std::invalid_argument("GaussianModel: rate must be > 0");
    if (!(alpha > 0 && alpha <= 2))
        throw std::invalid_argument("GaussianModel: alpha must be in (0,2]");
    if (!(tau >= 0 && tau <= 1))
        throw std::invalid_argument("GaussianModel: tau must be in [0,1]");
}

std::string scale_name(Scale s) {
    switch (s) {
        case Scale::Raw: return "raw";
        case Scale::Uniform: return "uniform";
        case Scale::StandardCauchy: return "standard-cauchy";
    }
    throw std::logic_error("unknown scale");
}

Scale scale_from_name(const std::string& name) {
    if (name == "raw") return Scale::Raw;
    if (name == "uniform") return Scale::Uniform;
    if (name == "standard-cauchy") return Scale::StandardCauchy;
    throw std::invalid_argument("unknown scale '" + name + "'");
}

std::vector<double> ReplicateMatrix::column(int j) const {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = at(i, j);
    return col;
}

ReplicateMatrix simulate_cauchy(const Kernel& kernel, const SiteSet& sites,
                                const SimGrid& grid, int n, std::uint64_t seed) {
    check_n(n);
    if (sites.empty()) throw std::invalid_argument("simulate_cauchy: no sites");
    check_grid(grid, sites, kernel);

    const int m = grid.m;
    const double area = grid.cell_area();
    const double hx = grid.cell_width(), hy = grid.cell_height();
    const size_t ncells = size_t(m) * m;
    const int d = static_cast<int>(sites.size());

    // per-site sparse rows of k(s_j, cell) * area over the grid cells
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(d);
    const double r = kernel.support_radius();
    for (int j = 0; j < d; ++j) {
        for (int kx = 0; kx < m; ++kx) {
            const double cx = grid.extent.x0 + (kx + 0.5) * hx;
            if (std::abs(cx - sites[j].x) > r + hx) continue;
            for (int ky = 0; ky < m; ++ky) {
                const double cy = grid.extent.y0 + (ky + 0.5) * hy;
                const double v = kernel.eval(sites[j], {cx, cy});
                if (v > 0.0)
                    rows[j].emplace_back(std::uint32_t(kx * m + ky), v * area);
            }
        }
    }

    ReplicateMatrix out;
    out.n = n;
    out.d = d;
    out.sites = sites;
    out.scale = Scale::Raw;
    out.values.assign(size_t(n) * d, 0.0);

    std::vector<double> noise(ncells);
    const std::uint64_t stream = derive_seed(seed, kStreamCauchy);
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(stream, std::uint64_t(i)));
        for (auto& w : noise) w = rng.cauchy();
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (const auto& [idx, kw] : rows[j]) acc += kw * noise[idx];
            out.at(i, j) = acc;
        }
    }
    return out;
}

double grid_marginal_scale(const Kernel& kernel, const Site& site,
                           const SimGrid& grid) {
    const double area = grid.cell_area();
    const double hx = grid.cell_width(), hy = grid.cell_height();
    double scale = 0.0;
    for (int kx = 0; kx < grid.m; ++kx) {
        const double cx = grid.extent.x0 + (kx + 0.5) * hx;
        for (int ky = 0; ky < grid.m; ++ky) {
            const double cy = grid.extent.y0 + (ky + 0.5) * hy;
            scale += kernel.eval(site, {cx, cy}) * area;
        }
    }
    return scale;
}

ReplicateMatrix simulate_gaussian(const GaussianModel& model,
                                  const SiteSet& sites, int n,
                                  std::uint64_t seed) {
    check_n(n);
    model.validate();
    const int d = static_cast<int>(sites.size());
    if (d < 1) throw std::invalid_argument("simulate_gaussian: no sites");

    Eigen::MatrixXd corr(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            corr(j, k) = j == k ? 1.0
                                : model.correlation(distance(sites[j], sites[k]));
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "simulate_gaussian: correlation matrix not positive definite for "
              "(rate=" << model.rate << ", alpha=" << model.alpha
           << ", tau=" << model.tau << ")";
        throw std::invalid_argument(os.str());
    }
    const Eigen::MatrixXd L = llt.matrixL();

    ReplicateMatrix out;
    out.n = n;
    out.d = d;
    out.sites = sites;
    out.scale = Scale::Raw;
    out.values.assign(size_t(n) * d, 0.0);

    const std::uint64_t stream = derive_seed(seed, kStreamGaussian);
    Eigen::VectorXd z(d);
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(stream, std::uint64_t(i)));
        for (int j = 0; j < d; ++j) z(j) = rng.normal();
        const Eigen::VectorXd x = L * z;
        for (int j = 0; j < d; ++j) out.at(i, j) = x(j);
    }
    return out;
}

ReplicateMatrix simulate_mixture(const MixtureModel& model, const SiteSet& sites,
                                 const SimGrid& grid, int n, std::uint64_t seed) {
    if (model.beta < 0) throw std::invalid_argument("simulate_mixture: beta >= 0");
    ReplicateMatrix z = simulate_cauchy(model.kernel, sites, grid, n, seed);
    if (model.beta > 0.0) {
        const ReplicateMatrix g = simulate_gaussian(model.gaussian, sites, n, seed);
        for (size_t i = 0; i < z.values.size(); ++i)
            z.values[i] += model.beta * g.values[i];
    }
    return z;
}

ReplicateMatrix simulate_ev(const Kernel& kernel, const SiteSet& sites, int n,
                            std::uint64_t seed, const EvOptions& opts) {
    check_n(n);
    const int d = static_cast<int>(sites.size());
    if (d < 1) throw std::invalid_argument("simulate_ev: no sites");

    const double r = kernel.support_radius();
    const Rect region = bounding_box(sites, r);
    const double area = region.area();
    const double zeta_max = kernel.max_value() / kernel.normalizing_constant();

    ReplicateMatrix out;
    out.n = n;
    out.d = d;
    out.sites = sites;
    out.scale = Scale::Raw;
    out.values.assign(size_t(n) * d, 0.0);

    const std::uint64_t stream = derive_seed(seed, kStreamEv);
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(stream, std::uint64_t(i)));
        std::vector<double> z(d, 0.0);
        double gamma = 0.0;
        long count = 0;
        while (true) {
            gamma += rng.exponential();
            const double intensity = area / gamma;
            double zmin = z[0];
            for (int j = 1; j < d; ++j) zmin = std::min(zmin, z[j]);
            if (intensity * zeta_max <= zmin) break;
            if (++count > opts.max_points)
                throw std::runtime_error(
                    "simulate_ev: Poisson point cap exceeded before the stopping "
                    "rule triggered");
            const Site loc{rng.uniform(region.x0, region.x1),
                           rng.uniform(region.y0, region.y1)};
            for (int j = 0; j < d; ++j)
                z[j] = std::max(z[j], intensity * kernel.zeta(sites[j], loc));
        }
        for (int j = 0; j < d; ++j) out.at(i, j) = z[j];
    }
    return out;
}

std::vector<double> midranks(const std::vector<double>& col) {
    const size_t n = col.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return col[a] < col[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && col[order[j + 1]] == col[order[i]]) ++j;
        const double avg = 0.5 * double(i + j) + 1.0;  // midrank, 1-based
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

ReplicateMatrix to_uniform(const ReplicateMatrix& m) {
    if (m.n < 2) throw std::invalid_argument("to_uniform: need n >= 2");
    ReplicateMatrix out = m;
    out.scale = Scale::Uniform;
    for (int j = 0; j < m.d; ++j) {
        const std::vector<double> ranks = midranks(m.column(j));
        for (int i = 0; i < m.n; ++i) out.at(i, j) = ranks[i] / (m.n + 1.0);
    }
    return out;
}

}  // namespace ccp
