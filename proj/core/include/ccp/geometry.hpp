#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ccp {

/// Planar coordinate; the same length unit is used throughout a model.
struct Site {
    double x = 0.0;
    double y = 0.0;
};

using SiteSet = std::vector<Site>;

inline double distance(const Site& a, const Site& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Regular m x m lattice on (j/(m+1), k/(m+1)), j,k = 1..m.
inline SiteSet lattice_sites(int m) {
    if (m < 2) throw std::invalid_argument("lattice_sites: m must be >= 2");
    SiteSet sites;
    sites.reserve(static_cast<size_t>(m) * m);
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= m; ++k)
            sites.push_back({double(j) / (m + 1), double(k) / (m + 1)});
    return sites;
}

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

inline Rect bounding_box(const SiteSet& sites, double pad = 0.0) {
    if (sites.empty()) throw std::invalid_argument("bounding_box: empty site set");
    Rect r{sites[0].x, sites[0].y, sites[0].x, sites[0].y};
    for (const auto& s : sites) {
        r.x0 = std::min(r.x0, s.x);
        r.y0 = std::min(r.y0, s.y);
        r.x1 = std::max(r.x1, s.x);
        r.y1 = std::max(r.y1, s.y);
    }
    r.x0 -= pad; r.y0 -= pad; r.x1 += pad; r.y1 += pad;
    return r;
}

}  // namespace ccp
