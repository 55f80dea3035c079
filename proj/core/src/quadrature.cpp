#include "ccp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace ccp {

namespace {

// G7/K15 nodes on [0,1] (abscissa, Gauss weight, Kronrod weight).
// Gauss weight 0 marks Kronrod-only nodes.
constexpr double kGK[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct Panel {
    double a, b, value, error;
};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double g7 = kGK[0][1] * f0;
    double k15 = kGK[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGK[i][0];
        const double fi = f(c + dx) + f(c - dx);
        g7 += kGK[i][1] * fi;
        k15 += kGK[i][2] * fi;
    }
    value = k15 * h;
    error = std::abs((k15 - g7) * h);
}

struct Box {
    Rect r;
    double value, error;
};

// 15x15 tensor product of the K15 rule, with the embedded G7 tensor rule
// supplying the error estimate.
void gk15_2d(const std::function<double(double, double)>& f, const Rect& r,
             double& value, double& error) {
    double xs[15], wgx[15], wkx[15];
    double ys[15], wgy[15], wky[15];
    const double cx = 0.5 * (r.x0 + r.x1), hx = 0.5 * r.width();
    const double cy = 0.5 * (r.y0 + r.y1), hy = 0.5 * r.height();
    int idx = 0;
    for (int i = 0; i < 8; ++i) {
        xs[idx] = cx + hx * kGK[i][0];
        ys[idx] = cy + hy * kGK[i][0];
        wgx[idx] = kGK[i][1]; wkx[idx] = kGK[i][2];
        wgy[idx] = kGK[i][1]; wky[idx] = kGK[i][2];
        ++idx;
        if (i > 0) {
            xs[idx] = cx - hx * kGK[i][0];
            ys[idx] = cy - hy * kGK[i][0];
            wgx[idx] = kGK[i][1]; wkx[idx] = kGK[i][2];
            wgy[idx] = kGK[i][1]; wky[idx] = kGK[i][2];
            ++idx;
        }
    }
    double k2 = 0.0, g2 = 0.0;
    for (int i = 0; i < 15; ++i) {
        double rowk = 0.0, rowg = 0.0;
        for (int j = 0; j < 15; ++j) {
            const double v = f(xs[i], ys[j]);
            rowk += wky[j] * v;
            rowg += wgy[j] * v;
        }
        k2 += wkx[i] * rowk;
        g2 += wgx[i] * rowg;
    }
    value = k2 * hx * hy;
    error = std::abs((k2 - g2) * hx * hy);
}

}  // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, const QuadOptions& opts) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    auto cmp = [](const Panel& p, const Panel& q) { return p.error < q.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    Panel p0{a, b, 0, 0};
    gk15(f, a, b, p0.value, p0.error);
    res.evals = 15;
    heap.push(p0);
    double total = p0.value, toterr = p0.error;
    long n = 1;
    while (toterr > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           n < opts.max_subdivisions) {
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        Panel l{p.a, m, 0, 0}, r{m, p.b, 0, 0};
        gk15(f, l.a, l.b, l.value, l.error);
        gk15(f, r.a, r.b, r.value, r.error);
        res.evals += 30;
        total += l.value + r.value - p.value;
        toterr += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    res.value = total;
    res.error = toterr;
    res.converged = toterr <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return res;
}

QuadResult integrate_2d(const std::function<double(double, double)>& f,
                        const std::vector<Rect>& initial_boxes,
                        const QuadOptions& opts) {
    QuadResult res;
    auto cmp = [](const Box& p, const Box& q) { return p.error < q.error; };
    std::priority_queue<Box, std::vector<Box>, decltype(cmp)> heap(cmp);
    double total = 0.0, toterr = 0.0;
    for (const Rect& r : initial_boxes) {
        if (r.area() <= 0.0) continue;
        Box b{r, 0, 0};
        gk15_2d(f, r, b.value, b.error);
        res.evals += 225;
        total += b.value;
        toterr += b.error;
        heap.push(b);
    }
    long n = static_cast<long>(heap.size());
    while (!heap.empty() &&
           toterr > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           n < opts.max_subdivisions) {
        Box b = heap.top();
        heap.pop();
        Rect left = b.r, right = b.r;
        if (b.r.width() >= b.r.height()) {
            const double m = 0.5 * (b.r.x0 + b.r.x1);
            left.x1 = m;
            right.x0 = m;
        } else {
            const double m = 0.5 * (b.r.y0 + b.r.y1);
            left.y1 = m;
            right.y0 = m;
        }
        Box lb{left, 0, 0}, rb{right, 0, 0};
        gk15_2d(f, left, lb.value, lb.error);
        gk15_2d(f, right, rb.value, rb.error);
        res.evals += 450;
        total += lb.value + rb.value - b.value;
        toterr += lb.error + rb.error - b.error;
        heap.push(lb);
        heap.push(rb);
        ++n;
    }
    res.value = total;
    res.error = toterr;
    res.converged = toterr <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return res;
}

}  // namespace ccp
