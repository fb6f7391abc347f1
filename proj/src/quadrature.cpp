#include "qelab/quadrature.hpp"

#include <numbers>
#include <stdexcept>

#include "qelab/tree.hpp"

namespace qelab {

GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
    GaussRule r;
    r.x.resize(order);
    r.w.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[i] = -x;
        r.x[order - 1 - i] = x;
        r.w[i] = r.w[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

PlancherelRule::PlancherelRule(int q, int nodes, std::vector<double> breakpoints) : q_(q) {
    if (nodes < kPanelOrder) throw std::invalid_argument("quadrature needs at least 16 nodes");
    const double t = tau(q);
    breaks_.push_back(0.0);
    for (double b : breakpoints)
        if (b > 0.0 && b < t) breaks_.push_back(b);
    breaks_.push_back(t);
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());

    const int panels = std::max<int>((nodes + kPanelOrder - 1) / kPanelOrder, static_cast<int>(breaks_.size()) - 1);
    const GaussRule g = gauss_legendre(kPanelOrder);
    // Distribute panels proportionally to interval length, at least one each.
    const int intervals = static_cast<int>(breaks_.size()) - 1;
    std::vector<int> count(intervals, 1);
    int left = panels - intervals;
    for (int k = 0; k < intervals && left > 0; ++k) {
        const int extra = static_cast<int>(std::floor((breaks_[k + 1] - breaks_[k]) / t * (panels - intervals)));
        const int take = std::min(extra, left);
        count[k] += take;
        left -= take;
    }
    for (int k = 0; left > 0; k = (k + 1) % intervals, --left) ++count[k];

    nodes_.reserve(static_cast<std::size_t>(panels) * kPanelOrder);
    weights_.reserve(nodes_.capacity());
    for (int k = 0; k < intervals; ++k) {
        const double h = (breaks_[k + 1] - breaks_[k]) / count[k];
        for (int p = 0; p < count[k]; ++p) {
            const double lo = breaks_[k] + p * h;
            for (int i = 0; i < kPanelOrder; ++i) {
                const double s = lo + 0.5 * h * (g.x[i] + 1.0);
                nodes_.push_back(s);
                weights_.push_back(0.5 * h * g.w[i] * plancherel_density(s, q));
            }
        }
    }
}

}  // namespace qelab
