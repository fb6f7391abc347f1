#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qelab/errors.hpp"

namespace qelab {

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
GaussRule gauss_legendre(int order);

inline constexpr int kPanelOrder = 16;
inline constexpr int kDefaultNodes = 256;
inline constexpr double kDefaultQuadTol = 1e-9;
inline constexpr int kMaxQuadNodes = 1 << 16;

// Composite rule for integrals against the Plancherel measure on [0, tau].
// Panels are spread uniformly over each interval between breakpoints.
class PlancherelRule {
public:
    PlancherelRule(int q, int nodes = kDefaultNodes, std::vector<double> breakpoints = {});

    int q() const { return q_; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    // Gauss weight times Plancherel density.
    std::span<const double> weights() const { return weights_; }
    const std::vector<double>& breakpoints() const { return breaks_; }

    template <class F>
    auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R sum{};
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
        return sum;
    }

private:
    int q_;
    std::vector<double> breaks_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class V>
double magnitude(const V& v) {
    double m = 0.0;
    for (const auto& e : v) m = std::max(m, magnitude(e));
    return m;
}
}  // namespace detail

// Fixed-node integral of f against mu.
template <class F>
auto quadrature(F&& f, int q, int nodes = kDefaultNodes, std::vector<double> breakpoints = {}) {
    return PlancherelRule(q, nodes, std::move(breakpoints)).integrate(f);
}

// Doubles the node count until successive results differ by < tol.
template <class F>
auto adaptive_quadrature(F&& f, int q, double tol = kDefaultQuadTol, int nodes = kDefaultNodes,
                         int max_nodes = kMaxQuadNodes, std::vector<double> breakpoints = {}) {
    auto prev = PlancherelRule(q, nodes, breakpoints).integrate(f);
    for (int m = 2 * nodes; m <= max_nodes; m *= 2) {
        auto cur = PlancherelRule(q, m, breakpoints).integrate(f);
        auto diff = cur;
        diff -= prev;
        if (detail::magnitude(diff) < tol) return cur;
        prev = std::move(cur);
    }
    throw ConvergenceError("quadrature did not converge within " + std::to_string(max_nodes) + " nodes");
}

// Plain composite Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_lebesgue(F&& f, double a, double b, int panels = 8) {
    const GaussRule g = gauss_legendre(kPanelOrder);
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < kPanelOrder; ++i) sum += 0.5 * h * g.w[i] * f(lo + 0.5 * h * (g.x[i] + 1.0));
    }
    return sum;
}

}  // namespace qelab
