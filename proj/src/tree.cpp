#include "qelab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qelab/quadrature.hpp"

namespace qelab {

double band_edge(int q) { return 2.0 * std::sqrt(static_cast<double>(q)) / (q + 1); }

double tau(int q) { return std::numbers::pi / std::log(static_cast<double>(q)); }

SpectralParameter tempered_parameter(double s, int q) {
    if (s < 0.0 || s > tau(q)) throw std::invalid_argument("tempered s must lie in [0, tau]");
    SpectralParameter p;
    p.kind = ParameterKind::Tempered;
    p.s = s;
    p.lambda = lambda_from_s(s, q);
    p.sign = p.lambda >= 0.0 ? 1 : -1;
    return p;
}

SpectralParameter untempered_parameter(double t, int sign, int q) {
    if (!(t > 0.0) || t > 0.5 + kTrivialTolerance)
        throw std::invalid_argument("untempered t must lie in (0, 1/2]");
    SpectralParameter p;
    p.t = t;
    p.sign = sign >= 0 ? 1 : -1;
    p.s = p.sign > 0 ? 0.0 : tau(q);
    p.lambda = p.sign * band_edge(q) * std::cosh(t * std::log(static_cast<double>(q)));
    p.kind = std::abs(std::abs(p.lambda) - 1.0) <= kTrivialTolerance ? ParameterKind::Trivial
                                                                     : ParameterKind::Untempered;
    return p;
}

double lambda_from_s(double s, int q) { return band_edge(q) * std::cos(s * std::log(static_cast<double>(q))); }

double lambda_from_s(const SpectralParameter& p, int q) {
    if (p.tempered()) return lambda_from_s(p.s, q);
    return p.sign * band_edge(q) * std::cosh(p.t * std::log(static_cast<double>(q)));
}

SpectralParameter s_from_lambda(double lambda, int q) {
    if (!(std::abs(lambda) <= 1.0 + kTrivialTolerance))
        throw std::invalid_argument("eigenvalue outside [-1, 1]");
    const double b = band_edge(q);
    const double lq = std::log(static_cast<double>(q));
    SpectralParameter p;
    p.lambda = lambda;
    p.sign = lambda >= 0.0 ? 1 : -1;
    if (std::abs(lambda) <= b + kTemperedSlack) {
        p.kind = ParameterKind::Tempered;
        p.s = std::acos(std::clamp(lambda / b, -1.0, 1.0)) / lq;
        return p;
    }
    p.s = p.sign > 0 ? 0.0 : tau(q);
    p.t = std::acosh(std::abs(lambda) / b) / lq;
    p.kind = std::abs(std::abs(lambda) - 1.0) <= kTrivialTolerance ? ParameterKind::Trivial
                                                                   : ParameterKind::Untempered;
    return p;
}

namespace {

// Chebyshev values T_k(x), U_k(x) by recurrence; used where sin(theta) vanishes.
void chebyshev(double x, int k, double& tk, double& uk) {
    double t0 = 1.0, t1 = x, u0 = 1.0, u1 = 2.0 * x;
    if (k == 0) {
        tk = 1.0;
        uk = 1.0;
        return;
    }
    for (int i = 1; i < k; ++i) {
        const double t2 = 2.0 * x * t1 - t0;
        const double u2 = 2.0 * x * u1 - u0;
        t0 = t1;
        t1 = t2;
        u0 = u1;
        u1 = u2;
    }
    tk = t1;
    uk = u1;
}

}  // namespace

double spherical_scaled(double s, int k, int q) {
    if (k < 0) throw std::invalid_argument("sphere index must be >= 0");
    const double theta = s * std::log(static_cast<double>(q));
    const double a = 2.0 / (q + 1);
    const double b = (q - 1.0) / (q + 1);
    const double sn = std::sin(theta);
    if (std::abs(sn) > 1e-6) return a * std::cos(k * theta) + b * std::sin((k + 1) * theta) / sn;
    // Endpoints: sin((k+1)theta)/sin(theta) -> (+-1)^k (k+1).
    double x = std::cos(theta);
    if (s == 0.0) x = 1.0;
    if (s == tau(q)) x = -1.0;
    double tk, uk;
    chebyshev(x, k, tk, uk);
    return a * tk + b * uk;
}

double spherical(double s, int k, int q) {
    return std::pow(static_cast<double>(q), -0.5 * k) * spherical_scaled(s, k, q);
}

double spherical(const SpectralParameter& p, int k, int q) {
    if (p.tempered()) return spherical(p.s, k, q);
    if (k < 0) throw std::invalid_argument("sphere index must be >= 0");
    const double alpha = p.t * std::log(static_cast<double>(q));
    const double sgn = (p.sign < 0 && k % 2 == 1) ? -1.0 : 1.0;
    const double body = 2.0 / (q + 1) * std::cosh(k * alpha) +
                        (q - 1.0) / (q + 1) * std::sinh((k + 1) * alpha) / std::sinh(alpha);
    return sgn * std::pow(static_cast<double>(q), -0.5 * k) * body;
}

double sphere_size(int k, int q) {
    if (k == 0) return 1.0;
    return (q + 1) * std::pow(static_cast<double>(q), k - 1);
}

double plancherel_density(double s, int q) {
    const double lq = std::log(static_cast<double>(q));
    const double theta = s * lq;
    const double sn = std::sin(theta), cs = std::cos(theta);
    const double qq = static_cast<double>(q);
    return 2.0 * qq * (qq + 1) * lq * sn * sn / (std::numbers::pi * ((qq + 1) * (qq + 1) - 4.0 * qq * cs * cs));
}

double kesten_mckay_density(double lambda, int q) {
    const double qq = static_cast<double>(q);
    const double r = 4.0 * qq - (qq + 1) * (qq + 1) * lambda * lambda;
    if (r <= 0.0) return 0.0;
    return std::sqrt(r) / (2.0 * std::numbers::pi * (1.0 - lambda * lambda));
}

double kesten_mckay_cdf(double lambda, int q) {
    const double b = band_edge(q);
    if (lambda <= -b) return 0.0;
    if (lambda >= b) return 1.0;
    // lambda(s) decreases in s, so {lambda' <= lambda} = [s(lambda), tau].
    const double s = std::acos(lambda / b) / std::log(static_cast<double>(q));
    return integrate_lebesgue([q](double u) { return plancherel_density(u, q); }, s, tau(q), 8);
}

}  // namespace qelab
