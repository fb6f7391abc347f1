#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qelab/graph.hpp"
#include "qelab/quantize.hpp"
#include "qelab/spectral.hpp"
#include "qelab/symbol.hpp"

namespace qelab {

enum class ObservableKind { Rademacher, SetIndicator, BipartiteBalanced };

ObservableKind parse_observable(const std::string& name);
std::string observable_name(ObservableKind kind);

// Mean-zero (or per-side mean-zero) vertex function with sup norm <= 1.
Eigen::VectorXd make_observable(const RegularGraph& g, ObservableKind kind, std::uint64_t seed);

// (1/N) sum over the window of |<psi_j, a psi_j>|^2.
double quantum_variance(const SpectralData& sd, const SpectralWindow& w, const Eigen::VectorXd& a);

// (1/N) sum over the window of |<psi_j, op psi_j> - mean|^2.
double general_variance(const SpectralData& sd, const SpectralWindow& w, const Eigen::MatrixXd& op, double mean);
double general_variance(const SpectralData& sd, const SpectralWindow& w, const GraphOperator& op, cplx mean);
// Same statistic for op = S_k through <psi_j, S_k psi_j> = phi_{s_j}(k).
double sk_variance_spherical(const SpectralData& sd, const SpectralWindow& w, int k, double s0);
// <psi_j, S_k psi_j> over the window, applying S_k by sparse recursion (no dense S_k).
Eigen::VectorXd sk_diagonal(const RegularGraph& g, const SpectralData& sd, const SpectralWindow& w, int k);

// (1/n) <a, E a> for the ergodic average E of ergodic_avg_operator, by vector recursion.
double ergodic_quadratic_form(const RegularGraph& g, int T, int stride, const Eigen::VectorXd& a);

struct EgorovRow {
    double r = 0.0;
    double residual_sq = 0.0;  // |[A, Op(a)] - Op(c)|_HS^2
    double mass = 0.0;         // sum_x integral |a|^2
    double short_mass = 0.0;   // same over rho(x) <= r + 2
    double bound_shape = 0.0;  // (mass + q^{r+2} short_mass) / r^2
    double ratio = 0.0;
};

std::vector<EgorovRow> egorov_experiment(const CylinderSymbol& a, const Profile& phi, const std::vector<double>& rs,
                                         const QuantizeOptions& base);

struct ProductRow {
    double r = 0.0;
    double residual_sq = 0.0;   // |Op(a phi) - Op(a) Op(phi)|_HS^2
    double profile_mass = 0.0;  // integral phi^2 dmu
    int short_count = 0;        // |{x : rho(x) <= r + D}|
    double bound_shape = 0.0;   // profile_mass (n + short_count q^{r+D}) / r
    double ratio = 0.0;
};

// `a` must have kernel range at most `range` at profile 1.
std::vector<ProductRow> product_experiment(const CylinderSymbol& a, int range, const Profile& phi,
                                           const std::vector<double>& rs, const QuantizeOptions& base);

struct ChinRow {
    double r = 0.0;
    double delta = 0.0;
    double residual = 0.0;  // max_j |Op(chi) psi_j - chi(s_j) psi_j| over tempered j
};

double chin_residual(const RegularGraph& g, const SpectralData& sd, const Profile& chi, const QuantizeOptions& opt);
std::vector<ChinRow> chin_experiment(const RegularGraph& g, const SpectralData& sd, double s0, double delta,
                                     const std::vector<double>& rs, const QuantizeOptions& base);

}  // namespace qelab
