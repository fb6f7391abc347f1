#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "qelab/graph.hpp"
#include "qelab/quantize.hpp"
#include "qelab/tree.hpp"

namespace qelab {

enum class BasisMode { Solver, Randomized };

struct EigOptions {
    BasisMode basis = BasisMode::Solver;
    std::uint64_t seed = 0;
    double cluster_tol = 1e-9;
};

struct SpectralData {
    int q = 2;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, orthonormal
    std::vector<SpectralParameter> params;
    double gap = 0.0;
    bool bipartite = false;

    Eigen::Index size() const { return eigenvalues.size(); }
};

inline constexpr double kBipartiteTolerance = 1e-8;

SpectralData eig(const Eigen::MatrixXd& a, int q, const EigOptions& opt = {});
// Real symmetric operators only; a nonzero imaginary part is rejected.
SpectralData eig(const GraphOperator& a, int q, const EigOptions& opt = {});
// Spectral data without eigenvectors, e.g. synthetic spectra.
SpectralData spectrum_only(Eigen::VectorXd eigenvalues, int q);

struct GapReport {
    double beta = 0.0;
    double one_sided = 0.0;       // 1 - lambda_2
    double benchmark = 0.0;       // 1 - 2 sqrt(q)/(q+1)
    bool exp_holds = false;
    bool bipartite_mode = false;
};

GapReport spectral_gap(const SpectralData& sd, bool bipartite_mode = false);

struct SpectralWindow {
    double s0 = 0.0;
    double delta = 0.0;
    std::vector<Eigen::Index> indices;

    std::size_t count() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

SpectralWindow window(const SpectralData& sd, double s0, double delta);

struct WindowCheck {
    std::size_t count = 0;
    double linear_prediction = 0.0;    // 2 n delta |c(s0)|^{-2}
    double integral_prediction = 0.0;  // n mu(I)
    double ratio_linear = 0.0;
    double ratio_integral = 0.0;
    bool clipped = false;              // window reaches past [0, tau]

    double ratio() const { return clipped ? ratio_integral : ratio_linear; }
};

WindowCheck kesten_mckay_window_check(const SpectralData& sd, double s0, double delta);

// Kolmogorov-Smirnov distance between the empirical spectral law and Kesten-McKay.
double ks_distance_km(const Eigen::VectorXd& eigenvalues, int q);

struct WeylTrace {
    double eigen_side = 0.0;    // sum_j chi(s_j)^2 over tempered j
    double measure_side = 0.0;  // n * integral chi^2 dmu
    double trace_side = 0.0;    // tr Op(chi)^2
};

WeylTrace weyl_trace_check(const RegularGraph& g, const SpectralData& sd, const Profile& chi,
                           const QuantizeOptions& opt);

void write_spectrum_csv(std::ostream& os, const SpectralData& sd, const SpectralWindow* win = nullptr);

}  // namespace qelab
