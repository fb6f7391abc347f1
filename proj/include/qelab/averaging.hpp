#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qelab/graph.hpp"
#include "qelab/quantize.hpp"
#include "qelab/spectral.hpp"

namespace qelab {

// Bond-count matrix A_1 (loops count twice), i.e. (q+1) A.
Eigen::SparseMatrix<double> count_matrix(const RegularGraph& g);

// A_k(x,y) = number of non-backtracking walks of length k from x to y, via
// A_1 A_k = A_{k+1} + q A_{k-1} (k >= 2) and A_1 A_1 = A_2 + (q+1) I.
// Exact in double while counts stay below 2^53.
Eigen::MatrixXd nb_walk_counts(const RegularGraph& g, int k);

// S_k = A_k / ((q+1) q^{k-1}), S_0 = I, through the normalized recursion
// S_{k+1} = ((q+1) A S_k - S_{k-1}) / q.
class SkSequence {
public:
    explicit SkSequence(const RegularGraph& g);
    int k() const { return k_; }
    const Eigen::MatrixXd& current() const { return cur_; }
    void advance();

private:
    const RegularGraph* g_;
    Eigen::SparseMatrix<double> adj_;
    int k_ = 0;
    Eigen::MatrixXd prev_;
    Eigen::MatrixXd cur_;
};

Eigen::MatrixXd s_k_real(const RegularGraph& g, int k);
GraphOperator s_k_matrix(const RegularGraph& g, int k);

// Max discrepancy between sorted eig(S_k) and sorted phi_{s_j}(k).
double sk_spectrum_check(const RegularGraph& g, const SpectralData& sd, int k);
double sk_spectrum_check(const RegularGraph& g, int k);

// (1/T^2) sum_{k<T} sum_{j<T} S_{stride |k-j|}.
Eigen::MatrixXd ergodic_avg_operator(const RegularGraph& g, int T, int stride);

// Spectral norm of a symmetric operator on the complement of constants.
double operator_norm_mean_zero(const Eigen::MatrixXd& op);

// (1/n) <a, op a>; throws unless sum(a) vanishes to 1e-10.
double mean_zero_quadratic_form(const Eigen::MatrixXd& op, const Eigen::VectorXd& a);

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double prefactor = 0.0;
    int points = 0;
};

// Least squares for log y = log C + p log x.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ErgodicDecay {
    std::vector<int> T;
    std::vector<double> norms;
    PowerLawFit fit;
    double beta = 0.0;
    // max over T of norm * T * beta; the empirical constant C
    double fitted_constant = 0.0;
};

ErgodicDecay ergodic_decay(const RegularGraph& g, const std::vector<int>& Ts, int stride, double beta);

struct UntemperedDecay {
    double beta_s = 0.5;   // 1/2 - max |Im s| over nontrivial untempered s_j
    double constant = 0.0; // max over j, k <= kmax of |phi_{s_j}(k)| q^{beta_s k}
    int untempered = 0;
};

UntemperedDecay untempered_decay(const SpectralData& sd, int kmax);

}  // namespace qelab
