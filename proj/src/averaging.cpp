#include "qelab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qelab/tree.hpp"

namespace qelab {

Eigen::SparseMatrix<double> count_matrix(const RegularGraph& g) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(g.num_bonds());
    for (Bond e = 0; e < static_cast<Bond>(g.num_bonds()); ++e) entries.emplace_back(g.origin(e), g.terminus(e), 1.0);
    Eigen::SparseMatrix<double> m(g.n(), g.n());
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

Eigen::MatrixXd nb_walk_counts(const RegularGraph& g, int k) {
    if (k < 0) throw std::invalid_argument("walk length must be non-negative");
    const int n = g.n();
    Eigen::MatrixXd prev = Eigen::MatrixXd::Identity(n, n);
    if (k == 0) return prev;
    const auto a1 = count_matrix(g);
    Eigen::MatrixXd cur = a1;
    for (int j = 1; j < k; ++j) {
        // the j = 1 step subtracts (q+1) I rather than q I
        const double back = j == 1 ? g.q() + 1.0 : static_cast<double>(g.q());
        Eigen::MatrixXd next = a1 * cur - back * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

SkSequence::SkSequence(const RegularGraph& g)
    : g_(&g), adj_(count_matrix(g) / (g.q() + 1.0)), prev_(), cur_(Eigen::MatrixXd::Identity(g.n(), g.n())) {}

void SkSequence::advance() {
    if (k_ == 0) {
        prev_ = std::move(cur_);
        cur_ = adj_;
    } else {
        const double q = g_->q();
        Eigen::MatrixXd next = ((q + 1.0) * (adj_ * cur_) - prev_) / q;
        prev_ = std::move(cur_);
        cur_ = std::move(next);
    }
    ++k_;
}

Eigen::MatrixXd s_k_real(const RegularGraph& g, int k) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    SkSequence seq(g);
    while (seq.k() < k) seq.advance();
    return seq.current();
}

GraphOperator s_k_matrix(const RegularGraph& g, int k) {
    return {s_k_real(g, k).cast<cplx>(), "S_" + std::to_string(k)};
}

double sk_spectrum_check(const RegularGraph& g, const SpectralData& sd, int k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s_k_real(g, k), Eigen::EigenvaluesOnly);
    std::vector<double> direct(solver.eigenvalues().data(), solver.eigenvalues().data() + g.n());
    std::vector<double> predicted;
    predicted.reserve(sd.params.size());
    for (const auto& p : sd.params) predicted.push_back(spherical(p, k, g.q()));
    std::sort(direct.begin(), direct.end());
    std::sort(predicted.begin(), predicted.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::abs(direct[i] - predicted[i]));
    return worst;
}

double sk_spectrum_check(const RegularGraph& g, int k) {
    return sk_spectrum_check(g, eig(adjacency_operator(g), g.q()), k);
}

Eigen::MatrixXd ergodic_avg_operator(const RegularGraph& g, int T, int stride) {
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    if (stride != 1 && stride != 2) throw std::invalid_argument("stride must be 1 or 2");
    // sum over k, j < T of S_{stride |k-j|} = T S_0 + sum_{m >= 1} 2 (T - m) S_{stride m}
    SkSequence seq(g);
    Eigen::MatrixXd acc = static_cast<double>(T) * seq.current();
    for (int m = 1; m < T; ++m) {
        for (int s = 0; s < stride; ++s) seq.advance();
        acc += 2.0 * (T - m) * seq.current();
    }
    return acc / (static_cast<double>(T) * T);
}

double operator_norm_mean_zero(const Eigen::MatrixXd& op) {
    const Eigen::Index n = op.rows();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::MatrixXd restricted = proj * op * proj;
    restricted = 0.5 * (restricted + restricted.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(restricted, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double mean_zero_quadratic_form(const Eigen::MatrixXd& op, const Eigen::VectorXd& a) {
    if (std::abs(a.sum()) > 1e-10) throw std::invalid_argument("observable is not mean-zero");
    return a.dot(op * a) / static_cast<double>(a.size());
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("power-law fit needs two or more points");
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double var = sxx - sx * sx / m;
    PowerLawFit f;
    f.points = static_cast<int>(x.size());
    f.exponent = (sxy - sx * sy / m) / var;
    const double intercept = (sy - f.exponent * sx) / m;
    f.prefactor = std::exp(intercept);
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = std::log(y[i]) - intercept - f.exponent * std::log(x[i]);
            rss += r * r;
        }
        f.exponent_stderr = std::sqrt(rss / (m - 2.0) / var);
    }
    return f;
}

ErgodicDecay ergodic_decay(const RegularGraph& g, const std::vector<int>& Ts, int stride, double beta) {
    ErgodicDecay d;
    d.T = Ts;
    d.beta = beta;
    std::vector<double> xs;
    for (int T : Ts) {
        const double norm = operator_norm_mean_zero(ergodic_avg_operator(g, T, stride));
        d.norms.push_back(norm);
        xs.push_back(T);
        d.fitted_constant = std::max(d.fitted_constant, norm * T * beta);
    }
    if (Ts.size() >= 2) d.fit = fit_power_law(xs, d.norms);
    return d;
}

UntemperedDecay untempered_decay(const SpectralData& sd, int kmax) {
    UntemperedDecay u;
    const double q = sd.q;
    std::vector<const SpectralParameter*> kept;
    for (const auto& p : sd.params) {
        if (p.tempered() || std::abs(std::abs(lambda_from_s(p, sd.q)) - 1.0) <= kBipartiteTolerance) continue;
        kept.push_back(&p);
        u.beta_s = std::min(u.beta_s, 0.5 - p.t);
    }
    u.untempered = static_cast<int>(kept.size());
    for (const auto* p : kept)
        for (int k = 0; k <= kmax; ++k)
            u.constant = std::max(u.constant, std::abs(spherical(*p, k, sd.q)) * std::pow(q, u.beta_s * k));
    return u;
}

}  // namespace qelab
