#include "qelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <lapacke.h>

#include "qelab/errors.hpp"
#include "qelab/quadrature.hpp"
#include "qelab/rng.hpp"

namespace qelab {

namespace {

void randomize_clusters(SpectralData& sd, const EigOptions& opt) {
    Rng rng(opt.seed);
    const Eigen::Index n = sd.size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && sd.eigenvalues(end) - sd.eigenvalues(end - 1) <= opt.cluster_tol) ++end;
        const Eigen::Index k = end - start;
        if (k > 1) {
            Eigen::MatrixXd gauss(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j) gauss(i, j) = rng.normal();
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
            Eigen::MatrixXd rot = qr.householderQ();
            sd.eigenvectors.middleCols(start, k) = sd.eigenvectors.middleCols(start, k) * rot;
        }
        start = end;
    }
}

void fill_parameters(SpectralData& sd) {
    sd.params.resize(sd.size());
    for (Eigen::Index j = 0; j < sd.size(); ++j)
        sd.params[j] = s_from_lambda(std::clamp(sd.eigenvalues(j), -1.0, 1.0), sd.q);
    sd.bipartite = sd.size() > 0 && std::abs(sd.eigenvalues(0) + 1.0) <= kBipartiteTolerance;
}

}  // namespace

SpectralData eig(const Eigen::MatrixXd& a, int q, const EigOptions& opt) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig needs a square matrix");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eig needs a symmetric matrix");
    SpectralData sd;
    sd.q = q;
    const lapack_int n = static_cast<lapack_int>(a.rows());
    sd.eigenvectors = a;
    sd.eigenvalues.resize(n);
    if (n > 0) {
        const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, sd.eigenvectors.data(), n,
                                               sd.eigenvalues.data());
        if (info < 0) throw std::invalid_argument("dsyevd: invalid argument " + std::to_string(-info));
        if (info > 0) throw ConvergenceError("dsyevd failed to converge (info " + std::to_string(info) + ")");
    }
    if (opt.basis == BasisMode::Randomized) randomize_clusters(sd, opt);
    fill_parameters(sd);
    if (n >= 2 && sd.eigenvalues(n - 2) < 1.0 - 1e-9) sd.gap = spectral_gap(sd, sd.bipartite).beta;
    return sd;
}

SpectralData eig(const GraphOperator& a, int q, const EigOptions& opt) {
    if (a.matrix.size() > 0 && a.matrix.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.matrix.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("eig needs a real symmetric operator");
    return eig(Eigen::MatrixXd(a.matrix.real()), q, opt);
}

SpectralData spectrum_only(Eigen::VectorXd eigenvalues, int q) {
    SpectralData sd;
    sd.q = q;
    std::sort(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    sd.eigenvalues = std::move(eigenvalues);
    fill_parameters(sd);
    return sd;
}

GapReport spectral_gap(const SpectralData& sd, bool bipartite_mode) {
    const Eigen::Index n = sd.size();
    if (n < 2) throw std::invalid_argument("spectral gap needs at least two eigenvalues");
    const double l2 = sd.eigenvalues(n - 2);
    if (l2 >= 1.0 - 1e-9) throw std::invalid_argument("graph is disconnected: eigenvalue 1 is not simple");
    GapReport r;
    r.bipartite_mode = bipartite_mode;
    r.one_sided = 1.0 - l2;
    r.benchmark = 1.0 - band_edge(sd.q);
    Eigen::Index low = 0;
    if (bipartite_mode && std::abs(sd.eigenvalues(0) + 1.0) <= kBipartiteTolerance) low = 1;
    const double bottom = low < n - 1 ? 1.0 + sd.eigenvalues(low) : r.one_sided;
    r.beta = std::min(r.one_sided, bottom);
    r.exp_holds = r.beta > 1e-9;
    return r;
}

SpectralWindow window(const SpectralData& sd, double s0, double delta) {
    const double t = tau(sd.q);
    if (!(s0 > 0.0 && s0 < t)) throw std::invalid_argument("window centre must lie in (0, tau)");
    if (!(delta > 0.0)) throw std::invalid_argument("window half-width must be positive");
    SpectralWindow w{s0, delta, {}};
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        const auto& p = sd.params[j];
        if (p.tempered() && p.s >= s0 - delta && p.s <= s0 + delta) w.indices.push_back(j);
    }
    return w;
}

WindowCheck kesten_mckay_window_check(const SpectralData& sd, double s0, double delta) {
    const auto w = window(sd, s0, delta);
    const double n = static_cast<double>(sd.size());
    const double t = tau(sd.q);
    WindowCheck c;
    c.count = w.count();
    c.linear_prediction = 2.0 * n * delta * plancherel_density(s0, sd.q);
    const double lo = std::max(0.0, s0 - delta), hi = std::min(t, s0 + delta);
    c.clipped = s0 - delta < 0.0 || s0 + delta > t;
    const int q = sd.q;
    c.integral_prediction = n * integrate_lebesgue([q](double s) { return plancherel_density(s, q); }, lo, hi, 32);
    c.ratio_linear = c.count / c.linear_prediction;
    c.ratio_integral = c.count / c.integral_prediction;
    return c;
}

double ks_distance_km(const Eigen::VectorXd& eigenvalues, int q) {
    std::vector<double> v(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = kesten_mckay_cdf(v[i], q);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

WeylTrace weyl_trace_check(const RegularGraph& g, const SpectralData& sd, const Profile& chi,
                           const QuantizeOptions& opt) {
    WeylTrace w;
    for (const auto& p : sd.params)
        if (p.tempered()) {
            const double c = chi ? chi(p.s) : 1.0;
            w.eigen_side += c * c;
        }
    w.measure_side =
        g.n() * adaptive_quadrature(
                    [&](double s) {
                        const double c = chi ? chi(s) : 1.0;
                        return c * c;
                    },
                    g.q(), opt.quad_tol, opt.nodes, opt.max_nodes, opt.breakpoints);
    const Eigen::MatrixXd op = radial_multiplier(g, chi, opt);
    w.trace_side = op.squaredNorm();
    return w;
}

void write_spectrum_csv(std::ostream& os, const SpectralData& sd, const SpectralWindow* win) {
    std::vector<char> member(sd.size(), 0);
    if (win)
        for (auto j : win->indices) member[j] = 1;
    fmt::print(os, "j,lambda,s,tempered,window_member\n");
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        const auto& p = sd.params[j];
        const std::string s = p.tempered() ? fmt::format("{:.17g}", p.s) : fmt::format("{:.17g}{:+.17g}i", p.s, p.t);
        fmt::print(os, "{},{:.17g},{},{},{}\n", j, sd.eigenvalues(j), s, p.tempered() ? 1 : 0, int(member[j]));
    }
}

}  // namespace qelab
