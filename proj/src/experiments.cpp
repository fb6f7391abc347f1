#include "qelab/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "qelab/averaging.hpp"
#include "qelab/errors.hpp"
#include "qelab/rng.hpp"
#include "qelab/tree.hpp"

namespace qelab {

ObservableKind parse_observable(const std::string& name) {
    if (name == "rademacher") return ObservableKind::Rademacher;
    if (name == "set_indicator") return ObservableKind::SetIndicator;
    if (name == "bipartite_balanced") return ObservableKind::BipartiteBalanced;
    throw std::invalid_argument("unknown observable '" + name + "'");
}

std::string observable_name(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::Rademacher: return "rademacher";
        case ObservableKind::SetIndicator: return "set_indicator";
        case ObservableKind::BipartiteBalanced: return "bipartite_balanced";
    }
    return "?";
}

namespace {

// +-1 on a random half of `idx`, 0 on the leftover entry when the count is odd.
void balanced_signs(Eigen::VectorXd& a, std::vector<Vertex> idx, Rng& rng) {
    shuffle(idx, rng);
    const std::size_t half = idx.size() / 2;
    for (std::size_t i = 0; i < idx.size(); ++i) a(idx[i]) = i < half ? 1.0 : (i < 2 * half ? -1.0 : 0.0);
}

void require_window(const SpectralWindow& w) {
    if (w.empty()) throw EmptyWindowError("spectral window is empty");
}

}  // namespace

Eigen::VectorXd make_observable(const RegularGraph& g, ObservableKind kind, std::uint64_t seed) {
    Rng rng(seed);
    const int n = g.n();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    std::vector<Vertex> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    switch (kind) {
        case ObservableKind::Rademacher:
            balanced_signs(a, all, rng);
            break;
        case ObservableKind::SetIndicator: {
            shuffle(all, rng);
            const int k = n / 2;
            for (int i = 0; i < k; ++i) a(all[i]) = 1.0;
            a.array() -= static_cast<double>(k) / n;
            break;
        }
        case ObservableKind::BipartiteBalanced: {
            auto sides = g.bipartition();
            if (!sides) throw std::invalid_argument("bipartite_balanced needs a bipartite graph");
            std::vector<Vertex> side[2];
            for (int i = 0; i < n; ++i) side[(*sides)[i]].push_back(i);
            balanced_signs(a, side[0], rng);
            balanced_signs(a, side[1], rng);
            break;
        }
    }
    return a;
}

double quantum_variance(const SpectralData& sd, const SpectralWindow& w, const Eigen::VectorXd& a) {
    require_window(w);
    if (std::abs(a.sum()) > 1e-10 * std::max<double>(1.0, static_cast<double>(a.size())))
        throw std::invalid_argument("observable is not mean-zero");
    double acc = 0.0;
    for (auto j : w.indices) {
        const double m = a.dot(sd.eigenvectors.col(j).cwiseAbs2());
        acc += m * m;
    }
    return acc / static_cast<double>(w.count());
}

double general_variance(const SpectralData& sd, const SpectralWindow& w, const Eigen::MatrixXd& op, double mean) {
    require_window(w);
    double acc = 0.0;
    for (auto j : w.indices) {
        const auto psi = sd.eigenvectors.col(j);
        const double m = psi.dot(op * psi) - mean;
        acc += m * m;
    }
    return acc / static_cast<double>(w.count());
}

double general_variance(const SpectralData& sd, const SpectralWindow& w, const GraphOperator& op, cplx mean) {
    require_window(w);
    double acc = 0.0;
    for (auto j : w.indices) {
        const Eigen::VectorXcd psi = sd.eigenvectors.col(j).cast<cplx>();
        acc += std::norm(psi.dot(op.matrix * psi) - mean);
    }
    return acc / static_cast<double>(w.count());
}

double sk_variance_spherical(const SpectralData& sd, const SpectralWindow& w, int k, double s0) {
    require_window(w);
    const double mean = spherical(s0, k, sd.q);
    double acc = 0.0;
    for (auto j : w.indices) {
        const double d = spherical(sd.params[j], k, sd.q) - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(w.count());
}

Eigen::VectorXd sk_diagonal(const RegularGraph& g, const SpectralData& sd, const SpectralWindow& w, int k) {
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    const auto cols = static_cast<Eigen::Index>(w.count());
    Eigen::MatrixXd psi(sd.eigenvectors.rows(), cols);
    for (Eigen::Index i = 0; i < cols; ++i) psi.col(i) = sd.eigenvectors.col(w.indices[i]);
    if (k == 0) return psi.colwise().squaredNorm().transpose();
    const double q = g.q();
    const Eigen::SparseMatrix<double> adj = count_matrix(g) / (q + 1.0);
    Eigen::MatrixXd prev = psi, cur = adj * psi;
    for (int step = 1; step < k; ++step) {
        Eigen::MatrixXd next = ((q + 1.0) * (adj * cur) - prev) / q;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return psi.cwiseProduct(cur).colwise().sum().transpose();
}

double ergodic_quadratic_form(const RegularGraph& g, int T, int stride, const Eigen::VectorXd& a) {
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    if (stride != 1 && stride != 2) throw std::invalid_argument("stride must be 1 or 2");
    const double q = g.q();
    const Eigen::SparseMatrix<double> adj = count_matrix(g) / (q + 1.0);
    Eigen::VectorXd prev = a, cur = adj * a;
    double acc = T * a.squaredNorm();
    int k = 1;
    for (int m = 1; m < T; ++m) {
        while (k < stride * m) {
            Eigen::VectorXd next = ((q + 1.0) * (adj * cur) - prev) / q;
            prev = std::move(cur);
            cur = std::move(next);
            ++k;
        }
        acc += 2.0 * (T - m) * a.dot(cur);
    }
    return acc / (static_cast<double>(T) * T * a.size());
}

std::vector<EgorovRow> egorov_experiment(const CylinderSymbol& a, const Profile& phi, const std::vector<double>& rs,
                                         const QuantizeOptions& base) {
    const RegularGraph& g = a.graph();
    const auto rho = injectivity_radii(g);
    const auto mass = symbol_mass(a, phi, base);
    const auto c = egorov_symbol(a);
    const Eigen::MatrixXcd adj = adjacency_operator(g).cast<cplx>();
    std::vector<EgorovRow> out;
    for (double r : rs) {
        QuantizeOptions opt = base;
        opt.r = r;
        EgorovRow row;
        row.r = r;
        const Eigen::MatrixXcd op = op_graph(a, phi, opt).matrix;
        const Eigen::MatrixXcd rem = adj * op - op * adj - op_graph(c, phi, opt).matrix;
        row.residual_sq = rem.squaredNorm();
        for (int x = 0; x < g.n(); ++x) {
            row.mass += mass[x];
            if (rho[x] <= r + 2.0) row.short_mass += mass[x];
        }
        row.bound_shape = (row.mass + std::pow(g.q(), r + 2.0) * row.short_mass) / (r * r);
        row.ratio = row.residual_sq / row.bound_shape;
        out.push_back(row);
    }
    return out;
}

std::vector<ProductRow> product_experiment(const CylinderSymbol& a, int range, const Profile& phi,
                                           const std::vector<double>& rs, const QuantizeOptions& base) {
    const RegularGraph& g = a.graph();
    const auto rho = injectivity_radii(g);
    const double profile_mass = adaptive_quadrature(
        [&](double s) {
            const double v = phi ? phi(s) : 1.0;
            return v * v;
        },
        g.q(), base.quad_tol, base.nodes, base.max_nodes, base.breakpoints);
    std::vector<ProductRow> out;
    for (double r : rs) {
        if (r < 2.0 * range) throw std::invalid_argument("cutoff too short for the symbol range");
        QuantizeOptions opt = base;
        opt.r = r;
        ProductRow row;
        row.r = r;
        row.profile_mass = profile_mass;
        const Eigen::MatrixXcd lhs = op_graph(a, phi, opt).matrix;
        const Eigen::MatrixXcd op_a = op_graph(a, opt).matrix;
        const Eigen::MatrixXcd op_phi = radial_multiplier(g, phi, opt).cast<cplx>();
        row.residual_sq = (lhs - op_a * op_phi).squaredNorm();
        for (int x = 0; x < g.n(); ++x) row.short_count += rho[x] <= r + range;
        row.bound_shape = profile_mass * (g.n() + row.short_count * std::pow(g.q(), r + range)) / r;
        row.ratio = row.residual_sq / row.bound_shape;
        out.push_back(row);
    }
    return out;
}

double chin_residual(const RegularGraph& g, const SpectralData& sd, const Profile& chi, const QuantizeOptions& opt) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < sd.size(); ++j)
        if (sd.params[j].tempered()) cols.push_back(j);
    if (cols.empty()) return 0.0;
    Eigen::MatrixXd psi(sd.eigenvectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) psi.col(i) = sd.eigenvectors.col(cols[i]);
    const Eigen::MatrixXd image = apply_radial(g, chi, opt, psi);
    double worst = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const double value = chi ? chi(sd.params[cols[i]].s) : 1.0;
        worst = std::max(worst, (image.col(i) - value * psi.col(i)).norm());
    }
    return worst;
}

std::vector<ChinRow> chin_experiment(const RegularGraph& g, const SpectralData& sd, double s0, double delta,
                                     const std::vector<double>& rs, const QuantizeOptions& base) {
    WindowProfile w{s0, delta};
    std::vector<ChinRow> out;
    for (double r : rs) {
        QuantizeOptions opt = base;
        opt.r = r;
        opt.breakpoints = w.breakpoints();
        out.push_back({r, delta, chin_residual(g, sd, w, opt)});
    }
    return out;
}

}  // namespace qelab
