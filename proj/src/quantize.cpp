#include "qelab/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>

#include "qelab/tree.hpp"

namespace qelab {

namespace {

double eval(const Profile& phi, double s) { return phi ? phi(s) : 1.0; }

// Node-doubling integration of a family of integrands evaluated together.
template <class T, class Fill>
std::vector<T> integrate_family(int q, std::size_t count, Fill fill, const QuantizeOptions& opt) {
    std::vector<T> buf(count), prev, cur;
    auto run = [&](int nodes) {
        PlancherelRule rule(q, nodes, opt.breakpoints);
        std::vector<T> out(count, T{});
        for (std::size_t i = 0; i < rule.size(); ++i) {
            fill(rule.nodes()[i], buf);
            const double w = rule.weights()[i];
            for (std::size_t k = 0; k < count; ++k) out[k] += w * buf[k];
        }
        return out;
    };
    prev = run(opt.nodes);
    for (int m = 2 * opt.nodes; m <= opt.max_nodes; m *= 2) {
        cur = run(m);
        double diff = 0.0;
        for (std::size_t k = 0; k < count; ++k) diff = std::max(diff, std::abs(cur[k] - prev[k]));
        if (diff < opt.quad_tol) return cur;
        prev.swap(cur);
    }
    throw ConvergenceError("kernel quadrature did not converge within " + std::to_string(opt.max_nodes) + " nodes");
}

Eigen::SparseMatrix<double> count_matrix(const RegularGraph& g) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(g.num_bonds());
    for (std::size_t e = 0; e < g.num_bonds(); ++e)
        t.emplace_back(g.origin(static_cast<Bond>(e)), g.terminus(static_cast<Bond>(e)), 1.0);
    Eigen::SparseMatrix<double> a(g.n(), g.n());
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

// Evaluates kernels of one symbol for arbitrary walks through cylinder prefix sums.
class KernelEngine {
public:
    KernelEngine(const CylinderSymbol& a, const Profile& phi, int dmax, const QuantizeOptions& opt)
        : a_(a),
          q_(a.q()),
          len_(a.walk_length()),
          walks_(a.walks_per_vertex()),
          moments_(a.q(), phi, -dmax + a.min_mode(), dmax + a.max_mode(), opt) {
        const int n = a.graph().n();
        cum_.resize(static_cast<std::size_t>(a.mode_count()) * n * (walks_ + 1));
        for (int m = a.min_mode(); m <= a.max_mode(); ++m)
            for (Vertex x = 0; x < n; ++x) {
                auto t = a.table(m, x);
                cplx* c = cum(m, x);
                c[0] = 0.0;
                for (std::size_t w = 0; w < walks_; ++w) c[w + 1] = c[w] + t[w];
            }
        block_.resize(len_ + 1);
        for (int j = 0; j <= len_; ++j) block_[j] = j == 0 ? walks_ : walk_count(q_, len_) / walk_count(q_, j);
        nu_.resize(std::max(dmax, len_) + 2);
        for (std::size_t j = 0; j < nu_.size(); ++j) nu_[j] = cylinder_measure(q_, static_cast<int>(j) + 1);
        qhalf_.resize(2 * dmax + 1);
        for (int e = -dmax; e <= dmax; ++e) qhalf_[e + dmax] = std::pow(static_cast<double>(q_), 0.5 * e);
        dmax_ = dmax;
        partial_.resize(dmax + 2);
    }

    // prefix[j] = index of the length-j prefix of the walk, for j <= min(d, len).
    cplx kernel(Vertex x, std::span<const std::size_t> prefix, int d) {
        cplx total{};
        const int jt = std::min(d, len_);
        const double nu_cell = nu_[len_];
        for (int m = a_.min_mode(); m <= a_.max_mode(); ++m) {
            const cplx* c = cum(m, x);
            for (int j = 0; j <= jt; ++j) {
                const std::size_t lo = j == 0 ? 0 : prefix[j] * block_[j];
                partial_[j] = nu_cell * (c[lo + block_[j]] - c[lo]);
            }
            if (d > len_) {
                const cplx cell = a_.at(m, x, len_ == 0 ? 0 : prefix[len_]);
                for (int j = len_ + 1; j <= d; ++j) partial_[j] = cell * nu_[j];
            }
            cplx sum{};
            for (int j = 0; j < d; ++j)
                sum += qhalf_[2 * j - d + dmax_] * moments_(2 * j - d + m) * (partial_[j] - partial_[j + 1]);
            sum += qhalf_[d + dmax_] * moments_(d + m) * partial_[d];
            total += sum;
        }
        return total;
    }

    int walk_length() const { return len_; }

private:
    cplx* cum(int m, Vertex x) {
        return cum_.data() + (static_cast<std::size_t>(m - a_.min_mode()) * a_.graph().n() + x) * (walks_ + 1);
    }

    const CylinderSymbol& a_;
    int q_;
    int len_;
    std::size_t walks_;
    int dmax_ = 0;
    MomentTable moments_;
    std::vector<cplx> cum_;
    std::vector<std::size_t> block_;
    std::vector<double> nu_;
    std::vector<double> qhalf_;
    std::vector<cplx> partial_;
};

}  // namespace

double cutoff_weight(int d, double r) { return bump(d / r); }

int cutoff_reach(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
    return static_cast<int>(std::ceil(r)) - 1;
}

int busemann_increment(std::span<const Bond> geodesic, std::span<const Bond> cylinder) {
    const std::size_t d = geodesic.size();
    if (cylinder.size() < d) throw std::invalid_argument("cylinder walk shorter than the geodesic");
    std::size_t j = 0;
    while (j < d && geodesic[j] == cylinder[j]) ++j;
    return static_cast<int>(2 * j) - static_cast<int>(d);
}

MomentTable::MomentTable(int q, const Profile& phi, int kmin, int kmax, const QuantizeOptions& opt)
    : kmin_(kmin), kmax_(kmax) {
    const double lq = std::log(static_cast<double>(q));
    const std::size_t count = static_cast<std::size_t>(kmax - kmin + 1);
    values_ = integrate_family<cplx>(
        q, count,
        [&](double s, std::vector<cplx>& out) {
            const double f = eval(phi, s);
            for (std::size_t i = 0; i < count; ++i) out[i] = f * std::polar(1.0, (kmin + static_cast<int>(i)) * s * lq);
        },
        opt);
}

cplx tree_kernel(const CylinderSymbol& a, const Profile& phi, Vertex x, std::span<const Bond> walk,
                 const QuantizeOptions& opt) {
    const int d = static_cast<int>(walk.size());
    KernelEngine engine(a, phi, std::max(d, 1), opt);
    const RegularGraph& g = a.graph();
    std::vector<std::size_t> prefix(std::min(d, a.walk_length()) + 1, 0);
    for (std::size_t j = 1; j < prefix.size(); ++j)
        prefix[j] = encode_walk(g, walk.first(j));
    return engine.kernel(x, prefix, d);
}

GraphOperator op_graph(const CylinderSymbol& a, const Profile& phi, const QuantizeOptions& opt) {
    const RegularGraph& g = a.graph();
    const int reach = cutoff_reach(opt.r);
    KernelEngine engine(a, phi, std::max(reach, 1), opt);
    const int len = a.walk_length();
    const int q = g.q();
    GraphOperator op{Eigen::MatrixXcd::Zero(g.n(), g.n()), "Op"};
    std::vector<double> weight(reach + 1);
    for (int d = 0; d <= reach; ++d) weight[d] = cutoff_weight(d, opt.r);

    std::vector<std::size_t> prefix(len + 1, 0);
    std::vector<Bond> bonds(reach + 1);
    for (Vertex x = 0; x < g.n(); ++x) {
        op.matrix(x, x) += weight[0] * engine.kernel(x, prefix, 0);
        auto visit = [&](auto&& self, int d) -> void {
            const Vertex y = g.terminus(bonds[d - 1]);
            op.matrix(x, y) += weight[d] * engine.kernel(x, prefix, d);
            if (d == reach) return;
            for (int c = 0; c < q; ++c) {
                bonds[d] = g.continuation(bonds[d - 1], c);
                if (d + 1 <= len) prefix[d + 1] = prefix[d] * q + c;
                self(self, d + 1);
            }
        };
        if (reach == 0) continue;
        for (int c0 = 0; c0 <= q; ++c0) {
            bonds[0] = g.out_bonds(x)[c0];
            if (len >= 1) prefix[1] = c0;
            visit(visit, 1);
        }
    }
    return op;
}

GraphOperator op_graph(const CylinderSymbol& a, const QuantizeOptions& opt) { return op_graph(a, Profile{}, opt); }

std::vector<double> radial_kernel_scaled(const Profile& phi, int q, int dmax, const QuantizeOptions& opt) {
    const std::size_t count = static_cast<std::size_t>(dmax + 1);
    return integrate_family<double>(
        q, count,
        [&](double s, std::vector<double>& out) {
            const double f = eval(phi, s);
            for (std::size_t d = 0; d < count; ++d) out[d] = f * spherical_scaled(s, static_cast<int>(d), q);
        },
        opt);
}

std::vector<double> radial_kernel(const Profile& phi, int q, int dmax, const QuantizeOptions& opt) {
    auto k = radial_kernel_scaled(phi, q, dmax, opt);
    for (int d = 0; d <= dmax; ++d) k[d] *= std::pow(static_cast<double>(q), -0.5 * d);
    return k;
}

Eigen::MatrixXd apply_radial(const RegularGraph& g, const Profile& phi, const QuantizeOptions& opt,
                             const Eigen::MatrixXd& psi) {
    const int q = g.q();
    const int reach = cutoff_reach(opt.r);
    const auto kt = radial_kernel_scaled(phi, q, reach, opt);
    const auto a1 = count_matrix(g);
    const double rq = 1.0 / std::sqrt(static_cast<double>(q));
    // B_d = q^{-d/2} A_d with A_d the non-backtracking walk counts.
    // B_d grows like q^{d/2} on constants (and on the side-sign vector of a
    // bipartite graph), so rounding drift into those directions is removed
    // when the input has none; the subspace is invariant, so this is exact.
    std::vector<Eigen::VectorXd> deflate;
    {
        const double n = static_cast<double>(g.n());
        Eigen::VectorXd ones = Eigen::VectorXd::Constant(g.n(), 1.0 / std::sqrt(n));
        deflate.push_back(ones);
        if (auto sides = g.bipartition()) {
            Eigen::VectorXd alt(g.n());
            for (int x = 0; x < g.n(); ++x) alt(x) = ((*sides)[x] ? -1.0 : 1.0) / std::sqrt(n);
            deflate.push_back(alt);
        }
        const double scale = psi.size() ? psi.cwiseAbs().maxCoeff() : 0.0;
        for (const auto& v : deflate)
            if ((v.transpose() * psi).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale) * std::sqrt(n)) {
                deflate.clear();
                break;
            }
    }
    auto project = [&](Eigen::MatrixXd& m) {
        for (const auto& v : deflate) m -= v * (v.transpose() * m);
    };
    Eigen::MatrixXd prev = psi;
    Eigen::MatrixXd out = kt[0] * psi;
    if (reach == 0) return out;
    Eigen::MatrixXd cur = rq * (a1 * psi);
    project(cur);
    out += cutoff_weight(1, opt.r) * kt[1] * cur;
    for (int d = 1; d < reach; ++d) {
        Eigen::MatrixXd next = rq * (a1 * cur) - (d == 1 ? (q + 1.0) / q : 1.0) * prev;
        project(next);
        prev.swap(cur);
        cur.swap(next);
        out += cutoff_weight(d + 1, opt.r) * kt[d + 1] * cur;
    }
    return out;
}

Eigen::MatrixXd radial_multiplier(const RegularGraph& g, const Profile& phi, const QuantizeOptions& opt) {
    return apply_radial(g, phi, opt, Eigen::MatrixXd::Identity(g.n(), g.n()));
}

double hs_norm(const Eigen::MatrixXcd& m) { return m.norm(); }
double hs_norm(const Eigen::MatrixXd& m) { return m.norm(); }
double hs_norm(const GraphOperator& op) { return op.matrix.norm(); }

std::vector<double> symbol_mass(const CylinderSymbol& a, const Profile& phi, const QuantizeOptions& opt) {
    const int span = a.max_mode() - a.min_mode();
    const double lq = std::log(static_cast<double>(a.q()));
    const std::size_t count = static_cast<std::size_t>(2 * span + 1);
    const auto gram = integrate_family<cplx>(
        a.q(), count,
        [&](double s, std::vector<cplx>& out) {
            const double f = eval(phi, s);
            for (std::size_t i = 0; i < count; ++i)
                out[i] = f * f * std::polar(1.0, (static_cast<int>(i) - span) * s * lq);
        },
        opt);
    const double nu = cylinder_measure(a.q(), a.depth());
    std::vector<double> mass(a.graph().n(), 0.0);
    for (Vertex x = 0; x < a.graph().n(); ++x) {
        double sum = 0.0;
        for (std::size_t w = 0; w < a.walks_per_vertex(); ++w)
            for (int m = a.min_mode(); m <= a.max_mode(); ++m)
                for (int k = a.min_mode(); k <= a.max_mode(); ++k)
                    sum += (a.at(m, x, w) * std::conj(a.at(k, x, w)) * gram[m - k + span]).real();
        mass[x] = nu * sum;
    }
    return mass;
}

HsBound hs_norm_bound(const CylinderSymbol& a, const Profile& phi, const std::vector<int>& rho,
                      const QuantizeOptions& opt) {
    if (rho.size() != static_cast<std::size_t>(a.graph().n())) throw std::invalid_argument("rho has wrong length");
    HsBound b;
    const double h = hs_norm(op_graph(a, phi, opt));
    b.hs_squared = h * h;
    const auto mass = symbol_mass(a, phi, opt);
    const double qr = std::pow(static_cast<double>(a.q()), opt.r);
    for (std::size_t x = 0; x < mass.size(); ++x) {
        if (rho[x] >= opt.r) b.long_part += mass[x];
        if (rho[x] <= opt.r) b.short_part += qr * mass[x];
    }
    return b;
}

}  // namespace qelab
