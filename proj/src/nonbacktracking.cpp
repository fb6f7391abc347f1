#include "qelab/nonbacktracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <lapacke.h>

#include "qelab/averaging.hpp"
#include "qelab/errors.hpp"

namespace qelab {

void BondSpace::write_csv(std::ostream& os) const {
    fmt::print(os, "bond,origin,terminus,reversal\n");
    for (Bond e = 0; e < static_cast<Bond>(size()); ++e)
        fmt::print(os, "{},{},{},{}\n", e, origin(e), terminus(e), reverse(e));
}

Eigen::SparseMatrix<double> msharp_sparse(const BondSpace& bs) {
    const RegularGraph& g = bs.graph();
    const double w = 1.0 / g.q();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(bs.size()) * g.q());
    for (Bond e = 0; e < static_cast<Bond>(bs.size()); ++e)
        for (int c = 0; c < g.q(); ++c) entries.emplace_back(e, g.continuation(e, c), w);
    Eigen::SparseMatrix<double> m(bs.size(), bs.size());
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

Eigen::MatrixXd msharp_real(const BondSpace& bs) { return Eigen::MatrixXd(msharp_sparse(bs)); }

GraphOperator msharp_matrix(const BondSpace& bs) { return {msharp_real(bs).cast<cplx>(), "M#"}; }

std::vector<cplx> msharp_eigenvalues(const BondSpace& bs) {
    Eigen::MatrixXd m = msharp_real(bs);
    const lapack_int n = static_cast<lapack_int>(m.rows());
    std::vector<double> wr(n), wi(n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, m.data(), n, wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw ConvergenceError("dgeev failed (info " + std::to_string(info) + ")");
    std::vector<cplx> out(n);
    for (lapack_int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

int cycle_rank(const RegularGraph& g) { return static_cast<int>(g.num_edges()) - g.n() + 1; }

std::vector<cplx> predicted_msharp_spectrum(const SpectralData& sd, const RegularGraph& g) {
    const double q = g.q();
    std::vector<cplx> out;
    out.reserve(g.num_bonds());
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        const double lam = sd.eigenvalues(j);
        if (std::abs(lam - 1.0) <= kBipartiteTolerance) {
            out.emplace_back(1.0);
        } else if (std::abs(lam + 1.0) <= kBipartiteTolerance) {
            out.emplace_back(-1.0);
        } else {
            const cplx root = std::sqrt(cplx(lam * lam - 4.0 * q / ((q + 1) * (q + 1))));
            out.push_back(2.0 / ((q + 1) * (lam + root)));
            out.push_back(2.0 / ((q + 1) * (lam - root)));
        }
    }
    const int b = cycle_rank(g);
    out.insert(out.end(), b, cplx(1.0 / q));
    out.insert(out.end(), sd.bipartite ? b : b - 1, cplx(-1.0 / q));
    return out;
}

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) throw std::invalid_argument("multisets differ in size");
    auto lex = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
    std::sort(a.begin(), a.end(), lex);
    std::vector<char> used(b.size(), 0);
    double worst = 0.0;
    for (cplx x : a) {
        std::size_t best = b.size();
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < b.size(); ++i)
            if (!used[i] && std::abs(b[i] - x) < dist) {
                dist = std::abs(b[i] - x);
                best = i;
            }
        used[best] = 1;
        worst = std::max(worst, dist);
    }
    return worst;
}

std::pair<cplx, cplx> eps_roots(double lambda, int q) {
    const double lin = (q + 1.0) * lambda;
    const cplx root = std::sqrt(cplx(lin * lin - 4.0 * q));
    cplx e1 = (lin - root) / (2.0 * q), e2 = (lin + root) / (2.0 * q);
    const double m1 = std::abs(e1), m2 = std::abs(e2);
    if (std::abs(m1 - m2) <= 1e-12 * std::max(m1, m2)) {
        if (e1.imag() < e2.imag()) std::swap(e1, e2);
    } else if (m1 > m2) {
        std::swap(e1, e2);
    }
    return {e1, e2};
}

namespace {

Eigen::VectorXcd bond_vector(const RegularGraph& g, const Eigen::VectorXd& phi, cplx eps) {
    Eigen::VectorXcd f(g.num_bonds());
    for (Bond e = 0; e < static_cast<Bond>(g.num_bonds()); ++e) f(e) = phi(g.terminus(e)) - eps * phi(g.origin(e));
    return f;
}

void require_nontrivial(double lambda) {
    if (std::abs(std::abs(lambda) - 1.0) <= kBipartiteTolerance)
        throw std::invalid_argument("lambda = +-1 has no bond pair");
}

bool is_double_root(double lambda, int q) {
    const double lin = (q + 1.0) * lambda;
    return std::abs(lin * lin - 4.0 * q) <= kDoubleRootTolerance * 4.0 * q;
}

}  // namespace

BondPair bond_eigenvectors(const RegularGraph& g, const Eigen::VectorXd& phi, double lambda) {
    require_nontrivial(lambda);
    if (phi.size() != g.n()) throw std::invalid_argument("vertex vector has the wrong size");
    BondPair p;
    std::tie(p.eps1, p.eps2) = eps_roots(lambda, g.q());
    p.double_root = is_double_root(lambda, g.q());
    if (p.double_root) p.eps2 = p.eps1;
    p.mu1 = 1.0 / (static_cast<double>(g.q()) * p.eps1);
    p.mu2 = 1.0 / (static_cast<double>(g.q()) * p.eps2);
    p.f1 = bond_vector(g, phi, p.eps1);
    p.f2 = p.double_root ? p.f1 : bond_vector(g, phi, p.eps2);
    if (p.double_root) {
        Eigen::VectorXcd gen(g.num_bonds());
        const cplx scale = static_cast<double>(g.q()) * p.eps1 * p.eps1;
        for (Bond e = 0; e < static_cast<Bond>(g.num_bonds()); ++e) gen(e) = scale * phi(g.origin(e));
        p.generalized = std::move(gen);
    }
    return p;
}

std::vector<Circuit> fundamental_circuits(const RegularGraph& g, Vertex root) {
    if (!g.connected()) throw std::invalid_argument("fundamental circuits need a connected graph");
    const int n = g.n();
    std::vector<Bond> parent(n, -1);
    std::vector<char> seen(n, 0), tree_edge(g.num_edges(), 0);
    std::vector<Vertex> queue{root};
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex x = queue[head];
        for (Bond e : g.out_bonds(x)) {
            const Vertex y = g.terminus(e);
            if (seen[y]) continue;
            seen[y] = 1;
            parent[y] = e;
            tree_edge[e / 2] = 1;
            queue.push_back(y);
        }
    }
    auto path_from_root = [&](Vertex v) {
        std::vector<Bond> path;
        for (; v != root; v = g.origin(parent[v])) path.push_back(parent[v]);
        std::reverse(path.begin(), path.end());
        return path;
    };
    std::vector<Circuit> out;
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        if (tree_edge[i]) continue;
        const Bond e = static_cast<Bond>(2 * i);
        Circuit c = path_from_root(g.origin(e));
        c.push_back(e);
        auto back = path_from_root(g.terminus(e));
        for (auto it = back.rbegin(); it != back.rend(); ++it) c.push_back(RegularGraph::reverse(*it));
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

void check_circuit(const RegularGraph& g, const Circuit& c) {
    if (c.empty()) throw std::invalid_argument("empty circuit");
    for (std::size_t j = 0; j < c.size(); ++j)
        if (g.terminus(c[j]) != g.origin(c[(j + 1) % c.size()]))
            throw std::invalid_argument("circuit bonds are not consecutive");
}

void check_independent(const std::vector<Eigen::VectorXd>& vs, Eigen::Index dim, const char* what) {
    if (vs.empty()) return;
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(i) = vs[i];
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() != m.cols()) throw std::invalid_argument(std::string(what) + " circuit vectors are not independent");
}

}  // namespace

Eigen::VectorXd odd_circuit_vector(const RegularGraph& g, const Circuit& c) {
    check_circuit(g, c);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.num_bonds());
    for (Bond e : c) {
        f(e) += 1.0;
        f(RegularGraph::reverse(e)) -= 1.0;
    }
    return f;
}

Eigen::VectorXd even_circuit_vector(const RegularGraph& g, const Circuit& c) {
    check_circuit(g, c);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.num_bonds());
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double sign = (j + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^j with j counted from 1
        f(c[j]) += sign;
        f(RegularGraph::reverse(c[j])) += sign;
    }
    return f;
}

CycleFamilies cycle_eigenvectors(const RegularGraph& g, const std::vector<Circuit>& basis) {
    CycleFamilies fam;
    for (const auto& c : basis) fam.odd.push_back(odd_circuit_vector(g, c));
    check_independent(fam.odd, g.num_bonds(), "odd");
    const Circuit* first_odd = nullptr;
    Eigen::VectorXd first_odd_vec;
    for (const auto& c : basis) {
        Eigen::VectorXd v = even_circuit_vector(g, c);
        if (c.size() % 2 == 0) {
            fam.even.push_back(std::move(v));
        } else if (!first_odd) {
            first_odd = &c;
            first_odd_vec = std::move(v);
        } else {
            if (g.origin(c.front()) != g.origin(first_odd->front()))
                throw std::invalid_argument("odd circuits must share a base vertex");
            fam.even.push_back(v - first_odd_vec);
        }
    }
    check_independent(fam.even, g.num_bonds(), "even");
    return fam;
}

CycleFamilies cycle_eigenvectors(const RegularGraph& g) { return cycle_eigenvectors(g, fundamental_circuits(g)); }

OrthogonalPair orthogonal_pair(const RegularGraph& g, const Eigen::VectorXd& phi, double lambda) {
    require_nontrivial(lambda);
    OrthogonalPair p;
    auto [e1, e2] = eps_roots(lambda, g.q());
    p.double_root = is_double_root(lambda, g.q());
    p.mu = (std::conj(e1) * lambda - 1.0) / (std::conj(e1) - lambda);
    p.f1 = bond_vector(g, phi, e1);
    p.f2prime = bond_vector(g, phi, p.mu);
    p.inner = p.f1.dot(p.f2prime);
    const Eigen::SparseMatrix<cplx> m = msharp_sparse(BondSpace(g)).cast<cplx>();
    const Eigen::VectorXcd u1 = p.f1.normalized(), u2 = p.f2prime.normalized();
    const Eigen::VectorXcd m1 = m * u1, m2 = m * u2;
    p.block << u1.dot(m1), u1.dot(m2), u2.dot(m1), u2.dot(m2);
    return p;
}

CesaroNorm cesaro_resolvent_norm(const BondSpace& bs, int N, double s) {
    if (N < 1) throw std::invalid_argument("N must be at least 1");
    const RegularGraph& g = bs.graph();
    const Eigen::Index dim = bs.size();
    const cplx z = std::polar(1.0, 2.0 * s * std::log(static_cast<double>(g.q())));
    CesaroNorm out;
    out.flagged = g.bipartition().has_value() && std::abs(z + 1.0) < 1e-6;
    const Eigen::SparseMatrix<cplx> m = msharp_sparse(bs).cast<cplx>();
    // sum_{k<N} sum_{j<=k} z^j M^j = sum_{j<N} (N - j) z^j M^j
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::MatrixXcd acc = static_cast<double>(N) * power;
    cplx zj = 1.0;
    for (int j = 1; j < N; ++j) {
        power = (power * m).eval();
        zj *= z;
        acc += (static_cast<double>(N - j) * zj) * power;
    }
    acc /= static_cast<double>(N) * N;
    // project out constants on both sides
    const Eigen::VectorXcd rows = acc.rowwise().mean(), cols = acc.colwise().mean().transpose();
    const cplx all = acc.mean();
    acc.colwise() -= rows;
    acc.rowwise() -= cols.transpose();
    acc.array() += all;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(acc);
    out.norm = svd.singularValues()(0);
    return out;
}

RegularGraph reduce_depth_D(const RegularGraph& g, int D) {
    if (D < 2) throw std::invalid_argument("depth must be at least 2");
    const double degree = (g.q() + 1.0) * std::pow(g.q(), D - 1);
    if (degree * g.n() / 2.0 > 2e7) throw BudgetError(fmt::format("depth {} needs {} edges", D, degree * g.n() / 2.0));
    const Eigen::MatrixXd counts = nb_walk_counts(g, D);
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(degree * g.n() / 2.0));
    for (Vertex x = 0; x < g.n(); ++x) {
        // closed walks come in reversed pairs, so the diagonal is even
        edges.insert(edges.end(), static_cast<std::size_t>(std::lround(counts(x, x))) / 2, {x, x});
        for (Vertex y = x + 1; y < g.n(); ++y)
            edges.insert(edges.end(), static_cast<std::size_t>(std::lround(counts(x, y))), {x, y});
    }
    return RegularGraph(g.n(), static_cast<int>(degree) - 1, std::move(edges));
}

}  // namespace qelab
