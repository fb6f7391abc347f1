#include "doctest.h"

#include <cmath>
#include <sstream>

#include "qelab/averaging.hpp"
#include "qelab/errors.hpp"
#include "qelab/nonbacktracking.hpp"

using namespace qelab;

namespace {

int count_near(const std::vector<cplx>& v, cplx target, double tol) {
    int c = 0;
    for (cplx x : v) c += std::abs(x - target) <= tol;
    return c;
}

double relative_residual(const Eigen::SparseMatrix<cplx>& m, const Eigen::VectorXcd& f, cplx mu) {
    return (m * f - mu * f).norm() / f.norm();
}

// Dimension of the span of vectors (rank by SVD).
int span_dimension(const std::vector<Eigen::VectorXd>& vs) {
    if (vs.empty()) return 0;
    Eigen::MatrixXd m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(i) = vs[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    svd.setThreshold(1e-10);
    return static_cast<int>(svd.rank());
}

void check_spectrum_correspondence(const RegularGraph& g) {
    BondSpace bs(g);
    auto sd = eig(adjacency_operator(g), g.q());
    auto predicted = predicted_msharp_spectrum(sd, g);
    REQUIRE(predicted.size() == g.num_bonds());
    CHECK(multiset_distance(msharp_eigenvalues(bs), predicted) <= 1e-6);
}

}  // namespace

TEST_CASE("bond space") {
    auto g = generate_random_regular(10, 2, 1, false);
    BondSpace bs(g);
    CHECK(bs.size() == 30);
    for (Bond e = 0; e < 30; ++e) {
        CHECK(BondSpace::reverse(BondSpace::reverse(e)) == e);
        CHECK(bs.origin(BondSpace::reverse(e)) == bs.terminus(e));
    }
    std::ostringstream os;
    bs.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("bond,origin,terminus,reversal\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 31);
}

TEST_CASE("M# is doubly stochastic") {
    auto g = generate_random_regular(50, 3, 2);
    Eigen::MatrixXd m = msharp_real(BondSpace(g));
    CHECK((m.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((m.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((m.array() != 0.0).count() == 200 * 3);
}

TEST_CASE("K4 and K33 closed forms") {
    auto k4 = complete_graph(4);
    BondSpace bs(k4);
    auto m = msharp_real(bs);
    CHECK(m.rows() == 12);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(12);
    CHECK((m * ones - ones).norm() < 1e-14);
    auto ev = msharp_eigenvalues(bs);
    CHECK(cycle_rank(k4) == 3);
    CHECK(count_near(ev, 0.5, 1e-6) == 3);
    CHECK(count_near(ev, -0.5, 1e-6) == 2);
    CHECK(count_near(ev, 1.0, 1e-8) == 1);
    check_spectrum_correspondence(k4);

    auto k33 = complete_bipartite(3);
    CHECK(cycle_rank(k33) == 4);
    auto ev33 = msharp_eigenvalues(BondSpace(k33));
    CHECK(count_near(ev33, -0.5, 1e-6) == 4);
    CHECK(count_near(ev33, -1.0, 1e-8) == 1);
    check_spectrum_correspondence(k33);
}

TEST_CASE("predicted spectrum properties") {
    auto [e1, e2] = eps_roots(1.0, 3);
    CHECK(std::abs(e1 - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(e2 - 1.0) < 1e-14);
    auto g = generate_random_regular(80, 2, 6);
    auto sd = eig(adjacency_operator(g), 2);
    auto predicted = predicted_msharp_spectrum(sd, g);
    CHECK(predicted.size() == static_cast<std::size_t>(80 * 3));
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        if (!sd.params[j].tempered()) continue;
        auto [a, b] = eps_roots(sd.eigenvalues(j), 2);
        CHECK(std::abs(1.0 / (2.0 * a)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(std::abs(1.0 / (2.0 * b)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(std::abs(a - std::conj(b)) < 1e-12);
    }
    for (std::uint64_t seed = 0; seed < 3; ++seed) check_spectrum_correspondence(generate_random_regular(60, 2 + seed % 2, 70 + seed));
    check_spectrum_correspondence(generate_bipartite_regular(20, 2, 3, true));
    check_spectrum_correspondence(generate_random_regular(16, 2, 3, false));
}

TEST_CASE("bond eigenvectors") {
    auto g = generate_random_regular(100, 3, 4);
    auto sd = eig(adjacency_operator(g), 3);
    const Eigen::SparseMatrix<cplx> m = msharp_sparse(BondSpace(g)).cast<cplx>();
    auto fam = cycle_eigenvectors(g);
    for (Eigen::Index j = 0; j + 1 < sd.size(); ++j) {
        auto p = bond_eigenvectors(g, sd.eigenvectors.col(j), sd.eigenvalues(j));
        CHECK_FALSE(p.double_root);
        CHECK(std::abs(p.eps1) <= std::abs(p.eps2) + 1e-12);
        CHECK(relative_residual(m, p.f1, p.mu1) <= 1e-8);
        CHECK(relative_residual(m, p.f2, p.mu2) <= 1e-8);
        if (sd.params[j].tempered()) CHECK(std::abs(p.mu1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-8));
        if (j % 25 == 0)
            for (const auto& v : fam.odd) CHECK(std::abs(p.f1.dot(v.cast<cplx>())) <= 1e-8);
    }
    CHECK_THROWS_AS(bond_eigenvectors(g, sd.eigenvectors.col(99), 1.0), std::invalid_argument);

    auto flagged = bond_eigenvectors(g, sd.eigenvectors.col(3), band_edge(3));
    CHECK(flagged.double_root);
    CHECK(flagged.f1 == flagged.f2);
    CHECK(flagged.generalized.has_value());
    CHECK(std::abs(flagged.eps1 - 1.0 / std::sqrt(3.0)) < 1e-7);
}

TEST_CASE("cycle eigenvectors") {
    auto k4 = complete_graph(4);
    const Eigen::SparseMatrix<double> m4 = msharp_sparse(BondSpace(k4));
    // a triangle 0 -> 1 -> 2 -> 0
    Circuit tri;
    for (auto [u, v] : std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {1, 2}, {2, 0}})
        for (Bond e : k4.out_bonds(u))
            if (k4.terminus(e) == v) tri.push_back(e);
    auto f = odd_circuit_vector(k4, tri);
    CHECK((f.array() != 0.0).count() == 6);
    CHECK((m4 * f - 0.5 * f).norm() <= 1e-10);
    auto fam = cycle_eigenvectors(k4);
    CHECK(span_dimension(fam.odd) == 3);
    CHECK(span_dimension(fam.even) == 2);
    for (const auto& v : fam.even) CHECK((m4 * v + 0.5 * v).norm() <= 1e-10 * v.norm());

    auto k33 = complete_bipartite(3);
    auto fam33 = cycle_eigenvectors(k33);
    CHECK(span_dimension(fam33.even) == 4);
    const Eigen::SparseMatrix<double> m33 = msharp_sparse(BondSpace(k33));
    for (const auto& v : fam33.even) CHECK((m33 * v + 0.5 * v).norm() <= 1e-10 * v.norm());

    for (bool simple : {true, false}) {
        auto g = generate_random_regular(40, 2, 9, simple);
        const Eigen::SparseMatrix<double> m = msharp_sparse(BondSpace(g));
        auto fg = cycle_eigenvectors(g);
        CHECK(static_cast<int>(fg.odd.size()) == cycle_rank(g));
        CHECK(static_cast<int>(fg.even.size()) == cycle_rank(g) - (g.bipartition() ? 0 : 1));
        for (const auto& v : fg.odd) CHECK((m * v - 0.5 * v).norm() <= 1e-10 * v.norm());
        for (const auto& v : fg.even) CHECK((m * v + 0.5 * v).norm() <= 1e-10 * v.norm());
    }

    auto circuits = fundamental_circuits(k4);
    circuits.push_back(circuits.front());
    CHECK_THROWS_AS(cycle_eigenvectors(k4, circuits), std::invalid_argument);
    CHECK_THROWS_AS(odd_circuit_vector(k4, Circuit{tri[0], tri[2]}), std::invalid_argument);
}

TEST_CASE("orthogonalized pairs") {
    double worst_star = 0.0;
    for (int q = 2; q <= 5; ++q) {
        auto g = generate_random_regular(60, q, 10 + q, q <= 3);
        auto sd = eig(adjacency_operator(g), q);
        for (Eigen::Index j = 0; j < sd.size(); ++j) {
            if (std::abs(std::abs(sd.eigenvalues(j)) - 1.0) <= 1e-8) continue;
            auto p = orthogonal_pair(g, sd.eigenvectors.col(j), sd.eigenvalues(j));
            CHECK(std::abs(p.inner) <= 1e-8 * p.f1.norm() * p.f2prime.norm());
            CHECK(std::abs(p.block(1, 0)) <= 1e-8);
            auto [e1, e2] = eps_roots(sd.eigenvalues(j), q);
            CHECK(std::abs(p.block(0, 0) - 1.0 / (static_cast<double>(q) * e1)) <= 1e-8);
            CHECK(std::abs(p.block(1, 1) - 1.0 / (static_cast<double>(q) * e2)) <= 1e-8);
            worst_star = std::max(worst_star, std::abs(p.block(0, 1)));
        }
    }
    MESSAGE("largest off-diagonal entry " << worst_star);
    CHECK(worst_star <= 10.0);
}

TEST_CASE("Cesaro resolvent norm") {
    auto g = generate_random_regular(60, 3, 12);
    BondSpace bs(g);
    CHECK(cesaro_resolvent_norm(bs, 1, 0.3).norm == doctest::Approx(1.0));
    std::vector<double> ns, norms;
    for (int N : {8, 16, 32, 64}) {
        ns.push_back(N);
        norms.push_back(cesaro_resolvent_norm(bs, N, 0.3 * tau(3)).norm);
    }
    auto fit = fit_power_law(ns, norms);
    MESSAGE("Cesaro exponent " << fit.exponent);
    CHECK(std::abs(fit.exponent + 1.0) <= 0.2);

    auto k = generate_bipartite_regular(20, 2, 1, true);
    auto bad = cesaro_resolvent_norm(BondSpace(k), 16, 0.5 * tau(2));
    CHECK(bad.flagged);
    CHECK_FALSE(cesaro_resolvent_norm(BondSpace(k), 16, 0.3 * tau(2)).flagged);
    CHECK_FALSE(cesaro_resolvent_norm(bs, 16, 0.5 * tau(3)).flagged);
}

TEST_CASE("depth reduction") {
    auto g = generate_random_regular(30, 2, 13);
    auto aux = reduce_depth_D(g, 2);
    CHECK(aux.n() == 30);
    CHECK(aux.degree() == 6);
    Eigen::MatrixXd counts = nb_walk_counts(g, 2);
    CHECK((aux.multiplicity_matrix().cast<double>() - counts).cwiseAbs().maxCoeff() == 0.0);
    auto aux3 = reduce_depth_D(g, 3);
    CHECK(aux3.degree() == 12);
    CHECK((aux3.multiplicity_matrix().cast<double>().rowwise().sum().array() - 12.0).abs().maxCoeff() == 0.0);
    CHECK((adjacency_operator(aux3) - s_k_real(g, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(reduce_depth_D(g, 1), std::invalid_argument);
    CHECK_THROWS_AS(reduce_depth_D(g, 30), BudgetError);
}
