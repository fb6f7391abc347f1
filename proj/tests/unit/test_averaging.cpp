#include "doctest.h"

#include <cmath>

#include "qelab/averaging.hpp"
#include "qelab/rng.hpp"

using namespace qelab;

namespace {

Eigen::MatrixXd counts_by_enumeration(const RegularGraph& g, int k) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(g.n(), g.n());
    for (Vertex x = 0; x < g.n(); ++x)
        for (const Walk& w : nonbacktracking_walks(g, x, k)) c(x, w.end(g)) += 1.0;
    return c;
}

Eigen::VectorXd balanced_signs(int n, std::uint64_t seed) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i < n / 2 ? 1.0 : -1.0;
    Rng rng(seed);
    shuffle(v, rng);
    return Eigen::Map<Eigen::VectorXd>(v.data(), n);
}

// Ring of K4-minus-an-edge beads: 3-regular with a small gap and untempered eigenvalues.
RegularGraph necklace(int beads) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int b = 0; b < beads; ++b) {
        const int v = 4 * b;
        edges.insert(edges.end(), {{v, v + 1}, {v, v + 2}, {v + 1, v + 2}, {v + 1, v + 3}, {v + 2, v + 3}});
        edges.emplace_back(v + 3, (v + 4) % (4 * beads));
    }
    return RegularGraph(4 * beads, 2, edges);
}

}  // namespace

TEST_CASE("walk counts: recursion equals enumeration") {
    for (int q : {2, 3}) {
        auto g = generate_random_regular(q == 2 ? 200 : 80, q, 7 + q);
        for (int k = 0; k <= 6; ++k) CHECK((nb_walk_counts(g, k) - counts_by_enumeration(g, k)).cwiseAbs().maxCoeff() == 0.0);
    }
    auto multi = generate_random_regular(20, 2, 4, false);
    for (int k = 0; k <= 5; ++k) CHECK((nb_walk_counts(multi, k) - counts_by_enumeration(multi, k)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("S_k normalization, symmetry and stochasticity") {
    auto g = generate_random_regular(120, 2, 5);
    CHECK((s_k_real(g, 0) - Eigen::MatrixXd::Identity(120, 120)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s_k_real(g, 1) - adjacency_operator(g)).cwiseAbs().maxCoeff() < 1e-15);
    SkSequence seq(g);
    for (int k = 1; k <= 10; ++k) {
        seq.advance();
        const Eigen::MatrixXd& s = seq.current();
        CHECK((s.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        const double norm = (g.q() + 1.0) * std::pow(g.q(), k - 1);
        CHECK((s * norm - nb_walk_counts(g, k)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    auto op = s_k_matrix(g, 3);
    CHECK(op.dimension() == 120);
}

TEST_CASE("spectrum of S_k") {
    auto k4 = complete_graph(4);
    CHECK(sk_spectrum_check(k4, 1) < 1e-12);
    CHECK(sk_spectrum_check(k4, 2) < 1e-8);
    auto g = generate_random_regular(500, 2, 33);
    auto sd = eig(adjacency_operator(g), 2);
    for (int k = 1; k <= 6; ++k) CHECK(sk_spectrum_check(g, sd, k) <= 1e-8);

    // Rayleigh quotients on nondegenerate eigenvectors
    for (int k : {2, 5}) {
        Eigen::MatrixXd s = s_k_real(g, k);
        for (Eigen::Index j = 1; j + 1 < sd.size(); j += 37) {
            if (sd.eigenvalues(j) - sd.eigenvalues(j - 1) < 1e-6 || sd.eigenvalues(j + 1) - sd.eigenvalues(j) < 1e-6)
                continue;
            Eigen::VectorXd psi = sd.eigenvectors.col(j);
            CHECK(std::abs(psi.dot(s * psi) - spherical(sd.params[j], k, 2)) < 1e-8);
        }
    }
}

TEST_CASE("ergodic averages") {
    auto g = generate_random_regular(300, 2, 17);
    CHECK((ergodic_avg_operator(g, 1, 2) - Eigen::MatrixXd::Identity(300, 300)).cwiseAbs().maxCoeff() == 0.0);
    // small T against the literal double sum
    for (int stride : {1, 2}) {
        const int T = 4;
        Eigen::MatrixXd lit = Eigen::MatrixXd::Zero(300, 300);
        for (int k = 0; k < T; ++k)
            for (int j = 0; j < T; ++j) lit += s_k_real(g, stride * std::abs(k - j));
        lit /= T * T;
        auto op = ergodic_avg_operator(g, T, stride);
        CHECK((op - lit).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((op.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(ergodic_avg_operator(g, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ergodic_avg_operator(g, 3, 3), std::invalid_argument);

    auto expander = generate_random_regular(300, 3, 17);
    auto sd = eig(adjacency_operator(expander), 3);
    auto decay = ergodic_decay(expander, {4, 8, 16, 32}, 2, sd.gap);
    MESSAGE("fitted exponent " << decay.fit.exponent << " +- " << decay.fit.exponent_stderr << ", C " << decay.fitted_constant);
    CHECK(std::abs(decay.fit.exponent + 1.0) <= 0.25);
    for (std::size_t i = 0; i < decay.T.size(); ++i)
        CHECK(decay.norms[i] <= decay.fitted_constant / (decay.T[i] * sd.gap) + 1e-12);

    const int T = 16;
    auto op = ergodic_avg_operator(expander, T, 2);
    CHECK(mean_zero_quadratic_form(op, Eigen::VectorXd::Zero(300)) == 0.0);
    auto a = balanced_signs(300, 2);
    const double value = mean_zero_quadratic_form(op, a);
    CHECK(value <= decay.fitted_constant / (T * sd.gap));
    CHECK(mean_zero_quadratic_form(Eigen::MatrixXd::Identity(300, 300), a) == doctest::Approx(1.0));
    a(0) += 0.5;
    CHECK_THROWS_AS(mean_zero_quadratic_form(op, a), std::invalid_argument);
}

TEST_CASE("power-law fit") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    auto f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(-1.5));
    CHECK(f.prefactor == doctest::Approx(3.0));
    CHECK(f.exponent_stderr < 1e-10);
    CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("untempered spherical decay") {
    auto g = necklace(6);
    auto sd = eig(adjacency_operator(g), 2);
    auto u = untempered_decay(sd, 80);
    CHECK(u.untempered > 0);
    MESSAGE(u.untempered << " untempered, beta_s " << u.beta_s << ", C " << u.constant);
    CHECK(u.beta_s > 0.0);
    auto early = untempered_decay(sd, 20);
    CHECK(u.constant <= 2.0 * early.constant + 1e-12);
}
