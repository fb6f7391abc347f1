#include "doctest.h"

#include <set>
#include <sstream>

#include "qelab/errors.hpp"
#include "qelab/graph.hpp"

using namespace qelab;

namespace {

// Exhaustive oracle: largest r with pairwise distinct endpoints over all walks of length <= r.
int rho_by_enumeration(const RegularGraph& g, Vertex x) {
    for (int r = 1;; ++r) {
        std::set<Vertex> seen;
        std::size_t total = 0;
        for (int len = 0; len <= r; ++len)
            for (const Walk& w : nonbacktracking_walks(g, x, len)) {
                seen.insert(w.end(g));
                ++total;
            }
        if (seen.size() != total) return r - 1;
    }
}

void check_regular(const RegularGraph& g) {
    for (int x = 0; x < g.n(); ++x) {
        CHECK(g.out_bonds(x).size() == static_cast<std::size_t>(g.q() + 1));
        for (Bond e : g.out_bonds(x)) {
            CHECK(g.origin(e) == x);
            CHECK(g.origin(RegularGraph::reverse(e)) == g.terminus(e));
        }
    }
    CHECK(g.num_bonds() == static_cast<std::size_t>(g.n()) * (g.q() + 1));
}

RegularGraph looped_multigraph() { return RegularGraph(2, 2, {{0, 0}, {0, 1}, {1, 1}}); }

}  // namespace

TEST_CASE("reference graphs have the expected injectivity radii") {
    auto k4 = complete_graph(4);
    auto pet = petersen_graph();
    for (int x = 0; x < 4; ++x) CHECK(injectivity_radius(k4, x) == 1);
    for (int x = 0; x < 10; ++x) CHECK(injectivity_radius(pet, x) == 2);
    CHECK(injectivity_radius(looped_multigraph(), 0) == 0);
    CHECK_FALSE(looped_multigraph().simple());
}

TEST_CASE("breadth-first radius agrees with enumeration oracle") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int n = 10 + 8 * static_cast<int>(seed);
        auto g = generate_random_regular(n, seed % 2 ? 2 : 3, seed, seed % 3 != 0);
        auto rho = injectivity_radii(g);
        for (int x = 0; x < g.n(); ++x) CHECK(rho[x] == rho_by_enumeration(g, x));
        if (g.simple())
            for (int r : rho) CHECK(r >= 1);
    }
}

TEST_CASE("non-backtracking walk counts") {
    auto k4 = complete_graph(4);
    CHECK(nonbacktracking_walks(k4, 0, 0).size() == 1);
    CHECK(nonbacktracking_walks(k4, 0, 1).size() == 3);
    auto ws = nonbacktracking_walks(k4, 2, 3);
    CHECK(ws.size() == 12);
    for (const Walk& w : ws) {
        CHECK(w.start == 2);
        for (std::size_t i = 1; i < w.bonds.size(); ++i) {
            CHECK(w.bonds[i] != RegularGraph::reverse(w.bonds[i - 1]));
            CHECK(k4.origin(w.bonds[i]) == k4.terminus(w.bonds[i - 1]));
        }
    }
    CHECK(walk_count(3, 4) == 4 * 27);
}

TEST_CASE("walk encoding round-trips and prefixes nest") {
    auto g = generate_random_regular(30, 3, 7, false);
    for (int len = 0; len <= 4; ++len)
        for (std::size_t i = 0; i < walk_count(3, len); ++i) {
            auto b = decode_walk(g, 5, len, i);
            CHECK(encode_walk(g, b) == i);
            for (int j = 1; j <= len; ++j)
                CHECK(prefix_index(3, len, i, j) == encode_walk(g, std::span<const Bond>(b.data(), j)));
        }
}

TEST_CASE("configuration model generator") {
    SUBCASE("K4 is forced") {
        auto g = generate_random_regular(4, 2, 3, true);
        CHECK(g.simple());
        check_regular(g);
        CHECK(g.multiplicity_matrix() == complete_graph(4).multiplicity_matrix());
    }
    SUBCASE("odd half-edge count on 3 vertices is rejected") {
        CHECK_THROWS_AS(generate_random_regular(3, 2, 11, false), std::invalid_argument);
        auto g = generate_random_regular(2, 2, 11, false);
        check_regular(g);
        auto h = generate_random_regular(3, 3, 11, false);
        check_regular(h);
    }
    SUBCASE("large sample is regular and connected") {
        auto g = generate_random_regular(2000, 2, 1, true);
        check_regular(g);
        CHECK(g.simple());
        CHECK(g.connected());
    }
    SUBCASE("determinism") {
        auto a = generate_random_regular(200, 2, 42, true);
        auto b = generate_random_regular(200, 2, 42, true);
        auto c = generate_random_regular(200, 2, 43, true);
        CHECK(a.edges() == b.edges());
        CHECK(a.edges() != c.edges());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(generate_random_regular(5, 2, 1, false), std::invalid_argument);
        CHECK_THROWS_AS(generate_random_regular(3, 2, 1, true), std::invalid_argument);
        CHECK_THROWS_AS(generate_random_regular(10, 1, 1, false), std::invalid_argument);
    }
}

TEST_CASE("bipartite generator records sides") {
    auto g = generate_bipartite_regular(2, 2, 5);
    check_regular(g);
    REQUIRE(g.has_recorded_sides());
    auto sides = *g.bipartition();
    for (auto [u, v] : g.edges()) CHECK(sides[u] != sides[v]);
    auto h = generate_bipartite_regular(50, 3, 9, true);
    CHECK(h.simple());
    CHECK(h.n() == 100);
}

TEST_CASE("EIIR statistics") {
    auto k4 = complete_graph(4);
    CHECK(eiir_stats(k4, 2).fraction == 1.0);
    CHECK(eiir_stats(k4, 1).fraction == 0.0);
    CHECK_THROWS_AS(eiir_stats(k4, 0), std::invalid_argument);
    auto g = generate_random_regular(2000, 2, 1, true);
    auto st = eiir_stats(g, 4);
    CHECK(st.fraction >= 0.0);
    CHECK(st.fraction < 0.2);
}

TEST_CASE("normalized adjacency") {
    auto k4 = complete_graph(4);
    auto a = adjacency_operator(k4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(a(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 3.0));
    auto m = adjacency_operator(looped_multigraph());
    CHECK(m(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(m(0, 1) == doctest::Approx(1.0 / 3.0));
    auto g = generate_random_regular(101 * 2, 4, 3, false);
    auto b = adjacency_operator(g);
    CHECK((b - b.transpose()).norm() == 0.0);
    CHECK((b.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("graph file round trip") {
    auto g = generate_random_regular(20, 2, 4, false);
    std::stringstream ss;
    write_graph(ss, g);
    auto h = read_graph(ss);
    CHECK(h.n() == 20);
    CHECK(h.q() == 2);
    CHECK(h.edges() == g.edges());
    std::stringstream bad("4 2\n0 1\n");
    CHECK_THROWS(read_graph(bad));
}
