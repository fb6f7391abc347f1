#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qelab {

using Vertex = std::int32_t;
using Bond = std::int32_t;

// Edge i owns the bonds 2i (u -> v) and 2i+1 (v -> u), so reversal is e ^ 1.
// A loop at u yields two mutually reversed bonds u -> u.
class RegularGraph {
public:
    RegularGraph(int n, int q, std::vector<std::pair<Vertex, Vertex>> edges,
                 std::vector<int> sides = {});

    int n() const { return n_; }
    int q() const { return q_; }
    int degree() const { return q_ + 1; }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_bonds() const { return 2 * edges_.size(); }
    const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

    Vertex origin(Bond e) const { return origin_[e]; }
    Vertex terminus(Bond e) const { return origin_[e ^ 1]; }
    static Bond reverse(Bond e) { return e ^ 1; }

    // The q+1 bonds leaving x, in a fixed order.
    std::span<const Bond> out_bonds(Vertex x) const {
        return {out_.data() + static_cast<std::size_t>(x) * degree(),
                static_cast<std::size_t>(degree())};
    }
    int out_position(Bond e) const { return position_[e]; }

    // The c-th non-backtracking continuation of e (c in [0, q)).
    Bond continuation(Bond e, int c) const;
    int continuation_index(Bond prev, Bond next) const;

    bool simple() const { return simple_; }
    bool connected() const { return connected_; }
    // Recorded sides when built by the bipartite generator, else computed.
    std::optional<std::vector<int>> bipartition() const;
    bool has_recorded_sides() const { return !sides_.empty(); }

    // Multiplicity matrix m(x,y); a loop counts 2 at (x,x).
    Eigen::MatrixXi multiplicity_matrix() const;

private:
    int n_;
    int q_;
    std::vector<std::pair<Vertex, Vertex>> edges_;
    std::vector<Vertex> origin_;
    std::vector<Bond> out_;
    std::vector<int> position_;
    std::vector<int> sides_;
    bool simple_ = true;
    bool connected_ = true;
};

RegularGraph generate_random_regular(int n, int q, std::uint64_t seed, bool require_simple = true);
RegularGraph generate_bipartite_regular(int n_per_side, int q, std::uint64_t seed,
                                        bool require_simple = false);

inline constexpr int kResampleBudget = 1000;

// Non-backtracking walk from `start`; bonds.size() is the length.
struct Walk {
    Vertex start = 0;
    std::vector<Bond> bonds;

    std::size_t length() const { return bonds.size(); }
    Vertex end(const RegularGraph& g) const { return bonds.empty() ? start : g.terminus(bonds.back()); }
};

std::vector<Walk> nonbacktracking_walks(const RegularGraph& g, Vertex x, int length);

// Number of non-backtracking walks of a given length from any vertex.
std::size_t walk_count(int q, int length);

// Mixed-radix index of a walk: first digit in [0,q+1), subsequent digits in [0,q).
// A prefix of length j of the walk with index i has index i / q^(length-j) for j >= 1.
std::size_t encode_walk(const RegularGraph& g, std::span<const Bond> bonds);
std::vector<Bond> decode_walk(const RegularGraph& g, Vertex x, int length, std::size_t index);
std::size_t prefix_index(int q, int length, std::size_t index, int prefix_length);

int injectivity_radius(const RegularGraph& g, Vertex x);
std::vector<int> injectivity_radii(const RegularGraph& g);

struct EiirStats {
    int R = 0;
    double fraction = 0.0;
    std::vector<int> rho;
};

EiirStats eiir_stats(const RegularGraph& g, int R);
EiirStats eiir_stats(std::vector<int> rho, int R);

Eigen::MatrixXd adjacency_operator(const RegularGraph& g);

void write_graph(std::ostream& os, const RegularGraph& g);
RegularGraph read_graph(std::istream& is);
void save_graph(const std::string& path, const RegularGraph& g);
RegularGraph load_graph(const std::string& path);

// Small reference graphs.
RegularGraph complete_graph(int n);
RegularGraph complete_bipartite(int k);
RegularGraph petersen_graph();

}  // namespace qelab
