#include "qelab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qelab/errors.hpp"
#include "qelab/rng.hpp"

namespace qelab {

RegularGraph::RegularGraph(int n, int q, std::vector<std::pair<Vertex, Vertex>> edges,
                           std::vector<int> sides)
    : n_(n), q_(q), edges_(std::move(edges)), sides_(std::move(sides)) {
    if (q < 2) throw std::invalid_argument("branching number q must be >= 2");
    if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
    if (static_cast<long long>(n) * (q + 1) != 2 * static_cast<long long>(edges_.size()))
        throw std::invalid_argument("edge count does not match n(q+1)/2");
    if (!sides_.empty() && sides_.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("side labels must cover all vertices");

    const std::size_t nb = num_bonds();
    origin_.resize(nb);
    position_.resize(nb);
    std::vector<std::vector<Bond>> lists(n);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        auto [u, v] = edges_[i];
        if (u < 0 || u >= n || v < 0 || v >= n) throw std::out_of_range("edge endpoint out of range");
        origin_[2 * i] = u;
        origin_[2 * i + 1] = v;
        lists[u].push_back(static_cast<Bond>(2 * i));
        lists[v].push_back(static_cast<Bond>(2 * i + 1));
    }
    out_.reserve(nb);
    for (int x = 0; x < n; ++x) {
        if (lists[x].size() != static_cast<std::size_t>(q + 1))
            throw std::invalid_argument("vertex " + std::to_string(x) + " has " +
                                        std::to_string(lists[x].size()) + " half-edges, expected " +
                                        std::to_string(q + 1));
        for (std::size_t k = 0; k < lists[x].size(); ++k) {
            position_[lists[x][k]] = static_cast<int>(k);
            out_.push_back(lists[x][k]);
        }
    }

    std::set<std::pair<Vertex, Vertex>> seen;
    for (auto [u, v] : edges_) {
        if (u == v || !seen.insert(std::minmax(u, v)).second) {
            simple_ = false;
            break;
        }
    }

    std::vector<char> mark(n, 0);
    std::vector<Vertex> stack{0};
    mark[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        for (Bond e : out_bonds(x)) {
            Vertex y = terminus(e);
            if (!mark[y]) {
                mark[y] = 1;
                ++reached;
                stack.push_back(y);
            }
        }
    }
    connected_ = reached == n;
}

Bond RegularGraph::continuation(Bond e, int c) const {
    const int p = position_[e ^ 1];
    return out_bonds(terminus(e))[c < p ? c : c + 1];
}

int RegularGraph::continuation_index(Bond prev, Bond next) const {
    const int p = position_[prev ^ 1];
    const int k = position_[next];
    if (k == p) throw std::invalid_argument("walk backtracks");
    return k > p ? k - 1 : k;
}

std::optional<std::vector<int>> RegularGraph::bipartition() const {
    if (!sides_.empty()) return sides_;
    std::vector<int> side(n_, -1);
    for (int s = 0; s < n_; ++s) {
        if (side[s] >= 0) continue;
        side[s] = 0;
        std::queue<Vertex> bfs;
        bfs.push(s);
        while (!bfs.empty()) {
            Vertex x = bfs.front();
            bfs.pop();
            for (Bond e : out_bonds(x)) {
                Vertex y = terminus(e);
                if (side[y] < 0) {
                    side[y] = 1 - side[x];
                    bfs.push(y);
                } else if (side[y] == side[x]) {
                    return std::nullopt;
                }
            }
        }
    }
    return side;
}

Eigen::MatrixXi RegularGraph::multiplicity_matrix() const {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n_, n_);
    for (std::size_t e = 0; e < num_bonds(); ++e) m(origin_[e], terminus(static_cast<Bond>(e))) += 1;
    return m;
}

namespace {

std::vector<std::pair<Vertex, Vertex>> pair_stubs(std::vector<Vertex>& stubs, Rng& rng) {
    shuffle(stubs, rng);
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
    return edges;
}

bool edges_simple(const std::vector<std::pair<Vertex, Vertex>>& edges) {
    std::set<std::pair<Vertex, Vertex>> seen;
    for (auto [u, v] : edges)
        if (u == v || !seen.insert(std::minmax(u, v)).second) return false;
    return true;
}

}  // namespace

RegularGraph generate_random_regular(int n, int q, std::uint64_t seed, bool require_simple) {
    if (q < 2) throw std::invalid_argument("branching number q must be >= 2");
    if (n < 1) throw std::invalid_argument("n must be positive");
    if ((static_cast<long long>(n) * (q + 1)) % 2 != 0)
        throw std::invalid_argument("n(q+1) must be even");
    if (require_simple && n <= q + 1)
        throw std::invalid_argument("a simple (q+1)-regular graph needs more than q+1 vertices");

    Rng rng(seed);
    std::vector<Vertex> stubs;
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        stubs.clear();
        for (int x = 0; x < n; ++x)
            for (int k = 0; k <= q; ++k) stubs.push_back(x);
        auto edges = pair_stubs(stubs, rng);
        if (!require_simple || edges_simple(edges)) return RegularGraph(n, q, std::move(edges));
    }
    throw BudgetError("no simple graph within " + std::to_string(kResampleBudget) + " samples");
}

RegularGraph generate_bipartite_regular(int n_per_side, int q, std::uint64_t seed, bool require_simple) {
    if (q < 2) throw std::invalid_argument("branching number q must be >= 2");
    if (n_per_side < 1) throw std::invalid_argument("n_per_side must be positive");
    if (require_simple && n_per_side < q + 1)
        throw std::invalid_argument("a simple bipartite graph needs at least q+1 vertices per side");

    Rng rng(seed);
    const int n = 2 * n_per_side;
    std::vector<int> sides(n, 0);
    for (int x = n_per_side; x < n; ++x) sides[x] = 1;
    std::vector<Vertex> right;
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        right.clear();
        for (int x = n_per_side; x < n; ++x)
            for (int k = 0; k <= q; ++k) right.push_back(x);
        shuffle(right, rng);
        std::vector<std::pair<Vertex, Vertex>> edges;
        for (std::size_t i = 0; i < right.size(); ++i)
            edges.emplace_back(static_cast<Vertex>(i / (q + 1)), right[i]);
        if (!require_simple || edges_simple(edges)) return RegularGraph(n, q, std::move(edges), sides);
    }
    throw BudgetError("no simple bipartite graph within " + std::to_string(kResampleBudget) + " samples");
}

std::size_t walk_count(int q, int length) {
    if (length == 0) return 1;
    std::size_t c = q + 1;
    for (int i = 1; i < length; ++i) c *= q;
    return c;
}

std::size_t encode_walk(const RegularGraph& g, std::span<const Bond> bonds) {
    if (bonds.empty()) return 0;
    std::size_t index = g.out_position(bonds[0]);
    for (std::size_t i = 1; i < bonds.size(); ++i)
        index = index * g.q() + g.continuation_index(bonds[i - 1], bonds[i]);
    return index;
}

std::vector<Bond> decode_walk(const RegularGraph& g, Vertex x, int length, std::size_t index) {
    std::vector<Bond> bonds(length);
    if (length == 0) return bonds;
    std::vector<int> digits(length);
    for (int i = length - 1; i >= 1; --i) {
        digits[i] = static_cast<int>(index % g.q());
        index /= g.q();
    }
    if (index > static_cast<std::size_t>(g.q())) throw std::out_of_range("walk index out of range");
    digits[0] = static_cast<int>(index);
    bonds[0] = g.out_bonds(x)[digits[0]];
    for (int i = 1; i < length; ++i) bonds[i] = g.continuation(bonds[i - 1], digits[i]);
    return bonds;
}

std::size_t prefix_index(int q, int length, std::size_t index, int prefix_length) {
    if (prefix_length == 0) return 0;
    for (int i = prefix_length; i < length; ++i) index /= q;
    return index;
}

std::vector<Walk> nonbacktracking_walks(const RegularGraph& g, Vertex x, int length) {
    if (length < 0) throw std::invalid_argument("walk length must be >= 0");
    if (x < 0 || x >= g.n()) throw std::out_of_range("vertex out of range");
    std::vector<Walk> walks;
    const std::size_t count = walk_count(g.q(), length);
    walks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) walks.push_back({x, decode_walk(g, x, length, i)});
    return walks;
}

namespace {

// Breadth-first unrolling that reuses a stamp array across calls.
int unroll_radius(const RegularGraph& g, Vertex x, std::vector<int>& stamp, int tag) {
    struct Tip {
        Vertex v;
        Bond last;
    };
    std::vector<Tip> frontier{{x, -1}}, next;
    stamp[x] = tag;
    for (int depth = 0;; ++depth) {
        next.clear();
        for (const Tip& t : frontier) {
            for (Bond e : g.out_bonds(t.v)) {
                if (t.last >= 0 && e == RegularGraph::reverse(t.last)) continue;
                Vertex w = g.terminus(e);
                if (stamp[w] == tag) return depth;
                stamp[w] = tag;
                next.push_back({w, e});
            }
        }
        frontier.swap(next);
    }
}

}  // namespace

int injectivity_radius(const RegularGraph& g, Vertex x) {
    if (x < 0 || x >= g.n()) throw std::out_of_range("vertex out of range");
    std::vector<int> stamp(g.n(), -1);
    return unroll_radius(g, x, stamp, 0);
}

std::vector<int> injectivity_radii(const RegularGraph& g) {
    std::vector<int> stamp(g.n(), -1);
    std::vector<int> rho(g.n());
    for (int x = 0; x < g.n(); ++x) rho[x] = unroll_radius(g, x, stamp, x);
    return rho;
}

EiirStats eiir_stats(std::vector<int> rho, int R) {
    if (R < 1) throw std::invalid_argument("EIIR radius must be >= 1");
    EiirStats st;
    st.R = R;
    const auto small = std::count_if(rho.begin(), rho.end(), [R](int r) { return r < R; });
    st.fraction = rho.empty() ? 0.0 : static_cast<double>(small) / static_cast<double>(rho.size());
    st.rho = std::move(rho);
    return st;
}

EiirStats eiir_stats(const RegularGraph& g, int R) { return eiir_stats(injectivity_radii(g), R); }

Eigen::MatrixXd adjacency_operator(const RegularGraph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n(), g.n());
    const double w = 1.0 / g.degree();
    for (std::size_t e = 0; e < g.num_bonds(); ++e)
        a(g.origin(static_cast<Bond>(e)), g.terminus(static_cast<Bond>(e))) += w;
    return a;
}

void write_graph(std::ostream& os, const RegularGraph& g) {
    os << g.n() << ' ' << g.q() << '\n';
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

RegularGraph read_graph(std::istream& is) {
    int n = 0, q = 0;
    if (!(is >> n >> q)) throw std::runtime_error("graph file: missing header \"n q\"");
    std::vector<std::pair<Vertex, Vertex>> edges;
    Vertex u, v;
    while (is >> u >> v) edges.emplace_back(u, v);
    if (!is.eof()) throw std::runtime_error("graph file: malformed edge line");
    return RegularGraph(n, q, std::move(edges));
}

void save_graph(const std::string& path, const RegularGraph& g) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_graph(os, g);
}

RegularGraph load_graph(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_graph(is);
}

RegularGraph complete_graph(int n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return RegularGraph(n, n - 2, std::move(edges));
}

RegularGraph complete_bipartite(int k) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<int> sides(2 * k, 0);
    for (int v = k; v < 2 * k; ++v) sides[v] = 1;
    for (int u = 0; u < k; ++u)
        for (int v = k; v < 2 * k; ++v) edges.emplace_back(u, v);
    return RegularGraph(2 * k, k - 1, std::move(edges), std::move(sides));
}

RegularGraph petersen_graph() {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int i = 0; i < 5; ++i) {
        edges.emplace_back(i, (i + 1) % 5);
        edges.emplace_back(i, i + 5);
        edges.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
    return RegularGraph(10, 2, std::move(edges));
}

}  // namespace qelab
