#include "qelab/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "qelab/errors.hpp"

namespace qelab {

namespace {

std::size_t checked_walks(int q, int depth, const SymbolBudget& budget) {
    if (depth < 1) throw std::invalid_argument("symbol depth must be >= 1");
    if (depth > budget.max_depth)
        throw BudgetError("symbol depth " + std::to_string(depth) + " exceeds budget " +
                          std::to_string(budget.max_depth));
    return walk_count(q, depth - 1);
}

std::size_t ipow(int q, int k) {
    std::size_t p = 1;
    for (int i = 0; i < k; ++i) p *= q;
    return p;
}

cplx mode_factor(int q, int m, double s) { return std::polar(1.0, m * s * std::log(static_cast<double>(q))); }

}  // namespace

CylinderSymbol::CylinderSymbol(std::shared_ptr<const RegularGraph> g, int depth, int min_mode, int max_mode,
                               SymbolBudget budget)
    : graph_(std::move(g)), depth_(depth), lo_(min_mode), hi_(max_mode), budget_(budget) {
    if (!graph_) throw std::invalid_argument("symbol needs a graph");
    if (lo_ > hi_) throw std::invalid_argument("empty Fourier mode range");
    if (std::max(std::abs(lo_), std::abs(hi_)) > budget_.max_mode)
        throw BudgetError("Fourier mode exceeds budget " + std::to_string(budget_.max_mode));
    walks_ = checked_walks(graph_->q(), depth_, budget_);
    data_.assign(static_cast<std::size_t>(mode_count()) * graph_->n() * walks_, cplx{});
}

CylinderSymbol CylinderSymbol::vertex_function(std::shared_ptr<const RegularGraph> g, const Eigen::VectorXd& b) {
    if (b.size() != g->n()) throw std::invalid_argument("vertex function has wrong length");
    CylinderSymbol a(std::move(g), 1);
    for (Vertex x = 0; x < a.graph().n(); ++x) a.at(0, x, 0) = b(x);
    return a;
}

CylinderSymbol CylinderSymbol::constant(std::shared_ptr<const RegularGraph> g, cplx c) {
    CylinderSymbol a(std::move(g), 1);
    std::fill(a.data_.begin(), a.data_.end(), c);
    return a;
}

CylinderSymbol CylinderSymbol::cylinder_indicator(std::shared_ptr<const RegularGraph> g, Vertex x,
                                                  std::span<const Bond> walk) {
    const int depth = static_cast<int>(walk.size()) + 1;
    const std::size_t idx = encode_walk(*g, walk);
    CylinderSymbol a(std::move(g), depth);
    a.at(0, x, idx) = 1.0;
    return a;
}

CylinderSymbol CylinderSymbol::spherical_fourier(std::shared_ptr<const RegularGraph> g, int k) {
    if (k < 0) throw std::invalid_argument("sphere index must be >= 0");
    const int q = g->q();
    CylinderSymbol a(std::move(g), 1, -k, k);
    const double scale = std::pow(static_cast<double>(q), -0.5 * k);
    const double c = 2.0 / (q + 1), d = (q - 1.0) / (q + 1);
    std::vector<double> coef(2 * k + 1, 0.0);
    // cos(k theta) = (z^k + z^-k)/2 and sin((k+1)theta)/sin(theta) = sum_j z^{k-2j}.
    coef[2 * k] += 0.5 * c;
    coef[0] += 0.5 * c;
    for (int j = 0; j <= k; ++j) coef[k + (k - 2 * j)] += d;
    for (int m = -k; m <= k; ++m)
        for (Vertex x = 0; x < a.graph().n(); ++x) a.at(m, x, 0) = scale * coef[m + k];
    return a;
}

cplx CylinderSymbol::value(Vertex x, std::size_t w, double s) const {
    cplx v{};
    for (int m = lo_; m <= hi_; ++m) v += at(m, x, w) * mode_factor(q(), m, s);
    return v;
}

cplx CylinderSymbol::value_on_walk(Vertex x, std::span<const Bond> bonds, double s) const {
    if (bonds.size() < static_cast<std::size_t>(walk_length()))
        throw std::invalid_argument("walk shorter than symbol depth");
    return value(x, encode_walk(*graph_, bonds.first(walk_length())), s);
}

double CylinderSymbol::sup_norm() const {
    double best = 0.0;
    for (Vertex x = 0; x < graph_->n(); ++x)
        for (std::size_t w = 0; w < walks_; ++w) {
            double sum = 0.0;
            for (int m = lo_; m <= hi_; ++m) sum += std::abs(at(m, x, w));
            best = std::max(best, sum);
        }
    return best;
}

CylinderSymbol CylinderSymbol::lifted(int depth) const {
    if (depth < depth_) throw std::invalid_argument("cannot lift to a smaller depth");
    if (depth == depth_) return *this;
    CylinderSymbol out(graph_, depth, lo_, hi_, budget_);
    const int len = depth - 1;
    for (int m = lo_; m <= hi_; ++m)
        for (Vertex x = 0; x < graph_->n(); ++x)
            for (std::size_t w = 0; w < out.walks_; ++w)
                out.at(m, x, w) = at(m, x, prefix_index(q(), len, w, walk_length()));
    return out;
}

CylinderSymbol CylinderSymbol::with_modes(int lo, int hi) const {
    if (lo > lo_ || hi < hi_) throw std::invalid_argument("mode range must contain the current one");
    CylinderSymbol out(graph_, depth_, lo, hi, budget_);
    for (int m = lo_; m <= hi_; ++m)
        std::copy_n(data_.begin() + offset(m, 0, 0), static_cast<std::size_t>(graph_->n()) * walks_,
                    out.data_.begin() + out.offset(m, 0, 0));
    return out;
}

CylinderSymbol CylinderSymbol::compacted(double tol) const {
    auto zero_mode = [&](int m) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(graph_->n()) * walks_; ++i)
            if (std::abs(data_[offset(m, 0, 0) + i]) > tol) return false;
        return true;
    };
    int lo = lo_, hi = hi_;
    while (lo < hi && zero_mode(lo)) ++lo;
    while (hi > lo && zero_mode(hi)) --hi;
    if (lo == hi && zero_mode(lo)) lo = hi = 0;

    CylinderSymbol cur(graph_, depth_, lo, hi, budget_);
    for (int m = lo; m <= hi; ++m)
        std::copy_n(data_.begin() + offset(m, 0, 0), static_cast<std::size_t>(graph_->n()) * walks_,
                    cur.data_.begin() + cur.offset(m, 0, 0));
    while (cur.depth_ > 1) {
        // Independent of the last step: equal across each block of sibling walks.
        const std::size_t block = cur.depth_ == 2 ? cur.walks_ : static_cast<std::size_t>(q());
        bool reducible = true;
        for (std::size_t i = 0; i < cur.data_.size() && reducible; ++i)
            if (std::abs(cur.data_[i] - cur.data_[i - i % block]) > tol) reducible = false;
        if (!reducible) break;
        CylinderSymbol next(graph_, cur.depth_ - 1, lo, hi, budget_);
        for (std::size_t i = 0; i < next.data_.size(); ++i) next.data_[i] = cur.data_[i * block];
        cur = std::move(next);
    }
    return cur;
}

void CylinderSymbol::align_with(const CylinderSymbol& o) {
    if (graph_ != o.graph_) throw std::invalid_argument("symbols live on different graphs");
    if (o.depth_ > depth_) *this = lifted(o.depth_);
    if (o.lo_ < lo_ || o.hi_ > hi_) *this = with_modes(std::min(lo_, o.lo_), std::max(hi_, o.hi_));
}

CylinderSymbol& CylinderSymbol::operator+=(const CylinderSymbol& o) {
    align_with(o);
    const CylinderSymbol b = o.depth_ < depth_ ? o.lifted(depth_) : o;
    const std::size_t chunk = static_cast<std::size_t>(graph_->n()) * walks_;
    for (int m = b.lo_; m <= b.hi_; ++m)
        for (std::size_t i = 0; i < chunk; ++i) data_[offset(m, 0, 0) + i] += b.data_[b.offset(m, 0, 0) + i];
    return *this;
}

CylinderSymbol& CylinderSymbol::operator-=(const CylinderSymbol& o) {
    CylinderSymbol neg = o;
    neg *= -1.0;
    return *this += neg;
}

CylinderSymbol& CylinderSymbol::operator*=(cplx c) {
    for (cplx& v : data_) v *= c;
    return *this;
}

CylinderSymbol operator+(CylinderSymbol a, const CylinderSymbol& b) { return a += b; }
CylinderSymbol operator-(CylinderSymbol a, const CylinderSymbol& b) { return a -= b; }
CylinderSymbol operator*(cplx c, CylinderSymbol a) { return a *= c; }

double max_difference(const CylinderSymbol& a, const CylinderSymbol& b) {
    CylinderSymbol d = a - b;
    double worst = 0.0;
    for (const cplx& v : d.raw()) worst = std::max(worst, std::abs(v));
    return worst;
}

CylinderSymbol shift_U(const CylinderSymbol& a) {
    const RegularGraph& g = a.graph();
    const int q = g.q();
    CylinderSymbol out(a.graph_ptr(), a.depth() + 1, a.min_mode(), a.max_mode(), a.budget());
    const int len = out.walk_length();
    // Output index w = c0 * q^{len-1} + c1 * q^{len-2} + rest.
    const std::size_t head = ipow(q, len - 1);
    const std::size_t block = len >= 2 ? ipow(q, len - 2) : 1;
    for (Vertex x = 0; x < g.n(); ++x) {
        for (std::size_t w = 0; w < out.walks_per_vertex(); ++w) {
            const Bond e0 = g.out_bonds(x)[w / head];
            const Vertex x1 = g.terminus(e0);
            std::size_t tail = 0;
            if (len >= 2) {
                const std::size_t rest = w % head;
                const Bond e1 = g.continuation(e0, static_cast<int>(rest / block));
                tail = g.out_position(e1) * block + rest % block;
            }
            for (int m = a.min_mode(); m <= a.max_mode(); ++m) out.at(m, x, w) = a.at(m, x1, tail);
        }
    }
    return out;
}

CylinderSymbol transfer_L(const CylinderSymbol& a) {
    const RegularGraph& g = a.graph();
    const int q = g.q();
    const int depth = std::max(a.depth() - 1, 2);
    CylinderSymbol out(a.graph_ptr(), depth, a.min_mode(), a.max_mode(), a.budget());
    const int len = out.walk_length();
    const int need = a.walk_length();
    std::vector<Bond> walk;
    for (Vertex x = 0; x < g.n(); ++x) {
        for (std::size_t w = 0; w < out.walks_per_vertex(); ++w) {
            const std::vector<Bond> tail = decode_walk(g, x, len, w);
            for (Bond f : g.out_bonds(x)) {
                if (f == tail[0]) continue;
                const Vertex y = g.terminus(f);
                walk.assign(1, RegularGraph::reverse(f));
                walk.insert(walk.end(), tail.begin(), tail.end());
                const std::size_t idx = encode_walk(g, std::span<const Bond>(walk.data(), need));
                for (int m = a.min_mode(); m <= a.max_mode(); ++m) out.at(m, x, w) += a.at(m, y, idx);
            }
            for (int m = a.min_mode(); m <= a.max_mode(); ++m) out.at(m, x, w) /= static_cast<double>(q);
        }
    }
    return out;
}

CylinderSymbol fourier_shift(const CylinderSymbol& a, int m0) {
    CylinderSymbol out(a.graph_ptr(), a.depth(), a.min_mode() + m0, a.max_mode() + m0, a.budget());
    for (int m = a.min_mode(); m <= a.max_mode(); ++m)
        for (Vertex x = 0; x < a.graph().n(); ++x) {
            auto src = a.table(m, x);
            for (std::size_t w = 0; w < src.size(); ++w) out.at(m + m0, x, w) = src[w];
        }
    return out;
}

CylinderSymbol egorov_symbol(const CylinderSymbol& a, EgorovConvention conv) {
    const int q = a.q();
    const int su = conv == EgorovConvention::Printed ? 1 : -1;
    CylinderSymbol c = fourier_shift(shift_U(a) - a, su) + fourier_shift(transfer_L(a) - a, -su);
    c *= std::sqrt(static_cast<double>(q)) / (q + 1);
    return c;
}

CylinderSymbol cesaro_symbol(const CylinderSymbol& b, int N) {
    if (N < 1) throw std::invalid_argument("Cesaro length must be >= 1");
    CylinderSymbol sum = b;
    CylinderSymbol power = b;
    for (int k = 1; k < N; ++k) {
        power = shift_U(power);
        sum += fourier_shift(power, 2 * k);
    }
    sum *= 1.0 / N;
    return sum;
}

CylinderSymbol time_average(const CylinderSymbol& a, int T, int stride) {
    if (T < 1) throw std::invalid_argument("averaging time must be >= 1");
    if (stride != 1 && stride != 2) throw std::invalid_argument("stride must be 1 or 2");
    CylinderSymbol sum = a;
    CylinderSymbol power = a;
    for (int k = 1; k < T; ++k) {
        for (int i = 0; i < stride; ++i) power = shift_U(power);
        sum += power;
    }
    sum *= 1.0 / T;
    return sum;
}

double cylinder_measure(int q, int depth) {
    if (depth <= 1) return 1.0;
    return 1.0 / ((q + 1) * std::pow(static_cast<double>(q), depth - 2));
}

cplx boundary_integral(const CylinderSymbol& a, Vertex x, double s) {
    cplx sum{};
    for (std::size_t w = 0; w < a.walks_per_vertex(); ++w) sum += a.value(x, w, s);
    return sum * cylinder_measure(a.q(), a.depth());
}

cplx mean_prediction(const CylinderSymbol& a, double s0) {
    cplx sum{};
    for (Vertex x = 0; x < a.graph().n(); ++x) sum += boundary_integral(a, x, s0);
    return sum / static_cast<double>(a.graph().n());
}

std::string to_json(const CylinderSymbol& a) {
    nlohmann::json j;
    j["q"] = a.q();
    j["n"] = a.graph().n();
    j["D"] = a.depth();
    j["M"] = std::max(std::abs(a.min_mode()), std::abs(a.max_mode()));
    j["modes"] = {a.min_mode(), a.max_mode()};
    nlohmann::json entries = nlohmann::json::array();
    for (Vertex x = 0; x < a.graph().n(); ++x)
        for (std::size_t w = 0; w < a.walks_per_vertex(); ++w)
            for (int m = a.min_mode(); m <= a.max_mode(); ++m) {
                const cplx v = a.at(m, x, w);
                if (v != cplx{}) entries.push_back({x, w, m, v.real(), v.imag()});
            }
    j["entries"] = std::move(entries);
    return j.dump();
}

CylinderSymbol symbol_from_json(const std::string& text, std::shared_ptr<const RegularGraph> g) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("q").get<int>() != g->q()) throw std::invalid_argument("symbol q does not match graph");
    if (j.contains("n") && j.at("n").get<int>() != g->n())
        throw std::invalid_argument("symbol vertex count does not match graph");
    const int M = j.at("M").get<int>();
    int lo = -M, hi = M;
    if (j.contains("modes")) {
        lo = j["modes"][0].get<int>();
        hi = j["modes"][1].get<int>();
    }
    CylinderSymbol a(std::move(g), j.at("D").get<int>(), lo, hi);
    for (const auto& e : j.at("entries")) {
        const auto x = e[0].get<Vertex>();
        const auto w = e[1].get<std::size_t>();
        const int m = e[2].get<int>();
        if (x < 0 || x >= a.graph().n() || w >= a.walks_per_vertex() || m < lo || m > hi)
            throw std::out_of_range("symbol entry out of range");
        a.at(m, x, w) = cplx(e[3].get<double>(), e[4].get<double>());
    }
    return a;
}

double bump(double t) {
    const double u = 2.0 - 2.0 * std::abs(t);
    if (u >= 1.0) return 1.0;
    if (u <= 0.0) return 0.0;
    const double f = std::exp(-1.0 / u);
    const double g = std::exp(-1.0 / (1.0 - u));
    return f / (f + g);
}

}  // namespace qelab
