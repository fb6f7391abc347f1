#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qelab/graph.hpp"

namespace qelab {

using cplx = std::complex<double>;

struct SymbolBudget {
    int max_depth = 8;
    int max_mode = 64;
};

// a(x, w, s) = sum_m a_m(x, w) q^{i m s}, where w is a non-backtracking walk of
// length depth-1 from x (the first `depth` vertices of the ray [x, omega)).
// Modes run over [min_mode, max_mode].
class CylinderSymbol {
public:
    CylinderSymbol(std::shared_ptr<const RegularGraph> g, int depth, int min_mode = 0, int max_mode = 0,
                   SymbolBudget budget = {});

    static CylinderSymbol vertex_function(std::shared_ptr<const RegularGraph> g, const Eigen::VectorXd& b);
    static CylinderSymbol constant(std::shared_ptr<const RegularGraph> g, cplx c);
    // Indicator of the boundary cylinder through `walk` (depth = walk length + 1).
    static CylinderSymbol cylinder_indicator(std::shared_ptr<const RegularGraph> g, Vertex x,
                                             std::span<const Bond> walk);
    // phi_s(k) written as a trigonometric polynomial in q^{is}.
    static CylinderSymbol spherical_fourier(std::shared_ptr<const RegularGraph> g, int k);

    const RegularGraph& graph() const { return *graph_; }
    const std::shared_ptr<const RegularGraph>& graph_ptr() const { return graph_; }
    int q() const { return graph_->q(); }
    int depth() const { return depth_; }
    int walk_length() const { return depth_ - 1; }
    int min_mode() const { return lo_; }
    int max_mode() const { return hi_; }
    int mode_count() const { return hi_ - lo_ + 1; }
    std::size_t walks_per_vertex() const { return walks_; }
    const SymbolBudget& budget() const { return budget_; }

    cplx& at(int m, Vertex x, std::size_t w) { return data_[offset(m, x, w)]; }
    cplx at(int m, Vertex x, std::size_t w) const { return data_[offset(m, x, w)]; }
    // Contiguous table a_m(x, .) over walk indices.
    std::span<const cplx> table(int m, Vertex x) const {
        return {data_.data() + offset(m, x, 0), walks_};
    }

    cplx value(Vertex x, std::size_t w, double s) const;
    // Evaluates on any walk of length >= depth-1 through its prefix.
    cplx value_on_walk(Vertex x, std::span<const Bond> bonds, double s) const;

    // max over (x, w) of sum_m |a_m(x, w)|, an upper bound for sup_s |a| that is
    // attained when only one mode is present.
    double sup_norm() const;
    bool is_vertex_function() const { return depth_ == 1 && lo_ == 0 && hi_ == 0; }

    CylinderSymbol lifted(int depth) const;
    CylinderSymbol with_modes(int lo, int hi) const;
    // Smallest depth and mode range representing the same function (entries below tol dropped).
    CylinderSymbol compacted(double tol = 0.0) const;

    CylinderSymbol& operator+=(const CylinderSymbol& o);
    CylinderSymbol& operator-=(const CylinderSymbol& o);
    CylinderSymbol& operator*=(cplx c);

    const std::vector<cplx>& raw() const { return data_; }

private:
    std::size_t offset(int m, Vertex x, std::size_t w) const {
        return (static_cast<std::size_t>(m - lo_) * graph_->n() + x) * walks_ + w;
    }
    void align_with(const CylinderSymbol& o);

    std::shared_ptr<const RegularGraph> graph_;
    int depth_;
    int lo_;
    int hi_;
    std::size_t walks_;
    SymbolBudget budget_;
    std::vector<cplx> data_;
};

CylinderSymbol operator+(CylinderSymbol a, const CylinderSymbol& b);
CylinderSymbol operator-(CylinderSymbol a, const CylinderSymbol& b);
CylinderSymbol operator*(cplx c, CylinderSymbol a);

// max |a - b| over coefficients after aligning depth and modes.
double max_difference(const CylinderSymbol& a, const CylinderSymbol& b);

CylinderSymbol shift_U(const CylinderSymbol& a);
// Output depth max(D-1, 2): excluding the neighbour x_1 needs the first step.
CylinderSymbol transfer_L(const CylinderSymbol& a);
CylinderSymbol fourier_shift(const CylinderSymbol& a, int m0);

// Printed: q^{is} on the U term as stated in the source. Commutator: the sign that
// solves [A, Op(a)] = Op(c) for the kernel convention used by quantize.
enum class EgorovConvention { Commutator, Printed };
CylinderSymbol egorov_symbol(const CylinderSymbol& a, EgorovConvention conv = EgorovConvention::Commutator);

CylinderSymbol cesaro_symbol(const CylinderSymbol& b, int N);
CylinderSymbol time_average(const CylinderSymbol& a, int T, int stride = 1);

// nu_x-weight of one depth-D cylinder.
double cylinder_measure(int q, int depth);
cplx boundary_integral(const CylinderSymbol& a, Vertex x, double s);
cplx mean_prediction(const CylinderSymbol& a, double s0);

std::string to_json(const CylinderSymbol& a);
CylinderSymbol symbol_from_json(const std::string& text, std::shared_ptr<const RegularGraph> g);

// C-infinity plateau: 1 on [-1/2, 1/2], 0 outside (-1, 1).
double bump(double t);

struct WindowProfile {
    double s0 = 0.0;
    double delta = 0.0;

    double operator()(double s) const { return bump((s - s0) / (2.0 * delta)); }
    // Points where the profile changes regime, for quadrature panels.
    std::vector<double> breakpoints() const {
        return {s0 - 2 * delta, s0 - delta, s0 + delta, s0 + 2 * delta};
    }
};

}  // namespace qelab
