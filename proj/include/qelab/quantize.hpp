#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qelab/graph.hpp"
#include "qelab/quadrature.hpp"
#include "qelab/symbol.hpp"

namespace qelab {

// Real-valued factor depending only on s; an empty function means 1.
using Profile = std::function<double(double)>;

struct GraphOperator {
    Eigen::MatrixXcd matrix;
    std::string label;

    Eigen::Index dimension() const { return matrix.rows(); }
};

struct QuantizeOptions {
    // Cutoff radius: walks of length d carry the weight bump(d / r), so d < r.
    double r = 4.0;
    double quad_tol = kDefaultQuadTol;
    int nodes = kDefaultNodes;
    int max_nodes = kMaxQuadNodes;
    // Extra quadrature panel edges, e.g. WindowProfile::breakpoints().
    std::vector<double> breakpoints;
};

double cutoff_weight(int d, double r);
// Longest walk length with a nonzero cutoff weight.
int cutoff_reach(double r);

// h_omega(y) - h_omega(x) = 2j - d for y at the end of `geodesic` and omega in the
// cylinder through `cylinder`, with j the common prefix length.
int busemann_increment(std::span<const Bond> geodesic, std::span<const Bond> cylinder);

// F(k) = integral of q^{iks} phi(s) dmu(s) for k in [kmin, kmax].
class MomentTable {
public:
    MomentTable(int q, const Profile& phi, int kmin, int kmax, const QuantizeOptions& opt);
    cplx operator()(int k) const { return values_[k - kmin_]; }
    int kmin() const { return kmin_; }
    int kmax() const { return kmax_; }

private:
    int kmin_;
    int kmax_;
    std::vector<cplx> values_;
};

// Tree kernel of Op(a * phi) between x and the end of `walk`.
cplx tree_kernel(const CylinderSymbol& a, const Profile& phi, Vertex x, std::span<const Bond> walk,
                 const QuantizeOptions& opt = {});

GraphOperator op_graph(const CylinderSymbol& a, const Profile& phi, const QuantizeOptions& opt);
GraphOperator op_graph(const CylinderSymbol& a, const QuantizeOptions& opt);

// k(d) = integral of phi(s) phi_s(d) dmu(s), d = 0..dmax.
std::vector<double> radial_kernel(const Profile& phi, int q, int dmax, const QuantizeOptions& opt = {});
// q^{d/2} k(d); well scaled for large d.
std::vector<double> radial_kernel_scaled(const Profile& phi, int q, int dmax, const QuantizeOptions& opt = {});

Eigen::MatrixXd radial_multiplier(const RegularGraph& g, const Profile& phi, const QuantizeOptions& opt);
// Applies the radial multiplier to the columns of psi without forming it.
Eigen::MatrixXd apply_radial(const RegularGraph& g, const Profile& phi, const QuantizeOptions& opt,
                             const Eigen::MatrixXd& psi);

double hs_norm(const Eigen::MatrixXcd& m);
double hs_norm(const Eigen::MatrixXd& m);
double hs_norm(const GraphOperator& op);

// Per-vertex L2 mass: integral over Omega x [0, tau] of |a phi|^2 dnu_x dmu.
std::vector<double> symbol_mass(const CylinderSymbol& a, const Profile& phi, const QuantizeOptions& opt = {});

struct HsBound {
    double hs_squared = 0.0;
    double long_part = 0.0;   // vertices with rho(x) >= r
    double short_part = 0.0;  // q^r times the mass of vertices with rho(x) <= r
    double bound() const { return long_part + short_part; }
};

HsBound hs_norm_bound(const CylinderSymbol& a, const Profile& phi, const std::vector<int>& rho,
                      const QuantizeOptions& opt);

}  // namespace qelab
