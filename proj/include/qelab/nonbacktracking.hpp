#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qelab/graph.hpp"
#include "qelab/quantize.hpp"
#include "qelab/spectral.hpp"

namespace qelab {

// Directed bonds of a graph; bond ids follow RegularGraph (2i, 2i+1 per edge).
class BondSpace {
public:
    explicit BondSpace(const RegularGraph& g) : g_(&g) {}

    const RegularGraph& graph() const { return *g_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(g_->num_bonds()); }
    Vertex origin(Bond e) const { return g_->origin(e); }
    Vertex terminus(Bond e) const { return g_->terminus(e); }
    static Bond reverse(Bond e) { return RegularGraph::reverse(e); }

    void write_csv(std::ostream& os) const;

private:
    const RegularGraph* g_;
};

// M(e, e') = 1/q when o(e') = t(e) and e' is not the reverse of e.
Eigen::SparseMatrix<double> msharp_sparse(const BondSpace& bs);
Eigen::MatrixXd msharp_real(const BondSpace& bs);
GraphOperator msharp_matrix(const BondSpace& bs);

std::vector<cplx> msharp_eigenvalues(const BondSpace& bs);

// Cycle rank |E| - |V| + 1.
int cycle_rank(const RegularGraph& g);

std::vector<cplx> predicted_msharp_spectrum(const SpectralData& sd, const RegularGraph& g);

// Greedy nearest matching; returns the largest matched distance.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b);

// Roots of q eps^2 - (q+1) lambda eps + 1 = 0 ordered |eps1| <= |eps2|.
std::pair<cplx, cplx> eps_roots(double lambda, int q);

struct BondPair {
    cplx eps1, eps2;
    cplx mu1, mu2;  // eigenvalues 1/(q eps)
    Eigen::VectorXcd f1, f2;
    bool double_root = false;
    // at a double root f2 = f1 and (M - mu1) generalized = f1
    std::optional<Eigen::VectorXcd> generalized;
};

inline constexpr double kDoubleRootTolerance = 1e-10;

BondPair bond_eigenvectors(const RegularGraph& g, const Eigen::VectorXd& phi, double lambda);

// Closed walk of bonds, consecutive: t(e_j) = o(e_{j+1}) and t(e_k) = o(e_1).
using Circuit = std::vector<Bond>;

// Fundamental circuits of a BFS spanning tree, each based at the root.
std::vector<Circuit> fundamental_circuits(const RegularGraph& g, Vertex root = 0);

struct CycleFamilies {
    std::vector<Eigen::VectorXd> odd;   // eigenvalue 1/q
    std::vector<Eigen::VectorXd> even;  // eigenvalue -1/q
};

// Throws if the circuits do not give independent vectors.
CycleFamilies cycle_eigenvectors(const RegularGraph& g, const std::vector<Circuit>& basis);
CycleFamilies cycle_eigenvectors(const RegularGraph& g);

Eigen::VectorXd odd_circuit_vector(const RegularGraph& g, const Circuit& c);
Eigen::VectorXd even_circuit_vector(const RegularGraph& g, const Circuit& c);

struct OrthogonalPair {
    cplx mu;
    Eigen::VectorXcd f1, f2prime;
    cplx inner;               // <f1, f2'>
    Eigen::Matrix2cd block;   // M on the normalized pair
    bool double_root = false;
};

OrthogonalPair orthogonal_pair(const RegularGraph& g, const Eigen::VectorXd& phi, double lambda);

struct CesaroNorm {
    double norm = 0.0;
    bool flagged = false;  // bipartite and q^{2is} close to -1
};

// Norm of (1/N^2) sum_{k<N} sum_{j<=k} q^{2isj} M^j on the complement of constants.
CesaroNorm cesaro_resolvent_norm(const BondSpace& bs, int N, double s);

// The (q+1) q^{D-1}-regular multigraph on V with adjacency (q+1) q^{D-1} S_D.
RegularGraph reduce_depth_D(const RegularGraph& g, int D);

}  // namespace qelab
