#pragma once

#include <cstdint>
#include <vector>

#include "uncross/types.hpp"

namespace uncross {

// Weighted raw stress: sum over node pairs i < j of
// w_ij (||X_i - X_j|| - d_ij)^2.
double stress(const Layout& layout, const GraphInstance& graph, const WeightMatrix& weights);

// Quadratic majorizer of stress anchored at reference layout Z. With
// inv(x) = 1/x for x > 0 and inv(0) = 0:
//   L_w:  off-diagonal -w_ij, diagonal sum_k w_ik
//   L_z:  off-diagonal -w_ij d_ij inv(||Z_i - Z_j||), diagonal minus row sum
//   F(X) = constant + tr(X' L_w X) - 2 tr(X' L_z Z)
struct MajorizationContext {
    Eigen::MatrixXd l_w;
    Eigen::MatrixXd l_z;
    Layout z;
    Layout l_z_z;  // cached L_z * Z
    double constant = 0.0;
};

MajorizationContext build_majorization(const GraphInstance& graph, const WeightMatrix& weights,
                                       const Layout& z);

double fstress(const Layout& layout, const MajorizationContext& ctx);

// d/dX fstress = 2 L_w X - 2 L_z Z.
Layout fstress_gradient(const Layout& layout, const MajorizationContext& ctx);

Layout random_layout(int node_count, std::uint64_t seed);

struct SmacofResult {
    Layout layout;
    std::vector<double> stress_trace;  // entry 0 is the initial stress
    int iterations = 0;
    bool converged = false;
};

// Stress majorization: repeatedly minimizes the surrogate anchored at the
// current layout by solving the normal equations. The stress trace is
// non-increasing. Stops when the per-iteration stress drop falls below
// tolerance * previous stress.
SmacofResult smacof_embed(const GraphInstance& graph, const WeightMatrix& weights,
                          const Layout* init = nullptr, int max_iterations = 500,
                          double tolerance = 1e-6, std::uint64_t seed = 0);

}  // namespace uncross
