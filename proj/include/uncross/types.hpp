#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace uncross {

// n x 2 matrix of node positions, one row per node.
using Layout = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// 2 x 2 matrix holding the two endpoints of an edge as rows.
using EdgeSegment = Eigen::Matrix2d;

struct Edge {
    int a = 0;
    int b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// A graph together with the target metric the embedding should realize.
// Invariants (checked on construction): distances is a symmetric n x n
// matrix with zero diagonal and positive finite off-diagonal entries,
// edges are normalized (a < b), in range, and free of duplicates, and
// groups is either empty or holds one label per node.
struct GraphInstance {
    int node_count = 0;
    std::vector<Edge> edges;
    Eigen::MatrixXd distances;
    std::vector<std::string> groups;

    GraphInstance() = default;
    GraphInstance(int node_count, std::vector<Edge> edges, Eigen::MatrixXd distances,
                  std::vector<std::string> groups = {});
};

// Stress weights w_ij = d_ij^(-alpha), zero on the diagonal.
struct WeightMatrix {
    Eigen::MatrixXd values;
    double alpha = 2.0;
};

WeightMatrix build_weights(const GraphInstance& graph, double alpha = 2.0);

// Componentwise max(v, 0).
Eigen::VectorXd plus_part(const Eigen::VectorXd& v);

// The two endpoint rows of edge e under the given layout.
EdgeSegment edge_segment(const Layout& layout, const Edge& e);

}  // namespace uncross
