#include "uncross/types.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace uncross {

GraphInstance::GraphInstance(int node_count_, std::vector<Edge> edges_, Eigen::MatrixXd distances_,
                             std::vector<std::string> groups_)
    : node_count(node_count_),
      edges(std::move(edges_)),
      distances(std::move(distances_)),
      groups(std::move(groups_)) {
    if (node_count < 0) throw std::invalid_argument("node_count must be non-negative");
    if (distances.rows() != node_count || distances.cols() != node_count)
        throw std::invalid_argument("distances must be a " + std::to_string(node_count) + " x " +
                                    std::to_string(node_count) + " matrix");
    for (int i = 0; i < node_count; ++i) {
        if (distances(i, i) != 0.0)
            throw std::invalid_argument("distances diagonal must be zero (node " + std::to_string(i) + ")");
        for (int j = i + 1; j < node_count; ++j) {
            const double d = distances(i, j);
            if (!(std::isfinite(d) && d > 0.0))
                throw std::invalid_argument("distance between nodes " + std::to_string(i) + " and " +
                                            std::to_string(j) + " must be positive and finite");
            if (d != distances(j, i))
                throw std::invalid_argument("distances must be symmetric (nodes " + std::to_string(i) +
                                            ", " + std::to_string(j) + ")");
        }
    }
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= node_count || e.b >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.a == e.b) throw std::invalid_argument("self loops are not allowed");
        if (e.a > e.b) std::swap(e.a, e.b);
        if (!seen.emplace(e.a, e.b).second)
            throw std::invalid_argument("duplicate edge (" + std::to_string(e.a) + ", " +
                                        std::to_string(e.b) + ")");
    }
    if (!groups.empty() && static_cast<int>(groups.size()) != node_count)
        throw std::invalid_argument("groups must be empty or hold one label per node");
}

WeightMatrix build_weights(const GraphInstance& graph, double alpha) {
    const int n = graph.node_count;
    WeightMatrix w;
    w.alpha = alpha;
    w.values = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) w.values(i, j) = std::pow(graph.distances(i, j), -alpha);
    return w;
}

Eigen::VectorXd plus_part(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

EdgeSegment edge_segment(const Layout& layout, const Edge& e) {
    EdgeSegment s;
    s.row(0) = layout.row(e.a);
    s.row(1) = layout.row(e.b);
    return s;
}

}  // namespace uncross
