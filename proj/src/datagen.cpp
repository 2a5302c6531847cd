#include "uncross/datagen.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "uncross/geometry.hpp"
#include "uncross/mds.hpp"
#include "uncross/rng.hpp"

namespace uncross {

BenchmarkInstance generate_planar_instance(int nodes, int edges, int dimension,
                                           std::uint64_t seed) {
    if (nodes < 3) throw std::invalid_argument("need at least 3 nodes");
    if (dimension < 2) throw std::invalid_argument("dimension must be at least 2");
    if (edges < 0 || edges > 3 * nodes - 6)
        throw std::invalid_argument("edge count must lie in [0, 3 * nodes - 6]");

    Rng rng(seed);
    Eigen::MatrixXd points(nodes, dimension);
    for (int i = 0; i < nodes; ++i)
        for (int k = 0; k < dimension; ++k) points(i, k) = rng.uniform01();

    Eigen::MatrixXd distances = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int i = 0; i < nodes; ++i) {
        for (int j = i + 1; j < nodes; ++j) {
            const double d = (points.row(i) - points.row(j)).norm();
            distances(i, j) = d;
            distances(j, i) = d;
        }
    }
    const Layout projection = points.leftCols<2>();

    constexpr int kStallLimit = 10000;
    std::vector<Edge> accepted;
    std::set<std::pair<int, int>> present;
    int stall = 0;
    long long attempts = 0;
    const long long budget = 400000LL + 20000LL * edges;
    while (static_cast<int>(accepted.size()) < edges) {
        if (++attempts > budget)
            throw GenerationError("edge budget exhausted after " + std::to_string(attempts - 1) +
                                      " proposals (" + std::to_string(accepted.size()) + " of " +
                                      std::to_string(edges) + " edges placed)",
                                  static_cast<int>(accepted.size()));
        int i = static_cast<int>(rng.below(nodes));
        int j = static_cast<int>(rng.below(nodes));
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (present.count({i, j})) continue;

        EdgeSegment candidate;
        candidate.row(0) = projection.row(i);
        candidate.row(1) = projection.row(j);
        bool crossing_free = true;
        for (const Edge& e : accepted) {
            if (e.a == i || e.a == j || e.b == i || e.b == j) continue;
            const EdgeSegment s = edge_segment(projection, e);
            if (!boxes_overlap(candidate, s)) continue;
            if (segments_intersect(candidate, s)) {
                crossing_free = false;
                break;
            }
        }
        if (crossing_free) {
            accepted.push_back({i, j});
            present.insert({i, j});
            stall = 0;
        } else if (++stall >= kStallLimit) {
            const auto victim = static_cast<std::size_t>(rng.below(accepted.size()));
            present.erase({accepted[victim].a, accepted[victim].b});
            accepted.erase(accepted.begin() + static_cast<std::ptrdiff_t>(victim));
            stall = 0;
        }
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const Edge& l, const Edge& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); });

    BenchmarkInstance instance;
    instance.graph = GraphInstance(nodes, std::move(accepted), std::move(distances));
    instance.points = std::move(points);
    instance.projection = projection;
    instance.planar_stress = stress(projection, instance.graph, build_weights(instance.graph));
    instance.seed = seed;
    return instance;
}

std::vector<SuiteItem> generate_suite(const std::vector<SuiteRow>& rows,
                                      std::uint64_t master_seed) {
    std::vector<SuiteItem> items;
    std::uint64_t index = 0;
    for (const auto& row : rows) {
        for (int rep = 0; rep < row.replicates; ++rep, ++index) {
            SuiteItem item;
            item.row = row;
            item.replicate = rep;
            item.seed = derive_seed(master_seed, index);
            try {
                item.instance = generate_planar_instance(row.nodes, row.edges, row.dimension,
                                                         item.seed);
            } catch (const GenerationError& err) {
                item.error = err.what();
            } catch (const std::invalid_argument& err) {
                item.error = err.what();
            }
            items.push_back(std::move(item));
        }
    }
    return items;
}

}  // namespace uncross
