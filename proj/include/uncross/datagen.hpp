#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncross/types.hpp"

namespace uncross {

// A generated benchmark graph: points sampled uniformly from the unit cube
// in `dimension` coordinates, distances taken from the full-dimensional
// metric, and edges chosen so their straight-line drawing under the
// first-two-coordinates projection is crossing free.
struct BenchmarkInstance {
    GraphInstance graph;
    Eigen::MatrixXd points;   // node_count x dimension source points
    Layout projection;        // first two coordinates of each point
    double planar_stress = 0.0;  // stress of the projection under default weights
    std::uint64_t seed = 0;
};

class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& message, int achieved_edges)
        : std::runtime_error(message), achieved_edges_(achieved_edges) {}

    int achieved_edges() const { return achieved_edges_; }

private:
    int achieved_edges_;
};

// Markov-chain generation: propose uniformly random absent edges, accept one
// when its projected segment crosses no accepted segment (sharing an endpoint
// is fine), and after 10^4 consecutive rejections remove a random accepted
// edge and carry on. Throws GenerationError when the total proposal budget
// runs out. Requires nodes >= 3, dimension >= 2 and edges <= 3 nodes - 6.
BenchmarkInstance generate_planar_instance(int nodes, int edges, int dimension,
                                           std::uint64_t seed);

struct SuiteRow {
    int nodes = 0;
    int edges = 0;
    int dimension = 7;
    int replicates = 1;
};

struct SuiteItem {
    SuiteRow row;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::optional<BenchmarkInstance> instance;
    std::string error;  // empty on success
};

// One item per row replicate, with per-item seeds spread from the master
// seed; generation failures are recorded in the item instead of thrown.
std::vector<SuiteItem> generate_suite(const std::vector<SuiteRow>& rows, std::uint64_t master_seed);

}  // namespace uncross
